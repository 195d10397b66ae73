#include "hexwar/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace hexwar::nn {

namespace {

constexpr char kMagic[8] = {'H', 'E', 'X', 'W', 'A', 'R', 'C', 'K'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf.insert(buf.end(), b, b + n);
  }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void i32(std::int32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  std::vector<std::uint8_t> buf;
};

class Reader {
 public:
  Reader(const std::uint8_t* d, std::size_t n) : d_(d), n_(n) {}
  void raw(void* p, std::size_t n) {
    if (pos_ + n > n_) throw CheckpointError(CheckpointError::Reason::Truncated, "checkpoint truncated");
    std::memcpy(p, d_ + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  std::int32_t i32() {
    std::int32_t v;
    raw(&v, 4);
    return v;
  }

 private:
  const std::uint8_t* d_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

std::string config_string(const NetworkConfig& c) {
  return "S=" + std::to_string(c.stack_limit) + " R=" + std::to_string(c.reinforcement_window) +
         " latent=" + std::to_string(c.latent) + " arch=" + (c.arch == Architecture::Recurrent ? "recurrent" : "residual") +
         " blocks=" + std::to_string(c.residual_blocks);
}

NamedTensor from_mat(const Mat<float>& m) {
  NamedTensor t;
  t.shape = {static_cast<int>(m.rows()), static_cast<int>(m.cols())};
  t.data.assign(m.data(), m.data() + m.size());
  return t;
}

const NamedTensor& require(const Archive& a, const std::string& name) {
  auto it = a.tensors.find(name);
  if (it == a.tensors.end())
    throw CheckpointError(CheckpointError::Reason::MissingTensor, "checkpoint is missing tensor '" + name + "'");
  return it->second;
}

void fill_mat(const NamedTensor& t, Mat<float>& m, const std::string& name) {
  if (t.data.size() != static_cast<std::size_t>(m.size()))
    throw CheckpointError(CheckpointError::Reason::ShapeMismatch,
                          "tensor '" + name + "' has shape " + shape_string(t.shape) + ", expected " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  std::memcpy(m.data(), t.data.data(), t.data.size() * sizeof(float));
}

}  // namespace

const char* reason_name(CheckpointError::Reason r) {
  switch (r) {
    case CheckpointError::Reason::Io: return "io";
    case CheckpointError::Reason::BadMagic: return "bad_magic";
    case CheckpointError::Reason::UnsupportedVersion: return "unsupported_version";
    case CheckpointError::Reason::Truncated: return "truncated";
    case CheckpointError::Reason::ChecksumMismatch: return "checksum_mismatch";
    case CheckpointError::Reason::ConfigMismatch: return "config_mismatch";
    case CheckpointError::Reason::MissingTensor: return "missing_tensor";
    case CheckpointError::Reason::ShapeMismatch: return "shape_mismatch";
  }
  return "unknown";
}

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::uint8_t> serialize_archive(const Archive& a) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  const NetworkConfig& c = a.config;
  w.i32(c.stack_limit);
  w.i32(c.reinforcement_window);
  w.i32(c.latent);
  w.i32(static_cast<std::int32_t>(c.arch));
  w.i32(c.residual_blocks);
  w.i32(c.input_channels());
  w.i32(c.action_planes());
  w.u32(static_cast<std::uint32_t>(a.tensors.size()));
  for (const auto& [name, t] : a.tensors) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.raw(name.data(), name.size());
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) w.i32(d);
    if (Tensor::count(t.shape) != t.data.size())
      throw std::invalid_argument("serialize_archive: tensor '" + name + "' data does not match its shape");
    w.raw(t.data.data(), t.data.size() * sizeof(float));
  }
  w.u64(fnv1a(w.buf.data(), w.buf.size()));
  return std::move(w.buf);
}

Archive deserialize_archive(const std::vector<std::uint8_t>& bytes) {
  using R = CheckpointError::Reason;
  if (bytes.size() < sizeof kMagic + 4 + 8) throw CheckpointError(R::Truncated, "checkpoint truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw CheckpointError(R::BadMagic, "not a hexwar checkpoint (bad magic)");
  Reader r(bytes.data() + sizeof kMagic, bytes.size() - sizeof kMagic - 8);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw CheckpointError(R::UnsupportedVersion, "unsupported checkpoint version " + std::to_string(version));
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (fnv1a(bytes.data(), bytes.size() - 8) != stored)
    throw CheckpointError(R::ChecksumMismatch, "checkpoint checksum mismatch (file corrupted)");
  Archive a;
  a.config.stack_limit = r.i32();
  a.config.reinforcement_window = r.i32();
  a.config.latent = r.i32();
  const std::int32_t arch = r.i32();
  if (arch != 0 && arch != 1) throw CheckpointError(R::ConfigMismatch, "unknown architecture tag");
  a.config.arch = static_cast<Architecture>(arch);
  a.config.residual_blocks = r.i32();
  const std::int32_t in_ch = r.i32();
  const std::int32_t planes = r.i32();
  if (a.config.stack_limit < 1 || a.config.reinforcement_window < 0 || a.config.latent < 8)
    throw CheckpointError(R::ConfigMismatch, "checkpoint config is invalid: " + config_string(a.config));
  if (in_ch != a.config.input_channels() || planes != a.config.action_planes())
    throw CheckpointError(R::ConfigMismatch, "checkpoint channel counts inconsistent with its S/R");
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = r.u32();
    if (len > 4096) throw CheckpointError(R::Truncated, "checkpoint tensor name too long");
    std::string name(len, '\0');
    r.raw(name.data(), len);
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw CheckpointError(R::Truncated, "checkpoint tensor rank too large");
    NamedTensor t;
    for (std::uint32_t k = 0; k < rank; ++k) {
      const int d = r.i32();
      if (d < 0) throw CheckpointError(R::Truncated, "negative dimension in checkpoint");
      t.shape.push_back(d);
    }
    const std::size_t n = Tensor::count(t.shape);
    if (n > bytes.size()) throw CheckpointError(R::Truncated, "checkpoint truncated");
    t.data.resize(n);
    r.raw(t.data.data(), n * sizeof(float));
    a.tensors.emplace(std::move(name), std::move(t));
  }
  return a;
}

void write_archive(const std::string& path, const Archive& a) {
  const auto bytes = serialize_archive(a);
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(CheckpointError::Reason::Io, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError(CheckpointError::Reason::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw CheckpointError(CheckpointError::Reason::Io, "cannot rename onto " + path + ": " + ec.message());
}

Archive read_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Reason::Io, "cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_archive(bytes);
}

Archive to_archive(const Network& net) {
  Archive a;
  a.config = net.config();
  for (const auto& l : net.layers()) {
    a.tensors[l.name + ".weight"] = from_mat(l.weight);
    a.tensors[l.name + ".bias"] = from_mat(l.bias);
  }
  return a;
}

void add_optimizer(Archive& a, const Adam& adam) {
  const auto& m = adam.first_moments();
  const auto& v = adam.second_moments();
  for (std::size_t i = 0; i < m.size(); ++i) {
    a.tensors["adam.m." + std::to_string(i)] = from_mat(m[i]);
    a.tensors["adam.v." + std::to_string(i)] = from_mat(v[i]);
  }
  // Step count split into two exactly-representable halves.
  const auto t = static_cast<std::uint64_t>(adam.steps());
  a.tensors["adam.step"] = NamedTensor{{2}, {static_cast<float>(t & 0xFFFFFu), static_cast<float>(t >> 20)}};
}

Network network_from_archive(const Archive& a, const std::optional<NetworkConfig>& expected) {
  if (expected && !(*expected == a.config))
    throw CheckpointError(CheckpointError::Reason::ConfigMismatch,
                          "checkpoint config (" + config_string(a.config) + ") does not match expected (" +
                              config_string(*expected) + ")");
  Network net(a.config);
  for (auto& l : net.layers()) {
    fill_mat(require(a, l.name + ".weight"), l.weight, l.name + ".weight");
    Mat<float> b(l.bias.size(), 1);
    fill_mat(require(a, l.name + ".bias"), b, l.name + ".bias");
    l.bias = b.col(0);
  }
  return net;
}

bool optimizer_from_archive(const Archive& a, const Network& net, Adam& adam) {
  auto step = a.tensors.find("adam.step");
  if (step == a.tensors.end()) return false;
  adam.ensure_shapes(net);
  auto& m = adam.first_moments();
  auto& v = adam.second_moments();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::string mi = "adam.m." + std::to_string(i);
    const std::string vi = "adam.v." + std::to_string(i);
    fill_mat(require(a, mi), m[i], mi);
    fill_mat(require(a, vi), v[i], vi);
  }
  const auto& s = step->second.data;
  if (s.size() != 2) throw CheckpointError(CheckpointError::Reason::ShapeMismatch, "adam.step must have 2 entries");
  adam.set_steps(static_cast<long long>(static_cast<std::uint64_t>(s[0]) | (static_cast<std::uint64_t>(s[1]) << 20)));
  return true;
}

void save_network(const std::string& path, const Network& net) { write_archive(path, to_archive(net)); }

Network load_network(const std::string& path, const std::optional<NetworkConfig>& expected) {
  return network_from_archive(read_archive(path), expected);
}

}  // namespace hexwar::nn

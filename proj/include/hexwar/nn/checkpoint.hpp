#pragma once

// Binary checkpoint archive.
//
//   magic "HEXWARCK", u32 version
//   config: i32 stack_limit, reinforcement_window, latent, arch, residual_blocks,
//           input_channels, action_planes
//   u32 tensor count, then per tensor: u32 name length, name bytes,
//           u32 rank, i32 dims[rank], float32 data (little endian)
//   u64 FNV-1a checksum over every preceding byte
//
// Optimizer state (Adam moments and step) and opaque trainer blobs can ride
// along as extra named tensors; load ignores what it does not need.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexwar/nn/network.hpp"
#include "hexwar/nn/optimizer.hpp"

namespace hexwar::nn {

class CheckpointError : public std::runtime_error {
 public:
  enum class Reason { Io, BadMagic, UnsupportedVersion, Truncated, ChecksumMismatch, ConfigMismatch, MissingTensor,
                      ShapeMismatch };
  CheckpointError(Reason r, const std::string& msg) : std::runtime_error(msg), reason_(r) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

const char* reason_name(CheckpointError::Reason r);

struct NamedTensor {
  std::vector<int> shape;
  std::vector<float> data;
};

struct Archive {
  NetworkConfig config;
  std::map<std::string, NamedTensor> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_archive(const Archive& a);
Archive deserialize_archive(const std::vector<std::uint8_t>& bytes);

void write_archive(const std::string& path, const Archive& a);  // write to temp + rename
Archive read_archive(const std::string& path);

Archive to_archive(const Network& net);
/// Adds Adam moments/step to an archive.
void add_optimizer(Archive& a, const Adam& adam);

/// Builds a network from an archive. If `expected` is given the stored config
/// must match it exactly.
Network network_from_archive(const Archive& a, const std::optional<NetworkConfig>& expected = std::nullopt);
/// Restores the optimizer state; returns false if the archive has none.
bool optimizer_from_archive(const Archive& a, const Network& net, Adam& adam);

void save_network(const std::string& path, const Network& net);
Network load_network(const std::string& path, const std::optional<NetworkConfig>& expected = std::nullopt);

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n);

}  // namespace hexwar::nn

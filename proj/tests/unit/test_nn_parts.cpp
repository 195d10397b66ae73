#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "../common/hexconv_oracle.hpp"
#include "hexwar/encoding.hpp"
#include "hexwar/hexgrid.hpp"
#include "hexwar/nn/checkpoint.hpp"
#include "hexwar/nn/hex_conv.hpp"
#include "hexwar/nn/network.hpp"
#include "hexwar/nn/optimizer.hpp"
#include "../common/fixtures.hpp"

using namespace hexwar;
using namespace hexwar::nn;

namespace {

NetworkConfig small_config(int S = 2, int R = 2, int latent = 16, Architecture arch = Architecture::Recurrent) {
  NetworkConfig c;
  c.stack_limit = S;
  c.reinforcement_window = R;
  c.latent = latent;
  c.arch = arch;
  c.residual_blocks = 4;
  return c;
}

Tensor random_input(const NetworkConfig& c, int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 2.0f);
  Tensor t({c.input_channels(), h, w});
  for (auto& v : t.values()) v = u(rng);
  return t;
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hexwar_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(HexConv, IdentityKernel) {
  HexConv<float> k("id", 3, 3, 7);
  for (int i = 0; i < 3; ++i) k.w(i, i, 0) = 1.0f;
  const Tensor x = random_input(small_config(), 5, 6, 1);
  Tensor x3({3, 5, 6});
  std::copy(x.values().begin(), x.values().begin() + 90, x3.values().begin());
  const Tensor y = hex_conv2d(x3, k);
  for (std::size_t i = 0; i < y.values().size(); ++i) EXPECT_EQ(y.values()[i], x3.values()[i]);
}

TEST(HexConv, AllOnesCountsNeighbourhood) {
  HexConv<float> k("ones", 1, 1, 7);
  k.weight.setOnes();
  Tensor x({1, 5, 5});
  std::fill(x.values().begin(), x.values().end(), 1.0f);
  const Tensor y = hex_conv2d(x, k);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      EXPECT_EQ(y.at(0, r, c), static_cast<float>(hex_neighborhood({r, c}, 1, 5, 5).size()));
  EXPECT_EQ(y.at(0, 2, 2), 7.0f);
}

TEST(HexConv, MatchesGatherOracle) {
  for (int n = 3; n <= 9; ++n) EXPECT_LT(oracle::hex_conv_max_error(n, 100, 100 + n), 1e-5) << n;
}

TEST(HexConv, NonSquareBoards) {
  std::mt19937_64 rng(3);
  HexConv<float> k("k", 2, 3, 7);
  for (Eigen::Index i = 0; i < k.weight.size(); ++i) k.weight.data()[i] = static_cast<float>(rng() % 7) - 3.0f;
  for (auto [h, w] : {std::pair{2, 7}, std::pair{7, 2}, std::pair{1, 1}, std::pair{4, 9}}) {
    Tensor x({2, h, w});
    for (auto& v : x.values()) v = static_cast<float>(rng() % 5);
    const Tensor a = hex_conv2d(x, k), b = oracle::gather_conv(x, k);
    for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-5);
  }
}

TEST(HexConv, ShapeMismatchRejected) {
  HexConv<float> k("k", 2, 1, 7);
  Tensor x({3, 4, 4});
  EXPECT_THROW(hex_conv2d(x, k), std::invalid_argument);
}

TEST(NetworkOutputs, ValueInRangeAndRecurrenceMatters) {
  const auto cfg = small_config();
  const Network net = Network::random(cfg, 2);
  for (int i = 0; i < 1000; ++i) {
    const auto out = net.forward(random_input(cfg, 3 + i % 4, 3 + i % 3, i), 1 + i % 3);
    ASSERT_GE(out.value, -1.0);
    ASSERT_LE(out.value, 1.0);
  }
  std::vector<Tensor> lat;
  net.forward(random_input(cfg, 5, 5, 99), 2, &lat);
  ASSERT_EQ(lat.size(), 2u);
  EXPECT_FALSE(std::equal(lat[0].values().begin(), lat[0].values().end(), lat[1].values().begin()));
}

TEST(NetworkOutputs, SizePolymorphism) {
  for (auto arch : {Architecture::Recurrent, Architecture::Residual}) {
    const auto cfg = small_config(2, 2, 16, arch);
    const Network net = Network::random(cfg, 3);
    for (int n : {5, 9, 12}) {
      const auto out = net.forward(random_input(cfg, n, n, n), 6);
      EXPECT_EQ(out.policy_logits.shape(), (std::vector<int>{9 * 2 + 3, n, n}));
    }
  }
}

TEST(Loss, AnalyticValues) {
  NetworkOutput out;
  out.policy_logits = Tensor({3, 2, 2});
  out.value = 0.5;
  const std::vector<int> legal = {1, 4, 7, 9};
  const std::vector<float> uniform(4, 0.25f);
  // Uniform logits, uniform target: cross-entropy ln 4; value term (0.5-z)^2.
  EXPECT_NEAR(policy_value_loss(out, legal, uniform, 0.5), std::log(4.0), 1e-12);
  EXPECT_NEAR(policy_value_loss(out, legal, uniform, -0.5), std::log(4.0) + 1.0, 1e-12);
  EXPECT_THROW(policy_value_loss(out, {}, {}, 0.0), std::invalid_argument);
  // Confident correct policy, exact value: loss close to zero.
  out.policy_logits.values()[4] = 50.0f;
  const std::vector<float> onehot = {0, 1, 0, 0};
  EXPECT_LT(policy_value_loss(out, legal, onehot, 0.5), 1e-9);
}

TEST(Residual, EffectiveDepthAndIndependentBlocks) {
  auto cfg = small_config(1, 1, 8, Architecture::Residual);
  cfg.residual_blocks = 12;
  const Network res = Network::random(cfg, 4);
  const Network rec = Network::random(small_config(1, 1, 8), 4);
  // 12 single-conv blocks carry six times the parameters of the shared 2-conv step.
  EXPECT_EQ(res.block_parameter_count(), 6 * rec.block_parameter_count());
  const auto blocks = res.block_layer_indices();
  ASSERT_EQ(blocks.size(), 12u);
  std::set<const void*> addresses;
  for (int b : blocks) addresses.insert(res.layers()[b].weight.data());
  EXPECT_EQ(addresses.size(), 12u);
}

TEST(Residual, GradientLocality) {
  auto cfg = small_config(1, 1, 8, Architecture::Residual);
  cfg.residual_blocks = 5;
  auto net = NetworkT<double>::random(cfg, 5);
  for (auto& l : net.layers()) l.bias.setConstant(0.05);
  const auto samples = fixtures::random_samples(cfg, 3, 3, 3, 6);
  auto grads = net.zero_gradients();
  net.loss(samples, 6, &grads);
  const auto blocks = net.block_layer_indices();
  const int target = blocks[3];
  // Random direction supported on block 3 only.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  auto& L = net.layers()[target];
  Mat<double> dw(L.weight.rows(), L.weight.cols());
  for (Eigen::Index i = 0; i < dw.size(); ++i) dw.data()[i] = nd(rng);
  const double h = 1e-6;
  const Mat<double> saved = L.weight;
  L.weight = saved + h * dw;
  const double up = net.loss(samples, 6, nullptr).total;
  L.weight = saved - h * dw;
  const double down = net.loss(samples, 6, nullptr).total;
  L.weight = saved;
  const double numeric = (up - down) / (2 * h);
  const double analytic = (grads.layers[target].weight.array() * dw.array()).sum();
  EXPECT_NEAR(numeric, analytic, 1e-3 * std::max(1e-4, std::abs(numeric)));
  // A perturbation of block 3 leaves the other blocks' parameters alone, and
  // each block has its own gradient buffer.
  for (int b : blocks) {
    if (b == target) continue;
    EXPECT_NE(grads.layers[b].weight.data(), grads.layers[target].weight.data());
  }
  EXPECT_GT(grads.layers[target].weight.norm(), 0.0);
}

TEST(Optimizer, Deterministic) {
  const auto cfg = small_config(1, 1, 8);
  const auto batch = fixtures::random_samples(cfg, 4, 4, 8, 3);
  auto run = [&] {
    Network net = Network::random(cfg, 11);
    Adam adam;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 3; ++i) optimize_step(net, adam, batch, StepConfig{}, rng);
    return net;
  };
  const Network a = run(), b = run();
  for (std::size_t i = 0; i < a.layers().size(); ++i) {
    EXPECT_TRUE(a.layers()[i].weight == b.layers()[i].weight);
    EXPECT_TRUE(a.layers()[i].bias == b.layers()[i].bias);
  }
}

TEST(Optimizer, ZeroLearningRateLeavesParameters) {
  const auto cfg = small_config(1, 1, 8);
  const auto batch = fixtures::random_samples(cfg, 4, 4, 4, 3);
  Network net = Network::random(cfg, 11);
  const Network before = net;
  Adam adam(AdamConfig{0.0});
  std::mt19937_64 rng(5);
  const auto m = optimize_step(net, adam, batch, StepConfig{}, rng);
  EXPECT_GT(m.grad_norm, 0.0);
  for (std::size_t i = 0; i < net.layers().size(); ++i) EXPECT_TRUE(net.layers()[i].weight == before.layers()[i].weight);
}

TEST(Optimizer, OverfitsSinglePosition) {
  const auto cfg = small_config(1, 1, 16);
  auto batch = fixtures::random_samples(cfg, 3, 3, 1, 8);
  std::fill(batch[0].target.begin(), batch[0].target.end(), 0.0f);
  batch[0].target[0] = 1.0f;
  batch[0].z = 1.0f;
  Network net = Network::random(cfg, 12);
  Adam adam(AdamConfig{3e-3});
  StepConfig sc;
  sc.alpha = 0.0;
  std::mt19937_64 rng(1);
  double first = 0.0, last = 0.0;
  std::vector<double> losses;
  for (int i = 0; i < 200; ++i) {
    last = optimize_step(net, adam, batch, sc, rng).loss.total;
    if (i == 0) first = last;
    losses.push_back(last);
  }
  EXPECT_LT(last, 0.01) << "first " << first;
  // Decreasing after warm-up (checked over a coarse window to allow Adam jitter).
  for (std::size_t i = 40; i + 20 < losses.size(); i += 20) EXPECT_LE(losses[i + 20], losses[i]);
}

TEST(Optimizer, NonFiniteLossAbortsBeforeUpdate) {
  const auto cfg = small_config(1, 1, 8);
  auto batch = fixtures::random_samples(cfg, 3, 3, 2, 8);
  batch[0].state.values()[0] = std::numeric_limits<float>::quiet_NaN();
  Network net = Network::random(cfg, 12);
  const Network before = net;
  Adam adam;
  std::mt19937_64 rng(1);
  EXPECT_THROW(optimize_step(net, adam, batch, StepConfig{}, rng), NonFiniteLoss);
  EXPECT_EQ(adam.steps(), 0);
  for (std::size_t i = 0; i < net.layers().size(); ++i) EXPECT_TRUE(net.layers()[i].weight == before.layers()[i].weight);
}

TEST(Checkpoint, BitExactRoundTrip) {
  for (auto arch : {Architecture::Recurrent, Architecture::Residual}) {
    const auto cfg = small_config(2, 1, 16, arch);
    const Network net = Network::random(cfg, 21);
    const auto path = temp_path("roundtrip.ckpt");
    save_network(path.string(), net);
    const Network back = load_network(path.string(), cfg);
    const Tensor x = random_input(cfg, 5, 5, 3);
    const auto a = net.forward(x, 4), b = back.forward(x, 4);
    EXPECT_EQ(a.value, b.value);
    EXPECT_TRUE(std::equal(a.policy_logits.values().begin(), a.policy_logits.values().end(),
                           b.policy_logits.values().begin()));
  }
}

TEST(Checkpoint, LoadsForLargerBoards) {
  const auto cfg = small_config();
  const auto path = temp_path("large.ckpt");
  save_network(path.string(), Network::random(cfg, 22));
  const Network net = load_network(path.string());
  for (int n = 6; n <= 12; ++n)
    EXPECT_EQ(net.forward(random_input(cfg, n, n, n), 8).policy_logits.shape(), (std::vector<int>{21, n, n}));
}

TEST(Checkpoint, RejectsMismatchAndCorruption) {
  const auto cfg = small_config();
  const auto path = temp_path("bad.ckpt");
  save_network(path.string(), Network::random(cfg, 23));
  auto other = cfg;
  other.stack_limit = 3;
  try {
    load_network(path.string(), other);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.reason(), CheckpointError::Reason::ConfigMismatch);
  }
  auto bytes = serialize_archive(to_archive(Network::random(cfg, 23)));
  auto flip = bytes;
  flip[flip.size() / 2] ^= 0x40;
  auto reason_of = [](const std::vector<std::uint8_t>& b) {
    try {
      deserialize_archive(b);
    } catch (const CheckpointError& e) {
      return std::string(reason_name(e.reason()));
    }
    return std::string("ok");
  };
  EXPECT_EQ(reason_of(flip), "checksum_mismatch");
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(reason_of(magic), "bad_magic");
  auto version = bytes;
  version[8] = 9;
  EXPECT_EQ(reason_of(version), "unsupported_version");
  EXPECT_EQ(reason_of(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 10)), "truncated");
  EXPECT_EQ(reason_of(bytes), "ok");
  Archive partial = to_archive(Network::random(cfg, 23));
  partial.tensors.erase(partial.tensors.begin());
  EXPECT_THROW(network_from_archive(partial), CheckpointError);
  EXPECT_THROW(load_network(temp_path("missing.ckpt").string()), CheckpointError);
}

TEST(Checkpoint, OptimizerStateRoundTrip) {
  const auto cfg = small_config(1, 1, 8);
  Network net = Network::random(cfg, 24);
  Adam adam;
  std::mt19937_64 rng(2);
  const auto batch = fixtures::random_samples(cfg, 3, 3, 4, 1);
  for (int i = 0; i < 3; ++i) optimize_step(net, adam, batch, StepConfig{}, rng);
  Archive a = to_archive(net);
  add_optimizer(a, adam);
  const Archive back = deserialize_archive(serialize_archive(a));
  const Network net2 = network_from_archive(back, cfg);
  Adam adam2;
  ASSERT_TRUE(optimizer_from_archive(back, net2, adam2));
  EXPECT_EQ(adam2.steps(), 3);
  for (std::size_t i = 0; i < adam.first_moments().size(); ++i) {
    EXPECT_TRUE(adam.first_moments()[i] == adam2.first_moments()[i]);
    EXPECT_TRUE(adam.second_moments()[i] == adam2.second_moments()[i]);
  }
}

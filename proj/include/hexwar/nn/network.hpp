#pragma once

// Recurrent fully-convolutional policy/value network.
//
//   input module    hexconv(C_in -> L) + ReLU
//   recurrent step  concat(latent, raw input) -> 1x1 conv -> ReLU
//                   -> hexconv + ReLU -> hexconv, + skip, ReLU      (shared weights)
//   value head      hexconv L -> L/2 -> L/4 -> L/8 -> 1, global mean, tanh
//   policy head     hexconv L -> L/2 -> L/2 -> (9S+3)
//
// The residual baseline swaps the recurrent step for one recall projection
// followed by a fixed stack of independent single-conv residual blocks.
//
// Nothing here depends on board size: every shape is derived from the input.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hexwar/nn/hex_conv.hpp"
#include "hexwar/tensor.hpp"

namespace hexwar::nn {

enum class Architecture : std::uint8_t { Recurrent = 0, Residual = 1 };

struct NetworkConfig {
  int stack_limit = 1;
  int reinforcement_window = 1;
  int latent = 256;
  Architecture arch = Architecture::Recurrent;
  int residual_blocks = 12;

  int input_channels() const;
  int action_planes() const;
  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct NetworkOutput {
  Tensor policy_logits;  // (9S+3) x H x W, before masking
  double value = 0.0;    // tanh output, player-one perspective
};

/// One training position. `legal` holds flat action indices; `target` is the
/// search visit distribution over them.
struct TrainingSample {
  Tensor state;
  std::vector<int> legal;
  std::vector<float> target;
  float z = 0.0f;
};

struct LossBreakdown {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double max_iters = 0.0;    // L_maxIters
  double progressive = 0.0;  // L_progressive
  int n = 0;
  int k = 0;
};

struct ProgressiveSplit {
  int n = 0;  // gradient-free iterations
  int k = 1;  // iterations with gradients
};

/// Uniform over {(n, k) : n >= 0, k >= 1, n + k < T}.
ProgressiveSplit draw_split(int max_iterations, std::mt19937_64& rng);

template <typename T>
struct Gradients {
  std::vector<HexConvGrad<T>> layers;
};

template <typename T>
class NetworkT {
 public:
  explicit NetworkT(NetworkConfig cfg);

  /// He-normal initialisation from a seed.
  static NetworkT random(NetworkConfig cfg, std::uint64_t seed);

  const NetworkConfig& config() const { return cfg_; }
  std::vector<HexConv<T>>& layers() { return layers_; }
  const std::vector<HexConv<T>>& layers() const { return layers_; }
  std::size_t parameter_count() const;
  /// Parameters of the recurrent step (or of all residual blocks).
  std::size_t block_parameter_count() const;

  const HexConv<T>& input_layer() const { return layers_[0]; }
  /// Indices into layers() of the residual blocks (baseline) or the shared step.
  std::vector<int> block_layer_indices() const;

  Gradients<T> zero_gradients() const;

  // Inference -----------------------------------------------------------------

  NetworkOutput forward(const Tensor& state, int iterations) const;
  /// Same as forward(), also returning the latent after every iteration.
  NetworkOutput forward(const Tensor& state, int iterations, std::vector<Tensor>* latents) const;
  std::vector<NetworkOutput> forward_batch(std::span<const Tensor> states, int iterations) const;

  /// Addresses of the weight matrices applied at each recurrent iteration.
  std::vector<std::vector<const void*>> weight_trace(int iterations) const;

  // Training ------------------------------------------------------------------

  /// Loss at `iterations` iterations; accumulates weight * dL/dθ into grads.
  LossBreakdown loss(std::span<const TrainingSample> batch, int iterations, Gradients<T>* grads,
                     T weight = T(1)) const;

  /// Latent after `iterations` steps with no gradient bookkeeping (batch packed).
  Mat<T> latent_after(std::span<const TrainingSample> batch, int iterations) const;

  /// Loss after k recorded iterations starting from a detached latent. The
  /// input module and everything that produced `start` receive no gradient.
  LossBreakdown segment_loss(std::span<const TrainingSample> batch, const Mat<T>& start, int k, Gradients<T>* grads,
                             T weight = T(1)) const;

  template <typename U>
  NetworkT<U> cast() const {
    NetworkT<U> out(cfg_);
    for (std::size_t i = 0; i < layers_.size(); ++i) out.layers()[i] = layers_[i].template cast<U>();
    return out;
  }

 private:
  struct Tape;

  void build_layers();
  Mat<T> pack(std::span<const TrainingSample> batch, int& height, int& width) const;
  Mat<T> pack_states(std::span<const Tensor> states, int& height, int& width) const;
  Mat<T> input_module(const Mat<T>& x, const HexStencil& st) const;
  void step(const Mat<T>& h, const Mat<T>& x, const HexStencil& st7, const HexStencil& st1, Tape* tape,
            Mat<T>& out) const;
  Mat<T> trunk(const Mat<T>& x, int iterations, const HexStencil& st7, const HexStencil& st1,
               std::vector<Mat<T>>* latents, Tape* tape) const;
  void heads(const Mat<T>& latent, int batch, const HexStencil& st7, Tape* tape, Mat<T>& logits,
             Vec<T>& values) const;
  LossBreakdown loss_from_tape(std::span<const TrainingSample> batch, Tape& tape, const HexStencil& st7,
                               const HexStencil& st1, Gradients<T>* grads, T weight, bool through_input) const;

  NetworkConfig cfg_;
  std::vector<HexConv<T>> layers_;
  int proj_ = 1;
  int block_begin_ = 2;
  int block_end_ = 4;
  int value_begin_ = 4;
  int policy_begin_ = 8;
};

using Network = NetworkT<float>;

/// Combined progressive loss: (1 - alpha) * L_maxIters + alpha * L_progressive.
/// Terms with zero weight contribute no gradient. For the residual baseline
/// this reduces to the plain loss.
template <typename T>
LossBreakdown progressive_loss(const NetworkT<T>& net, std::span<const TrainingSample> batch, int max_iterations,
                               double alpha, ProgressiveSplit split, Gradients<T>* grads);

template <typename T>
LossBreakdown progressive_loss(const NetworkT<T>& net, std::span<const TrainingSample> batch, int max_iterations,
                               double alpha, std::mt19937_64& rng, Gradients<T>* grads);

/// Softmax restricted to `legal` flat indices of the logits tensor.
std::vector<double> masked_softmax(const Tensor& logits, std::span<const int> legal);

/// Cross-entropy of the masked policy against `target` plus (v - z)^2.
/// Throws std::invalid_argument for an empty legal set.
double policy_value_loss(const NetworkOutput& out, std::span<const int> legal, std::span<const float> target,
                         double z);

}  // namespace hexwar::nn

#pragma once

#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hexwar/nn/network.hpp"

namespace hexwar::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // global gradient-norm clip; <= 0 disables
};

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
  long long steps() const { return t_; }

  /// Clips `grads` in place and updates `net`. Returns the pre-clip norm.
  double apply(Network& net, Gradients<float>& grads);

  // Moment buffers, exposed for checkpointing.
  std::vector<Mat<float>>& first_moments() { return m_; }
  std::vector<Mat<float>>& second_moments() { return v_; }
  const std::vector<Mat<float>>& first_moments() const { return m_; }
  const std::vector<Mat<float>>& second_moments() const { return v_; }
  void set_steps(long long t) { t_ = t; }
  void ensure_shapes(const Network& net);

 private:
  AdamConfig cfg_;
  long long t_ = 0;
  // One weight and one bias buffer per layer, interleaved.
  std::vector<Mat<float>> m_;
  std::vector<Mat<float>> v_;
};

struct StepConfig {
  int max_iterations = 6;  // T
  double alpha = 0.01;
};

struct StepMetrics {
  LossBreakdown loss;
  double grad_norm = 0.0;
};

double gradient_norm(const Gradients<float>& g);

/// One optimisation step on `batch` with the progressive loss. Throws
/// NonFiniteLoss (and leaves the parameters untouched) on a non-finite loss.
StepMetrics optimize_step(Network& net, Adam& adam, std::span<const TrainingSample> batch, const StepConfig& cfg,
                          std::mt19937_64& rng);

}  // namespace hexwar::nn

#include "hexwar/nn/optimizer.hpp"

#include <cmath>
#include <sstream>

namespace hexwar::nn {

double gradient_norm(const Gradients<float>& g) {
  double sq = 0.0;
  for (const auto& l : g.layers) {
    sq += l.weight.template cast<double>().squaredNorm();
    sq += l.bias.template cast<double>().squaredNorm();
  }
  return std::sqrt(sq);
}

void Adam::ensure_shapes(const Network& net) {
  const auto& layers = net.layers();
  if (m_.size() == 2 * layers.size()) return;
  m_.clear();
  v_.clear();
  for (const auto& l : layers) {
    m_.push_back(Mat<float>::Zero(l.weight.rows(), l.weight.cols()));
    m_.push_back(Mat<float>::Zero(l.bias.size(), 1));
    v_.push_back(Mat<float>::Zero(l.weight.rows(), l.weight.cols()));
    v_.push_back(Mat<float>::Zero(l.bias.size(), 1));
  }
}

double Adam::apply(Network& net, Gradients<float>& grads) {
  ensure_shapes(net);
  const double norm = gradient_norm(grads);
  if (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) {
    const float scale = static_cast<float>(cfg_.clip_norm / norm);
    for (auto& l : grads.layers) {
      l.weight *= scale;
      l.bias *= scale;
    }
  }
  ++t_;
  const float b1 = static_cast<float>(cfg_.beta1);
  const float b2 = static_cast<float>(cfg_.beta2);
  const float lr = static_cast<float>(cfg_.learning_rate);
  const float eps = static_cast<float>(cfg_.epsilon);
  const float c1 = static_cast<float>(1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
  const float c2 = static_cast<float>(1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
  auto update = [&](float* param, const float* g, Mat<float>& m, Mat<float>& v) {
    const Eigen::Index n = m.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      m.data()[i] = b1 * m.data()[i] + (1.0f - b1) * g[i];
      v.data()[i] = b2 * v.data()[i] + (1.0f - b2) * g[i] * g[i];
      const float mh = m.data()[i] / c1;
      const float vh = v.data()[i] / c2;
      param[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  };
  auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weight.data(), grads.layers[i].weight.data(), m_[2 * i], v_[2 * i]);
    update(layers[i].bias.data(), grads.layers[i].bias.data(), m_[2 * i + 1], v_[2 * i + 1]);
  }
  return norm;
}

StepMetrics optimize_step(Network& net, Adam& adam, std::span<const TrainingSample> batch, const StepConfig& cfg,
                          std::mt19937_64& rng) {
  if (batch.empty()) throw std::invalid_argument("optimize_step: empty batch");
  Gradients<float> grads = net.zero_gradients();
  StepMetrics out;
  out.loss = progressive_loss(net, batch, cfg.max_iterations, cfg.alpha, rng, &grads);
  if (!std::isfinite(out.loss.total)) {
    std::ostringstream os;
    os << "non-finite loss (policy=" << out.loss.policy << ", value=" << out.loss.value
       << ", max_iters=" << out.loss.max_iters << ", progressive=" << out.loss.progressive << ", n=" << out.loss.n
       << ", k=" << out.loss.k << ")";
    throw NonFiniteLoss(os.str());
  }
  out.grad_norm = adam.apply(net, grads);
  return out;
}

}  // namespace hexwar::nn

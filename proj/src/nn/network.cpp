#include "hexwar/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hexwar/encoding.hpp"

namespace hexwar::nn {

int NetworkConfig::input_channels() const { return state_channels(stack_limit, reinforcement_window); }
int NetworkConfig::action_planes() const { return hexwar::action_planes(stack_limit); }

ProgressiveSplit draw_split(int max_iterations, std::mt19937_64& rng) {
  if (max_iterations < 2) throw std::invalid_argument("progressive loss needs T >= 2");
  // Pairs with n + k = s for s in 1..T-1: s of them (n = 0..s-1).
  const int T = max_iterations;
  const int total = (T - 1) * T / 2;
  std::uniform_int_distribution<int> pick(0, total - 1);
  int r = pick(rng);
  for (int s = 1; s < T; ++s) {
    if (r < s) return {r, s - r};
    r -= s;
  }
  return {0, 1};
}

namespace {

template <typename T>
void relu_inplace(Mat<T>& m) {
  m = m.cwiseMax(T(0));
}

template <typename T>
void relu_mask(Mat<T>& grad, const Mat<T>& activation) {
  grad = (activation.array() > T(0)).select(grad, T(0));
}

int half(int v) { return std::max(1, v / 2); }

}  // namespace

template <typename T>
struct NetworkT<T>::Tape {
  bool through_input = true;
  Mat<T> x;
  Mat<T> h0;
  std::vector<Mat<T>> z, p, a, h;
  Mat<T> latent;
  Mat<T> v1, v2, v3, v4;
  Vec<T> values;
  Mat<T> q1, q2, logits;
};

template <typename T>
NetworkT<T>::NetworkT(NetworkConfig cfg) : cfg_(cfg) {
  if (cfg_.stack_limit < 1 || cfg_.reinforcement_window < 0 || cfg_.latent < 1)
    throw std::invalid_argument("NetworkConfig: invalid S, R or latent width");
  if (cfg_.arch == Architecture::Residual && cfg_.residual_blocks < 1)
    throw std::invalid_argument("NetworkConfig: residual baseline needs at least one block");
  build_layers();
}

template <typename T>
void NetworkT<T>::build_layers() {
  const int L = cfg_.latent;
  const int C = cfg_.input_channels();
  layers_.clear();
  layers_.emplace_back("input", C, L, kHexTaps);
  layers_.emplace_back("recall_projection", L + C, L, 1);
  proj_ = 1;
  block_begin_ = 2;
  if (cfg_.arch == Architecture::Recurrent) {
    layers_.emplace_back("recurrent.conv1", L, L, kHexTaps);
    layers_.emplace_back("recurrent.conv2", L, L, kHexTaps);
  } else {
    for (int b = 0; b < cfg_.residual_blocks; ++b)
      layers_.emplace_back("residual" + std::to_string(b) + ".conv", L, L, kHexTaps);
  }
  block_end_ = static_cast<int>(layers_.size());
  value_begin_ = block_end_;
  const int v1 = half(L), v2 = half(v1), v3 = half(v2);
  layers_.emplace_back("value.conv1", L, v1, kHexTaps);
  layers_.emplace_back("value.conv2", v1, v2, kHexTaps);
  layers_.emplace_back("value.conv3", v2, v3, kHexTaps);
  layers_.emplace_back("value.conv4", v3, 1, kHexTaps);
  policy_begin_ = static_cast<int>(layers_.size());
  layers_.emplace_back("policy.conv1", L, v1, kHexTaps);
  layers_.emplace_back("policy.conv2", v1, v1, kHexTaps);
  layers_.emplace_back("policy.conv3", v1, cfg_.action_planes(), kHexTaps);
}

template <typename T>
NetworkT<T> NetworkT<T>::random(NetworkConfig cfg, std::uint64_t seed) {
  NetworkT<T> net(cfg);
  std::mt19937_64 rng(seed);
  for (auto& layer : net.layers_) {
    const double fan_in = static_cast<double>(layer.in_channels) * layer.taps;
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<T>(dist(rng));
    layer.bias.setZero();
  }
  return net;
}

template <typename T>
std::size_t NetworkT<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.parameter_count();
  return n;
}

template <typename T>
std::size_t NetworkT<T>::block_parameter_count() const {
  std::size_t n = 0;
  for (int i = block_begin_; i < block_end_; ++i) n += layers_[i].parameter_count();
  return n;
}

template <typename T>
std::vector<int> NetworkT<T>::block_layer_indices() const {
  std::vector<int> out;
  for (int i = block_begin_; i < block_end_; ++i) out.push_back(i);
  return out;
}

template <typename T>
Gradients<T> NetworkT<T>::zero_gradients() const {
  Gradients<T> g;
  g.layers.resize(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) g.layers[i].reset(layers_[i]);
  return g;
}

template <typename T>
Mat<T> NetworkT<T>::pack_states(std::span<const Tensor> states, int& height, int& width) const {
  if (states.empty()) throw std::invalid_argument("network: empty batch");
  const int C = cfg_.input_channels();
  height = states[0].dim(1);
  width = states[0].dim(2);
  const int cells = height * width;
  Mat<T> x(C, static_cast<Eigen::Index>(cells) * states.size());
  for (std::size_t n = 0; n < states.size(); ++n) {
    const Tensor& s = states[n];
    if (s.rank() != 3 || s.dim(0) != C || s.dim(1) != height || s.dim(2) != width)
      throw std::invalid_argument("network: state tensor " + shape_string(s.shape()) + " does not match " +
                                  std::to_string(C) + " channels / batch board size");
    for (int c = 0; c < C; ++c) {
      for (int k = 0; k < cells; ++k) x(c, n * cells + k) = static_cast<T>(s[static_cast<std::size_t>(c) * cells + k]);
    }
  }
  return x;
}

template <typename T>
Mat<T> NetworkT<T>::pack(std::span<const TrainingSample> batch, int& height, int& width) const {
  std::vector<Tensor> states;
  states.reserve(batch.size());
  for (const auto& s : batch) states.push_back(s.state);
  return pack_states(states, height, width);
}

template <typename T>
Mat<T> NetworkT<T>::input_module(const Mat<T>& x, const HexStencil& st) const {
  Mat<T> h;
  hex_conv_forward(layers_[0], x, st, h);
  relu_inplace(h);
  return h;
}

template <typename T>
void NetworkT<T>::step(const Mat<T>& h, const Mat<T>& x, const HexStencil& st7, const HexStencil& st1, Tape* tape,
                       Mat<T>& out) const {
  const int L = cfg_.latent;
  Mat<T> z(L + x.rows(), x.cols());
  z.topRows(L) = h;
  z.bottomRows(x.rows()) = x;
  Mat<T> p, a, b;
  hex_conv_forward(layers_[proj_], z, st1, p);
  relu_inplace(p);
  hex_conv_forward(layers_[block_begin_], p, st7, a);
  relu_inplace(a);
  hex_conv_forward(layers_[block_begin_ + 1], a, st7, b);
  out = (b + p).cwiseMax(T(0));
  if (tape) {
    tape->z.push_back(std::move(z));
    tape->p.push_back(std::move(p));
    tape->a.push_back(std::move(a));
    tape->h.push_back(out);
  }
}

template <typename T>
Mat<T> NetworkT<T>::trunk(const Mat<T>& x, int iterations, const HexStencil& st7, const HexStencil& st1,
                          std::vector<Mat<T>>* latents, Tape* tape) const {
  Mat<T> h = input_module(x, st7);
  if (tape) tape->h0 = h;
  if (cfg_.arch == Architecture::Recurrent) {
    Mat<T> next;
    for (int i = 0; i < iterations; ++i) {
      step(h, x, st7, st1, tape, next);
      h.swap(next);
      if (latents) latents->push_back(h);
    }
    return h;
  }
  const int L = cfg_.latent;
  Mat<T> z(L + x.rows(), x.cols());
  z.topRows(L) = h;
  z.bottomRows(x.rows()) = x;
  Mat<T> p;
  hex_conv_forward(layers_[proj_], z, st1, p);
  relu_inplace(p);
  if (tape) {
    tape->z.push_back(z);
    tape->p.push_back(p);
  }
  h = p;
  Mat<T> c;
  for (int b = block_begin_; b < block_end_; ++b) {
    hex_conv_forward(layers_[b], h, st7, c);
    h = (h + c).cwiseMax(T(0));
    if (tape) tape->h.push_back(h);
    if (latents) latents->push_back(h);
  }
  return h;
}

template <typename T>
void NetworkT<T>::heads(const Mat<T>& latent, int batch, const HexStencil& st7, Tape* tape, Mat<T>& logits,
                        Vec<T>& values) const {
  Mat<T> v1, v2, v3, v4;
  hex_conv_forward(layers_[value_begin_], latent, st7, v1);
  relu_inplace(v1);
  hex_conv_forward(layers_[value_begin_ + 1], v1, st7, v2);
  relu_inplace(v2);
  hex_conv_forward(layers_[value_begin_ + 2], v2, st7, v3);
  relu_inplace(v3);
  hex_conv_forward(layers_[value_begin_ + 3], v3, st7, v4);
  const int cells = st7.cells;
  values.resize(batch);
  for (int n = 0; n < batch; ++n) values[n] = std::tanh(v4.row(0).segment(n * cells, cells).mean());

  Mat<T> q1, q2;
  hex_conv_forward(layers_[policy_begin_], latent, st7, q1);
  relu_inplace(q1);
  hex_conv_forward(layers_[policy_begin_ + 1], q1, st7, q2);
  relu_inplace(q2);
  hex_conv_forward(layers_[policy_begin_ + 2], q2, st7, logits);
  if (tape) {
    tape->latent = latent;
    tape->v1 = std::move(v1);
    tape->v2 = std::move(v2);
    tape->v3 = std::move(v3);
    tape->v4 = std::move(v4);
    tape->values = values;
    tape->q1 = std::move(q1);
    tape->q2 = std::move(q2);
    tape->logits = logits;
  }
}

template <typename T>
NetworkOutput NetworkT<T>::forward(const Tensor& state, int iterations) const {
  return forward(state, iterations, nullptr);
}

template <typename T>
NetworkOutput NetworkT<T>::forward(const Tensor& state, int iterations, std::vector<Tensor>* latents) const {
  if (iterations < 1 && cfg_.arch == Architecture::Recurrent)
    throw std::invalid_argument("forward: at least one iteration required");
  int h = 0, w = 0;
  const Mat<T> x = pack_states(std::span<const Tensor>(&state, 1), h, w);
  const auto& st7 = stencil_for(h, w, kHexTaps);
  const auto& st1 = stencil_for(h, w, 1);
  std::vector<Mat<T>> lat;
  const Mat<T> latent = trunk(x, iterations, st7, st1, latents ? &lat : nullptr, nullptr);
  Mat<T> logits;
  Vec<T> values;
  heads(latent, 1, st7, nullptr, logits, values);
  NetworkOutput out;
  out.policy_logits = Tensor({cfg_.action_planes(), h, w});
  for (int c = 0; c < logits.rows(); ++c) {
    for (int k = 0; k < h * w; ++k) out.policy_logits[static_cast<std::size_t>(c) * h * w + k] = static_cast<float>(logits(c, k));
  }
  out.value = static_cast<double>(values[0]);
  if (latents) {
    latents->clear();
    for (const auto& m : lat) latents->push_back(from_columns(m.template cast<float>(), h, w));
  }
  return out;
}

template <typename T>
std::vector<NetworkOutput> NetworkT<T>::forward_batch(std::span<const Tensor> states, int iterations) const {
  int h = 0, w = 0;
  const Mat<T> x = pack_states(states, h, w);
  const auto& st7 = stencil_for(h, w, kHexTaps);
  const auto& st1 = stencil_for(h, w, 1);
  const Mat<T> latent = trunk(x, iterations, st7, st1, nullptr, nullptr);
  Mat<T> logits;
  Vec<T> values;
  const int batch = static_cast<int>(states.size());
  heads(latent, batch, st7, nullptr, logits, values);
  const int cells = h * w;
  std::vector<NetworkOutput> outs(batch);
  for (int n = 0; n < batch; ++n) {
    outs[n].policy_logits = Tensor({cfg_.action_planes(), h, w});
    for (int c = 0; c < logits.rows(); ++c) {
      for (int k = 0; k < cells; ++k)
        outs[n].policy_logits[static_cast<std::size_t>(c) * cells + k] = static_cast<float>(logits(c, n * cells + k));
    }
    outs[n].value = static_cast<double>(values[n]);
  }
  return outs;
}

template <typename T>
std::vector<std::vector<const void*>> NetworkT<T>::weight_trace(int iterations) const {
  std::vector<std::vector<const void*>> out;
  if (cfg_.arch == Architecture::Recurrent) {
    for (int i = 0; i < iterations; ++i) {
      out.push_back({layers_[proj_].weight.data(), layers_[block_begin_].weight.data(),
                     layers_[block_begin_ + 1].weight.data()});
    }
  } else {
    for (int b = block_begin_; b < block_end_; ++b) out.push_back({layers_[b].weight.data()});
  }
  return out;
}

template <typename T>
LossBreakdown NetworkT<T>::loss_from_tape(std::span<const TrainingSample> batch, Tape& tape, const HexStencil& st7,
                                          const HexStencil& st1, Gradients<T>* grads, T weight,
                                          bool through_input) const {
  const int N = static_cast<int>(batch.size());
  const int cells = st7.cells;
  LossBreakdown out;
  Mat<T> dlogits = Mat<T>::Zero(tape.logits.rows(), tape.logits.cols());
  Vec<T> dvalues = Vec<T>::Zero(N);
  for (int n = 0; n < N; ++n) {
    const auto& s = batch[n];
    if (s.legal.empty()) throw std::invalid_argument("loss: all-zero legality mask");
    if (s.legal.size() != s.target.size()) throw std::invalid_argument("loss: target/legal size mismatch");
    T mx = -std::numeric_limits<T>::infinity();
    std::vector<T> l(s.legal.size());
    for (std::size_t j = 0; j < s.legal.size(); ++j) {
      const int f = s.legal[j];
      l[j] = tape.logits(f / cells, n * cells + f % cells);
      mx = std::max(mx, l[j]);
    }
    T sum = 0;
    for (auto& v : l) sum += std::exp(v - mx);
    const T log_z = mx + std::log(sum);
    T tsum = 0;
    for (float t : s.target) tsum += static_cast<T>(t);
    T ce = 0;
    for (std::size_t j = 0; j < s.legal.size(); ++j) {
      const T logp = l[j] - log_z;
      ce -= static_cast<T>(s.target[j]) * logp;
      const int f = s.legal[j];
      dlogits(f / cells, n * cells + f % cells) =
          weight * (std::exp(logp) * tsum - static_cast<T>(s.target[j])) / static_cast<T>(N);
    }
    const T v = tape.values[n];
    const T diff = v - static_cast<T>(s.z);
    out.policy += static_cast<double>(ce);
    out.value += static_cast<double>(diff * diff);
    dvalues[n] = weight * T(2) * diff / static_cast<T>(N);
  }
  out.policy /= N;
  out.value /= N;
  out.total = out.policy + out.value;
  if (!grads) return out;

  auto& G = grads->layers;
  // Policy head.
  Mat<T> d, dprev;
  hex_conv_backward(layers_[policy_begin_ + 2], tape.q2, dlogits, st7, G[policy_begin_ + 2], &d);
  relu_mask(d, tape.q2);
  hex_conv_backward(layers_[policy_begin_ + 1], tape.q1, d, st7, G[policy_begin_ + 1], &dprev);
  relu_mask(dprev, tape.q1);
  Mat<T> dlatent;
  hex_conv_backward(layers_[policy_begin_], tape.latent, dprev, st7, G[policy_begin_], &dlatent);
  // Value head.
  Mat<T> dv4(1, static_cast<Eigen::Index>(N) * cells);
  for (int n = 0; n < N; ++n) {
    const T v = tape.values[n];
    dv4.row(0).segment(n * cells, cells).setConstant(dvalues[n] * (T(1) - v * v) / static_cast<T>(cells));
  }
  hex_conv_backward(layers_[value_begin_ + 3], tape.v3, dv4, st7, G[value_begin_ + 3], &d);
  relu_mask(d, tape.v3);
  hex_conv_backward(layers_[value_begin_ + 2], tape.v2, d, st7, G[value_begin_ + 2], &dprev);
  relu_mask(dprev, tape.v2);
  hex_conv_backward(layers_[value_begin_ + 1], tape.v1, dprev, st7, G[value_begin_ + 1], &d);
  relu_mask(d, tape.v1);
  Mat<T> dlat_v;
  hex_conv_backward(layers_[value_begin_], tape.latent, d, st7, G[value_begin_], &dlat_v);
  Mat<T> dh = dlatent + dlat_v;

  const int L = cfg_.latent;
  if (cfg_.arch == Architecture::Recurrent) {
    for (int i = static_cast<int>(tape.h.size()) - 1; i >= 0; --i) {
      Mat<T> dpre = dh;
      relu_mask(dpre, tape.h[i]);
      Mat<T> da;
      hex_conv_backward(layers_[block_begin_ + 1], tape.a[i], dpre, st7, G[block_begin_ + 1], &da);
      relu_mask(da, tape.a[i]);
      Mat<T> dp;
      hex_conv_backward(layers_[block_begin_], tape.p[i], da, st7, G[block_begin_], &dp);
      dp += dpre;
      relu_mask(dp, tape.p[i]);
      Mat<T> dz;
      hex_conv_backward(layers_[proj_], tape.z[i], dp, st1, G[proj_], &dz);
      dh = dz.topRows(L);
    }
  } else {
    for (int b = block_end_ - 1; b >= block_begin_; --b) {
      const int j = b - block_begin_;
      Mat<T> dpre = dh;
      relu_mask(dpre, tape.h[j]);
      const Mat<T>& in = j == 0 ? tape.p[0] : tape.h[j - 1];
      Mat<T> dconv;
      hex_conv_backward(layers_[b], in, dpre, st7, G[b], &dconv);
      dh = dpre + dconv;
    }
    relu_mask(dh, tape.p[0]);
    Mat<T> dz;
    hex_conv_backward(layers_[proj_], tape.z[0], dh, st1, G[proj_], &dz);
    dh = dz.topRows(L);
  }
  if (through_input) {
    relu_mask(dh, tape.h0);
    hex_conv_backward(layers_[0], tape.x, dh, st7, G[0], static_cast<Mat<T>*>(nullptr));
  }
  return out;
}

template <typename T>
LossBreakdown NetworkT<T>::loss(std::span<const TrainingSample> batch, int iterations, Gradients<T>* grads,
                                T weight) const {
  if (iterations < 1 && cfg_.arch == Architecture::Recurrent)
    throw std::invalid_argument("loss: at least one iteration required");
  int h = 0, w = 0;
  Tape tape;
  tape.x = pack(batch, h, w);
  const auto& st7 = stencil_for(h, w, kHexTaps);
  const auto& st1 = stencil_for(h, w, 1);
  const Mat<T> latent = trunk(tape.x, iterations, st7, st1, nullptr, &tape);
  Mat<T> logits;
  Vec<T> values;
  heads(latent, static_cast<int>(batch.size()), st7, &tape, logits, values);
  return loss_from_tape(batch, tape, st7, st1, grads, weight, true);
}

template <typename T>
Mat<T> NetworkT<T>::latent_after(std::span<const TrainingSample> batch, int iterations) const {
  if (cfg_.arch != Architecture::Recurrent) throw std::logic_error("latent_after: recurrent networks only");
  int h = 0, w = 0;
  const Mat<T> x = pack(batch, h, w);
  return trunk(x, iterations, stencil_for(h, w, kHexTaps), stencil_for(h, w, 1), nullptr, nullptr);
}

template <typename T>
LossBreakdown NetworkT<T>::segment_loss(std::span<const TrainingSample> batch, const Mat<T>& start, int k,
                                        Gradients<T>* grads, T weight) const {
  if (cfg_.arch != Architecture::Recurrent) throw std::logic_error("segment_loss: recurrent networks only");
  if (k < 1) throw std::invalid_argument("segment_loss: k must be >= 1");
  int h = 0, w = 0;
  Tape tape;
  tape.x = pack(batch, h, w);
  if (start.rows() != cfg_.latent || start.cols() != tape.x.cols())
    throw std::invalid_argument("segment_loss: start latent shape mismatch");
  const auto& st7 = stencil_for(h, w, kHexTaps);
  const auto& st1 = stencil_for(h, w, 1);
  tape.h0 = start;
  Mat<T> cur = start;
  Mat<T> next;
  for (int i = 0; i < k; ++i) {
    step(cur, tape.x, st7, st1, &tape, next);
    cur.swap(next);
  }
  Mat<T> logits;
  Vec<T> values;
  heads(cur, static_cast<int>(batch.size()), st7, &tape, logits, values);
  return loss_from_tape(batch, tape, st7, st1, grads, weight, false);
}

template <typename T>
LossBreakdown progressive_loss(const NetworkT<T>& net, std::span<const TrainingSample> batch, int max_iterations,
                               double alpha, ProgressiveSplit split, Gradients<T>* grads) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("progressive loss: alpha must lie in [0, 1]");
  if (max_iterations < 2) throw std::invalid_argument("progressive loss: T must be >= 2");
  if (net.config().arch != Architecture::Recurrent) {
    LossBreakdown plain = net.loss(batch, max_iterations, grads);
    plain.max_iters = plain.total;
    return plain;
  }
  if (split.n < 0 || split.k < 1 || split.n + split.k >= max_iterations)
    throw std::invalid_argument("progressive loss: split must satisfy n >= 0, k >= 1, n + k < T");
  const T w_max = static_cast<T>(1.0 - alpha);
  const T w_prog = static_cast<T>(alpha);
  LossBreakdown full = net.loss(batch, max_iterations, w_max > T(0) ? grads : nullptr, w_max);
  LossBreakdown out;
  out.n = split.n;
  out.k = split.k;
  out.max_iters = full.total;
  if (alpha == 0.0) {
    out.total = full.total;
    out.policy = full.policy;
    out.value = full.value;
    return out;
  }
  const Mat<T> start = net.latent_after(batch, split.n);
  LossBreakdown prog = net.segment_loss(batch, start, split.k, grads, w_prog);
  out.progressive = prog.total;
  out.total = (1.0 - alpha) * full.total + alpha * prog.total;
  out.policy = (1.0 - alpha) * full.policy + alpha * prog.policy;
  out.value = (1.0 - alpha) * full.value + alpha * prog.value;
  return out;
}

template <typename T>
LossBreakdown progressive_loss(const NetworkT<T>& net, std::span<const TrainingSample> batch, int max_iterations,
                               double alpha, std::mt19937_64& rng, Gradients<T>* grads) {
  if (max_iterations < 2) throw std::invalid_argument("progressive loss: T must be >= 2");
  return progressive_loss(net, batch, max_iterations, alpha, draw_split(max_iterations, rng), grads);
}

template class NetworkT<float>;
template class NetworkT<double>;
template LossBreakdown progressive_loss<float>(const NetworkT<float>&, std::span<const TrainingSample>, int, double,
                                               ProgressiveSplit, Gradients<float>*);
template LossBreakdown progressive_loss<double>(const NetworkT<double>&, std::span<const TrainingSample>, int, double,
                                                ProgressiveSplit, Gradients<double>*);
template LossBreakdown progressive_loss<float>(const NetworkT<float>&, std::span<const TrainingSample>, int, double,
                                               std::mt19937_64&, Gradients<float>*);
template LossBreakdown progressive_loss<double>(const NetworkT<double>&, std::span<const TrainingSample>, int, double,
                                                std::mt19937_64&, Gradients<double>*);

std::vector<double> masked_softmax(const Tensor& logits, std::span<const int> legal) {
  if (legal.empty()) throw std::invalid_argument("masked_softmax: all-zero legality mask");
  double mx = -std::numeric_limits<double>::infinity();
  for (int f : legal) mx = std::max(mx, static_cast<double>(logits[f]));
  std::vector<double> p(legal.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < legal.size(); ++j) {
    p[j] = std::exp(static_cast<double>(logits[legal[j]]) - mx);
    sum += p[j];
  }
  for (auto& v : p) v /= sum;
  return p;
}

double policy_value_loss(const NetworkOutput& out, std::span<const int> legal, std::span<const float> target,
                         double z) {
  if (legal.size() != target.size()) throw std::invalid_argument("policy_value_loss: target/legal size mismatch");
  const auto p = masked_softmax(out.policy_logits, legal);
  double ce = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (target[j] > 0.0f) ce -= static_cast<double>(target[j]) * std::log(p[j]);
  }
  const double d = out.value - z;
  return ce + d * d;
}

}  // namespace hexwar::nn

#pragma once

// Hexagonal convolution over odd-r offset boards.
//
// Activations are stored channel-major with the batch folded into columns:
// a C x (N*H*W) matrix whose column n*H*W + cell holds every channel of one
// board cell. A radius-1 kernel has 7 taps (centre, then the six neighbours
// in Direction order); off-board taps read zero.

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hexwar/tensor.hpp"

namespace hexwar::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

inline constexpr int kHexTaps = 7;

/// Per-board gather table: source[t * cells + cell] is the cell read by tap t,
/// or -1 when that neighbour is off-board.
struct HexStencil {
  HexStencil(int height, int width, int taps);

  int height;
  int width;
  int taps;
  int cells;
  std::vector<int> source;
};

const HexStencil& stencil_for(int height, int width, int taps);

template <typename T>
struct HexConv {
  std::string name;
  int in_channels = 0;
  int out_channels = 0;
  int taps = kHexTaps;
  Mat<T> weight;  // out x (taps * in); column t * in + i
  Vec<T> bias;

  HexConv() = default;
  HexConv(std::string n, int in, int out, int t)
      : name(std::move(n)), in_channels(in), out_channels(out), taps(t),
        weight(Mat<T>::Zero(out, in * t)), bias(Vec<T>::Zero(out)) {}

  T& w(int f, int i, int t) { return weight(f, t * in_channels + i); }
  T w(int f, int i, int t) const { return weight(f, t * in_channels + i); }
  std::size_t parameter_count() const { return static_cast<std::size_t>(weight.size() + bias.size()); }

  template <typename U>
  HexConv<U> cast() const {
    HexConv<U> out(name, in_channels, out_channels, taps);
    out.weight = weight.template cast<U>();
    out.bias = bias.template cast<U>();
    return out;
  }
};

template <typename T>
struct HexConvGrad {
  Mat<T> weight;
  Vec<T> bias;

  void reset(const HexConv<T>& c) {
    weight = Mat<T>::Zero(c.weight.rows(), c.weight.cols());
    bias = Vec<T>::Zero(c.bias.size());
  }
};

/// Gathers the taps of every column: cols is (taps*C) x M.
template <typename T>
void hex_im2col(const Mat<T>& input, const HexStencil& st, Mat<T>& cols);

/// out = W * im2col(input) + b, out is out_channels x M.
template <typename T>
void hex_conv_forward(const HexConv<T>& conv, const Mat<T>& input, const HexStencil& st, Mat<T>& out);

/// Accumulates parameter gradients into `grad`; writes d(loss)/d(input) into
/// grad_input when non-null.
template <typename T>
void hex_conv_backward(const HexConv<T>& conv, const Mat<T>& input, const Mat<T>& grad_out, const HexStencil& st,
                       HexConvGrad<T>& grad, Mat<T>* grad_input);

/// Single-board convenience wrapper: C_in x H x W -> C_out x H x W.
Tensor hex_conv2d(const Tensor& input, const HexConv<float>& conv);

Mat<float> to_columns(const Tensor& chw);
Tensor from_columns(const Mat<float>& cols, int height, int width);

}  // namespace hexwar::nn

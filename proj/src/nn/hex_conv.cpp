#include "hexwar/nn/hex_conv.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "hexwar/hexgrid.hpp"

namespace hexwar::nn {

HexStencil::HexStencil(int h, int w, int t) : height(h), width(w), taps(t), cells(h * w) {
  if (t != 1 && t != kHexTaps) throw std::invalid_argument("HexStencil: taps must be 1 or 7");
  source.assign(static_cast<std::size_t>(taps) * cells, -1);
  for (int cell = 0; cell < cells; ++cell) {
    const HexCoord c = cell_coord(cell, w);
    source[cell] = cell;
    if (taps == 1) continue;
    for (Direction d : kAllDirections) {
      if (auto n = neighbor(c, d, h, w)) source[(1 + index_of(d)) * cells + cell] = cell_index(*n, w);
    }
  }
}

const HexStencil& stencil_for(int height, int width, int taps) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<HexStencil>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{height, width, taps}];
  if (!slot) slot = std::make_unique<HexStencil>(height, width, taps);
  return *slot;
}

template <typename T>
void hex_im2col(const Mat<T>& input, const HexStencil& st, Mat<T>& cols) {
  const int C = static_cast<int>(input.rows());
  const int M = static_cast<int>(input.cols());
  if (M % st.cells != 0) throw std::invalid_argument("hex_im2col: column count is not a multiple of board cells");
  cols.resize(static_cast<Eigen::Index>(st.taps) * C, M);
  const int batch = M / st.cells;
  for (int n = 0; n < batch; ++n) {
    const int base = n * st.cells;
    for (int cell = 0; cell < st.cells; ++cell) {
      const int m = base + cell;
      for (int t = 0; t < st.taps; ++t) {
        const int src = st.source[t * st.cells + cell];
        auto dst = cols.col(m).segment(static_cast<Eigen::Index>(t) * C, C);
        if (src < 0) {
          dst.setZero();
        } else {
          dst = input.col(base + src);
        }
      }
    }
  }
}

template <typename T>
void hex_conv_forward(const HexConv<T>& conv, const Mat<T>& input, const HexStencil& st, Mat<T>& out) {
  if (input.rows() != conv.in_channels)
    throw std::invalid_argument("hex_conv " + conv.name + ": expected " + std::to_string(conv.in_channels) +
                                " input channels, got " + std::to_string(input.rows()));
  if (st.taps != conv.taps) throw std::invalid_argument("hex_conv " + conv.name + ": stencil/kernel tap mismatch");
  if (conv.taps == 1) {
    out.noalias() = conv.weight * input;
  } else {
    Mat<T> cols;
    hex_im2col(input, st, cols);
    out.noalias() = conv.weight * cols;
  }
  out.colwise() += conv.bias;
}

template <typename T>
void hex_conv_backward(const HexConv<T>& conv, const Mat<T>& input, const Mat<T>& grad_out, const HexStencil& st,
                       HexConvGrad<T>& grad, Mat<T>* grad_input) {
  grad.bias += grad_out.rowwise().sum();
  if (conv.taps == 1) {
    grad.weight.noalias() += grad_out * input.transpose();
    if (grad_input) grad_input->noalias() = conv.weight.transpose() * grad_out;
    return;
  }
  Mat<T> cols;
  hex_im2col(input, st, cols);
  grad.weight.noalias() += grad_out * cols.transpose();
  if (!grad_input) return;
  Mat<T> dcols;
  dcols.noalias() = conv.weight.transpose() * grad_out;
  const int C = conv.in_channels;
  grad_input->setZero(C, input.cols());
  const int batch = static_cast<int>(input.cols()) / st.cells;
  for (int n = 0; n < batch; ++n) {
    const int base = n * st.cells;
    for (int cell = 0; cell < st.cells; ++cell) {
      for (int t = 0; t < st.taps; ++t) {
        const int src = st.source[t * st.cells + cell];
        if (src < 0) continue;
        grad_input->col(base + src) += dcols.col(base + cell).segment(static_cast<Eigen::Index>(t) * C, C);
      }
    }
  }
}

template void hex_im2col<float>(const Mat<float>&, const HexStencil&, Mat<float>&);
template void hex_im2col<double>(const Mat<double>&, const HexStencil&, Mat<double>&);
template void hex_conv_forward<float>(const HexConv<float>&, const Mat<float>&, const HexStencil&, Mat<float>&);
template void hex_conv_forward<double>(const HexConv<double>&, const Mat<double>&, const HexStencil&, Mat<double>&);
template void hex_conv_backward<float>(const HexConv<float>&, const Mat<float>&, const Mat<float>&, const HexStencil&,
                                       HexConvGrad<float>&, Mat<float>*);
template void hex_conv_backward<double>(const HexConv<double>&, const Mat<double>&, const Mat<double>&,
                                        const HexStencil&, HexConvGrad<double>&, Mat<double>*);

Mat<float> to_columns(const Tensor& chw) {
  if (chw.rank() != 3) throw std::invalid_argument("to_columns: expected a C x H x W tensor");
  const int C = chw.dim(0);
  const int cells = chw.dim(1) * chw.dim(2);
  Mat<float> out(C, cells);
  for (int c = 0; c < C; ++c) {
    for (int k = 0; k < cells; ++k) out(c, k) = chw[static_cast<std::size_t>(c) * cells + k];
  }
  return out;
}

Tensor from_columns(const Mat<float>& cols, int height, int width) {
  const int C = static_cast<int>(cols.rows());
  const int cells = height * width;
  if (cols.cols() != cells) throw std::invalid_argument("from_columns: column count does not match board");
  Tensor out({C, height, width});
  for (int c = 0; c < C; ++c) {
    for (int k = 0; k < cells; ++k) out[static_cast<std::size_t>(c) * cells + k] = cols(c, k);
  }
  return out;
}

Tensor hex_conv2d(const Tensor& input, const HexConv<float>& conv) {
  if (input.rank() != 3) throw std::invalid_argument("hex_conv2d: expected a C x H x W tensor");
  if (input.dim(0) != conv.in_channels) throw std::invalid_argument("hex_conv2d: input channel mismatch");
  const auto& st = stencil_for(input.dim(1), input.dim(2), conv.taps);
  Mat<float> out;
  hex_conv_forward(conv, to_columns(input), st, out);
  return from_columns(out, input.dim(1), input.dim(2));
}

}  // namespace hexwar::nn

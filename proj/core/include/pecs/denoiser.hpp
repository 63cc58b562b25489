#pragma once

#include <cstdint>
#include <vector>

#include "pecs/grid.hpp"

namespace pecs {

// Whether the 1D modules inside the two column sweeps are reused across
// outer 2D steps (Shared) or unique per step (Unshared).
enum class Sharing : std::uint8_t { Shared = 0, Unshared = 1 };

// 1D convolution bank: out_ch x in_ch x ksize taps, "same" zero padding,
// cross-correlation orientation. Weights are flat, [out][in][tap].
struct Conv1d {
  int out_ch = 0;
  int in_ch = 0;
  int ksize = 0;
  std::vector<double> w;
  std::vector<double> b;
};

// 2D analogue with square ksize x ksize kernels, [out][in][ky][kx].
struct Conv2d {
  int out_ch = 0;
  int in_ch = 0;
  int ksize = 0;
  std::vector<double> w;
  std::vector<double> b;
};

Conv1d make_conv1d(int out_ch, int in_ch, int ksize);
Conv2d make_conv2d(int out_ch, int in_ch, int ksize);

// Learned residual column denoiser: three kernel-9 convolutions over the
// (real, imag) channel pair with 8 hidden features, leaky-ReLU activations,
// and an additive skip connection. `rho` is the module's gradient step size,
// learned together with the kernels; 882 conv parameters + rho = 883.
struct Cnn1dWeights {
  Conv1d l1;
  Conv1d l2;
  Conv1d l3;
  double rho = 1.0;
  double leaky_slope = 0.01;
};

constexpr int kCnn1dFeatures = 8;
constexpr int kCnn1dKernel = 9;
constexpr int kParamsPerModule1d = 883;  // 882 conv weights/biases + rho

// Residual 2D denoiser: `layers` kernel-3 convolutions chaining channels
// 2 -> features -> ... -> features -> 2, leaky-ReLU between layers, additive
// skip.
struct Cnn2dWeights {
  std::vector<Conv2d> layers;
  double leaky_slope = 0.01;
};

Cnn1dWeights make_cnn1d();
Cnn2dWeights make_cnn2d(int layers, int features);

// Seeded init: kernels uniform in +/- sqrt(1/fan_in), biases zero, rho = 1.
Cnn1dWeights init_cnn1d(std::uint64_t seed, double leaky_slope = 0.01);
Cnn2dWeights init_cnn2d(int layers, int features, std::uint64_t seed,
                        double leaky_slope = 0.01);

std::int64_t cnn1d_scalar_count(const Cnn1dWeights& w);  // includes rho
std::int64_t cnn2d_scalar_count(const Cnn2dWeights& w);

// Unique 1D parameter count for a sweep configuration (Shared reuses the
// n_hybrid + n_image modules across all outer steps).
std::int64_t param_count(Sharing sharing, int hybrid_iters, int image_iters,
                         int outer_steps);

// Raw convolution kernels. Buffers are channel-major: in[ch*n + i]. The
// backward_* routines implement the adjoint data path and the parameter
// gradient accumulation used by training.
void conv1d_forward(const Conv1d& c, const double* in, int n, double* out);
void conv1d_backward_data(const Conv1d& c, const double* gout, int n, double* gin);
void conv1d_backward_params(const Conv1d& c, const double* in, const double* gout, int n,
                            Conv1d& grad);
void conv2d_forward(const Conv2d& c, const double* in, int rows, int cols, double* out);
void conv2d_backward_data(const Conv2d& c, const double* gout, int rows, int cols,
                          double* gin);
void conv2d_backward_params(const Conv2d& c, const double* in, const double* gout,
                            int rows, int cols, Conv2d& grad);

// Forward-pass activation records, kept only when a caller needs gradients.
struct Cnn1dTrace {
  std::vector<double> input;  // 2 x n
  std::vector<double> pre1;   // features x n, before activation
  std::vector<double> pre2;
};

struct Cnn2dTrace {
  std::vector<double> input;              // 2 x rows*cols
  std::vector<std::vector<double>> pre;   // one per activated layer
};

// y = r + branch(r) with the complex column viewed as two real channels.
// Zero weights therefore give the identity.
Column cnn1d_forward(const Column& r, const Cnn1dWeights& w, Cnn1dTrace* trace = nullptr);
ComplexGrid cnn2d_forward(const ComplexGrid& x, const Cnn2dWeights& w,
                          Cnn2dTrace* trace = nullptr);

// Backward through the residual column denoiser: accumulates kernel/bias
// gradients into `grad` and returns d(loss)/d(input column) given
// d(loss)/d(output column).
Column cnn1d_backward(const Column& gout, const Cnn1dWeights& w, const Cnn1dTrace& trace,
                      Cnn1dWeights& grad);
ComplexGrid cnn2d_backward(const ComplexGrid& gout, const Cnn2dWeights& w,
                           const Cnn2dTrace& trace, Cnn2dWeights& grad);

// Exact solution of min_u 1/2 ||u - r||^2 + lambda * TV(u) on a real signal
// (Condat's direct 1D algorithm). Complex columns are denoised per channel.
std::vector<double> tv_denoise_1d(const std::vector<double>& r, double lambda);
Column tv_prox_1d(const Column& r, double lambda);

// Isotropic 2D TV denoising via Chambolle's dual projection, per channel.
// Fixed-point iteration, deterministic (tau = 0.25, capped iterations).
ComplexGrid tv_denoise_2d(const ComplexGrid& x, double lambda, int max_iters = 100,
                          double tol = 1e-8);

}  // namespace pecs

#include "pecs/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pecs/rng.hpp"

namespace pecs {

namespace {

double leaky(double x, double slope) { return x >= 0.0 ? x : slope * x; }

// Subgradient at 0 fixed to the positive-side slope 1.
double leaky_grad(double x, double slope) { return x >= 0.0 ? 1.0 : slope; }

void fill_uniform(std::vector<double>& w, double bound, Xoshiro256ss& rng) {
  for (auto& v : w) v = (2.0 * rng.uniform() - 1.0) * bound;
}

}  // namespace

Conv1d make_conv1d(int out_ch, int in_ch, int ksize) {
  if (out_ch < 1 || in_ch < 1 || ksize < 1 || ksize % 2 == 0) {
    throw std::invalid_argument("make_conv1d: channels must be positive, ksize odd");
  }
  Conv1d c;
  c.out_ch = out_ch;
  c.in_ch = in_ch;
  c.ksize = ksize;
  c.w.assign(static_cast<std::size_t>(out_ch) * in_ch * ksize, 0.0);
  c.b.assign(out_ch, 0.0);
  return c;
}

Conv2d make_conv2d(int out_ch, int in_ch, int ksize) {
  if (out_ch < 1 || in_ch < 1 || ksize < 1 || ksize % 2 == 0) {
    throw std::invalid_argument("make_conv2d: channels must be positive, ksize odd");
  }
  Conv2d c;
  c.out_ch = out_ch;
  c.in_ch = in_ch;
  c.ksize = ksize;
  c.w.assign(static_cast<std::size_t>(out_ch) * in_ch * ksize * ksize, 0.0);
  c.b.assign(out_ch, 0.0);
  return c;
}

Cnn1dWeights make_cnn1d() {
  Cnn1dWeights w;
  w.l1 = make_conv1d(kCnn1dFeatures, 2, kCnn1dKernel);
  w.l2 = make_conv1d(kCnn1dFeatures, kCnn1dFeatures, kCnn1dKernel);
  w.l3 = make_conv1d(2, kCnn1dFeatures, kCnn1dKernel);
  return w;
}

Cnn2dWeights make_cnn2d(int layers, int features) {
  if (layers < 1 || features < 1) {
    throw std::invalid_argument("make_cnn2d: need layers >= 1 and features >= 1");
  }
  Cnn2dWeights w;
  w.layers.reserve(layers);
  for (int l = 0; l < layers; ++l) {
    const int in_ch = (l == 0) ? 2 : features;
    const int out_ch = (l == layers - 1) ? 2 : features;
    w.layers.push_back(make_conv2d(out_ch, in_ch, 3));
  }
  return w;
}

Cnn1dWeights init_cnn1d(std::uint64_t seed, double leaky_slope) {
  Cnn1dWeights w = make_cnn1d();
  w.leaky_slope = leaky_slope;
  Xoshiro256ss rng(seed);
  for (Conv1d* layer : {&w.l1, &w.l2, &w.l3}) {
    const double bound = std::sqrt(1.0 / (layer->in_ch * layer->ksize));
    fill_uniform(layer->w, bound, rng);
  }
  w.rho = 1.0;
  return w;
}

Cnn2dWeights init_cnn2d(int layers, int features, std::uint64_t seed, double leaky_slope) {
  Cnn2dWeights w = make_cnn2d(layers, features);
  w.leaky_slope = leaky_slope;
  Xoshiro256ss rng(seed);
  for (auto& layer : w.layers) {
    const double bound = std::sqrt(1.0 / (layer.in_ch * layer.ksize * layer.ksize));
    fill_uniform(layer.w, bound, rng);
  }
  return w;
}

std::int64_t cnn1d_scalar_count(const Cnn1dWeights& w) {
  std::int64_t n = 1;  // rho
  for (const Conv1d* layer : {&w.l1, &w.l2, &w.l3}) {
    n += static_cast<std::int64_t>(layer->w.size()) + static_cast<std::int64_t>(layer->b.size());
  }
  return n;
}

std::int64_t cnn2d_scalar_count(const Cnn2dWeights& w) {
  std::int64_t n = 0;
  for (const auto& layer : w.layers) {
    n += static_cast<std::int64_t>(layer.w.size()) + static_cast<std::int64_t>(layer.b.size());
  }
  return n;
}

std::int64_t param_count(Sharing sharing, int hybrid_iters, int image_iters,
                         int outer_steps) {
  if (hybrid_iters < 0 || image_iters < 0 || outer_steps < 0) {
    throw std::invalid_argument("param_count: iteration counts must be >= 0");
  }
  const std::int64_t per_module = kParamsPerModule1d;
  const std::int64_t modules = hybrid_iters + image_iters;
  if (sharing == Sharing::Shared) return modules * per_module;
  return modules * static_cast<std::int64_t>(outer_steps) * per_module;
}

void conv1d_forward(const Conv1d& c, const double* in, int n, double* out) {
  const int pad = (c.ksize - 1) / 2;
  for (int co = 0; co < c.out_ch; ++co) {
    std::fill(out + static_cast<std::size_t>(co) * n, out + static_cast<std::size_t>(co + 1) * n,
              c.b[co]);
  }
  for (int co = 0; co < c.out_ch; ++co) {
    double* orow = out + static_cast<std::size_t>(co) * n;
    for (int ci = 0; ci < c.in_ch; ++ci) {
      const double* irow = in + static_cast<std::size_t>(ci) * n;
      const double* wrow = c.w.data() + (static_cast<std::size_t>(co) * c.in_ch + ci) * c.ksize;
      for (int k = 0; k < c.ksize; ++k) {
        const double wv = wrow[k];
        const int off = k - pad;
        const int lo = std::max(0, -off);
        const int hi = std::min(n, n - off);
        for (int i = lo; i < hi; ++i) orow[i] += wv * irow[i + off];
      }
    }
  }
}

void conv1d_backward_data(const Conv1d& c, const double* gout, int n, double* gin) {
  const int pad = (c.ksize - 1) / 2;
  std::fill(gin, gin + static_cast<std::size_t>(c.in_ch) * n, 0.0);
  for (int co = 0; co < c.out_ch; ++co) {
    const double* grow = gout + static_cast<std::size_t>(co) * n;
    for (int ci = 0; ci < c.in_ch; ++ci) {
      double* irow = gin + static_cast<std::size_t>(ci) * n;
      const double* wrow = c.w.data() + (static_cast<std::size_t>(co) * c.in_ch + ci) * c.ksize;
      for (int k = 0; k < c.ksize; ++k) {
        const double wv = wrow[k];
        const int off = k - pad;
        const int lo = std::max(0, -off);
        const int hi = std::min(n, n - off);
        for (int i = lo; i < hi; ++i) irow[i + off] += wv * grow[i];
      }
    }
  }
}

void conv1d_backward_params(const Conv1d& c, const double* in, const double* gout, int n,
                            Conv1d& grad) {
  const int pad = (c.ksize - 1) / 2;
  for (int co = 0; co < c.out_ch; ++co) {
    const double* grow = gout + static_cast<std::size_t>(co) * n;
    double acc_b = 0.0;
    for (int i = 0; i < n; ++i) acc_b += grow[i];
    grad.b[co] += acc_b;
    for (int ci = 0; ci < c.in_ch; ++ci) {
      const double* irow = in + static_cast<std::size_t>(ci) * n;
      double* wrow = grad.w.data() + (static_cast<std::size_t>(co) * c.in_ch + ci) * c.ksize;
      for (int k = 0; k < c.ksize; ++k) {
        const int off = k - pad;
        const int lo = std::max(0, -off);
        const int hi = std::min(n, n - off);
        double acc = 0.0;
        for (int i = lo; i < hi; ++i) acc += grow[i] * irow[i + off];
        wrow[k] += acc;
      }
    }
  }
}

void conv2d_forward(const Conv2d& c, const double* in, int rows, int cols, double* out) {
  const int pad = (c.ksize - 1) / 2;
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  for (int co = 0; co < c.out_ch; ++co) {
    std::fill(out + co * plane, out + (co + 1) * plane, c.b[co]);
  }
  for (int co = 0; co < c.out_ch; ++co) {
    double* oplane = out + co * plane;
    for (int ci = 0; ci < c.in_ch; ++ci) {
      const double* iplane = in + ci * plane;
      const double* wbase =
          c.w.data() + (static_cast<std::size_t>(co) * c.in_ch + ci) * c.ksize * c.ksize;
      for (int ky = 0; ky < c.ksize; ++ky) {
        const int roff = ky - pad;
        const int rlo = std::max(0, -roff);
        const int rhi = std::min(rows, rows - roff);
        for (int kx = 0; kx < c.ksize; ++kx) {
          const double wv = wbase[ky * c.ksize + kx];
          const int coff = kx - pad;
          const int clo = std::max(0, -coff);
          const int chi = std::min(cols, cols - coff);
          for (int r = rlo; r < rhi; ++r) {
            double* orow = oplane + static_cast<std::size_t>(r) * cols;
            const double* irow = iplane + static_cast<std::size_t>(r + roff) * cols + coff;
            for (int col = clo; col < chi; ++col) orow[col] += wv * irow[col];
          }
        }
      }
    }
  }
}

void conv2d_backward_data(const Conv2d& c, const double* gout, int rows, int cols,
                          double* gin) {
  const int pad = (c.ksize - 1) / 2;
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  std::fill(gin, gin + static_cast<std::size_t>(c.in_ch) * plane, 0.0);
  for (int co = 0; co < c.out_ch; ++co) {
    const double* gplane = gout + co * plane;
    for (int ci = 0; ci < c.in_ch; ++ci) {
      double* iplane = gin + ci * plane;
      const double* wbase =
          c.w.data() + (static_cast<std::size_t>(co) * c.in_ch + ci) * c.ksize * c.ksize;
      for (int ky = 0; ky < c.ksize; ++ky) {
        const int roff = ky - pad;
        const int rlo = std::max(0, -roff);
        const int rhi = std::min(rows, rows - roff);
        for (int kx = 0; kx < c.ksize; ++kx) {
          const double wv = wbase[ky * c.ksize + kx];
          const int coff = kx - pad;
          const int clo = std::max(0, -coff);
          const int chi = std::min(cols, cols - coff);
          for (int r = rlo; r < rhi; ++r) {
            const double* grow = gplane + static_cast<std::size_t>(r) * cols;
            double* irow = iplane + static_cast<std::size_t>(r + roff) * cols + coff;
            for (int col = clo; col < chi; ++col) irow[col] += wv * grow[col];
          }
        }
      }
    }
  }
}

void conv2d_backward_params(const Conv2d& c, const double* in, const double* gout,
                            int rows, int cols, Conv2d& grad) {
  const int pad = (c.ksize - 1) / 2;
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  for (int co = 0; co < c.out_ch; ++co) {
    const double* gplane = gout + co * plane;
    double acc_b = 0.0;
    for (std::size_t i = 0; i < plane; ++i) acc_b += gplane[i];
    grad.b[co] += acc_b;
    for (int ci = 0; ci < c.in_ch; ++ci) {
      const double* iplane = in + ci * plane;
      double* wbase =
          grad.w.data() + (static_cast<std::size_t>(co) * c.in_ch + ci) * c.ksize * c.ksize;
      for (int ky = 0; ky < c.ksize; ++ky) {
        const int roff = ky - pad;
        const int rlo = std::max(0, -roff);
        const int rhi = std::min(rows, rows - roff);
        for (int kx = 0; kx < c.ksize; ++kx) {
          const int coff = kx - pad;
          const int clo = std::max(0, -coff);
          const int chi = std::min(cols, cols - coff);
          double acc = 0.0;
          for (int r = rlo; r < rhi; ++r) {
            const double* grow = gplane + static_cast<std::size_t>(r) * cols;
            const double* irow = iplane + static_cast<std::size_t>(r + roff) * cols + coff;
            for (int col = clo; col < chi; ++col) acc += grow[col] * irow[col];
          }
          wbase[ky * c.ksize + kx] += acc;
        }
      }
    }
  }
}

Column cnn1d_forward(const Column& r, const Cnn1dWeights& w, Cnn1dTrace* trace) {
  const int n = static_cast<int>(r.size());
  const int f = w.l1.out_ch;
  std::vector<double> in(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    in[i] = r[i].real();
    in[n + i] = r[i].imag();
  }
  std::vector<double> pre1(static_cast<std::size_t>(f) * n);
  conv1d_forward(w.l1, in.data(), n, pre1.data());
  std::vector<double> act1(pre1.size());
  for (std::size_t i = 0; i < pre1.size(); ++i) act1[i] = leaky(pre1[i], w.leaky_slope);

  std::vector<double> pre2(static_cast<std::size_t>(f) * n);
  conv1d_forward(w.l2, act1.data(), n, pre2.data());
  std::vector<double> act2(pre2.size());
  for (std::size_t i = 0; i < pre2.size(); ++i) act2[i] = leaky(pre2[i], w.leaky_slope);

  std::vector<double> branch(2 * static_cast<std::size_t>(n));
  conv1d_forward(w.l3, act2.data(), n, branch.data());

  Column out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = r[i] + cdouble{branch[i], branch[n + i]};
  }
  if (trace) {
    trace->input = std::move(in);
    trace->pre1 = std::move(pre1);
    trace->pre2 = std::move(pre2);
  }
  return out;
}

Column cnn1d_backward(const Column& gout, const Cnn1dWeights& w, const Cnn1dTrace& trace,
                      Cnn1dWeights& grad) {
  const int n = static_cast<int>(gout.size());
  const int f = w.l1.out_ch;
  std::vector<double> g3(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g3[i] = gout[i].real();
    g3[n + i] = gout[i].imag();
  }

  // layer activations recomputed from recorded pre-activations
  std::vector<double> act1(trace.pre1.size()), act2(trace.pre2.size());
  for (std::size_t i = 0; i < act1.size(); ++i) act1[i] = leaky(trace.pre1[i], w.leaky_slope);
  for (std::size_t i = 0; i < act2.size(); ++i) act2[i] = leaky(trace.pre2[i], w.leaky_slope);

  conv1d_backward_params(w.l3, act2.data(), g3.data(), n, grad.l3);
  std::vector<double> ga2(static_cast<std::size_t>(f) * n);
  conv1d_backward_data(w.l3, g3.data(), n, ga2.data());
  for (std::size_t i = 0; i < ga2.size(); ++i) ga2[i] *= leaky_grad(trace.pre2[i], w.leaky_slope);

  conv1d_backward_params(w.l2, act1.data(), ga2.data(), n, grad.l2);
  std::vector<double> ga1(static_cast<std::size_t>(f) * n);
  conv1d_backward_data(w.l2, ga2.data(), n, ga1.data());
  for (std::size_t i = 0; i < ga1.size(); ++i) ga1[i] *= leaky_grad(trace.pre1[i], w.leaky_slope);

  conv1d_backward_params(w.l1, trace.input.data(), ga1.data(), n, grad.l1);
  std::vector<double> gin(2 * static_cast<std::size_t>(n));
  conv1d_backward_data(w.l1, ga1.data(), n, gin.data());

  Column gr(n);
  for (int i = 0; i < n; ++i) {
    gr[i] = gout[i] + cdouble{gin[i], gin[n + i]};  // skip connection
  }
  return gr;
}

ComplexGrid cnn2d_forward(const ComplexGrid& x, const Cnn2dWeights& w, Cnn2dTrace* trace) {
  const int rows = x.rows();
  const int cols = x.cols();
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  const int n_layers = static_cast<int>(w.layers.size());

  std::vector<double> cur(2 * plane);
  for (std::size_t i = 0; i < plane; ++i) {
    cur[i] = x.data()[i].real();
    cur[plane + i] = x.data()[i].imag();
  }
  if (trace) {
    trace->input = cur;
    trace->pre.clear();
  }

  for (int l = 0; l < n_layers; ++l) {
    const Conv2d& layer = w.layers[l];
    std::vector<double> next(static_cast<std::size_t>(layer.out_ch) * plane);
    conv2d_forward(layer, cur.data(), rows, cols, next.data());
    if (l < n_layers - 1) {
      if (trace) trace->pre.push_back(next);
      for (auto& v : next) v = leaky(v, w.leaky_slope);
    }
    cur = std::move(next);
  }

  ComplexGrid out = x;
  for (std::size_t i = 0; i < plane; ++i) {
    out.data()[i] += cdouble{cur[i], cur[plane + i]};
  }
  return out;
}

ComplexGrid cnn2d_backward(const ComplexGrid& gout, const Cnn2dWeights& w,
                           const Cnn2dTrace& trace, Cnn2dWeights& grad) {
  const int rows = gout.rows();
  const int cols = gout.cols();
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  const int n_layers = static_cast<int>(w.layers.size());

  std::vector<double> g(2 * plane);
  for (std::size_t i = 0; i < plane; ++i) {
    g[i] = gout.data()[i].real();
    g[plane + i] = gout.data()[i].imag();
  }

  for (int l = n_layers - 1; l >= 0; --l) {
    const Conv2d& layer = w.layers[l];
    // input to this layer: activated pre[l-1], or the recorded input for l=0
    std::vector<double> layer_in;
    if (l == 0) {
      layer_in = trace.input;
    } else {
      layer_in = trace.pre[l - 1];
      for (auto& v : layer_in) v = leaky(v, w.leaky_slope);
    }
    conv2d_backward_params(layer, layer_in.data(), g.data(), rows, cols, grad.layers[l]);
    std::vector<double> gprev(static_cast<std::size_t>(layer.in_ch) * plane);
    conv2d_backward_data(layer, g.data(), rows, cols, gprev.data());
    if (l > 0) {
      const auto& pre = trace.pre[l - 1];
      for (std::size_t i = 0; i < gprev.size(); ++i) {
        gprev[i] *= leaky_grad(pre[i], w.leaky_slope);
      }
    }
    g = std::move(gprev);
  }

  ComplexGrid gin = gout;  // skip connection
  for (std::size_t i = 0; i < plane; ++i) {
    gin.data()[i] += cdouble{g[i], g[plane + i]};
  }
  return gin;
}

// Condat's direct 1D total-variation algorithm: a single left-to-right scan
// that maintains the running bounds (vmin, vmax) of the current segment and
// flushes it whenever the taut-string tube forces a jump.
std::vector<double> tv_denoise_1d(const std::vector<double>& r, double lambda) {
  const int n = static_cast<int>(r.size());
  std::vector<double> x(n);
  if (n == 0) return x;
  if (n == 1 || lambda <= 0.0) {
    x = r;
    return x;
  }

  int k = 0, k0 = 0, kminus = 0, kplus = 0;
  double vmin = r[0] - lambda;
  double vmax = r[0] + lambda;
  double umin = lambda;
  double umax = -lambda;
  const double two_lambda = 2.0 * lambda;

  for (;;) {
    while (k == n - 1) {
      if (umin < 0.0) {
        do x[k0++] = vmin; while (k0 <= kminus);
        umax = (vmin = r[kminus = k = k0]) + (umin = lambda) - vmax;
      } else if (umax > 0.0) {
        do x[k0++] = vmax; while (k0 <= kplus);
        umin = (vmax = r[kplus = k = k0]) + (umax = -lambda) - vmin;
      } else {
        vmin += umin / (k - k0 + 1);
        do x[k0++] = vmin; while (k0 <= k);
        return x;
      }
    }
    if (r[k + 1] + umin < vmin - lambda) {  // segment ends with a jump down
      do x[k0++] = vmin; while (k0 <= kminus);
      vmax = (vmin = r[kplus = kminus = k = k0]) + two_lambda;
      umin = lambda;
      umax = -lambda;
    } else if (r[k + 1] + umax > vmax + lambda) {  // jump up
      do x[k0++] = vmax; while (k0 <= kplus);
      vmin = (vmax = r[kplus = kminus = k = k0]) - two_lambda;
      umin = lambda;
      umax = -lambda;
    } else {  // extend the segment
      ++k;
      umin += r[k] - vmin;
      umax += r[k] - vmax;
      if (umin >= lambda) {
        vmin += (umin - lambda) / (k - k0 + 1);
        umin = lambda;
        kminus = k;
      }
      if (umax <= -lambda) {
        vmax += (umax + lambda) / (k - k0 + 1);
        umax = -lambda;
        kplus = k;
      }
    }
  }
}

Column tv_prox_1d(const Column& r, double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("tv_prox_1d: lambda must be > 0");
  const int n = static_cast<int>(r.size());
  std::vector<double> re(n), im(n);
  for (int i = 0; i < n; ++i) {
    re[i] = r[i].real();
    im[i] = r[i].imag();
  }
  re = tv_denoise_1d(re, lambda);
  im = tv_denoise_1d(im, lambda);
  Column out(n);
  for (int i = 0; i < n; ++i) out[i] = cdouble{re[i], im[i]};
  return out;
}

namespace {

// Chambolle's dual projection for min 1/2||u - f||^2 + lambda TV_iso(u),
// one real channel. tau = 1/8 satisfies the convergence bound for the
// forward-difference discretisation.
void tv2d_channel(std::vector<double>& f, int rows, int cols, double lambda,
                  int max_iters, double tol) {
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  std::vector<double> px(plane, 0.0), py(plane, 0.0), div(plane, 0.0), u(plane);
  const double tau = 0.125;

  auto compute_div = [&]() {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * cols + c;
        double d = 0.0;
        d += (c == 0) ? px[i] : (c == cols - 1 ? -px[i - 1] : px[i] - px[i - 1]);
        d += (r == 0) ? py[i] : (r == rows - 1 ? -py[i - cols] : py[i] - py[i - cols]);
        div[i] = d;
      }
    }
  };

  double prev_change = 0.0;
  (void)prev_change;
  std::vector<double> w(plane);
  for (int it = 0; it < max_iters; ++it) {
    compute_div();
    for (std::size_t i = 0; i < plane; ++i) w[i] = div[i] - f[i] / lambda;
    double change = 0.0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * cols + c;
        const double gx = (c < cols - 1) ? w[i + 1] - w[i] : 0.0;
        const double gy = (r < rows - 1) ? w[i + cols] - w[i] : 0.0;
        const double mag = std::sqrt(gx * gx + gy * gy);
        const double denom = 1.0 + tau * mag;
        const double nx = (px[i] + tau * gx) / denom;
        const double ny = (py[i] + tau * gy) / denom;
        change = std::max(change, std::max(std::abs(nx - px[i]), std::abs(ny - py[i])));
        px[i] = nx;
        py[i] = ny;
      }
    }
    if (change < tol) break;
  }
  compute_div();
  for (std::size_t i = 0; i < plane; ++i) f[i] -= lambda * div[i];
}

}  // namespace

ComplexGrid tv_denoise_2d(const ComplexGrid& x, double lambda, int max_iters, double tol) {
  if (lambda <= 0.0) throw std::invalid_argument("tv_denoise_2d: lambda must be > 0");
  const std::size_t plane = x.size();
  std::vector<double> re(plane), im(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    re[i] = x.data()[i].real();
    im[i] = x.data()[i].imag();
  }
  tv2d_channel(re, x.rows(), x.cols(), lambda, max_iters, tol);
  tv2d_channel(im, x.rows(), x.cols(), lambda, max_iters, tol);
  ComplexGrid out = x;
  for (std::size_t i = 0; i < plane; ++i) out.data()[i] = cdouble{re[i], im[i]};
  return out;
}

}  // namespace pecs

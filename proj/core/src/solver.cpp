#include "pecs/solver.hpp"

#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pecs/autodiff.hpp"

namespace pecs {

namespace {

void mask_column_inplace(Column& c, const Mask1D& m) {
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    if (!m.is_sampled(i)) c[i] = cdouble{0.0, 0.0};
  }
}

// Runs fn(i) for i in [0, count), optionally across a small thread pool.
// Work items must write to disjoint state.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

Column pg_1d(const Column& u0, const Column& v, const Mask1D& m,
             std::span<const Module1d> modules, PgTape* tape) {
  if (modules.empty()) throw std::invalid_argument("pg_1d: need at least one module");
  const int n = static_cast<int>(u0.size());
  if (static_cast<int>(v.size()) != n || m.length != n) {
    throw std::invalid_argument("pg_1d: column/measurement/mask lengths disagree");
  }
  if (tape) tape->iters.resize(modules.size());

  Column u = u0;
  for (std::size_t t = 0; t < modules.size(); ++t) {
    const Module1d& mod = modules[t];
    Column z = dft_pe_1d(u);
    mask_column_inplace(z, m);
    for (int i = 0; i < n; ++i) z[i] -= v[i];
    Column step_dir = idft_pe_1d(z);
    const double rho = mod.step();
    Column r(n);
    for (int i = 0; i < n; ++i) r[i] = u[i] - rho * step_dir[i];

    if (mod.kind == Reg1d::Cnn) {
      u = cnn1d_forward(r, mod.cnn, tape ? &tape->iters[t].cnn : nullptr);
    } else {
      if (tape) throw std::invalid_argument("pg_1d: TV modules are not differentiable");
      u = tv_prox_1d(r, mod.tv_lambda);
    }
    if (tape) tape->iters[t].step_dir = std::move(step_dir);
  }
  return u;
}

ComplexGrid hybrid_sweep(const ComplexGrid& x, const ComplexGrid& y, const Mask1D& m,
                         std::span<const Module1d> modules, SweepTrace* trace, int threads) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("hybrid_sweep: shapes disagree");
  }
  if (modules.empty()) return x;
  ComplexGrid h = dft_fe(x);
  if (trace) trace->columns.resize(h.cols());
  parallel_for(h.cols(), threads, [&](int i) {
    Column hi = get_column(h, i);
    Column yi = get_column(y, i);
    Column out = pg_1d(hi, yi, m, modules, trace ? &trace->columns[i] : nullptr);
    for (int r = 0; r < h.rows(); ++r) h(r, i) = out[r];
  });
  return idft_fe(h);
}

ComplexGrid image_sweep(const ComplexGrid& x, const ComplexGrid& y, const Mask1D& m,
                        std::span<const Module1d> modules, SweepTrace* trace, int threads) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("image_sweep: shapes disagree");
  }
  if (modules.empty()) return x;
  const ComplexGrid v = idft_fe(y);
  ComplexGrid out = x;
  if (trace) trace->columns.resize(x.cols());
  parallel_for(x.cols(), threads, [&](int i) {
    Column xi = get_column(x, i);
    Column vi = get_column(v, i);
    Column rec = pg_1d(xi, vi, m, modules, trace ? &trace->columns[i] : nullptr);
    for (int r = 0; r < out.rows(); ++r) out(r, i) = rec[r];
  });
  return out;
}

ComplexGrid data_consistency(const ComplexGrid& x, const ComplexGrid& y, const Mask1D& m) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("data_consistency: shapes disagree");
  }
  if (y.rows() != m.length) {
    throw std::invalid_argument("data_consistency: mask length disagrees");
  }
  ComplexGrid k = dft2d(x);
  for (int r = 0; r < k.rows(); ++r) {
    if (!m.is_sampled(r)) continue;
    for (int c = 0; c < k.cols(); ++c) k(r, c) = y(r, c);
  }
  return idft2d(k);
}

ComplexGrid zero_fill(const ComplexGrid& y, const Mask1D& m) {
  return idft2d(apply_mask(y, m));
}

ComplexGrid recon_am(const ComplexGrid& y, const Mask1D& m, const ReconConfig& cfg,
                     const ModelBundle& model, ReconTape* tape, int threads) {
  validate_model(cfg, model);
  if (y.domain() != Domain::KSpace) {
    throw std::invalid_argument("recon_am: measurements must be tagged KSpace");
  }
  if (y.rows() != m.length) {
    throw std::invalid_argument("recon_am: mask length disagrees with measurements");
  }
  if (tape) {
    if (cfg.regularizer_1d != Reg1d::Cnn ||
        (cfg.regularizer_2d == Reg2d::Tv)) {
      throw std::invalid_argument("recon_am: recording requires CNN regularizers");
    }
    tape->outers.assign(cfg.outer_steps, OuterTrace{});
    tape->recorded = true;
  }

  ComplexGrid x = zero_fill(y, m);
  for (int t = 0; t < cfg.outer_steps; ++t) {
    OuterTrace* ot = tape ? &tape->outers[t] : nullptr;
    x = hybrid_sweep(x, y, m, model.hybrid_for_step(cfg, t), ot ? &ot->hybrid : nullptr,
                     threads);
    x = image_sweep(x, y, m, model.image_for_step(cfg, t), ot ? &ot->image : nullptr,
                    threads);
    switch (cfg.regularizer_2d) {
      case Reg2d::Cnn:
        x = cnn2d_forward(x, model.planes[t], ot ? &ot->plane : nullptr);
        if (ot) ot->has_plane = true;
        break;
      case Reg2d::Tv:
        x = tv_denoise_2d(x, cfg.tv2d_lambda);
        break;
      case Reg2d::None:
        break;
    }
    x = data_consistency(x, y, m);
  }
  return x;
}

}  // namespace pecs

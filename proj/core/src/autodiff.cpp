#include "pecs/autodiff.hpp"

#include <cmath>
#include <stdexcept>

#include "pecs/loss.hpp"
#include "pecs/rng.hpp"
#include "pecs/solver.hpp"

namespace pecs {

namespace {

// Gradient convention throughout: a complex value g packs d(loss)/d(re) +
// i d(loss)/d(im). A complex-linear stage A then backpropagates as
// g_in = adjoint(A) g_out; for the unitary transforms the adjoint is the
// inverse.

void mask_column(Column& c, const Mask1D& m, bool keep_sampled) {
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    if (m.is_sampled(i) != keep_sampled) c[i] = cdouble{0.0, 0.0};
  }
}

Column dft_column(const Column& c, bool inverse) {
  Column out = c;
  unitary_dft(out, inverse);
  return out;
}

// Reverse of one recorded pg_1d chain on a single column. g is
// d(loss)/d(output column); returns d(loss)/d(initial column) and
// accumulates module gradients. Modules are visited in reverse order.
Column pg_backward(Column g, const Mask1D& m, std::span<const Module1d> modules,
                   const PgTape& tape, std::span<Module1d> grads) {
  for (int t = static_cast<int>(modules.size()) - 1; t >= 0; --t) {
    const Module1d& mod = modules[t];
    const PgIterTrace& rec = tape.iters[t];
    Module1d& grad = grads[t];

    // denoiser: g -> d(loss)/d(r)
    Column gr = cnn1d_backward(g, mod.cnn, rec.cnn, grad.cnn);

    // step size: r = u - rho * step_dir
    double grho = 0.0;
    for (std::size_t i = 0; i < gr.size(); ++i) {
      grho -= gr[i].real() * rec.step_dir[i].real() + gr[i].imag() * rec.step_dir[i].imag();
    }
    grad.cnn.rho += grho;

    // through the gradient step: u -> r is I - rho * F^H R F (self-adjoint)
    Column fk = dft_column(gr, false);
    mask_column(fk, m, true);
    Column corr = dft_column(fk, true);
    const double rho = mod.step();
    g = gr;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= rho * corr[i];
  }
  return g;
}

void check_span_sizes(std::span<const Module1d> modules, const SweepTrace& trace, int cols) {
  if (static_cast<int>(trace.columns.size()) != cols) {
    throw std::logic_error("backward: sweep trace does not match grid width");
  }
  for (const auto& col : trace.columns) {
    if (col.iters.size() != modules.size()) {
      throw std::logic_error("backward: per-column trace does not match module count");
    }
  }
}

// Hybrid sweep forward was: h = dft_fe(x); per-column recovery; out = idft_fe(h).
ComplexGrid hybrid_sweep_backward(const ComplexGrid& gout, const Mask1D& m,
                                  std::span<const Module1d> modules, const SweepTrace& trace,
                                  std::span<Module1d> grads) {
  ComplexGrid gh = gout;
  dft_rows_inplace(gh, false);  // adjoint of the inverse row transform
  check_span_sizes(modules, trace, gh.cols());
  for (int i = 0; i < gh.cols(); ++i) {
    Column gcol = get_column(gh, i);
    gcol = pg_backward(std::move(gcol), m, modules, trace.columns[i], grads);
    for (int r = 0; r < gh.rows(); ++r) gh(r, i) = gcol[r];
  }
  dft_rows_inplace(gh, true);  // adjoint of the forward row transform
  return gh;
}

ComplexGrid image_sweep_backward(const ComplexGrid& gout, const Mask1D& m,
                                 std::span<const Module1d> modules, const SweepTrace& trace,
                                 std::span<Module1d> grads) {
  ComplexGrid gx = gout;
  check_span_sizes(modules, trace, gx.cols());
  for (int i = 0; i < gx.cols(); ++i) {
    Column gcol = get_column(gx, i);
    gcol = pg_backward(std::move(gcol), m, modules, trace.columns[i], grads);
    for (int r = 0; r < gx.rows(); ++r) gx(r, i) = gcol[r];
  }
  return gx;
}

// Data consistency replaces sampled k-space lines with constants, so the
// gradient survives only on the unsampled complement.
ComplexGrid data_consistency_backward(const ComplexGrid& gout, const Mask1D& m) {
  ComplexGrid g = gout;
  dft_cols_inplace(g, false);
  dft_rows_inplace(g, false);
  for (int r = 0; r < g.rows(); ++r) {
    if (!m.is_sampled(r)) continue;
    for (int c = 0; c < g.cols(); ++c) g(r, c) = cdouble{0.0, 0.0};
  }
  dft_cols_inplace(g, true);
  dft_rows_inplace(g, true);
  return g;
}

std::span<Module1d> grads_for_step(std::vector<Module1d>& grads, const ReconConfig& cfg,
                                   int outer, int per_step) {
  if (cfg.sharing == Sharing::Shared) return {grads.data(), grads.size()};
  return {grads.data() + static_cast<std::size_t>(outer) * per_step,
          static_cast<std::size_t>(per_step)};
}

}  // namespace

ModelBundle backward(const ReconTape& tape, const ReconConfig& cfg, const ModelBundle& model,
                     const Mask1D& mask, const ComplexGrid& grad_xhat) {
  if (!tape.recorded) {
    throw std::logic_error("backward: forward pass was not recorded");
  }
  validate_model(cfg, model);
  if (static_cast<int>(tape.outers.size()) != cfg.outer_steps) {
    throw std::logic_error("backward: tape does not match config");
  }

  ModelBundle grads = zero_like(model);
  ComplexGrid g = grad_xhat;
  for (int t = cfg.outer_steps - 1; t >= 0; --t) {
    const OuterTrace& ot = tape.outers[t];
    g = data_consistency_backward(g, mask);
    if (cfg.regularizer_2d == Reg2d::Cnn) {
      if (!ot.has_plane) throw std::logic_error("backward: missing 2D trace");
      g = cnn2d_backward(g, model.planes[t], ot.plane, grads.planes[t]);
    }
    g = image_sweep_backward(g, mask, model.image_for_step(cfg, t), ot.image,
                             grads_for_step(grads.image, cfg, t, cfg.image_iters));
    g = hybrid_sweep_backward(g, mask, model.hybrid_for_step(cfg, t), ot.hybrid,
                              grads_for_step(grads.hybrid, cfg, t, cfg.hybrid_iters));
  }
  return grads;
}

GradCheckReport grad_check(const ReconConfig& cfg, std::uint64_t seed,
                           const GradCheckOptions& opts) {
  cfg.validate();
  const int rows = opts.rows;
  const int cols = opts.cols;

  // Random complex target; the residual magnitudes this produces keep every
  // l1 kink far from the finite-difference stencil.
  Xoshiro256ss rng(sub_seed(seed, SeedPurpose::Phantom));
  ComplexGrid x0(rows, cols, Domain::Image);
  for (auto& v : x0.data()) {
    v = cdouble{rng.uniform(0.1, 1.0), rng.uniform(-0.45, 0.45)};
  }
  const ComplexGrid y0 = dft2d(x0);
  const Mask1D mask = gen_gaussian_mask(rows, 2.0, default_density_sigma(rows),
                                        default_acs_lines(rows),
                                        sub_seed(seed, SeedPurpose::Mask));
  const ComplexGrid y = apply_mask(y0, mask);

  ModelBundle model = make_model(cfg, sub_seed(seed, SeedPurpose::Init));
  const LossWeights lw{opts.tau_k, opts.tau_p, opts.tau_f};

  auto forward_loss = [&]() {
    const ComplexGrid xhat = recon_am(y, mask, cfg, model);
    return loss_value(x0, y0, xhat, lw);
  };

  ReconTape tape;
  const ComplexGrid xhat = recon_am(y, mask, cfg, model, &tape);
  ComplexGrid gx;
  loss_with_grad(x0, y0, xhat, lw, gx);
  ModelBundle analytic = backward(tape, cfg, model, mask, gx);

  ParamRefs params = trainable_params(model);
  ParamRefs agrads = trainable_params(analytic);
  if (opts.corrupt && !agrads.values.empty()) {
    *agrads.values[agrads.size() / 2] += 1.0;
  }

  GradCheckReport report;
  report.classes = {{"kernel1d"}, {"bias1d"}, {"rho"}, {"kernel2d"}, {"bias2d"}};
  auto class_of = [](ParamKind k) -> int { return static_cast<int>(k); };

  for (std::size_t i = 0; i < params.size(); ++i) {
    double* p = params.values[i];
    const double saved = *p;
    *p = saved + opts.step;
    const double lp = forward_loss();
    *p = saved - opts.step;
    const double lm = forward_loss();
    *p = saved;
    const double fd = (lp - lm) / (2.0 * opts.step);
    const double an = *agrads.values[i];
    const double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
    const double rel = std::abs(fd - an) / denom;
    auto& cls = report.classes[class_of(params.kinds[i])];
    cls.max_rel_err = std::max(cls.max_rel_err, rel);
    cls.count += 1;
    report.max_rel_err = std::max(report.max_rel_err, rel);
  }
  report.pass = report.max_rel_err <= opts.tolerance;
  return report;
}

}  // namespace pecs

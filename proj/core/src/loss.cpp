#include "pecs/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace pecs {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double l1(const ComplexGrid& a, const ComplexGrid& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cdouble d = a.data()[i] - b.data()[i];
    acc += std::abs(d.real()) + std::abs(d.imag());
  }
  return acc;
}

// Componentwise sign of (a - b), the l1 subgradient direction.
ComplexGrid l1_sign(const ComplexGrid& a, const ComplexGrid& b) {
  ComplexGrid s = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cdouble d = a.data()[i] - b.data()[i];
    s.data()[i] = cdouble{sgn(d.real()), sgn(d.imag())};
  }
  return s;
}

void check_shapes(const ComplexGrid& x0, const ComplexGrid& y0, const ComplexGrid& xhat) {
  if (x0.rows() != xhat.rows() || x0.cols() != xhat.cols() || y0.rows() != x0.rows() ||
      y0.cols() != x0.cols()) {
    throw std::invalid_argument("loss: grid shapes disagree");
  }
}

}  // namespace

double loss_value(const ComplexGrid& x0, const ComplexGrid& y0, const ComplexGrid& xhat,
                  const LossWeights& w) {
  check_shapes(x0, y0, xhat);
  ComplexGrid yhat = xhat;
  yhat.set_domain(Domain::Image);
  yhat = dft2d(yhat);

  double loss = l1(x0, xhat);
  loss += w.tau_k * l1(y0, yhat);

  ComplexGrid p0 = y0, phat = yhat;
  dft_cols_inplace(p0, true);
  dft_cols_inplace(phat, true);
  loss += w.tau_p * l1(p0, phat);

  ComplexGrid f0 = y0, fhat = yhat;
  dft_rows_inplace(f0, true);
  dft_rows_inplace(fhat, true);
  loss += w.tau_f * l1(f0, fhat);
  return loss;
}

double loss_with_grad(const ComplexGrid& x0, const ComplexGrid& y0, const ComplexGrid& xhat,
                      const LossWeights& w, ComplexGrid& grad_xhat) {
  check_shapes(x0, y0, xhat);
  ComplexGrid yhat = xhat;
  yhat.set_domain(Domain::Image);
  yhat = dft2d(yhat);

  // forward values and the intermediate-domain residual signs
  double loss = l1(x0, xhat);
  loss += w.tau_k * l1(y0, yhat);

  ComplexGrid p0 = y0, phat = yhat;
  dft_cols_inplace(p0, true);
  dft_cols_inplace(phat, true);
  loss += w.tau_p * l1(p0, phat);

  ComplexGrid f0 = y0, fhat = yhat;
  dft_rows_inplace(f0, true);
  dft_rows_inplace(fhat, true);
  loss += w.tau_f * l1(f0, fhat);

  // d(loss)/d(yhat): the k-space term directly, the single-axis terms pulled
  // back through the adjoint of the respective inverse transform.
  ComplexGrid gy = l1_sign(y0, yhat);
  for (auto& v : gy.data()) v *= -w.tau_k;

  ComplexGrid gp = l1_sign(p0, phat);
  dft_cols_inplace(gp, false);  // adjoint of the inverse column transform
  for (std::size_t i = 0; i < gy.size(); ++i) gy.data()[i] += -w.tau_p * gp.data()[i];

  ComplexGrid gf = l1_sign(f0, fhat);
  dft_rows_inplace(gf, false);
  for (std::size_t i = 0; i < gy.size(); ++i) gy.data()[i] += -w.tau_f * gf.data()[i];

  // pull k-space gradient back to the image and add the image term
  dft_cols_inplace(gy, true);
  dft_rows_inplace(gy, true);
  grad_xhat = l1_sign(x0, xhat);
  for (std::size_t i = 0; i < gy.size(); ++i) {
    grad_xhat.data()[i] = -grad_xhat.data()[i] + gy.data()[i];
  }
  grad_xhat.set_domain(Domain::Image);
  return loss;
}

}  // namespace pecs

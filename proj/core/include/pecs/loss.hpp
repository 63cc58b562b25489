#pragma once

#include "pecs/grid.hpp"

namespace pecs {

// Relative weights of the k-space and the two single-axis Fourier residual
// terms; the image term has unit weight.
struct LossWeights {
  double tau_k = 0.1;
  double tau_p = 0.3;
  double tau_f = 0.3;
};

// Multi-domain l1 training objective. With yhat = dft2d(xhat):
//   L =        sum |x0 - xhat|
//     + tau_k  sum |y0 - yhat|
//     + tau_p  sum |idft_pe(y0) - idft_pe(yhat)|
//     + tau_f  sum |idft_fe(y0) - idft_fe(yhat)|
// where |.| on a complex entry is |re| + |im|. x0 is the target image, y0
// its full k-space.
double loss_value(const ComplexGrid& x0, const ComplexGrid& y0, const ComplexGrid& xhat,
                  const LossWeights& w = {});

// Loss plus d(loss)/d(xhat), with the l1 subgradient at 0 taken as 0.
// Gradients are stored as d/d(re) + i d/d(im).
double loss_with_grad(const ComplexGrid& x0, const ComplexGrid& y0, const ComplexGrid& xhat,
                      const LossWeights& w, ComplexGrid& grad_xhat);

}  // namespace pecs

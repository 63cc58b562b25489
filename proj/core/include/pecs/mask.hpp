#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pecs/grid.hpp"

namespace pecs {

// Binary phase-encode sampling pattern over N lines. Line index 0 is the DC
// line and is always sampled.
struct Mask1D {
  int length = 0;
  std::vector<std::uint8_t> flags;  // one per line
  int sampled_count = 0;
  double reduction = 0.0;  // length / sampled_count (achieved, not requested)
  std::uint64_t seed = 0;
  double density_sigma = 0.0;
  int acs_lines = 0;

  bool is_sampled(int line) const { return flags[static_cast<std::size_t>(line)] != 0; }
  std::vector<int> sampled_indices() const;
};

double default_density_sigma(int n);  // n/6
int default_acs_lines(int n);         // max(1, round(n/32))

// Variable-density random mask: exactly round(n/r) lines set, the `acs`
// centermost lines (offsets 0, +1, -1, +2, ... around DC) forced on, the
// rest drawn without replacement with weight exp(-d^2 / (2 sigma^2)), where
// d is the centered distance from DC. Draws are repeated inverse-CDF picks
// over the remaining lines in increasing line order, so the result is fully
// determined by (n, r, sigma, acs, seed).
//
// r = 1 yields the full mask. Infeasible budgets (round(n/r) < acs) and
// out-of-range parameters throw std::invalid_argument.
Mask1D gen_gaussian_mask(int n, double r, double sigma, int acs, std::uint64_t seed);

// Zero every unsampled phase-encode line; sampled lines are copied
// bit-identically. Idempotent.
ComplexGrid apply_mask(const ComplexGrid& y, const Mask1D& m);

// Point spread function of the 2D pattern induced by a 1D mask (mask row
// replicated across all columns): inverse 2D transform of the binary
// pattern, scaled to unit magnitude at the DC image position. Returned
// unshifted (peak at index (0,0)); centering is a display concern.
ComplexGrid psf(const Mask1D& m, int rows, int cols);

// Retrospective undersampling: y = mask(dft2d(x0) + eta) with eta i.i.d.
// complex Gaussian (each component sigma/sqrt(2)), generated row-major from
// the seed. noise_sigma = 0 reproduces exact retrospective undersampling.
ComplexGrid undersample(const ComplexGrid& x0, const Mask1D& m, double noise_sigma,
                        std::uint64_t seed);

// Text format: line 1 = N, line 2 = space-separated sorted sampled indices.
void write_mask(const Mask1D& m, const std::string& path);
Mask1D read_mask(const std::string& path);

}  // namespace pecs

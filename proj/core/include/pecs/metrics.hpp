#pragma once

#include <string>
#include <vector>

#include "pecs/grid.hpp"

namespace pecs {

// Peak signal-to-noise ratio between magnitude images with the peak fixed at
// 1.0 (inputs are normalised to [0,1], and a fixed peak keeps scores
// comparable across slices). Identical inputs report +infinity.
double psnr(const ComplexGrid& ref, const ComplexGrid& test);

// Mean local SSIM on magnitude images: 7x7 uniform window, C1 = (0.01)^2,
// C2 = (0.03)^2 with dynamic range 1.0, valid-position windows only (no
// padding). Requires both dimensions >= 7.
double ssim(const ComplexGrid& ref, const ComplexGrid& test);

struct SliceMetrics {
  std::string id;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  double psnr = 0.0;  // mean over slices
  double ssim = 0.0;
  std::vector<SliceMetrics> slices;
};

MetricReport evaluate_suite(const std::vector<ComplexGrid>& refs,
                            const std::vector<ComplexGrid>& tests);

}  // namespace pecs

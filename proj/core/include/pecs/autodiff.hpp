#pragma once

#include <vector>

#include "pecs/denoiser.hpp"
#include "pecs/grid.hpp"
#include "pecs/mask.hpp"
#include "pecs/model.hpp"

namespace pecs {

// Activation records for one column iteration: the back-projected residual
// direction (needed for the step-size gradient) and the denoiser trace.
struct PgIterTrace {
  Column step_dir;  // back-projection of the masked residual
  Cnn1dTrace cnn;
};

struct PgTape {
  std::vector<PgIterTrace> iters;
};

struct SweepTrace {
  std::vector<PgTape> columns;
};

struct OuterTrace {
  SweepTrace hybrid;
  SweepTrace image;
  Cnn2dTrace plane;
  bool has_plane = false;
};

// Everything recorded by one forward reconstruction that backward() needs.
struct ReconTape {
  std::vector<OuterTrace> outers;
  bool recorded = false;
};

// Reverse sweep through a recorded reconstruction. Returns parameter
// gradients shaped like `model`, given d(loss)/d(output image). Only CNN
// regularizers are differentiable; measurement data receives no gradient.
// Calling with an unrecorded tape is a usage error (std::logic_error).
ModelBundle backward(const ReconTape& tape, const ReconConfig& cfg, const ModelBundle& model,
                     const Mask1D& mask, const ComplexGrid& grad_xhat);

// Central-difference verification of backward() on a small unrolled model.
struct GradCheckReport {
  struct ClassStat {
    const char* name;
    double max_rel_err = 0.0;
    int count = 0;
  };
  std::vector<ClassStat> classes;
  double max_rel_err = 0.0;
  bool pass = false;
};

struct GradCheckOptions {
  int rows = 8;
  int cols = 4;
  double step = 1e-5;
  double tolerance = 1e-4;
  double tau_k = 0.1, tau_p = 0.3, tau_f = 0.3;
  // Test hook: adds a bounded perturbation to one analytic gradient so the
  // checker's failure path can be exercised.
  bool corrupt = false;
};

GradCheckReport grad_check(const ReconConfig& cfg, std::uint64_t seed,
                           const GradCheckOptions& opts = {});

}  // namespace pecs

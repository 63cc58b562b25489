#pragma once

#include <span>

#include "pecs/grid.hpp"
#include "pecs/mask.hpp"
#include "pecs/model.hpp"

namespace pecs {

struct PgTape;
struct SweepTrace;
struct ReconTape;

// Proximal-gradient recovery of one column from its masked 1D measurements
// v (zero off the sampled lines). Per module: residual in the column's
// Fourier space, back-projection, gradient step of size rho, then the
// module's denoiser. Runs one iteration per module, in order.
Column pg_1d(const Column& u0, const Column& v, const Mask1D& m,
             std::span<const Module1d> modules, PgTape* tape = nullptr);

// Column denoising sweep in the row-transformed (hybrid) domain: transforms
// rows, recovers every column against its k-space column, transforms back.
// Warm-started from the current estimate.
ComplexGrid hybrid_sweep(const ComplexGrid& x, const ComplexGrid& y, const Mask1D& m,
                         std::span<const Module1d> modules, SweepTrace* trace = nullptr,
                         int threads = 1);

// Column denoising sweep in the image domain: recovers every image column
// against the corresponding column of the row-inverse-transformed k-space.
ComplexGrid image_sweep(const ComplexGrid& x, const ComplexGrid& y, const Mask1D& m,
                        std::span<const Module1d> modules, SweepTrace* trace = nullptr,
                        int threads = 1);

// Hard data consistency: sampled k-space lines replaced by the measured
// ones. A projection (idempotent); exact on sampled lines.
ComplexGrid data_consistency(const ComplexGrid& x, const ComplexGrid& y, const Mask1D& m);

// Baseline estimate: inverse transform of the masked measurements.
ComplexGrid zero_fill(const ComplexGrid& y, const Mask1D& m);

// Full alternating reconstruction. Starting from the zero-filled image, each
// outer step runs the hybrid sweep, the image sweep, the 2D denoiser, then
// hard data consistency, so the returned image is always measurement-
// consistent. Column order and reductions are fixed, so single-threaded runs
// are bit-reproducible; `threads > 1` parallelises the per-column solves
// over disjoint columns.
ComplexGrid recon_am(const ComplexGrid& y, const Mask1D& m, const ReconConfig& cfg,
                     const ModelBundle& model, ReconTape* tape = nullptr, int threads = 1);

}  // namespace pecs

#pragma once

#include <cstdint>
#include <vector>

#include "pecs/grid.hpp"

namespace pecs {

// Axis-aligned ellipse before rotation; positions in (row, col) pixels.
struct Ellipse {
  double center_r = 0.0;
  double center_c = 0.0;
  double axis_r = 1.0;  // semi-axis along rows
  double axis_c = 1.0;  // semi-axis along columns
  double angle = 0.0;   // radians, counter-clockwise
  double intensity = 1.0;
};

enum class PhaseMode : std::uint8_t { Real = 0, SmoothPhase = 1 };

struct PhantomSpec {
  int rows = 64;
  int cols = 64;
  std::vector<Ellipse> ellipses;
  int plateau_count = 0;  // piecewise-constant background along rows
  PhaseMode phase_mode = PhaseMode::Real;
  std::uint64_t seed = 0;
};

// Superposed ellipses plus an optional per-column plateau background,
// magnitude normalised so the maximum is exactly 1 (empty content stays
// zero). SmoothPhase multiplies by a gentle seeded phase ramp. Deterministic
// under the spec. Degenerate ellipse axes throw std::invalid_argument.
ComplexGrid gen_phantom(const PhantomSpec& spec);

// Randomised spec for dataset assembly: 3-6 ellipses, occasional plateaus,
// smooth phase. Deterministic under the seed.
PhantomSpec random_phantom_spec(int rows, int cols, std::uint64_t seed);

// Convenience: a seeded suite of random phantoms (index i uses sub-seed i).
std::vector<ComplexGrid> phantom_suite(int rows, int cols, int count, std::uint64_t seed);

}  // namespace pecs

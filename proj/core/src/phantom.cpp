#include "pecs/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pecs/rng.hpp"

namespace pecs {

ComplexGrid gen_phantom(const PhantomSpec& spec) {
  if (spec.rows < 8 || spec.cols < 8) {
    throw std::invalid_argument("gen_phantom: need at least an 8x8 canvas");
  }
  for (const auto& e : spec.ellipses) {
    if (e.axis_r <= 0.0 || e.axis_c <= 0.0) {
      throw std::invalid_argument("gen_phantom: degenerate ellipse axes");
    }
  }

  const int rows = spec.rows;
  const int cols = spec.cols;
  std::vector<double> mag(static_cast<std::size_t>(rows) * cols, 0.0);

  for (const auto& e : spec.ellipses) {
    const double ct = std::cos(e.angle);
    const double st = std::sin(e.angle);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double dr = r - e.center_r;
        const double dc = c - e.center_c;
        const double u = ct * dr + st * dc;
        const double v = -st * dr + ct * dc;
        const double q = (u / e.axis_r) * (u / e.axis_r) + (v / e.axis_c) * (v / e.axis_c);
        if (q <= 1.0) mag[static_cast<std::size_t>(r) * cols + c] += e.intensity;
      }
    }
  }

  if (spec.plateau_count > 0) {
    Xoshiro256ss rng(sub_seed(spec.seed, SeedPurpose::Phantom, 1));
    // plateau boundaries along the row axis, identical for every column
    std::vector<int> breaks;
    for (int i = 0; i < spec.plateau_count - 1; ++i) {
      breaks.push_back(1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(rows - 1)));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(rows);
    std::vector<double> levels(breaks.size());
    for (auto& l : levels) l = rng.uniform(0.0, 0.5);
    int seg = 0;
    for (int r = 0; r < rows; ++r) {
      while (r >= breaks[seg]) ++seg;
      for (int c = 0; c < cols; ++c) mag[static_cast<std::size_t>(r) * cols + c] += levels[seg];
    }
  }

  const double peak = *std::max_element(mag.begin(), mag.end());
  if (peak > 0.0) {
    for (auto& v : mag) v /= peak;
  }

  ComplexGrid out(rows, cols, Domain::Image);
  if (spec.phase_mode == PhaseMode::SmoothPhase) {
    Xoshiro256ss rng(sub_seed(spec.seed, SeedPurpose::Phantom, 2));
    const double a = rng.uniform(-0.5, 0.5);
    const double b = rng.uniform(-0.5, 0.5);
    const double c2 = rng.uniform(-0.5, 0.5);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double phase = 2.0 * M_PI *
                             (a * r / rows + b * c / cols +
                              c2 * std::sin(2.0 * M_PI * r / rows) * std::sin(2.0 * M_PI * c / cols) * 0.25);
        out(r, c) = std::polar(mag[static_cast<std::size_t>(r) * cols + c], phase);
      }
    }
  } else {
    for (std::size_t i = 0; i < mag.size(); ++i) out.data()[i] = cdouble{mag[i], 0.0};
  }
  return out;
}

PhantomSpec random_phantom_spec(int rows, int cols, std::uint64_t seed) {
  PhantomSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.seed = seed;
  spec.phase_mode = PhaseMode::SmoothPhase;

  Xoshiro256ss rng(sub_seed(seed, SeedPurpose::Phantom, 0));
  const int n_ellipses = 3 + static_cast<int>(rng.next() % 4);
  for (int i = 0; i < n_ellipses; ++i) {
    Ellipse e;
    e.center_r = rng.uniform(0.2, 0.8) * rows;
    e.center_c = rng.uniform(0.2, 0.8) * cols;
    e.axis_r = rng.uniform(0.06, 0.35) * rows;
    e.axis_c = rng.uniform(0.06, 0.35) * cols;
    e.angle = rng.uniform(0.0, M_PI);
    e.intensity = rng.uniform(0.25, 1.0);
    spec.ellipses.push_back(e);
  }
  if (rng.uniform() < 0.5) {
    spec.plateau_count = 2 + static_cast<int>(rng.next() % 3);
  }
  return spec;
}

std::vector<ComplexGrid> phantom_suite(int rows, int cols, int count, std::uint64_t seed) {
  std::vector<ComplexGrid> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(gen_phantom(random_phantom_spec(rows, cols, sub_seed(seed, SeedPurpose::Phantom, i))));
  }
  return out;
}

}  // namespace pecs

// Shared fixtures for the unit and acceptance suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pecs/grid.hpp"
#include "pecs/mask.hpp"
#include "pecs/model.hpp"
#include "pecs/rng.hpp"

namespace helpers {

using pecs::cdouble;
using pecs::Column;

// Piecewise-constant real column: 2-4 plateaus of width >= 6 with adjacent
// levels separated by >= 0.25, all in [0, 1]. Seeded and frozen; the TV
// recovery floors below were measured on exactly this generator.
inline Column plateau_column(int n, std::uint64_t seed) {
  pecs::Xoshiro256ss rng(seed);
  const int plateaus = 2 + static_cast<int>(rng.next() % 3);
  const int min_w = 6;
  std::vector<int> breaks;
  for (int attempt = 0; static_cast<int>(breaks.size()) < plateaus - 1 && attempt < 1000;
       ++attempt) {
    const int b = min_w + static_cast<int>(rng.next() % (n - 2 * min_w));
    bool ok = true;
    for (int e : breaks) {
      if (std::abs(e - b) < min_w) ok = false;
    }
    if (ok) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(n);
  Column c(n);
  int seg = 0;
  double level = rng.uniform(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    while (i >= breaks[seg]) {
      ++seg;
      double next_level = rng.uniform(0.0, 1.0);
      while (std::abs(next_level - level) < 0.25) next_level = rng.uniform(0.0, 1.0);
      level = next_level;
    }
    c[i] = cdouble{level, 0.0};
  }
  return c;
}

inline pecs::ComplexGrid col_as_grid(const Column& c) {
  return pecs::ComplexGrid(static_cast<int>(c.size()), 1, pecs::Domain::Image, c);
}

// Masked 1D measurements of a ground-truth column.
inline Column column_measurements(const Column& truth, const pecs::Mask1D& m) {
  Column v = pecs::dft_pe_1d(truth);
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    if (!m.is_sampled(i)) v[i] = cdouble{0.0, 0.0};
  }
  return v;
}

inline std::vector<pecs::Module1d> tv_modules(int count, double lambda, double step = 1.0) {
  std::vector<pecs::Module1d> mods(count);
  for (auto& m : mods) {
    m.kind = pecs::Reg1d::Tv;
    m.tv_lambda = lambda;
    m.tv_step = step;
  }
  return mods;
}

}  // namespace helpers

#include "pecs/mask.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pecs/rng.hpp"

namespace pecs {

namespace {

// Centered offset of a line index: DC maps to 0, the upper half of the
// spectrum to negative offsets.
int centered_offset(int line, int n) {
  return line < (n + 1) / 2 ? line : line - n;
}

// Enumerates line indices from the center outwards: offsets 0, +1, -1,
// +2, -2, ... (positive side first). Covers all n lines exactly once.
std::vector<int> center_out_order(int n) {
  std::vector<int> order;
  order.reserve(n);
  order.push_back(0);
  for (int k = 1; static_cast<int>(order.size()) < n; ++k) {
    const int up = k % n;
    if (static_cast<int>(order.size()) < n) order.push_back(up);
    const int down = (n - k) % n;
    if (down != up && static_cast<int>(order.size()) < n) order.push_back(down);
  }
  return order;
}

}  // namespace

std::vector<int> Mask1D::sampled_indices() const {
  std::vector<int> idx;
  idx.reserve(sampled_count);
  for (int i = 0; i < length; ++i) {
    if (flags[i]) idx.push_back(i);
  }
  return idx;
}

double default_density_sigma(int n) { return static_cast<double>(n) / 6.0; }

int default_acs_lines(int n) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(n) / 32.0)));
}

Mask1D gen_gaussian_mask(int n, double r, double sigma, int acs, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("gen_gaussian_mask: need n >= 4");
  if (r < 1.0) throw std::invalid_argument("gen_gaussian_mask: reduction must be >= 1");
  if (acs < 1 || acs > n) {
    throw std::invalid_argument("gen_gaussian_mask: acs must be in [1, n]");
  }
  const int budget = static_cast<int>(std::lround(static_cast<double>(n) / r));
  if (budget < acs) {
    throw std::invalid_argument("gen_gaussian_mask: budget round(n/r)=" +
                                std::to_string(budget) + " smaller than acs=" +
                                std::to_string(acs));
  }

  Mask1D m;
  m.length = n;
  m.flags.assign(n, 0);
  m.seed = seed;
  m.density_sigma = sigma;
  m.acs_lines = acs;

  const std::vector<int> order = center_out_order(n);
  for (int i = 0; i < acs; ++i) m.flags[order[i]] = 1;

  int remaining = budget - acs;
  if (remaining > 0) {
    if (sigma <= 0.0) {
      throw std::invalid_argument("gen_gaussian_mask: sigma must be > 0 when random draws are needed");
    }
    std::vector<double> weight(n, 0.0);
    for (int line = 0; line < n; ++line) {
      const double d = static_cast<double>(centered_offset(line, n));
      weight[line] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    Xoshiro256ss rng(seed);
    while (remaining > 0) {
      double total = 0.0;
      for (int line = 0; line < n; ++line) {
        if (!m.flags[line]) total += weight[line];
      }
      const double threshold = rng.uniform() * total;
      double acc = 0.0;
      int picked = -1;
      for (int line = 0; line < n; ++line) {
        if (m.flags[line]) continue;
        acc += weight[line];
        if (acc > threshold) {
          picked = line;
          break;
        }
      }
      if (picked < 0) {  // fp round-off on the last bin
        for (int line = n - 1; line >= 0; --line) {
          if (!m.flags[line]) {
            picked = line;
            break;
          }
        }
      }
      m.flags[picked] = 1;
      --remaining;
    }
  }

  m.sampled_count = static_cast<int>(std::count(m.flags.begin(), m.flags.end(), 1));
  m.reduction = static_cast<double>(n) / m.sampled_count;
  return m;
}

ComplexGrid apply_mask(const ComplexGrid& y, const Mask1D& m) {
  if (y.rows() != m.length) {
    throw std::invalid_argument("apply_mask: grid has " + std::to_string(y.rows()) +
                                " rows but mask covers " + std::to_string(m.length));
  }
  ComplexGrid out = y;
  for (int r = 0; r < y.rows(); ++r) {
    if (m.is_sampled(r)) continue;
    for (int c = 0; c < y.cols(); ++c) out(r, c) = cdouble{0.0, 0.0};
  }
  return out;
}

ComplexGrid psf(const Mask1D& m, int rows, int cols) {
  if (m.length != rows) {
    throw std::invalid_argument("psf: mask length does not match requested rows");
  }
  ComplexGrid pattern(rows, cols, Domain::KSpace);
  for (int r = 0; r < rows; ++r) {
    if (!m.is_sampled(r)) continue;
    for (int c = 0; c < cols; ++c) pattern(r, c) = cdouble{1.0, 0.0};
  }
  ComplexGrid img = idft2d(pattern);
  const double peak = std::abs(img(0, 0));
  if (peak > 0.0) {
    for (auto& v : img.data()) v /= peak;
  }
  return img;
}

ComplexGrid undersample(const ComplexGrid& x0, const Mask1D& m, double noise_sigma,
                        std::uint64_t seed) {
  ComplexGrid y = dft2d(x0);
  if (noise_sigma > 0.0) {
    Xoshiro256ss rng(seed);
    const double component_sigma = noise_sigma / std::sqrt(2.0);
    for (auto& v : y.data()) {
      const auto [re, im] = rng.gaussian_pair();
      v += cdouble{re * component_sigma, im * component_sigma};
    }
  }
  return apply_mask(y, m);
}

void write_mask(const Mask1D& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_mask: cannot open " + path);
  out << m.length << "\n";
  const auto idx = m.sampled_indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out << ' ';
    out << idx[i];
  }
  out << "\n";
  if (!out) throw std::runtime_error("write_mask: write failed for " + path);
}

Mask1D read_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_mask: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_mask: missing length line");
  int n = 0;
  try {
    n = std::stoi(line);
  } catch (const std::exception&) {
    throw std::runtime_error("read_mask: malformed length line in " + path);
  }
  if (n < 1) throw std::runtime_error("read_mask: non-positive length in " + path);

  Mask1D m;
  m.length = n;
  m.flags.assign(n, 0);
  if (!std::getline(in, line)) throw std::runtime_error("read_mask: missing index line");
  std::istringstream iss(line);
  int prev = -1;
  int idx = 0;
  while (iss >> idx) {
    if (idx < 0 || idx >= n) {
      throw std::runtime_error("read_mask: index " + std::to_string(idx) +
                               " outside [0, " + std::to_string(n) + ")");
    }
    if (idx <= prev) throw std::runtime_error("read_mask: indices must be sorted and unique");
    m.flags[idx] = 1;
    prev = idx;
    ++m.sampled_count;
  }
  if (m.sampled_count == 0) throw std::runtime_error("read_mask: no sampled indices");
  m.reduction = static_cast<double>(n) / m.sampled_count;
  return m;
}

}  // namespace pecs

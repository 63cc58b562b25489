#include "pecs/fft.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace pecs {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Half-length twiddle table for a power-of-two transform:
// w[j] = exp(-2*pi*i*j/n), j in [0, n/2).
const std::vector<cdouble>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<cdouble>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cdouble> w(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang = -2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    w[j] = {std::cos(ang), std::sin(ang)};
  }
  return cache.emplace(n, std::move(w)).first->second;
}

// Iterative radix-2 Cooley-Tukey, no scaling. inverse=true conjugates the
// twiddles (positive-exponent kernel).
void fft_pow2(cdouble* a, std::size_t n, bool inverse) {
  if (n <= 1) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cdouble tw = w[j * stride];
        if (inverse) tw = std::conj(tw);
        const cdouble u = a[start + j];
        const cdouble v = a[start + j + len / 2] * tw;
        a[start + j] = u + v;
        a[start + j + len / 2] = u - v;
      }
    }
  }
}

struct BluesteinPlan {
  std::size_t m = 0;               // padded power-of-two length >= 2n-1
  std::vector<cdouble> chirp;      // exp(-i*pi*k^2/n), k in [0, n)
  std::vector<cdouble> kernel_ft;  // forward FFT of the chirp-cancelling kernel
};

// k^2 mod 2n keeps the chirp argument small so cos/sin stay accurate for
// large k.
const BluesteinPlan& bluestein_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  BluesteinPlan plan;
  plan.m = next_pow2(2 * n - 1);
  plan.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = -M_PI * static_cast<double>(k2) / static_cast<double>(n);
    plan.chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cdouble> b(plan.m, cdouble{0.0, 0.0});
  b[0] = std::conj(plan.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = std::conj(plan.chirp[k]);
    b[plan.m - k] = std::conj(plan.chirp[k]);
  }
  fft_pow2(b.data(), plan.m, false);
  plan.kernel_ft = std::move(b);
  return cache.emplace(n, std::move(plan)).first->second;
}

// Arbitrary-length DFT via chirp-z: a circular convolution of chirp-modulated
// input with the conjugate chirp, evaluated with power-of-two FFTs.
void fft_bluestein(cdouble* data, std::size_t n, bool inverse) {
  const BluesteinPlan& plan = bluestein_plan(n);
  std::vector<cdouble> a(plan.m, cdouble{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble c = inverse ? std::conj(plan.chirp[k]) : plan.chirp[k];
    a[k] = data[k] * c;
  }
  fft_pow2(a.data(), plan.m, false);
  if (inverse) {
    for (std::size_t k = 0; k < plan.m; ++k) a[k] *= std::conj(plan.kernel_ft[k]);
  } else {
    for (std::size_t k = 0; k < plan.m; ++k) a[k] *= plan.kernel_ft[k];
  }
  fft_pow2(a.data(), plan.m, true);
  const double inv_m = 1.0 / static_cast<double>(plan.m);
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble c = inverse ? std::conj(plan.chirp[k]) : plan.chirp[k];
    data[k] = a[k] * inv_m * c;
  }
}

}  // namespace

void unitary_dft(std::span<cdouble> data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("unitary_dft: empty input");
  if (n == 1) return;  // 1/sqrt(1) scaling is a no-op
  if (is_pow2(n)) {
    fft_pow2(data.data(), n, inverse);
  } else {
    fft_bluestein(data.data(), n, inverse);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : data) v *= scale;
}

}  // namespace pecs

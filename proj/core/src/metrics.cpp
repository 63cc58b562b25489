#include "pecs/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pecs {

namespace {

void check_same_shape(const ComplexGrid& a, const ComplexGrid& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(who) + ": shapes disagree");
  }
}

constexpr int kWindow = 7;
constexpr double kC1 = 0.01 * 0.01;  // (0.01 * L)^2 with L = 1
constexpr double kC2 = 0.03 * 0.03;

}  // namespace

double psnr(const ComplexGrid& ref, const ComplexGrid& test) {
  check_same_shape(ref, test, "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = std::abs(ref.data()[i]) - std::abs(test.data()[i]);
    mse += d * d;
  }
  mse /= static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

double ssim(const ComplexGrid& ref, const ComplexGrid& test) {
  check_same_shape(ref, test, "ssim");
  const int rows = ref.rows();
  const int cols = ref.cols();
  if (rows < kWindow || cols < kWindow) {
    throw std::invalid_argument("ssim: image smaller than the 7x7 window");
  }

  std::vector<double> a(ref.size()), b(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    a[i] = std::abs(ref.data()[i]);
    b[i] = std::abs(test.data()[i]);
  }

  const double inv_n = 1.0 / (kWindow * kWindow);
  double acc = 0.0;
  int windows = 0;
  for (int r0 = 0; r0 + kWindow <= rows; ++r0) {
    for (int c0 = 0; c0 + kWindow <= cols; ++c0) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int r = r0; r < r0 + kWindow; ++r) {
        for (int c = c0; c < c0 + kWindow; ++c) {
          const double va = a[static_cast<std::size_t>(r) * cols + c];
          const double vb = b[static_cast<std::size_t>(r) * cols + c];
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      }
      const double mu_a = sa * inv_n;
      const double mu_b = sb * inv_n;
      const double var_a = saa * inv_n - mu_a * mu_a;
      const double var_b = sbb * inv_n - mu_b * mu_b;
      const double cov = sab * inv_n - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      acc += num / den;
      ++windows;
    }
  }
  return acc / windows;
}

MetricReport evaluate_suite(const std::vector<ComplexGrid>& refs,
                            const std::vector<ComplexGrid>& tests) {
  if (refs.size() != tests.size()) {
    throw std::invalid_argument("evaluate_suite: counts disagree");
  }
  if (refs.empty()) throw std::invalid_argument("evaluate_suite: empty suite");
  MetricReport report;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    SliceMetrics s;
    s.id = std::to_string(i);
    s.psnr = psnr(refs[i], tests[i]);
    s.ssim = ssim(refs[i], tests[i]);
    report.slices.push_back(s);
    report.psnr += s.psnr;
    report.ssim += s.ssim;
  }
  report.psnr /= static_cast<double>(refs.size());
  report.ssim /= static_cast<double>(refs.size());
  return report;
}

}  // namespace pecs

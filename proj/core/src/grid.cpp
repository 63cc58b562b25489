#include "pecs/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace pecs {

namespace {

void check_shape(int rows, int cols) {
  if (rows < 2 || cols < 1) {
    throw std::invalid_argument("ComplexGrid: need rows >= 2 and cols >= 1, got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
}

[[noreturn]] void no_successor(const char* op, Domain d) {
  throw std::invalid_argument(std::string(op) + ": no legal successor from domain " +
                              domain_name(d));
}

}  // namespace

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::Image: return "Image";
    case Domain::KSpace: return "KSpace";
    case Domain::HybridF: return "HybridF";
    case Domain::HybridP: return "HybridP";
  }
  return "?";
}

ComplexGrid::ComplexGrid(int rows, int cols, Domain domain)
    : rows_(rows), cols_(cols), domain_(domain) {
  check_shape(rows, cols);
  data_.assign(static_cast<std::size_t>(rows) * cols, cdouble{0.0, 0.0});
}

ComplexGrid::ComplexGrid(int rows, int cols, Domain domain, std::vector<cdouble> values)
    : rows_(rows), cols_(cols), domain_(domain), data_(std::move(values)) {
  check_shape(rows, cols);
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("ComplexGrid: data length does not match rows*cols");
  }
}

void dft_cols_inplace(ComplexGrid& g, bool inverse) {
  const int n = g.rows();
  const int m = g.cols();
  std::vector<cdouble> scratch(n);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < n; ++r) scratch[r] = g(r, c);
    unitary_dft(scratch, inverse);
    for (int r = 0; r < n; ++r) g(r, c) = scratch[r];
  }
}

void dft_rows_inplace(ComplexGrid& g, bool inverse) {
  const int m = g.cols();
  for (int r = 0; r < g.rows(); ++r) {
    unitary_dft(std::span<cdouble>(g.data().data() + static_cast<std::size_t>(r) * m, m),
                inverse);
  }
}

ComplexGrid dft_pe(const ComplexGrid& g) {
  ComplexGrid out = g;
  switch (g.domain()) {
    case Domain::Image: out.set_domain(Domain::HybridP); break;
    case Domain::HybridF: out.set_domain(Domain::KSpace); break;
    default: no_successor("dft_pe", g.domain());
  }
  dft_cols_inplace(out, false);
  return out;
}

ComplexGrid idft_pe(const ComplexGrid& g) {
  ComplexGrid out = g;
  switch (g.domain()) {
    case Domain::HybridP: out.set_domain(Domain::Image); break;
    case Domain::KSpace: out.set_domain(Domain::HybridF); break;
    default: no_successor("idft_pe", g.domain());
  }
  dft_cols_inplace(out, true);
  return out;
}

ComplexGrid dft_fe(const ComplexGrid& g) {
  ComplexGrid out = g;
  switch (g.domain()) {
    case Domain::Image: out.set_domain(Domain::HybridF); break;
    case Domain::HybridP: out.set_domain(Domain::KSpace); break;
    default: no_successor("dft_fe", g.domain());
  }
  dft_rows_inplace(out, false);
  return out;
}

ComplexGrid idft_fe(const ComplexGrid& g) {
  ComplexGrid out = g;
  switch (g.domain()) {
    case Domain::HybridF: out.set_domain(Domain::Image); break;
    case Domain::KSpace: out.set_domain(Domain::HybridP); break;
    default: no_successor("idft_fe", g.domain());
  }
  dft_rows_inplace(out, true);
  return out;
}

ComplexGrid dft2d(const ComplexGrid& g) { return dft_pe(dft_fe(g)); }

ComplexGrid idft2d(const ComplexGrid& g) { return idft_fe(idft_pe(g)); }

Column dft_pe_1d(const Column& c) {
  Column out = c;
  unitary_dft(out, false);
  return out;
}

Column idft_pe_1d(const Column& c) {
  Column out = c;
  unitary_dft(out, true);
  return out;
}

Column get_column(const ComplexGrid& g, int i) {
  if (i < 0 || i >= g.cols()) {
    throw std::out_of_range("get_column: index " + std::to_string(i) + " outside [0, " +
                            std::to_string(g.cols()) + ")");
  }
  Column out(g.rows());
  for (int r = 0; r < g.rows(); ++r) out[r] = g(r, i);
  return out;
}

ComplexGrid set_column(ComplexGrid g, int i, const Column& c) {
  if (i < 0 || i >= g.cols()) {
    throw std::out_of_range("set_column: index " + std::to_string(i) + " outside [0, " +
                            std::to_string(g.cols()) + ")");
  }
  if (static_cast<int>(c.size()) != g.rows()) {
    throw std::invalid_argument("set_column: column length does not match grid rows");
  }
  for (int r = 0; r < g.rows(); ++r) g(r, i) = c[r];
  return g;
}

double norm_l2(const ComplexGrid& g) {
  double acc = 0.0;
  for (const auto& v : g.data()) acc += std::norm(v);
  return std::sqrt(acc);
}

}  // namespace pecs

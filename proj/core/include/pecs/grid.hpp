#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pecs/fft.hpp"

namespace pecs {

// Where a grid currently lives. Image is fully spatial, KSpace fully
// Fourier; the two hybrid tags mark grids transformed along exactly one
// axis (HybridF: rows transformed, HybridP: columns transformed).
enum class Domain : std::uint8_t {
  Image = 0,
  KSpace = 1,
  HybridF = 2,
  HybridP = 3,
};

const char* domain_name(Domain d);

// N x M complex raster, row-major. Rows index the phase-encode axis (the
// undersampled one), columns the frequency-encode axis. Transposed
// acquisitions are expected to be transposed at ingestion, never inside the
// solver.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(int rows, int cols, Domain domain);
  ComplexGrid(int rows, int cols, Domain domain, std::vector<cdouble> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  cdouble& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const cdouble& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::vector<cdouble>& data() { return data_; }
  const std::vector<cdouble>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  Domain domain_ = Domain::Image;
  std::vector<cdouble> data_;
};

// A single phase-encode line extracted at one frequency-encode index;
// length equals the parent grid's row count.
using Column = std::vector<cdouble>;

// Unitary transforms along one axis, advancing the domain tag. A transform
// with no legal successor (e.g. the column transform applied to a grid whose
// columns are already in Fourier space) throws std::invalid_argument.
//
// Tag transitions:
//   dft_pe: Image -> HybridP,  HybridF -> KSpace   (columns, length N)
//   dft_fe: Image -> HybridF,  HybridP -> KSpace   (rows,    length M)
// and the inverses reverse these.
ComplexGrid dft_pe(const ComplexGrid& g);
ComplexGrid idft_pe(const ComplexGrid& g);
ComplexGrid dft_fe(const ComplexGrid& g);
ComplexGrid idft_fe(const ComplexGrid& g);

// Full 2D transforms, defined by composition: dft2d = dft_pe(dft_fe(g)).
ComplexGrid dft2d(const ComplexGrid& g);
ComplexGrid idft2d(const ComplexGrid& g);

// Unitary length-N transform of one extracted column.
Column dft_pe_1d(const Column& c);
Column idft_pe_1d(const Column& c);

// Column access. Out-of-range index throws std::out_of_range.
Column get_column(const ComplexGrid& g, int i);
ComplexGrid set_column(ComplexGrid g, int i, const Column& c);

// Axis transforms without domain-tag bookkeeping. These are the raw kernels
// behind the tagged API; gradient propagation needs them because gradient
// grids do not carry meaningful tags.
void dft_cols_inplace(ComplexGrid& g, bool inverse);
void dft_rows_inplace(ComplexGrid& g, bool inverse);

double norm_l2(const ComplexGrid& g);

}  // namespace pecs

#include <doctest.h>

#include "oracles.hpp"
#include "pecs/grid.hpp"

using namespace pecs;

TEST_CASE("unit delta column transforms to a constant") {
  Column c{cdouble{1, 0}, cdouble{0, 0}, cdouble{0, 0}, cdouble{0, 0}};
  Column f = dft_pe_1d(c);
  for (const auto& v : f) {
    CHECK(v.real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("column transform round trip and Parseval") {
  ComplexGrid g = oracle::random_grid(16, 16, 11);
  ComplexGrid back = idft_pe(dft_pe(g));
  CHECK(oracle::grid_rel_err(back, g) <= 1e-12);
  CHECK(back.domain() == Domain::Image);

  ComplexGrid h = oracle::random_grid(32, 8, 12);
  CHECK(oracle::rel_err(norm_l2(dft_pe(h)), norm_l2(h)) <= 1e-12);
  CHECK(oracle::rel_err(norm_l2(dft_fe(h)), norm_l2(h)) <= 1e-12);
}

TEST_CASE("row transform round trip and axis commutation") {
  ComplexGrid g = oracle::random_grid(12, 20, 13);
  CHECK(oracle::grid_rel_err(idft_fe(dft_fe(g)), g) <= 1e-12);

  ComplexGrid ab = dft_pe(dft_fe(g));
  ComplexGrid ba = dft_fe(dft_pe(g));
  CHECK(oracle::grid_rel_err(ab, ba) <= 1e-12);
  CHECK(ab.domain() == Domain::KSpace);
  CHECK(ba.domain() == Domain::KSpace);
}

TEST_CASE("2D transform matches the direct double-sum oracle") {
  ComplexGrid g = oracle::random_grid(8, 8, 14);
  ComplexGrid fast = dft2d(g);
  ComplexGrid direct = oracle::dft2d_direct(g);
  CHECK(oracle::grid_rel_err(fast, direct) <= 1e-9);
}

TEST_CASE("non-power-of-two lengths agree with the direct 1D oracle") {
  for (int n : {3, 5, 6, 7, 12, 15, 31, 100}) {
    Column c = oracle::random_column(n, 100 + n);
    Column fast = dft_pe_1d(c);
    Column direct = oracle::dft1d_direct(c, false);
    double err = 0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(fast[i] - direct[i]));
    CHECK(err <= 1e-10);
    Column round = idft_pe_1d(fast);
    for (int i = 0; i < n; ++i) CHECK(std::abs(round[i] - c[i]) <= 1e-12);
  }
}

TEST_CASE("unitarity holds on random shapes including odd sizes") {
  const int shapes[][2] = {{2, 1}, {5, 3}, {16, 16}, {31, 17}, {128, 128}};
  std::uint64_t seed = 900;
  for (const auto& s : shapes) {
    ComplexGrid g = oracle::random_grid(s[0], s[1], seed++);
    CHECK(oracle::grid_rel_err(idft2d(dft2d(g)), g) <= 1e-12);
    CHECK(oracle::rel_err(norm_l2(dft2d(g)), norm_l2(g)) <= 1e-12);
  }
}

TEST_CASE("column identities relate image and k-space columns") {
  ComplexGrid x = oracle::random_grid(24, 10, 21);
  ComplexGrid y = dft2d(x);

  ComplexGrid lhs3 = idft_fe(y);   // row-inverse of k-space
  ComplexGrid lhs4 = idft_pe(y);   // column-inverse of k-space
  ComplexGrid rhs4 = dft_fe(x);
  for (int i = 0; i < x.cols(); ++i) {
    Column a = get_column(lhs3, i);
    Column b = dft_pe_1d(get_column(x, i));
    double err = 0, mag = 0;
    for (int r = 0; r < x.rows(); ++r) {
      err += std::norm(a[r] - b[r]);
      mag += std::norm(b[r]);
    }
    CHECK(std::sqrt(err) <= 1e-10 * std::max(1.0, std::sqrt(mag)));

    Column c = get_column(lhs4, i);
    Column d = get_column(rhs4, i);
    err = 0;
    for (int r = 0; r < x.rows(); ++r) err += std::norm(c[r] - d[r]);
    CHECK(std::sqrt(err) <= 1e-10);
  }
}

TEST_CASE("get/set column round trip leaves the grid unchanged") {
  ComplexGrid g = oracle::random_grid(9, 7, 31);
  ComplexGrid h = set_column(g, 3, get_column(g, 3));
  CHECK(oracle::grid_rel_err(h, g) == 0.0);

  CHECK_THROWS_AS(get_column(g, -1), std::out_of_range);
  CHECK_THROWS_AS(get_column(g, 7), std::out_of_range);
  CHECK_THROWS_AS(set_column(g, 9, get_column(g, 0)), std::out_of_range);
}

TEST_CASE("domain tags advance and reject illegal successors") {
  ComplexGrid img = oracle::random_grid(8, 8, 41);
  CHECK(dft_pe(img).domain() == Domain::HybridP);
  CHECK(dft_fe(img).domain() == Domain::HybridF);
  CHECK(dft_fe(dft_pe(img)).domain() == Domain::KSpace);

  ComplexGrid k = dft2d(img);
  CHECK(idft_pe(k).domain() == Domain::HybridF);
  CHECK(idft_fe(k).domain() == Domain::HybridP);

  CHECK_THROWS_AS(dft_pe(dft_pe(img)), std::invalid_argument);
  CHECK_THROWS_AS(idft_pe(img), std::invalid_argument);
  CHECK_THROWS_AS(dft_fe(k), std::invalid_argument);
  CHECK_THROWS_AS(idft_fe(img), std::invalid_argument);
}

TEST_CASE("grid construction rejects bad shapes") {
  CHECK_THROWS_AS(ComplexGrid(1, 4, Domain::Image), std::invalid_argument);
  CHECK_THROWS_AS(ComplexGrid(4, 0, Domain::Image), std::invalid_argument);
  CHECK_THROWS_AS(ComplexGrid(4, 4, Domain::Image, std::vector<cdouble>(3)),
                  std::invalid_argument);
}

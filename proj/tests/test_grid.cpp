#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fkge/grid.hpp"

using namespace fkge;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Complex> sample_1d(const GridPtr& grid, auto&& fn) {
  std::vector<Complex> v(grid->total_modes());
  for (int j = 0; j < grid->axis(0).n; ++j) v[static_cast<std::size_t>(j)] = fn(grid->node(0, j));
  return v;
}

double psi0_511(double x) {
  const double c = std::cos(x);
  return 3.0 / (2.0 + c * c);
}

SpectralField random_field(const GridPtr& grid, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SpectralField f(grid);
  for (auto& c : f.coef()) c = Complex(unif(rng), unif(rng));
  return f;
}

// Direct O(N^2) summation of the interpolation coefficients; independent of
// the FFT path under test.
std::vector<Complex> direct_coefficients(const std::vector<double>& values, double a, double b) {
  const int n = static_cast<int>(values.size());
  std::vector<Complex> coef(values.size());
  for (int l = -n / 2; l < n / 2; ++l) {
    const double mu = kTwoPi * l / (b - a);
    Complex sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double xj = a + (b - a) * j / n;
      sum += values[static_cast<std::size_t>(j)] * std::polar(1.0, -mu * (xj - a));
    }
    coef[static_cast<std::size_t>((l + n) % n)] = sum / static_cast<double>(n);
  }
  return coef;
}

}  // namespace

TEST_CASE("forward transform: constant field has only the zero mode") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const Complex c(2.5, -0.75);
  std::vector<Complex> values(grid->total_modes(), c);
  const auto f = forward_transform(std::span<const Complex>(values), grid);
  CHECK(std::abs(f.mode(0) - c) < 1e-14);
  for (int l = -8; l < 8; ++l) {
    if (l != 0) CHECK(std::abs(f.mode(l)) < 1e-14);
  }
}

TEST_CASE("forward transform: a single exponential mode is exact") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const auto values = sample_1d(grid, [](double x) { return std::polar(1.0, x); });
  const auto f = forward_transform(std::span<const Complex>(values), grid);
  CHECK(std::abs(f.mode(1) - 1.0) < 1e-14);
  for (int l = -8; l < 8; ++l) {
    if (l != 1) CHECK(std::abs(f.mode(l)) < 1e-13);
  }
}

TEST_CASE("transform roundtrip reproduces sampled smooth data") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 32);
  const auto values = sample_1d(grid, [](double x) { return Complex(psi0_511(x), 0.0); });
  const auto f = forward_transform(std::span<const Complex>(values), grid);
  const auto back = inverse_transform(f);
  for (std::size_t j = 0; j < values.size(); ++j)
    CHECK(std::abs(back[j] - values[j]) <= 1e-13);
}

TEST_CASE("inverse transform: elementary coefficient sets") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  SpectralField f(grid);
  f.mode(0) = 5.0;
  for (const auto& v : inverse_transform(f)) CHECK(std::abs(v - 5.0) < 1e-13);

  SpectralField g(grid);
  g.mode(2) = 1.0;
  const auto values = inverse_transform(g);
  for (int j = 0; j < 16; ++j) {
    const Complex want = std::polar(1.0, 2.0 * grid->node(0, j));
    CHECK(std::abs(values[static_cast<std::size_t>(j)] - want) < 1e-13);
  }
}

TEST_CASE("roundtrip identity on random Hermitian coefficient sets") {
  std::mt19937 rng(7u);
  const auto grid = SpectralGrid::create_1d(-1.0, 3.0, 24);
  for (int trial = 0; trial < 10; ++trial) {
    SpectralField f = random_field(grid, rng);
    // symmetrize: c_{-l} = conj(c_l), the unmatched -N/2 mode forced real
    auto c = f.coef();
    for (std::size_t k = 0; k < c.size(); ++k) {
      const std::size_t r = grid->reflect(k);
      if (r == k) c[k] = c[k].real();
      else if (r > k) c[r] = std::conj(c[k]);
    }
    CHECK(f.hermitian_defect() < 1e-15);

    const auto values = inverse_transform(f);
    for (const auto& v : values) CHECK(std::abs(v.imag()) < 1e-13);
    const auto back = forward_transform(std::span<const Complex>(values), grid);
    for (std::size_t k = 0; k < c.size(); ++k)
      CHECK(std::abs(back.coef()[k] - c[k]) < 1e-12);
  }
}

TEST_CASE("roundtrip bound and Plancherel on random fields") {
  std::mt19937 rng(11u);
  const auto grid = SpectralGrid::create_1d(0.0, 1.0, 64);
  for (int trial = 0; trial < 10; ++trial) {
    const SpectralField f = random_field(grid, rng);
    const auto values = inverse_transform(f);

    double vmax = 0.0;
    for (const auto& v : values) vmax = std::max(vmax, std::abs(v));
    const auto back = forward_transform(std::span<const Complex>(values), grid);
    const auto values2 = inverse_transform(back);
    double dmax = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
      dmax = std::max(dmax, std::abs(values2[j] - values[j]));
    CHECK(dmax <= 1e-12 * vmax);

    // (1/N) sum_j |v_j|^2 == sum_l |c_l|^2
    double node_sum = 0.0;
    for (const auto& v : values) node_sum += std::norm(v);
    node_sum /= static_cast<double>(values.size());
    const double norm0 = sobolev_norm(f, 0.0);
    CHECK(std::abs(norm0 * norm0 - node_sum) <= 1e-12 * node_sum);
  }
}

TEST_CASE("sobolev norm closed-forms") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  SpectralField c(grid);
  c.mode(0) = Complex(-3.0, 4.0);  // |c| = 5
  CHECK(sobolev_norm(c, 0.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(sobolev_norm(c, 2.7) == doctest::Approx(5.0).epsilon(1e-14));

  SpectralField m(grid);
  m.mode(1) = 1.0;
  CHECK(sobolev_norm(m, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("sobolev norm vs direct summation at 4x resolution") {
  // oracle: direct-DFT coefficients at N=512, direct weighted sum
  const double alpha = 1.5;
  std::vector<double> fine(512);
  for (int j = 0; j < 512; ++j) fine[static_cast<std::size_t>(j)] = psi0_511(kTwoPi * j / 512.0);
  const auto fine_coef = direct_coefficients(fine, 0.0, kTwoPi);
  double oracle_sq = 0.0;
  for (int l = -256; l < 256; ++l) {
    const double mu = static_cast<double>(l);
    oracle_sq += std::pow(1.0 + mu * mu, alpha / 2.0) *
                 std::norm(fine_coef[static_cast<std::size_t>((l + 512) % 512)]);
  }
  const double oracle = std::sqrt(oracle_sq);

  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 128);
  const auto values = sample_1d(grid, [](double x) { return Complex(psi0_511(x), 0.0); });
  const auto f = forward_transform(std::span<const Complex>(values), grid);
  const double got = sobolev_norm(f, alpha / 2.0);
  CHECK(std::abs(got - oracle) <= 1e-10 * oracle);
}

TEST_CASE("norm monotonicity in the order") {
  std::mt19937 rng(5u);
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 32);
  for (int trial = 0; trial < 10; ++trial) {
    const SpectralField f = random_field(grid, rng);
    double prev = sobolev_norm(f, 0.0);
    for (double m : {0.3, 0.75, 1.0, 1.5, 2.0}) {
      const double cur = sobolev_norm(f, m);
      CHECK(cur >= prev * (1.0 - 1e-14));
      prev = cur;
    }
  }
}

TEST_CASE("2D tensor transform with mixed axis sizes") {
  const auto grid = SpectralGrid::create_2d(0.0, 1.0, 8, 0.0, kTwoPi, 16);
  CHECK(grid->total_modes() == 128);
  CHECK(grid->frequency(0, 1) == doctest::Approx(kTwoPi));
  CHECK(grid->frequency(1, 1) == doctest::Approx(1.0));

  // single tensor mode e^{i (2 mu_x) x} e^{i (-3 mu_y) y}
  std::vector<Complex> values(grid->total_modes());
  for (int j1 = 0; j1 < 8; ++j1) {
    for (int j2 = 0; j2 < 16; ++j2) {
      const double phase = grid->frequency(0, 2) * grid->node(0, j1) +
                           grid->frequency(1, -3) * grid->node(1, j2);
      values[static_cast<std::size_t>(j1) * 16 + j2] = std::polar(1.0, phase);
    }
  }
  const auto f = forward_transform(std::span<const Complex>(values), grid);
  CHECK(std::abs(f.mode(2, -3) - 1.0) < 1e-13);
  double off = 0.0;
  for (std::size_t k = 0; k < f.coef().size(); ++k) {
    const int m[2] = {2, -3};
    if (k != grid->flat_index(m)) off = std::max(off, std::abs(f.coef()[k]));
  }
  CHECK(off < 1e-13);

  // roundtrip
  const auto back = inverse_transform(f);
  for (std::size_t j = 0; j < values.size(); ++j) CHECK(std::abs(back[j] - values[j]) < 1e-12);
}

TEST_CASE("conjugate_field matches pointwise conjugation") {
  std::mt19937 rng(3u);
  const auto grid = SpectralGrid::create_1d(0.5, 2.5, 16);
  const SpectralField f = random_field(grid, rng);
  const auto conj = conjugate_field(f);
  const auto values = inverse_transform(f);
  const auto conj_values = inverse_transform(conj);
  for (std::size_t j = 0; j < values.size(); ++j)
    CHECK(std::abs(conj_values[j] - std::conj(values[j])) < 1e-13);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(SpectralGrid::create_1d(0.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(SpectralGrid::create_1d(0.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(SpectralGrid::create_1d(1.0, 0.0, 8), std::invalid_argument);

  const auto grid = SpectralGrid::create_1d(0.0, 1.0, 8);
  std::vector<Complex> wrong(7);
  CHECK_THROWS_AS(forward_transform(std::span<const Complex>(wrong), grid),
                  std::invalid_argument);
  SpectralField f(grid);
  CHECK_THROWS_AS(sobolev_norm(f, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(f.mode(4), std::out_of_range);   // T_8 tops out at 3
  CHECK_NOTHROW(f.mode(-4));
}

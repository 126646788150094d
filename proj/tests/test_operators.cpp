#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fkge/operators.hpp"

using namespace fkge;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModelParams params_with(double alpha, double beta, double eps = 0.5, int p = 1,
                        Regime regime = Regime::ComplexPower) {
  ModelParams m;
  m.alpha = alpha;
  m.beta = beta;
  m.eps = eps;
  m.power = p;
  m.regime = regime;
  return m;
}

SpectralField random_field(const GridPtr& grid, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SpectralField f(grid);
  for (auto& c : f.coef()) c = Complex(unif(rng), unif(rng));
  return f;
}

}  // namespace

TEST_CASE("symbol values at selected modes") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);

  const Symbol s2 = make_symbol(grid, params_with(2.0, 1.0));
  CHECK(s2.delta_at(static_cast<std::size_t>(grid->index_of_mode(0, 0))) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s2.delta_at(static_cast<std::size_t>(grid->index_of_mode(0, 2))) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));

  const Symbol s15 = make_symbol(grid, params_with(1.5, 1.0));
  CHECK(s15.delta_at(static_cast<std::size_t>(grid->index_of_mode(0, 1))) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("symbol is even in l and bounded below by sqrt(beta)") {
  const auto grid = SpectralGrid::create_1d(0.0, 3.0, 32);
  const Symbol s = make_symbol(grid, params_with(1.3, 0.7));
  for (int l = 1; l < 16; ++l) {
    const auto kp = static_cast<std::size_t>(grid->index_of_mode(0, l));
    const auto km = static_cast<std::size_t>(grid->index_of_mode(0, -l));
    CHECK(s.delta_at(kp) == doctest::Approx(s.delta_at(km)).epsilon(1e-15));
  }
  for (std::size_t k = 0; k < grid->total_modes(); ++k)
    CHECK(s.delta_at(k) >= std::sqrt(0.7));
}

TEST_CASE("alpha=2, beta=1 reduces to the classical relativistic symbol") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 64);
  const Symbol s = make_symbol(grid, params_with(2.0, 1.0));
  const auto& mu2 = grid->mu_squared();
  for (std::size_t k = 0; k < grid->total_modes(); ++k)
    CHECK(s.delta_at(k) == std::sqrt(1.0 + mu2[k]));
}

TEST_CASE("apply_multiplier: identity, zero, exact per-mode inverse") {
  std::mt19937 rng(19u);
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const SpectralField f = random_field(grid, rng);

  std::vector<double> ones(grid->total_modes(), 1.0);
  const auto same = apply_multiplier(f, ones);
  for (std::size_t k = 0; k < f.coef().size(); ++k) CHECK(same.coef()[k] == f.coef()[k]);

  std::vector<double> zeros(grid->total_modes(), 0.0);
  const auto zero = apply_multiplier(f, zeros);
  for (const auto& c : zero.coef()) CHECK(std::abs(c) == 0.0);

  const Symbol s = make_symbol(grid, params_with(1.7, 2.0));
  std::vector<double> inv(grid->total_modes());
  for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = 1.0 / s.delta_at(k);
  const auto ident = apply_multiplier(apply_multiplier(f, s.delta()), inv);
  for (std::size_t k = 0; k < f.coef().size(); ++k)
    CHECK(std::abs(ident.coef()[k] - f.coef()[k]) <= 1e-14 * std::abs(f.coef()[k]) + 1e-16);

  std::vector<double> wrong(grid->total_modes() - 1, 1.0);
  CHECK_THROWS_AS(apply_multiplier(f, wrong), std::invalid_argument);
}

TEST_CASE("nabla_alpha and its inverse") {
  std::mt19937 rng(23u);
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 32);
  const ModelParams params = params_with(2.0, 1.0);
  const Symbol s = make_symbol(grid, params);

  SpectralField c(grid);
  c.mode(0) = Complex(4.0, -1.0);
  const auto nc = nabla_alpha(c, s);
  CHECK(std::abs(nc.mode(0) - c.mode(0)) < 1e-15);  // delta_0 = 1 at beta = 1

  SpectralField m(grid);
  m.mode(2) = 1.0;
  CHECK(std::abs(nabla_alpha(m, s).mode(2) - std::sqrt(5.0)) < 1e-15);

  const SpectralField f = random_field(grid, rng);
  const auto ident = nabla_alpha_inv(nabla_alpha(f, s), s);
  for (std::size_t k = 0; k < f.coef().size(); ++k)
    CHECK(std::abs(ident.coef()[k] - f.coef()[k]) <= 1e-13);
}

TEST_CASE("smoothing: inverse is bounded by 1/sqrt(beta) in every norm") {
  std::mt19937 rng(29u);
  for (double beta : {0.5, 1.0, 4.0}) {
    const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 32);
    const Symbol s = make_symbol(grid, params_with(1.5, beta));
    const SpectralField f = random_field(grid, rng);
    const auto g = nabla_alpha_inv(f, s);
    for (double m : {0.0, 0.75, 2.0}) {
      CHECK(sobolev_norm(g, m) <= sobolev_norm(f, m) / std::sqrt(beta) * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("quarter laplacian weights") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);

  SpectralField c(grid);
  c.mode(0) = 3.0;
  const auto zc = quarter_laplacian(c, params_with(1.5, 1.0));
  for (const auto& v : zc.coef()) CHECK(std::abs(v) == 0.0);

  SpectralField m(grid);
  m.mode(1) = 1.0;
  CHECK(std::abs(quarter_laplacian(m, params_with(2.0, 1.0)).mode(1) - 1.0) < 1e-15);

  SpectralField m3(grid);
  m3.mode(3) = 1.0;
  CHECK(std::abs(quarter_laplacian(m3, params_with(1.2, 1.0)).mode(3) - std::pow(3.0, 0.6)) <
        1e-14);
}

TEST_CASE("propagator: phases, isometry, group law") {
  std::mt19937 rng(31u);
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 32);
  const ModelParams params = params_with(1.5, 1.0);
  const Symbol s = make_symbol(grid, params);
  const SpectralField f = random_field(grid, rng);

  const auto id = propagate(f, s, 0.0);
  for (std::size_t k = 0; k < f.coef().size(); ++k)
    CHECK(std::abs(id.coef()[k] - f.coef()[k]) < 1e-15);

  SpectralField m(grid);
  m.mode(3) = Complex(0.4, 0.9);
  const double t = 0.37;
  const auto moved = propagate(m, s, t);
  const auto k3 = static_cast<std::size_t>(grid->index_of_mode(0, 3));
  CHECK(std::abs(moved.mode(3) - m.mode(3) * std::polar(1.0, t * s.delta_at(k3))) < 1e-15);
  CHECK(std::abs(std::abs(moved.mode(3)) - std::abs(m.mode(3))) < 1e-15);

  for (double order : {0.0, params.alpha / 2.0, 2.0}) {
    const double before = sobolev_norm(f, order);
    const double after = sobolev_norm(propagate(f, s, 1.7), order);
    CHECK(std::abs(after - before) <= 1e-12 * before);
  }

  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double t1 = unif(rng), t2 = unif(rng);
    const auto two = propagate(propagate(f, s, t1), s, t2);
    const auto one = propagate(f, s, t1 + t2);
    double defect = 0.0;
    for (std::size_t k = 0; k < f.coef().size(); ++k)
      defect = std::max(defect, std::abs(two.coef()[k] - one.coef()[k]));
    CHECK(defect <= 1e-12);
  }

  // sign -1 is the adjoint flow
  const auto back = propagate(propagate(f, s, 0.9, +1), s, 0.9, -1);
  for (std::size_t k = 0; k < f.coef().size(); ++k)
    CHECK(std::abs(back.coef()[k] - f.coef()[k]) <= 1e-14);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(params_with(1.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_with(2.1, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_with(2.0, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_with(2.0, 1.0, 1.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_with(2.0, 1.0, 0.5, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_with(2.0, 1.0, 0.5, 2, Regime::RealCubic).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(params_with(2.0, 1.0, 0.0).validate());  // linear-flow runs

  ModelParams p = params_with(2.0, 1.0, 0.5, 2);
  CHECK(p.eps_power() == doctest::Approx(0.0625).epsilon(1e-15));
}

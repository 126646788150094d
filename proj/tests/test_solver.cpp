#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fkge/initial_data.hpp"
#include "fkge/observables.hpp"
#include "fkge/oracle.hpp"
#include "fkge/solver.hpp"

using namespace fkge;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModelParams make_params(double alpha, double eps, int p, Regime regime) {
  ModelParams m;
  m.alpha = alpha;
  m.beta = 1.0;
  m.eps = eps;
  m.power = p;
  m.regime = regime;
  return m;
}

SolveConfig make_config(const ModelParams& params, double tau, double t_final) {
  SolveConfig cfg;
  cfg.params = params;
  cfg.tau = tau;
  cfg.t_final = t_final;
  cfg.snapshot_stride = std::numeric_limits<long>::max();
  return cfg;
}

double max_coef_diff(const SpectralField& a, const SpectralField& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.coef().size(); ++k)
    worst = std::max(worst, std::abs(a.coef()[k] - b.coef()[k]));
  return worst;
}

}  // namespace

TEST_CASE("eval_nonlinearity closed forms") {
  std::vector<Complex> two{Complex(2.0, 0.0)};
  CHECK(std::abs(eval_nonlinearity(two, Regime::RealCubic, 1)[0] - 8.0) == 0.0);

  std::vector<Complex> imag{Complex(0.0, 1.7)};
  CHECK(std::abs(eval_nonlinearity(imag, Regime::RealCubic, 1)[0]) == 0.0);

  std::vector<Complex> c{Complex(0.0, 2.0)};
  const auto f = eval_nonlinearity(c, Regime::ComplexPower, 2);
  CHECK(std::abs(f[0] - Complex(0.0, 32.0)) < 1e-13);
}

TEST_CASE("eps=0: one step is the exact propagator on every mode") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 32);
  const ModelParams params = make_params(1.5, 0.0, 1, Regime::RealCubic);
  EwiSolver solver(grid, make_config(params, 0.125, 1.0));

  SpectralField phi(grid);
  phi.mode(5) = Complex(0.3, -0.8);
  phi.mode(-2) = Complex(1.0, 0.25);
  const auto next = solver.step_real(phi);
  for (int l : {5, -2}) {
    const auto k = static_cast<std::size_t>(grid->index_of_mode(0, l));
    const Complex want = phi.mode(l) * std::polar(1.0, 0.125 * solver.symbol().delta_at(k));
    CHECK(std::abs(next.mode(l) - want) <= 1e-13);
  }

  // coupled components follow e^{+-i tau <nabla>}
  const ModelParams cparams = make_params(1.5, 0.0, 1, Regime::ComplexPower);
  EwiSolver csolver(grid, make_config(cparams, 0.125, 1.0));
  auto [fp, fm] = csolver.step_coupled(phi, phi);
  for (int l : {5, -2}) {
    const auto k = static_cast<std::size_t>(grid->index_of_mode(0, l));
    const Complex rot = std::polar(1.0, 0.125 * csolver.symbol().delta_at(k));
    CHECK(std::abs(fp.mode(l) - phi.mode(l) * rot) <= 1e-13);
    CHECK(std::abs(fm.mode(l) - phi.mode(l) * std::conj(rot)) <= 1e-13);
  }
}

TEST_CASE("zero initial data stays exactly zero") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const ModelParams params = make_params(1.8, 0.5, 1, Regime::RealCubic);
  SolveConfig cfg = make_config(params, 0.05, 1.0);
  cfg.snapshot_stride = 5;
  EwiSolver solver(grid, cfg);
  const KgeState zero{SpectralField(grid), SpectralField(grid), 0.0};
  const Trajectory traj = solver.solve(zero);
  for (const auto& snap : traj.snapshots) {
    for (const auto& c : snap.psi.coef()) CHECK(std::abs(c) == 0.0);
    for (const auto& c : snap.eta.coef()) CHECK(std::abs(c) == 0.0);
  }
}

TEST_CASE("eps=0 single-mode run matches the exact plane-wave solution") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const ModelParams params = make_params(2.0, 0.0, 1, Regime::RealCubic);
  SolveConfig cfg = make_config(params, 1e-2, 1.0);
  EwiSolver solver(grid, cfg);
  const Symbol& s = solver.symbol();

  // psi(0) = cos(2x), eta(0) = 0  ->  psi(t) = cos(2x) cos(delta_2 t)
  SpectralField psi0(grid);
  psi0.mode(2) = 0.5;
  psi0.mode(-2) = 0.5;
  const Trajectory traj = solver.solve(KgeState{psi0, SpectralField(grid), 0.0});
  const auto k2 = static_cast<std::size_t>(grid->index_of_mode(0, 2));
  const double phase = s.delta_at(k2) * 1.0;
  const auto& fin = traj.final_state();
  CHECK(std::abs(fin.psi.mode(2) - 0.5 * std::cos(phase)) <= 1e-12);
  CHECK(std::abs(fin.psi.mode(-2) - 0.5 * std::cos(phase)) <= 1e-12);
  CHECK(std::abs(fin.eta.mode(2) + 0.5 * s.delta_at(k2) * std::sin(phase)) <= 1e-12);
}

TEST_CASE("temporal order two against a fine reference (self-refinement)") {
  const auto grid = make_data_grid(InitialData::SmoothReal1d, std::vector<int>{32});
  const KgeState init = builtin_initial_data(InitialData::SmoothReal1d, grid);
  const ModelParams params = make_params(2.0, 0.5, 1, Regime::RealCubic);

  EwiSolver ref_solver(grid, make_config(params, 1e-4, 1.0));
  const SpectralField psi_ref = ref_solver.solve(init).final_state().psi;

  std::vector<double> errors;
  for (double tau : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    EwiSolver solver(grid, make_config(params, tau, 1.0));
    errors.push_back(
        h_alpha_half_error(solver.solve(init).final_state().psi, psi_ref, params.alpha));
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log2(errors[i] / errors[i + 1]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("one EWI step agrees with the RK4 coefficient-space oracle") {
  const auto grid = make_data_grid(InitialData::SmoothReal1d, std::vector<int>{32});
  const KgeState init = builtin_initial_data(InitialData::SmoothReal1d, grid);
  const ModelParams params = make_params(2.0, 0.5, 1, Regime::RealCubic);
  const double tau = 1e-3;

  EwiSolver solver(grid, make_config(params, tau, tau));
  const NlsState nls0 = solver.initial_nls(init.psi, init.eta);
  const SpectralField ewi = solver.step_real(nls0.phi());
  const SpectralField rk4 = rk4_reference_real(nls0.phi(), solver.symbol(), params, tau, tau);

  SpectralField diff(grid);
  for (std::size_t k = 0; k < diff.coef().size(); ++k)
    diff.coef()[k] = ewi.coef()[k] - rk4.coef()[k];
  CHECK(sobolev_norm(diff, params.alpha / 2.0) <= 1e-8);
}

TEST_CASE("coupled solver reduces to the real solver on real cubic data") {
  const auto grid = make_data_grid(InitialData::SmoothReal1d, std::vector<int>{32});
  const KgeState init = builtin_initial_data(InitialData::SmoothReal1d, grid);

  const ModelParams real_params = make_params(1.5, 0.5, 1, Regime::RealCubic);
  SolveConfig real_cfg = make_config(real_params, 1e-2, 1.0);
  real_cfg.snapshot_stride = 20;
  EwiSolver real_solver(grid, real_cfg);
  const Trajectory real_traj = real_solver.solve(init);

  const ModelParams cparams = make_params(1.5, 0.5, 1, Regime::ComplexPower);
  SolveConfig ccfg = make_config(cparams, 1e-2, 1.0);
  ccfg.snapshot_stride = 20;
  EwiSolver csolver(grid, ccfg);
  const Trajectory ctraj = csolver.solve(init);

  REQUIRE(real_traj.snapshots.size() == ctraj.snapshots.size());
  for (std::size_t i = 0; i < real_traj.snapshots.size(); ++i)
    CHECK(max_coef_diff(real_traj.snapshots[i].psi, ctraj.snapshots[i].psi) <= 1e-10);
}

TEST_CASE("initial_nls matches the first-order reformulation") {
  const auto grid = make_data_grid(InitialData::ComplexPoly1d, std::vector<int>{32});
  const KgeState init = builtin_initial_data(InitialData::ComplexPoly1d, grid);
  const ModelParams params = make_params(2.0, 1.0, 1, Regime::ComplexPower);
  EwiSolver solver(grid, make_config(params, 0.05, 1.0));

  const NlsState nls = solver.initial_nls(init.psi, init.eta);
  REQUIRE(nls.coupled());
  for (std::size_t k = 0; k < init.psi.coef().size(); ++k) {
    const Complex shift =
        Complex(0.0, 1.0) * init.eta.coef()[k] / solver.symbol().delta_at(k);
    CHECK(std::abs(nls.phi_plus.coef()[k] - (init.psi.coef()[k] - shift)) <= 1e-15);
    CHECK(std::abs(nls.phi_minus->coef()[k] - (init.psi.coef()[k] + shift)) <= 1e-15);
  }

  // psi1 = 0 -> phi = psi0
  const NlsState plain = solver.initial_nls(init.psi, SpectralField(grid));
  for (std::size_t k = 0; k < init.psi.coef().size(); ++k)
    CHECK(std::abs(plain.phi_plus.coef()[k] - init.psi.coef()[k]) < 1e-15);

  // roundtrip back to (psi0, psi1)
  const KgeState rt = from_nls(nls, solver.symbol());
  CHECK(max_coef_diff(rt.psi, init.psi) <= 1e-13);
  CHECK(max_coef_diff(rt.eta, init.eta) <= 1e-13);
}

TEST_CASE("final partial step lands exactly on t_final") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const ModelParams params = make_params(2.0, 0.0, 1, Regime::RealCubic);
  SolveConfig cfg = make_config(params, 0.1, 0.55);
  EwiSolver solver(grid, cfg);

  SpectralField psi0(grid);
  psi0.mode(1) = 0.5;
  psi0.mode(-1) = 0.5;
  const Trajectory traj = solver.solve(KgeState{psi0, SpectralField(grid), 0.0});
  CHECK(traj.stats.total_steps() == 6);  // 5 full + 1 shortened
  CHECK(std::abs(traj.final_state().time - 0.55) <= 1e-12);

  const auto k1 = static_cast<std::size_t>(grid->index_of_mode(0, 1));
  const double phase = solver.symbol().delta_at(k1) * 0.55;
  CHECK(std::abs(traj.final_state().psi.mode(1) - 0.5 * std::cos(phase)) <= 1e-13);
}

TEST_CASE("snapshot times are strictly increasing and end at t_final") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const ModelParams params = make_params(1.5, 0.25, 1, Regime::ComplexPower);
  SolveConfig cfg = make_config(params, 0.01, 1.0);
  cfg.snapshot_stride = 7;
  EwiSolver solver(grid, cfg);
  SpectralField psi0(grid);
  psi0.mode(0) = 1.0;
  const Trajectory traj = solver.solve(KgeState{psi0, SpectralField(grid), 0.0});
  REQUIRE(traj.snapshots.size() > 2);
  CHECK(traj.snapshots.front().time == 0.0);
  CHECK(std::abs(traj.snapshots.back().time - 1.0) <= 1e-12);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
    CHECK(traj.snapshots[i].time > traj.snapshots[i - 1].time);
}

TEST_CASE("oscillatory solve coincides with the plain solve at eps=1") {
  const auto grid = make_data_grid(InitialData::ComplexPoly1d, std::vector<int>{32});
  const KgeState init = builtin_initial_data(InitialData::ComplexPoly1d, grid);

  const ModelParams oparams = make_params(2.0, 1.0, 1, Regime::Oscillatory);
  SolveConfig ocfg = make_config(oparams, 0.05, 1.0);
  ocfg.snapshot_stride = 5;
  EwiSolver osolver(grid, ocfg);
  const Trajectory osc = osolver.solve_oscillatory(init);

  const ModelParams pparams = make_params(2.0, 1.0, 1, Regime::ComplexPower);
  SolveConfig pcfg = make_config(pparams, 0.05, 1.0);
  pcfg.snapshot_stride = 5;
  EwiSolver psolver(grid, pcfg);
  const Trajectory plain = psolver.solve(init);

  REQUIRE(osc.snapshots.size() == plain.snapshots.size());
  for (std::size_t i = 0; i < osc.snapshots.size(); ++i) {
    CHECK(osc.snapshots[i].time == plain.snapshots[i].time);
    CHECK(max_coef_diff(osc.snapshots[i].psi, plain.snapshots[i].psi) == 0.0);
    CHECK(max_coef_diff(osc.snapshots[i].eta, plain.snapshots[i].eta) == 0.0);
  }
}

TEST_CASE("fixed-point failure carries the step index") {
  const auto grid = make_data_grid(InitialData::SmoothReal1d, std::vector<int>{32});
  const KgeState init = builtin_initial_data(InitialData::SmoothReal1d, grid);
  ModelParams params = make_params(2.0, 1.0, 1, Regime::RealCubic);
  SolveConfig cfg = make_config(params, 4.0, 8.0);  // eps^2 tau = 4: no contraction
  cfg.fp_max_iterations = 8;
  EwiSolver solver(grid, cfg);
  try {
    solver.solve(init);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.step() >= 1);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("step budget is enforced") {
  const auto grid = SpectralGrid::create_1d(0.0, kTwoPi, 16);
  const ModelParams params = make_params(2.0, 0.1, 1, Regime::RealCubic);
  SolveConfig cfg = make_config(params, 1e-4, 10.0);
  cfg.max_steps = 1000;
  EwiSolver solver(grid, cfg);
  SpectralField psi0(grid);
  psi0.mode(0) = 1.0;
  CHECK_THROWS_AS(solver.solve(KgeState{psi0, SpectralField(grid), 0.0}),
                  std::invalid_argument);
}

TEST_CASE("fixed-point iteration counts stay small in the covered regime") {
  // diagnostic bound; threshold calibrated on this data (see docs in the test)
  const auto grid = make_data_grid(InitialData::SmoothReal1d, std::vector<int>{32});
  const KgeState init = builtin_initial_data(InitialData::SmoothReal1d, grid);
  ModelParams params = make_params(2.0, 0.5, 1, Regime::RealCubic);
  SolveConfig cfg = make_config(params, 0.2, 2.0);  // eps^2 tau = 0.05
  cfg.snapshot_stride = 5;
  EwiSolver solver(grid, cfg);
  const Trajectory traj = solver.solve(init);
  CHECK(traj.stats.max_iterations() <= 10);
}

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <numbers>

#include "fkge/acceptance.hpp"
#include "fkge/csv.hpp"
#include "fkge/harness.hpp"

namespace {

using namespace fkge;

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("FKGE_OUT_DIR")) return env;
  return "out";
}

struct CommonOpts {
  std::string out_dir = default_out_dir().string();
  std::string cache_dir;
  int threads = 0;
  bool full_precision = false;
  bool plot_script = false;
};

void apply_common(StudySpec& spec, const CommonOpts& common) {
  spec.output_dir = common.out_dir;
  if (!common.cache_dir.empty()) spec.cache_dir = common.cache_dir;
  spec.threads = common.threads;
  spec.full_precision = common.full_precision;
  spec.plot_script = common.plot_script;
}

struct SolveOpts {
  double alpha = 2.0, beta = 1.0, eps = 0.5, tau = 1e-2, t_final = 1.0;
  int p = 1;
  std::string regime = "real-cubic";
  std::string data = "smooth-real-1d";
  std::vector<int> n{128};
  long stride = 0;
  double fp_tol = 1e-13;
  int fp_max_it = 50;
  long max_steps = 10'000'000;
};

int run_solve(const SolveOpts& o, const CommonOpts& common) {
  ModelParams params;
  params.alpha = o.alpha;
  params.beta = o.beta;
  params.eps = o.eps;
  params.power = o.p;
  params.regime = regime_from_string(o.regime);
  params.validate();

  const InitialData data = initial_data_from_string(o.data);
  const GridPtr grid = make_data_grid(data, o.n);
  const KgeState init = builtin_initial_data(data, grid);

  SolveConfig cfg;
  cfg.params = params;
  cfg.tau = o.tau;
  cfg.t_final = o.t_final;
  cfg.snapshot_stride = o.stride > 0 ? o.stride : std::max<long>(1, std::llround(o.t_final / o.tau / 128));
  cfg.fp_tolerance = o.fp_tol;
  cfg.fp_max_iterations = o.fp_max_it;
  cfg.max_steps = o.max_steps;

  EwiSolver solver(grid, cfg);
  const Trajectory traj = params.regime == Regime::Oscillatory ? solver.solve_oscillatory(init)
                                                               : solver.solve(init);

  const double e_first = energy(traj.snapshots.front(), params);
  double dev = 0.0;
  for (const auto& snap : traj.snapshots)
    dev = std::max(dev, std::abs(energy(snap, params) - e_first) / std::abs(e_first));

  std::cout << "steps: " << traj.stats.total_steps()
            << "  max fixed-point iterations: " << traj.stats.max_iterations()
            << "\nfinal time: " << traj.final_state().time
            << "  energy deviation: " << csv::format_number(dev, common.full_precision) << "\n";

  double e1 = std::numeric_limits<double>::quiet_NaN();
  if (params.eps == 0.0) {
    // exact linear flow for comparison
    const Symbol symbol = solver.symbol();
    NlsState nls = to_nls(init, symbol, params.regime);
    auto coef = nls.phi_plus.coef();
    for (std::size_t k = 0; k < coef.size(); ++k)
      coef[k] *= std::polar(1.0, o.t_final * symbol.delta_at(k));
    if (nls.coupled()) {
      auto cm = nls.phi_minus->coef();
      for (std::size_t k = 0; k < cm.size(); ++k)
        cm[k] *= std::polar(1.0, -o.t_final * symbol.delta_at(k));
    }
    const KgeState exact = from_nls(nls, symbol);
    e1 = h_alpha_half_error(traj.final_state().psi, exact.psi, params.alpha);
    std::cout << "error vs exact linear flow (H^{alpha/2}): "
              << csv::format_number(e1, common.full_precision) << "\n";
  }

  csv::Record rec;
  rec.alpha = params.alpha;
  rec.beta = params.beta;
  rec.eps = params.eps;
  rec.p = params.power;
  rec.tau = o.tau;
  rec.n = [&] {
    std::string s;
    for (std::size_t i = 0; i < o.n.size(); ++i) s += (i ? "x" : "") + std::to_string(o.n[i]);
    return s;
  }();
  rec.t_final = o.t_final;
  rec.e1 = e1;
  rec.e1_max = e1;
  rec.energy_dev = dev;
  rec.iters_max = traj.stats.max_iterations();
  std::filesystem::create_directories(common.out_dir);
  csv::write_records(std::filesystem::path(common.out_dir) / "solve.csv", {{rec}},
                     common.full_precision);
  return 0;
}

std::vector<double> default_tau_list() {
  return {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fkge: Fourier pseudospectral exponential wave integrator for the nonlinear "
      "space-fractional Klein-Gordon equation"};
  app.set_config("--config", "", "read options from an INI-style config file");
  app.require_subcommand(0, 1);

  CommonOpts common;
  app.add_option("--out", common.out_dir, "output directory (env FKGE_OUT_DIR)")
      ->capture_default_str();
  app.add_option("--cache-dir", common.cache_dir, "reference cache directory");
  app.add_option("--threads", common.threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  app.add_flag("--full-precision", common.full_precision, "serialize with 17 digits");
  app.add_flag("--plot-script", common.plot_script, "emit matplotlib sidecar scripts");

  bool check = false;
  std::vector<int> check_only;
  app.add_flag("--check", check, "run the built-in acceptance suite");
  app.add_option("--check-criteria", check_only, "restrict --check to these criterion ids");

  // ---- solve ---------------------------------------------------------------
  SolveOpts so;
  CLI::App* solve = app.add_subcommand("solve", "single run with summary output");
  solve->add_option("--alpha", so.alpha, "fractional order in (1,2]")->capture_default_str();
  solve->add_option("--beta", so.beta, "mass term")->capture_default_str();
  solve->add_option("--eps", so.eps, "nonlinearity strength in [0,1]")->capture_default_str();
  solve->add_option("--p", so.p, "power exponent p")->capture_default_str();
  solve->add_option("--regime", so.regime, "real-cubic | complex-power | oscillatory")
      ->capture_default_str();
  solve->add_option("--data", so.data, "smooth-real-1d | smooth-real-2d | complex-poly-1d")
      ->capture_default_str();
  solve->add_option("--n", so.n, "modes per axis")->capture_default_str();
  solve->add_option("--tau", so.tau, "time step (lambda in the oscillatory regime)")
      ->capture_default_str();
  solve->add_option("--t-final", so.t_final, "final time")->capture_default_str();
  solve->add_option("--stride", so.stride, "snapshot stride (0 = auto)")->capture_default_str();
  solve->add_option("--fp-tol", so.fp_tol, "fixed-point tolerance")->capture_default_str();
  solve->add_option("--fp-max-iters", so.fp_max_it, "fixed-point iteration cap")
      ->capture_default_str();
  solve->add_option("--max-steps", so.max_steps, "step budget")->capture_default_str();

  // ---- studies ---------------------------------------------------------------
  StudySpec table;
  table.kind = StudyKind::OscillatoryTable;
  table.base.power = 1;
  table.base.regime = Regime::ComplexPower;
  table.data = InitialData::ComplexPoly1d;
  CLI::App* osc = app.add_subcommand("oscillatory-table",
                                     "temporal error table for the rescaled complex equation");
  osc->add_option("--alpha", table.alpha_list, "alpha values (one table each)")
      ->capture_default_str();
  osc->add_option("--beta", table.base.beta, "mass term")->capture_default_str();
  osc->add_option("--p", table.base.power, "power exponent")->capture_default_str();
  osc->add_option("--eps0", table.eps0, "leading eps row")->capture_default_str();
  osc->add_option("--lambda0", table.lambda0, "leading lambda column")->capture_default_str();
  osc->add_option("--rows", table.table_rows, "eps rows (halving)")->capture_default_str();
  osc->add_option("--cols", table.table_cols, "lambda columns (quartering)")
      ->capture_default_str();
  osc->add_option("--n", table.n, "modes per axis")->capture_default_str();
  osc->add_option("--r-final", table.t_final, "rescaled horizon r")->capture_default_str();
  osc->add_option("--tau-ref", table.tau_e, "reference time step")->capture_default_str();
  osc->add_option("--max-steps", table.max_steps, "per-run step budget")->capture_default_str();
  osc->add_option("--fp-max-iters", table.fp_max_iterations, "fixed-point iteration cap")
      ->capture_default_str();

  StudySpec longtime;
  longtime.kind = StudyKind::LongTime;
  longtime.base.power = 2;
  longtime.base.regime = Regime::ComplexPower;
  longtime.data = InitialData::SmoothReal1d;
  longtime.eps_list = {1.0, 0.5, 0.25};
  CLI::App* lt = app.add_subcommand("long-time", "e1_max growth up to t = T/eps^{2p}");
  lt->add_option("--alpha", longtime.alpha_list, "alpha values")->capture_default_str();
  lt->add_option("--beta", longtime.base.beta, "mass term")->capture_default_str();
  lt->add_option("--p", longtime.base.power, "power exponent")->capture_default_str();
  lt->add_option("--eps", longtime.eps_list, "eps values (descending)")->capture_default_str();
  lt->add_option("--tau", longtime.tau, "fixed time step")->capture_default_str();
  lt->add_option("--n", longtime.n, "modes per axis")->capture_default_str();
  lt->add_option("--t-mult", longtime.t_final, "horizon multiplier T")->capture_default_str();
  lt->add_option("--tau-ref", longtime.tau_e, "reference time step")->capture_default_str();
  lt->add_option("--data", longtime.data, "initial data selector")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, InitialData>{
              {"smooth-real-1d", InitialData::SmoothReal1d},
              {"smooth-real-2d", InitialData::SmoothReal2d},
              {"complex-poly-1d", InitialData::ComplexPoly1d}},
          CLI::ignore_case));
  lt->add_option("--max-steps", longtime.max_steps, "per-run step budget")
      ->capture_default_str();

  StudySpec spatial;
  spatial.kind = StudyKind::Spatial;
  spatial.base.power = 2;
  spatial.base.regime = Regime::ComplexPower;
  spatial.data = InitialData::SmoothReal1d;
  spatial.alpha_list = {2.0, 1.5, 1.2};
  spatial.eps_list = {0.125, 0.0625};
  spatial.n_list = {8, 16, 32, 64};
  CLI::App* sp = app.add_subcommand("converge-space", "spatial error vs N at fine time step");
  sp->add_option("--alpha", spatial.alpha_list, "alpha values")->capture_default_str();
  sp->add_option("--beta", spatial.base.beta, "mass term")->capture_default_str();
  sp->add_option("--p", spatial.base.power, "power exponent")->capture_default_str();
  sp->add_option("--eps", spatial.eps_list, "eps values")->capture_default_str();
  sp->add_option("--n-list", spatial.n_list, "resolutions")->capture_default_str();
  sp->add_option("--n-ref", spatial.n_e, "reference resolution (0 = 2x max)")
      ->capture_default_str();
  sp->add_option("--t-final", spatial.t_final, "final time")->capture_default_str();
  sp->add_option("--tau-ref", spatial.tau_e, "fine time step")->capture_default_str();

  StudySpec temporal;
  temporal.kind = StudyKind::Temporal;
  temporal.base.power = 2;
  temporal.base.regime = Regime::ComplexPower;
  temporal.data = InitialData::SmoothReal1d;
  temporal.eps_list = {0.5};
  temporal.step_list = default_tau_list();
  CLI::App* tm = app.add_subcommand("converge-time", "temporal error vs tau at fixed eps");
  tm->add_option("--alpha", temporal.alpha_list, "alpha values")->capture_default_str();
  tm->add_option("--beta", temporal.base.beta, "mass term")->capture_default_str();
  tm->add_option("--p", temporal.base.power, "power exponent")->capture_default_str();
  tm->add_option("--eps", temporal.eps_list, "eps values")->capture_default_str();
  tm->add_option("--taus", temporal.step_list, "tau values (descending)")->capture_default_str();
  tm->add_option("--n", temporal.n, "modes per axis")->capture_default_str();
  tm->add_option("--t-final", temporal.t_final, "final time")->capture_default_str();
  tm->add_option("--tau-ref", temporal.tau_e, "reference time step")->capture_default_str();

  StudySpec energy_spec;
  energy_spec.kind = StudyKind::Energy;
  energy_spec.base.power = 2;
  energy_spec.base.regime = Regime::ComplexPower;
  energy_spec.data = InitialData::SmoothReal1d;
  energy_spec.eps_list = {0.5};
  energy_spec.step_list = {2e-2, 1e-2};
  energy_spec.t_final = 16.0;
  CLI::App* en = app.add_subcommand("energy", "energy evolution and deviation refinement");
  en->add_option("--alpha", energy_spec.alpha_list, "alpha values")->capture_default_str();
  en->add_option("--beta", energy_spec.base.beta, "mass term")->capture_default_str();
  en->add_option("--p", energy_spec.base.power, "power exponent")->capture_default_str();
  en->add_option("--eps", energy_spec.eps_list, "eps values")->capture_default_str();
  en->add_option("--taus", energy_spec.step_list, "tau values (descending)")
      ->capture_default_str();
  en->add_option("--n", energy_spec.n, "modes per axis")->capture_default_str();
  en->add_option("--t-final", energy_spec.t_final, "final time")->capture_default_str();

  StudySpec dump;
  dump.kind = StudyKind::FieldDump2d;
  dump.base.power = 1;
  dump.base.eps = 0.5;
  dump.base.regime = Regime::ComplexPower;
  dump.data = InitialData::SmoothReal2d;
  dump.alpha_list = {2.0, 1.7, 1.4, 1.1};
  dump.n = {32, 64};
  CLI::App* d2 = app.add_subcommand("dump-2d", "2D field snapshots for plotting");
  d2->add_option("--alpha", dump.alpha_list, "alpha values")->capture_default_str();
  d2->add_option("--beta", dump.base.beta, "mass term")->capture_default_str();
  d2->add_option("--p", dump.base.power, "power exponent")->capture_default_str();
  d2->add_option("--eps", dump.base.eps, "nonlinearity strength")->capture_default_str();
  d2->add_option("--tau", dump.tau, "time step")->capture_default_str();
  d2->add_option("--n", dump.n, "modes per axis (two values)")->capture_default_str();
  d2->add_option("--times", dump.dump_times, "dump times")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (check) {
      AcceptanceOptions opt;
      opt.work_dir = std::filesystem::path(common.out_dir) / "acceptance";
      opt.threads = common.threads;
      opt.only = check_only;
      const auto results = run_acceptance(opt, std::cout);
      return all_passed(results) ? 0 : 1;
    }
    if (solve->parsed()) return run_solve(so, common);
    if (osc->parsed()) {
      apply_common(table, common);
      write_oscillatory_table(table, run_oscillatory_table(table));
      return 0;
    }
    if (lt->parsed()) {
      apply_common(longtime, common);
      write_long_time_study(longtime, run_long_time_study(longtime));
      return 0;
    }
    if (sp->parsed()) {
      apply_common(spatial, common);
      write_spatial_study(spatial, run_spatial_study(spatial));
      return 0;
    }
    if (tm->parsed()) {
      apply_common(temporal, common);
      write_temporal_study(temporal, run_temporal_study(temporal));
      return 0;
    }
    if (en->parsed()) {
      apply_common(energy_spec, common);
      write_energy_study(energy_spec, run_energy_study(energy_spec));
      return 0;
    }
    if (d2->parsed()) {
      apply_common(dump, common);
      const auto results = run_field_dump_2d(dump);
      for (const auto& res : results)
        std::cout << "alpha=" << res.alpha << "  max|Im psi|=" << res.max_imag
                  << "  energy deviation=" << res.energy_dev << "  files=" << res.files.size()
                  << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::cerr << app.help() << std::flush;
  return 1;
}

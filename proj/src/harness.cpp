#include "fkge/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "fkge/csv.hpp"

namespace fkge {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string n_label(std::span<const int> n) {
  std::string s;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(n[i]);
  }
  return s;
}

ModelParams cell_params(const StudySpec& spec, double alpha, double eps, Regime regime) {
  ModelParams p = spec.base;
  p.alpha = alpha;
  p.eps = eps;
  p.regime = regime;
  p.validate();
  return p;
}

SolveConfig cell_config(const StudySpec& spec, const ModelParams& params, double tau,
                        double t_final, long stride) {
  SolveConfig cfg;
  cfg.params = params;
  cfg.tau = tau;
  cfg.t_final = t_final;
  cfg.snapshot_stride = stride;
  cfg.fp_tolerance = spec.fp_tolerance;
  cfg.fp_max_iterations = spec.fp_max_iterations;
  cfg.max_steps = spec.max_steps;
  return cfg;
}

long sample_stride(const StudySpec& spec, double t_final, double tau) {
  const double want = t_final / (static_cast<double>(spec.target_samples) * tau);
  return std::max<long>(1, std::llround(want));
}

/// Reference stride matching stride coarse steps of size tau, in tau_e steps.
long reference_stride(const StudySpec& spec, long stride, double tau) {
  const double exact = static_cast<double>(stride) * tau / spec.tau_e;
  const long se = std::llround(exact);
  if (se < 1 || std::abs(exact - static_cast<double>(se)) > 1e-6)
    throw std::invalid_argument("study step and tau_e are not commensurate");
  return se;
}

void check_aligned(const ReferenceData& ref, const Trajectory& traj) {
  if (ref.times.size() != traj.snapshots.size())
    throw std::logic_error("reference/run snapshot counts differ");
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    if (std::abs(ref.times[i] - traj.snapshots[i].time) >
        1e-6 * std::max(1.0, std::abs(ref.times[i])))
      throw std::logic_error("reference/run snapshot times differ");
  }
}

std::string horizon_note(long needed, long cap) {
  return "horizon needs " + std::to_string(needed) + " steps, cap is " + std::to_string(cap);
}

}  // namespace

std::string to_string(StudyKind k) {
  switch (k) {
    case StudyKind::Temporal: return "converge-time";
    case StudyKind::Spatial: return "converge-space";
    case StudyKind::LongTime: return "long-time";
    case StudyKind::Energy: return "energy";
    case StudyKind::OscillatoryTable: return "oscillatory-table";
    case StudyKind::FieldDump2d: return "dump-2d";
  }
  return "?";
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(threads, 1);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::filesystem::path StudySpec::effective_cache_dir() const {
  return cache_dir.empty() ? output_dir / "ref_cache" : cache_dir;
}

void StudySpec::validate() const {
  base.validate();
  if (alpha_list.empty()) throw std::invalid_argument("StudySpec: alpha list is empty");
  if (!(tau_e > 0.0)) throw std::invalid_argument("StudySpec: tau_e must be positive");
  if (target_samples < 2) throw std::invalid_argument("StudySpec: target_samples must be >= 2");
  if (max_steps < 1) throw std::invalid_argument("StudySpec: max_steps must be >= 1");
  if (n.empty()) throw std::invalid_argument("StudySpec: grid size list is empty");

  switch (kind) {
    case StudyKind::OscillatoryTable: {
      if (table_rows < 1 || table_cols < 1)
        throw std::invalid_argument("StudySpec: table needs at least one row and column");
      if (!(eps0 > 0.0 && eps0 <= 1.0))
        throw std::invalid_argument("StudySpec: eps0 must lie in (0, 1]");
      if (!(lambda0 > 0.0)) throw std::invalid_argument("StudySpec: lambda0 must be positive");
      const double lambda_min = lambda0 / std::pow(4.0, table_cols - 1);
      if (!(tau_e < lambda_min))
        throw std::invalid_argument(
            "StudySpec: tau_e must be strictly finer than the smallest lambda");
      break;
    }
    case StudyKind::Temporal: {
      if (step_list.empty() || eps_list.empty())
        throw std::invalid_argument("StudySpec: temporal study needs tau and eps lists");
      for (double s : step_list)
        if (!(tau_e <= s / 10.0))
          throw std::invalid_argument("StudySpec: need tau_e <= tau/10 for every tau");
      break;
    }
    case StudyKind::Spatial: {
      if (n_list.empty() || eps_list.empty())
        throw std::invalid_argument("StudySpec: spatial study needs N and eps lists");
      const int n_max = *std::max_element(n_list.begin(), n_list.end());
      const int ne = n_e > 0 ? n_e : 2 * n_max;
      if (ne < 2 * n_max)
        throw std::invalid_argument("StudySpec: reference N must be at least 2x the largest N");
      break;
    }
    case StudyKind::LongTime: {
      if (eps_list.empty()) throw std::invalid_argument("StudySpec: long-time study needs eps list");
      if (!(tau > 0.0)) throw std::invalid_argument("StudySpec: tau must be positive");
      if (!(tau_e <= tau / 10.0))
        throw std::invalid_argument("StudySpec: need tau_e <= tau/10");
      break;
    }
    case StudyKind::Energy: {
      if (step_list.empty() || eps_list.empty())
        throw std::invalid_argument("StudySpec: energy study needs tau and eps lists");
      break;
    }
    case StudyKind::FieldDump2d: {
      if (n.size() != 2) throw std::invalid_argument("StudySpec: 2D dump needs two mode counts");
      if (dump_times.empty()) throw std::invalid_argument("StudySpec: dump times are empty");
      if (!(tau > 0.0)) throw std::invalid_argument("StudySpec: tau must be positive");
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// oscillatory convergence table
// ---------------------------------------------------------------------------

std::vector<OscTable> run_oscillatory_table(const StudySpec& spec) {
  spec.validate();
  const auto cache = spec.effective_cache_dir();
  const int rows = spec.table_rows, cols = spec.table_cols;

  std::vector<double> eps_vals(static_cast<std::size_t>(rows));
  std::vector<double> lam_vals(static_cast<std::size_t>(cols));
  eps_vals[0] = spec.eps0;
  for (int r = 1; r < rows; ++r) eps_vals[static_cast<std::size_t>(r)] = eps_vals[static_cast<std::size_t>(r - 1)] / 2.0;
  lam_vals[0] = spec.lambda0;
  for (int c = 1; c < cols; ++c) lam_vals[static_cast<std::size_t>(c)] = lam_vals[static_cast<std::size_t>(c - 1)] / 4.0;

  const GridPtr grid = make_data_grid(spec.data, spec.n);
  const KgeState data0 = builtin_initial_data(spec.data, grid);
  const std::size_t na = spec.alpha_list.size();

  // One reference per (alpha, eps) row, shared by all cells of the row.
  std::vector<ReferenceData> refs(na * static_cast<std::size_t>(rows));
  parallel_for(refs.size(), spec.threads, [&](std::size_t i) {
    const std::size_t a = i / static_cast<std::size_t>(rows);
    const std::size_t r = i % static_cast<std::size_t>(rows);
    ReferenceSpec rs;
    rs.params = cell_params(spec, spec.alpha_list[a], eps_vals[r], Regime::ComplexPower);
    rs.data = spec.data;
    rs.n = spec.n;
    rs.tau_e = spec.tau_e;
    rs.t_final = spec.t_final / rs.params.eps_power();
    rs.stride = 0;
    rs.max_steps = spec.max_steps;
    rs.fp_tolerance = spec.fp_tolerance;
    rs.fp_max_iterations = spec.fp_max_iterations;
    refs[i] = reference_solution(rs, cache);
  });

  std::vector<OscTable> tables(na);
  for (std::size_t a = 0; a < na; ++a) {
    tables[a].alpha = spec.alpha_list[a];
    tables[a].eps_values = eps_vals;
    tables[a].lambda_values = lam_vals;
    tables[a].cells.assign(static_cast<std::size_t>(rows),
                           std::vector<OscTableCell>(static_cast<std::size_t>(cols)));
    for (int r = 0; r < rows; ++r) {
      const auto& ref = refs[a * static_cast<std::size_t>(rows) + static_cast<std::size_t>(r)];
      char line[64];
      std::snprintf(line, sizeof(line), "%016llx", static_cast<unsigned long long>(ref.hash));
      tables[a].reference_keys.push_back(std::string(line) + "  " + ref.key);
    }
  }

  const std::size_t cells = na * static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  parallel_for(cells, spec.threads, [&](std::size_t i) {
    const std::size_t a = i / static_cast<std::size_t>(rows * cols);
    const std::size_t rc = i % static_cast<std::size_t>(rows * cols);
    const std::size_t r = rc / static_cast<std::size_t>(cols);
    const std::size_t c = rc % static_cast<std::size_t>(cols);
    OscTableCell& cell = tables[a].cells[r][c];
    try {
      const ModelParams params =
          cell_params(spec, spec.alpha_list[a], eps_vals[r], Regime::Oscillatory);
      SolveConfig cfg = cell_config(spec, params, lam_vals[c], spec.t_final,
                                    std::numeric_limits<long>::max());
      KgeState init = data0;
      const double ep = params.eps_power();
      for (auto& v : init.eta.coef()) v /= ep;  // Upsilon = d/dr Phi = eta / eps^{2p}
      EwiSolver solver(grid, cfg);
      const Trajectory traj = solver.solve_oscillatory(init);
      cell.e1 = h_alpha_half_error(
          traj.final_state().psi,
          refs[a * static_cast<std::size_t>(rows) + r].psi.back(), params.alpha);
      cell.iterations_max = traj.stats.max_iterations();
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.note = e.what();
    }
  });

  for (auto& table : tables) {
    for (auto& row : table.cells) {
      for (std::size_t c = 1; c < row.size(); ++c) {
        if (row[c - 1].failed || row[c].failed) continue;
        row[c].order = convergence_order(
            row[c - 1].e1, row[c].e1,
            table.lambda_values[c - 1] / table.lambda_values[c]);
      }
    }
  }
  return tables;
}

void write_oscillatory_table(const StudySpec& spec, const std::vector<OscTable>& tables) {
  std::vector<csv::Record> records;
  std::vector<std::string> ref_lines;
  for (const auto& table : tables) {
    for (std::size_t r = 0; r < table.eps_values.size(); ++r) {
      for (std::size_t c = 0; c < table.lambda_values.size(); ++c) {
        const auto& cell = table.cells[r][c];
        csv::Record rec;
        rec.alpha = table.alpha;
        rec.beta = spec.base.beta;
        rec.eps = table.eps_values[r];
        rec.p = spec.base.power;
        rec.tau = table.lambda_values[c];
        rec.n = n_label(spec.n);
        rec.t_final = spec.t_final;
        rec.e1 = cell.e1;
        rec.e1_max = cell.e1;
        rec.order = cell.order;
        rec.iters_max = cell.failed ? -1 : cell.iterations_max;
        records.push_back(rec);
      }
    }
    for (const auto& key : table.reference_keys)
      ref_lines.push_back("alpha=" + fmt_g(table.alpha) + "  " + key);
  }
  const auto stem = spec.output_dir / spec.stem();
  csv::write_records(stem.string() + ".csv", records, spec.full_precision);

  for (const auto& table : tables) {
    std::vector<std::vector<std::string>> layout;
    std::vector<std::string> head{"e1(r=" + fmt_g(spec.t_final) + ")"};
    for (double lam : table.lambda_values) head.push_back("lambda=" + fmt_g(lam));
    layout.push_back(head);
    for (std::size_t r = 0; r < table.eps_values.size(); ++r) {
      std::vector<std::string> vals{"eps=" + fmt_g(table.eps_values[r])};
      std::vector<std::string> ords{"order"};
      for (std::size_t c = 0; c < table.lambda_values.size(); ++c) {
        const auto& cell = table.cells[r][c];
        vals.push_back(cell.failed ? "failed" : csv::format_number(cell.e1, spec.full_precision));
        ords.push_back(std::isnan(cell.order) ? "-"
                                              : csv::format_number(cell.order, spec.full_precision));
      }
      layout.push_back(vals);
      layout.push_back(ords);
    }
    csv::write_table(stem.string() + "_alpha" + fmt_g(table.alpha) + "_layout.csv", layout);
  }

  std::vector<std::vector<std::string>> refs_tbl;
  for (const auto& line : ref_lines) refs_tbl.push_back({line});
  csv::write_table(stem.string() + "_refs.txt", refs_tbl);

  if (spec.plot_script)
    csv::write_plot_script(stem.string() + "_plot.py", spec.stem() + ".csv", "tau", "e1", true,
                           true);
}

// ---------------------------------------------------------------------------
// long-time eps scaling
// ---------------------------------------------------------------------------

LongTimeResult run_long_time_study(const StudySpec& spec) {
  spec.validate();
  const auto cache = spec.effective_cache_dir();
  const GridPtr grid = make_data_grid(spec.data, spec.n);
  const KgeState data0 = builtin_initial_data(spec.data, grid);

  struct Job {
    double alpha, eps, t_final;
    long stride = 1, stride_e = 1;
    bool skipped = false;
    std::string note;
  };
  std::vector<Job> jobs;
  for (double alpha : spec.alpha_list) {
    for (double eps : spec.eps_list) {
      Job j;
      j.alpha = alpha;
      j.eps = eps;
      ModelParams params = cell_params(spec, alpha, eps, spec.base.regime);
      j.t_final = eps > 0.0 ? spec.t_final / params.eps_power() : spec.t_final;
      const double need = j.t_final / spec.tau_e;
      if (need > static_cast<double>(spec.max_steps)) {
        j.skipped = true;
        j.note = horizon_note(static_cast<long>(need), spec.max_steps);
      } else {
        j.stride = sample_stride(spec, j.t_final, spec.tau);
        j.stride_e = reference_stride(spec, j.stride, spec.tau);
      }
      jobs.push_back(j);
    }
  }

  std::vector<ReferenceData> refs(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
    if (jobs[i].skipped) return;
    ReferenceSpec rs;
    rs.params = cell_params(spec, jobs[i].alpha, jobs[i].eps, spec.base.regime);
    rs.data = spec.data;
    rs.n = spec.n;
    rs.tau_e = spec.tau_e;
    rs.t_final = jobs[i].t_final;
    rs.stride = jobs[i].stride_e;
    rs.max_steps = spec.max_steps;
    rs.fp_tolerance = spec.fp_tolerance;
    rs.fp_max_iterations = spec.fp_max_iterations;
    refs[i] = reference_solution(rs, cache);
  });

  LongTimeResult result;
  result.curves.resize(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
    LongTimeCurve& curve = result.curves[i];
    curve.alpha = jobs[i].alpha;
    curve.eps = jobs[i].eps;
    curve.t_final = jobs[i].t_final;
    curve.skipped = jobs[i].skipped;
    curve.note = jobs[i].note;
    if (curve.skipped) return;

    const ModelParams params = cell_params(spec, jobs[i].alpha, jobs[i].eps, spec.base.regime);
    SolveConfig cfg = cell_config(spec, params, spec.tau, jobs[i].t_final, jobs[i].stride);
    EwiSolver solver(grid, cfg);
    const Trajectory traj = solver.solve(data0);
    check_aligned(refs[i], traj);

    double peak = 0.0;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
      const double e1 =
          h_alpha_half_error(traj.snapshots[s].psi, refs[i].psi[s], params.alpha);
      peak = std::max(peak, e1);
      curve.samples.push_back({traj.snapshots[s].time, e1, peak});
    }
    curve.e1_max = peak;
    curve.iterations_max = traj.stats.max_iterations();
  });

  for (std::size_t a = 0; a < spec.alpha_list.size(); ++a) {
    std::vector<double> ratios;
    for (std::size_t e = 0; e + 1 < spec.eps_list.size(); ++e) {
      const auto& coarse = result.curves[a * spec.eps_list.size() + e];
      const auto& fine = result.curves[a * spec.eps_list.size() + e + 1];
      ratios.push_back(coarse.skipped || fine.skipped || !(fine.e1_max > 0.0)
                           ? std::numeric_limits<double>::quiet_NaN()
                           : coarse.e1_max / fine.e1_max);
    }
    result.ratios.push_back(std::move(ratios));
  }
  return result;
}

void write_long_time_study(const StudySpec& spec, const LongTimeResult& result) {
  const auto stem = spec.output_dir / spec.stem();

  std::vector<csv::Record> records;
  for (const auto& curve : result.curves) {
    csv::Record rec;
    rec.alpha = curve.alpha;
    rec.beta = spec.base.beta;
    rec.eps = curve.eps;
    rec.p = spec.base.power;
    rec.tau = spec.tau;
    rec.n = n_label(spec.n);
    rec.t_final = curve.t_final;
    if (!curve.skipped && !curve.samples.empty()) {
      rec.e1 = curve.samples.back()[1];
      rec.e1_max = curve.e1_max;
      rec.iters_max = curve.iterations_max;
    }
    records.push_back(rec);
  }
  csv::write_records(stem.string() + ".csv", records, spec.full_precision);

  std::vector<std::vector<std::string>> series{{"alpha", "eps", "time", "e1", "e1_max"}};
  for (const auto& curve : result.curves) {
    for (const auto& s : curve.samples) {
      series.push_back({fmt_g(curve.alpha), fmt_g(curve.eps),
                        csv::format_number(s[0], spec.full_precision),
                        csv::format_number(s[1], spec.full_precision),
                        csv::format_number(s[2], spec.full_precision)});
    }
  }
  csv::write_table(stem.string() + "_series.csv", series);

  std::vector<std::vector<std::string>> ratios{{"alpha", "eps_coarse", "eps_fine", "ratio"}};
  for (std::size_t a = 0; a < result.ratios.size(); ++a) {
    for (std::size_t e = 0; e < result.ratios[a].size(); ++e) {
      ratios.push_back({fmt_g(spec.alpha_list[a]), fmt_g(spec.eps_list[e]),
                        fmt_g(spec.eps_list[e + 1]),
                        csv::format_number(result.ratios[a][e], spec.full_precision)});
    }
  }
  csv::write_table(stem.string() + "_ratios.csv", ratios);

  if (spec.plot_script)
    csv::write_plot_script(stem.string() + "_plot.py", spec.stem() + "_series.csv", "time",
                           "e1_max", false, true);
}

// ---------------------------------------------------------------------------
// spatial resolution sweep
// ---------------------------------------------------------------------------

std::vector<SpatialPoint> run_spatial_study(const StudySpec& spec) {
  spec.validate();
  const auto cache = spec.effective_cache_dir();
  const int n_max = *std::max_element(spec.n_list.begin(), spec.n_list.end());
  const int ne = spec.n_e > 0 ? spec.n_e : 2 * n_max;

  struct Group {
    double alpha, eps;
  };
  std::vector<Group> groups;
  for (double alpha : spec.alpha_list)
    for (double eps : spec.eps_list) groups.push_back({alpha, eps});

  std::vector<ReferenceData> refs(groups.size());
  parallel_for(groups.size(), spec.threads, [&](std::size_t g) {
    ReferenceSpec rs;
    rs.params = cell_params(spec, groups[g].alpha, groups[g].eps, spec.base.regime);
    rs.data = spec.data;
    rs.n = {ne};
    rs.tau_e = spec.tau_e;
    rs.t_final = spec.t_final;
    rs.stride = 0;
    rs.max_steps = spec.max_steps;
    rs.fp_tolerance = spec.fp_tolerance;
    rs.fp_max_iterations = spec.fp_max_iterations;
    refs[g] = reference_solution(rs, cache);
  });

  std::vector<SpatialPoint> points(groups.size() * spec.n_list.size());
  parallel_for(points.size(), spec.threads, [&](std::size_t i) {
    const std::size_t g = i / spec.n_list.size();
    const std::size_t c = i % spec.n_list.size();
    SpatialPoint& pt = points[i];
    pt.alpha = groups[g].alpha;
    pt.eps = groups[g].eps;
    pt.n = spec.n_list[c];

    const ModelParams params = cell_params(spec, pt.alpha, pt.eps, spec.base.regime);
    const GridPtr grid = make_data_grid(spec.data, std::vector<int>{pt.n});
    SolveConfig cfg = cell_config(spec, params, spec.tau_e, spec.t_final,
                                  std::numeric_limits<long>::max());
    EwiSolver solver(grid, cfg);
    const Trajectory traj = solver.solve(builtin_initial_data(spec.data, grid));
    pt.e1 = h_alpha_half_error(traj.final_state().psi, refs[g].psi.back(), params.alpha);
    pt.iterations_max = traj.stats.max_iterations();
  });
  return points;
}

void write_spatial_study(const StudySpec& spec, const std::vector<SpatialPoint>& points) {
  std::vector<csv::Record> records;
  for (const auto& pt : points) {
    csv::Record rec;
    rec.alpha = pt.alpha;
    rec.beta = spec.base.beta;
    rec.eps = pt.eps;
    rec.p = spec.base.power;
    rec.tau = spec.tau_e;
    rec.n = std::to_string(pt.n);
    rec.t_final = spec.t_final;
    rec.e1 = pt.e1;
    rec.e1_max = pt.e1;
    rec.iters_max = pt.iterations_max;
    records.push_back(rec);
  }
  const auto stem = spec.output_dir / spec.stem();
  csv::write_records(stem.string() + ".csv", records, spec.full_precision);
  if (spec.plot_script)
    csv::write_plot_script(stem.string() + "_plot.py", spec.stem() + ".csv", "N", "e1", false,
                           true);
}

// ---------------------------------------------------------------------------
// energy conservation
// ---------------------------------------------------------------------------

std::vector<EnergyRun> run_energy_study(const StudySpec& spec) {
  spec.validate();
  const GridPtr grid = make_data_grid(spec.data, spec.n);
  const KgeState data0 = builtin_initial_data(spec.data, grid);

  struct Job {
    double alpha, eps, tau;
  };
  std::vector<Job> jobs;
  for (double alpha : spec.alpha_list)
    for (double eps : spec.eps_list)
      for (double tau : spec.step_list) jobs.push_back({alpha, eps, tau});

  std::vector<EnergyRun> runs(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
    EnergyRun& run = runs[i];
    run.alpha = jobs[i].alpha;
    run.eps = jobs[i].eps;
    run.tau = jobs[i].tau;

    const ModelParams params = cell_params(spec, run.alpha, run.eps, spec.base.regime);
    const long stride = sample_stride(spec, spec.t_final, run.tau);
    SolveConfig cfg = cell_config(spec, params, run.tau, spec.t_final, stride);
    EwiSolver solver(grid, cfg);
    const Trajectory traj = solver.solve(data0);
    run.iterations_max = traj.stats.max_iterations();

    const double e0 = energy(traj.snapshots.front(), params);
    for (const auto& snap : traj.snapshots) {
      EnergyRecord rec;
      rec.time = snap.time;
      rec.energy = energy(snap, params);
      rec.relative_deviation = std::abs(rec.energy - e0) / std::abs(e0);
      run.max_deviation = std::max(run.max_deviation, rec.relative_deviation);
      run.series.push_back(rec);
    }
  });

  // refinement order of the deviation between successive taus of one (alpha, eps)
  const std::size_t nt = spec.step_list.size();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t c = i % nt;
    if (c == 0) continue;
    runs[i].order = convergence_order(runs[i - 1].max_deviation, runs[i].max_deviation,
                                      spec.step_list[c - 1] / spec.step_list[c]);
  }
  return runs;
}

void write_energy_study(const StudySpec& spec, const std::vector<EnergyRun>& runs) {
  std::vector<csv::Record> records;
  for (const auto& run : runs) {
    csv::Record rec;
    rec.alpha = run.alpha;
    rec.beta = spec.base.beta;
    rec.eps = run.eps;
    rec.p = spec.base.power;
    rec.tau = run.tau;
    rec.n = n_label(spec.n);
    rec.t_final = spec.t_final;
    rec.order = run.order;
    rec.energy_dev = run.max_deviation;
    rec.iters_max = run.iterations_max;
    records.push_back(rec);
  }
  const auto stem = spec.output_dir / spec.stem();
  csv::write_records(stem.string() + ".csv", records, spec.full_precision);

  std::vector<std::vector<std::string>> series{
      {"alpha", "eps", "tau", "time", "energy", "relative_deviation"}};
  for (const auto& run : runs) {
    for (const auto& rec : run.series) {
      series.push_back({fmt_g(run.alpha), fmt_g(run.eps), fmt_g(run.tau),
                        csv::format_number(rec.time, spec.full_precision),
                        csv::format_number(rec.energy, true),
                        csv::format_number(rec.relative_deviation, spec.full_precision)});
    }
  }
  csv::write_table(stem.string() + "_series.csv", series);
  if (spec.plot_script)
    csv::write_plot_script(stem.string() + "_plot.py", spec.stem() + "_series.csv", "time",
                           "relative_deviation", false, true);
}

// ---------------------------------------------------------------------------
// temporal refinement
// ---------------------------------------------------------------------------

std::vector<TemporalPoint> run_temporal_study(const StudySpec& spec) {
  spec.validate();
  const auto cache = spec.effective_cache_dir();
  const GridPtr grid = make_data_grid(spec.data, spec.n);
  const KgeState data0 = builtin_initial_data(spec.data, grid);

  struct Group {
    double alpha, eps;
  };
  std::vector<Group> groups;
  for (double alpha : spec.alpha_list)
    for (double eps : spec.eps_list) groups.push_back({alpha, eps});

  std::vector<ReferenceData> refs(groups.size());
  parallel_for(groups.size(), spec.threads, [&](std::size_t g) {
    ReferenceSpec rs;
    rs.params = cell_params(spec, groups[g].alpha, groups[g].eps, spec.base.regime);
    rs.data = spec.data;
    rs.n = spec.n;
    rs.tau_e = spec.tau_e;
    rs.t_final = spec.t_final;
    rs.stride = 0;
    rs.max_steps = spec.max_steps;
    rs.fp_tolerance = spec.fp_tolerance;
    rs.fp_max_iterations = spec.fp_max_iterations;
    refs[g] = reference_solution(rs, cache);
  });

  std::vector<TemporalPoint> points(groups.size() * spec.step_list.size());
  parallel_for(points.size(), spec.threads, [&](std::size_t i) {
    const std::size_t g = i / spec.step_list.size();
    const std::size_t c = i % spec.step_list.size();
    TemporalPoint& pt = points[i];
    pt.alpha = groups[g].alpha;
    pt.eps = groups[g].eps;
    pt.tau = spec.step_list[c];
    try {
      const ModelParams params = cell_params(spec, pt.alpha, pt.eps, spec.base.regime);
      SolveConfig cfg = cell_config(spec, params, pt.tau, spec.t_final,
                                    std::numeric_limits<long>::max());
      EwiSolver solver(grid, cfg);
      const Trajectory traj = solver.solve(data0);
      pt.e1 = h_alpha_half_error(traj.final_state().psi, refs[g].psi.back(), params.alpha);
      pt.iterations_max = traj.stats.max_iterations();
    } catch (const std::exception& e) {
      pt.failed = true;
      pt.note = e.what();
    }
  });

  const std::size_t nt = spec.step_list.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = i % nt;
    if (c == 0 || points[i].failed || points[i - 1].failed) continue;
    points[i].order = convergence_order(points[i - 1].e1, points[i].e1,
                                        spec.step_list[c - 1] / spec.step_list[c]);
  }
  return points;
}

void write_temporal_study(const StudySpec& spec, const std::vector<TemporalPoint>& points) {
  std::vector<csv::Record> records;
  for (const auto& pt : points) {
    csv::Record rec;
    rec.alpha = pt.alpha;
    rec.beta = spec.base.beta;
    rec.eps = pt.eps;
    rec.p = spec.base.power;
    rec.tau = pt.tau;
    rec.n = n_label(spec.n);
    rec.t_final = spec.t_final;
    rec.e1 = pt.e1;
    rec.e1_max = pt.e1;
    rec.order = pt.order;
    rec.iters_max = pt.failed ? -1 : pt.iterations_max;
    records.push_back(rec);
  }
  const auto stem = spec.output_dir / spec.stem();
  csv::write_records(stem.string() + ".csv", records, spec.full_precision);
  if (spec.plot_script)
    csv::write_plot_script(stem.string() + "_plot.py", spec.stem() + ".csv", "tau", "e1", true,
                           true);
}

// ---------------------------------------------------------------------------
// 2D field dumps
// ---------------------------------------------------------------------------

std::vector<Dump2dResult> run_field_dump_2d(const StudySpec& spec) {
  spec.validate();
  const GridPtr grid = make_data_grid(spec.data, spec.n);
  if (grid->dims() != 2)
    throw std::invalid_argument("run_field_dump_2d: selector must give a 2D grid");
  const KgeState data0 = builtin_initial_data(spec.data, grid);
  const double t_final = *std::max_element(spec.dump_times.begin(), spec.dump_times.end());

  std::vector<Dump2dResult> results(spec.alpha_list.size());
  parallel_for(results.size(), spec.threads, [&](std::size_t a) {
    Dump2dResult& res = results[a];
    res.alpha = spec.alpha_list[a];
    res.eps = spec.base.eps;
    res.times = spec.dump_times;

    const ModelParams params = cell_params(spec, res.alpha, spec.base.eps, spec.base.regime);
    // The snapshot grid must hit every dump time: start from the gcd of the
    // dump step counts and halve towards the sampling target.
    long stride = 0;
    for (double t : spec.dump_times) {
      if (t <= 0.0) continue;
      const long steps = std::llround(t / spec.tau);
      if (std::abs(steps * spec.tau - t) > 1e-9 * std::max(1.0, t))
        throw std::invalid_argument("dump time is not a multiple of tau");
      stride = stride == 0 ? steps : std::gcd(stride, steps);
    }
    if (stride == 0) stride = 1;
    const long target = sample_stride(spec, t_final, spec.tau);
    while (stride > target && stride % 2 == 0) stride /= 2;
    SolveConfig cfg = cell_config(spec, params, spec.tau, t_final, stride);
    EwiSolver solver(grid, cfg);
    const Trajectory traj = solver.solve(data0);
    res.iterations_max = traj.stats.max_iterations();

    const double e0 = energy(traj.snapshots.front(), params);
    for (const auto& snap : traj.snapshots) {
      res.energy_dev =
          std::max(res.energy_dev, std::abs(energy(snap, params) - e0) / std::abs(e0));
      const auto values = inverse_transform(snap.psi);
      for (const auto& v : values) res.max_imag = std::max(res.max_imag, std::abs(v.imag()));
    }

    const auto stem = spec.output_dir / spec.stem();
    for (double t : spec.dump_times) {
      std::size_t best = 0;
      for (std::size_t s = 1; s < traj.snapshots.size(); ++s) {
        if (std::abs(traj.snapshots[s].time - t) < std::abs(traj.snapshots[best].time - t))
          best = s;
      }
      if (std::abs(traj.snapshots[best].time - t) > 1e-6 * std::max(1.0, t))
        throw std::logic_error("dump time not hit by the snapshot stride");

      const auto values = inverse_transform(traj.snapshots[best].psi);
      std::vector<std::vector<std::string>> rows{{"x", "y", "re_psi", "im_psi"}};
      const int n1 = grid->axis(0).n, n2 = grid->axis(1).n;
      for (int j1 = 0; j1 < n1; ++j1) {
        for (int j2 = 0; j2 < n2; ++j2) {
          const auto& v = values[static_cast<std::size_t>(j1) * n2 + j2];
          rows.push_back({csv::format_number(grid->node(0, j1), spec.full_precision),
                          csv::format_number(grid->node(1, j2), spec.full_precision),
                          csv::format_number(v.real(), spec.full_precision),
                          csv::format_number(v.imag(), spec.full_precision)});
        }
      }
      const auto file =
          stem.string() + "_alpha" + fmt_g(res.alpha) + "_t" + fmt_g(t) + ".csv";
      csv::write_table(file, rows);
      res.files.emplace_back(file);
    }
  });
  return results;
}

}  // namespace fkge

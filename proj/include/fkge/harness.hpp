#ifndef FKGE_HARNESS_HPP
#define FKGE_HARNESS_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <optional>

#include "fkge/observables.hpp"
#include "fkge/reference.hpp"

namespace fkge {

enum class StudyKind { Temporal, Spatial, LongTime, Energy, OscillatoryTable, FieldDump2d };

std::string to_string(StudyKind k);

/// Parameter grids and protocol settings for one experiment driver run.
struct StudySpec {
  StudyKind kind = StudyKind::OscillatoryTable;
  ModelParams base;  // alpha/eps overridden per cell
  InitialData data = InitialData::ComplexPoly1d;

  std::vector<double> alpha_list{2.0};
  std::vector<double> eps_list;    // temporal/spatial/long-time/energy studies
  std::vector<double> step_list;   // tau list (temporal, energy)
  double tau = 1e-2;               // fixed step (long-time, 2D dump)
  std::vector<int> n{128};         // per-axis mode counts
  std::vector<int> n_list;         // spatial study resolutions
  double t_final = 1.0;
  std::vector<double> dump_times{0.0, 2.0, 8.0, 32.0, 128.0};

  // oscillatory-table grids: eps0/2^k rows, lambda0/4^j columns
  double eps0 = 1.0;
  double lambda0 = 0.05;
  int table_rows = 5;
  int table_cols = 5;

  // reference-solution settings
  double tau_e = 1e-4;
  int n_e = 0;  // spatial study reference resolution; 0 -> 2 * max(n_list)

  long max_steps = 10'000'000;
  double fp_tolerance = 1e-13;
  int fp_max_iterations = 500;
  int target_samples = 256;  // snapshot budget for sampled studies

  int threads = 0;  // 0 -> hardware concurrency
  std::filesystem::path output_dir = ".";
  std::filesystem::path cache_dir;  // empty -> output_dir / "ref_cache"
  std::string label;                // output file stem; empty -> study kind
  bool full_precision = false;
  bool plot_script = false;

  void validate() const;
  std::filesystem::path effective_cache_dir() const;
  std::string stem() const { return label.empty() ? to_string(kind) : label; }
};

// ---- oscillatory convergence table ----------------------------------------

struct OscTableCell {
  double e1 = std::numeric_limits<double>::quiet_NaN();
  double order = std::numeric_limits<double>::quiet_NaN();
  int iterations_max = 0;
  bool failed = false;
  std::string note;
};

struct OscTable {
  double alpha = 2.0;
  std::vector<double> eps_values;
  std::vector<double> lambda_values;
  std::vector<std::vector<OscTableCell>> cells;  // [row][col]
  std::vector<std::string> reference_keys;       // one per row, with hash
};

std::vector<OscTable> run_oscillatory_table(const StudySpec& spec);
void write_oscillatory_table(const StudySpec& spec, const std::vector<OscTable>& tables);

// ---- long-time eps-scaling curves ------------------------------------------

struct LongTimeCurve {
  double alpha = 2.0;
  double eps = 1.0;
  double t_final = 1.0;
  bool skipped = false;  // horizon exceeded the step budget
  std::string note;
  std::vector<std::array<double, 3>> samples;  // t, e1, e1_max
  double e1_max = std::numeric_limits<double>::quiet_NaN();
  int iterations_max = 0;
};

struct LongTimeResult {
  std::vector<LongTimeCurve> curves;  // ordered by (alpha, eps) as listed
  /// e1_max ratio between successive eps entries, per alpha (NaN when skipped).
  std::vector<std::vector<double>> ratios;
};

LongTimeResult run_long_time_study(const StudySpec& spec);
void write_long_time_study(const StudySpec& spec, const LongTimeResult& result);

// ---- spatial resolution sweep ----------------------------------------------

struct SpatialPoint {
  double alpha = 2.0;
  double eps = 1.0;
  int n = 0;
  double e1 = std::numeric_limits<double>::quiet_NaN();
  int iterations_max = 0;
};

std::vector<SpatialPoint> run_spatial_study(const StudySpec& spec);
void write_spatial_study(const StudySpec& spec, const std::vector<SpatialPoint>& points);

// ---- energy conservation ----------------------------------------------------

struct EnergyRun {
  double alpha = 2.0;
  double eps = 1.0;
  double tau = 0.0;
  std::vector<EnergyRecord> series;
  double max_deviation = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();  // vs previous tau in list
  int iterations_max = 0;
};

std::vector<EnergyRun> run_energy_study(const StudySpec& spec);
void write_energy_study(const StudySpec& spec, const std::vector<EnergyRun>& runs);

// ---- temporal refinement at fixed eps ---------------------------------------

struct TemporalPoint {
  double alpha = 2.0;
  double eps = 1.0;
  double tau = 0.0;
  double e1 = std::numeric_limits<double>::quiet_NaN();
  double order = std::numeric_limits<double>::quiet_NaN();
  int iterations_max = 0;
  bool failed = false;
  std::string note;
};

std::vector<TemporalPoint> run_temporal_study(const StudySpec& spec);
void write_temporal_study(const StudySpec& spec, const std::vector<TemporalPoint>& points);

// ---- 2D field dumps -----------------------------------------------------------

struct Dump2dResult {
  double alpha = 2.0;
  double eps = 1.0;
  std::vector<double> times;
  double max_imag = 0.0;    // reality check over all dumped snapshots
  double energy_dev = 0.0;  // max relative deviation over the run
  int iterations_max = 0;
  std::vector<std::filesystem::path> files;
};

std::vector<Dump2dResult> run_field_dump_2d(const StudySpec& spec);

/// Deterministic index-ordered parallel loop used by the studies.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace fkge

#endif

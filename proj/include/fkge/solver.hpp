#ifndef FKGE_SOLVER_HPP
#define FKGE_SOLVER_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fkge/state.hpp"

namespace fkge {

struct SolveConfig {
  ModelParams params;
  double tau = 1e-2;       // time step (lambda for the oscillatory wrapper)
  double t_final = 1.0;    // horizon (r-horizon for the oscillatory wrapper)
  long snapshot_stride = 1;
  double fp_tolerance = 1e-13;  // max coefficient change between Picard iterates
  int fp_max_iterations = 50;
  long max_steps = 10'000'000;

  void validate() const;
};

/// Fixed-point failure at one step: tau too large for the given eps regime.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(long step, double residual);
  long step() const { return step_; }
  double residual() const { return residual_; }

 private:
  long step_;
  double residual_;
};

struct SolverStats {
  std::vector<std::uint16_t> iterations;  // fixed-point count per step
  int max_iterations() const;
  long total_steps() const { return static_cast<long>(iterations.size()); }
};

struct Trajectory {
  std::vector<KgeState> snapshots;  // strictly increasing times, first 0, last t_final
  SolverStats stats;
  const KgeState& final_state() const { return snapshots.back(); }
};

/// Pointwise nonlinearity on grid values: (phi + conj(phi))^3 / 8 for the real
/// cubic case, |psi|^{2p} psi otherwise.
std::vector<Complex> eval_nonlinearity(std::span<const Complex> values, Regime regime, int p);

/// Second-order exponential wave integrator (trapezoidal Duhamel quadrature)
/// for the relativistic Schroedinger reformulation; one instance per solve,
/// symbols and phase tables precomputed for the configured step.
class EwiSolver {
 public:
  EwiSolver(GridPtr grid, SolveConfig cfg);

  const Symbol& symbol() const { return symbol_; }
  const SolveConfig& config() const { return cfg_; }

  NlsState initial_nls(const SpectralField& psi0, const SpectralField& psi1) const;

  /// One step of size config().tau for the real cubic scheme.
  SpectralField step_real(const SpectralField& phi_n);
  /// One step of size config().tau for the coupled phi_{+/-} scheme.
  std::pair<SpectralField, SpectralField> step_coupled(const SpectralField& phi_plus,
                                                       const SpectralField& phi_minus);

  /// March from t = 0 to t_final (shortened last step if not commensurate).
  Trajectory solve(const KgeState& initial);

  /// Time-rescaled run: treats config().tau as lambda = eps^{2p} tau and
  /// config().t_final as the r-horizon; input/output states are (Phi, d/dr Phi).
  Trajectory solve_oscillatory(const KgeState& initial);

 private:
  struct Phases {
    std::vector<Complex> plus;  // e^{+i tau delta_l}; the minus table is the conjugate
    double tau = 0.0;
  };
  Phases make_phases(double tau) const;

  void eval_f_coupled(const std::vector<Complex>& fp, const std::vector<Complex>& fm,
                      std::vector<Complex>& out);
  void eval_g_real(const std::vector<Complex>& phi, std::vector<Complex>& out);

  int advance_real(std::vector<Complex>& phi, const Phases& ph);
  int advance_coupled(std::vector<Complex>& fp, std::vector<Complex>& fm, const Phases& ph);

  Trajectory run(const KgeState& initial, double tau, double t_final);

  GridPtr grid_;
  SolveConfig cfg_;
  Symbol symbol_;
  std::vector<double> inv_delta_;
  Phases main_phases_;
  long current_step_ = 0;

  // workspaces and the nonlinearity transform carried over from the last step
  std::vector<Complex> ws_psi_, ws_grid_, ws_f_, base_p_, base_m_, next_p_, next_m_;
  std::vector<Complex> f_cache_;
  bool f_cache_ok_ = false;
};

}  // namespace fkge

#endif

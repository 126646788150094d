#include "fkge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fkge {

void SolveConfig::validate() const {
  params.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("SolveConfig: tau must be positive");
  if (!(t_final > 0.0)) throw std::invalid_argument("SolveConfig: t_final must be positive");
  if (snapshot_stride < 1) throw std::invalid_argument("SolveConfig: snapshot stride must be >= 1");
  if (!(fp_tolerance > 0.0)) throw std::invalid_argument("SolveConfig: fixed-point tolerance must be positive");
  if (fp_max_iterations < 1) throw std::invalid_argument("SolveConfig: fixed-point iteration cap must be >= 1");
  if (max_steps < 1) throw std::invalid_argument("SolveConfig: max_steps must be >= 1");
}

StepFailure::StepFailure(long step, double residual)
    : std::runtime_error("fixed-point iteration did not converge at step " +
                         std::to_string(step) + " (residual " + std::to_string(residual) +
                         "); tau too large for this eps"),
      step_(step),
      residual_(residual) {}

int SolverStats::max_iterations() const {
  int m = 0;
  for (auto it : iterations) m = std::max(m, static_cast<int>(it));
  return m;
}

std::vector<Complex> eval_nonlinearity(std::span<const Complex> values, Regime regime, int p) {
  std::vector<Complex> out(values.size());
  if (regime == Regime::RealCubic) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double re = values[j].real();
      out[j] = re * re * re;  // (phi + conj phi)^3 / 8
    }
  } else {
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double a = std::norm(values[j]);
      double w = 1.0;
      for (int q = 0; q < p; ++q) w *= a;
      out[j] = w * values[j];
    }
  }
  return out;
}

EwiSolver::EwiSolver(GridPtr grid, SolveConfig cfg)
    : grid_(std::move(grid)), cfg_(cfg) {
  cfg_.validate();
  if (!grid_) throw std::invalid_argument("EwiSolver: null grid");
  symbol_ = make_symbol(grid_, cfg_.params);
  const auto d = symbol_.delta();
  inv_delta_.resize(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) inv_delta_[k] = 1.0 / d[k];
  main_phases_ = make_phases(cfg_.tau);

  const std::size_t m = grid_->total_modes();
  ws_psi_.resize(m);
  ws_grid_.resize(m);
  ws_f_.resize(m);
  base_p_.resize(m);
  base_m_.resize(m);
  next_p_.resize(m);
  next_m_.resize(m);
  f_cache_.resize(m);
}

EwiSolver::Phases EwiSolver::make_phases(double tau) const {
  Phases ph;
  ph.tau = tau;
  const auto d = symbol_.delta();
  ph.plus.resize(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) ph.plus[k] = std::polar(1.0, tau * d[k]);
  return ph;
}

NlsState EwiSolver::initial_nls(const SpectralField& psi0, const SpectralField& psi1) const {
  if (!psi0.grid() || !psi1.grid() || !(*psi0.grid() == *psi1.grid()))
    throw std::invalid_argument("initial_nls: psi0/psi1 grid mismatch");
  return to_nls(KgeState{psi0, psi1, 0.0}, symbol_, cfg_.params.regime);
}

void EwiSolver::eval_f_coupled(const std::vector<Complex>& fp, const std::vector<Complex>& fm,
                               std::vector<Complex>& out) {
  const std::size_t m = fp.size();
  for (std::size_t k = 0; k < m; ++k) ws_psi_[k] = 0.5 * (fp[k] + fm[k]);
  grid_->inverse(ws_psi_, ws_grid_);
  const int p = cfg_.params.power;
  for (std::size_t j = 0; j < m; ++j) {
    const double a = std::norm(ws_grid_[j]);
    double w = 1.0;
    for (int q = 0; q < p; ++q) w *= a;
    ws_grid_[j] *= w;
  }
  grid_->forward(ws_grid_, out);
}

void EwiSolver::eval_g_real(const std::vector<Complex>& phi, std::vector<Complex>& out) {
  grid_->inverse(phi, ws_grid_);
  for (auto& v : ws_grid_) {
    const double re = v.real();
    v = Complex(re * re * re, 0.0);
  }
  grid_->forward(ws_grid_, out);
}

int EwiSolver::advance_real(std::vector<Complex>& phi, const Phases& ph) {
  const std::size_t m = phi.size();
  const double w = 0.5 * cfg_.params.eps_power() * ph.tau;
  if (w == 0.0) {
    for (std::size_t k = 0; k < m; ++k) phi[k] *= ph.plus[k];
    return 0;
  }

  if (!f_cache_ok_) {
    eval_g_real(phi, f_cache_);
    f_cache_ok_ = true;
  }
  // base = e^{i tau <nabla>} (phi^n + w G(phi^n)); predictor adds the explicit
  // G term once more, giving the full eps^{2p} tau weight.
  for (std::size_t k = 0; k < m; ++k) {
    const Complex s = Complex(0.0, inv_delta_[k]) * f_cache_[k];  // i <nabla>^{-1} g
    base_p_[k] = ph.plus[k] * (phi[k] + w * s);
    phi[k] = base_p_[k] + w * (ph.plus[k] * s);
  }

  const double tol2 = cfg_.fp_tolerance * cfg_.fp_tolerance;
  double diff2 = tol2;
  int it = 0;
  while (it < cfg_.fp_max_iterations) {
    eval_g_real(phi, ws_f_);
    ++it;
    diff2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Complex s = Complex(0.0, inv_delta_[k]) * ws_f_[k];
      const Complex np = base_p_[k] + w * s;
      diff2 = std::max(diff2, std::norm(np - phi[k]));
      phi[k] = np;
    }
    if (diff2 <= tol2) {
      f_cache_.swap(ws_f_);  // latest evaluated transform, within tol of phi^{n+1}
      return it;
    }
  }
  f_cache_ok_ = false;
  throw StepFailure(current_step_, std::sqrt(diff2));
}

int EwiSolver::advance_coupled(std::vector<Complex>& fp, std::vector<Complex>& fm,
                               const Phases& ph) {
  const std::size_t m = fp.size();
  const double w = 0.5 * cfg_.params.eps_power() * ph.tau;
  if (w == 0.0) {
    for (std::size_t k = 0; k < m; ++k) {
      fp[k] *= ph.plus[k];
      fm[k] *= std::conj(ph.plus[k]);
    }
    return 0;
  }

  if (!f_cache_ok_) {
    eval_f_coupled(fp, fm, f_cache_);
    f_cache_ok_ = true;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const Complex s = Complex(0.0, inv_delta_[k]) * f_cache_[k];  // i <nabla>^{-1} f
    const Complex pp = ph.plus[k], pm = std::conj(ph.plus[k]);
    base_p_[k] = pp * (fp[k] + w * s);
    base_m_[k] = pm * (fm[k] - w * s);
    fp[k] = base_p_[k] + w * (pp * s);
    fm[k] = base_m_[k] - w * (pm * s);
  }

  const double tol2 = cfg_.fp_tolerance * cfg_.fp_tolerance;
  double diff2 = tol2;
  int it = 0;
  while (it < cfg_.fp_max_iterations) {
    eval_f_coupled(fp, fm, ws_f_);
    ++it;
    diff2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Complex s = Complex(0.0, inv_delta_[k]) * ws_f_[k];
      const Complex np = base_p_[k] + w * s;
      const Complex nm = base_m_[k] - w * s;
      diff2 = std::max(diff2, std::max(std::norm(np - fp[k]), std::norm(nm - fm[k])));
      fp[k] = np;
      fm[k] = nm;
    }
    if (diff2 <= tol2) {
      f_cache_.swap(ws_f_);
      return it;
    }
  }
  f_cache_ok_ = false;
  throw StepFailure(current_step_, std::sqrt(diff2));
}

SpectralField EwiSolver::step_real(const SpectralField& phi_n) {
  if (!phi_n.grid() || !(*phi_n.grid() == *grid_))
    throw std::invalid_argument("step_real: field grid mismatch");
  f_cache_ok_ = false;
  current_step_ = 0;
  std::vector<Complex> phi(phi_n.coef().begin(), phi_n.coef().end());
  advance_real(phi, main_phases_);
  return SpectralField(grid_, std::move(phi));
}

std::pair<SpectralField, SpectralField> EwiSolver::step_coupled(const SpectralField& phi_plus,
                                                                const SpectralField& phi_minus) {
  if (!phi_plus.grid() || !(*phi_plus.grid() == *grid_) || !phi_minus.grid() ||
      !(*phi_minus.grid() == *grid_))
    throw std::invalid_argument("step_coupled: field grid mismatch");
  f_cache_ok_ = false;
  current_step_ = 0;
  std::vector<Complex> fp(phi_plus.coef().begin(), phi_plus.coef().end());
  std::vector<Complex> fm(phi_minus.coef().begin(), phi_minus.coef().end());
  advance_coupled(fp, fm, main_phases_);
  return {SpectralField(grid_, std::move(fp)), SpectralField(grid_, std::move(fm))};
}

Trajectory EwiSolver::run(const KgeState& initial, double tau, double t_final) {
  if (!initial.psi.grid() || !(*initial.psi.grid() == *grid_))
    throw std::invalid_argument("solve: initial state grid mismatch");

  long nfull = static_cast<long>(std::floor(t_final / tau + 1e-9));
  double rem = t_final - static_cast<double>(nfull) * tau;
  const bool partial = rem > 1e-9 * std::max(1.0, std::abs(t_final));
  const long nsteps = nfull + (partial ? 1 : 0);
  if (nsteps > cfg_.max_steps)
    throw std::invalid_argument("solve: step count " + std::to_string(nsteps) +
                                " exceeds configured max_steps");

  const bool real_case = cfg_.params.regime == Regime::RealCubic;
  NlsState nls = to_nls(initial, symbol_, cfg_.params.regime);
  std::vector<Complex> fp(nls.phi_plus.coef().begin(), nls.phi_plus.coef().end());
  std::vector<Complex> fm;
  if (!real_case) fm.assign(nls.phi_minus->coef().begin(), nls.phi_minus->coef().end());

  f_cache_ok_ = false;
  Trajectory traj;
  traj.stats.iterations.reserve(static_cast<std::size_t>(std::min<long>(nsteps, 1 << 24)));

  auto snapshot = [&](double t) {
    NlsState cur;
    cur.regime = cfg_.params.regime;
    cur.time = t;
    cur.phi_plus = SpectralField(grid_, fp);
    if (!real_case) cur.phi_minus.emplace(grid_, fm);
    traj.snapshots.push_back(from_nls(cur, symbol_));
    traj.snapshots.back().time = t;
  };

  snapshot(0.0);
  for (long n = 1; n <= nfull; ++n) {
    current_step_ = n;
    const int its = real_case ? advance_real(fp, main_phases_)
                              : advance_coupled(fp, fm, main_phases_);
    traj.stats.iterations.push_back(
        static_cast<std::uint16_t>(std::min(its, 0xffff)));
    const bool last = (n == nfull) && !partial;
    if (!last && n % cfg_.snapshot_stride == 0) snapshot(static_cast<double>(n) * tau);
  }
  if (partial) {
    current_step_ = nsteps;
    const Phases tail = make_phases(rem);
    const int its =
        real_case ? advance_real(fp, tail) : advance_coupled(fp, fm, tail);
    traj.stats.iterations.push_back(static_cast<std::uint16_t>(std::min(its, 0xffff)));
  }
  snapshot(t_final);
  return traj;
}

Trajectory EwiSolver::solve(const KgeState& initial) {
  return run(initial, cfg_.tau, cfg_.t_final);
}

Trajectory EwiSolver::solve_oscillatory(const KgeState& initial) {
  if (cfg_.params.regime != Regime::Oscillatory)
    throw std::invalid_argument("solve_oscillatory: regime must be oscillatory");
  const double ep = cfg_.params.eps_power();
  if (!(ep > 0.0))
    throw std::invalid_argument("solve_oscillatory: eps must be positive");

  // r = eps^{2p} t; the rescaled problem is solved by the plain scheme with
  // tau = lambda / eps^{2p}, Upsilon = eta / eps^{2p}.
  KgeState unscaled;
  unscaled.time = 0.0;
  unscaled.psi = initial.psi;
  unscaled.eta = SpectralField(initial.eta.grid());
  {
    const auto src = initial.eta.coef();
    auto dst = unscaled.eta.coef();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = ep * src[k];
    unscaled.eta.set_real_valued(initial.eta.real_valued());
  }

  Trajectory traj = run(unscaled, cfg_.tau / ep, cfg_.t_final / ep);
  for (auto& snap : traj.snapshots) {
    snap.time *= ep;
    for (auto& c : snap.eta.coef()) c /= ep;
  }
  return traj;
}

}  // namespace fkge

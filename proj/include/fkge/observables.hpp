#ifndef FKGE_OBSERVABLES_HPP
#define FKGE_OBSERVABLES_HPP

#include <limits>
#include <utility>

#include "fkge/state.hpp"

namespace fkge {

struct EnergyRecord {
  double time = 0.0;
  double energy = 0.0;
  double relative_deviation = 0.0;  // |E(t) - E(0)| / |E(0)|
};

struct ErrorRecord {
  double alpha = 0.0;
  double eps = 0.0;
  int power = 1;
  double step = 0.0;  // tau, or lambda for the rescaled runs
  double e1 = 0.0;
  double e1_max = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();
};

/// Conserved energy
///   E = int |eta|^2 + |(-Lap)^{alpha/4} psi|^2 + beta |psi|^2
///       + eps^{2p}/(p+1) |psi|^{2p+2} dx,
/// quadratic terms summed in coefficient space (Parseval with the |Omega| *
/// node-average volume convention), the power term by the node-sum rule.
double energy(const KgeState& state, const ModelParams& params);

/// H^{alpha/2} distance. The reference may live on a finer grid over the same
/// domain: shared modes are differenced, reference-only modes counted fully.
double h_alpha_half_error(const SpectralField& numeric, const SpectralField& reference,
                          double alpha);

/// Prefix maximum of an (increasing-time, error) sequence.
std::vector<std::pair<double, double>> running_max(
    std::span<const std::pair<double, double>> errors);

/// log(e_coarse/e_fine) / log(refinement); NaN when either error is not positive.
double convergence_order(double e_coarse, double e_fine, double refinement);

}  // namespace fkge

#endif

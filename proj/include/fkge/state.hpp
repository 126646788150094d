#ifndef FKGE_STATE_HPP
#define FKGE_STATE_HPP

#include <optional>

#include "fkge/operators.hpp"

namespace fkge {

/// Wave state (psi, eta = d/dt psi) in coefficient space.
struct KgeState {
  SpectralField psi;
  SpectralField eta;
  double time = 0.0;
};

/// First-order unknowns of the relativistic Schroedinger reformulation.
/// Real case holds phi = psi - i <nabla>^{-1} eta only; the complex case holds
/// the pair phi_{+/-} = psi -/+ i <nabla>^{-1} eta.
struct NlsState {
  Regime regime = Regime::RealCubic;
  SpectralField phi_plus;
  std::optional<SpectralField> phi_minus;
  double time = 0.0;

  const SpectralField& phi() const { return phi_plus; }
  bool coupled() const { return phi_minus.has_value(); }
};

NlsState to_nls(const KgeState& state, const Symbol& symbol, Regime regime);
KgeState from_nls(const NlsState& state, const Symbol& symbol);

}  // namespace fkge

#endif

#include "fkge/state.hpp"

#include <stdexcept>

namespace fkge {

namespace {

void check_pair(const SpectralField& a, const SpectralField& b, const char* what) {
  if (!a.grid() || !b.grid() || !(*a.grid() == *b.grid()))
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

}  // namespace

NlsState to_nls(const KgeState& state, const Symbol& symbol, Regime regime) {
  check_pair(state.psi, state.eta, "to_nls");
  if (!symbol.grid() || !(*symbol.grid() == *state.psi.grid()))
    throw std::invalid_argument("to_nls: symbol grid mismatch");

  const auto psi = state.psi.coef();
  const auto eta = state.eta.coef();
  const auto d = symbol.delta();
  const Complex i_unit(0.0, 1.0);

  NlsState out;
  out.regime = regime;
  out.time = state.time;
  out.phi_plus = SpectralField(state.psi.grid());
  auto fp = out.phi_plus.coef();
  for (std::size_t k = 0; k < psi.size(); ++k) fp[k] = psi[k] - i_unit * eta[k] / d[k];

  if (regime != Regime::RealCubic) {
    out.phi_minus.emplace(state.psi.grid());
    auto fm = out.phi_minus->coef();
    for (std::size_t k = 0; k < psi.size(); ++k) fm[k] = psi[k] + i_unit * eta[k] / d[k];
  }
  return out;
}

KgeState from_nls(const NlsState& state, const Symbol& symbol) {
  if (!state.phi_plus.grid()) throw std::invalid_argument("from_nls: empty state");
  if (!symbol.grid() || !(*symbol.grid() == *state.phi_plus.grid()))
    throw std::invalid_argument("from_nls: symbol grid mismatch");

  // In the real case phi_minus is conj(phi); psi = (phi_+ + phi_-)/2 and
  // eta = (i/2) <nabla> (phi_+ - phi_-) cover both reformulations.
  const SpectralField minus =
      state.coupled() ? *state.phi_minus : conjugate_field(state.phi_plus);
  check_pair(state.phi_plus, minus, "from_nls");

  const auto fp = state.phi_plus.coef();
  const auto fm = minus.coef();
  const auto d = symbol.delta();
  const Complex half_i(0.0, 0.5);

  KgeState out;
  out.time = state.time;
  out.psi = SpectralField(state.phi_plus.grid());
  out.eta = SpectralField(state.phi_plus.grid());
  auto psi = out.psi.coef();
  auto eta = out.eta.coef();
  for (std::size_t k = 0; k < fp.size(); ++k) {
    psi[k] = 0.5 * (fp[k] + fm[k]);
    eta[k] = half_i * d[k] * (fp[k] - fm[k]);
  }
  if (state.regime == Regime::RealCubic) {
    out.psi.set_real_valued(true);
    out.eta.set_real_valued(true);
  }
  return out;
}

}  // namespace fkge

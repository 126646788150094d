#include "fkge/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace fkge {

double energy(const KgeState& state, const ModelParams& params) {
  params.validate();
  if (!state.psi.grid() || !state.eta.grid() || !(*state.psi.grid() == *state.eta.grid()))
    throw std::invalid_argument("energy: psi/eta grid mismatch");
  const auto& grid = *state.psi.grid();
  const auto psi = state.psi.coef();
  const auto eta = state.eta.coef();
  const auto& mu2 = grid.mu_squared();

  double quad = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    quad += std::norm(eta[k]) +
            std::pow(mu2[k], params.alpha / 2.0) * std::norm(psi[k]) +
            params.beta * std::norm(psi[k]);
  }

  // |psi|^{2p+2} integrated by the node sum (spectrally accurate for smooth
  // periodic integrands).
  const auto values = inverse_transform(state.psi);
  double pow_sum = 0.0;
  for (const auto& v : values) {
    const double a = std::norm(v);
    double w = a;
    for (int q = 0; q < params.power; ++q) w *= a;
    pow_sum += w;
  }
  pow_sum /= static_cast<double>(values.size());

  const double ep = params.eps_power();
  return grid.volume() * (quad + ep / (params.power + 1) * pow_sum);
}

double h_alpha_half_error(const SpectralField& numeric, const SpectralField& reference,
                          double alpha) {
  if (!numeric.grid() || !reference.grid())
    throw std::invalid_argument("h_alpha_half_error: empty field");
  const auto& gn = *numeric.grid();
  const auto& gr = *reference.grid();
  if (!gn.compatible_domain(gr))
    throw std::invalid_argument("h_alpha_half_error: incompatible domains");
  const double m = alpha / 2.0;

  if (gn == gr) {
    SpectralField diff(numeric.grid());
    const auto a = numeric.coef();
    const auto b = reference.coef();
    auto d = diff.coef();
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
    return sobolev_norm(diff, m);
  }

  for (int d = 0; d < gn.dims(); ++d) {
    if (gn.axis(d).n > gr.axis(d).n)
      throw std::invalid_argument("h_alpha_half_error: reference must be at least as fine");
  }

  // Walk the reference mode set; subtract the coarse coefficient wherever the
  // coarse mode set contains that mode (mode truncation, not node subsampling).
  const auto& mu2 = gr.mu_squared();
  const auto rc = reference.coef();
  const auto nc = numeric.coef();
  double sum = 0.0;
  const int dims = gr.dims();
  const int nr2 = dims == 2 ? gr.axis(1).n : 1;
  for (std::size_t k = 0; k < rc.size(); ++k) {
    Complex diff = rc[k];
    int modes[2] = {0, 0};
    if (dims == 1) {
      modes[0] = gr.mode_of_index(0, static_cast<int>(k));
    } else {
      modes[0] = gr.mode_of_index(0, static_cast<int>(k) / nr2);
      modes[1] = gr.mode_of_index(1, static_cast<int>(k) % nr2);
    }
    bool shared = true;
    for (int d = 0; d < dims; ++d) {
      const int half = gn.axis(d).n / 2;
      if (modes[d] < -half || modes[d] > half - 1) {
        shared = false;
        break;
      }
    }
    if (shared) diff -= nc[gn.flat_index(std::span<const int>(modes, static_cast<std::size_t>(dims)))];
    sum += std::pow(1.0 + mu2[k], m) * std::norm(diff);
  }
  return std::sqrt(sum);
}

std::vector<std::pair<double, double>> running_max(
    std::span<const std::pair<double, double>> errors) {
  std::vector<std::pair<double, double>> out;
  out.reserve(errors.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    peak = i == 0 ? errors[i].second : std::max(peak, errors[i].second);
    out.emplace_back(errors[i].first, peak);
  }
  return out;
}

double convergence_order(double e_coarse, double e_fine, double refinement) {
  if (!(refinement > 1.0))
    throw std::invalid_argument("convergence_order: refinement must exceed 1");
  if (!(e_coarse > 0.0) || !(e_fine > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log(e_coarse / e_fine) / std::log(refinement);
}

}  // namespace fkge

#include "fkge/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace fkge {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::RealCubic: return "real-cubic";
    case Regime::ComplexPower: return "complex-power";
    case Regime::Oscillatory: return "oscillatory";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  if (s == "real-cubic") return Regime::RealCubic;
  if (s == "complex-power") return Regime::ComplexPower;
  if (s == "oscillatory") return Regime::Oscillatory;
  throw std::invalid_argument("unknown regime: " + s);
}

void ModelParams::validate() const {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw std::invalid_argument("ModelParams: alpha must lie in (1, 2]");
  if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be positive");
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("ModelParams: eps must lie in [0, 1]");
  if (power < 1) throw std::invalid_argument("ModelParams: power p must be >= 1");
  if (regime == Regime::RealCubic && power != 1)
    throw std::invalid_argument("ModelParams: real-cubic regime requires p = 1");
}

double ModelParams::eps_power() const {
  double e2 = eps * eps;
  double out = 1.0;
  for (int i = 0; i < power; ++i) out *= e2;
  return out;
}

Symbol::Symbol(GridPtr grid, double alpha, double beta)
    : grid_(std::move(grid)), alpha_(alpha), beta_(beta) {
  const auto& mu2 = grid_->mu_squared();
  delta_.resize(mu2.size());
  for (std::size_t k = 0; k < mu2.size(); ++k)
    delta_[k] = std::sqrt(beta_ + std::pow(mu2[k], alpha_ / 2.0));
}

Symbol make_symbol(const GridPtr& grid, const ModelParams& params) {
  params.validate();
  return Symbol(grid, params.alpha, params.beta);
}

namespace {

template <typename W>
SpectralField multiply(const SpectralField& field, std::span<const W> weights) {
  if (!field.grid()) throw std::invalid_argument("apply_multiplier: empty field");
  if (weights.size() != field.grid()->total_modes())
    throw std::invalid_argument("apply_multiplier: weight table does not match mode set");
  SpectralField out(field.grid());
  const auto src = field.coef();
  auto dst = out.coef();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] * weights[k];
  return out;
}

void check_symbol(const SpectralField& field, const Symbol& symbol) {
  if (!symbol.grid() || !field.grid() || !(*symbol.grid() == *field.grid()))
    throw std::invalid_argument("symbol built on a different grid than the field");
}

}  // namespace

SpectralField apply_multiplier(const SpectralField& field, std::span<const double> weights) {
  return multiply(field, weights);
}

SpectralField apply_multiplier(const SpectralField& field, std::span<const Complex> weights) {
  auto out = multiply(field, weights);
  out.set_real_valued(false);
  return out;
}

SpectralField nabla_alpha(const SpectralField& field, const Symbol& symbol) {
  check_symbol(field, symbol);
  auto out = multiply(field, symbol.delta());
  out.set_real_valued(field.real_valued());
  return out;
}

SpectralField nabla_alpha_inv(const SpectralField& field, const Symbol& symbol) {
  check_symbol(field, symbol);
  SpectralField out(field.grid());
  const auto src = field.coef();
  const auto d = symbol.delta();
  auto dst = out.coef();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] / d[k];
  out.set_real_valued(field.real_valued());
  return out;
}

SpectralField quarter_laplacian(const SpectralField& field, const ModelParams& params) {
  params.validate();
  if (!field.grid()) throw std::invalid_argument("quarter_laplacian: empty field");
  const auto& mu2 = field.grid()->mu_squared();
  SpectralField out(field.grid());
  const auto src = field.coef();
  auto dst = out.coef();
  for (std::size_t k = 0; k < src.size(); ++k)
    dst[k] = src[k] * std::pow(mu2[k], params.alpha / 4.0);
  out.set_real_valued(field.real_valued());
  return out;
}

SpectralField propagate(const SpectralField& field, const Symbol& symbol, double t, int sign) {
  check_symbol(field, symbol);
  if (sign != 1 && sign != -1) throw std::invalid_argument("propagate: sign must be +1 or -1");
  SpectralField out(field.grid());
  const auto src = field.coef();
  const auto d = symbol.delta();
  auto dst = out.coef();
  for (std::size_t k = 0; k < src.size(); ++k)
    dst[k] = src[k] * std::polar(1.0, sign * t * d[k]);
  return out;
}

}  // namespace fkge

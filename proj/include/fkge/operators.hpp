#ifndef FKGE_OPERATORS_HPP
#define FKGE_OPERATORS_HPP

#include <string>

#include "fkge/grid.hpp"

namespace fkge {

/// Which form of the equation is being solved.
///  RealCubic:    real field, cubic nonlinearity eps^2 psi^3.
///  ComplexPower: complex field, eps^{2p} |psi|^{2p} psi, coupled phi_{+/-} system.
///  Oscillatory:  ComplexPower after the time rescaling r = eps^{2p} t (step given
///                as lambda = eps^{2p} tau).
enum class Regime { RealCubic, ComplexPower, Oscillatory };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

struct ModelParams {
  double alpha = 2.0;  // fractional Laplacian order, (1, 2]
  double beta = 1.0;   // mass term, > 0
  double eps = 1.0;    // nonlinearity strength, [0, 1] (0 = linear flow)
  int power = 1;       // p in |psi|^{2p} psi
  Regime regime = Regime::RealCubic;

  void validate() const;
  /// eps^{2p}, the nonlinear coupling in front of the Duhamel term.
  double eps_power() const;
};

/// Per-mode table of delta_l = sqrt(beta + |mu_l|^alpha).
class Symbol {
 public:
  Symbol() = default;
  Symbol(GridPtr grid, double alpha, double beta);

  const GridPtr& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::span<const double> delta() const { return delta_; }
  double delta_at(std::size_t k) const { return delta_[k]; }

 private:
  GridPtr grid_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::vector<double> delta_;
};

Symbol make_symbol(const GridPtr& grid, const ModelParams& params);

/// Coefficient-wise product with a per-mode weight table.
SpectralField apply_multiplier(const SpectralField& field, std::span<const double> weights);
SpectralField apply_multiplier(const SpectralField& field, std::span<const Complex> weights);

/// sqrt(beta + (-Laplace)^{alpha/2}) and its inverse.
SpectralField nabla_alpha(const SpectralField& field, const Symbol& symbol);
SpectralField nabla_alpha_inv(const SpectralField& field, const Symbol& symbol);

/// (-Laplace)^{alpha/4}: multiply coefficients by |mu_l|^{alpha/2}.
SpectralField quarter_laplacian(const SpectralField& field, const ModelParams& params);

/// exp(i * sign * t * delta_l); unimodular, an isometry in every Sobolev norm.
SpectralField propagate(const SpectralField& field, const Symbol& symbol, double t,
                        int sign = +1);

}  // namespace fkge

#endif

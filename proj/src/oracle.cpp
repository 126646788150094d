#include "fkge/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace fkge {

namespace {

void rhs(const SpectralGrid& grid, const Symbol& symbol, double eps2,
         const std::vector<Complex>& phi, std::vector<Complex>& out,
         std::vector<Complex>& work) {
  grid.inverse(phi, work);
  for (auto& v : work) {
    const double re = v.real();
    v = Complex(re * re * re, 0.0);
  }
  grid.forward(work, out);
  const auto d = symbol.delta();
  for (std::size_t k = 0; k < phi.size(); ++k)
    out[k] = Complex(0.0, d[k]) * phi[k] + eps2 * Complex(0.0, 1.0 / d[k]) * out[k];
}

}  // namespace

SpectralField rk4_reference_real(const SpectralField& phi0, const Symbol& symbol,
                                 const ModelParams& params, double tau, double t_final) {
  params.validate();
  if (params.regime != Regime::RealCubic)
    throw std::invalid_argument("rk4_reference_real: real-cubic regime only");
  if (!(tau > 0.0) || !(t_final > 0.0))
    throw std::invalid_argument("rk4_reference_real: tau and t_final must be positive");
  const auto& grid = *phi0.grid();
  const double eps2 = params.eps * params.eps;

  const long nsteps = std::llround(t_final / tau);
  if (std::abs(nsteps * tau - t_final) > 1e-9 * std::max(1.0, t_final))
    throw std::invalid_argument("rk4_reference_real: t_final must be a multiple of tau");

  std::vector<Complex> u(phi0.coef().begin(), phi0.coef().end());
  const std::size_t m = u.size();
  std::vector<Complex> k1(m), k2(m), k3(m), k4(m), stage(m), work(m);

  for (long n = 0; n < nsteps; ++n) {
    rhs(grid, symbol, eps2, u, k1, work);
    for (std::size_t k = 0; k < m; ++k) stage[k] = u[k] + 0.5 * tau * k1[k];
    rhs(grid, symbol, eps2, stage, k2, work);
    for (std::size_t k = 0; k < m; ++k) stage[k] = u[k] + 0.5 * tau * k2[k];
    rhs(grid, symbol, eps2, stage, k3, work);
    for (std::size_t k = 0; k < m; ++k) stage[k] = u[k] + tau * k3[k];
    rhs(grid, symbol, eps2, stage, k4, work);
    for (std::size_t k = 0; k < m; ++k)
      u[k] += tau / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return SpectralField(phi0.grid(), std::move(u));
}

}  // namespace fkge

#ifndef FKGE_ORACLE_HPP
#define FKGE_ORACLE_HPP

#include "fkge/state.hpp"

namespace fkge {

/// Classical four-stage Runge-Kutta reference integrator for the first-order
/// form d/dt phi = i <nabla> phi + eps^2 i <nabla>^{-1} (Re phi)^3, acting on
/// Fourier coefficients with the nonlinearity evaluated pointwise on the grid.
/// Verification-only: shares no stepping code with EwiSolver.
SpectralField rk4_reference_real(const SpectralField& phi0, const Symbol& symbol,
                                 const ModelParams& params, double tau, double t_final);

}  // namespace fkge

#endif

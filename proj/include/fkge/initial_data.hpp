#ifndef FKGE_INITIAL_DATA_HPP
#define FKGE_INITIAL_DATA_HPP

#include <string>

#include "fkge/state.hpp"

namespace fkge {

/// Built-in initial conditions used by the experiment drivers.
///  SmoothReal1d:  psi0 = 3/(2+cos^2 x),        psi1 = 3/(4+cos^2 x)        on (0, 2pi)
///  SmoothReal2d:  psi0 = 2/(1+cos^2(2pi x+y)), psi1 = 3/(2+2cos^2(2pi x+y)) on (0,1)x(0,2pi)
///  ComplexPoly1d: psi0 = x^2(x-1)^2 + 3,       psi1 = x(x-1)(2x-1) + 3i cos(2pi x) on (0,1)
enum class InitialData { SmoothReal1d, SmoothReal2d, ComplexPoly1d };

std::string to_string(InitialData d);
InitialData initial_data_from_string(const std::string& s);

/// Canonical grid for a selector; n holds the per-axis mode counts.
GridPtr make_data_grid(InitialData d, std::span<const int> n);

/// Samples the selector's formulas at the grid nodes and transforms.
/// Throws on dimension/domain mismatch.
KgeState builtin_initial_data(InitialData d, const GridPtr& grid);

}  // namespace fkge

#endif

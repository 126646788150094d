#include "fkge/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fkge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_domain(const SpectralGrid& grid, InitialData d) {
  const auto close = [](double x, double y) { return std::abs(x - y) < 1e-12; };
  switch (d) {
    case InitialData::SmoothReal1d:
      if (grid.dims() != 1 || !close(grid.axis(0).a, 0.0) || !close(grid.axis(0).b, kTwoPi))
        throw std::invalid_argument("builtin_initial_data: selector needs Omega = (0, 2pi)");
      return;
    case InitialData::SmoothReal2d:
      if (grid.dims() != 2 || !close(grid.axis(0).a, 0.0) || !close(grid.axis(0).b, 1.0) ||
          !close(grid.axis(1).a, 0.0) || !close(grid.axis(1).b, kTwoPi))
        throw std::invalid_argument(
            "builtin_initial_data: selector needs Omega = (0,1) x (0, 2pi)");
      return;
    case InitialData::ComplexPoly1d:
      if (grid.dims() != 1 || !close(grid.axis(0).a, 0.0) || !close(grid.axis(0).b, 1.0))
        throw std::invalid_argument("builtin_initial_data: selector needs Omega = (0, 1)");
      return;
  }
  throw std::invalid_argument("builtin_initial_data: unknown selector");
}

}  // namespace

std::string to_string(InitialData d) {
  switch (d) {
    case InitialData::SmoothReal1d: return "smooth-real-1d";
    case InitialData::SmoothReal2d: return "smooth-real-2d";
    case InitialData::ComplexPoly1d: return "complex-poly-1d";
  }
  return "?";
}

InitialData initial_data_from_string(const std::string& s) {
  if (s == "smooth-real-1d") return InitialData::SmoothReal1d;
  if (s == "smooth-real-2d") return InitialData::SmoothReal2d;
  if (s == "complex-poly-1d") return InitialData::ComplexPoly1d;
  throw std::invalid_argument("unknown initial data selector: " + s);
}

GridPtr make_data_grid(InitialData d, std::span<const int> n) {
  switch (d) {
    case InitialData::SmoothReal1d:
      if (n.size() != 1) throw std::invalid_argument("make_data_grid: need one mode count");
      return SpectralGrid::create_1d(0.0, kTwoPi, n[0]);
    case InitialData::SmoothReal2d:
      if (n.size() != 2) throw std::invalid_argument("make_data_grid: need two mode counts");
      return SpectralGrid::create_2d(0.0, 1.0, n[0], 0.0, kTwoPi, n[1]);
    case InitialData::ComplexPoly1d:
      if (n.size() != 1) throw std::invalid_argument("make_data_grid: need one mode count");
      return SpectralGrid::create_1d(0.0, 1.0, n[0]);
  }
  throw std::invalid_argument("make_data_grid: unknown selector");
}

KgeState builtin_initial_data(InitialData d, const GridPtr& grid) {
  if (!grid) throw std::invalid_argument("builtin_initial_data: null grid");
  require_domain(*grid, d);

  const std::size_t m = grid->total_modes();
  std::vector<Complex> psi0(m), psi1(m);
  bool real_data = true;

  if (d == InitialData::SmoothReal1d) {
    for (int j = 0; j < grid->axis(0).n; ++j) {
      const double c = std::cos(grid->node(0, j));
      psi0[static_cast<std::size_t>(j)] = 3.0 / (2.0 + c * c);
      psi1[static_cast<std::size_t>(j)] = 3.0 / (4.0 + c * c);
    }
  } else if (d == InitialData::SmoothReal2d) {
    const int n1 = grid->axis(0).n, n2 = grid->axis(1).n;
    for (int j1 = 0; j1 < n1; ++j1) {
      const double x = grid->node(0, j1);
      for (int j2 = 0; j2 < n2; ++j2) {
        const double y = grid->node(1, j2);
        const double c = std::cos(kTwoPi * x + y);
        const std::size_t k = static_cast<std::size_t>(j1) * n2 + j2;
        psi0[k] = 2.0 / (1.0 + c * c);
        psi1[k] = 3.0 / (2.0 + 2.0 * c * c);
      }
    }
  } else {
    real_data = false;
    for (int j = 0; j < grid->axis(0).n; ++j) {
      const double x = grid->node(0, j);
      psi0[static_cast<std::size_t>(j)] = x * x * (x - 1.0) * (x - 1.0) + 3.0;
      psi1[static_cast<std::size_t>(j)] =
          Complex(x * (x - 1.0) * (2.0 * x - 1.0), 3.0 * std::cos(kTwoPi * x));
    }
  }

  KgeState out;
  out.time = 0.0;
  out.psi = forward_transform(std::span<const Complex>(psi0), grid);
  out.eta = forward_transform(std::span<const Complex>(psi1), grid);
  out.psi.set_real_valued(real_data);
  out.eta.set_real_valued(real_data);
  return out;
}

}  // namespace fkge

#ifndef FKGE_REFERENCE_HPP
#define FKGE_REFERENCE_HPP

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "fkge/initial_data.hpp"
#include "fkge/solver.hpp"

namespace fkge {

/// A fine-step run used as the `exact' solution by the error studies.
struct ReferenceSpec {
  ModelParams params;  // regime describes the underlying (unscaled) equation
  InitialData data = InitialData::SmoothReal1d;
  std::vector<int> n;  // per-axis mode counts
  double tau_e = 1e-4;
  double t_final = 1.0;
  long stride = 0;  // reference steps between snapshots; 0 -> final state only
  long max_steps = 10'000'000;
  double fp_tolerance = 1e-13;
  int fp_max_iterations = 500;

  std::string cache_key() const;
};

struct ReferenceData {
  std::vector<double> times;
  std::vector<SpectralField> psi;
  std::string key;
  std::uint64_t hash = 0;
};

std::uint64_t fnv1a64(std::string_view s);

/// Compute the reference (or load it from cache_dir when a file with a
/// matching key exists); stores new results with an atomic rename.
ReferenceData reference_solution(const ReferenceSpec& spec,
                                 const std::filesystem::path& cache_dir);

}  // namespace fkge

#endif

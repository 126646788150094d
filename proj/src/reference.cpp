#include "fkge/reference.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace fkge {

namespace {

constexpr char kMagic[] = "FKGEREFv1\n";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(in);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string ReferenceSpec::cache_key() const {
  std::string key = "alpha=" + fmt(params.alpha) + ";beta=" + fmt(params.beta) +
                    ";eps=" + fmt(params.eps) + ";p=" + std::to_string(params.power) +
                    ";regime=" + to_string(params.regime) + ";data=" + to_string(data) + ";n=";
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i) key += 'x';
    key += std::to_string(n[i]);
  }
  key += ";tau_e=" + fmt(tau_e) + ";t=" + fmt(t_final) + ";stride=" + std::to_string(stride);
  return key;
}

namespace {

bool try_load(const std::filesystem::path& file, const std::string& key, const GridPtr& grid,
              ReferenceData& out) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(kMagic) - 1);
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic) - 1) != 0) return false;
  std::uint64_t key_len = 0;
  if (!get(in, key_len) || key_len > 4096) return false;
  std::string stored(key_len, '\0');
  in.read(stored.data(), static_cast<std::streamsize>(key_len));
  if (!in || stored != key) return false;
  std::uint64_t count = 0;
  if (!get(in, count) || count == 0 || count > (1u << 22)) return false;

  const std::size_t m = grid->total_modes();
  out.times.resize(count);
  out.psi.clear();
  out.psi.reserve(count);
  for (std::uint64_t s = 0; s < count; ++s) {
    if (!get(in, out.times[s])) return false;
    SpectralField f(grid);
    in.read(reinterpret_cast<char*>(f.coef().data()),
            static_cast<std::streamsize>(m * sizeof(Complex)));
    if (!in) return false;
    out.psi.push_back(std::move(f));
  }
  return true;
}

void store(const std::filesystem::path& file, const std::string& key, const ReferenceData& data) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write reference cache " + tmp);
    out.write(kMagic, sizeof(kMagic) - 1);
    put(out, static_cast<std::uint64_t>(key.size()));
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    put(out, static_cast<std::uint64_t>(data.psi.size()));
    for (std::size_t s = 0; s < data.psi.size(); ++s) {
      put(out, data.times[s]);
      const auto c = data.psi[s].coef();
      out.write(reinterpret_cast<const char*>(c.data()),
                static_cast<std::streamsize>(c.size() * sizeof(Complex)));
    }
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace

ReferenceData reference_solution(const ReferenceSpec& spec,
                                 const std::filesystem::path& cache_dir) {
  spec.params.validate();
  ReferenceData out;
  out.key = spec.cache_key();
  out.hash = fnv1a64(out.key);

  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.ref", static_cast<unsigned long long>(out.hash));
  const auto file = cache_dir / name;

  const GridPtr grid = make_data_grid(spec.data, spec.n);
  if (!cache_dir.empty() && try_load(file, out.key, grid, out)) return out;

  SolveConfig cfg;
  cfg.params = spec.params;
  if (cfg.params.regime == Regime::Oscillatory) cfg.params.regime = Regime::ComplexPower;
  cfg.tau = spec.tau_e;
  cfg.t_final = spec.t_final;
  cfg.max_steps = spec.max_steps;
  cfg.fp_tolerance = spec.fp_tolerance;
  cfg.fp_max_iterations = spec.fp_max_iterations;
  cfg.snapshot_stride = spec.stride > 0 ? spec.stride : std::numeric_limits<long>::max();

  EwiSolver solver(grid, cfg);
  Trajectory traj = solver.solve(builtin_initial_data(spec.data, grid));
  out.times.clear();
  out.psi.clear();
  for (auto& snap : traj.snapshots) {
    out.times.push_back(snap.time);
    out.psi.push_back(std::move(snap.psi));
  }
  if (!cache_dir.empty()) store(file, out.key, out);
  return out;
}

}  // namespace fkge

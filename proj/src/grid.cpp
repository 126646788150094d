#include "fkge/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fkge {

namespace {

// The FFTW planner is process-global and not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralGrid::SpectralGrid(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2)
    throw std::invalid_argument("SpectralGrid: dims must be 1 or 2");
  total_ = 1;
  for (const auto& ax : axes_) {
    if (!(ax.b > ax.a)) throw std::invalid_argument("SpectralGrid: requires b > a");
    if (ax.n < 4 || ax.n % 2 != 0)
      throw std::invalid_argument("SpectralGrid: N must be even and >= 4");
    total_ *= static_cast<std::size_t>(ax.n);
  }

  mu_squared_.resize(total_);
  if (dims() == 1) {
    for (int j = 0; j < axes_[0].n; ++j) {
      const double mu = frequency(0, mode_of_index(0, j));
      mu_squared_[static_cast<std::size_t>(j)] = mu * mu;
    }
  } else {
    const int n1 = axes_[0].n, n2 = axes_[1].n;
    for (int j1 = 0; j1 < n1; ++j1) {
      const double mu1 = frequency(0, mode_of_index(0, j1));
      for (int j2 = 0; j2 < n2; ++j2) {
        const double mu2 = frequency(1, mode_of_index(1, j2));
        mu_squared_[static_cast<std::size_t>(j1) * n2 + j2] = mu1 * mu1 + mu2 * mu2;
      }
    }
  }

  // Plans are created once per grid; FFTW_UNALIGNED lets fftw_execute_dft run on
  // arbitrary caller buffers, FFTW_ESTIMATE keeps planning deterministic.
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<Complex> buf(total_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dims() == 1) {
    plan_fwd_ = fftw_plan_dft_1d(axes_[0].n, as_fftw(buf.data()), as_fftw(buf.data()),
                                 FFTW_FORWARD, flags);
    plan_bwd_ = fftw_plan_dft_1d(axes_[0].n, as_fftw(buf.data()), as_fftw(buf.data()),
                                 FFTW_BACKWARD, flags);
  } else {
    plan_fwd_ = fftw_plan_dft_2d(axes_[0].n, axes_[1].n, as_fftw(buf.data()),
                                 as_fftw(buf.data()), FFTW_FORWARD, flags);
    plan_bwd_ = fftw_plan_dft_2d(axes_[0].n, axes_[1].n, as_fftw(buf.data()),
                                 as_fftw(buf.data()), FFTW_BACKWARD, flags);
  }
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("SpectralGrid: FFT planning failed");
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::shared_ptr<const SpectralGrid> SpectralGrid::create(std::vector<AxisSpec> axes) {
  return std::shared_ptr<const SpectralGrid>(new SpectralGrid(std::move(axes)));
}

std::shared_ptr<const SpectralGrid> SpectralGrid::create_1d(double a, double b, int n) {
  return create({AxisSpec{a, b, n}});
}

std::shared_ptr<const SpectralGrid> SpectralGrid::create_2d(double a1, double b1, int n1,
                                                            double a2, double b2, int n2) {
  return create({AxisSpec{a1, b1, n1}, AxisSpec{a2, b2, n2}});
}

double SpectralGrid::spacing(int d) const {
  const auto& ax = axis(d);
  return (ax.b - ax.a) / ax.n;
}

double SpectralGrid::volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.b - ax.a;
  return v;
}

int SpectralGrid::mode_of_index(int d, int j) const {
  const int n = axis(d).n;
  return j < n / 2 ? j : j - n;
}

int SpectralGrid::index_of_mode(int d, int l) const {
  const int n = axis(d).n;
  if (l < -n / 2 || l > n / 2 - 1)
    throw std::out_of_range("SpectralGrid: mode outside {-N/2,...,N/2-1}");
  return l >= 0 ? l : l + n;
}

double SpectralGrid::frequency(int d, int l) const {
  return 2.0 * std::numbers::pi * l / length(d);
}

std::size_t SpectralGrid::flat_index(std::span<const int> modes) const {
  if (static_cast<int>(modes.size()) != dims())
    throw std::invalid_argument("SpectralGrid: mode tuple arity mismatch");
  std::size_t k = 0;
  for (int d = 0; d < dims(); ++d)
    k = k * static_cast<std::size_t>(axis(d).n) + static_cast<std::size_t>(index_of_mode(d, modes[static_cast<std::size_t>(d)]));
  return k;
}

std::size_t SpectralGrid::reflect(std::size_t k) const {
  if (dims() == 1) {
    const std::size_t n = static_cast<std::size_t>(axes_[0].n);
    return (n - k) % n;
  }
  const std::size_t n1 = static_cast<std::size_t>(axes_[0].n);
  const std::size_t n2 = static_cast<std::size_t>(axes_[1].n);
  const std::size_t j1 = k / n2, j2 = k % n2;
  return ((n1 - j1) % n1) * n2 + (n2 - j2) % n2;
}

void SpectralGrid::forward(std::span<const Complex> nodes, std::span<Complex> coeffs) const {
  if (nodes.size() != total_ || coeffs.size() != total_)
    throw std::invalid_argument("SpectralGrid::forward: buffer length mismatch with grid");
  if (coeffs.data() != nodes.data())
    std::copy(nodes.begin(), nodes.end(), coeffs.begin());
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), as_fftw(coeffs.data()),
                   as_fftw(coeffs.data()));
  const double scale = 1.0 / static_cast<double>(total_);
  for (auto& c : coeffs) c *= scale;
}

void SpectralGrid::inverse(std::span<const Complex> coeffs, std::span<Complex> nodes) const {
  if (nodes.size() != total_ || coeffs.size() != total_)
    throw std::invalid_argument("SpectralGrid::inverse: buffer length mismatch with grid");
  if (nodes.data() != coeffs.data())
    std::copy(coeffs.begin(), coeffs.end(), nodes.begin());
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), as_fftw(nodes.data()),
                   as_fftw(nodes.data()));
}

bool SpectralGrid::compatible_domain(const SpectralGrid& other) const {
  if (dims() != other.dims()) return false;
  for (int d = 0; d < dims(); ++d) {
    if (axis(d).a != other.axis(d).a || axis(d).b != other.axis(d).b) return false;
  }
  return true;
}

bool SpectralGrid::operator==(const SpectralGrid& other) const {
  if (!compatible_domain(other)) return false;
  for (int d = 0; d < dims(); ++d)
    if (axis(d).n != other.axis(d).n) return false;
  return true;
}

SpectralField::SpectralField(GridPtr grid)
    : grid_(std::move(grid)), coef_(grid_ ? grid_->total_modes() : 0) {}

SpectralField::SpectralField(GridPtr grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coef_(std::move(coeffs)) {
  if (!grid_ || coef_.size() != grid_->total_modes())
    throw std::invalid_argument("SpectralField: coefficient count mismatch with grid");
}

Complex SpectralField::mode(int l) const {
  return coef_[static_cast<std::size_t>(grid_->index_of_mode(0, l))];
}

Complex& SpectralField::mode(int l) {
  return coef_[static_cast<std::size_t>(grid_->index_of_mode(0, l))];
}

Complex SpectralField::mode(int l1, int l2) const {
  const int m[2] = {l1, l2};
  return coef_[grid_->flat_index(m)];
}

Complex& SpectralField::mode(int l1, int l2) {
  const int m[2] = {l1, l2};
  return coef_[grid_->flat_index(m)];
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    const std::size_t r = grid_->reflect(k);
    worst = std::max(worst, std::abs(std::conj(coef_[r]) - coef_[k]));
  }
  return worst;
}

SpectralField forward_transform(std::span<const Complex> values, GridPtr grid) {
  if (!grid) throw std::invalid_argument("forward_transform: null grid");
  if (values.size() != grid->total_modes())
    throw std::invalid_argument("forward_transform: value count mismatch with grid");
  SpectralField out(grid);
  grid->forward(values, out.coef());
  return out;
}

SpectralField forward_transform(std::span<const double> values, GridPtr grid) {
  std::vector<Complex> tmp(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) tmp[i] = values[i];
  SpectralField out = forward_transform(std::span<const Complex>(tmp), std::move(grid));
  out.set_real_valued(true);
  return out;
}

std::vector<Complex> inverse_transform(const SpectralField& field) {
  if (!field.grid()) throw std::invalid_argument("inverse_transform: empty field");
  std::vector<Complex> out(field.coef().size());
  field.grid()->inverse(field.coef(), out);
  return out;
}

double sobolev_norm(const SpectralField& field, double m) {
  if (m < 0.0) throw std::invalid_argument("sobolev_norm: order m must be >= 0");
  if (!field.grid()) throw std::invalid_argument("sobolev_norm: empty field");
  const auto& mu2 = field.grid()->mu_squared();
  const auto c = field.coef();
  double sum = 0.0;
  if (m == 0.0) {
    for (std::size_t k = 0; k < c.size(); ++k) sum += std::norm(c[k]);
  } else {
    for (std::size_t k = 0; k < c.size(); ++k)
      sum += std::pow(1.0 + mu2[k], m) * std::norm(c[k]);
  }
  return std::sqrt(sum);
}

SpectralField conjugate_field(const SpectralField& field) {
  SpectralField out(field.grid());
  const auto src = field.coef();
  auto dst = out.coef();
  const auto& g = *field.grid();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = std::conj(src[g.reflect(k)]);
  out.set_real_valued(field.real_valued());
  return out;
}

}  // namespace fkge

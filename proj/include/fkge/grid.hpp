#ifndef FKGE_GRID_HPP
#define FKGE_GRID_HPP

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace fkge {

using Complex = std::complex<double>;

/// One periodic axis of the computational domain: interval (a, b) sampled at
/// n equispaced nodes x_j = a + j*(b-a)/n, j = 0..n-1 (node n folds onto node 0).
struct AxisSpec {
  double a = 0.0;
  double b = 1.0;
  int n = 0;  // even, >= 4
};

/// Periodic tensor grid in 1 or 2 dimensions with the trigonometric-interpolation
/// mode set {-n/2, ..., n/2-1} per axis and frequencies mu_l = 2*pi*l/(b-a).
///
/// The grid owns the FFT plans for its node count; transform results follow the
/// interpolation convention
///   forward:  c_l = (1/M) sum_j v_j exp(-i mu_l (x_j - a))     (M = total nodes)
///   inverse:  v_j = sum_l c_l exp(+i mu_l (x_j - a))
/// Coefficients are stored in FFT natural order (l = 0..n/2-1, -n/2..-1 per axis,
/// row-major across axes); use mode_of_index()/flat_index() to translate.
class SpectralGrid {
 public:
  static std::shared_ptr<const SpectralGrid> create(std::vector<AxisSpec> axes);
  static std::shared_ptr<const SpectralGrid> create_1d(double a, double b, int n);
  static std::shared_ptr<const SpectralGrid> create_2d(double a1, double b1, int n1,
                                                       double a2, double b2, int n2);
  ~SpectralGrid();

  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int dims() const { return static_cast<int>(axes_.size()); }
  const AxisSpec& axis(int d) const { return axes_[static_cast<std::size_t>(d)]; }
  std::size_t total_modes() const { return total_; }
  double spacing(int d) const;
  double length(int d) const { return axis(d).b - axis(d).a; }
  double volume() const;

  /// Signed mode number of axis index j in 0..n-1 (natural FFT order).
  int mode_of_index(int d, int j) const;
  /// Axis index of a signed mode l in {-n/2, ..., n/2-1}.
  int index_of_mode(int d, int l) const;
  /// Frequency mu_l = 2*pi*l/(b-a) for a signed mode of axis d.
  double frequency(int d, int l) const;
  double node(int d, int j) const { return axis(d).a + spacing(d) * j; }

  /// Flat coefficient index from per-axis signed modes (size must equal dims()).
  std::size_t flat_index(std::span<const int> modes) const;
  /// Flat index of the reflected mode -l (per axis, -n/2 maps to itself).
  std::size_t reflect(std::size_t k) const;

  /// |mu_l|^2 per flat coefficient index (2D: mu_1^2 + mu_2^2).
  const std::vector<double>& mu_squared() const { return mu_squared_; }

  /// In-place-safe discrete transforms on raw buffers of total_modes() entries.
  void forward(std::span<const Complex> nodes, std::span<Complex> coeffs) const;
  void inverse(std::span<const Complex> coeffs, std::span<Complex> nodes) const;

  bool compatible_domain(const SpectralGrid& other) const;
  bool operator==(const SpectralGrid& other) const;

 private:
  explicit SpectralGrid(std::vector<AxisSpec> axes);

  std::vector<AxisSpec> axes_;
  std::size_t total_ = 0;
  std::vector<double> mu_squared_;
  void* plan_fwd_ = nullptr;  // fftw_plan, kept opaque here
  void* plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

/// Complex Fourier-coefficient array over a grid's mode set.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(GridPtr grid);
  SpectralField(GridPtr grid, std::vector<Complex> coeffs);

  const GridPtr& grid() const { return grid_; }
  std::span<const Complex> coef() const { return coef_; }
  std::span<Complex> coef() { return coef_; }
  std::vector<Complex>& data() { return coef_; }
  const std::vector<Complex>& data() const { return coef_; }

  /// Coefficient of a signed 1D mode.
  Complex mode(int l) const;
  Complex& mode(int l);
  /// Coefficient of a signed 2D mode pair.
  Complex mode(int l1, int l2) const;
  Complex& mode(int l1, int l2);

  bool real_valued() const { return real_valued_; }
  void set_real_valued(bool v) { real_valued_ = v; }

  /// Max |conj(c_{-l}) - c_l| over all modes; 0 for an exactly Hermitian set.
  double hermitian_defect() const;

 private:
  GridPtr grid_;
  std::vector<Complex> coef_;
  bool real_valued_ = false;
};

/// Interpolation coefficients of node samples (throws on length mismatch).
SpectralField forward_transform(std::span<const Complex> values, GridPtr grid);
SpectralField forward_transform(std::span<const double> values, GridPtr grid);
/// Node values of a coefficient set.
std::vector<Complex> inverse_transform(const SpectralField& field);

/// ( sum_l (1 + |mu_l|^2)^m |c_l|^2 )^{1/2}; m = 0 is the plain L2 convention.
double sobolev_norm(const SpectralField& field, double m);

/// Coefficient-space conjugation c_l -> conj(c_{-l}) (grid-value conjugate).
SpectralField conjugate_field(const SpectralField& field);

}  // namespace fkge

#endif

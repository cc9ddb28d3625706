#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wwlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Integer lattice frequency (k1[, k2]) of the 2pi-periodic torus.
struct Wavevector {
  int dim = 1;
  int k[2] = {0, 0};

  double norm2() const { return static_cast<double>(k[0]) * k[0] + (dim == 2 ? static_cast<double>(k[1]) * k[1] : 0.0); }
  double norm() const;
  bool is_zero() const { return k[0] == 0 && (dim == 1 || k[1] == 0); }
  bool operator==(const Wavevector&) const = default;
};

// Uniform periodic grid on [0, 2pi)^d, d in {1, 2}, N points per axis.
// Flat index is row-major (axis 0 slowest).
class Grid {
 public:
  Grid() = default;
  Grid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  double spacing() const { return kTwoPi / n_; }
  // Quadrature weight of one node, (2pi/N)^d.
  double cell_weight() const;
  double node(int j) const { return spacing() * j; }
  // Coordinates of the flat node index.
  void coordinates(std::size_t flat, double& x, double& y) const;

  // Signed frequency of an FFT index: 0..N/2 then -N/2+1..-1.
  int frequency(int index) const { return index <= n_ / 2 ? index : index - n_; }
  // FFT index of a signed frequency in -N/2+1..N/2; -1 if outside.
  int index_of(int k) const;
  Wavevector wavevector(std::size_t flat) const;
  // Flat index of a lattice wavevector; returns false if not representable.
  bool flat_index(const Wavevector& k, std::size_t& flat) const;
  // Frequency with the Nyquist mode mapped to zero (used by odd derivatives).
  int derivative_frequency(int index) const { return index == n_ / 2 ? 0 : frequency(index); }
  // True if the mode survives 2/3 dealiasing.
  bool dealiased_mode(std::size_t flat) const;

  bool operator==(const Grid& o) const { return dim_ == o.dim_ && n_ == o.n_; }

 private:
  int dim_ = 1;
  int n_ = 8;
  std::size_t size_ = 8;
};

// Periodic field stored by nodal values; spectral coefficients are
// c_k = N^-d sum_j u_j e^{-i k.x_j}.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& grid);
  SpectralField(const Grid& grid, std::vector<cplx> values);

  static SpectralField from_real(const Grid& grid, std::span<const double> values);
  static SpectralField from_function(const Grid& grid, const std::function<double(double, double)>& f);
  static SpectralField from_coefficients(const Grid& grid, std::span<const cplx> coeffs);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  std::vector<cplx> coefficients() const;
  std::vector<double> real_values() const;
  SpectralField real_part() const;
  SpectralField imag_part() const;
  // max |Im u| <= tol * max(1, max |u|)
  bool is_real(double tol = 1e-12) const;
  double max_abs() const;
  double min_real() const;
  double max_real() const;
  cplx mean() const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
  SpectralField& operator*=(cplx a);
  SpectralField operator-() const;

 private:
  void check_same_grid(const SpectralField& o) const;

  Grid grid_;
  std::vector<cplx> values_ = std::vector<cplx>(8);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);
SpectralField operator*(cplx s, SpectralField a);

// Normalized forward transform (nodal values -> coefficients) and its inverse.
void fft_forward(const Grid& grid, std::span<const cplx> values, std::span<cplx> coeffs);
void fft_inverse(const Grid& grid, std::span<const cplx> coeffs, std::span<cplx> values);

// Tabulated Fourier multiplier m(k) on the lattice of a grid.
class FourierMultiplier {
 public:
  FourierMultiplier() = default;
  // Throws std::invalid_argument if any value is non-finite.
  static FourierMultiplier from_function(const Grid& grid, const std::function<cplx(const Wavevector&)>& symbol,
                                         cplx value_at_zero, double order);
  static FourierMultiplier from_table(const Grid& grid, std::vector<cplx> table, double order);

  const Grid& grid() const { return grid_; }
  double order() const { return order_; }
  std::span<const cplx> table() const { return table_; }
  // m(-k) = conj(m(k)) on the lattice, so real fields stay real.
  bool preserves_reality() const { return hermitian_; }

  FourierMultiplier operator*(const FourierMultiplier& o) const;

 private:
  void finalize();

  Grid grid_;
  std::vector<cplx> table_;
  double order_ = 0.0;
  bool hermitian_ = true;
};

SpectralField apply_multiplier(const FourierMultiplier& m, const SpectralField& u);

// Common multipliers.
FourierMultiplier abs_derivative(const Grid& grid);        // |D|
FourierMultiplier japanese_derivative(const Grid& grid);   // <D> = (1+|D|^2)^(1/2)
FourierMultiplier partial_derivative(const Grid& grid, int axis);
FourierMultiplier flat_dirichlet_neumann(const Grid& grid, double depth);  // |D| tanh(h|D|)

// sqrt(sum_k <k>^{2s} |c_k|^2); s = 0 is the grid-averaged L2 norm.
double sobolev_norm(const SpectralField& u, double s);
// Grid-averaged L2 inner product sum_k conj(a_k) b_k.
cplx inner_product(const SpectralField& a, const SpectralField& b);
// Trapezoid quadrature of u over the torus (2pi)^d.
cplx integrate(const SpectralField& u);

// 2/3 rule: zero every mode with some |k_m| > N/3.
SpectralField dealias(const SpectralField& u);
SpectralField pointwise_product(const SpectralField& a, const SpectralField& b);
// dealias(a * b)
SpectralField product(const SpectralField& a, const SpectralField& b);

std::vector<SpectralField> gradient(const SpectralField& u);
SpectralField divergence(std::span<const SpectralField> components);
SpectralField laplacian(const SpectralField& u);
// Drop the k = 0 coefficient.
SpectralField remove_mean(const SpectralField& u);

// Text format: "# grid d N L" header, then rows "x [y] value" (a trailing
// imaginary column is written for complex fields).
void write_field(std::ostream& os, const SpectralField& u);
SpectralField read_field(std::istream& is);
// Rows "k [l] re im" of the normalized coefficients.
void write_spectrum(std::ostream& os, const SpectralField& u);

}  // namespace wwlab

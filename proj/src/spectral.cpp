#include "wwlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "fft_plans.hpp"
#include "wwlab/simd/kernels.hpp"

namespace wwlab {

double Wavevector::norm() const { return std::sqrt(norm2()); }

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("grid size N must be a power of two >= 8");
  if ((dim == 1 && n > (1 << 20)) || (dim == 2 && n > 4096)) throw std::invalid_argument("grid size N too large");
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

double Grid::cell_weight() const { return dim_ == 1 ? spacing() : spacing() * spacing(); }

void Grid::coordinates(std::size_t flat, double& x, double& y) const {
  if (dim_ == 1) {
    x = node(static_cast<int>(flat));
    y = 0.0;
  } else {
    x = node(static_cast<int>(flat / n_));
    y = node(static_cast<int>(flat % n_));
  }
}

int Grid::index_of(int k) const {
  if (k <= -n_ / 2 || k > n_ / 2) return -1;
  return k >= 0 ? k : k + n_;
}

Wavevector Grid::wavevector(std::size_t flat) const {
  Wavevector w;
  w.dim = dim_;
  if (dim_ == 1) {
    w.k[0] = frequency(static_cast<int>(flat));
  } else {
    w.k[0] = frequency(static_cast<int>(flat / n_));
    w.k[1] = frequency(static_cast<int>(flat % n_));
  }
  return w;
}

bool Grid::flat_index(const Wavevector& k, std::size_t& flat) const {
  const int i0 = index_of(k.k[0]);
  if (i0 < 0) return false;
  if (dim_ == 1) {
    flat = static_cast<std::size_t>(i0);
    return true;
  }
  const int i1 = index_of(k.k[1]);
  if (i1 < 0) return false;
  flat = static_cast<std::size_t>(i0) * n_ + i1;
  return true;
}

bool Grid::dealiased_mode(std::size_t flat) const {
  const Wavevector w = wavevector(flat);
  const double cut = n_ / 3.0;
  if (std::abs(w.k[0]) > cut) return false;
  return dim_ == 1 || std::abs(w.k[1]) <= cut;
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(const Grid& grid) : grid_(grid), values_(grid.size()) {}

SpectralField::SpectralField(const Grid& grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field value count does not match grid");
}

SpectralField SpectralField::from_real(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw std::invalid_argument("field value count does not match grid");
  std::vector<cplx> v(values.begin(), values.end());
  return SpectralField(grid, std::move(v));
}

SpectralField SpectralField::from_function(const Grid& grid, const std::function<double(double, double)>& f) {
  SpectralField u(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x, y;
    grid.coordinates(i, x, y);
    u.values_[i] = f(x, y);
  }
  return u;
}

SpectralField SpectralField::from_coefficients(const Grid& grid, std::span<const cplx> coeffs) {
  if (coeffs.size() != grid.size()) throw std::invalid_argument("coefficient count does not match grid");
  SpectralField u(grid);
  fft_inverse(grid, coeffs, u.values_);
  return u;
}

std::vector<cplx> SpectralField::coefficients() const {
  std::vector<cplx> c(values_.size());
  fft_forward(grid_, values_, c);
  return c;
}

std::vector<double> SpectralField::real_values() const {
  std::vector<double> r(values_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = values_[i].real();
  return r;
}

SpectralField SpectralField::real_part() const {
  SpectralField r(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] = values_[i].real();
  return r;
}

SpectralField SpectralField::imag_part() const {
  SpectralField r(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] = values_[i].imag();
  return r;
}

bool SpectralField::is_real(double tol) const {
  double mi = 0.0;
  for (const cplx& v : values_) mi = std::max(mi, std::abs(v.imag()));
  return mi <= tol * std::max(1.0, max_abs());
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const cplx& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SpectralField::min_real() const {
  double m = values_.empty() ? 0.0 : values_[0].real();
  for (const cplx& v : values_) m = std::min(m, v.real());
  return m;
}

double SpectralField::max_real() const {
  double m = values_.empty() ? 0.0 : values_[0].real();
  for (const cplx& v : values_) m = std::max(m, v.real());
  return m;
}

cplx SpectralField::mean() const {
  cplx s = 0.0;
  for (const cplx& v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

bool SpectralField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

void SpectralField::check_same_grid(const SpectralField& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (cplx& v : values_) v *= a;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (cplx& v : values_) v *= a;
  return *this;
}

SpectralField SpectralField::operator-() const {
  SpectralField r = *this;
  r *= -1.0;
  return r;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

// ---------------------------------------------------------------------------

void fft_forward(const Grid& grid, std::span<const cplx> values, std::span<cplx> coeffs) {
  if (values.size() != grid.size() || coeffs.size() != grid.size()) throw std::invalid_argument("fft size mismatch");
  if (values.data() == coeffs.data()) {
    std::vector<cplx> tmp(values.begin(), values.end());
    detail::c2c(grid.dim(), grid.n(), true, tmp.data(), coeffs.data());
  } else {
    detail::c2c(grid.dim(), grid.n(), true, values.data(), coeffs.data());
  }
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (cplx& c : coeffs) c *= scale;
}

void fft_inverse(const Grid& grid, std::span<const cplx> coeffs, std::span<cplx> values) {
  if (values.size() != grid.size() || coeffs.size() != grid.size()) throw std::invalid_argument("fft size mismatch");
  if (values.data() == coeffs.data()) {
    std::vector<cplx> tmp(coeffs.begin(), coeffs.end());
    detail::c2c(grid.dim(), grid.n(), false, tmp.data(), values.data());
  } else {
    detail::c2c(grid.dim(), grid.n(), false, coeffs.data(), values.data());
  }
}

// ---------------------------------------------------------------------------

FourierMultiplier FourierMultiplier::from_function(const Grid& grid,
                                                   const std::function<cplx(const Wavevector&)>& symbol,
                                                   cplx value_at_zero, double order) {
  FourierMultiplier m;
  m.grid_ = grid;
  m.order_ = order;
  m.table_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Wavevector k = grid.wavevector(i);
    m.table_[i] = k.is_zero() ? value_at_zero : symbol(k);
  }
  m.finalize();
  return m;
}

FourierMultiplier FourierMultiplier::from_table(const Grid& grid, std::vector<cplx> table, double order) {
  if (table.size() != grid.size()) throw std::invalid_argument("multiplier table size does not match grid");
  FourierMultiplier m;
  m.grid_ = grid;
  m.order_ = order;
  m.table_ = std::move(table);
  m.finalize();
  return m;
}

void FourierMultiplier::finalize() {
  for (const cplx& v : table_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("Fourier multiplier has a non-finite value on the lattice");
  }
  hermitian_ = true;
  const int n = grid_.n();
  for (std::size_t i = 0; i < table_.size() && hermitian_; ++i) {
    Wavevector k = grid_.wavevector(i);
    Wavevector mk = k;
    for (int a = 0; a < k.dim; ++a) mk.k[a] = (k.k[a] == n / 2) ? n / 2 : -k.k[a];
    std::size_t j;
    if (!grid_.flat_index(mk, j)) continue;
    if (std::abs(table_[j] - std::conj(table_[i])) > 1e-14 * (1.0 + std::abs(table_[i]))) hermitian_ = false;
  }
}

FourierMultiplier FourierMultiplier::operator*(const FourierMultiplier& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("multipliers live on different grids");
  std::vector<cplx> t(table_.size());
  simd::active().cmul(t.data(), table_.data(), o.table_.data(), t.size());
  return from_table(grid_, std::move(t), order_ + o.order_);
}

namespace {

bool exactly_real(const SpectralField& u) {
  return std::all_of(u.values().begin(), u.values().end(), [](const cplx& v) { return v.imag() == 0.0; });
}

void drop_imag(SpectralField& u) {
  for (cplx& v : u.values()) v = cplx(v.real(), 0.0);
}

template <class F>
SpectralField spectral_map(const SpectralField& u, bool keep_real, F&& f) {
  const bool real_in = keep_real && exactly_real(u);
  std::vector<cplx> c = u.coefficients();
  f(c);
  SpectralField r = SpectralField::from_coefficients(u.grid(), c);
  if (real_in) drop_imag(r);
  return r;
}

}  // namespace

SpectralField apply_multiplier(const FourierMultiplier& m, const SpectralField& u) {
  if (!(m.grid() == u.grid())) throw std::invalid_argument("multiplier and field live on different grids");
  return spectral_map(u, m.preserves_reality(), [&](std::vector<cplx>& c) {
    simd::active().cmul(c.data(), c.data(), m.table().data(), c.size());
  });
}

FourierMultiplier abs_derivative(const Grid& grid) {
  return FourierMultiplier::from_function(grid, [](const Wavevector& k) { return cplx(k.norm()); }, 0.0, 1.0);
}

FourierMultiplier japanese_derivative(const Grid& grid) {
  return FourierMultiplier::from_function(grid, [](const Wavevector& k) { return cplx(std::sqrt(1.0 + k.norm2())); },
                                          1.0, 1.0);
}

FourierMultiplier partial_derivative(const Grid& grid, int axis) {
  if (axis < 0 || axis >= grid.dim()) throw std::invalid_argument("derivative axis out of range");
  std::vector<cplx> t(grid.size());
  const int n = grid.n();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int idx = grid.dim() == 1 ? static_cast<int>(i) : (axis == 0 ? static_cast<int>(i / n) : static_cast<int>(i % n));
    t[i] = cplx(0.0, grid.derivative_frequency(idx));
  }
  return FourierMultiplier::from_table(grid, std::move(t), 1.0);
}

FourierMultiplier flat_dirichlet_neumann(const Grid& grid, double depth) {
  if (!(depth > 0.0)) throw std::invalid_argument("depth must be positive");
  return FourierMultiplier::from_function(
      grid, [depth](const Wavevector& k) { return cplx(k.norm() * std::tanh(depth * k.norm())); }, 0.0, 1.0);
}

double sobolev_norm(const SpectralField& u, double s) {
  const std::vector<cplx> c = u.coefficients();
  const Grid& g = u.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double w = std::pow(1.0 + g.wavevector(i).norm2(), s);
    sum += w * std::norm(c[i]);
  }
  return std::sqrt(sum);
}

cplx inner_product(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s / static_cast<double>(a.size());
}

cplx integrate(const SpectralField& u) {
  cplx s = 0.0;
  for (const cplx& v : u.values()) s += v;
  return s * u.grid().cell_weight();
}

SpectralField dealias(const SpectralField& u) {
  const Grid& g = u.grid();
  return spectral_map(u, true, [&](std::vector<cplx>& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
      if (!g.dealiased_mode(i)) c[i] = 0.0;
  });
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
  SpectralField r(a.grid());
  simd::active().cmul(r.values().data(), a.values().data(), b.values().data(), r.size());
  return r;
}

SpectralField product(const SpectralField& a, const SpectralField& b) { return dealias(pointwise_product(a, b)); }

std::vector<SpectralField> gradient(const SpectralField& u) {
  std::vector<SpectralField> out;
  for (int axis = 0; axis < u.grid().dim(); ++axis) out.push_back(apply_multiplier(partial_derivative(u.grid(), axis), u));
  return out;
}

SpectralField divergence(std::span<const SpectralField> components) {
  if (components.empty()) throw std::invalid_argument("divergence of an empty vector field");
  const Grid& g = components[0].grid();
  if (static_cast<int>(components.size()) != g.dim()) throw std::invalid_argument("vector field has wrong dimension");
  SpectralField r(g);
  for (int axis = 0; axis < g.dim(); ++axis) r += apply_multiplier(partial_derivative(g, axis), components[axis]);
  return r;
}

SpectralField laplacian(const SpectralField& u) {
  const std::vector<SpectralField> gr = gradient(u);
  return divergence(gr);
}

SpectralField remove_mean(const SpectralField& u) {
  SpectralField r = u;
  const cplx m = u.mean();
  for (cplx& v : r.values()) v -= m;
  return r;
}

// ---------------------------------------------------------------------------

void write_field(std::ostream& os, const SpectralField& u) {
  const Grid& g = u.grid();
  const bool real = u.is_real(0.0);
  os << "# grid " << g.dim() << ' ' << g.n() << ' ' << std::setprecision(17) << kTwoPi << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double x, y;
    g.coordinates(i, x, y);
    os << x;
    if (g.dim() == 2) os << ' ' << y;
    os << ' ' << u[i].real();
    if (!real) os << ' ' << u[i].imag();
    os << '\n';
  }
}

SpectralField read_field(std::istream& is) {
  std::string line;
  int dim = 0, n = 0;
  double period = 0.0;
  while (std::getline(is, line)) {
    if (line.rfind("# grid", 0) == 0) {
      std::istringstream hs(line.substr(6));
      if (!(hs >> dim >> n >> period)) throw std::runtime_error("malformed field header: " + line);
      break;
    }
    if (!line.empty() && line[0] != '#') throw std::runtime_error("field file lacks a '# grid d N L' header");
  }
  if (dim == 0) throw std::runtime_error("field file lacks a '# grid d N L' header");
  if (std::abs(period - kTwoPi) > 1e-9) throw std::runtime_error("only 2pi-periodic fields are supported");
  Grid g(dim, n);
  SpectralField u(g);
  std::size_t count = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x = 0, y = 0, re = 0, im = 0;
    if (!(ls >> x)) throw std::runtime_error("malformed field row: " + line);
    if (dim == 2 && !(ls >> y)) throw std::runtime_error("malformed field row: " + line);
    if (!(ls >> re)) throw std::runtime_error("malformed field row: " + line);
    if (!(ls >> im)) im = 0.0;
    if (count >= g.size()) throw std::runtime_error("field file has too many rows");
    u[count++] = cplx(re, im);
  }
  if (count != g.size()) throw std::runtime_error("field file has too few rows");
  return u;
}

void write_spectrum(std::ostream& os, const SpectralField& u) {
  const Grid& g = u.grid();
  const std::vector<cplx> c = u.coefficients();
  os << "# spectrum " << g.dim() << ' ' << g.n() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Wavevector k = g.wavevector(i);
    os << k.k[0];
    if (g.dim() == 2) os << ' ' << k.k[1];
    os << ' ' << c[i].real() << ' ' << c[i].imag() << '\n';
  }
}

}  // namespace wwlab

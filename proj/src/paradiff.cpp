#include "wwlab/paradiff.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "fft_plans.hpp"
#include "wwlab/littlewood_paley.hpp"

namespace wwlab {

namespace {

constexpr std::size_t kMaxCachedJets = 400000;
constexpr std::size_t kMaxCachedCoefficients = 4000000;

bool has_nyquist(const Grid& g, const Wavevector& k) {
  for (int a = 0; a < g.dim(); ++a)
    if (std::abs(k.k[a]) >= g.n() / 2) return true;
  return false;
}

Wavevector shifted(const Wavevector& xi, int axis, int by) {
  Wavevector r = xi;
  r.k[axis] += by;
  return r;
}

bool exactly_real(const SpectralField& u) {
  return std::all_of(u.values().begin(), u.values().end(), [](const cplx& v) { return v.imag() == 0.0; });
}

SpectralField keep_real_if(SpectralField r, bool real) {
  if (real)
    for (cplx& v : r.values()) v = cplx(v.real(), 0.0);
  return r;
}

void check_grid(const SymbolDescriptor& a, const SpectralField& u) {
  if (!(a.grid() == u.grid())) throw std::invalid_argument("symbol and field live on different grids");
}

// Jet component accessors used by dx_column.
template <class F>
void for_each_component(int d, int order, F&& f) {
  f([](Jet& j) -> cplx& { return j.v; });
  if (order >= 1)
    for (int a = 0; a < d; ++a) f([a](Jet& j) -> cplx& { return j.g[a]; });
  if (order >= 2)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) f([a, b](Jet& j) -> cplx& { return j.h[a][b]; });
}

int column_order(const SymbolColumn& c) {
  int o = 2;
  for (const Jet& j : c) o = std::min(o, j.order);
  return o;
}

class HomogeneousImpl : public SymbolImpl {
 public:
  HomogeneousImpl(const SpectralField& c, double m) : c_(c.values().begin(), c.values().end()), m_(m), d_(c.grid().dim()) {}
  SymbolColumn column(const Wavevector& xi) const override {
    Jet n2;
    for (int a = 0; a < d_; ++a) {
      const Jet x = Jet::variable(xi.k[a], a);
      n2 += x * x;
    }
    const Jet w = pow(n2, 0.5 * m_);
    SymbolColumn col(c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) col[j] = w * c_[j];
    return col;
  }

 private:
  std::vector<cplx> c_;
  double m_;
  int d_;
};

class MultiplierImpl : public SymbolImpl {
 public:
  MultiplierImpl(std::size_t size, std::function<cplx(const Wavevector&)> f) : size_(size), f_(std::move(f)) {}
  SymbolColumn column(const Wavevector& xi) const override {
    Jet j = Jet::constant(f_(xi));
    j.order = 0;
    return SymbolColumn(size_, j);
  }

 private:
  std::size_t size_;
  std::function<cplx(const Wavevector&)> f_;
};

class TransportImpl : public SymbolImpl {
 public:
  explicit TransportImpl(std::span<const SpectralField> v) {
    for (const SpectralField& f : v) v_.push_back(f.real_values());
  }
  SymbolColumn column(const Wavevector& xi) const override {
    SymbolColumn col(v_[0].size());
    for (std::size_t j = 0; j < col.size(); ++j) {
      Jet s;
      for (std::size_t a = 0; a < v_.size(); ++a) s += Jet::variable(xi.k[a], static_cast<int>(a)) * v_[a][j];
      col[j] = s * cplx(0.0, 1.0);
    }
    return col;
  }

 private:
  std::vector<std::vector<double>> v_;
};

class FunctionImpl : public SymbolImpl {
 public:
  FunctionImpl(const Grid& g, std::function<cplx(double, double, const Wavevector&)> f) : g_(g), f_(std::move(f)) {}
  SymbolColumn column(const Wavevector& xi) const override {
    SymbolColumn col(g_.size());
    for (std::size_t j = 0; j < col.size(); ++j) {
      double x, y;
      g_.coordinates(j, x, y);
      col[j] = Jet::constant(f_(x, y, xi));
      col[j].order = 0;
    }
    return col;
  }

 private:
  Grid g_;
  std::function<cplx(double, double, const Wavevector&)> f_;
};

class SumImpl : public SymbolImpl {
 public:
  SumImpl(SymbolDescriptor a, SymbolDescriptor b) : a_(std::move(a)), b_(std::move(b)) {}
  SymbolColumn column(const Wavevector& xi) const override {
    SymbolColumn r = *a_.column(xi);
    const auto b = b_.column(xi);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += (*b)[j];
    return r;
  }

 private:
  SymbolDescriptor a_, b_;
};

class ScaledImpl : public SymbolImpl {
 public:
  ScaledImpl(SymbolDescriptor a, cplx s) : a_(std::move(a)), s_(s) {}
  SymbolColumn column(const Wavevector& xi) const override {
    SymbolColumn r = *a_.column(xi);
    for (Jet& j : r) j *= s_;
    return r;
  }

 private:
  SymbolDescriptor a_;
  cplx s_;
};

class ComposeImpl : public SymbolImpl {
 public:
  ComposeImpl(SymbolDescriptor a, SymbolDescriptor b, double rho) : a_(std::move(a)), b_(std::move(b)), rho_(rho) {}
  SymbolColumn column(const Wavevector& xi) const override {
    const auto a = a_.column(xi);
    const auto b = b_.column(xi);
    SymbolColumn r(a->size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = (*a)[j] * (*b)[j];
    if (rho_ > 1.0) {
      const Grid& g = a_.grid();
      for (int ax = 0; ax < g.dim(); ++ax) {
        const SymbolColumn da = a_.xi_derivative_column(xi, ax);
        const SymbolColumn db = dx_column(g, *b, ax);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] += da[j] * db[j] * cplx(0.0, -1.0);
      }
    }
    return r;
  }

 private:
  SymbolDescriptor a_, b_;
  double rho_;
};

class AdjointImpl : public SymbolImpl {
 public:
  AdjointImpl(SymbolDescriptor a, double rho) : a_(std::move(a)), rho_(rho) {}
  SymbolColumn column(const Wavevector& xi) const override {
    const auto a = a_.column(xi);
    SymbolColumn r(a->size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = conj((*a)[j]);
    if (rho_ > 1.0) {
      const Grid& g = a_.grid();
      for (int ax = 0; ax < g.dim(); ++ax) {
        SymbolColumn da = a_.xi_derivative_column(xi, ax);
        for (Jet& j : da) j = conj(j);
        const SymbolColumn dxa = dx_column(g, da, ax);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] += dxa[j] * cplx(0.0, -1.0);
      }
    }
    return r;
  }

 private:
  SymbolDescriptor a_;
  double rho_;
};

class ReciprocalImpl : public SymbolImpl {
 public:
  explicit ReciprocalImpl(SymbolDescriptor a) : a_(std::move(a)) {}
  SymbolColumn column(const Wavevector& xi) const override {
    SymbolColumn r = *a_.column(xi);
    for (Jet& j : r) j = reciprocal(j);
    return r;
  }

 private:
  SymbolDescriptor a_;
};

}  // namespace

struct SymbolCache {
  std::mutex mutex;
  std::unordered_map<std::size_t, std::shared_ptr<const SymbolColumn>> columns;
  std::unordered_map<std::size_t, std::shared_ptr<const std::vector<cplx>>> spectra;
  std::size_t jets = 0;
  std::size_t coefficients = 0;
};

SymbolDescriptor::SymbolDescriptor(std::string name, const Grid& grid, double order, double regularity, bool reality,
                                   std::shared_ptr<const SymbolImpl> impl, cplx value_at_zero)
    : name_(std::move(name)),
      grid_(grid),
      order_(order),
      regularity_(regularity),
      reality_(reality),
      zero_(value_at_zero),
      impl_(std::move(impl)),
      cache_(std::make_shared<SymbolCache>()) {
  if (!impl_) throw std::invalid_argument("symbol without evaluator");
  if (!std::isfinite(std::abs(value_at_zero))) throw std::invalid_argument("symbol value at xi = 0 is not finite");
}

void SymbolDescriptor::set_parts(std::shared_ptr<const SymbolDescriptor> principal,
                                 std::shared_ptr<const SymbolDescriptor> sub) {
  principal_ = std::move(principal);
  subprincipal_ = std::move(sub);
}

SymbolColumn SymbolDescriptor::compute(const Wavevector& xi) const {
  if (xi.is_zero()) return SymbolColumn(grid_.size(), Jet::constant(zero_));
  SymbolColumn c = impl_->column(xi);
  if (c.size() != grid_.size()) throw std::logic_error("symbol column has the wrong length");
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!std::isfinite(c[j].v.real()) || !std::isfinite(c[j].v.imag())) {
      std::ostringstream os;
      os << "symbol " << name_ << " is not finite at node " << j << ", xi = (" << xi.k[0];
      if (xi.dim == 2) os << ", " << xi.k[1];
      os << ")";
      throw std::domain_error(os.str());
    }
  }
  return c;
}

std::shared_ptr<const SymbolColumn> SymbolDescriptor::column(const Wavevector& xi) const {
  if (!impl_) throw std::logic_error("empty symbol descriptor");
  std::size_t flat = 0;
  const bool on_lattice = grid_.flat_index(xi, flat);
  if (on_lattice) {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->columns.find(flat);
    if (it != cache_->columns.end()) return it->second;
  }
  auto col = std::make_shared<const SymbolColumn>(compute(xi));
  if (on_lattice) {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (cache_->jets + col->size() <= kMaxCachedJets) {
      auto [it, inserted] = cache_->columns.emplace(flat, col);
      if (inserted) cache_->jets += col->size();
      return it->second;
    }
  }
  return col;
}

std::shared_ptr<const std::vector<cplx>> SymbolDescriptor::x_spectrum(std::size_t flat_xi) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->spectra.find(flat_xi);
    if (it != cache_->spectra.end()) return it->second;
  }
  const auto col = column(grid_.wavevector(flat_xi));
  std::vector<cplx> vals(col->size());
  for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = (*col)[j].v;
  auto spec = std::make_shared<std::vector<cplx>>(vals.size());
  fft_forward(grid_, vals, *spec);
  std::shared_ptr<const std::vector<cplx>> out = spec;
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (cache_->coefficients + out->size() <= kMaxCachedCoefficients) {
    auto [it, inserted] = cache_->spectra.emplace(flat_xi, out);
    if (inserted) cache_->coefficients += out->size();
    return it->second;
  }
  return out;
}

std::vector<cplx> SymbolDescriptor::xi_derivative(const Wavevector& xi, const int alpha[2]) const {
  const int total = alpha[0] + (grid_.dim() == 2 ? alpha[1] : 0);
  const auto col = column(xi);
  std::vector<cplx> r(col->size());
  if (total <= column_order(*col)) {
    int axes[2] = {0, 0}, n = 0;
    for (int a = 0; a < grid_.dim(); ++a)
      for (int c = 0; c < alpha[a]; ++c) axes[n++] = a;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const Jet& jt = (*col)[j];
      r[j] = total == 0 ? jt.v : total == 1 ? jt.g[axes[0]] : jt.h[axes[0]][axes[1]];
    }
    return r;
  }
  const int axis = alpha[0] > 0 ? 0 : 1;
  int lower[2] = {alpha[0], alpha[1]};
  --lower[axis];
  const std::vector<cplx> up = xi_derivative(shifted(xi, axis, 1), lower);
  const std::vector<cplx> dn = xi_derivative(shifted(xi, axis, -1), lower);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = 0.5 * (up[j] - dn[j]);
  return r;
}

SymbolColumn SymbolDescriptor::xi_derivative_column(const Wavevector& xi, int axis) const {
  const auto col = column(xi);
  SymbolColumn r(col->size());
  if (column_order(*col) >= 1) {
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = (*col)[j].derivative(axis);
    return r;
  }
  const auto up = column(shifted(xi, axis, 1));
  const auto dn = column(shifted(xi, axis, -1));
  for (std::size_t j = 0; j < r.size(); ++j) {
    r[j] = Jet::constant(0.5 * ((*up)[j].v - (*dn)[j].v));
    r[j].order = 0;
  }
  return r;
}

SymbolColumn dx_column(const Grid& grid, const SymbolColumn& col, int axis) {
  const std::size_t p = grid.size();
  if (col.size() != p) throw std::invalid_argument("column length does not match the grid");
  const int d = grid.dim();
  const int n = grid.n();
  std::vector<cplx> buf(p), hat(p);
  std::vector<double> ik(p);
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t idx = d == 1 ? j : axis == 0 ? j / n : j % n;
    ik[j] = grid.derivative_frequency(static_cast<int>(idx));
  }
  SymbolColumn out(p);
  const int order = column_order(col);
  for (std::size_t j = 0; j < p; ++j) out[j].order = order;
  const double inv_p = 1.0 / static_cast<double>(p);
  for_each_component(d, order, [&](auto get) {
    for (std::size_t j = 0; j < p; ++j) buf[j] = get(const_cast<Jet&>(col[j]));
    detail::c2c(d, n, true, buf.data(), hat.data());
    for (std::size_t j = 0; j < p; ++j) hat[j] *= cplx(0.0, ik[j] * inv_p);
    detail::c2c(d, n, false, hat.data(), buf.data());
    for (std::size_t j = 0; j < p; ++j) get(out[j]) = buf[j];
  });
  return out;
}

SymbolDescriptor homogeneous_symbol(const SpectralField& coefficient, double m, const std::string& name) {
  auto impl = std::make_shared<HomogeneousImpl>(coefficient, m);
  return SymbolDescriptor(name, coefficient.grid(), m, 1.0, coefficient.is_real(0.0), impl,
                          m == 0.0 ? coefficient.mean() : cplx(0.0));
}

SymbolDescriptor multiplier_symbol(const Grid& grid, const std::function<cplx(const Wavevector&)>& a, double m,
                                   bool reality, const std::string& name) {
  Wavevector z;
  z.dim = grid.dim();
  return SymbolDescriptor(name, grid, m, 1e9, reality, std::make_shared<MultiplierImpl>(grid.size(), a), a(z));
}

SymbolDescriptor transport_symbol(std::span<const SpectralField> v) {
  if (v.empty()) throw std::invalid_argument("transport symbol needs a vector field");
  const Grid& g = v[0].grid();
  if (static_cast<int>(v.size()) != g.dim()) throw std::invalid_argument("transport field has the wrong dimension");
  for (const SpectralField& f : v)
    if (!f.is_real(1e-12)) throw std::invalid_argument("transport field must be real");
  return SymbolDescriptor("iV.xi", g, 1.0, 1.0, true, std::make_shared<TransportImpl>(v), 0.0);
}

SymbolDescriptor function_symbol(const Grid& grid, const std::function<cplx(double, double, const Wavevector&)>& a,
                                 double m, bool reality, cplx value_at_zero, const std::string& name) {
  return SymbolDescriptor(name, grid, m, 1.0, reality, std::make_shared<FunctionImpl>(grid, a), value_at_zero);
}

SymbolDescriptor sum_symbol(const SymbolDescriptor& a, const SymbolDescriptor& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("symbols live on different grids");
  return SymbolDescriptor(a.name() + "+" + b.name(), a.grid(), std::max(a.order(), b.order()),
                          std::min(a.regularity(), b.regularity()), a.reality() && b.reality(),
                          std::make_shared<SumImpl>(a, b), a.value_at_zero() + b.value_at_zero());
}

SymbolDescriptor scaled_symbol(const SymbolDescriptor& a, cplx s) {
  const bool real = a.reality() && s.imag() == 0.0;
  return SymbolDescriptor(a.name(), a.grid(), a.order(), a.regularity(), real, std::make_shared<ScaledImpl>(a, s),
                          s * a.value_at_zero());
}

SpectralField psi_projection(const SpectralField& u) {
  const Grid& g = u.grid();
  std::vector<cplx> c = u.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Wavevector k = g.wavevector(i);
    c[i] *= k.is_zero() || has_nyquist(g, k) ? 0.0 : low_frequency_cutoff(k.norm());
  }
  return keep_real_if(SpectralField::from_coefficients(g, c), exactly_real(u));
}

namespace {

struct BandTerm {
  std::size_t theta;
  int k[2];
  double weight;
};

// Per band j: the x-frequencies theta kept by S_{j-3}.
std::vector<std::vector<BandTerm>> smoothing_lists(const Grid& g, int bands) {
  const DyadicCutoff& cut = default_cutoff();
  std::vector<std::vector<BandTerm>> lists(bands + 1);
  for (std::size_t t = 0; t < g.size(); ++t) {
    const Wavevector th = g.wavevector(t);
    if (has_nyquist(g, th)) continue;
    for (int j = 0; j <= bands; ++j) {
      const double w = cut.kappa_k(j - 3, th.norm());
      if (w != 0.0) lists[j].push_back({t, {th.k[0], th.k[1]}, w});
    }
  }
  return lists;
}

SpectralField quantize_impl(const SymbolDescriptor& a, const SpectralField& u, bool adjoint) {
  check_grid(a, u);
  const Grid& g = u.grid();
  const int d = g.dim();
  const int half = g.n() / 2;
  const DyadicCutoff& cut = default_cutoff();
  const int bands = max_band(g);
  const auto lists = smoothing_lists(g, bands);
  const std::vector<cplx> uc = u.coefficients();
  std::vector<cplx> out(g.size(), 0.0);

  for (std::size_t e = 0; e < g.size(); ++e) {
    const Wavevector eta = g.wavevector(e);
    if (eta.is_zero() || has_nyquist(g, eta)) continue;
    if (!adjoint && uc[e] == cplx(0.0)) continue;
    const double psi = low_frequency_cutoff(eta.norm());
    std::shared_ptr<const std::vector<cplx>> spec;
    for (int j = 0; j <= bands; ++j) {
      const double w = cut.phi(j, eta.norm()) * psi;
      if (w == 0.0) continue;
      if (!spec) spec = a.x_spectrum(e);
      const std::vector<cplx>& s = *spec;
      cplx acc = 0.0;
      for (const BandTerm& t : lists[j]) {
        Wavevector k;
        k.dim = d;
        bool inside = true;
        for (int m = 0; m < d; ++m) {
          k.k[m] = t.k[m] + eta.k[m];
          inside = inside && std::abs(k.k[m]) < half;
        }
        if (!inside) continue;
        std::size_t target;
        g.flat_index(k, target);
        if (adjoint)
          acc += t.weight * std::conj(s[t.theta]) * uc[target];
        else
          out[target] += (w * t.weight) * s[t.theta] * uc[e];
      }
      if (adjoint) out[e] += w * acc;
    }
  }
  return keep_real_if(SpectralField::from_coefficients(g, out), a.reality() && exactly_real(u));
}

void check_rho(double rho) {
  if (!(rho > 0.0 && rho <= 2.0)) throw std::invalid_argument("symbolic expansion supports rho in (0, 2]");
}

}  // namespace

SpectralField quantize(const SymbolDescriptor& a, const SpectralField& u) { return quantize_impl(a, u, false); }
SpectralField quantize_adjoint(const SymbolDescriptor& a, const SpectralField& u) {
  return quantize_impl(a, u, true);
}

SymbolDescriptor sharp_compose(const SymbolDescriptor& a, const SymbolDescriptor& b, double rho) {
  check_rho(rho);
  if (!(a.grid() == b.grid())) throw std::invalid_argument("symbols live on different grids");
  return SymbolDescriptor(a.name() + "#" + b.name(), a.grid(), a.order() + b.order(),
                          std::min(a.regularity(), b.regularity()) - 1.0, a.reality() && b.reality(),
                          std::make_shared<ComposeImpl>(a, b, rho), a.value_at_zero() * b.value_at_zero());
}

SymbolDescriptor adjoint_symbol(const SymbolDescriptor& a, double rho) {
  check_rho(rho);
  return SymbolDescriptor(a.name() + "*", a.grid(), a.order(), a.regularity() - 1.0, a.reality(),
                          std::make_shared<AdjointImpl>(a, rho), std::conj(a.value_at_zero()));
}

SeminormReport seminorm(const SymbolDescriptor& a, double m, double rho) {
  const Grid& g = a.grid();
  const int d = g.dim();
  SeminormReport rep;
  rep.m = m;
  rep.rho = rho;
  rep.max_derivatives = static_cast<int>(std::ceil(d / 2.0 + 1.0 + rho - 1e-12));
  std::vector<std::array<int, 2>> alphas;
  for (int a0 = 0; a0 <= rep.max_derivatives; ++a0)
    for (int a1 = 0; a1 <= (d == 2 ? rep.max_derivatives - a0 : 0); ++a1) alphas.push_back({a0, a1});
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Wavevector xi = g.wavevector(f);
    for (const auto& al : alphas) {
      const int alpha[2] = {al[0], al[1]};
      const SpectralField col(g, a.xi_derivative(xi, alpha));
      const double v = std::pow(1.0 + xi.norm(), al[0] + al[1] - m) * zygmund_norm(col, rho);
      if (v > rep.value) {
        rep.value = v;
        rep.argmax = xi;
        rep.argmax_alpha[0] = al[0];
        rep.argmax_alpha[1] = al[1];
      }
    }
  }
  return rep;
}

SpectralField random_band_field(const Grid& grid, int band, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double lo = 0.8 * std::ldexp(1.0, band);
  const double hi = 1.2 * std::ldexp(1.0, band);
  std::vector<cplx> c(grid.size(), 0.0);
  std::vector<char> done(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (done[i]) continue;
    const Wavevector k = grid.wavevector(i);
    const double r = k.norm();
    if (r < lo || r > hi || has_nyquist(grid, k)) continue;
    Wavevector neg = k;
    for (int a = 0; a < k.dim; ++a) neg.k[a] = -k.k[a];
    std::size_t j;
    grid.flat_index(neg, j);
    const double re = normal(rng);
    const double im = normal(rng);
    c[i] = cplx(re, im);
    c[j] = cplx(re, -im);
    done[i] = done[j] = 1;
  }
  SpectralField u = SpectralField::from_coefficients(grid, c).real_part();
  const double n = sobolev_norm(u, 0.0);
  if (n > 0.0) u *= 1.0 / n;
  return u;
}

OrderFit order_probe(const LinearOperator& op, const Grid& grid, const OrderProbeOptions& opts) {
  const int last = opts.last_band >= 0 ? opts.last_band : max_band(grid) - 1;
  OrderFit fit;
  for (int j = opts.first_band; j <= last; ++j) {
    double best = 0.0;
    bool any = false;
    for (int s = 0; s < opts.samples; ++s) {
      const SpectralField u = random_band_field(grid, j, opts.seed + 7919ULL * j + s);
      if (sobolev_norm(u, 0.0) == 0.0) continue;
      any = true;
      best = std::max(best, sobolev_norm(op(u), 0.0));
    }
    if (any && best > 0.0 && std::isfinite(best)) {
      fit.bands.push_back(j);
      fit.norms.push_back(best);
    }
  }
  const std::size_t n = fit.bands.size();
  if (n < 3) throw std::runtime_error("order probe needs at least three usable bands");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = fit.bands[i], y = std::log2(fit.norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::log2(fit.norms[i]) - fit.intercept - fit.slope * fit.bands[i];
    r2 += e * e;
  }
  fit.residual = std::sqrt(r2 / n);
  return fit;
}

ParametrixResult parametrix_invert(const SymbolDescriptor& a, const SpectralField& v, int iterations,
                                   double tolerance) {
  check_grid(a, v);
  if (iterations < 1) throw std::invalid_argument("parametrix needs at least one iteration");
  const SymbolDescriptor& ap = a.principal();
  const Grid& g = a.grid();
  const double m = ap.order();
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Wavevector xi = g.wavevector(f);
    if (xi.is_zero()) continue;
    const auto col = ap.column(xi);
    const double scale = std::pow(xi.norm(), m);
    for (const Jet& j : *col) lower = std::min(lower, std::abs(j.v) / scale);
  }
  if (!(lower > 1e-8)) {
    std::ostringstream os;
    os << "symbol " << ap.name() << " is not elliptic: min |a|/|xi|^m = " << lower;
    throw std::domain_error(os.str());
  }
  const SymbolDescriptor b("1/" + ap.name(), g, -m, ap.regularity(), ap.reality(),
                           std::make_shared<ReciprocalImpl>(ap), 0.0);
  const SpectralField target = psi_projection(v);
  const double tnorm = sobolev_norm(target, 0.0);
  ParametrixResult res;
  res.u = quantize(b, target);
  res.iterations = 1;
  int growth = 0;
  for (;;) {
    const SpectralField r = target - quantize(a, res.u);
    res.residual = tnorm > 0.0 ? sobolev_norm(r, 0.0) / tnorm : sobolev_norm(r, 0.0);
    if (!res.history.empty() && res.residual > res.history.back()) {
      if (++growth >= 3) throw std::runtime_error("parametrix series diverges: residual grew three times in a row");
    } else {
      growth = 0;
    }
    res.history.push_back(res.residual);
    if (res.iterations >= iterations || res.residual <= tolerance) break;
    res.u += quantize(b, r);
    ++res.iterations;
  }
  return res;
}

void write_symbol(std::ostream& os, const SymbolDescriptor& a) {
  const Grid& g = a.grid();
  os << "# symbol " << a.name() << " d " << g.dim() << " N " << g.n() << " order " << a.order() << "\n";
  os.precision(17);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Wavevector xi = g.wavevector(f);
    const auto col = a.column(xi);
    for (std::size_t j = 0; j < g.size(); ++j) {
      double x, y;
      g.coordinates(j, x, y);
      os << x << ' ';
      if (g.dim() == 2) os << y << ' ';
      os << xi.k[0] << ' ';
      if (g.dim() == 2) os << xi.k[1] << ' ';
      os << (*col)[j].v.real() << ' ' << (*col)[j].v.imag() << '\n';
    }
  }
}

}  // namespace wwlab

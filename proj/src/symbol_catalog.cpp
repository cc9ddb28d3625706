#include <cmath>
#include <cstring>
#include <sstream>

#include "wwlab/paradiff.hpp"

namespace wwlab {

namespace {

const cplx kI(0.0, 1.0);

// Nodal surface slopes shared by every column evaluation.
struct SurfaceSlopes {
  Grid grid;
  int d = 1;
  std::vector<double> p[2];  // grad eta
  std::vector<double> w;     // 1 + |grad eta|^2
};

std::shared_ptr<const SurfaceSlopes> slopes_of(const SpectralField& eta) {
  auto s = std::make_shared<SurfaceSlopes>();
  s->grid = eta.grid();
  s->d = eta.grid().dim();
  const std::vector<SpectralField> g = gradient(eta);
  s->w.assign(eta.size(), 1.0);
  for (int a = 0; a < s->d; ++a) {
    s->p[a] = g[a].real_values();
    for (std::size_t j = 0; j < eta.size(); ++j) s->w[j] += s->p[a][j] * s->p[a][j];
  }
  return s;
}

template <class F>
SymbolColumn nodewise(std::size_t n, F&& f) {
  SymbolColumn c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = f(j);
  return c;
}

SymbolColumn operator+(const SymbolColumn& a, const SymbolColumn& b) {
  return nodewise(a.size(), [&](std::size_t j) { return a[j] + b[j]; });
}
SymbolColumn operator*(const SymbolColumn& a, const SymbolColumn& b) {
  return nodewise(a.size(), [&](std::size_t j) { return a[j] * b[j]; });
}
SymbolColumn derivative(const SymbolColumn& a, int axis) {
  return nodewise(a.size(), [&](std::size_t j) { return a[j].derivative(axis); });
}

class CatalogImpl : public SymbolImpl {
 public:
  CatalogImpl(std::shared_ptr<const SurfaceSlopes> s, SymbolKind kind, double weight_exponent, bool principal_only)
      : s_(std::move(s)), kind_(kind), weight_exponent_(weight_exponent), principal_only_(principal_only) {}

  SymbolColumn column(const Wavevector& xi) const override {
    switch (kind_) {
      case SymbolKind::lambda1: return lambda1(xi);
      case SymbolKind::lambda0: return lambda0(xi);
      case SymbolKind::lambda: return principal_only_ ? lambda1(xi) : lambda1(xi) + lambda0(xi);
      case SymbolKind::ell2: return ell2(xi);
      case SymbolKind::ell1: return ell1(xi);
      case SymbolKind::ell: return ell2(xi) + ell1(xi);
      case SymbolKind::q: return q();
      case SymbolKind::p_half: return p_half(xi);
      case SymbolKind::p_minus_half: return p_minus_half(xi);
      case SymbolKind::p: return principal_only_ ? p_half(xi) : p_half(xi) + p_minus_half(xi);
      case SymbolKind::gamma32: return gamma32(xi);
      case SymbolKind::gamma12: return gamma12(xi);
      case SymbolKind::gamma: return gamma(xi);
      case SymbolKind::weight: {
        const SymbolColumn g = gamma32(xi);
        return nodewise(g.size(), [&](std::size_t j) { return pow(g[j], weight_exponent_); });
      }
      default: throw std::logic_error("factorization symbols are not surface catalog symbols");
    }
  }

 private:
  std::size_t size() const { return s_->w.size(); }

  // |xi|^2 and grad eta . xi as jets.
  Jet norm2(const Wavevector& xi) const {
    Jet n;
    for (int a = 0; a < s_->d; ++a) {
      const Jet x = Jet::variable(xi.k[a], a);
      n += x * x;
    }
    return n;
  }
  Jet slope_dot(const Wavevector& xi, std::size_t j) const {
    Jet r;
    for (int a = 0; a < s_->d; ++a) r += Jet::variable(xi.k[a], a) * s_->p[a][j];
    return r;
  }

  SymbolColumn lambda1(const Wavevector& xi) const {
    const Jet n2 = norm2(xi);
    return nodewise(size(), [&](std::size_t j) {
      const Jet pd = slope_dot(xi, j);
      return sqrt(n2 * s_->w[j] - pd * pd);
    });
  }

  // (lambda1 + i grad eta . xi) / (1 + |grad eta|^2)
  SymbolColumn alpha1(const Wavevector& xi, const SymbolColumn& l1) const {
    return nodewise(size(), [&](std::size_t j) { return (l1[j] + slope_dot(xi, j) * kI) * (1.0 / s_->w[j]); });
  }

  SymbolColumn lambda0(const Wavevector& xi) const {
    const SymbolColumn l1 = lambda1(xi);
    const SymbolColumn a1 = alpha1(xi, l1);
    SymbolColumn bracket(size());
    for (int ax = 0; ax < s_->d; ++ax) {
      const SymbolColumn flux = nodewise(size(), [&](std::size_t j) { return a1[j] * s_->p[ax][j]; });
      const SymbolColumn div = dx_column(s_->grid, flux, ax);
      const SymbolColumn grad = dx_column(s_->grid, a1, ax);
      const SymbolColumn dl = derivative(l1, ax);
      for (std::size_t j = 0; j < size(); ++j) bracket[j] += div[j] + dl[j] * grad[j] * kI;
    }
    return nodewise(size(), [&](std::size_t j) { return bracket[j] * reciprocal(l1[j]) * (0.5 * s_->w[j]); });
  }

  SymbolColumn ell2(const Wavevector& xi) const {
    const Jet n2 = norm2(xi);
    return nodewise(size(), [&](std::size_t j) {
      const Jet pd = slope_dot(xi, j);
      return (n2 - pd * pd * (1.0 / s_->w[j])) * std::pow(s_->w[j], -0.5);
    });
  }

  // -(i/2) (d_x . d_xi) a
  SymbolColumn half_mixed(const SymbolColumn& a) const {
    SymbolColumn r(size());
    for (int ax = 0; ax < s_->d; ++ax) {
      const SymbolColumn t = dx_column(s_->grid, derivative(a, ax), ax);
      for (std::size_t j = 0; j < size(); ++j) r[j] += t[j] * cplx(0.0, -0.5);
    }
    return r;
  }

  SymbolColumn ell1(const Wavevector& xi) const { return half_mixed(ell2(xi)); }

  SymbolColumn q() const {
    return nodewise(size(), [&](std::size_t j) { return Jet::constant(std::pow(s_->w[j], -0.5)); });
  }

  SymbolColumn p_half(const Wavevector& xi) const {
    const SymbolColumn l1 = lambda1(xi);
    return nodewise(size(), [&](std::size_t j) { return sqrt(l1[j]) * std::pow(s_->w[j], -1.25); });
  }

  SymbolColumn gamma32(const Wavevector& xi) const { return sqrt_col(ell2(xi) * lambda1(xi)); }

  SymbolColumn gamma12(const Wavevector& xi) const {
    const SymbolColumn l2 = ell2(xi);
    const SymbolColumn l1 = lambda1(xi);
    const SymbolColumn l0 = lambda0(xi);
    return nodewise(size(), [&](std::size_t j) { return sqrt(l2[j] / l1[j]) * real(l0[j]) * 0.5; });
  }

  SymbolColumn gamma(const Wavevector& xi) const {
    const SymbolColumn g32 = gamma32(xi);
    return g32 + gamma12(xi) + half_mixed(g32);
  }

  SymbolColumn p_minus_half(const Wavevector& xi) const {
    const SymbolColumn g32 = gamma32(xi);
    const SymbolColumn ph = p_half(xi);
    SymbolColumn brace = q() * ell1(xi);
    const SymbolColumn g12 = gamma12(xi) + half_mixed(g32);
    for (std::size_t j = 0; j < size(); ++j) brace[j] -= g12[j] * ph[j];
    for (int ax = 0; ax < s_->d; ++ax) {
      const SymbolColumn t = derivative(g32, ax) * dx_column(s_->grid, ph, ax);
      for (std::size_t j = 0; j < size(); ++j) brace[j] += t[j] * kI;
    }
    return nodewise(size(), [&](std::size_t j) { return brace[j] / g32[j]; });
  }

  static SymbolColumn sqrt_col(const SymbolColumn& a) {
    return nodewise(a.size(), [&](std::size_t j) { return sqrt(a[j]); });
  }

  std::shared_ptr<const SurfaceSlopes> s_;
  SymbolKind kind_;
  double weight_exponent_;
  bool principal_only_;
};

class FactorImpl : public SymbolImpl {
 public:
  FactorImpl(bool upper, int d, std::vector<double> alpha, std::vector<double> b0, std::vector<double> b1)
      : upper_(upper), d_(d), alpha_(std::move(alpha)), beta_{std::move(b0), std::move(b1)} {}

  SymbolColumn column(const Wavevector& xi) const override {
    Jet n2;
    for (int a = 0; a < d_; ++a) {
      const Jet x = Jet::variable(xi.k[a], a);
      n2 += x * x;
    }
    const double sign = upper_ ? 1.0 : -1.0;
    return nodewise(alpha_.size(), [&](std::size_t j) {
      Jet bx;
      for (int a = 0; a < d_; ++a) bx += Jet::variable(xi.k[a], a) * beta_[a][j];
      const Jet disc = n2 * (4.0 * alpha_[j]) - bx * bx;
      return (bx * cplx(0.0, -1.0) + sqrt(disc) * sign) * 0.5;
    });
  }

  // Smallest value of the discriminant over nodes and lattice frequencies.
  double min_discriminant(const Grid& g) const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < g.size(); ++f) {
      const Wavevector xi = g.wavevector(f);
      for (std::size_t j = 0; j < alpha_.size(); ++j) {
        double bx = 0.0;
        for (int a = 0; a < d_; ++a) bx += beta_[a][j] * xi.k[a];
        lo = std::min(lo, 4.0 * alpha_[j] * xi.norm2() - bx * bx);
      }
    }
    return lo;
  }

 private:
  bool upper_;
  int d_;
  std::vector<double> alpha_;
  std::vector<double> beta_[2];
};

struct KindInfo {
  SymbolKind kind;
  const char* name;
  double order;
  double regularity;
};

// Regularity tags are metadata: principal parts carry 1, lower-order parts 1/2.
constexpr KindInfo kKinds[] = {
    {SymbolKind::lambda1, "lambda1", 1.0, 1.0},   {SymbolKind::lambda0, "lambda0", 0.0, 0.5},
    {SymbolKind::lambda, "lambda", 1.0, 0.5},     {SymbolKind::ell2, "ell2", 2.0, 1.0},
    {SymbolKind::ell1, "ell1", 1.0, 0.5},         {SymbolKind::ell, "ell", 2.0, 0.5},
    {SymbolKind::q, "q", 0.0, 1.0},               {SymbolKind::p_half, "p_half", 0.5, 1.0},
    {SymbolKind::p_minus_half, "p_minus_half", -0.5, 0.5}, {SymbolKind::p, "p", 0.5, 0.5},
    {SymbolKind::gamma32, "gamma32", 1.5, 1.0},   {SymbolKind::gamma12, "gamma12", 0.5, 0.5},
    {SymbolKind::gamma, "gamma", 1.5, 0.5},       {SymbolKind::weight, "weight", 0.0, 1.0},
    {SymbolKind::a1, "a1", 1.0, 1.0},             {SymbolKind::A1, "A1", 1.0, 1.0},
};

const KindInfo& info(SymbolKind k) {
  for (const KindInfo& i : kKinds)
    if (i.kind == k) return i;
  throw std::invalid_argument("unknown symbol kind");
}

SymbolDescriptor surface_symbol(SymbolKind kind, const std::shared_ptr<const SurfaceSlopes>& s,
                                const CatalogParams& params) {
  const KindInfo& ki = info(kind);
  const double exponent = 2.0 * params.s / 3.0;
  const double order = kind == SymbolKind::weight ? params.s : ki.order;
  // q is x-only: its value at xi = 0 is not a constant, but xi = 0 is never used by T_a.
  SymbolDescriptor d(ki.name, s->grid, order, ki.regularity, true,
                     std::make_shared<CatalogImpl>(s, kind, exponent, params.principal_only),
                     kind == SymbolKind::q ? cplx(1.0) : cplx(0.0));
  return d;
}

}  // namespace

const char* symbol_kind_name(SymbolKind k) { return info(k).name; }

bool parse_symbol_kind(const std::string& name, SymbolKind& out) {
  for (const KindInfo& i : kKinds)
    if (name == i.name) {
      out = i.kind;
      return true;
    }
  return false;
}

SymbolDescriptor factorization_symbol(bool upper, const Grid& grid, std::span<const double> alpha,
                                      std::span<const double> beta0, std::span<const double> beta1) {
  const std::size_t p = grid.size();
  if (alpha.size() != p || beta0.size() != p || (grid.dim() == 2 && beta1.size() != p))
    throw std::invalid_argument("factorization coefficients do not match the grid");
  auto impl = std::make_shared<FactorImpl>(upper, grid.dim(), std::vector<double>(alpha.begin(), alpha.end()),
                                           std::vector<double>(beta0.begin(), beta0.end()),
                                           std::vector<double>(beta1.begin(), beta1.end()));
  const double lo = impl->min_discriminant(grid);
  if (lo < 0.0) {
    std::ostringstream os;
    os << "factorization discriminant 4 alpha |xi|^2 - (beta.xi)^2 is negative (min " << lo << ")";
    throw std::domain_error(os.str());
  }
  return SymbolDescriptor(upper ? "A1" : "a1", grid, 1.0, 1.0, true, impl, 0.0);
}

SymbolDescriptor build_symbol(SymbolKind kind, const SpectralField& eta, const CatalogParams& params) {
  if (!eta.is_real(1e-12)) throw std::invalid_argument("surface elevation must be real");
  if (kind == SymbolKind::a1 || kind == SymbolKind::A1) {
    DnOptions o = params.dn;
    const int levels = o.levels > 0 ? o.levels : eta.grid().n();
    const StraighteningMap map(eta, params.depth, levels, o.mode, o.delta);
    const EllipticCoefficients c = elliptic_coefficients(map);
    const int lvl = params.level < 0 ? levels : params.level;
    if (lvl > levels) throw std::invalid_argument("strip level out of range");
    const std::size_t p = eta.size();
    const auto slice = [&](const std::vector<double>& v) { return std::span<const double>(v.data() + lvl * p, p); };
    return factorization_symbol(kind == SymbolKind::A1, eta.grid(), slice(c.alpha), slice(c.beta[0]),
                                eta.grid().dim() == 2 ? slice(c.beta[1]) : std::span<const double>());
  }
  const auto s = slopes_of(eta);
  SymbolDescriptor d = surface_symbol(kind, s, params);
  const auto part = [&](SymbolKind k) { return std::make_shared<const SymbolDescriptor>(surface_symbol(k, s, params)); };
  switch (kind) {
    case SymbolKind::lambda: d.set_parts(part(SymbolKind::lambda1), params.principal_only ? nullptr : part(SymbolKind::lambda0)); break;
    case SymbolKind::ell: d.set_parts(part(SymbolKind::ell2), part(SymbolKind::ell1)); break;
    case SymbolKind::p: d.set_parts(part(SymbolKind::p_half), params.principal_only ? nullptr : part(SymbolKind::p_minus_half)); break;
    case SymbolKind::gamma: d.set_parts(part(SymbolKind::gamma32), nullptr); break;
    default: break;
  }
  return d;
}

}  // namespace wwlab

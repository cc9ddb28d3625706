#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "wwlab/dirichlet_neumann.hpp"
#include "wwlab/jet.hpp"
#include "wwlab/spectral.hpp"

namespace wwlab {

// Values of a symbol at one frequency xi over all grid nodes.
using SymbolColumn = std::vector<Jet>;

// Evaluator of a(x, xi). column() may be called with any integer wavevector,
// including ones outside the grid lattice (lattice differences need them);
// it is never called with xi = 0.
class SymbolImpl {
 public:
  virtual ~SymbolImpl() = default;
  virtual SymbolColumn column(const Wavevector& xi) const = 0;
};

struct SymbolCache;

class SymbolDescriptor {
 public:
  SymbolDescriptor() = default;
  SymbolDescriptor(std::string name, const Grid& grid, double order, double regularity, bool reality,
                   std::shared_ptr<const SymbolImpl> impl, cplx value_at_zero = 0.0);

  const std::string& name() const { return name_; }
  const Grid& grid() const { return grid_; }
  double order() const { return order_; }
  double regularity() const { return regularity_; }
  // a(x, -xi) = conj(a(x, xi)), so T_a maps real fields to real fields.
  bool reality() const { return reality_; }
  cplx value_at_zero() const { return zero_; }

  // Homogeneous parts; principal() falls back to the symbol itself.
  const SymbolDescriptor& principal() const { return principal_ ? *principal_ : *this; }
  const SymbolDescriptor* subprincipal() const { return subprincipal_.get(); }
  void set_parts(std::shared_ptr<const SymbolDescriptor> principal, std::shared_ptr<const SymbolDescriptor> sub);

  // Jets over the nodes; xi = 0 gives the constant value_at_zero. Columns for
  // lattice frequencies are cached. Throws std::domain_error on non-finite values.
  std::shared_ptr<const SymbolColumn> column(const Wavevector& xi) const;
  cplx operator()(std::size_t node, const Wavevector& xi) const { return (*column(xi))[node].v; }
  // Normalized x-coefficients of a(., xi) for a lattice frequency (cached).
  std::shared_ptr<const std::vector<cplx>> x_spectrum(std::size_t flat_xi) const;
  // d_xi^alpha a(., xi): jets while exact, centered lattice differences past that.
  std::vector<cplx> xi_derivative(const Wavevector& xi, const int alpha[2]) const;
  // First xi-derivative as a column; jets carry one level less.
  SymbolColumn xi_derivative_column(const Wavevector& xi, int axis) const;

 private:
  SymbolColumn compute(const Wavevector& xi) const;

  std::string name_;
  Grid grid_;
  double order_ = 0.0;
  double regularity_ = 0.0;
  bool reality_ = true;
  cplx zero_ = 0.0;
  std::shared_ptr<const SymbolImpl> impl_;
  std::shared_ptr<const SymbolDescriptor> principal_, subprincipal_;
  std::shared_ptr<SymbolCache> cache_;
};

// Spectral d/dx_axis of every jet component of a column.
SymbolColumn dx_column(const Grid& grid, const SymbolColumn& col, int axis);

// Elementary symbols.
// c(x) |xi|^m with analytic xi-derivatives; c real keeps the reality flag.
SymbolDescriptor homogeneous_symbol(const SpectralField& coefficient, double m, const std::string& name = "c|xi|^m");
// Fourier multiplier a(xi) given with its order.
SymbolDescriptor multiplier_symbol(const Grid& grid, const std::function<cplx(const Wavevector&)>& a, double m,
                                   bool reality, const std::string& name = "multiplier");
// i V . xi for a real vector field V.
SymbolDescriptor transport_symbol(std::span<const SpectralField> v);
// Generic a(x, y, xi); xi-derivatives by lattice differences.
SymbolDescriptor function_symbol(const Grid& grid, const std::function<cplx(double, double, const Wavevector&)>& a,
                                 double m, bool reality, cplx value_at_zero = 0.0,
                                 const std::string& name = "function");
SymbolDescriptor sum_symbol(const SymbolDescriptor& a, const SymbolDescriptor& b);
SymbolDescriptor scaled_symbol(const SymbolDescriptor& a, cplx s);

// Symbols built from the surface.
enum class SymbolKind {
  lambda1,
  lambda0,
  lambda,
  ell2,
  ell1,
  ell,
  q,
  p_half,
  p_minus_half,
  p,
  gamma32,
  gamma12,
  gamma,
  weight,
  a1,
  A1,
};

struct CatalogParams {
  double s = 2.0;              // Sobolev index of the weight (gamma32)^{2s/3}
  double depth = 1.0;          // strip depth for a1 / A1
  DnOptions dn{};              // straightening used for a1 / A1
  int level = -1;              // strip level of alpha, beta for a1 / A1; -1 is the surface
  bool principal_only = false;  // drop lambda0 and p^(-1/2) from lambda and p
};

const char* symbol_kind_name(SymbolKind k);
bool parse_symbol_kind(const std::string& name, SymbolKind& out);
// Throws std::domain_error if the a1/A1 discriminant is negative somewhere.
SymbolDescriptor build_symbol(SymbolKind kind, const SpectralField& eta, const CatalogParams& params = {});
// a1 (upper = false) or A1 (upper = true) from nodal alpha, beta on the grid.
SymbolDescriptor factorization_symbol(bool upper, const Grid& grid, std::span<const double> alpha,
                                      std::span<const double> beta0, std::span<const double> beta1 = {});

// psi(D) u restricted to the modes paradifferential operators act on: the mean
// and every mode with a Nyquist component are removed.
SpectralField psi_projection(const SpectralField& u);

// T_a u = sum_j (S_{j-3} in x of a)(x, D) Delta_j psi(D) u. Outputs and inputs
// at the Nyquist frequency are dropped so that reality is preserved.
SpectralField quantize(const SymbolDescriptor& a, const SpectralField& u);
// (T_a)^* for the grid L2 pairing.
SpectralField quantize_adjoint(const SymbolDescriptor& a, const SpectralField& u);

// sum_{|alpha| < rho} (-i)^|alpha| / alpha! d_xi^alpha a d_x^alpha b, rho in (0, 2].
SymbolDescriptor sharp_compose(const SymbolDescriptor& a, const SymbolDescriptor& b, double rho);
// sum_{|alpha| < rho} 1/(i^|alpha| alpha!) d_xi^alpha d_x^alpha conj(a), rho in (0, 2].
SymbolDescriptor adjoint_symbol(const SymbolDescriptor& a, double rho);

struct SeminormReport {
  double m = 0.0;
  double rho = 0.0;
  double value = 0.0;
  int max_derivatives = 0;  // ceil(d/2 + 1 + rho)
  Wavevector argmax{};
  int argmax_alpha[2] = {0, 0};
};
// max over lattice xi and |alpha| <= ceil(d/2+1+rho) of
// (1+|xi|)^{|alpha|-m} ||d_xi^alpha a(., xi)||_{C^rho_*}.
SeminormReport seminorm(const SymbolDescriptor& a, double m, double rho);

using LinearOperator = std::function<SpectralField(const SpectralField&)>;

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS misfit of the log2 fit
  std::vector<int> bands;
  std::vector<double> norms;  // max ||A u_j|| over samples
};

struct OrderProbeOptions {
  int first_band = 2;
  int last_band = -1;  // -1: max_band - 1
  int samples = 4;
  unsigned long long seed = 12345;
};

// Unit-L2 random real field with spectrum in 0.8 * 2^j <= |k| <= 1.2 * 2^j.
SpectralField random_band_field(const Grid& grid, int band, unsigned long long seed);
// Throws std::runtime_error with fewer than three usable bands.
OrderFit order_probe(const LinearOperator& op, const Grid& grid, const OrderProbeOptions& opts = {});

struct ParametrixResult {
  SpectralField u;
  double residual = 0.0;            // ||T_a u - psi(D) v|| / ||psi(D) v||
  std::vector<double> history;      // relative residual after each sweep
  int iterations = 0;
};
// Neumann series with b = 1 / principal(a); iterations >= 1 counts applications
// of T_b. Throws std::domain_error if principal(a) is not elliptic and
// std::runtime_error if the residual grows three times in a row.
ParametrixResult parametrix_invert(const SymbolDescriptor& a, const SpectralField& v, int iterations,
                                   double tolerance = 0.0);

// Dense dump: rows "x [y] k [l] re im" over nodes and lattice frequencies.
void write_symbol(std::ostream& os, const SymbolDescriptor& a);

}  // namespace wwlab

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace wwlab {

// Second-order Taylor jet in the frequency variable xi (d <= 2): value,
// gradient and Hessian. `order` is the number of derivative levels that are
// exact; arithmetic keeps the minimum and consumers fall back to lattice
// differences past it.
struct Jet {
  using cplx = std::complex<double>;

  cplx v{};
  cplx g[2]{};
  cplx h[2][2]{};
  int order = 2;

  static Jet constant(cplx c) {
    Jet j;
    j.v = c;
    return j;
  }
  // The coordinate xi_axis evaluated at `value`.
  static Jet variable(double value, int axis) {
    Jet j;
    j.v = value;
    j.g[axis] = 1.0;
    return j;
  }

  // d/dxi_axis; one derivative level is consumed.
  Jet derivative(int axis) const {
    Jet r;
    r.v = g[axis];
    for (int k = 0; k < 2; ++k) r.g[k] = h[axis][k];
    r.order = order - 1;
    if (r.order < 2)
      for (auto& row : r.h)
        for (auto& e : row) e = 0.0;
    if (r.order < 1) r.g[0] = r.g[1] = 0.0;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int a = 0; a < 2; ++a) {
      g[a] += o.g[a];
      for (int b = 0; b < 2; ++b) h[a][b] += o.h[a][b];
    }
    order = std::min(order, o.order);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int a = 0; a < 2; ++a) {
      g[a] -= o.g[a];
      for (int b = 0; b < 2; ++b) h[a][b] -= o.h[a][b];
    }
    order = std::min(order, o.order);
    return *this;
  }
  Jet& operator*=(cplx s) {
    v *= s;
    for (int a = 0; a < 2; ++a) {
      g[a] *= s;
      for (int b = 0; b < 2; ++b) h[a][b] *= s;
    }
    return *this;
  }
  Jet& operator+=(cplx s) {
    v += s;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator*(Jet a, std::complex<double> s) { return a *= s; }
inline Jet operator*(std::complex<double> s, Jet a) { return a *= s; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator+(Jet a, std::complex<double> s) { return a += s; }
inline Jet operator+(std::complex<double> s, Jet a) { return a += s; }
inline Jet operator+(Jet a, double s) { return a += s; }
inline Jet operator+(double s, Jet a) { return a += s; }
inline Jet operator-(Jet a, double s) { return a += -s; }
inline Jet operator-(double s, Jet a) { return (-a) += s; }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  for (int i = 0; i < 2; ++i) {
    r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int k = 0; k < 2; ++k)
      r.h[i][k] = a.h[i][k] * b.v + a.g[i] * b.g[k] + a.g[k] * b.g[i] + a.v * b.h[i][k];
  }
  r.order = std::min(a.order, b.order);
  return r;
}

// f(a) from f(v), f'(v), f''(v).
inline Jet chain(const Jet& a, std::complex<double> f0, std::complex<double> f1, std::complex<double> f2) {
  Jet r;
  r.v = f0;
  for (int i = 0; i < 2; ++i) {
    r.g[i] = f1 * a.g[i];
    for (int k = 0; k < 2; ++k) r.h[i][k] = f2 * a.g[i] * a.g[k] + f1 * a.h[i][k];
  }
  r.order = a.order;
  return r;
}

inline Jet reciprocal(const Jet& a) {
  const std::complex<double> inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

inline Jet sqrt(const Jet& a) {
  const std::complex<double> s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

// a^p on the principal branch; requires a.v != 0 when derivatives are used.
inline Jet pow(const Jet& a, double p) {
  const std::complex<double> f = std::pow(a.v, p);
  return chain(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

// Component-wise conjugate and real part (valid because xi is real).
inline Jet conj(const Jet& a) {
  Jet r = a;
  r.v = std::conj(a.v);
  for (int i = 0; i < 2; ++i) {
    r.g[i] = std::conj(a.g[i]);
    for (int k = 0; k < 2; ++k) r.h[i][k] = std::conj(a.h[i][k]);
  }
  return r;
}
inline Jet real(const Jet& a) {
  Jet r = a;
  r.v = a.v.real();
  for (int i = 0; i < 2; ++i) {
    r.g[i] = a.g[i].real();
    for (int k = 0; k < 2; ++k) r.h[i][k] = a.h[i][k].real();
  }
  return r;
}

}  // namespace wwlab

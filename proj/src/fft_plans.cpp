#include "fft_plans.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace wwlab::detail {

namespace {

enum class Kind { c2c_fwd, c2c_inv, r2c, c2r };

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan make_plan(Kind kind, int dim, int n, int howmany) {
  int dims[2] = {n, n};
  const int real_dist = dim == 1 ? n : n * n;
  const int half_dist = dim == 1 ? n / 2 + 1 : n * (n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  switch (kind) {
    case Kind::c2c_fwd:
    case Kind::c2c_inv: {
      const int count = real_dist;
      auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
      auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
      plan = fftw_plan_dft(dim, dims, a, b, kind == Kind::c2c_fwd ? FFTW_FORWARD : FFTW_BACKWARD, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::r2c: {
      auto* a = static_cast<double*>(fftw_malloc(sizeof(double) * real_dist * howmany));
      auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half_dist * howmany));
      plan = fftw_plan_many_dft_r2c(dim, dims, howmany, a, nullptr, 1, real_dist, b, nullptr, 1, half_dist,
                                    FFTW_ESTIMATE);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::c2r: {
      auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half_dist * howmany));
      auto* b = static_cast<double*>(fftw_malloc(sizeof(double) * real_dist * howmany));
      plan = fftw_plan_many_dft_c2r(dim, dims, howmany, a, nullptr, 1, half_dist, b, nullptr, 1, real_dist,
                                    FFTW_ESTIMATE);
      fftw_free(a);
      fftw_free(b);
      break;
    }
  }
  if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
  return plan;
}

fftw_plan cached_plan(Kind kind, int dim, int n, int howmany) {
  using Key = std::tuple<int, int, int, int>;
  static std::map<Key, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  const Key key{static_cast<int>(kind), dim, n, howmany};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_plan plan = make_plan(kind, dim, n, howmany);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void c2c(int dim, int n, bool forward, const std::complex<double>* in, std::complex<double>* out) {
  fftw_plan plan = cached_plan(forward ? Kind::c2c_fwd : Kind::c2c_inv, dim, n, 1);
  // FFTW does not modify the input of out-of-place complex transforms.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void r2c_many(int dim, int n, int howmany, double* in, fftw_complex* out) {
  fftw_execute_dft_r2c(cached_plan(Kind::r2c, dim, n, howmany), in, out);
}

void c2r_many(int dim, int n, int howmany, fftw_complex* in, double* out) {
  fftw_execute_dft_c2r(cached_plan(Kind::c2r, dim, n, howmany), in, out);
}

}  // namespace wwlab::detail

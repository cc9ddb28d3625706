#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>

namespace wwlab::detail {

// Complex transform of one field, unnormalized. Plans are cached per shape and
// are safe to execute concurrently on any arrays.
void c2c(int dim, int n, bool forward, const std::complex<double>* in, std::complex<double>* out);

// Batched real transforms of `howmany` fields stored contiguously.
// Real arrays have stride n^d, half-spectrum arrays n^{d-1}(n/2+1).
// Arrays must come from fftw_malloc (AlignedBuffer).
void r2c_many(int dim, int n, int howmany, double* in, fftw_complex* out);
void c2r_many(int dim, int n, int howmany, fftw_complex* in, double* out);  // destroys `in`

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t count) { resize(count); }
  void resize(std::size_t count) {
    if (count == count_) return;
    ptr_.reset(count ? static_cast<T*>(fftw_malloc(sizeof(T) * count)) : nullptr);
    count_ = count;
  }
  T* data() { return ptr_.get(); }
  const T* data() const { return ptr_.get(); }
  std::size_t size() const { return count_; }
  T& operator[](std::size_t i) { return ptr_.get()[i]; }
  const T& operator[](std::size_t i) const { return ptr_.get()[i]; }

 private:
  std::unique_ptr<T, FftwDeleter> ptr_;
  std::size_t count_ = 0;
};

}  // namespace wwlab::detail

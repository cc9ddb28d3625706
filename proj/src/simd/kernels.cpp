#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace wwlab::simd {

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& scalar_kernels() { return detail::scalar_table(); }

const KernelTable* avx2_kernels() {
#if defined(WWLAB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* pick_default() {
  if (const char* env = std::getenv("WWLAB_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void set_active_isa(Isa isa) {
  if (isa == Isa::scalar) {
    slot().store(&scalar_kernels(), std::memory_order_release);
    return;
  }
  const KernelTable* t = avx2_kernels();
  if (t == nullptr) throw std::invalid_argument("AVX2 kernels are not available on this machine");
  slot().store(t, std::memory_order_release);
}

}  // namespace wwlab::simd

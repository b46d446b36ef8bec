#include <atomic>
#include <cstdlib>
#include <string>

#include "flowctl/common.hpp"
#include "kernels_impl.hpp"

namespace flowctl::kernels {

namespace {

const Table kScalar{Backend::Scalar, detail::dot_scalar, detail::axpy_scalar, detail::adam_scalar};
#if defined(FLOWCTL_HAVE_AVX2)
const Table kAvx2{Backend::Avx2, detail::dot_avx2, detail::axpy_avx2, detail::adam_avx2};
#endif
#if defined(FLOWCTL_HAVE_NEON)
const Table kNeon{Backend::Neon, detail::dot_neon, detail::axpy_neon, detail::adam_neon};
#endif

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{nullptr};
  return table;
}

}  // namespace

std::string_view name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

bool parse_backend(std::string_view text, Backend& out) {
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (text == name(b)) {
      out = b;
      return true;
    }
  }
  return false;
}

const Table& scalar() { return kScalar; }

const Table* avx2() {
#if defined(FLOWCTL_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const Table* neon() {
#if defined(FLOWCTL_HAVE_NEON)
  return &kNeon;
#else
  return nullptr;
#endif
}

const Table* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalar;
    case Backend::Avx2:
      return avx2();
    case Backend::Neon:
      return neon();
  }
  return nullptr;
}

Backend detect() {
  if (const char* env = std::getenv("FLOWCTL_KERNELS")) {
    Backend b{};
    if (parse_backend(env, b) && table_for(b) != nullptr) return b;
  }
  if (avx2() != nullptr) return Backend::Avx2;
  if (neon() != nullptr) return Backend::Neon;
  return Backend::Scalar;
}

const Table& active() {
  const Table* t = current().load(std::memory_order_acquire);
  if (t == nullptr) {
    t = table_for(detect());
    current().store(t, std::memory_order_release);
  }
  return *t;
}

void select(Backend b) {
  const Table* t = table_for(b);
  if (t == nullptr) throw Error("kernel_unavailable", std::string(name(b)) + " kernels are not available here");
  current().store(t, std::memory_order_release);
}

}  // namespace flowctl::kernels

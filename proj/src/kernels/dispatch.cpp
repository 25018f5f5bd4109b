#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"
#include "lgw/error.hpp"

namespace lgw::kernels {

namespace {

using detail::avx2_available;
using detail::avx2_table;
using detail::neon_available;
using detail::neon_table;
using detail::scalar_table;

Backend detect() {
  if (avx2_table() != nullptr && avx2_available()) return Backend::avx2;
  if (neon_table() != nullptr && neon_available()) return Backend::neon;
  return Backend::scalar;
}

Backend initial_backend() {
  if (const char* env = std::getenv("LGW_KERNEL_BACKEND");
      env != nullptr && *env != '\0') {
    return parse_backend(env);
  }
  return detect();
}

std::atomic<int> g_active{-1};

Backend resolve_active() {
  int cur = g_active.load(std::memory_order_acquire);
  if (cur < 0) {
    Backend b = initial_backend();
    int expected = -1;
    g_active.compare_exchange_strong(expected, static_cast<int>(b),
                                     std::memory_order_acq_rel);
    cur = g_active.load(std::memory_order_acquire);
  }
  return static_cast<Backend>(cur);
}

}  // namespace

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return avx2_table() != nullptr && avx2_available();
    case Backend::neon:
      return neon_table() != nullptr && neon_available();
  }
  return false;
}

const Ops& table(Backend b) {
  if (!supported(b)) {
    fail("kernel backend '", backend_name(b), "' is not available on this ",
         "machine");
  }
  switch (b) {
    case Backend::avx2:
      return *avx2_table();
    case Backend::neon:
      return *neon_table();
    case Backend::scalar:
      break;
  }
  return *scalar_table();
}

Backend active_backend() { return resolve_active(); }

void set_backend(Backend b) {
  if (!supported(b)) {
    fail("kernel backend '", backend_name(b), "' is not available on this ",
         "machine");
  }
  g_active.store(static_cast<int>(b), std::memory_order_release);
}

const Ops& ops() { return table(resolve_active()); }

Backend parse_backend(std::string_view name) {
  if (name == "auto") return detect();
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  if (name == "neon") return Backend::neon;
  fail("unknown kernel backend '", std::string(name),
       "' (expected auto, scalar, avx2, or neon)");
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace lgw::kernels

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "gated/kernels.hpp"

namespace gated::kernels {

#ifdef GATED_HAVE_AVX2
const KernelTable& avx2_kernels();
#endif

namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("GATED_KERNELS")) {
    if (std::string_view(env) == "scalar") return &scalar_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() {
#ifdef GATED_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &avx2_kernels();
#endif
  return nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Backend backend) {
  const KernelTable* table = nullptr;
  switch (backend) {
    case Backend::Scalar:
      table = &scalar_table();
      break;
    case Backend::Avx2:
      table = avx2_table();
      break;
  }
  if (table == nullptr) throw std::runtime_error("kernel backend not available on this CPU/build");
  current().store(table, std::memory_order_release);
}

}  // namespace gated::kernels

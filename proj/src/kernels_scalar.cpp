#include "vwss/kernels.hpp"

namespace vwss::kernels {
namespace {

void threshold_gt_scalar(const double* probs, std::size_t n, double tau,
                         std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = probs[i] > tau ? std::uint8_t{1} : std::uint8_t{0};
  }
}

ConfusionCounts confusion_count_scalar(const std::uint8_t* y,
                                       const std::uint8_t* p, std::size_t n) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    c.tp += static_cast<std::uint64_t>(y[i] & p[i]);
    c.fp += static_cast<std::uint64_t>(static_cast<std::uint8_t>(~y[i]) & p[i] & 1u);
    c.fn += static_cast<std::uint64_t>(y[i] & static_cast<std::uint8_t>(~p[i]) & 1u);
  }
  c.tn = n - c.tp - c.fp - c.fn;
  return c;
}

// The 4-lane blocked order mirrors one AVX2 accumulator register, so the
// vector variant produces the same bits.
double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  const std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    acc0 += a[i + 0] * b[i + 0];
    acc1 += a[i + 1] * b[i + 1];
    acc2 += a[i + 2] * b[i + 2];
    acc3 += a[i + 3] * b[i + 3];
  }
  double sum = (acc0 + acc1) + (acc2 + acc3);
  for (std::size_t i = n4; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", threshold_gt_scalar,
                                 confusion_count_scalar, dot_scalar,
                                 axpy_scalar};
  return table;
}

}  // namespace vwss::kernels

#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by the hot paths: threshold binarization,
// confusion counting and the dense-layer arithmetic of the classifier.
//
// Each kernel exists as a scalar reference implementation and, on x86-64, an
// AVX2 variant selected once at startup. The two variants are bit-identical:
// integer kernels trivially, floating-point kernels because both sides use
// the same fixed 4-lane accumulation order and contraction is disabled.
// Setting VWSS_FORCE_SCALAR=1 in the environment pins the scalar table.

namespace vwss::kernels {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

struct KernelTable {
  const char* name;

  // out[i] = probs[i] > tau ? 1 : 0
  void (*threshold_gt)(const double* probs, std::size_t n, double tau,
                       std::uint8_t* out);

  // Pairwise tally of two 0/1 byte vectors.
  ConfusionCounts (*confusion_count)(const std::uint8_t* y,
                                     const std::uint8_t* p, std::size_t n);

  // sum_i a[i]*b[i], fixed 4-lane blocked accumulation order.
  double (*dot)(const double* a, const double* b, std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

#ifdef VWSS_HAVE_AVX2
bool avx2_supported();
const KernelTable& avx2_table();  // call only when avx2_supported()
#endif

/// Table chosen at first use: AVX2 when the CPU supports it and
/// VWSS_FORCE_SCALAR is not set, scalar otherwise.
const KernelTable& active_table();

}  // namespace vwss::kernels

#ifdef VWSS_HAVE_AVX2

#include <immintrin.h>

#include "vwss/kernels.hpp"

namespace vwss::kernels {
namespace {

void threshold_gt_avx2(const double* probs, std::size_t n, double tau,
                       std::uint8_t* out) {
  const __m256d vtau = _mm256_set1_pd(tau);
  const std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d v = _mm256_loadu_pd(probs + i);
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, vtau, _CMP_GT_OQ));
    out[i + 0] = static_cast<std::uint8_t>(mask & 1);
    out[i + 1] = static_cast<std::uint8_t>((mask >> 1) & 1);
    out[i + 2] = static_cast<std::uint8_t>((mask >> 2) & 1);
    out[i + 3] = static_cast<std::uint8_t>((mask >> 3) & 1);
  }
  for (std::size_t i = n4; i < n; ++i) {
    out[i] = probs[i] > tau ? std::uint8_t{1} : std::uint8_t{0};
  }
}

ConfusionCounts confusion_count_avx2(const std::uint8_t* y,
                                     const std::uint8_t* p, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i tp_acc = zero, fp_acc = zero, fn_acc = zero;
  const std::size_t n32 = n - (n % 32);
  for (std::size_t i = 0; i < n32; i += 32) {
    const __m256i vy =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(y + i));
    const __m256i vp =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    // inputs are 0/1 bytes, so sad-against-zero sums them per 64-bit group
    const __m256i tp_b = _mm256_and_si256(vy, vp);
    const __m256i fp_b = _mm256_andnot_si256(vy, vp);
    const __m256i fn_b = _mm256_andnot_si256(vp, vy);
    tp_acc = _mm256_add_epi64(tp_acc, _mm256_sad_epu8(tp_b, zero));
    fp_acc = _mm256_add_epi64(fp_acc, _mm256_sad_epu8(fp_b, zero));
    fn_acc = _mm256_add_epi64(fn_acc, _mm256_sad_epu8(fn_b, zero));
  }
  alignas(32) std::uint64_t lanes[4];
  ConfusionCounts c;
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), tp_acc);
  c.tp = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), fp_acc);
  c.fp = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), fn_acc);
  c.fn = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (std::size_t i = n32; i < n; ++i) {
    c.tp += static_cast<std::uint64_t>(y[i] & p[i]);
    c.fp += static_cast<std::uint64_t>(static_cast<std::uint8_t>(~y[i]) & p[i] & 1u);
    c.fn += static_cast<std::uint64_t>(y[i] & static_cast<std::uint8_t>(~p[i]) & 1u);
  }
  c.tn = n - c.tp - c.fp - c.fn;
  return c;
}

// mul + add (no fma) keeps every lane's operation sequence identical to the
// scalar reference, so results match bit for bit.
double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t i = n4; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (std::size_t i = n4; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", threshold_gt_avx2,
                                 confusion_count_avx2, dot_avx2, axpy_avx2};
  return table;
}

}  // namespace vwss::kernels

#endif  // VWSS_HAVE_AVX2

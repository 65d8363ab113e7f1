#include "mstep/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MSTEP_X86 1
#include <immintrin.h>
#else
#define MSTEP_X86 0
#endif

namespace mstep::kernels::avx2 {

#if MSTEP_X86

bool available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

__attribute__((target("avx2,fma"))) void matvec(const double* m,
                                                std::size_t rows,
                                                std::size_t cols,
                                                const double* x, double* y) {
  const std::size_t tail = rows % 4;
  const std::size_t vec_rows = rows - tail;
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    const __m256d xj = _mm256_set1_pd(x[j]);
    const double* col = m + j * rows;
    for (std::size_t i = 0; i < vec_rows; i += 4) {
      __m256d acc = _mm256_loadu_pd(y + i);
      acc = _mm256_fmadd_pd(xj, _mm256_loadu_pd(col + i), acc);
      _mm256_storeu_pd(y + i, acc);
    }
    for (std::size_t i = vec_rows; i < rows; ++i) y[i] += x[j] * col[i];
  }
}

__attribute__((target("avx2,fma"))) void momentum_update(
    const double* x, const double* x_prev, const double* wg, double alpha,
    double beta, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  const std::size_t tail = n % 4;
  const std::size_t vn = n - tail;
  for (std::size_t i = 0; i < vn; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d diff = _mm256_sub_pd(xi, _mm256_loadu_pd(x_prev + i));
    __m256d r = _mm256_fnmadd_pd(va, _mm256_loadu_pd(wg + i), xi);
    r = _mm256_fmadd_pd(vb, diff, r);
    _mm256_storeu_pd(out + i, r);
  }
  for (std::size_t i = vn; i < n; ++i)
    out[i] = x[i] - alpha * wg[i] + beta * (x[i] - x_prev[i]);
}

__attribute__((target("avx2,fma"))) void blend(const double* qx,
                                               const double* x_prev,
                                               double zeta, double* out,
                                               std::size_t n) {
  const __m256d vz = _mm256_set1_pd(zeta);
  const __m256d vo = _mm256_set1_pd(1.0 - zeta);
  const std::size_t tail = n % 4;
  const std::size_t vn = n - tail;
  for (std::size_t i = 0; i < vn; i += 4) {
    __m256d r = _mm256_mul_pd(vz, _mm256_loadu_pd(qx + i));
    r = _mm256_fmadd_pd(vo, _mm256_loadu_pd(x_prev + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (std::size_t i = vn; i < n; ++i)
    out[i] = zeta * qx[i] + (1.0 - zeta) * x_prev[i];
}

#else  // non-x86 hosts fall back to the scalar lane

bool available() { return false; }

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  scalar::matvec(m, rows, cols, x, y);
}

void momentum_update(const double* x, const double* x_prev, const double* wg,
                     double alpha, double beta, double* out, std::size_t n) {
  scalar::momentum_update(x, x_prev, wg, alpha, beta, out, n);
}

void blend(const double* qx, const double* x_prev, double zeta, double* out,
           std::size_t n) {
  scalar::blend(qx, x_prev, zeta, out, n);
}

#endif

}  // namespace mstep::kernels::avx2

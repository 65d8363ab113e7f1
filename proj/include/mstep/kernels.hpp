#pragma once

#include <cstddef>
#include <string>

// Dense inner-loop kernels used by the iteration engines. Scalar reference
// implementations live in kernels::scalar; an AVX2/FMA lane is selected at
// runtime on x86-64 hosts that support it. Both lanes are exposed so the
// test suite can check them against each other.
namespace mstep::kernels {

namespace scalar {

/// y = M x for a column-major dense matrix M (rows x cols).
void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y);

/// out = x - alpha*wg + beta*(x - x_prev)  (heavy-ball update).
void momentum_update(const double* x, const double* x_prev, const double* wg,
                     double alpha, double beta, double* out, std::size_t n);

/// out = zeta*qx + (1-zeta)*x_prev  (two-tap shift-register blend).
void blend(const double* qx, const double* x_prev, double zeta, double* out,
           std::size_t n);

}  // namespace scalar

namespace avx2 {

bool available();

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y);
void momentum_update(const double* x, const double* x_prev, const double* wg,
                     double alpha, double beta, double* out, std::size_t n);
void blend(const double* qx, const double* x_prev, double zeta, double* out,
           std::size_t n);

}  // namespace avx2

// Dispatched entry points.
void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y);
void momentum_update(const double* x, const double* x_prev, const double* wg,
                     double alpha, double beta, double* out, std::size_t n);
void blend(const double* qx, const double* x_prev, double zeta, double* out,
           std::size_t n);

/// "avx2" or "scalar", whichever the dispatcher picked.
const char* active_backend();

}  // namespace mstep::kernels

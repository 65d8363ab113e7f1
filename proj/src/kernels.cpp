#include "mstep/kernels.hpp"

namespace mstep::kernels {

namespace scalar {

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  // column-major: accumulate x[j] * column j
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const double* col = m + j * rows;
    for (std::size_t i = 0; i < rows; ++i) y[i] += xj * col[i];
  }
}

void momentum_update(const double* x, const double* x_prev, const double* wg,
                     double alpha, double beta, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = x[i] - alpha * wg[i] + beta * (x[i] - x_prev[i]);
}

void blend(const double* qx, const double* x_prev, double zeta, double* out,
           std::size_t n) {
  const double one_minus = 1.0 - zeta;
  for (std::size_t i = 0; i < n; ++i)
    out[i] = zeta * qx[i] + one_minus * x_prev[i];
}

}  // namespace scalar

namespace {

struct Dispatch {
  decltype(&scalar::matvec) matvec = &scalar::matvec;
  decltype(&scalar::momentum_update) momentum_update = &scalar::momentum_update;
  decltype(&scalar::blend) blend = &scalar::blend;
  const char* name = "scalar";

  Dispatch() {
    if (avx2::available()) {
      matvec = &avx2::matvec;
      momentum_update = &avx2::momentum_update;
      blend = &avx2::blend;
      name = "avx2";
    }
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  dispatch().matvec(m, rows, cols, x, y);
}

void momentum_update(const double* x, const double* x_prev, const double* wg,
                     double alpha, double beta, double* out, std::size_t n) {
  dispatch().momentum_update(x, x_prev, wg, alpha, beta, out, n);
}

void blend(const double* qx, const double* x_prev, double zeta, double* out,
           std::size_t n) {
  dispatch().blend(qx, x_prev, zeta, out, n);
}

const char* active_backend() { return dispatch().name; }

}  // namespace mstep::kernels

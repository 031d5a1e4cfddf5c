#pragma once

// Dense row-major matrices and the multiply kernels shared by the transform
// and operator code.  Everything here is deliberately loop-level C++: the
// explicit dense product is the central primitive of this library, and fixed
// accumulation order keeps results bit-identical run to run (including under
// the optional row-partitioned threading used by the benchmark harness).

#include <complex>
#include <cstddef>
#include <thread>
#include <vector>

#include "dse/common.hpp"

namespace dse {

using Complex = std::complex<double>;

template <class T>
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> a;  // row-major, a[r * cols + c]

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T{}) {}

  T& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return a[r * cols + c];
  }

  std::size_t size() const { return a.size(); }
  T* data() { return a.data(); }
  const T* data() const { return a.data(); }

  bool same_shape(const Mat& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

using RMat = Mat<double>;
using CMat = Mat<Complex>;

namespace detail {
inline void require_inner(std::size_t left_cols, std::size_t right_rows,
                          const char* op) {
  if (left_cols != right_rows) {
    throw ShapeError(std::string(op) + ": inner dimensions disagree (" +
                     std::to_string(left_cols) + " vs " +
                     std::to_string(right_rows) + ")");
  }
}
}  // namespace detail

// C = A * B for complex A and complex or real B.
template <class TB>
CMat matmul(const CMat& A, const Mat<TB>& B) {
  detail::require_inner(A.cols, B.rows, "matmul");
  CMat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    Complex* ci = C.data() + i * C.cols;
    const Complex* ai = A.data() + i * A.cols;
    for (std::size_t t = 0; t < A.cols; ++t) {
      const Complex av = ai[t];
      const TB* bt = B.data() + t * B.cols;
      for (std::size_t j = 0; j < B.cols; ++j) ci[j] += av * bt[j];
    }
  }
  return C;
}

// C = A * B for real A, real B.
inline RMat matmul(const RMat& A, const RMat& B) {
  detail::require_inner(A.cols, B.rows, "matmul");
  RMat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double* ci = C.data() + i * C.cols;
    const double* ai = A.data() + i * A.cols;
    for (std::size_t t = 0; t < A.cols; ++t) {
      const double av = ai[t];
      const double* bt = B.data() + t * B.cols;
      for (std::size_t j = 0; j < B.cols; ++j) ci[j] += av * bt[j];
    }
  }
  return C;
}

// C = A^H * B (conjugate transpose of A times B) without materializing A^H.
template <class TB>
CMat adjoint_matmul(const CMat& A, const Mat<TB>& B) {
  detail::require_inner(A.rows, B.rows, "adjoint_matmul");
  CMat C(A.cols, B.cols);
  for (std::size_t t = 0; t < A.rows; ++t) {
    const Complex* at = A.data() + t * A.cols;
    const TB* bt = B.data() + t * B.cols;
    for (std::size_t i = 0; i < A.cols; ++i) {
      const Complex av = std::conj(at[i]);
      Complex* ci = C.data() + i * C.cols;
      for (std::size_t j = 0; j < B.cols; ++j) ci[j] += av * bt[j];
    }
  }
  return C;
}

// Re(A^H * B) accumulated directly in real arithmetic.
inline RMat real_adjoint_matmul(const CMat& A, const CMat& B) {
  detail::require_inner(A.rows, B.rows, "real_adjoint_matmul");
  RMat C(A.cols, B.cols);
  for (std::size_t t = 0; t < A.rows; ++t) {
    const Complex* at = A.data() + t * A.cols;
    const Complex* bt = B.data() + t * B.cols;
    for (std::size_t i = 0; i < A.cols; ++i) {
      const double ar = at[i].real();
      const double ai = at[i].imag();
      double* ci = C.data() + i * C.cols;
      // Re(conj(a) * b) = Re(a)Re(b) + Im(a)Im(b)
      for (std::size_t j = 0; j < B.cols; ++j)
        ci[j] += ar * bt[j].real() + ai * bt[j].imag();
    }
  }
  return C;
}

// C = A^T * B for real matrices (used for weight gradients).
inline RMat transpose_matmul(const RMat& A, const RMat& B) {
  detail::require_inner(A.rows, B.rows, "transpose_matmul");
  RMat C(A.cols, B.cols);
  for (std::size_t t = 0; t < A.rows; ++t) {
    const double* at = A.data() + t * A.cols;
    const double* bt = B.data() + t * B.cols;
    for (std::size_t i = 0; i < A.cols; ++i) {
      const double av = at[i];
      double* ci = C.data() + i * C.cols;
      for (std::size_t j = 0; j < B.cols; ++j) ci[j] += av * bt[j];
    }
  }
  return C;
}

// C = A * B^T for real matrices (used to push gradients through weights).
inline RMat matmul_transpose(const RMat& A, const RMat& B) {
  detail::require_inner(A.cols, B.cols, "matmul_transpose");
  RMat C(A.rows, B.rows);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const double* ai = A.data() + i * A.cols;
    double* ci = C.data() + i * C.cols;
    for (std::size_t j = 0; j < B.rows; ++j) {
      const double* bj = B.data() + j * B.cols;
      double acc = 0.0;
      for (std::size_t t = 0; t < A.cols; ++t) acc += ai[t] * bj[t];
      ci[j] = acc;
    }
  }
  return C;
}

// y = A * x, one output element per matrix row.  The generic version is the
// kernel the benchmark times in 64-bit and (via TA = std::complex<float>)
// 32-bit form.
template <class TA, class TX>
void matvec_into(const Mat<TA>& A, const std::vector<TX>& x,
                 std::vector<TA>& y) {
  if (A.cols != x.size())
    throw ShapeError("matvec: matrix columns (" + std::to_string(A.cols) +
                     ") != vector length (" + std::to_string(x.size()) + ")");
  y.assign(A.rows, TA{});
  for (std::size_t i = 0; i < A.rows; ++i) {
    const TA* ai = A.data() + i * A.cols;
    TA acc{};
    for (std::size_t t = 0; t < A.cols; ++t) acc += ai[t] * x[t];
    y[i] = acc;
  }
}

inline std::vector<Complex> matvec(const CMat& A,
                                   const std::vector<Complex>& x) {
  std::vector<Complex> y;
  matvec_into(A, x, y);
  return y;
}

// Row-partitioned threaded matvec.  Each output row is accumulated by exactly
// one thread in the same order as the serial kernel, so results are
// bit-identical to matvec() for any thread count.
inline std::vector<Complex> matvec_threaded(const CMat& A,
                                            const std::vector<Complex>& x,
                                            unsigned n_threads) {
  if (A.cols != x.size())
    throw ShapeError("matvec_threaded: matrix columns != vector length");
  if (n_threads <= 1 || A.rows < 2) return matvec(A, x);
  std::vector<Complex> y(A.rows);
  const std::size_t n = A.rows;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi]() {
      for (std::size_t i = lo; i < hi; ++i) {
        const Complex* ai = A.data() + i * A.cols;
        Complex acc{};
        for (std::size_t t = 0; t < A.cols; ++t) acc += ai[t] * x[t];
        y[i] = acc;
      }
    });
  }
  for (auto& t : pool) t.join();
  return y;
}

template <class T>
double max_abs(const Mat<T>& A) {
  double m = 0.0;
  for (const auto& v : A.a) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

template <class T>
double max_abs_diff(const Mat<T>& A, const Mat<T>& B) {
  if (!A.same_shape(B))
    throw ShapeError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i)
    m = std::max(m, static_cast<double>(std::abs(A.a[i] - B.a[i])));
  return m;
}

}  // namespace dse

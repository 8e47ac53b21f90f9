#pragma once

// Dense complex linear algebra for density matrices: von Neumann entropy,
// Kronecker products, partial traces and validation. Everything here is a
// pure function of its inputs; values can be shared freely across threads.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynent {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Validation tolerances. Doubles on matrices up to the dense cap keep
// Hermitian eigensolves well below these.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-12;
inline constexpr double kEntropyClip = 1e-14;
inline constexpr double kUnityTol = 1e-10;

// Hard size limits. Dense work errors out instead of swapping.
struct DenseCaps {
  std::size_t dense_dim = 4096;        // ambient Hilbert space dimension
  std::size_t correlation_dim = 4096;  // refined correlation matrix dimension
  std::size_t path_count = std::size_t{1} << 16;
};

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  return max_abs(ComplexMatrix(m - m.adjoint()));
}

// Eigenvalues of a density matrix, sorted descending. Carrier for entropy
// evaluation; sums to 1 (up to eigensolver roundoff) when the input does.
struct Spectrum {
  std::vector<double> eigenvalues;

  double sum() const {
    double s = 0.0;
    for (double v : eigenvalues) s += v;
    return s;
  }
};

inline Spectrum hermitian_spectrum(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigensolver failed to converge");
  Spectrum s;
  s.eigenvalues.assign(solver.eigenvalues().data(),
                       solver.eigenvalues().data() + solver.eigenvalues().size());
  std::reverse(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

// Hermitian, unit-trace, positive semidefinite complex matrix.
class DensityMatrix {
 public:
  // Validates all three invariants; the eigenvalue floor costs an eigensolve.
  static DensityMatrix validated(const ComplexMatrix& m,
                                 double herm_tol = kHermitianTol,
                                 double trace_tol = kTraceTol,
                                 double eig_floor = kEigenvalueFloor) {
    check_basic(m, herm_tol, trace_tol);
    Spectrum s = hermitian_spectrum(m);
    if (!s.eigenvalues.empty() && s.eigenvalues.back() < eig_floor) {
      std::ostringstream msg;
      msg << "density matrix not positive semidefinite: min eigenvalue "
          << s.eigenvalues.back();
      throw std::invalid_argument(msg.str());
    }
    return DensityMatrix(m);
  }

  // For matrices positive by construction (tensor products of validated
  // states, partial traces, Gram matrices); checks Hermiticity and trace only.
  static DensityMatrix from_valid_construction(const ComplexMatrix& m,
                                               double herm_tol = kHermitianTol,
                                               double trace_tol = kTraceTol) {
    check_basic(m, herm_tol, trace_tol);
    return DensityMatrix(m);
  }

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

  Spectrum spectrum() const { return hermitian_spectrum(m_); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}

  static void check_basic(const ComplexMatrix& m, double herm_tol, double trace_tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw std::invalid_argument("density matrix must be square and nonempty");
    double herm = hermiticity_defect(m);
    if (herm > herm_tol) {
      std::ostringstream msg;
      msg << "density matrix not Hermitian: max |A - A^*| = " << herm;
      throw std::invalid_argument(msg.str());
    }
    double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
    if (tr_err > trace_tol) {
      std::ostringstream msg;
      msg << "density matrix trace differs from 1 by " << tr_err;
      throw std::invalid_argument(msg.str());
    }
  }

  ComplexMatrix m_;
};

// -sum_i p_i ln p_i with p ln p := 0 below the clip threshold. Negative
// dust from eigensolves is clipped away rather than producing NaN.
inline double entropy_of_values(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) {
    if (v > kEntropyClip) s -= v * std::log(v);
  }
  return std::max(s, 0.0);
}

/// von Neumann entropy -Tr(rho ln rho) in nats.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  return entropy_of_values(rho.spectrum().eigenvalues);
}

/// Shannon entropy of a probability vector, in nats.
inline double shannon_entropy(const std::vector<double>& p) {
  double sum = 0.0;
  for (double v : p) {
    if (v < kEigenvalueFloor) {
      std::ostringstream msg;
      msg << "probability vector has negative entry " << v;
      throw std::invalid_argument(msg.str());
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "probability vector sums to " << sum << ", not 1";
    throw std::invalid_argument(msg.str());
  }
  return entropy_of_values(p);
}

// Kronecker product, row-major block convention:
// entry ((i1,i2),(j1,j2)) = a(i1,j1) * b(i2,j2).
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix tensor_power(const ComplexMatrix& a, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = tensor_product(out, a);
  return out;
}

namespace detail {

// Mixed-radix index helpers for multi-factor spaces.
inline std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

}  // namespace detail

/// Reduced density matrix on the kept tensor factors; preserves the trace.
/// `dims` lists the factor dimensions (product must equal rho.dim()), and
/// `keep` the factor indices to retain, in increasing order.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<std::size_t>& dims,
                                   std::vector<std::size_t> keep) {
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("partial_trace: zero factor dimension");
    total *= d;
  }
  if (total != static_cast<std::size_t>(rho.dim()))
    throw std::invalid_argument("partial_trace: factor dimensions do not multiply to rho.dim()");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  for (std::size_t k : keep)
    if (k >= dims.size()) throw std::invalid_argument("partial_trace: keep index out of range");

  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!std::binary_search(keep.begin(), keep.end(), k)) traced.push_back(k);

  const std::vector<std::size_t> strides = detail::strides_of(dims);
  std::size_t keep_dim = 1, trace_dim = 1;
  for (std::size_t k : keep) keep_dim *= dims[k];
  for (std::size_t t : traced) trace_dim *= dims[t];

  // Offsets of every kept / traced multi-index into the flat index.
  auto offsets = [&](const std::vector<std::size_t>& factors, std::size_t count) {
    std::vector<std::size_t> off(count, 0);
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rem = flat, o = 0;
      for (std::size_t k = factors.size(); k-- > 0;) {
        o += (rem % dims[factors[k]]) * strides[factors[k]];
        rem /= dims[factors[k]];
      }
      off[flat] = o;
    }
    return off;
  };
  const std::vector<std::size_t> keep_off = offsets(keep, keep_dim);
  const std::vector<std::size_t> trace_off = offsets(traced, trace_dim);

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(keep_dim, keep_dim);
  for (std::size_t i = 0; i < keep_dim; ++i)
    for (std::size_t j = 0; j < keep_dim; ++j) {
      Complex acc(0.0, 0.0);
      for (std::size_t t = 0; t < trace_dim; ++t)
        acc += m(keep_off[i] + trace_off[t], keep_off[j] + trace_off[t]);
      out(i, j) = acc;
    }
  return DensityMatrix::from_valid_construction(out, 1e-11, 1e-11);
}

}  // namespace dynent

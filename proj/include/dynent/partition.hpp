#pragma once

// Operational partitions of unity {x_i} with sum_i x_i^* x_i = 1, their
// ordered compositions, correlation matrices rho_X(i,j) = Tr(omega x_j^* x_i)
// and the entropy bound S(rho_X) <= S(omega) + ln dim.

#include <dynent/core.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace dynent {

class OperationalPartition {
 public:
  // Elements must be square and share one ambient dimension. The unity
  // defect is the caller's concern (see verify_unity); composing and
  // refining partitions accumulates roundoff beyond any fixed tolerance.
  explicit OperationalPartition(std::vector<ComplexMatrix> elements) {
    if (elements.empty())
      throw std::invalid_argument("partition needs at least one element");
    const Eigen::Index d = elements.front().rows();
    for (const auto& x : elements)
      if (x.rows() != d || x.cols() != d)
        throw std::invalid_argument("partition elements must be square with a common dimension");
    ambient_dim_ = d;
    elements_ = std::move(elements);
  }

  Eigen::Index ambient_dim() const { return ambient_dim_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  const ComplexMatrix& element(std::size_t i) const { return elements_.at(i); }

  static OperationalPartition identity(Eigen::Index dim) {
    return OperationalPartition({ComplexMatrix::Identity(dim, dim)});
  }

 private:
  Eigen::Index ambient_dim_ = 0;
  std::vector<ComplexMatrix> elements_;
};

struct UnityCheck {
  bool ok = false;
  double max_deviation = 0.0;  // max entry of |sum x_i^* x_i - 1|
};

/// Checks sum_i x_i^* x_i = 1 entrywise within tol; reports the deviation.
inline UnityCheck verify_unity(const OperationalPartition& x, double tol = kUnityTol) {
  const Eigen::Index d = x.ambient_dim();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (const auto& e : x.elements()) acc += e.adjoint() * e;
  acc -= ComplexMatrix::Identity(d, d);
  double dev = max_abs(acc);
  return {dev <= tol, dev};
}

/// Ordered composition {x_i y_j}, i outer and j inner, size k*l.
inline OperationalPartition compose(const OperationalPartition& x,
                                    const OperationalPartition& y) {
  if (x.ambient_dim() != y.ambient_dim())
    throw std::invalid_argument("compose: ambient dimensions differ");
  std::vector<ComplexMatrix> out;
  out.reserve(x.size() * y.size());
  for (const auto& xi : x.elements())
    for (const auto& yj : y.elements()) out.push_back(xi * yj);
  return OperationalPartition(std::move(out));
}

/// Correlation matrix with entries rho_X(i,j) = Tr(omega x_j^* x_i).
/// A density matrix for every valid (omega, X) pair.
inline DensityMatrix correlation_matrix(const DensityMatrix& omega,
                                        const OperationalPartition& x,
                                        double herm_tol = kUnityTol,
                                        double trace_tol = kUnityTol) {
  if (omega.dim() != x.ambient_dim())
    throw std::invalid_argument("correlation_matrix: dimension mismatch");
  const std::size_t k = x.size();
  // Tr(omega x_j^* x_i) = <x_j w, x_i w>_F with w = sqrt(omega), so the
  // result is a Gram matrix and positive semidefinite by construction.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(omega.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("correlation_matrix: eigensolve failed");
  ComplexMatrix w = es.eigenvectors() *
                    es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                    es.eigenvectors().adjoint();
  std::vector<ComplexMatrix> xw(k);
  for (std::size_t i = 0; i < k; ++i) xw[i] = x.element(i) * w;
  ComplexMatrix rho(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Complex v = (xw[j].adjoint() * xw[i]).trace();
      rho(i, j) = v;
      rho(j, i) = std::conj(v);
    }
  }
  return DensityMatrix::from_valid_construction(rho, herm_tol, trace_tol);
}

struct LemmaBoundResult {
  double s_rho_x = 0.0;   // S(rho_X)
  double bound = 0.0;     // S(omega) + ln dim
  bool satisfied = false;
};

/// Entropy triangle bound: S(rho_X) <= S(omega) + ln dim(H), with 1e-9 slack.
inline LemmaBoundResult lemma_bound(const DensityMatrix& omega,
                                    const OperationalPartition& x) {
  LemmaBoundResult r;
  r.s_rho_x = von_neumann_entropy(correlation_matrix(omega, x));
  r.bound = von_neumann_entropy(omega) + std::log(static_cast<double>(omega.dim()));
  r.satisfied = r.s_rho_x <= r.bound + 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// Seeded random generators for property suites.

inline ComplexMatrix random_gaussian_matrix(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

inline DensityMatrix random_density_matrix(std::mt19937_64& rng, Eigen::Index d) {
  ComplexMatrix g = random_gaussian_matrix(rng, d);
  ComplexMatrix w = g * g.adjoint();
  w /= w.trace();
  w = ComplexMatrix((w + w.adjoint()) / 2.0);
  return DensityMatrix::from_valid_construction(w);
}

/// k Gaussian draws G_i normalized by S^{-1/2}, S = sum G_i^* G_i; an exact
/// partition of unity up to roundoff.
inline OperationalPartition random_partition(std::mt19937_64& rng, Eigen::Index d,
                                             std::size_t k) {
  std::vector<ComplexMatrix> g(k);
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < k; ++i) {
    g[i] = random_gaussian_matrix(rng, d);
    s += g[i].adjoint() * g[i];
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("random_partition: eigensolve failed");
  ComplexMatrix inv_sqrt = es.eigenvectors() *
                           es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                           es.eigenvectors().adjoint();
  std::vector<ComplexMatrix> x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = g[i] * inv_sqrt;
  return OperationalPartition(std::move(x));
}

}  // namespace dynent

#pragma once

// Shift dynamics on a quantum spin chain with a product reference state:
// embedding of local operators, N-step refinements of local partitions,
// refined correlation matrices, the Fourier projective partition and the
// closed-form reduced entropy (N-1)(ln d + sigma).

#include <dynent/core.hpp>
#include <dynent/partition.hpp>

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace dynent {

struct Window {
  int lo = 1;
  int hi = 1;

  int length() const { return hi - lo + 1; }
  bool contains(const Window& w) const { return lo <= w.lo && w.hi <= hi; }
};

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// Single site dimension d and site state nu; the chain state is the
// translation invariant product omega = ... nu (x) nu (x) nu ...
struct SpinChainSystem {
  int d;
  DensityMatrix site_state;

  SpinChainSystem(int dim, DensityMatrix nu) : d(dim), site_state(std::move(nu)) {
    if (d < 2) throw std::invalid_argument("single-site dimension must be >= 2");
    if (site_state.dim() != d)
      throw std::invalid_argument("site state dimension does not match d");
  }

  // Mean entropy per site; equals the single-site entropy for product states.
  double entropy_density() const { return von_neumann_entropy(site_state); }

  // Restriction of omega to n consecutive sites.
  DensityMatrix restriction(std::size_t n_sites) const {
    return DensityMatrix::from_valid_construction(
        tensor_power(site_state.matrix(), n_sites), 1e-11, 1e-11);
  }
};

struct LocalOperator {
  Window window;
  int d = 2;
  ComplexMatrix matrix;

  LocalOperator(Window w, int dim, ComplexMatrix m)
      : window(w), d(dim), matrix(std::move(m)) {
    if (static_cast<std::size_t>(matrix.rows()) != ipow(d, window.length()) ||
        matrix.rows() != matrix.cols())
      throw std::invalid_argument("local operator dimension does not match its window");
  }
};

/// Shift a local operator n sites to the right and embed it densely into an
/// ambient window, acting as the identity on the added sites.
inline LocalOperator shift_embed(const LocalOperator& x, int steps, Window ambient) {
  Window shifted{x.window.lo + steps, x.window.hi + steps};
  if (!ambient.contains(shifted))
    throw std::invalid_argument("shift_embed: shifted support escapes the ambient window");
  const std::size_t left = ipow(x.d, static_cast<std::size_t>(shifted.lo - ambient.lo));
  const std::size_t right = ipow(x.d, static_cast<std::size_t>(ambient.hi - shifted.hi));
  ComplexMatrix m = tensor_product(
      tensor_product(ComplexMatrix::Identity(left, left), x.matrix),
      ComplexMatrix::Identity(right, right));
  return LocalOperator(ambient, x.d, std::move(m));
}

// Partition of unity in local elements on the window [1, M]. Elements whose
// tensor factorization into single-site operators is known carry it in
// `site_factors`; that unlocks the factorized correlation path.
struct LocalPartition {
  int d = 2;
  int sites = 1;  // window [1, sites]
  std::vector<ComplexMatrix> elements;
  // site_factors[i] lists `sites` d x d matrices with element(i) = (x) of them.
  std::optional<std::vector<std::vector<ComplexMatrix>>> site_factors;

  std::size_t size() const { return elements.size(); }
  Window window() const { return {1, sites}; }

  OperationalPartition as_operational() const { return OperationalPartition(elements); }

  static LocalPartition identity(int d) {
    LocalPartition p;
    p.d = d;
    p.sites = 1;
    p.elements = {ComplexMatrix::Identity(d, d)};
    p.site_factors = {{ComplexMatrix::Identity(d, d)}};
    return p;
  }
};

/// Rank-one projective partition {p_i (x) q_j} on two sites, where {p_i}
/// projects on a fixed basis and {q_j} on its Fourier transform; the two
/// bases are mutually unbiased.
inline LocalPartition fourier_partition(int d) {
  if (d < 2) throw std::invalid_argument("fourier_partition: d must be >= 2");
  std::vector<ComplexMatrix> p(d), q(d);
  for (int i = 0; i < d; ++i) {
    p[i] = ComplexMatrix::Zero(d, d);
    p[i](i, i) = 1.0;
  }
  const double step = 2.0 * std::numbers::pi / d;
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXcd f(d);
    for (int k = 0; k < d; ++k)
      f(k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), step * j * k);
    q[j] = f * f.adjoint();
  }
  LocalPartition part;
  part.d = d;
  part.sites = 2;
  std::vector<std::vector<ComplexMatrix>> factors;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      part.elements.push_back(tensor_product(p[i], q[j]));
      factors.push_back({p[i], q[j]});
    }
  part.site_factors = std::move(factors);
  return part;
}

namespace detail {

inline void check_refine_caps(const LocalPartition& x, int n_steps, const DenseCaps& caps) {
  const std::size_t ambient = ipow(x.d, static_cast<std::size_t>(x.sites + n_steps - 1));
  const std::size_t corr = ipow(x.size(), static_cast<std::size_t>(n_steps));
  if (ambient > caps.dense_dim || corr > caps.correlation_dim) {
    std::ostringstream msg;
    msg << "refinement size exceeds caps: ambient dimension " << ambient
        << " (cap " << caps.dense_dim << "), correlation dimension " << corr
        << " (cap " << caps.correlation_dim << ")";
    throw std::length_error(msg.str());
  }
}

}  // namespace detail

/// N-step refinement: elements
///   Theta^{N-1}(x_{j_{N-1}}) ... Theta(x_{j_1}) x_{j_0}
/// on the window [1, M+N-1], indexed lexicographically with j_0 slowest.
/// N = 1 returns the partition itself.
inline OperationalPartition refine(const LocalPartition& x, int n_steps,
                                   const DenseCaps& caps = {}) {
  if (n_steps < 1) throw std::invalid_argument("refine: need N >= 1");
  detail::check_refine_caps(x, n_steps, caps);
  const Window ambient{1, x.sites + n_steps - 1};
  const std::size_t k = x.size();

  // Embedded copies of each element at each shift.
  std::vector<std::vector<ComplexMatrix>> shifted(n_steps, std::vector<ComplexMatrix>(k));
  for (int n = 0; n < n_steps; ++n)
    for (std::size_t j = 0; j < k; ++j)
      shifted[n][j] =
          shift_embed(LocalOperator(x.window(), x.d, x.elements[j]), n, ambient).matrix;

  // Level n holds the partial products Theta^n(x_{j_n}) ... x_{j_0} for all
  // (j_0..j_n), ordered with j_0 slowest; each level multiplies on the left.
  std::vector<ComplexMatrix> level = std::move(shifted[0]);
  for (int n = 1; n < n_steps; ++n) {
    std::vector<ComplexMatrix> next(level.size() * k);
    for (std::size_t prev = 0; prev < level.size(); ++prev)
      for (std::size_t j = 0; j < k; ++j)
        next[prev * k + j] = shifted[n][j] * level[prev];
    level = std::move(next);
  }
  return OperationalPartition(std::move(level));
}

enum class CorrelationPath { kAuto, kDense, kFactorized };

namespace detail {

// Single-site factor of the refined element at `site`, for element tuple j.
// Picks up one factor from every shifted copy whose support covers the site,
// largest shift leftmost.
inline ComplexMatrix refined_site_factor(const LocalPartition& x,
                                         const std::vector<std::size_t>& tuple,
                                         int n_steps, int site) {
  ComplexMatrix f = ComplexMatrix::Identity(x.d, x.d);
  const auto& factors = *x.site_factors;
  for (int n = n_steps - 1; n >= 0; --n) {
    const int local = site - n;  // position inside the shifted window [1+n, M+n]
    if (local >= 1 && local <= x.sites) f *= factors[tuple[n]][local - 1];
  }
  return f;
}

inline std::vector<std::size_t> tuple_of_flat(std::size_t flat, std::size_t k, int n_steps) {
  std::vector<std::size_t> t(n_steps);
  for (int n = n_steps - 1; n >= 0; --n) {
    t[n] = flat % k;
    flat /= k;
  }
  return t;
}

inline DensityMatrix correlation_dense(const SpinChainSystem& sys, const LocalPartition& x,
                                       int n_steps, const DenseCaps& caps) {
  OperationalPartition refined = refine(x, n_steps, caps);
  DensityMatrix omega = sys.restriction(static_cast<std::size_t>(x.sites + n_steps - 1));
  return correlation_matrix(omega, refined);
}

inline DensityMatrix correlation_factorized(const SpinChainSystem& sys,
                                            const LocalPartition& x, int n_steps) {
  const std::size_t k = x.size();
  const std::size_t dim = ipow(k, static_cast<std::size_t>(n_steps));
  const int total_sites = x.sites + n_steps - 1;
  const ComplexMatrix& nu = sys.site_state.matrix();

  // Per element and site, the single-site factor of the refined element.
  std::vector<std::vector<ComplexMatrix>> site_factor(dim);
  for (std::size_t flat = 0; flat < dim; ++flat) {
    auto tuple = tuple_of_flat(flat, k, n_steps);
    site_factor[flat].reserve(total_sites);
    for (int s = 1; s <= total_sites; ++s)
      site_factor[flat].push_back(refined_site_factor(x, tuple, n_steps, s));
  }

  ComplexMatrix rho(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Complex entry(1.0, 0.0);
      for (int s = 0; s < total_sites; ++s) {
        entry *= (nu * site_factor[j][s].adjoint() * site_factor[i][s]).trace();
        if (entry == Complex(0.0, 0.0)) break;
      }
      rho(i, j) = entry;
      rho(j, i) = std::conj(entry);
    }
  }
  return DensityMatrix::from_valid_construction(rho, 1e-10, 1e-10);
}

}  // namespace detail

/// N-step correlation matrix rho_N(i,j) = omega(xi_j^* xi_i) over the refined
/// elements xi, of dimension k^N. The factorized path multiplies single-site
/// traces and needs per-site factors plus the product state; the dense path
/// works for any local partition and serves as the oracle for the former.
inline DensityMatrix refined_correlation(const SpinChainSystem& sys, const LocalPartition& x,
                                         int n_steps, const DenseCaps& caps = {},
                                         CorrelationPath path = CorrelationPath::kAuto) {
  if (n_steps < 1) throw std::invalid_argument("refined_correlation: need N >= 1");
  if (static_cast<std::size_t>(x.elements.front().rows()) !=
      ipow(sys.d, static_cast<std::size_t>(x.sites)))
    throw std::invalid_argument("refined_correlation: partition does not match site dimension");
  detail::check_refine_caps(x, n_steps, caps);
  const bool can_factorize = x.site_factors.has_value();
  if (path == CorrelationPath::kFactorized && !can_factorize)
    throw std::invalid_argument("factorized path needs per-site element factors");
  if (path == CorrelationPath::kDense || !can_factorize)
    return detail::correlation_dense(sys, x, n_steps, caps);
  return detail::correlation_factorized(sys, x, n_steps);
}

/// Closed form for the entropy of rho_N reduced by its first and last site
/// indices: (N-1) (ln d + S(nu)). Valid for the Fourier partition over a
/// product state; no dense work.
inline double reduced_refined_entropy(const SpinChainSystem& sys, int n_steps) {
  if (n_steps < 2) throw std::invalid_argument("reduced_refined_entropy: need N >= 2");
  return (n_steps - 1) *
         (std::log(static_cast<double>(sys.d)) + sys.entropy_density());
}

/// Reduction of rho_N over the first and last index factors, computed
/// densely. Index layout: (i_0, k_0, i_1, k_1, ..., i_{N-1}, k_{N-1}), each
/// of dimension d; the first and last factors are traced out.
inline DensityMatrix reduced_refined_correlation(const SpinChainSystem& sys,
                                                 const DensityMatrix& rho_n, int n_steps) {
  if (n_steps < 2) throw std::invalid_argument("reduced correlation needs N >= 2");
  const std::size_t d = static_cast<std::size_t>(sys.d);
  std::vector<std::size_t> dims(2 * static_cast<std::size_t>(n_steps), d);
  std::vector<std::size_t> keep;
  for (std::size_t f = 1; f + 1 < dims.size(); ++f) keep.push_back(f);
  return partial_trace(rho_n, dims, keep);
}

struct SplitBoundResult {
  double s_rho_n = 0.0;            // S(rho_N), dense
  double s_reduced = 0.0;          // closed form (N-1)(ln d + sigma)
  double s_remainder_bound = 0.0;  // 2 ln d
  bool satisfied = false;          // S(rho_N) >= s_reduced - 2 ln d - 1e-9
};

/// Checks the split-off lower bound S(rho_N) >= S(rho~_N) - 2 ln d for the
/// Fourier partition, computing S(rho_N) densely.
inline SplitBoundResult split_bound_check(const SpinChainSystem& sys, int n_steps,
                                          const DenseCaps& caps = {}) {
  if (n_steps < 2) throw std::invalid_argument("split_bound_check: need N >= 2");
  LocalPartition x = fourier_partition(sys.d);
  DensityMatrix rho = refined_correlation(sys, x, n_steps, caps, CorrelationPath::kDense);
  SplitBoundResult r;
  r.s_rho_n = von_neumann_entropy(rho);
  r.s_reduced = reduced_refined_entropy(sys, n_steps);
  r.s_remainder_bound = 2.0 * std::log(static_cast<double>(sys.d));
  r.satisfied = r.s_rho_n >= r.s_reduced - r.s_remainder_bound - 1e-9;
  return r;
}

struct EntropyRateRow {
  int n = 0;
  double s_rho_n = 0.0;
  double s_per_step = 0.0;
  double increment = 0.0;  // S(rho_N) - S(rho_{N-1})
};

/// Exact finite-N entropies of the refined correlation matrices; no limit is
/// extrapolated. Callers put the table next to the analytic bounds.
inline std::vector<EntropyRateRow> entropy_rate_report(const SpinChainSystem& sys,
                                                       const LocalPartition& x, int n_max,
                                                       const DenseCaps& caps = {},
                                                       CorrelationPath path = CorrelationPath::kAuto) {
  if (n_max < 1) throw std::invalid_argument("entropy_rate_report: need N_max >= 1");
  std::vector<EntropyRateRow> rows;
  double prev = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    double s = von_neumann_entropy(refined_correlation(sys, x, n, caps, path));
    rows.push_back({n, s, s / n, s - prev});
    prev = s;
  }
  return rows;
}

}  // namespace dynent

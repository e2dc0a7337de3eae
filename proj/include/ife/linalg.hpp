#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "ife/errors.hpp"

namespace ife {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

namespace tolerance {
inline constexpr double hermiticity = 1e-10;
inline constexpr double unitarity = 1e-9;
inline constexpr double ortho = 1e-10;
inline constexpr double eig = 1e-10;
inline constexpr double norm = 1e-8;
/// Relative scale for grouping eigenvalues: |λi - λj| <= degeneracy * (1 + ||M||_F).
inline constexpr double degeneracy = 1e-8;
} // namespace tolerance

inline double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

inline double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m,
                         double tol = tolerance::hermiticity) {
  return m.rows() == m.cols() && m.allFinite() && hermiticity_defect(m) <= tol;
}

/// ||U^dagger U - I||_F
inline double unitarity_defect(const ComplexMatrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm();
}

inline ComplexMatrix symmetrized(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

inline void require_hermitian(const ComplexMatrix& m, const char* where) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("linalg", std::string(where) + ": matrix is not square");
  if (!m.allFinite())
    throw NotHermitian("linalg", std::string(where) + ": matrix has non-finite entries");
  if (hermiticity_defect(m) > tolerance::hermiticity)
    throw NotHermitian("linalg", std::string(where) + ": matrix is not Hermitian (defect " +
                                     std::to_string(hermiticity_defect(m)) + ")");
}

/// Orthonormal set of column vectors spanning a subspace of C^dim.
class SubspaceBasis {
public:
  explicit SubspaceBasis(Eigen::Index ambient_dim = 0)
      : vectors_(ambient_dim, 0) {}

  /// Takes ownership of columns that must already be orthonormal.
  explicit SubspaceBasis(ComplexMatrix columns) : vectors_(std::move(columns)) {
    if (vectors_.cols() > vectors_.rows())
      throw InvalidArgument("linalg", "more basis vectors than ambient dimension");
    if (!vectors_.allFinite())
      throw InvalidArgument("linalg", "basis has non-finite entries");
    const auto k = vectors_.cols();
    const double gram_err =
        (vectors_.adjoint() * vectors_ - ComplexMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
    if (k > 0 && gram_err > tolerance::ortho)
      throw InvalidArgument("linalg", "basis vectors are not orthonormal (Gram error " +
                                          std::to_string(gram_err) + ")");
  }

  /// Orthonormal basis for the column span of `columns`; directions with
  /// singular value below `rank_tol` (relative to the largest) are dropped.
  static SubspaceBasis span_of(const ComplexMatrix& columns, double rank_tol = 1e-10) {
    if (columns.cols() == 0) return SubspaceBasis(columns.rows());
    Eigen::JacobiSVD<ComplexMatrix> svd(columns, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && smax > 0.0 && sv(rank) > rank_tol * smax) ++rank;
    return SubspaceBasis(ComplexMatrix(svd.matrixU().leftCols(rank)));
  }

  static SubspaceBasis full(Eigen::Index dim) {
    return SubspaceBasis(ComplexMatrix(ComplexMatrix::Identity(dim, dim)));
  }

  Eigen::Index ambient_dim() const noexcept { return vectors_.rows(); }
  Eigen::Index count() const noexcept { return vectors_.cols(); }
  bool empty() const noexcept { return vectors_.cols() == 0; }

  const ComplexMatrix& matrix() const noexcept { return vectors_; }
  StateVector vector(Eigen::Index i) const { return vectors_.col(i); }

  ComplexMatrix projector() const { return vectors_ * vectors_.adjoint(); }

  /// Distance from `v` to the subspace, ||(I - P) v||.
  double distance(const StateVector& v) const {
    if (v.size() != ambient_dim())
      throw DimensionMismatch("linalg", "vector and subspace dimensions differ");
    return (v - vectors_ * (vectors_.adjoint() * v)).norm();
  }

private:
  ComplexMatrix vectors_;
};

struct Eigensystem {
  RealVector values;     // ascending
  ComplexMatrix vectors; // column i pairs with values(i)
};

/// Cyclic complex Jacobi diagonalisation of a Hermitian matrix.
inline Eigensystem hermitian_eigendecompose(const ComplexMatrix& m, int max_sweeps = 100) {
  require_hermitian(m, "hermitian_eigendecompose");
  const Eigen::Index n = m.rows();
  ComplexMatrix a = symmetrized(m);
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double scale = a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index q = 1; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    if (scale == 0.0 || off_norm() <= 1e-14 * scale) {
      converged = true;
      break;
    }
    if (sweep == max_sweeps) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r < 1e-300) continue;
        const Complex phase = apq / r;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex s_fwd = s * phase;            // J(p,q)
        const Complex s_bwd = -s * std::conj(phase); // J(q,p)

        // a <- a J
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + s_bwd * akq;
          a(k, q) = s_fwd * akp + c * akq;
        }
        // a <- J^dagger a
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(s_bwd) * aqk;
          a(q, k) = std::conj(s_fwd) * apk + c * aqk;
        }
        a(p, q) = a(q, p) = Complex{0.0, 0.0};
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        // v <- v J
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp + s_bwd * vkq;
          v(k, q) = s_fwd * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged)
    throw NoConvergence("linalg", "Jacobi iteration exceeded " + std::to_string(max_sweeps) +
                                      " sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });
  Eigensystem out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

struct Eigenspace {
  double value = 0.0; // mean of the grouped eigenvalues
  SubspaceBasis basis;
};

/// Groups consecutive sorted eigenvalues closer than `degeneracy_tol` into
/// one eigenspace.
inline std::vector<Eigenspace> group_eigenspaces(const Eigensystem& es, double degeneracy_tol) {
  std::vector<Eigenspace> out;
  const Eigen::Index n = es.values.size();
  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && es.values(end) - es.values(end - 1) <= degeneracy_tol) ++end;
    const double mean = es.values.segment(begin, end - begin).mean();
    out.push_back({mean, SubspaceBasis(ComplexMatrix(es.vectors.middleCols(begin, end - begin)))});
    begin = end;
  }
  return out;
}

inline std::vector<Eigenspace> grouped_eigenspaces(const ComplexMatrix& m) {
  const auto es = hermitian_eigendecompose(m);
  return group_eigenspaces(es, tolerance::degeneracy * (1.0 + m.norm()));
}

/// exp(-i H dt) through the eigendecomposition of H.
inline ComplexMatrix unitary_exp(const ComplexMatrix& h, double dt) {
  const auto es = hermitian_eigendecompose(h);
  Eigen::VectorXcd phases(es.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex{0.0, -es.values(i) * dt});
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

/// Orthonormal basis of span(A) ∩ span(B): the directions of A whose
/// principal cosine with B is at least 1 - tol. The result lies in span(A).
inline SubspaceBasis subspace_intersection(const SubspaceBasis& a, const SubspaceBasis& b,
                                           double tol) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DimensionMismatch("linalg", "subspace_intersection: ambient dimensions differ");
  if (a.empty() || b.empty()) return SubspaceBasis(a.ambient_dim());
  const ComplexMatrix overlap = a.matrix().adjoint() * b.matrix();
  Eigen::JacobiSVD<ComplexMatrix> svd(overlap, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index keep = 0;
  while (keep < sv.size() && sv(keep) >= 1.0 - tol) ++keep;
  if (keep == 0) return SubspaceBasis(a.ambient_dim());
  ComplexMatrix cols = a.matrix() * svd.matrixU().leftCols(keep);
  // re-orthonormalise to remove rounding drift
  Eigen::HouseholderQR<ComplexMatrix> qr(cols);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(cols.rows(), keep);
  return SubspaceBasis(std::move(q));
}

/// ||(M - a I) v||_2
inline double residual_norm(const ComplexMatrix& m, const StateVector& v, double a) {
  if (m.rows() != m.cols() || m.cols() != v.size())
    throw DimensionMismatch("linalg", "residual_norm: dimensions differ");
  return (m * v - a * v).norm();
}

/// Re <v, M v> for a unit vector v.
inline double rayleigh_quotient(const ComplexMatrix& m, const StateVector& v) {
  if (m.rows() != m.cols() || m.cols() != v.size())
    throw DimensionMismatch("linalg", "rayleigh_quotient: dimensions differ");
  require_hermitian(m, "rayleigh_quotient");
  if (std::abs(v.norm() - 1.0) > tolerance::norm)
    throw InvalidArgument("linalg", "rayleigh_quotient: vector is not normalized");
  const Complex q = v.dot(m * v); // conjugates v
  return q.real();
}

} // namespace ife

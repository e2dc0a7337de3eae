#pragma once

#include <cstdint>
#include <random>

#include "ife/linalg.hpp"

namespace ife::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240917);
  return gen;
}

inline double uniform(double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline ComplexMatrix random_matrix(Eigen::Index n) {
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex{uniform(), uniform()};
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n) {
  const ComplexMatrix m = random_matrix(n);
  return 0.5 * (m + m.adjoint());
}

inline StateVector random_unit(Eigen::Index n) {
  StateVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex{uniform(), uniform()};
  return v.normalized();
}

inline ComplexMatrix random_unitary(Eigen::Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

/// H0 and H_I block diagonal in a random frame Q, with H_I = lambda on the
/// first `block` columns of Q.
struct PlantedInstance {
  ComplexMatrix h0, hi, q;
  double lambda;
};

inline PlantedInstance planted(Eigen::Index n, Eigen::Index block) {
  const ComplexMatrix q = random_unitary(n);
  ComplexMatrix h0 = ComplexMatrix::Zero(n, n), hi = ComplexMatrix::Zero(n, n);
  h0.topLeftCorner(block, block) = random_hermitian(block);
  h0.bottomRightCorner(n - block, n - block) = random_hermitian(n - block);
  const double lambda = uniform();
  hi.topLeftCorner(block, block) = lambda * ComplexMatrix::Identity(block, block);
  hi.bottomRightCorner(n - block, n - block) = random_hermitian(n - block);
  return {q * h0 * q.adjoint(), q * hi * q.adjoint(), q, lambda};
}

} // namespace ife::testing

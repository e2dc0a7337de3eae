#pragma once

#include <vector>

#include "ife/operators.hpp"

namespace ife {

enum class PropagationMethod { Magnus2, RK4Oracle };

/// U(t_k) sampled on every grid point, U(t_0) = I.
struct EvolutionTrace {
  TimeGrid grid;
  std::vector<ComplexMatrix> unitaries;
  double max_unitarity_defect = 0.0;
  PropagationMethod method = PropagationMethod::Magnus2;

  Eigen::Index dim() const { return unitaries.empty() ? 0 : unitaries.front().rows(); }
  const ComplexMatrix& at(std::size_t k) const {
    if (k >= unitaries.size()) throw IndexOutOfRange("propagation", "trace index out of range");
    return unitaries[k];
  }
};

/// Exponential-midpoint stepper:
/// U(t_{k+1}) = exp(-i H(t_k + dt/2) dt) U(t_k).
inline EvolutionTrace propagate(const TimeDependentOperator& op, const TimeGrid& grid) {
  const Eigen::Index n = op.dim();
  const double dt = grid.dt();
  EvolutionTrace trace{grid, {}, 0.0, PropagationMethod::Magnus2};
  trace.unitaries.reserve(grid.size());
  trace.unitaries.emplace_back(ComplexMatrix::Identity(n, n));

  ComplexMatrix cached_step;
  if (op.is_constant()) cached_step = unitary_exp(evaluate(op, grid.t0()), dt);

  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double mid = grid.time(k) + 0.5 * dt;
    const ComplexMatrix step = op.is_constant() ? cached_step : unitary_exp(evaluate(op, mid), dt);
    trace.unitaries.emplace_back(step * trace.unitaries.back());
    trace.max_unitarity_defect =
        std::max(trace.max_unitarity_defect, unitarity_defect(trace.unitaries.back()));
  }
  return trace;
}

/// Classical RK4 on dU/dt = -i H(t) U, with `substeps` RK4 steps per grid
/// interval. No re-orthonormalisation; the unitarity defect is reported as is.
/// Intended as an independent cross-check of `propagate`.
inline EvolutionTrace propagate_rk4_oracle(const TimeDependentOperator& op, const TimeGrid& grid,
                                           std::size_t substeps = 1) {
  if (substeps == 0) throw InvalidArgument("propagation", "substeps must be positive");
  const Eigen::Index n = op.dim();
  const double h = grid.dt() / static_cast<double>(substeps);
  EvolutionTrace trace{grid, {}, 0.0, PropagationMethod::RK4Oracle};
  trace.unitaries.reserve(grid.size());
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  trace.unitaries.push_back(u);

  auto rhs = [&](double t, const ComplexMatrix& x) -> ComplexMatrix {
    return -kI * (evaluate(op, t) * x);
  };
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double tk = grid.time(k);
    for (std::size_t j = 0; j < substeps; ++j) {
      const double t = tk + static_cast<double>(j) * h;
      const ComplexMatrix k1 = rhs(t, u);
      const ComplexMatrix k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1);
      const ComplexMatrix k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2);
      const ComplexMatrix k4 = rhs(t + h, u + h * k3);
      u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    trace.unitaries.push_back(u);
    trace.max_unitarity_defect = std::max(trace.max_unitarity_defect, unitarity_defect(u));
  }
  return trace;
}

inline StateVector apply(const EvolutionTrace& trace, const StateVector& psi0, std::size_t k) {
  const ComplexMatrix& u = trace.at(k);
  if (u.cols() != psi0.size())
    throw DimensionMismatch("propagation", "state and trace dimensions differ");
  return u * psi0;
}

/// U0^dagger(t_k) H_I(t_k) U0(t_k), symmetrised.
inline ComplexMatrix interaction_picture(const EvolutionTrace& trace_u0,
                                         const TimeDependentOperator& h_int, std::size_t k) {
  const ComplexMatrix& u0 = trace_u0.at(k);
  if (u0.rows() != h_int.dim())
    throw DimensionMismatch("propagation", "trace and interaction dimensions differ");
  const ComplexMatrix hi = evaluate(h_int, trace_u0.grid.time(k));
  return symmetrized(u0.adjoint() * hi * u0);
}

/// max_k ||(A_k - B_k) psi||, or the Frobenius difference of the unitaries
/// when `psi` is empty.
inline double max_trace_discrepancy(const EvolutionTrace& a, const EvolutionTrace& b,
                                    const StateVector& psi = StateVector()) {
  if (a.unitaries.size() != b.unitaries.size())
    throw LengthMismatch("propagation", "traces have different lengths");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.unitaries.size(); ++k) {
    const ComplexMatrix diff = a.unitaries[k] - b.unitaries[k];
    worst = std::max(worst, psi.size() == 0 ? diff.norm() : (diff * psi).norm());
  }
  return worst;
}

} // namespace ife

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "ife/propagation.hpp"

namespace ife {

inline constexpr double kDefaultResidualTol = 1e-8;
inline constexpr double kDefaultSubspaceTol = 1e-8;
inline constexpr std::size_t kLadderTupleCap = 200;

enum class Verdict { IFE, NotIFE };

inline const char* to_string(Verdict v) { return v == Verdict::IFE ? "IFE" : "NotIFE"; }

/// Per-sample outcome of an interaction-free-evolution check of one state.
struct IFEReport {
  TimeGrid grid;
  std::vector<double> residuals;
  std::vector<double> a_samples;
  std::vector<double> accumulated_phase;
  /// |<e^{-iA} U0 psi0, U psi0>|
  std::vector<double> fidelity;
  /// <U0 psi0, U psi0>; its argument tracks -A(t) for an IFE state.
  std::vector<Complex> overlap;
  /// Samples where a(t) jumps much faster than its typical rate.
  std::vector<std::size_t> eigenvalue_jumps;
  Verdict verdict = Verdict::NotIFE;
  double residual_tol_used = 0.0;

  double max_residual() const { return *std::max_element(residuals.begin(), residuals.end()); }
  double min_fidelity() const { return *std::min_element(fidelity.begin(), fidelity.end()); }
};

/// U0 (unperturbed) and U (full) traces on one grid.
struct TracePair {
  EvolutionTrace u0;
  EvolutionTrace u;
};

inline TracePair compute_traces(const SplitHamiltonian& h, const TimeGrid& grid) {
  return {propagate(h.h0(), grid), propagate(h.total(), grid)};
}

/// Cumulative trapezoid integral of a(t); A(t0) = 0.
inline std::vector<double> accumulated_phase(const std::vector<double>& a_samples,
                                             const TimeGrid& grid) {
  if (a_samples.size() != grid.size())
    throw LengthMismatch("ife", "a(t) samples and grid differ in length");
  return cumulative_trapezoid(a_samples, grid.dt());
}

namespace detail {

inline void require_state(const StateVector& psi0, Eigen::Index dim) {
  if (psi0.size() != dim) throw DimensionMismatch("ife", "state and Hamiltonian dimensions differ");
  if (std::abs(psi0.norm() - 1.0) > tolerance::norm)
    throw InvalidArgument("ife", "initial state is not normalized");
}

inline std::vector<std::size_t> find_jumps(const std::vector<double>& a, double dt) {
  std::vector<std::size_t> jumps;
  if (a.size() < 3) return jumps;
  std::vector<double> rates(a.size() - 1);
  double amax = 0.0;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    rates[k] = std::abs(a[k + 1] - a[k]) / dt;
    amax = std::max(amax, std::abs(a[k]));
  }
  std::vector<double> sorted = rates;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const double typical_rate = sorted[sorted.size() / 2];
  const double floor = 1e-9 * (1.0 + amax);
  for (std::size_t k = 0; k < rates.size(); ++k)
    if (rates[k] * dt > 10.0 * dt * typical_rate + floor) jumps.push_back(k + 1);
  return jumps;
}

inline IFEReport finish_report(const StateVector& psi0, const TracePair& traces,
                               std::vector<double> residuals, std::vector<double> a,
                               double max_hint_norm, double residual_tol) {
  const TimeGrid& grid = traces.u0.grid;
  IFEReport r{grid, std::move(residuals), std::move(a), {}, {}, {}, {}, Verdict::NotIFE, 0.0};
  r.accumulated_phase = accumulated_phase(r.a_samples, grid);
  r.fidelity.resize(grid.size());
  r.overlap.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const StateVector free = traces.u0.unitaries[k] * psi0;
    const StateVector full = traces.u.unitaries[k] * psi0;
    const Complex ov = free.dot(full);
    const Complex corrected = std::exp(Complex{0.0, r.accumulated_phase[k]}) * ov;
    r.overlap[k] = ov;
    r.fidelity[k] = std::abs(corrected);
  }
  r.eigenvalue_jumps = find_jumps(r.a_samples, grid.dt());
  r.residual_tol_used = residual_tol * (1.0 + max_hint_norm);
  r.verdict = r.max_residual() <= r.residual_tol_used ? Verdict::IFE : Verdict::NotIFE;
  return r;
}

} // namespace detail

/// Checks H_I(t) U0(t) psi0 = a(t) U0(t) psi0 on every sample, with a(t)
/// estimated by the Rayleigh quotient.
inline IFEReport check_ife_candidate(const StateVector& psi0, const SplitHamiltonian& h,
                                     const TracePair& traces,
                                     double residual_tol = kDefaultResidualTol) {
  detail::require_state(psi0, h.dim());
  const TimeGrid& grid = traces.u0.grid;
  std::vector<double> residuals(grid.size()), a(grid.size());
  double max_norm = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ComplexMatrix hi = evaluate(h.h_int(), grid.time(k));
    StateVector moved = traces.u0.unitaries[k] * psi0;
    moved.normalize();
    a[k] = rayleigh_quotient(hi, moved);
    residuals[k] = residual_norm(hi, moved, a[k]);
    max_norm = std::max(max_norm, hi.norm());
  }
  return detail::finish_report(psi0, traces, std::move(residuals), std::move(a), max_norm,
                               residual_tol);
}

inline IFEReport check_ife_candidate(const StateVector& psi0, const SplitHamiltonian& h,
                                     const TimeGrid& grid,
                                     double residual_tol = kDefaultResidualTol) {
  detail::require_state(psi0, h.dim());
  return check_ife_candidate(psi0, h, compute_traces(h, grid), residual_tol);
}

/// Same check in the interaction picture: H~_I(t_k) psi0 = a_k psi0.
inline IFEReport check_ife_interaction_picture(const StateVector& psi0, const SplitHamiltonian& h,
                                               const TracePair& traces,
                                               double residual_tol = kDefaultResidualTol) {
  detail::require_state(psi0, h.dim());
  const TimeGrid& grid = traces.u0.grid;
  std::vector<double> residuals(grid.size()), a(grid.size());
  double max_norm = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ComplexMatrix ht = interaction_picture(traces.u0, h.h_int(), k);
    a[k] = rayleigh_quotient(ht, psi0);
    residuals[k] = residual_norm(ht, psi0, a[k]);
    max_norm = std::max(max_norm, ht.norm());
  }
  return detail::finish_report(psi0, traces, std::move(residuals), std::move(a), max_norm,
                               residual_tol);
}

inline IFEReport check_ife_interaction_picture(const StateVector& psi0, const SplitHamiltonian& h,
                                               const TimeGrid& grid,
                                               double residual_tol = kDefaultResidualTol) {
  detail::require_state(psi0, h.dim());
  return check_ife_interaction_picture(psi0, h, compute_traces(h, grid), residual_tol);
}

struct IFESubspace {
  SubspaceBasis basis;
  std::vector<double> a_samples;
  double grouped_with_tol = 0.0;
};

/// Tracks the eigenspaces of the interaction-picture interaction term over the
/// grid: each eigenspace at t0 is intersected with every eigenspace at each
/// later sample, so only directions that stay eigenvectors at all samples
/// survive. Survivors with the same a(t) are merged, and every returned
/// basis vector is re-verified with check_ife_interaction_picture.
inline std::vector<IFESubspace> find_ife_subspaces(const SplitHamiltonian& h, const TimeGrid& grid,
                                                   double tol = kDefaultSubspaceTol,
                                                   double residual_tol = kDefaultResidualTol) {
  const TracePair traces = compute_traces(h, grid);

  struct Branch {
    SubspaceBasis basis;
    std::vector<double> a;
  };
  std::vector<Branch> branches;
  for (auto& es : grouped_eigenspaces(interaction_picture(traces.u0, h.h_int(), 0)))
    branches.push_back({std::move(es.basis), {es.value}});

  for (std::size_t k = 1; k < grid.size() && !branches.empty(); ++k) {
    const auto spaces = grouped_eigenspaces(interaction_picture(traces.u0, h.h_int(), k));
    std::vector<Branch> next;
    for (const auto& b : branches) {
      for (const auto& es : spaces) {
        SubspaceBasis common = subspace_intersection(b.basis, es.basis, tol);
        if (common.empty()) continue;
        Branch nb{std::move(common), b.a};
        nb.a.push_back(es.value);
        next.push_back(std::move(nb));
      }
    }
    branches = std::move(next);
  }

  // merge branches whose a(t) trajectories coincide
  std::vector<IFESubspace> merged;
  for (auto& b : branches) {
    double amax = 0.0;
    for (double v : b.a) amax = std::max(amax, std::abs(v));
    const double merge_tol = 1e-8 * (1.0 + amax);
    auto same = std::find_if(merged.begin(), merged.end(), [&](const IFESubspace& s) {
      for (std::size_t k = 0; k < b.a.size(); ++k)
        if (std::abs(s.a_samples[k] - b.a[k]) > merge_tol) return false;
      return true;
    });
    if (same == merged.end()) {
      merged.push_back({std::move(b.basis), std::move(b.a), merge_tol});
    } else {
      ComplexMatrix cols(b.basis.ambient_dim(), same->basis.count() + b.basis.count());
      cols << same->basis.matrix(), b.basis.matrix();
      same->basis = SubspaceBasis::span_of(cols);
    }
  }

  std::vector<IFESubspace> verified;
  for (auto& s : merged) {
    bool ok = true;
    for (Eigen::Index i = 0; i < s.basis.count() && ok; ++i)
      ok = check_ife_interaction_picture(s.basis.vector(i), h, traces, residual_tol).verdict ==
           Verdict::IFE;
    if (ok) verified.push_back(std::move(s));
  }
  return verified;
}

struct LadderDepthResult {
  int depth = 0;
  std::size_t tuples_checked = 0;
  /// max over tuples of residual / (prod ||H0(t_i)||_F * (1 + |a(t)|))
  double max_scaled_residual = 0.0;
  bool pass = false;
};

struct LadderReport {
  /// H_I(t) psi0 = a(t) psi0 at every sample
  bool eigen_condition_pass = false;
  double eigen_condition_max_scaled_residual = 0.0;
  std::vector<double> times;
  std::vector<double> a_samples;
  std::vector<LadderDepthResult> depths;
  bool pass = false;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Non-increasing index tuples (i0 >= i1 >= ... >= i_n) over m samples.
/// All of them when there are at most `cap`, else `cap` seeded draws.
inline std::vector<std::vector<std::size_t>> ladder_tuples(std::size_t m, int n, std::size_t cap) {
  const std::size_t len = static_cast<std::size_t>(n) + 1;
  double total = 1.0; // C(m + len - 1, len)
  for (std::size_t i = 1; i <= len; ++i)
    total = total * static_cast<double>(m + len - i) / static_cast<double>(i);

  std::vector<std::vector<std::size_t>> out;
  if (total <= static_cast<double>(cap)) {
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t upper) -> void {
      if (cur.size() == len) {
        out.push_back(cur);
        return;
      }
      for (std::size_t i = 0; i <= upper; ++i) {
        cur.push_back(upper - i);
        self(self, upper - i);
        cur.pop_back();
      }
    };
    rec(rec, m - 1);
    return out;
  }
  std::uint64_t state = 0x1FEULL + static_cast<std::uint64_t>(n);
  out.reserve(cap);
  for (std::size_t c = 0; c < cap; ++c) {
    std::vector<std::size_t> t(len);
    for (auto& i : t) i = static_cast<std::size_t>(splitmix64(state) % m);
    std::sort(t.begin(), t.end(), std::greater<>());
    out.push_back(std::move(t));
  }
  return out;
}

} // namespace detail

/// Sampled check of the sufficient conditions
///   (H_I(t) - a(t)) psi0 = 0  and
///   (H_I(t) - a(t)) H0(t_1) ... H0(t_n) psi0 = 0,  t >= t_1 >= ... >= t_n,
/// for n = 1..max_depth, with tuples drawn from `time_samples`.
inline LadderReport check_sufficient_ladder(const StateVector& psi0, const SplitHamiltonian& h,
                                            std::vector<double> time_samples, int max_depth,
                                            double tol = kDefaultResidualTol) {
  if (max_depth < 1) throw InvalidDepth("ife", "ladder depth must be at least 1");
  if (time_samples.empty()) throw InvalidArgument("ife", "ladder needs at least one time sample");
  detail::require_state(psi0, h.dim());
  std::sort(time_samples.begin(), time_samples.end());
  const std::size_t m = time_samples.size();

  LadderReport rep;
  rep.times = time_samples;
  std::vector<ComplexMatrix> hi(m), h0(m);
  std::vector<double> h0_norm(m);
  rep.a_samples.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    hi[i] = evaluate(h.h_int(), time_samples[i]);
    h0[i] = evaluate(h.h0(), time_samples[i]);
    h0_norm[i] = h0[i].norm();
    rep.a_samples[i] = rayleigh_quotient(hi[i], psi0);
    const double scaled =
        residual_norm(hi[i], psi0, rep.a_samples[i]) / (1.0 + hi[i].norm());
    rep.eigen_condition_max_scaled_residual =
        std::max(rep.eigen_condition_max_scaled_residual, scaled);
  }
  rep.eigen_condition_pass = rep.eigen_condition_max_scaled_residual <= tol;

  bool all = rep.eigen_condition_pass;
  for (int n = 1; n <= max_depth; ++n) {
    LadderDepthResult d{n, 0, 0.0, false};
    for (const auto& tuple : detail::ladder_tuples(m, n, kLadderTupleCap)) {
      const std::size_t it = tuple[0];
      StateVector v = psi0;
      double bound = 1.0 + std::abs(rep.a_samples[it]);
      for (std::size_t j = tuple.size(); j-- > 1;) {
        v = h0[tuple[j]] * v;
        bound *= h0_norm[tuple[j]];
      }
      const double res = residual_norm(hi[it], v, rep.a_samples[it]);
      const double scaled = bound > 0.0 ? res / bound : (res == 0.0 ? 0.0 : res / 1e-300);
      d.max_scaled_residual = std::max(d.max_scaled_residual, scaled);
      ++d.tuples_checked;
    }
    d.pass = d.max_scaled_residual <= tol;
    all = all && d.pass;
    rep.depths.push_back(d);
  }
  rep.pass = all;
  return rep;
}

struct StaticCriterionResult {
  bool holds = false;
  double a = 0.0;
  /// per power n = 0..N-1: ||(H_I - a) H0^n psi0|| / (||H0^n psi0|| (1 + |a|))
  std::vector<double> scaled_residuals;
  std::optional<int> failing_power;
  double failing_residual = 0.0;
};

/// Time-independent criterion: (H_I - a) H0^n psi0 = 0 for n = 0..N-1.
inline StaticCriterionResult check_time_independent(const StateVector& psi0,
                                                    const ComplexMatrix& h0,
                                                    const ComplexMatrix& hi,
                                                    double tol = kDefaultResidualTol) {
  require_hermitian(h0, "check_time_independent");
  require_hermitian(hi, "check_time_independent");
  if (h0.rows() != hi.rows()) throw DimensionMismatch("ife", "H0 and H_I dimensions differ");
  detail::require_state(psi0, hi.rows());

  StaticCriterionResult out;
  out.a = rayleigh_quotient(hi, psi0);
  const Eigen::Index dim = hi.rows();
  StateVector v = psi0;
  for (Eigen::Index n = 0; n < dim; ++n) {
    if (n > 0) v = h0 * v;
    const double vn = v.norm();
    const double res = residual_norm(hi, v, out.a);
    const double scaled = vn > 0.0 ? res / (vn * (1.0 + std::abs(out.a))) : 0.0;
    out.scaled_residuals.push_back(scaled);
    if (!out.failing_power && scaled > tol) {
      out.failing_power = static_cast<int>(n);
      out.failing_residual = res;
    }
  }
  out.holds = !out.failing_power.has_value();
  return out;
}

} // namespace ife

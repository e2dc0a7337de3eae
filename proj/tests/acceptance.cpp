// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "ife/conditions.hpp"
#include "ife/models.hpp"
#include "test_support.hpp"

using namespace ife;
using namespace ife::models;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// numerical hygiene gathered across every criterion
struct Hygiene {
  double unitarity = 0.0;
  double magnus_vs_rk4 = 0.0;
  std::string worst_run;

  void record_traces(const TracePair& t) {
    unitarity = std::max({unitarity, t.u.max_unitarity_defect, t.u0.max_unitarity_defect});
  }
  /// Compares the Magnus evolution of each state against RK4 at dt <= 1e-4.
  void compare(const std::string& run, const SplitHamiltonian& h, const TimeGrid& grid,
               const EvolutionTrace& magnus, const std::vector<StateVector>& states) {
    const auto substeps = static_cast<std::size_t>(std::ceil(grid.dt() / 1e-4 - 1e-9));
    const auto oracle = propagate_rk4_oracle(h.total(), grid, std::max<std::size_t>(substeps, 1));
    for (const auto& psi : states) {
      const double d = max_trace_discrepancy(magnus, oracle, psi);
      if (d > magnus_vs_rk4) {
        magnus_vs_rk4 = d;
        worst_run = run;
      }
    }
  }
};

Hygiene hygiene;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

models::Model criterion1_model() {
  return spin_half_rotating(ScalarSchedule::constant(1.0), ScalarSchedule::sinusoid(0.3, 0.15, 2.0, 0.0), 0.7);
}

Outcome spin_half_ife() {
  Outcome o;
  auto m = criterion1_model();
  const TimeGrid grid(0.0, 10.0, 10000);
  const auto traces = compute_traces(m.hamiltonian, grid);
  hygiene.record_traces(traces);
  const StateVector psi = spin_half_state(+1, 0.7);
  const auto r = check_ife_candidate(psi, m.hamiltonian, traces);

  // independent trapezoid of alpha
  const auto alpha = ScalarSchedule::sinusoid(0.3, 0.15, 2.0, 0.0);
  double trap = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    trap += 0.5 * grid.dt() * (alpha(grid.time(k - 1)) + alpha(grid.time(k)));

  o.require(r.verdict == Verdict::IFE, "verdict IFE");
  o.require(r.max_residual() <= 1e-7, "max residual <= 1e-7");
  o.require(r.min_fidelity() >= 1.0 - 1e-6, "min fidelity >= 1 - 1e-6");
  o.require(std::abs(r.accumulated_phase.back() - trap) <= 1e-8, "A(10) matches trapezoid");
  o.detail << "max_residual=" << r.max_residual() << " min_fidelity=" << r.min_fidelity()
           << " A(10)=" << r.accumulated_phase.back() << " trapezoid=" << trap;
  hygiene.compare("spin-half", m.hamiltonian, grid, traces.u, {psi});
  return o;
}

Outcome negative_control() {
  Outcome o;
  auto m = criterion1_model();
  const TimeGrid grid(0.0, 10.0, 10000);
  const auto traces = compute_traces(m.hamiltonian, grid);
  hygiene.record_traces(traces);
  const StateVector psi = basis_state(2, 0);
  const auto r = check_ife_candidate(psi, m.hamiltonian, traces);

  // closed form: the interaction-picture coupling only flips |+>, so the
  // residual at t is alpha(t)
  const auto alpha = ScalarSchedule::sinusoid(0.3, 0.15, 2.0, 0.0);
  double max_alpha = 0.0, distance = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    max_alpha = std::max(max_alpha, alpha(grid.time(k)));
    distance = std::max(distance, (traces.u.unitaries[k] * psi - traces.u0.unitaries[k] * psi).norm());
  }
  o.require(r.verdict == Verdict::NotIFE, "verdict NotIFE");
  o.require(std::abs(r.max_residual() - max_alpha) <= 1e-6, "max residual equals max alpha");
  o.require(distance > 0.1, "uncorrected state distance > 0.1");
  o.detail << "max_residual=" << r.max_residual() << " max_alpha=" << max_alpha
           << " max_distance=" << distance;
  hygiene.compare("spin-half |+>", m.hamiltonian, grid, traces.u, {psi});
  return o;
}

Outcome static_no_go() {
  Outcome o;
  auto m = spin_half_static(ScalarSchedule::linear(1.0, 0.3), 0.3, 0.7);
  const TimeGrid grid(0.0, 10.0, 10000);
  const auto subs = find_ife_subspaces(m.hamiltonian, grid);
  hygiene.record_traces(compute_traces(m.hamiltonian, grid));
  o.require(subs.empty(), "no IFE subspace");
  o.detail << "subspaces=" << subs.size();
  return o;
}

Outcome spin_one_doublet() {
  Outcome o;
  auto m = spin_one_model(ScalarSchedule::constant(1.0), ScalarSchedule::constant(0.4), 0.2);
  const TimeGrid grid(0.0, 10.0, 10000);
  const auto subs = find_ife_subspaces(m.hamiltonian, grid);

  ComplexMatrix doublet(3, 2);
  doublet << spin_one_state(+1, 0.2), spin_one_state(-1, 0.2);
  const ComplexMatrix expected = doublet * doublet.adjoint();

  int doublets = 0, singlets = 0;
  double proj_err = 0.0, a_err = 0.0;
  std::optional<SubspaceBasis> found;
  for (const auto& s : subs) {
    if (s.basis.count() == 2) {
      ++doublets;
      found = s.basis;
      proj_err = (s.basis.projector() - expected).norm();
      for (double a : s.a_samples) a_err = std::max(a_err, std::abs(a - 0.4));
    } else if (s.basis.count() == 1) {
      ++singlets;
      o.require(max_abs(s.a_samples) <= 1e-8, "singlet a = 0");
    }
  }
  o.require(doublets == 1, "exactly one doublet");
  o.require(singlets == 1, "one singlet");
  o.require(proj_err <= 1e-7, "doublet projector");
  o.require(a_err <= 1e-8, "doublet a = alpha");

  const auto traces = compute_traces(m.hamiltonian, grid);
  hygiene.record_traces(traces);
  int combos_ok = 0;
  std::vector<StateVector> checked;
  if (found)
    for (int i = 0; i < 10; ++i) {
      const StateVector psi = found->matrix() * ife::testing::random_unit(2);
      combos_ok += check_ife_candidate(psi, m.hamiltonian, traces).verdict == Verdict::IFE;
      if (i < 3) checked.push_back(psi);
    }
  o.require(combos_ok == 10, "random doublet combinations are IFE");
  o.detail << "subspaces=" << subs.size() << " projector_err=" << proj_err << " a_err=" << a_err
           << " combos_ok=" << combos_ok << "/10";
  hygiene.compare("spin-one", m.hamiltonian, grid, traces.u, checked);
  return o;
}

Outcome stirap_adiabatic() {
  Outcome o;
  std::vector<double> infidelity;
  for (double T : {20.0, 40.0, 80.0}) {
    auto m = stirap_model(1.0, 0.5, stirap_theta_ramp(T), ScalarSchedule::constant(0.2));
    const auto grid = TimeGrid::with_max_step(0.0, T, 1e-3);
    const auto traces = compute_traces(m.hamiltonian, grid);
    hygiene.record_traces(traces);
    const StateVector psi = basis_state(3, 0);
    const auto r = check_ife_candidate(psi, m.hamiltonian, traces);
    infidelity.push_back(1.0 - r.min_fidelity());
    o.detail << "T=" << T << ":" << infidelity.back() << " ";
    hygiene.compare("stirap T=" + std::to_string(static_cast<int>(T)), m.hamiltonian, grid, traces.u, {psi});
  }
  o.require(infidelity[0] > infidelity[1] && infidelity[1] > infidelity[2], "monotone decrease");
  o.require(infidelity[2] <= 1e-2, "infidelity at T=80 <= 1e-2");
  return o;
}

Outcome jc_kernel() {
  Outcome o;
  const double gamma = 0.5, delta = 0.7;
  const std::size_t k = 2, cutoff = 10;
  auto m = jc_multiphoton(1.0, 2.0, gamma, k, delta, nullptr, cutoff);
  const Eigen::Index dim = m.descriptor.dim;
  const TimeGrid grid(0.0, 10.0, 10000);
  const auto traces = compute_traces(m.hamiltonian, grid);
  hygiene.record_traces(traces);

  std::vector<StateVector> analysed;
  for (std::size_t n = 0; n < 2; ++n) {
    const StateVector psi = basis_state(dim, jc_index(n, false));
    analysed.push_back(psi);
    const auto r = check_ife_candidate(psi, m.hamiltonian, traces);
    o.require(r.verdict == Verdict::IFE, "|" + std::to_string(n) + ",g> IFE");
    o.require(max_abs(r.a_samples) <= 1e-8, "|" + std::to_string(n) + ",g> a = 0");
    o.require(r.min_fidelity() >= 1.0 - 1e-8, "|" + std::to_string(n) + ",g> fidelity");
    o.detail << "|" << n << ",g> residual=" << r.max_residual() << " ";
  }
  const StateVector two = basis_state(dim, jc_index(2, false));
  analysed.push_back(two);
  const auto r2 = check_ife_candidate(two, m.hamiltonian, traces);
  o.require(r2.verdict == Verdict::NotIFE, "|2,g> NotIFE");
  o.detail << "|2,g> residual=" << r2.max_residual();

  // closed-form interaction picture from independent ladder-operator matrices
  const Eigen::Index nf = static_cast<Eigen::Index>(cutoff + 1);
  ComplexMatrix a = ComplexMatrix::Zero(nf, nf);
  for (Eigen::Index j = 1; j < nf; ++j) a(j - 1, j) = std::sqrt(static_cast<double>(j));
  ComplexMatrix sp = ComplexMatrix::Zero(2, 2);
  sp(1, 0) = 1.0;
  const ComplexMatrix fock = a * a;
  ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < nf; ++i)
    for (Eigen::Index j = 0; j < nf; ++j) c.block(2 * i, 2 * j, 2, 2) = fock(i, j) * sp;
  double worst = 0.0;
  for (std::size_t s = 0; s < 10; ++s) {
    const std::size_t idx = s * 1000 + 500;
    const ComplexMatrix term = gamma * std::exp(Complex{0, -delta * grid.time(idx)}) * c;
    const ComplexMatrix expected = term + term.adjoint();
    worst = std::max(worst, (interaction_picture(traces.u0, m.hamiltonian.h_int(), idx) - expected)
                                .cwiseAbs()
                                .maxCoeff());
  }
  o.require(worst <= 1e-8, "interaction picture matches closed form");
  o.detail << " H_I_tilde_err=" << worst;
  hygiene.compare("jc-multiphoton", m.hamiltonian, grid, traces.u, analysed);
  return o;
}

Outcome jc_time_varying_kernel() {
  Outcome o;
  const auto gamma_l = ScalarSchedule::sinusoid(0.0, 0.3, 1.0, 0.0);
  auto m = jc_sum(1.0, 2.0, ScalarSchedule::constant(0.4), gamma_l, 3, 2, 8);
  const Eigen::Index dim = m.descriptor.dim;
  const TimeGrid grid(0.0, 2.0 * std::numbers::pi, 6000);
  const auto traces = compute_traces(m.hamiltonian, grid);
  hygiene.record_traces(traces);
  std::vector<StateVector> analysed;
  for (std::size_t n = 0; n < 3; ++n) {
    const StateVector psi = basis_state(dim, jc_index(n, false));
    analysed.push_back(psi);
    const auto r = check_ife_candidate(psi, m.hamiltonian, traces);
    const Verdict want = n < 2 ? Verdict::IFE : Verdict::NotIFE;
    o.require(r.verdict == want, "|" + std::to_string(n) + ",g> " + to_string(want));
    o.detail << "|" << n << ",g>:" << to_string(r.verdict) << " ";
  }
  // |2,g> is annihilated where gamma_l vanishes
  double at_zeros = 0.0;
  for (double t : {0.0, std::numbers::pi, 2.0 * std::numbers::pi})
    at_zeros = std::max(at_zeros, (evaluate(m.hamiltonian.h_int(), t) * analysed[2]).norm());
  o.require(at_zeros <= 1e-12, "|2,g> annihilated at zeros of gamma_l");
  o.detail << "|H_I|2,g>| at zeros=" << at_zeros;
  hygiene.compare("jc-sum", m.hamiltonian, grid, traces.u, analysed);
  return o;
}

Outcome static_equivalence() {
  Outcome o;
  const TimeGrid grid(0.0, 5.0, 250);
  int agree = 0, planted_ife = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const bool constructed = trial % 2 == 0;
    ComplexMatrix h0, hi;
    StateVector psi;
    if (constructed) {
      const Eigen::Index block = 1 + trial % 3;
      const auto p = ife::testing::planted(4, block);
      h0 = p.h0;
      hi = p.hi;
      psi = p.q.leftCols(block) * ife::testing::random_unit(block);
    } else {
      h0 = ife::testing::random_hermitian(4);
      hi = ife::testing::random_hermitian(4);
      psi = ife::testing::random_unit(4);
    }
    SplitHamiltonian h(TimeDependentOperator::constant(h0, "h0"), TimeDependentOperator::constant(hi, "hi"));
    const auto traces = compute_traces(h, grid);
    hygiene.record_traces(traces);
    const bool dynamic = check_ife_candidate(psi, h, traces).verdict == Verdict::IFE;
    agree += check_time_independent(psi, h0, hi).holds == dynamic;
    planted_ife += constructed && dynamic;
  }
  o.require(agree == trials, "static and dynamic verdicts agree");
  o.require(planted_ife == trials / 2, "planted instances are IFE");
  o.detail << "agree=" << agree << "/" << trials << " planted_ife=" << planted_ife;
  return o;
}

Outcome sufficiency_not_necessity() {
  Outcome o;
  auto m = criterion1_model();
  const StateVector psi = spin_half_state(+1, 0.7);
  std::vector<double> times;
  for (int i = 0; i <= 10; ++i) times.push_back(i);
  const auto ladder = check_sufficient_ladder(psi, m.hamiltonian, times, 3);
  const auto full = check_ife_candidate(psi, m.hamiltonian, TimeGrid(0.0, 10.0, 10000));
  o.require(!ladder.pass, "spin-half ladder fails");
  o.require(full.verdict == Verdict::IFE, "spin-half full check passes");

  // commuting families: ladder pass at depth 3 must imply IFE
  int ladder_pass = 0, sound = 0;
  const TimeGrid grid(0.0, 3.0, 600);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 4;
    const ComplexMatrix q = ife::testing::random_unitary(n);
    Eigen::VectorXcd d0(n), d1(n), d2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d0(i) = ife::testing::uniform();
      d1(i) = ife::testing::uniform();
      d2(i) = ife::testing::uniform();
    }
    const ComplexMatrix a = q * d0.asDiagonal() * q.adjoint();
    const ComplexMatrix b = q * d1.asDiagonal() * q.adjoint();
    const ComplexMatrix c = q * d2.asDiagonal() * q.adjoint();
    TimeDependentOperator h0(n, [a](double t) { return ComplexMatrix((1.0 + 0.5 * std::sin(t)) * a); }, "h0");
    TimeDependentOperator hi(n, [b, c](double t) { return ComplexMatrix(b + std::cos(t) * c); }, "hi");
    SplitHamiltonian h(h0, hi);
    // common eigenvectors and generic states alternate
    const StateVector s = trial % 2 == 0 ? StateVector(q.col(trial % n)) : ife::testing::random_unit(n);
    if (!check_sufficient_ladder(s, h, {0.0, 0.4, 1.0, 1.7, 3.0}, 3).pass) continue;
    ++ladder_pass;
    sound += check_ife_candidate(s, h, grid).verdict == Verdict::IFE;
  }
  o.require(ladder_pass >= 20, "commuting instances pass the ladder");
  o.require(sound == ladder_pass, "ladder pass implies IFE");
  o.detail << "spin-half ladder=" << (ladder.pass ? "pass" : "fail")
           << " full=" << to_string(full.verdict) << " ladder_pass=" << ladder_pass
           << " of which IFE=" << sound;
  return o;
}

Outcome numerical_hygiene() {
  Outcome o;
  auto m = criterion1_model();
  const StateVector psi = spin_half_state(+1, 0.7);
  const auto total = m.hamiltonian.total();
  const TimeGrid coarse(0.0, 10.0, 10000), fine(0.0, 10.0, 20000);
  const double e1 = max_trace_discrepancy(propagate(total, coarse), propagate_rk4_oracle(total, coarse, 10), psi);
  const double e2 = max_trace_discrepancy(propagate(total, fine), propagate_rk4_oracle(total, fine, 5), psi);
  const double ratio = e1 / e2;
  o.require(hygiene.unitarity <= 1e-8, "unitarity defect <= 1e-8");
  o.require(hygiene.magnus_vs_rk4 <= 1e-6, "Magnus vs RK4 <= 1e-6");
  o.require(ratio >= 3.5 && ratio <= 4.5, "halving dt ratio in [3.5, 4.5]");
  o.detail << "max_unitarity_defect=" << hygiene.unitarity << " max_magnus_vs_rk4=" << hygiene.magnus_vs_rk4
           << " (" << hygiene.worst_run << ") halving_ratio=" << ratio;
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"spin-1/2 rotating field IFE", spin_half_ife},
      {"spin-1/2 negative control", negative_control},
      {"static interaction no-go", static_no_go},
      {"spin-1 doublet", spin_one_doublet},
      {"STIRAP adiabatic limit", stirap_adiabatic},
      {"JC multi-photon kernel", jc_kernel},
      {"JC time-varying kernel", jc_time_varying_kernel},
      {"static criterion equivalence", static_equivalence},
      {"ladder is sufficient, not necessary", sufficiency_not_necessity},
      {"numerical hygiene", numerical_hygiene},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "ife/operators.hpp"

namespace ife::models {

// ---------------------------------------------------------------------------
// Spin matrices. Spin-1/2 basis: (|+>, |->) with sigma_z = diag(1, -1).
// Spin-1 basis: (|+1>, |0>, |-1>) with L_z = diag(1, 0, -1).

inline ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
/// cos(theta) sigma_x + sin(theta) sigma_y
inline ComplexMatrix sigma_theta(double theta) {
  return std::cos(theta) * sigma_x() + std::sin(theta) * sigma_y();
}

/// |±>_theta = (e^{-i theta/2}|+> ± e^{i theta/2}|->)/sqrt(2), eigenvectors of
/// sigma_theta with eigenvalues ±1.
inline StateVector spin_half_state(int sign, double theta) {
  StateVector v(2);
  const double s = sign >= 0 ? 1.0 : -1.0;
  v << std::exp(Complex{0.0, -theta / 2}), s * std::exp(Complex{0.0, theta / 2});
  return v / std::sqrt(2.0);
}

inline ComplexMatrix spin_one_x() {
  ComplexMatrix m(3, 3);
  m << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  return m / std::sqrt(2.0);
}
inline ComplexMatrix spin_one_y() {
  ComplexMatrix m(3, 3);
  m << 0, -kI, 0, kI, 0, -kI, 0, kI, 0;
  return m / std::sqrt(2.0);
}
inline ComplexMatrix spin_one_z() {
  ComplexMatrix m(3, 3);
  m << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  return m;
}
inline ComplexMatrix spin_one_phi(double phi) {
  return std::cos(phi) * spin_one_x() + std::sin(phi) * spin_one_y();
}
inline ComplexMatrix spin_one_phi_squared(double phi) {
  const ComplexMatrix l = spin_one_phi(phi);
  return l * l;
}

/// Eigenvectors of L_phi for eigenvalue m in {-1, 0, +1}. The m = 0 vector
/// is normalised (its textbook form has norm 1/sqrt(2)).
inline StateVector spin_one_state(int m, double phi) {
  const Complex em = std::exp(Complex{0.0, -phi});
  const Complex ep = std::exp(Complex{0.0, phi});
  StateVector v(3);
  if (m == 0) {
    v << em / 2.0, 0.0, -ep / 2.0;
    return v * std::sqrt(2.0);
  }
  if (m != 1 && m != -1) throw InvalidArgument("models", "spin-1 projection must be -1, 0 or 1");
  v << em / 2.0, static_cast<double>(m) / std::sqrt(2.0), ep / 2.0;
  return v;
}

inline StateVector basis_state(Eigen::Index dim, Eigen::Index i) {
  if (i < 0 || i >= dim) throw IndexOutOfRange("models", "basis index out of range");
  StateVector v = StateVector::Zero(dim);
  v(i) = 1.0;
  return v;
}

// ---------------------------------------------------------------------------

struct LabeledState {
  std::string label;
  StateVector state;
  std::string description;
};

using Parameter = std::variant<double, ScalarSchedule>;

struct ModelDescriptor {
  std::string name;
  Eigen::Index dim = 0;
  std::map<std::string, Parameter> parameters;
  /// States whose interaction-free evolution the model guarantees.
  std::vector<LabeledState> known_ife_states;
  /// Every state addressable by label (includes the known IFE states).
  std::vector<LabeledState> named_states;
  std::string notes;
  /// True when the known IFE states hold only approximately (adiabatic).
  bool approximate = false;
  /// Basis indices next to a truncation boundary; population there
  /// invalidates results.
  std::vector<Eigen::Index> boundary_indices;

  const LabeledState* find_state(const std::string& label) const {
    for (const auto& s : named_states)
      if (s.label == label) return &s;
    return nullptr;
  }
};

struct Model {
  SplitHamiltonian hamiltonian;
  ModelDescriptor descriptor;
};

namespace detail {
inline void add_known(ModelDescriptor& d, std::string label, StateVector v, std::string what) {
  d.known_ife_states.push_back({label, v, what});
  d.named_states.push_back({std::move(label), std::move(v), std::move(what)});
}
inline void add_named(ModelDescriptor& d, std::string label, StateVector v, std::string what) {
  d.named_states.push_back({std::move(label), std::move(v), std::move(what)});
}
} // namespace detail

/// Spin-1/2 in a rotating transverse field:
///   H0 = Omega(t)/2 sigma_z,  H_I = alpha(t) sigma_{Phi(t)},
///   Phi(t) = ∫_0^t Omega + phi.
inline Model spin_half_rotating(const ScalarSchedule& omega, const ScalarSchedule& alpha,
                                double phi) {
  TimeDependentOperator h0(
      2, [omega](double t) { return ComplexMatrix(0.5 * omega(t) * sigma_z()); }, "Omega(t)/2 sz",
      omega.is_constant());
  TimeDependentOperator hi(
      2,
      [omega, alpha, phi](double t) {
        return ComplexMatrix(alpha(t) * sigma_theta(omega.integral(0.0, t) + phi));
      },
      "alpha(t) s_Phi(t)");
  ModelDescriptor d;
  d.name = "spin-half";
  d.dim = 2;
  d.parameters = {{"Omega", omega}, {"alpha", alpha}, {"phi", phi}};
  detail::add_known(d, "plus-phi", spin_half_state(+1, phi), "|+>_phi, a(t) = +alpha(t)");
  detail::add_known(d, "minus-phi", spin_half_state(-1, phi), "|->_phi, a(t) = -alpha(t)");
  detail::add_named(d, "plus", basis_state(2, 0), "sigma_z eigenstate |+>");
  detail::add_named(d, "minus", basis_state(2, 1), "sigma_z eigenstate |->");
  d.notes = "U0(t) rotates |±>_phi into |±>_Phi(t), the instantaneous eigenvectors of H_I(t).";
  return {SplitHamiltonian(std::move(h0), std::move(hi)), std::move(d)};
}

/// Fixed-frequency form: H0 = Omega/2 sigma_z,
/// H_I = alpha(t)[cos(Omega t + phi) sigma_x + sin(Omega t + phi) sigma_y].
inline Model spin_half_fixed(double omega, const ScalarSchedule& alpha, double phi) {
  auto m = spin_half_rotating(ScalarSchedule::constant(omega), alpha, phi);
  TimeDependentOperator hi(
      2,
      [omega, alpha, phi](double t) {
        return ComplexMatrix(alpha(t) * (std::cos(omega * t + phi) * sigma_x() +
                                         std::sin(omega * t + phi) * sigma_y()));
      },
      "alpha(t) s_(Omega t + phi)");
  return {SplitHamiltonian(m.hamiltonian.h0(), std::move(hi)), std::move(m.descriptor)};
}

/// Static transverse field alpha sigma_phi under H0 = Omega(t)/2 sigma_z.
/// Has no interaction-free state unless Omega vanishes.
inline Model spin_half_static(const ScalarSchedule& omega, double alpha, double phi) {
  TimeDependentOperator h0(
      2, [omega](double t) { return ComplexMatrix(0.5 * omega(t) * sigma_z()); }, "Omega(t)/2 sz",
      omega.is_constant());
  auto hi = TimeDependentOperator::constant(alpha * sigma_theta(phi), "alpha s_phi");
  ModelDescriptor d;
  d.name = "spin-half";
  d.dim = 2;
  d.parameters = {{"Omega", omega}, {"alpha", alpha}, {"phi", phi}, {"static_interaction", 1.0}};
  detail::add_named(d, "plus-phi", spin_half_state(+1, phi), "|+>_phi");
  detail::add_named(d, "minus-phi", spin_half_state(-1, phi), "|->_phi");
  detail::add_named(d, "plus", basis_state(2, 0), "sigma_z eigenstate |+>");
  detail::add_named(d, "minus", basis_state(2, 1), "sigma_z eigenstate |->");
  d.notes = "Time-independent interaction: no interaction-free state for a rotating H0.";
  return {SplitHamiltonian(std::move(h0), std::move(hi)), std::move(d)};
}

/// Spin-1: H0 = Omega(t) L_z, H_I = alpha(t) L_{phi(t)}^2,
/// phi(t) = ∫_0^t Omega + phi0.
inline Model spin_one_model(const ScalarSchedule& omega, const ScalarSchedule& alpha, double phi0) {
  TimeDependentOperator h0(
      3, [omega](double t) { return ComplexMatrix(omega(t) * spin_one_z()); }, "Omega(t) Lz",
      omega.is_constant());
  TimeDependentOperator hi(
      3,
      [omega, alpha, phi0](double t) {
        return ComplexMatrix(alpha(t) * spin_one_phi_squared(omega.integral(0.0, t) + phi0));
      },
      "alpha(t) L_phi(t)^2");
  ModelDescriptor d;
  d.name = "spin-one";
  d.dim = 3;
  d.parameters = {{"Omega", omega}, {"alpha", alpha}, {"phi0", phi0}};
  detail::add_known(d, "plus1-phi", spin_one_state(+1, phi0), "|+1>_phi0, doublet, a(t) = alpha(t)");
  detail::add_known(d, "minus1-phi", spin_one_state(-1, phi0), "|-1>_phi0, doublet, a(t) = alpha(t)");
  detail::add_named(d, "zero-phi", spin_one_state(0, phi0), "|0>_phi0, singlet, a(t) = 0");
  detail::add_named(d, "+1", basis_state(3, 0), "L_z eigenstate |+1>");
  detail::add_named(d, "0", basis_state(3, 1), "L_z eigenstate |0>");
  detail::add_named(d, "-1", basis_state(3, 2), "L_z eigenstate |-1>");
  d.notes = "Doublet {|±1>_phi0} is an interaction-free subspace with a(t) = alpha(t); the "
            "singlet |0>_phi0 is interaction-free with a(t) = 0.";
  return {SplitHamiltonian(std::move(h0), std::move(hi)), std::move(d)};
}

/// Linear mixing-angle ramp from 0 to pi/2 over [0, T], clamped outside.
inline ScalarSchedule stirap_theta_ramp(double total_time) {
  return ScalarSchedule::ramp(0.0, std::numbers::pi / 2, 0.0, total_time);
}

inline StateVector stirap_dark_state(double theta) {
  StateVector v(3);
  v << std::cos(theta), 0.0, -std::sin(theta);
  return v;
}

/// Three-level Lambda system in the basis (|1>, |2>, |3>):
///   H0 = [[0, W s, 0], [W s, D, W c], [0, W c, 0]],
///   H_I = eps(t) |v(t)><v(t)|,  |v> = c|1> - s|3>,
/// with s = sin(theta(t)), c = cos(theta(t)).
inline Model stirap_model(double omega, double delta, const ScalarSchedule& theta,
                          const ScalarSchedule& eps) {
  TimeDependentOperator h0(
      3,
      [omega, delta, theta](double t) {
        const double s = std::sin(theta(t)), c = std::cos(theta(t));
        ComplexMatrix m(3, 3);
        m << 0, omega * s, 0, omega * s, delta, omega * c, 0, omega * c, 0;
        return m;
      },
      "STIRAP H0", theta.is_constant());
  TimeDependentOperator hi(
      3,
      [theta, eps](double t) {
        const StateVector v = stirap_dark_state(theta(t));
        return ComplexMatrix(eps(t) * (v * v.adjoint()));
      },
      "eps(t) |v(t)><v(t)|", theta.is_constant() && eps.is_constant());
  ModelDescriptor d;
  d.name = "stirap";
  d.dim = 3;
  d.parameters = {{"Omega", omega}, {"Delta", delta}, {"theta", theta}, {"epsilon", eps}};
  detail::add_known(d, "dark", stirap_dark_state(theta(0.0)),
                    "|v(0)> = cos(theta0)|1> - sin(theta0)|3>, a(t) = eps(t) (adiabatic)");
  detail::add_named(d, "1", basis_state(3, 0), "|1>");
  detail::add_named(d, "2", basis_state(3, 1), "|2>");
  detail::add_named(d, "3", basis_state(3, 2), "|3>");
  d.approximate = true;
  d.notes = "APPROXIMATE-ADIABATIC: the dark state is interaction-free only in the adiabatic "
            "limit of the theta(t) sweep.";
  return {SplitHamiltonian(std::move(h0), std::move(hi)), std::move(d)};
}

// ---------------------------------------------------------------------------
// Jaynes-Cummings family. Basis index = 2 m + q with Fock level m in
// [0, cutoff] and qubit q = 0 (g, sigma_z = -1) or 1 (e, sigma_z = +1).

inline Eigen::Index jc_index(std::size_t m, bool excited) {
  return static_cast<Eigen::Index>(2 * m + (excited ? 1 : 0));
}

inline Eigen::Index jc_dim(std::size_t cutoff) { return static_cast<Eigen::Index>(2 * (cutoff + 1)); }

/// omega n + Omega/2 sigma_z
inline ComplexMatrix jc_free_hamiltonian(double omega, double big_omega, std::size_t cutoff) {
  ComplexMatrix h = ComplexMatrix::Zero(jc_dim(cutoff), jc_dim(cutoff));
  for (std::size_t m = 0; m <= cutoff; ++m) {
    h(jc_index(m, false), jc_index(m, false)) = omega * static_cast<double>(m) - 0.5 * big_omega;
    h(jc_index(m, true), jc_index(m, true)) = omega * static_cast<double>(m) + 0.5 * big_omega;
  }
  return h;
}

/// f(n) a^k sigma_+ on the truncated space.
inline ComplexMatrix jc_raising_term(std::size_t k, const std::function<double(std::size_t)>& f,
                                     std::size_t cutoff) {
  ComplexMatrix c = ComplexMatrix::Zero(jc_dim(cutoff), jc_dim(cutoff));
  for (std::size_t m = k; m <= cutoff; ++m) {
    double amp = 1.0;
    for (std::size_t j = m - k + 1; j <= m; ++j) amp *= std::sqrt(static_cast<double>(j));
    c(jc_index(m - k, true), jc_index(m, false)) = f(m - k) * amp;
  }
  return c;
}

namespace detail {
inline void jc_states(ModelDescriptor& d, std::size_t cutoff, std::size_t guaranteed) {
  for (std::size_t m = 0; m <= cutoff; ++m) {
    const std::string g = "m,g:" + std::to_string(m);
    const std::string e = "m,e:" + std::to_string(m);
    if (m < guaranteed)
      add_known(d, g, basis_state(d.dim, jc_index(m, false)), "|" + std::to_string(m) + ",g>, kernel");
    else
      add_named(d, g, basis_state(d.dim, jc_index(m, false)), "|" + std::to_string(m) + ",g>");
    add_named(d, e, basis_state(d.dim, jc_index(m, true)), "|" + std::to_string(m) + ",e>");
  }
}
inline void jc_boundary(ModelDescriptor& d, std::size_t cutoff, std::size_t k) {
  for (std::size_t m = cutoff - k + 1; m <= cutoff; ++m) {
    d.boundary_indices.push_back(jc_index(m, false));
    d.boundary_indices.push_back(jc_index(m, true));
  }
}
} // namespace detail

/// Multi-photon nonlinear JC model,
///   H0 = omega n + Omega/2 sigma_z,
///   H_I(t) = gamma [e^{-i(Omega - k omega + Delta) t} f(n) a^k sigma_+ + h.c.],
/// so that U0^dagger H_I U0 = gamma [e^{-i Delta t} f(n) a^k sigma_+ + h.c.].
inline Model jc_multiphoton(double omega, double big_omega, double gamma, std::size_t k,
                            double delta, std::function<double(std::size_t)> f,
                            std::size_t fock_cutoff) {
  if (k < 1) throw InvalidArgument("models", "photon number k must be positive");
  if (fock_cutoff < k + 2)
    throw CutoffTooSmall("models", "fock_cutoff must be at least k + 2");
  if (!f) f = [](std::size_t) { return 1.0; };
  const ComplexMatrix c = jc_raising_term(k, f, fock_cutoff);
  const double freq = big_omega - static_cast<double>(k) * omega + delta;
  auto h0 = TimeDependentOperator::constant(jc_free_hamiltonian(omega, big_omega, fock_cutoff),
                                            "omega n + Omega/2 sz");
  TimeDependentOperator hi(
      jc_dim(fock_cutoff),
      [c, gamma, freq](double t) {
        const ComplexMatrix term = gamma * std::exp(Complex{0.0, -freq * t}) * c;
        return ComplexMatrix(term + term.adjoint());
      },
      "gamma [e^{-i w t} f(n) a^k s+ + h.c.]");
  ModelDescriptor d;
  d.name = "jc-multiphoton";
  d.dim = jc_dim(fock_cutoff);
  d.parameters = {{"omega", omega},
                  {"Omega", big_omega},
                  {"gamma", gamma},
                  {"k", static_cast<double>(k)},
                  {"Delta", delta},
                  {"fock_cutoff", static_cast<double>(fock_cutoff)}};
  detail::jc_states(d, fock_cutoff, k);
  detail::jc_boundary(d, fock_cutoff, k);
  d.notes = "Kernel multiplet |m,g>, m <= k-1, is interaction-free with a = 0 but is not an "
            "eigenspace of H0. Fock levels above fock_cutoff - k are a truncation boundary; "
            "population there invalidates results.";
  return {SplitHamiltonian(std::move(h0), std::move(hi)), std::move(d)};
}

/// Sum of two multi-photon couplings with k > l:
///   H_I(t) = (gamma_k(t) a^k + gamma_l(t) a^l) sigma_+ + h.c.
inline Model jc_sum(double omega, double big_omega, const ScalarSchedule& gamma_k,
                    const ScalarSchedule& gamma_l, std::size_t k, std::size_t l,
                    std::size_t fock_cutoff) {
  if (l < 1 || k <= l) throw BadOrdering("models", "jc-sum needs k > l >= 1");
  if (fock_cutoff < k + 2)
    throw CutoffTooSmall("models", "fock_cutoff must be at least k + 2");
  const auto one = [](std::size_t) { return 1.0; };
  const ComplexMatrix ck = jc_raising_term(k, one, fock_cutoff);
  const ComplexMatrix cl = jc_raising_term(l, one, fock_cutoff);
  auto h0 = TimeDependentOperator::constant(jc_free_hamiltonian(omega, big_omega, fock_cutoff),
                                            "omega n + Omega/2 sz");
  TimeDependentOperator hi(
      jc_dim(fock_cutoff),
      [ck, cl, gamma_k, gamma_l](double t) {
        const ComplexMatrix term = gamma_k(t) * ck + gamma_l(t) * cl;
        return ComplexMatrix(term + term.adjoint());
      },
      "(gk a^k + gl a^l) s+ + h.c.", gamma_k.is_constant() && gamma_l.is_constant());
  ModelDescriptor d;
  d.name = "jc-sum";
  d.dim = jc_dim(fock_cutoff);
  d.parameters = {{"omega", omega},
                  {"Omega", big_omega},
                  {"gamma_k", gamma_k},
                  {"gamma_l", gamma_l},
                  {"k", static_cast<double>(k)},
                  {"l", static_cast<double>(l)},
                  {"fock_cutoff", static_cast<double>(fock_cutoff)}};
  detail::jc_states(d, fock_cutoff, l);
  detail::jc_boundary(d, fock_cutoff, k);
  d.notes = "States |m,g> with m <= l-1 are always interaction-free. States with l <= m <= k-1 "
            "are interaction-free only while gamma_l vanishes identically. Fock levels above "
            "fock_cutoff - k are a truncation boundary.";
  return {SplitHamiltonian(std::move(h0), std::move(hi)), std::move(d)};
}

// ---------------------------------------------------------------------------

struct CatalogEntry {
  std::string name;
  std::string dim;
  std::vector<std::string> parameters;
  std::vector<std::string> ife_states;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {"spin-half", "2", {"Omega", "alpha", "phi", "static_interaction"}, {"plus-phi", "minus-phi"}},
      {"spin-one", "3", {"Omega", "alpha", "phi0"}, {"plus1-phi", "minus1-phi"}},
      {"stirap", "3", {"Omega", "Delta", "epsilon", "theta", "T"}, {"dark (approximate)"}},
      {"jc-multiphoton",
       "2*(fock_cutoff+1)",
       {"omega", "Omega", "gamma", "k", "Delta", "f", "fock_cutoff"},
       {"m,g:0 .. m,g:k-1"}},
      {"jc-sum",
       "2*(fock_cutoff+1)",
       {"omega", "Omega", "gamma_k", "gamma_l", "k", "l", "fock_cutoff"},
       {"m,g:0 .. m,g:l-1"}},
  };
  return entries;
}

} // namespace ife::models

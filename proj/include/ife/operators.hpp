#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ife/linalg.hpp"

namespace ife {

/// Uniform grid t0 < t1 < ... < t_steps = t_end.
class TimeGrid {
public:
  TimeGrid(double t0, double t_end, std::size_t steps) : t0_(t0), t_end_(t_end), steps_(steps) {
    if (steps == 0) throw InvalidArgument("operators", "time grid needs at least one step");
    if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0))
      throw InvalidArgument("operators", "time grid needs finite t0 < t_end");
  }

  /// Grid on [t0, t_end] with spacing at most `max_dt`.
  static TimeGrid with_max_step(double t0, double t_end, double max_dt) {
    if (!(max_dt > 0.0)) throw InvalidArgument("operators", "step size must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / max_dt - 1e-9));
    return TimeGrid(t0, t_end, std::max<std::size_t>(steps, 1));
  }

  double t0() const noexcept { return t0_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return (t_end_ - t0_) / static_cast<double>(steps_); }

  double time(std::size_t k) const {
    if (k > steps_) throw IndexOutOfRange("operators", "time grid index out of range");
    if (k == steps_) return t_end_;
    return t0_ + (t_end_ - t0_) * (static_cast<double>(k) / static_cast<double>(steps_));
  }

  std::vector<double> samples() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = time(k);
    return out;
  }

  bool operator==(const TimeGrid&) const = default;

private:
  double t0_;
  double t_end_;
  std::size_t steps_;
};

/// Real-valued function of time, optionally with a closed-form antiderivative.
class ScalarSchedule {
public:
  using Fn = std::function<double(double)>;

  ScalarSchedule() : ScalarSchedule(constant(0.0)) {}
  ScalarSchedule(Fn value, std::string label, std::optional<Fn> antiderivative = std::nullopt,
                 bool is_constant = false)
      : value_(std::move(value)), antiderivative_(std::move(antiderivative)),
        label_(std::move(label)), constant_(is_constant) {}

  double operator()(double t) const { return value_(t); }
  const std::string& label() const noexcept { return label_; }
  bool is_constant() const noexcept { return constant_; }
  bool has_antiderivative() const noexcept { return antiderivative_.has_value(); }

  /// ∫_a^b s(t) dt. Uses the antiderivative when known, otherwise composite
  /// 5-point Gauss-Legendre on panels no wider than 0.05.
  double integral(double a, double b) const {
    if (antiderivative_) return (*antiderivative_)(b) - (*antiderivative_)(a);
    if (a == b) return 0.0;
    static constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831,
                                             -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665,
                                             0.4786286704993665, 0.2369268850561891,
                                             0.2369268850561891};
    const auto panels = static_cast<std::size_t>(std::ceil(std::abs(b - a) / 0.05));
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = a + (static_cast<double>(p) + 0.5) * h;
      for (std::size_t i = 0; i < 5; ++i) sum += w[i] * value_(mid + 0.5 * h * x[i]);
    }
    return 0.5 * h * sum;
  }

  static ScalarSchedule constant(double c) {
    return {[c](double) { return c; }, "constant(" + std::to_string(c) + ")",
            Fn([c](double t) { return c * t; }), true};
  }
  /// offset + slope * t
  static ScalarSchedule linear(double offset, double slope) {
    return {[=](double t) { return offset + slope * t; }, "linear",
            Fn([=](double t) { return offset * t + 0.5 * slope * t * t; }), slope == 0.0};
  }
  /// offset + amplitude * sin(frequency * t + phase)
  static ScalarSchedule sinusoid(double offset, double amplitude, double frequency,
                                 double phase) {
    std::optional<Fn> anti;
    if (frequency != 0.0)
      anti = Fn([=](double t) {
        return offset * t - amplitude / frequency * std::cos(frequency * t + phase);
      });
    else
      anti = Fn([=](double t) { return (offset + amplitude * std::sin(phase)) * t; });
    return {[=](double t) { return offset + amplitude * std::sin(frequency * t + phase); },
            "sinusoid", anti, amplitude == 0.0 || frequency == 0.0};
  }
  /// Linear from `start` at t_start to `end` at t_end, held constant outside.
  static ScalarSchedule ramp(double start, double end, double t_start, double t_end) {
    if (!(t_end > t_start)) throw InvalidArgument("operators", "ramp needs t_start < t_end");
    const double slope = (end - start) / (t_end - t_start);
    auto value = [=](double t) {
      if (t <= t_start) return start;
      if (t >= t_end) return end;
      return start + slope * (t - t_start);
    };
    auto anti = [=](double t) {
      if (t <= t_start) return start * t;
      const double base = start * t_start;
      if (t >= t_end) return base + 0.5 * (start + end) * (t_end - t_start) + end * (t - t_end);
      const double u = t - t_start;
      return base + start * u + 0.5 * slope * u * u;
    };
    return {value, "ramp", Fn(anti), start == end};
  }
  static ScalarSchedule product(std::vector<ScalarSchedule> factors) {
    bool all_const = true;
    for (const auto& f : factors) all_const = all_const && f.is_constant();
    auto fs = std::make_shared<const std::vector<ScalarSchedule>>(std::move(factors));
    return {[fs](double t) {
              double v = 1.0;
              for (const auto& f : *fs) v *= f(t);
              return v;
            },
            "product", std::nullopt, all_const};
  }

private:
  Fn value_;
  std::optional<Fn> antiderivative_;
  std::string label_;
  bool constant_ = false;
};

/// Maps time to a Hermitian matrix of fixed dimension.
class TimeDependentOperator {
public:
  using Fn = std::function<ComplexMatrix(double)>;

  TimeDependentOperator(Eigen::Index dim, Fn evaluator, std::string label,
                        bool is_constant = false)
      : dim_(dim), evaluator_(std::move(evaluator)), label_(std::move(label)),
        constant_(is_constant), warnings_(std::make_shared<std::atomic<std::size_t>>(0)) {
    if (dim < 1) throw InvalidArgument("operators", "operator dimension must be positive");
  }

  static TimeDependentOperator constant(ComplexMatrix m, std::string label) {
    const auto dim = m.rows();
    return {dim, [m = std::move(m)](double) { return m; }, std::move(label), true};
  }

  static TimeDependentOperator zero(Eigen::Index dim, std::string label = "zero") {
    return constant(ComplexMatrix::Zero(dim, dim), std::move(label));
  }

  Eigen::Index dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }
  bool is_constant() const noexcept { return constant_; }

  /// Number of evaluations whose raw output needed more than
  /// hermiticity-tolerance correction.
  std::size_t symmetrization_warnings() const noexcept { return warnings_->load(); }

  ComplexMatrix raw(double t) const { return evaluator_(t); }

private:
  friend ComplexMatrix evaluate(const TimeDependentOperator& op, double t);

  Eigen::Index dim_;
  Fn evaluator_;
  std::string label_;
  bool constant_;
  std::shared_ptr<std::atomic<std::size_t>> warnings_;
};

/// Evaluates `op` at `t`, returning the Hermitian part of the result.
inline ComplexMatrix evaluate(const TimeDependentOperator& op, double t) {
  ComplexMatrix m;
  try {
    m = op.evaluator_(t);
  } catch (const std::exception& e) {
    throw EvaluationFailure("operators", "evaluating '" + op.label_ + "' at t=" +
                                             std::to_string(t) + " failed: " + e.what());
  }
  if (m.rows() != op.dim_ || m.cols() != op.dim_)
    throw EvaluationFailure("operators", "'" + op.label_ + "' returned a matrix of wrong size");
  if (!m.allFinite())
    throw EvaluationFailure("operators", "'" + op.label_ + "' returned non-finite entries at t=" +
                                             std::to_string(t));
  if (hermiticity_defect(m) > tolerance::hermiticity) op.warnings_->fetch_add(1);
  return symmetrized(m);
}

/// Sum of two operators of equal dimension.
inline TimeDependentOperator operator+(const TimeDependentOperator& a,
                                       const TimeDependentOperator& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("operators", "cannot add operators of different dimension");
  return {a.dim(), [a, b](double t) { return ComplexMatrix(a.raw(t) + b.raw(t)); },
          a.label() + " + " + b.label(), a.is_constant() && b.is_constant()};
}

/// H(t) = h0(t) + h_int(t)
class SplitHamiltonian {
public:
  SplitHamiltonian(TimeDependentOperator h0, TimeDependentOperator h_int)
      : h0_(std::move(h0)), h_int_(std::move(h_int)) {
    if (h0_.dim() != h_int_.dim())
      throw DimensionMismatch("operators", "unperturbed and interaction terms differ in dimension");
  }

  const TimeDependentOperator& h0() const noexcept { return h0_; }
  const TimeDependentOperator& h_int() const noexcept { return h_int_; }
  TimeDependentOperator total() const { return h0_ + h_int_; }
  Eigen::Index dim() const noexcept { return h0_.dim(); }

private:
  TimeDependentOperator h0_;
  TimeDependentOperator h_int_;
};

/// Cumulative trapezoid of equally spaced samples; out[0] = 0.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& values, double dt) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t k = 1; k < values.size(); ++k)
    out[k] = out[k - 1] + 0.5 * dt * (values[k - 1] + values[k]);
  return out;
}

/// ∫_{t0}^{t_k} s on every grid sample (trapezoid). Any additive offset
/// such as an initial phase is left to the caller.
inline std::vector<double> phase_integral(const ScalarSchedule& s, const TimeGrid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = s(grid.time(k));
  return cumulative_trapezoid(values, grid.dt());
}

} // namespace ife

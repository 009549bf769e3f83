#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/trace.hpp"

namespace safeopt_mc::bench {

enum class Reference { Step, Circle };

inline std::string to_string(Reference r) { return r == Reference::Step ? "step" : "circle"; }

inline Reference reference_from_string(const std::string& s) {
  if (s == "step") return Reference::Step;
  if (s == "circle") return Reference::Circle;
  throw ContractViolation("unknown reference '" + s + "'");
}

/// How tracking cost turns into the maximized performance value.
enum class PerformanceSign {
  Maximize,  ///< f = fraction * C0 - C, higher is better
  Literal,   ///< f = C - fraction * C0
};

/// Second-order closed-loop tracking plant with a first-order lag between
/// commanded and achieved acceleration. Parameters are (tau, zeta):
///   a_c = a_des + (x_des - x) / tau^2 + (2 zeta / tau) (v_des - v).
/// Position and velocity measurements carry Gaussian noise that is held
/// over each control sample. The "angular rate" is the derivative of the
/// small-angle tilt a_c / g between consecutive samples.
struct PlantSpec {
  Reference reference = Reference::Step;
  double step_size = 1.0;                      // m
  double duration = 5.0;                       // s (step)
  int samples = 350;                           // step horizon
  double radius = 1.0;                         // m (circle)
  double circle_duration = 2.0 * std::numbers::pi;  // s
  double dt = 1.0 / 70.0;                      // s
  int substeps = 10;
  double lag = 0.05;                           // s, 0 disables the lag
  double position_noise = 0.001;               // m
  double velocity_noise = 0.002;               // m/s
  double disturbance = 0.0;                    // m/s^2, additive on the achieved acceleration
  double gravity = 9.81;
  double rate_limit = 0.5;                     // rad/s
  double rmse_limit = 0.2;                     // m (circle)
  double divergence_bound = 1e3;               // m
  double saturated_cost = 10.0;
  double saturated_rate = 100.0;

  void validate() const {
    if (!(dt > 0.0) || substeps < 1) throw ContractViolation("plant: invalid time step");
    if (reference == Reference::Step && samples < 1) throw ContractViolation("plant: need at least one sample");
    if (!(lag >= 0.0)) throw ContractViolation("plant: lag must be >= 0");
    if (!(position_noise >= 0.0) || !(velocity_noise >= 0.0) || !(disturbance >= 0.0)) {
      throw ContractViolation("plant: negative noise");
    }
    if (!(radius > 0.0) || !(circle_duration > 0.0)) throw ContractViolation("plant: invalid circle");
  }

  int horizon() const {
    return reference == Reference::Step ? samples : static_cast<int>(std::lround(circle_duration / dt));
  }
};

struct PlantResult {
  double rmse = 0.0;
  double max_rate = 0.0;
  bool unstable = false;
  std::vector<Eigen::Vector2d> positions;  // filled on request
};

namespace detail {

struct RefSample {
  Eigen::Vector2d p, v, a;
};

inline RefSample reference_at(const PlantSpec& spec, double speed, double t) {
  if (spec.reference == Reference::Step) {
    return {Eigen::Vector2d(spec.step_size, 0.0), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  }
  const double w = speed / spec.radius;
  const double c = std::cos(w * t), s = std::sin(w * t);
  const Eigen::Vector2d p(spec.radius * c, spec.radius * s);
  return {p, Eigen::Vector2d(-spec.radius * w * s, spec.radius * w * c), -w * w * p};
}

}  // namespace detail

/// Integrates the closed loop with RK4 over the reference horizon.
/// Diverging runs stop early and report saturated, finite values.
inline PlantResult simulate(const PlantSpec& spec, double tau, double zeta, double speed, std::mt19937_64& rng,
                            bool keep_trajectory = false) {
  spec.validate();
  if (!(tau > 0.0) || !(zeta > 0.0)) throw ContractViolation("plant: tau and zeta must be positive");
  const bool circle = spec.reference == Reference::Circle;
  const int axes = circle ? 2 : 1;
  const int N = spec.horizon();
  const double h = spec.dt / spec.substeps;
  const double kp = 1.0 / (tau * tau);
  const double kd = 2.0 * zeta / tau;
  std::normal_distribution<double> normal(0.0, 1.0);

  using State = Eigen::Matrix<double, 6, 1>;  // position, velocity, achieved acceleration
  State st = State::Zero();
  if (circle) {
    const auto r0 = detail::reference_at(spec, speed, 0.0);
    st << r0.p, r0.v, r0.a;
  }

  auto command = [&](const State& s, double t, const Eigen::Vector2d& np, const Eigen::Vector2d& nv) {
    const auto r = detail::reference_at(spec, speed, t);
    return Eigen::Vector2d(r.a + kp * (r.p - s.head<2>() - np) + kd * (r.v - s.segment<2>(2) - nv));
  };
  auto deriv = [&](const State& s, double t, const Eigen::Vector2d& np, const Eigen::Vector2d& nv,
                   const Eigen::Vector2d& w) {
    const Eigen::Vector2d ac = command(s, t, np, nv);
    State d;
    if (spec.lag > 0.0) {
      d << s.segment<2>(2), s.tail<2>() + w, (ac - s.tail<2>()) / spec.lag;
    } else {
      d << s.segment<2>(2), ac + w, Eigen::Vector2d::Zero();
    }
    if (axes == 1) {
      d[1] = 0.0;
      d[3] = 0.0;
      d[5] = 0.0;
    }
    return d;
  };

  PlantResult res;
  double sq_err = 0.0;
  Eigen::Vector2d prev_tilt = Eigen::Vector2d::Zero();
  for (int k = 0; k < N; ++k) {
    const double t = k * spec.dt;
    Eigen::Vector2d np = Eigen::Vector2d::Zero(), nv = Eigen::Vector2d::Zero(), w = Eigen::Vector2d::Zero();
    for (int ax = 0; ax < axes; ++ax) {
      np[ax] = spec.position_noise * normal(rng);
      nv[ax] = spec.velocity_noise * normal(rng);
      w[ax] = spec.disturbance * normal(rng);
    }
    // Tilt in a frame that follows the reference heading, so that a perfect
    // circular track has constant tilt.
    const Eigen::Vector2d ac = command(st, t, np, nv);
    Eigen::Vector2d tilt = ac / spec.gravity;
    if (circle) {
      const double phi = speed / spec.radius * t;
      const Eigen::Vector2d er(std::cos(phi), std::sin(phi)), et(-std::sin(phi), std::cos(phi));
      tilt = Eigen::Vector2d(ac.dot(er), ac.dot(et)) / spec.gravity;
    }
    if (k > 0) res.max_rate = std::max(res.max_rate, (tilt - prev_tilt).cwiseAbs().maxCoeff() / spec.dt);
    prev_tilt = tilt;

    for (int s = 0; s < spec.substeps; ++s) {
      const double tt = t + s * h;
      const State k1 = deriv(st, tt, np, nv, w);
      const State k2 = deriv(st + 0.5 * h * k1, tt + 0.5 * h, np, nv, w);
      const State k3 = deriv(st + 0.5 * h * k2, tt + 0.5 * h, np, nv, w);
      const State k4 = deriv(st + h * k3, tt + h, np, nv, w);
      st += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    // Position samples x_1..x_N are taken at the end of each control period.
    const auto r = detail::reference_at(spec, speed, t + spec.dt);
    sq_err += (st.head<2>() - r.p).squaredNorm();
    if (keep_trajectory) res.positions.push_back(st.head<2>());
    if (!st.allFinite() || st.head<2>().norm() > spec.divergence_bound) {
      res.unstable = true;
      break;
    }
  }
  if (res.unstable) {
    res.rmse = spec.saturated_cost;
    res.max_rate = spec.saturated_rate;
  } else {
    res.rmse = std::sqrt(sq_err / N);
  }
  return res;
}

/// Maps a cost to the maximized performance value.
struct PerformanceMap {
  double reference_cost = 1.0;  // C(a0)
  double fraction = 0.75;
  PerformanceSign sign = PerformanceSign::Maximize;

  double operator()(double cost) const {
    const double target = fraction * reference_cost;
    return sign == PerformanceSign::Maximize ? target - cost : cost - target;
  }
};

/// Step reference: outputs {f, rate margin}.
inline EvaluationResult simulate_step(const PlantSpec& spec, const Eigen::VectorXd& a, const PerformanceMap& perf,
                                      std::mt19937_64& rng) {
  if (a.size() != 2) throw ContractViolation("plant parameters are (tau, zeta)");
  PlantSpec s = spec;
  s.reference = Reference::Step;
  const PlantResult r = simulate(s, a[0], a[1], 0.0, rng);
  EvaluationResult out;
  out.observed = {perf(r.rmse), s.rate_limit - r.max_rate};
  out.unstable = r.unstable;
  return out;
}

/// Circle reference at `speed`: outputs {f, RMSE margin, rate margin}.
inline EvaluationResult simulate_circle(const PlantSpec& spec, const Eigen::VectorXd& a, double speed,
                                        const PerformanceMap& perf, std::mt19937_64& rng) {
  if (a.size() != 2) throw ContractViolation("plant parameters are (tau, zeta)");
  PlantSpec s = spec;
  s.reference = Reference::Circle;
  const PlantResult r = simulate(s, a[0], a[1], speed, rng);
  EvaluationResult out;
  out.observed = {perf(r.rmse), s.rmse_limit - r.rmse, s.rate_limit - r.max_rate};
  out.unstable = r.unstable;
  return out;
}

/// Noise-free cost of `a` on the spec's reference (speed used for circles).
inline double noise_free_cost(PlantSpec spec, const Eigen::VectorXd& a, double speed = 1.0) {
  spec.position_noise = 0.0;
  spec.velocity_noise = 0.0;
  spec.disturbance = 0.0;
  std::mt19937_64 rng(0);
  return simulate(spec, a[0], a[1], speed, rng).rmse;
}

}  // namespace safeopt_mc::bench

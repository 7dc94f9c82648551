#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "curv/errors.hpp"
#include "curv/tensor.hpp"

namespace curv {

// ---------------------------------------------------------------------------
// Embedded Dormand-Prince 5(4) integrator with PI step control and cubic
// Hermite dense output.  The vector field is smooth and quadratic here, so
// no stiffness handling is needed; blowup is caught by a norm guard.
// ---------------------------------------------------------------------------

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0;     // 0 = auto
  double max_step = 0.0;         // 0 = unbounded
  double fixed_step = 0.0;       // > 0 disables adaptivity (order studies)
  double norm_guard = 0.0;       // stop when |y| exceeds this (0 = off)
};

struct OdeStep {
  double t0, t1;
  Eigen::VectorXd y0, y1, f0, f1;

  /// Cubic Hermite interpolant on [t0, t1].
  Eigen::VectorXd eval(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
  }
};

enum class OdeOutcome { Horizon, Blowup, Stopped };

struct OdeResult {
  OdeOutcome outcome = OdeOutcome::Horizon;
  double t_end = 0.0;
  Eigen::VectorXd y_end;
  long accepted = 0, rejected = 0;
  double blowup_time = 0.0;  // valid when outcome == Blowup
};

/// Integrate y' = f(t,y) from (t0,y0) to t0+horizon (horizon may be
/// negative).  `observer(step)` runs after every accepted step; returning
/// false stops the integration with outcome Stopped.
inline OdeResult integrate_rk45(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
    double t0, const Eigen::VectorXd& y0, double horizon, const OdeOptions& opt,
    const std::function<bool(const OdeStep&)>& observer = nullptr) {
  // Dormand-Prince coefficients
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = horizon >= 0 ? 1.0 : -1.0;
  const double t_final = t0 + horizon;
  const double span = std::abs(horizon);

  OdeResult res;
  res.y_end = y0;

  double t = t0;
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1 = f(t, y);

  double h;
  if (opt.fixed_step > 0) {
    h = opt.fixed_step;
  } else if (opt.initial_step > 0) {
    h = opt.initial_step;
  } else {
    const double sc = opt.abs_tol + opt.rel_tol * y.norm();
    const double d = k1.norm();
    h = (d > 0) ? 0.01 * sc / std::max(d, 1e-300) : span / 100.0;
    h = std::min(h, span / 10.0);
    if (h <= 0 || !std::isfinite(h)) h = span / 100.0;
  }
  if (opt.max_step > 0) h = std::min(h, opt.max_step);

  double err_prev = 1.0;
  const int dim = static_cast<int>(y.size());
  Eigen::VectorXd k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim),
      y5(dim), errv(dim);

  while (dir * (t_final - t) > 1e-14 * std::max(1.0, std::abs(t))) {
    h = std::min(h, std::abs(t_final - t));
    if (h < 1e-14 * std::max({1.0, std::abs(t), span}))
      throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t));
    const double hs = dir * h;

    k2 = f(t + c2 * hs, y + hs * (a21 * k1));
    k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(t + hs, y5);

    errv = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double sc =
        opt.abs_tol + opt.rel_tol * std::max(y.norm(), y5.norm());
    const double err = errv.norm() / std::max(sc, 1e-300);

    const bool accept = opt.fixed_step > 0 || err <= 1.0;
    if (accept) {
      OdeStep step{t, t + hs, y, y5, k1, k7};
      t += hs;
      y.swap(y5);
      k1.swap(k7);
      ++res.accepted;
      err_prev = std::max(err, 1e-4);

      if (opt.norm_guard > 0 && y.norm() >= opt.norm_guard) {
        res.outcome = OdeOutcome::Blowup;
        // bracket the guard crossing on the Hermite interpolant
        double lo = step.t0, hi = step.t1;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (step.eval(mid).norm() >= opt.norm_guard)
            hi = mid;
          else
            lo = mid;
        }
        res.blowup_time = hi;
        res.t_end = t;
        res.y_end = y;
        if (observer) observer(step);
        return res;
      }
      if (observer && !observer(step)) {
        res.outcome = OdeOutcome::Stopped;
        res.t_end = t;
        res.y_end = y;
        return res;
      }
    } else {
      ++res.rejected;
    }

    if (opt.fixed_step <= 0) {
      // PI controller (order 5 advancing solution)
      const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                         std::pow(err_prev, 0.4 / 5.0);
      h *= std::clamp(fac, 0.2, 5.0);
      if (opt.max_step > 0) h = std::min(h, opt.max_step);
    }
  }

  res.outcome = OdeOutcome::Horizon;
  res.t_end = t;
  res.y_end = y;
  return res;
}

// ---------------------------------------------------------------------------
// Hamilton's curvature reaction ODE: dRm/dt = Q(Rm).
// ---------------------------------------------------------------------------

enum class Termination { Horizon, Blowup, ToleranceFailure, Stopped };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::Blowup: return "blowup";
    case Termination::ToleranceFailure: return "tolerance-failure";
    default: return "stopped";
  }
}

struct ODETrajectory {
  std::vector<double> times;
  std::vector<Tensor> tensors;
  long accepted = 0, rejected = 0;
  Termination reason = Termination::Horizon;
  double blowup_time = 0.0;
};

/// Integrate dRm/dt = Q(Rm) up to `horizon`; stores the state at every
/// accepted step plus dense output at the requested sample times.
/// Blows up when |Rm| exceeds 1e6 |Rm0|.
inline ODETrajectory integrate_hamilton_ode(
    const Tensor& rm0, double horizon, double rel_tol = 1e-8,
    double abs_tol = 1e-10, const std::vector<double>& sample_times = {}) {
  if (!(rel_tol > 0) || !(abs_tol > 0))
    throw ConfigError("tolerances must be positive");
  const int n = rm0.dim();
  auto rhs = [n](double, const Eigen::VectorXd& y) {
    Tensor rm(n, y);
    return q_reaction(rm).data();
  };

  ODETrajectory traj;
  traj.times.push_back(0.0);
  traj.tensors.push_back(rm0);

  const double guard = 1e6 * std::max(frobenius_norm(rm0), 1e-300);
  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  opt.norm_guard = frobenius_norm(rm0) > 0 ? guard : 0.0;

  std::size_t next_sample = 0;
  auto observer = [&](const OdeStep& step) {
    while (next_sample < sample_times.size() &&
           sample_times[next_sample] <= step.t1 + 1e-15) {
      const double ts = sample_times[next_sample];
      if (ts >= step.t0) {
        traj.times.push_back(ts);
        traj.tensors.emplace_back(n, step.eval(ts));
      }
      ++next_sample;
    }
    traj.times.push_back(step.t1);
    traj.tensors.emplace_back(n, step.y1);
    return true;
  };

  OdeResult r;
  try {
    r = integrate_rk45(rhs, 0.0, rm0.data(), horizon, opt, observer);
  } catch (const StepSizeUnderflow&) {
    traj.reason = Termination::ToleranceFailure;
    traj.accepted = 0;
    return traj;
  }
  traj.accepted = r.accepted;
  traj.rejected = r.rejected;
  traj.reason =
      r.outcome == OdeOutcome::Blowup ? Termination::Blowup : Termination::Horizon;
  traj.blowup_time = r.blowup_time;

  // de-duplicate identical consecutive times (samples landing on step ends)
  std::vector<double> ts;
  std::vector<Tensor> xs;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (!ts.empty() && traj.times[i] <= ts.back() + 1e-15 * std::max(1.0, std::abs(ts.back())))
      continue;
    ts.push_back(traj.times[i]);
    xs.push_back(traj.tensors[i]);
  }
  traj.times.swap(ts);
  traj.tensors.swap(xs);
  return traj;
}

// ---------------------------------------------------------------------------
// Scalar comparison ODEs.
// ---------------------------------------------------------------------------

struct ComparisonResult {
  std::vector<double> times;
  std::vector<double> u;
  bool bound_ok = true;
  double min_margin = 0.0;  // min over the grid of u(t) - bound(t)
};

/// u' = delta (u^2/2 - C^2 / (2 delta^2 (Ar)^4)), checked against the
/// localization bound u(t) >= min{-4/(t delta), -sqrt(2) C/((Ar)^2 delta)}.
inline ComparisonResult comparison_ode(double u0, double c, double ar,
                                       double delta, double horizon,
                                       int grid = 400) {
  if (!(ar > 0) || !(delta > 0) || !(horizon > 0))
    throw ConfigError("comparison_ode requires Ar > 0, delta > 0, horizon > 0");
  const double k = c * c / (2.0 * delta * delta * ar * ar * ar * ar);
  auto rhs = [&](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(1);
    d[0] = delta * (0.5 * y[0] * y[0] - k);
    return d;
  };
  OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  opt.norm_guard = std::max(1e6, 1e6 * std::abs(u0));

  ComparisonResult out;
  const double floor_bound = -std::sqrt(2.0) * c / (ar * ar * delta);
  out.min_margin = std::numeric_limits<double>::infinity();

  Eigen::VectorXd y0(1);
  y0[0] = u0;
  std::vector<double> tgrid(grid);
  for (int i = 0; i < grid; ++i)
    tgrid[i] = horizon * double(i + 1) / double(grid);
  std::size_t next = 0;

  auto check = [&](double t, double u) {
    const double bound = std::min(-4.0 / (t * delta), floor_bound);
    const double margin = u - bound;
    out.times.push_back(t);
    out.u.push_back(u);
    out.min_margin = std::min(out.min_margin, margin);
    if (margin < -1e-8) out.bound_ok = false;
  };
  auto observer = [&](const OdeStep& step) {
    while (next < tgrid.size() && tgrid[next] <= step.t1 + 1e-15) {
      if (tgrid[next] >= step.t0) check(tgrid[next], step.eval(tgrid[next])[0]);
      ++next;
    }
    return true;
  };
  integrate_rk45(rhs, 0.0, y0, horizon, opt, observer);
  return out;
}

struct BlowupResult {
  double t_star_closed_form;
  double t_detected;
  bool bracketed_within_1pct;
};

/// f' = delta f^2 with f(0) = f0 < 0 blows up backward at t* = 1/(delta f0);
/// the backward integration must bracket t* within 1%.
inline BlowupResult ancient_blowup_check(double f0, double delta) {
  if (!(f0 < 0) || !(delta > 0))
    throw ConfigError("ancient_blowup_check requires f0 < 0, delta > 0");
  const double t_star = 1.0 / (delta * f0);
  auto rhs = [&](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(1);
    d[0] = delta * y[0] * y[0];
    return d;
  };
  OdeOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  opt.norm_guard = 1e8 * std::abs(f0);

  Eigen::VectorXd y0(1);
  y0[0] = f0;
  // integrate backward past t*; the norm guard fires first
  const double horizon = 1.25 * t_star;
  OdeResult r = integrate_rk45(rhs, 0.0, y0, horizon, opt);
  BlowupResult out;
  out.t_star_closed_form = t_star;
  out.t_detected =
      r.outcome == OdeOutcome::Blowup ? r.blowup_time : r.t_end;
  out.bracketed_within_1pct =
      r.outcome == OdeOutcome::Blowup &&
      std::abs(out.t_detected - t_star) <= 0.01 * std::abs(t_star);
  return out;
}

}  // namespace curv

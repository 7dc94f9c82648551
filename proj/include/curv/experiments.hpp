#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curv/cones.hpp"
#include "curv/fourd.hpp"
#include "curv/ode.hpp"
#include "curv/sampling.hpp"
#include "curv/tensor.hpp"

namespace curv {

// ---------------------------------------------------------------------------
// Reaction flow with a per-step observer and a scalar-doubling stop, the
// common driver of the invariance experiments.
// ---------------------------------------------------------------------------

struct FlowSample {
  double t;
  Tensor rm;
};

/// Integrate dRm/dt = Q(Rm) from rm0 until scalar curvature doubles or
/// horizon_scale characteristic times (1/max(R0,|Rm0|)) elapse.  Calls
/// `visit(t, Rm)` at t = 0, after every accepted step, and at the located
/// doubling time.  Returns the end state.
inline FlowSample flow_until_scalar_doubles(
    const Tensor& rm0, double horizon_scale, double rel_tol, double abs_tol,
    const std::function<void(double, const Tensor&)>& visit) {
  const int n = rm0.dim();
  const double r0 = scalar_curvature(rm0);
  const double scale = std::max({r0, frobenius_norm(rm0), 1e-10});
  const double horizon = horizon_scale / scale;

  auto rhs = [n](double, const Eigen::VectorXd& y) {
    Tensor rm(n, y);
    return q_reaction(rm).data();
  };

  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  opt.norm_guard = 1e6 * std::max(frobenius_norm(rm0), 1e-300);

  if (visit) visit(0.0, rm0);
  FlowSample end{0.0, rm0};

  auto observer = [&](const OdeStep& step) {
    Tensor rm1(n, step.y1);
    const double r1 = scalar_curvature(rm1);
    if (r0 > 0 && r1 >= 2.0 * r0) {
      // locate the doubling time on the dense interpolant
      double lo = step.t0, hi = step.t1;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (scalar_curvature(Tensor(n, step.eval(mid))) >= 2.0 * r0)
          hi = mid;
        else
          lo = mid;
      }
      end.t = hi;
      end.rm = Tensor(n, step.eval(hi));
      if (visit) visit(end.t, end.rm);
      return false;
    }
    end.t = step.t1;
    end.rm = rm1;
    if (visit) visit(step.t1, rm1);
    return true;
  };

  integrate_rk45(rhs, 0.0, rm0.data(), horizon, opt, observer);
  return end;
}

// ---------------------------------------------------------------------------
// Cone invariance experiment.
// ---------------------------------------------------------------------------

struct InvarianceSampleRow {
  int index;
  double margin0;       // margin at the (projected) start
  double min_margin;    // minimum margin along the trajectory
  double t_end;
  double r0, r_end;
  long steps;
  bool violation;
};

struct InvarianceReport {
  std::string cone;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double horizon_scale = 0.0;
  int violations = 0;
  double min_margin = 0.0;   // over all samples and times
  bool scalar_monotone = true;
  std::vector<InvarianceSampleRow> rows;
  double runtime_seconds = 0.0;
};

/// Draw boundary samples, flow each until scalar doubling (or the horizon),
/// record the minimum membership margin along the trajectory.  A violation
/// is margin < -1e-6 |Rm(t)|.
inline InvarianceReport invariance_experiment(const ConeSpec& cone, int n,
                                              int samples, double horizon_scale,
                                              std::uint64_t seed,
                                              double rel_tol = 1e-7,
                                              double abs_tol = 1e-9) {
  InvarianceReport rep;
  rep.cone = cone.name;
  rep.n = n;
  rep.samples = samples;
  rep.seed = seed;
  rep.horizon_scale = horizon_scale;
  rep.min_margin = std::numeric_limits<double>::infinity();

  const auto t_begin = std::chrono::steady_clock::now();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const Tensor rm0 = sample_boundary(cone, n, rng);

    InvarianceSampleRow row{};
    row.index = s;
    row.r0 = scalar_curvature(rm0);
    row.min_margin = std::numeric_limits<double>::infinity();
    long steps = 0;
    double prev_r = -std::numeric_limits<double>::infinity();

    auto visit = [&](double t, const Tensor& rm) {
      const double m = cone.margin(rm);
      const double nrm = frobenius_norm(rm);
      if (t == 0.0) row.margin0 = m;
      row.min_margin = std::min(row.min_margin, m);
      if (m < -1e-6 * nrm) row.violation = true;
      const double r = scalar_curvature(rm);
      if (r < prev_r - 1e-9 * std::max(1.0, std::abs(prev_r)))
        rep.scalar_monotone = false;
      prev_r = r;
      row.t_end = t;
      row.r_end = r;
      ++steps;
    };
    flow_until_scalar_doubles(rm0, horizon_scale, rel_tol, abs_tol, visit);
    row.steps = steps;
    rep.min_margin = std::min(rep.min_margin, row.min_margin);
    if (row.violation) ++rep.violations;
    rep.rows.push_back(row);
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return rep;
}

// ---------------------------------------------------------------------------
// Transversality constant experiment.
// ---------------------------------------------------------------------------

struct TauReport {
  std::string cone;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double tau_hat = 0.0;  // min over samples of the per-sample largest tau
  std::vector<double> per_sample;
  double runtime_seconds = 0.0;
};

/// For boundary samples with |Rm| = 1, the largest tau such that
/// Q(Rm) - tau R^2 I still points into the tangent cone, found by bisection
/// on the finite-difference inward margin; reports the minimum over samples.
inline TauReport transversality_tau(const ConeSpec& cone, int n, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw ConfigError("--samples must be >= 1");
  TauReport rep;
  rep.cone = cone.name;
  rep.n = n;
  rep.samples = samples;
  rep.seed = seed;
  rep.tau_hat = std::numeric_limits<double>::infinity();

  const auto t_begin = std::chrono::steady_clock::now();
  const Tensor eye = identity_tensor<double>(n);
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const Tensor rm = sample_boundary(cone, n, rng);
    const Tensor q = q_reaction(rm);
    const double r = scalar_curvature(rm);
    const double r2 = r * r;

    auto margin_at = [&](double tau) {
      return tangent_inward_margin(cone, rm, q - (tau * r2) * eye);
    };
    double tau;
    if (r2 < 1e-14 || margin_at(0.0) < 0) {
      tau = 0.0;
    } else {
      double lo = 0.0, hi = 1e-3;
      while (margin_at(hi) >= 0 && hi < 1e6) {
        lo = hi;
        hi *= 2.0;
      }
      if (hi >= 1e6) {
        tau = lo;
      } else {
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (margin_at(mid) >= 0)
            lo = mid;
          else
            hi = mid;
        }
        tau = lo;
      }
    }
    rep.per_sample.push_back(tau);
    rep.tau_hat = std::min(rep.tau_hat, tau);
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return rep;
}

// ---------------------------------------------------------------------------
// 4d pinching quantities along reaction trajectories.
// ---------------------------------------------------------------------------

struct PinchingRow {
  double t;
  Eigen::Vector3d a, b, c;
  double lemma41_a, lemma41_c, lemma42, lemma43;
  // finite-difference time derivatives vs the reaction bounds
  double da1_fd, rhs_a1;  // rhs = a1^2 + b1^2 + 2 a2 a3
  double dc1_fd, rhs_c1;
  double db3_fd, rhs_b3;  // rhs = b3 (a3 + c3) + 2 b1 b2
};

/// Sample the block spectra, the pinching ratios and the derivative
/// comparisons along dRm/dt = Q(Rm).  For the spatially homogeneous ODE the
/// Laplacian term is absent, so the reaction bounds are checked directly.
inline std::vector<PinchingRow> pinching_trajectories(const Tensor& rm0,
                                                      double horizon,
                                                      int samples = 40,
                                                      double rel_tol = 1e-10,
                                                      double abs_tol = 1e-12) {
  if (rm0.dim() != 4) throw DimensionNot4("pinching trajectories need n = 4");
  std::vector<double> ts(samples);
  for (int i = 0; i < samples; ++i)
    ts[i] = horizon * double(i + 1) / double(samples);
  // interior FD stencil spacing
  const double h = 1e-3 * horizon / samples;

  std::vector<double> want;
  for (double t : ts)
    if (t - h > 0 && t + h <= horizon) {
      want.push_back(t - h);
      want.push_back(t);
      want.push_back(t + h);
    }
  ODETrajectory traj =
      integrate_hamilton_ode(rm0, horizon, rel_tol, abs_tol, want);

  auto state_at = [&](double t) -> std::optional<Tensor> {
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      if (std::abs(traj.times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
        return traj.tensors[i];
    return std::nullopt;
  };

  std::vector<PinchingRow> rows;
  for (double t : ts) {
    auto mid = state_at(t), lo = state_at(t - h), hi = state_at(t + h);
    if (!mid || !lo || !hi) continue;
    const BlockDecomp d = block_decomposition(*mid);
    const BlockDecomp dl = block_decomposition(*lo);
    const BlockDecomp dh = block_decomposition(*hi);

    PinchingRow row{};
    row.t = t;
    row.a = d.a;
    row.b = d.b;
    row.c = d.c;
    const PinchingReport pr = pinching_report(*mid);
    row.lemma41_a = pr.lemma41_a;
    row.lemma41_c = pr.lemma41_c;
    row.lemma42 = pr.lemma42;
    row.lemma43 = pr.lemma43;
    row.da1_fd = (dh.a1() - dl.a1()) / (2 * h);
    row.dc1_fd = (dh.c1() - dl.c1()) / (2 * h);
    row.db3_fd = (dh.b3() - dl.b3()) / (2 * h);
    row.rhs_a1 = d.a1() * d.a1() + d.b1() * d.b1() + 2 * d.a2() * d.a3();
    row.rhs_c1 = d.c1() * d.c1() + d.b1() * d.b1() + 2 * d.c2() * d.c3();
    row.rhs_b3 = d.b3() * (d.a3() + d.c3()) + 2 * d.b1() * d.b2();
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Pinching-set persistence (restricted pinching and the lemma-4.2 set).
// ---------------------------------------------------------------------------

struct PinchingSetRow {
  int index;
  double k;            // K = 6 Lambda^2 + 1 fixed from t = 0
  double min_margin;   // worst margin over the three restricted inequalities
  double min_margin42; // worst margin of the 1/4-ratio set (set experiments only)
  bool violation;
};

struct PinchingSetReport {
  int samples = 0;
  std::uint64_t seed = 0;
  int violations_restricted = 0;
  int violations_quarter = 0;
  std::vector<PinchingSetRow> rows;
};

/// Margins, in curvature units, of the restricted pinching set
/// {a3 <= K a1, c3 <= K c1, b3^2 <= a1 c1}.
inline double restricted_margin(const BlockDecomp& d, double k) {
  const double m1 = k * d.a1() - d.a3();
  const double m2 = k * d.c1() - d.c3();
  const double prod = std::max(d.a1(), 0.0) * std::max(d.c1(), 0.0);
  const double m3 = std::sqrt(prod) - d.b3();
  return std::min({m1, m2, m3});
}

/// Margin of the lemma-4.2 set {b3^2 <= (1/4)(a1+a2)(c1+c2)}, again in
/// curvature units.
inline double quarter_margin(const BlockDecomp& d) {
  const double prod =
      std::max(d.a1() + d.a2(), 0.0) * std::max(d.c1() + d.c2(), 0.0);
  return 0.5 * std::sqrt(prod) - d.b3();
}

/// Draw n=4 samples satisfying the restricted pinching (with K = 6L^2+1
/// evaluated at t=0) and the 1/4-ratio condition, flow until scalar
/// doubling, and check both sets persist with margin >= -1e-6 |Rm(t)|.
inline PinchingSetReport pinching_set_experiment(int samples, std::uint64_t seed,
                                                 double horizon_scale = 10.0,
                                                 double rel_tol = 1e-8,
                                                 double abs_tol = 1e-10) {
  PinchingSetReport rep;
  rep.samples = samples;
  rep.seed = seed;

  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    // rejection-sample a strictly uniformly-PIC start with the full
    // restricted pinching at t = 0
    Tensor rm0(4);
    double k = 0.0;
    bool found = false;
    for (int t = 0; t < 500 && !found; ++t) {
      Tensor cand = model_hull_sample(4, rng, 0.04);
      cand *= 1.0 / frobenius_norm(cand);
      const BlockDecomp d = block_decomposition(cand);
      const double denom = std::min(d.a1() + d.a2(), d.c1() + d.c2());
      if (denom <= 1e-6) continue;
      const double lam = std::max({d.a3(), d.b3(), d.c3()}) / denom;
      const double kk = 6.0 * lam * lam + 1.0;
      if (restricted_margin(d, kk) <= 1e-8) continue;
      if (quarter_margin(d) <= 1e-8) continue;
      rm0 = cand;
      k = kk;
      found = true;
    }
    if (!found)
      throw ConfigError("pinching-set sampler failed to find a valid start");

    PinchingSetRow row{};
    row.index = s;
    row.k = k;
    row.min_margin = std::numeric_limits<double>::infinity();
    row.min_margin42 = std::numeric_limits<double>::infinity();
    bool viol_r = false, viol_q = false;

    auto visit = [&](double, const Tensor& rm) {
      const BlockDecomp d = block_decomposition(rm);
      const double nrm = frobenius_norm(rm);
      const double mr = restricted_margin(d, k);
      const double mq = quarter_margin(d);
      row.min_margin = std::min(row.min_margin, mr);
      row.min_margin42 = std::min(row.min_margin42, mq);
      if (mr < -1e-6 * nrm) viol_r = true;
      if (mq < -1e-6 * nrm) viol_q = true;
    };
    flow_until_scalar_doubles(rm0, horizon_scale, rel_tol, abs_tol, visit);

    row.violation = viol_r || viol_q;
    if (viol_r) ++rep.violations_restricted;
    if (viol_q) ++rep.violations_quarter;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace curv

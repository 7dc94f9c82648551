#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "curv/errors.hpp"
#include "curv/models.hpp"
#include "curv/ode.hpp"
#include "curv/tensor.hpp"

namespace curv {

/// Rotationally symmetric metric g = ds^2 + phi(s)^2 g_{S^{n-1}} sampled on
/// an arclength grid, optionally with a soliton potential f.
struct WarpedMetric {
  int n = 0;                    // total dimension (sphere factor is n-1)
  Eigen::VectorXd s;            // strictly increasing grid
  Eigen::VectorXd phi;          // warp, positive at interior nodes
  std::optional<Eigen::VectorXd> f;  // soliton potential samples
  bool tip = false;             // phi(s0) = 0, phi'(s0) = 1 closure

  int nodes() const { return static_cast<int>(s.size()); }
};

namespace detail {

/// 5-point centered first/second derivative on a uniform grid.
inline double d1_5pt(const Eigen::VectorXd& y, int i, double h) {
  return (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / (12 * h);
}
inline double d2_5pt(const Eigen::VectorXd& y, int i, double h) {
  return (-y[i - 2] + 16 * y[i - 1] - 30 * y[i] + 16 * y[i + 1] - y[i + 2]) /
         (12 * h * h);
}

inline double grid_step(const WarpedMetric& w) {
  const double h = w.s[1] - w.s[0];
  for (int i = 1; i + 1 < w.nodes(); ++i)
    if (std::abs((w.s[i + 1] - w.s[i]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ConfigError("warped-metric grid must be uniform");
  return h;
}

}  // namespace detail

struct WarpedCurvature {
  double k_rad;  // -phi''/phi     (planes containing d/ds)
  double k_sph;  // (1-phi'^2)/phi^2
  Tensor rm;     // pointwise algebraic curvature tensor
};

/// Sectional curvatures at an interior node by centered differences, plus
/// the pointwise tensor K_sph * (1/2) P^P + K_rad * (u u^T) ^ P with u the
/// axial direction (last coordinate).
inline WarpedCurvature warped_curvature(const WarpedMetric& w, int i) {
  const int m = w.nodes();
  if (i < 2 || i > m - 3)
    throw BoundaryNode("node " + std::to_string(i) +
                       " lacks the interior 5-point stencil");
  const double h = detail::grid_step(w);
  const double phi = w.phi[i];
  if (!(phi > 0)) throw BoundaryNode("warp not positive at node");
  const double dphi = detail::d1_5pt(w.phi, i, h);
  const double ddphi = detail::d2_5pt(w.phi, i, h);

  WarpedCurvature out;
  out.k_rad = -ddphi / phi;
  out.k_sph = (1.0 - dphi * dphi) / (phi * phi);

  const int n = w.n;
  SymBilinear<double> p = SymBilinear<double>::Identity(n, n);
  p(n - 1, n - 1) = 0.0;
  SymBilinear<double> uu = SymBilinear<double>::Zero(n, n);
  uu(n - 1, n - 1) = 1.0;
  out.rm = out.k_sph * (0.5 * kulkarni_nomizu<double>(p, p)) +
           out.k_rad * kulkarni_nomizu<double>(uu, p);
  return out;
}

// ---------------------------------------------------------------------------
// Bryant steady soliton.  Ric + Hess f = 0 on ds^2 + phi^2 g_{S^{n-1}}
// reduces to
//   phi'' = f' phi' + (n-2)(1 - phi'^2)/phi
//   f''   = (n-1) phi''/phi
// with the regular-tip closure phi(0)=0, phi'(0)=1, f'(0)=0.  The cubic tip
// coefficient only fixes the homothety scale (any negative value yields the
// same soliton up to scaling), so the solver integrates once from a
// series-expanded start at a chosen tip curvature instead of shooting.
// ---------------------------------------------------------------------------

inline WarpedMetric bryant_soliton(int n, double s_max, int nodes,
                                   double tip_curvature = 1.0) {
  if (n < 4) throw DimensionOutOfRange("bryant_soliton needs n >= 4");
  if (!(s_max > 0) || nodes < 16)
    throw ConfigError("--smax/--nodes: need s_max > 0 and nodes >= 16");
  if (!(tip_curvature > 0)) throw ConfigError("tip curvature must be positive");

  const double a3 = -tip_curvature / 6.0;  // phi ~ s + a3 s^3 + a5 s^5
  const double a5 = 3.0 * (13.0 * n - 10.0) * a3 * a3 / (10.0 * (n + 2.0));
  const double b1 = 6.0 * (n - 1.0) * a3;  // f' ~ b1 s + b3 s^3
  const double b3 = (n - 1.0) * (20.0 * a5 - 6.0 * a3 * a3) / 3.0;

  const double s0 = std::min(1e-3 / std::sqrt(tip_curvature), 0.02 * s_max);
  Eigen::VectorXd y0(4);  // (phi, phi', h = f', f)
  y0[0] = s0 + a3 * s0 * s0 * s0 + a5 * std::pow(s0, 5);
  y0[1] = 1.0 + 3 * a3 * s0 * s0 + 5 * a5 * std::pow(s0, 4);
  y0[2] = b1 * s0 + b3 * s0 * s0 * s0;
  y0[3] = 0.5 * b1 * s0 * s0 + 0.25 * b3 * std::pow(s0, 4);

  auto rhs = [n](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(4);
    const double phi = y[0], psi = y[1], h = y[2];
    const double ddphi = h * psi + (n - 2.0) * (1.0 - psi * psi) / phi;
    d[0] = psi;
    d[1] = ddphi;
    d[2] = (n - 1.0) * ddphi / phi;
    d[3] = h;
    return d;
  };

  // uniform output grid, filled from dense output
  Eigen::VectorXd sg = Eigen::VectorXd::LinSpaced(nodes, 0.0, s_max);
  Eigen::VectorXd phig = Eigen::VectorXd::Zero(nodes);
  Eigen::VectorXd fg = Eigen::VectorXd::Zero(nodes);
  phig[0] = 0.0;
  fg[0] = 0.0;

  OdeOptions opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-13;
  opt.max_step = s_max / 64.0;

  int next = 1;
  bool diverged = false;
  auto observer = [&](const OdeStep& step) {
    const double phi = step.y1[0], psi = step.y1[1];
    if (!(phi > 0) || psi < -1e-6 || psi > 1.5 || !step.y1.allFinite()) {
      diverged = true;
      return false;
    }
    while (next < nodes && sg[next] <= step.t1 + 1e-12) {
      if (sg[next] >= step.t0 - 1e-12) {
        const Eigen::VectorXd y = step.eval(sg[next]);
        phig[next] = y[0];
        fg[next] = y[3];
        ++next;
      } else {
        ++next;  // unreachable for monotone grids
      }
    }
    return true;
  };

  // seed grid nodes that fall inside [0, s0] from the series
  while (next < nodes && sg[next] <= s0) {
    const double ss = sg[next];
    phig[next] = ss + a3 * ss * ss * ss + a5 * std::pow(ss, 5);
    fg[next] = 0.5 * b1 * ss * ss + 0.25 * b3 * std::pow(ss, 4);
    ++next;
  }

  integrate_rk45(rhs, s0, y0, s_max - s0, opt, observer);
  if (diverged || next < nodes)
    throw ShootingDivergence("soliton integration left the valid branch");

  WarpedMetric w;
  w.n = n;
  w.s = sg;
  w.phi = phig;
  w.f = fg;
  w.tip = true;
  return w;
}

/// Residuals of the two soliton equations at an interior node, evaluated
/// non-circularly from the stored samples by centered differences.
struct SolitonResidual {
  double warp_eq;      // phi'' - f' phi' - (n-2)(1-phi'^2)/phi
  double potential_eq; // f'' - (n-1) phi''/phi
};

inline SolitonResidual soliton_residual(const WarpedMetric& w, int i) {
  if (!w.f) throw ConfigError("warped metric carries no potential samples");
  const int m = w.nodes();
  if (i < 2 || i > m - 3) throw BoundaryNode("residual needs interior node");
  const double h = detail::grid_step(w);
  const double phi = w.phi[i];
  const double dphi = detail::d1_5pt(w.phi, i, h);
  const double ddphi = detail::d2_5pt(w.phi, i, h);
  const double df = detail::d1_5pt(*w.f, i, h);
  const double ddf = detail::d2_5pt(*w.f, i, h);
  SolitonResidual r;
  r.warp_eq = ddphi - df * dphi - (w.n - 2.0) * (1.0 - dphi * dphi) / phi;
  r.potential_eq = ddf - (w.n - 1.0) * ddphi / phi;
  return r;
}

// ---------------------------------------------------------------------------
// Volume ratios and the noncollapsing diagnostic.
// ---------------------------------------------------------------------------

namespace detail {

/// Surface area of the unit (n-1)-sphere.
inline double sphere_area(int nm1) {
  const double half_n = 0.5 * (nm1 + 1);
  return 2.0 * std::pow(M_PI, half_n) / std::tgamma(half_n);
}

/// Composite Simpson with a 3/8 tail on odd interval counts; exact for
/// cubics, which covers the flat n=4 volume element.
inline double simpson(const Eigen::VectorXd& y, double h, int lo, int hi) {
  const int m = hi - lo;  // intervals
  if (m <= 0) return 0.0;
  if (m == 1) return 0.5 * h * (y[lo] + y[hi]);
  if (m == 2) return h / 3.0 * (y[lo] + 4 * y[lo + 1] + y[hi]);
  if (m == 3)
    return 3.0 * h / 8.0 * (y[lo] + 3 * y[lo + 1] + 3 * y[lo + 2] + y[hi]);
  int even_end = hi;
  double tail = 0.0;
  if (m % 2 == 1) {  // peel a 3/8 segment off the end
    even_end = hi - 3;
    tail = 3.0 * h / 8.0 *
           (y[hi - 3] + 3 * y[hi - 2] + 3 * y[hi - 1] + y[hi]);
  }
  double acc = y[lo] + y[even_end];
  for (int i = lo + 1; i < even_end; i += 2) acc += 4 * y[i];
  for (int i = lo + 2; i < even_end; i += 2) acc += 2 * y[i];
  return h / 3.0 * acc + tail;
}

/// Integrate phi^{n-1} over [a, b] (grid coordinates), with cubic
/// interpolation of phi on partial end intervals.
inline double warp_volume_integral(const WarpedMetric& w, double a, double b) {
  const double h = grid_step(w);
  const int m = w.nodes();
  const int p = w.n - 1;
  Eigen::VectorXd integrand(m);
  for (int i = 0; i < m; ++i) integrand[i] = std::pow(w.phi[i], p);

  auto phi_at = [&](double s) {
    // cubic Lagrange through the four surrounding nodes
    int i = static_cast<int>(std::floor((s - w.s[0]) / h));
    i = std::clamp(i, 1, m - 3);
    const double t = (s - w.s[i]) / h;
    const double ym1 = w.phi[i - 1], y0 = w.phi[i], y1 = w.phi[i + 1],
                 y2 = w.phi[i + 2];
    return -t * (t - 1) * (t - 2) / 6.0 * ym1 +
           (t * t - 1) * (t - 2) / 2.0 * y0 - t * (t + 1) * (t - 2) / 2.0 * y1 +
           t * (t * t - 1) / 6.0 * y2;
  };
  auto seg = [&](double x0, double x1) {  // Simpson on a partial interval
    const double mid = 0.5 * (x0 + x1);
    return (x1 - x0) / 6.0 *
           (std::pow(phi_at(x0), p) + 4 * std::pow(phi_at(mid), p) +
            std::pow(phi_at(x1), p));
  };

  const int ia = static_cast<int>(std::ceil((a - w.s[0]) / h - 1e-12));
  const int ib = static_cast<int>(std::floor((b - w.s[0]) / h + 1e-12));
  if (ia > ib) return seg(a, b);
  double vol = simpson(integrand, h, ia, ib);
  if (a < w.s[ia] - 1e-14 * std::max(1.0, std::abs(a))) vol += seg(a, w.s[ia]);
  if (b > w.s[ib] + 1e-14 * std::max(1.0, std::abs(b))) vol += seg(w.s[ib], b);
  return vol;
}

}  // namespace detail

/// Vol B(center, r) / r^n with the ball taken as the arclength tube
/// |s - s_center| <= r (clamped at a tip), volume by quadrature of the
/// warped element omega_{n-1} phi^{n-1} ds.
inline double volume_ratio(const WarpedMetric& w, int center, double r) {
  if (center < 0 || center >= w.nodes()) throw BoundaryNode("bad center index");
  const double sc = w.s[center];
  double a = sc - r;
  const double b = sc + r;
  if (b > w.s[w.nodes() - 1] + 1e-12)
    throw BallExceedsGrid("ball of radius " + std::to_string(r) +
                          " leaves the grid");
  if (a < w.s[0] - 1e-12) {
    if (!w.tip)
      throw BallExceedsGrid("ball of radius " + std::to_string(r) +
                            " leaves the grid");
    a = w.s[0];  // closed at the tip
  }
  const double vol =
      detail::sphere_area(w.n - 1) * detail::warp_volume_integral(w, a, b);
  return vol / std::pow(r, w.n);
}

struct KappaRow {
  double r;
  int centers_tested = 0;
  int centers_admissible = 0;  // premise |Rm| <= r^-2 held on the ball
  double min_ratio = std::numeric_limits<double>::infinity();
};

struct KappaReport {
  std::vector<KappaRow> rows;
  double infimum = std::numeric_limits<double>::infinity();
  int admissible = 0;
};

/// kappa-noncollapsing diagnostic: for every r in r_list and every candidate
/// center (grid stride), check the premise max_ball |Rm| <= r^-2 and record
/// the volume ratio where it holds; reports the infimum over all admissible
/// (center, r) pairs.
inline KappaReport kappa_check(const WarpedMetric& w,
                               const std::vector<double>& r_list,
                               int center_stride = 0) {
  const int m = w.nodes();
  if (center_stride <= 0) center_stride = std::max(1, m / 128);
  const double h = detail::grid_step(w);

  // pointwise |Rm| at interior nodes (nearest-interior at the edges)
  Eigen::VectorXd rm_norm(m);
  for (int i = 0; i < m; ++i) {
    const int j = std::clamp(i, 2, m - 3);
    const WarpedCurvature wc = warped_curvature(w, j);
    rm_norm[i] = frobenius_norm(wc.rm);
  }

  KappaReport rep;
  for (double r : r_list) {
    KappaRow row;
    row.r = r;
    for (int c = 0; c < m; c += center_stride) {
      const double sc = w.s[c];
      if (sc + r > w.s[m - 1] + 1e-12) continue;
      if (sc - r < w.s[0] - 1e-12 && !w.tip) continue;
      ++row.centers_tested;
      const int lo = std::max(0, static_cast<int>(std::floor((sc - r - w.s[0]) / h)));
      const int hi = std::min(m - 1, static_cast<int>(std::ceil((sc + r - w.s[0]) / h)));
      double worst = 0.0;
      for (int i = lo; i <= hi; ++i) worst = std::max(worst, rm_norm[i]);
      if (worst > 1.0 / (r * r)) continue;
      ++row.centers_admissible;
      row.min_ratio = std::min(row.min_ratio, volume_ratio(w, c, r));
    }
    rep.admissible += row.centers_admissible;
    if (row.centers_admissible > 0)
      rep.infimum = std::min(rep.infimum, row.min_ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace curv

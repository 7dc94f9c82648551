#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "curv/rng.hpp"
#include "curv/tensor.hpp"

namespace curv {

/// Orthonormal 4-frame {e1,..,e4} in R^n, stored as the columns of an
/// n x 4 matrix (the first four columns of an orthogonal matrix).
struct Frame4 {
  Eigen::Matrix<double, Eigen::Dynamic, 4> cols;

  int dim() const { return static_cast<int>(cols.rows()); }
  Eigen::VectorXd e(int a) const { return cols.col(a); }

  double gram_residual() const {
    return (cols.transpose() * cols - Eigen::Matrix4d::Identity())
        .cwiseAbs()
        .maxCoeff();
  }
  bool orthonormal(double tol = 1e-10) const { return gram_residual() <= tol; }

  /// Coordinate-axes frame (e1..e4 = first four basis vectors).
  static Frame4 axes(int n) {
    Frame4 f;
    f.cols = Eigen::Matrix<double, Eigen::Dynamic, 4>::Zero(n, 4);
    for (int a = 0; a < 4; ++a) f.cols(a, a) = 1.0;
    return f;
  }

  /// Haar-ish random frame: Gaussian n x 4, thin QR, deterministic sign fix.
  static Frame4 random(int n, Rng& rng) {
    Eigen::MatrixXd g(n, 4);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < 4; ++a) g(i, a) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 4);
    Eigen::Matrix4d r = qr.matrixQR().topRows(4).triangularView<Eigen::Upper>();
    for (int a = 0; a < 4; ++a)
      if (r(a, a) < 0) q.col(a) = -q.col(a);
    Frame4 f;
    f.cols = q;
    return f;
  }
};

enum class IsotropicMode { PIC, PIC1, PIC2 };

inline const char* to_string(IsotropicMode m) {
  switch (m) {
    case IsotropicMode::PIC: return "pic";
    case IsotropicMode::PIC1: return "pic1";
    default: return "pic2";
  }
}

namespace detail {

/// The five curvature components entering the isotropic expression.
struct IsoComponents {
  double r1313, r1414, r2323, r2424, r1234;
};

/// Workspace for repeated frame evaluations of one tensor: caches the
/// pair-basis matrix M_(ij),(kl) = R_ijkl so each contraction is one
/// small mat-vec instead of an O(n^4) loop.
class IsoWorkspace {
 public:
  explicit IsoWorkspace(const Tensor& rm)
      : n_(rm.dim()), pb_(rm.dim()), m_(pb_.size(), pb_.size()) {
    for (int a = 0; a < pb_.size(); ++a)
      for (int b = 0; b < pb_.size(); ++b)
        m_(a, b) = rm(pb_.pairs[a].first, pb_.pairs[a].second,
                      pb_.pairs[b].first, pb_.pairs[b].second);
  }

  int dim() const { return n_; }
  const PairBasis& pairs() const { return pb_; }

  IsoComponents components(const Frame4& f) const {
    const Eigen::VectorXd v13 = wedge<double>(f.e(0), f.e(2), pb_);
    const Eigen::VectorXd v14 = wedge<double>(f.e(0), f.e(3), pb_);
    const Eigen::VectorXd v23 = wedge<double>(f.e(1), f.e(2), pb_);
    const Eigen::VectorXd v24 = wedge<double>(f.e(1), f.e(3), pb_);
    const Eigen::VectorXd v12 = wedge<double>(f.e(0), f.e(1), pb_);
    const Eigen::VectorXd v34 = wedge<double>(f.e(2), f.e(3), pb_);
    IsoComponents c;
    c.r1313 = v13.dot(m_ * v13);
    c.r1414 = v14.dot(m_ * v14);
    c.r2323 = v23.dot(m_ * v23);
    c.r2424 = v24.dot(m_ * v24);
    c.r1234 = v12.dot(m_ * v34);
    return c;
  }

  static double value(const IsoComponents& c, double la, double mu) {
    return c.r1313 + la * la * c.r1414 + mu * mu * c.r2323 +
           la * la * mu * mu * c.r2424 - 2.0 * la * mu * c.r1234;
  }

  /// Antisymmetric matrix U with U_ij = u_(ij) for i<j; helper for gradients:
  /// d/dx [wedge(x,y)^T u] = U y, d/dy = -U x.
  Eigen::MatrixXd unpack(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n_, n_);
    for (int a = 0; a < pb_.size(); ++a) {
      const auto [i, j] = pb_.pairs[a];
      U(i, j) = u[a];
      U(j, i) = -u[a];
    }
    return U;
  }

  /// Euclidean gradient of the isotropic value w.r.t. the frame matrix.
  Eigen::Matrix<double, Eigen::Dynamic, 4> frame_gradient(const Frame4& f,
                                                          double la,
                                                          double mu) const {
    const Eigen::VectorXd e1 = f.e(0), e2 = f.e(1), e3 = f.e(2), e4 = f.e(3);
    const Eigen::VectorXd v13 = wedge<double>(e1, e3, pb_);
    const Eigen::VectorXd v14 = wedge<double>(e1, e4, pb_);
    const Eigen::VectorXd v23 = wedge<double>(e2, e3, pb_);
    const Eigen::VectorXd v24 = wedge<double>(e2, e4, pb_);
    const Eigen::VectorXd v12 = wedge<double>(e1, e2, pb_);
    const Eigen::VectorXd v34 = wedge<double>(e3, e4, pb_);

    const Eigen::MatrixXd U13 = unpack(m_ * v13);
    const Eigen::MatrixXd U14 = unpack(m_ * v14);
    const Eigen::MatrixXd U23 = unpack(m_ * v23);
    const Eigen::MatrixXd U24 = unpack(m_ * v24);
    const Eigen::MatrixXd U12 = unpack(m_ * v12);
    const Eigen::MatrixXd U34 = unpack(m_ * v34);

    const double l2 = la * la, m2 = mu * mu, lm = la * mu;
    Eigen::Matrix<double, Eigen::Dynamic, 4> g(n_, 4);
    g.col(0) = 2.0 * (U13 * e3) + 2.0 * l2 * (U14 * e4) - 2.0 * lm * (U34 * e2);
    g.col(1) = 2.0 * m2 * (U23 * e3) + 2.0 * l2 * m2 * (U24 * e4) +
               2.0 * lm * (U34 * e1);
    g.col(2) = -2.0 * (U13 * e1) - 2.0 * m2 * (U23 * e2) - 2.0 * lm * (U12 * e4);
    g.col(3) = -2.0 * l2 * (U14 * e1) - 2.0 * l2 * m2 * (U24 * e2) +
               2.0 * lm * (U12 * e3);
    return g;
  }

 private:
  int n_;
  PairBasis pb_;
  Eigen::MatrixXd m_;
};

/// Minimize a*x^2 + b*x over [-1,1] (closed form).
inline double min_quadratic_box(double a, double b, double* val) {
  auto eval = [&](double x) { return a * x * x + b * x; };
  double best_x = 0.0, best = 0.0;
  for (double x : {-1.0, 1.0}) {
    if (eval(x) < best) {
      best = eval(x);
      best_x = x;
    }
  }
  if (a > 0) {
    const double v = std::clamp(-b / (2 * a), -1.0, 1.0);
    if (eval(v) < best) {
      best = eval(v);
      best_x = v;
    }
  }
  *val = best;
  return best_x;
}

/// Exact inner minimization over (lambda, mu) for a fixed frame:
/// alternate the closed-form one-variable quadratic minimization from the
/// two sign seeds of the bilinear branch.
inline void minimize_lambda_mu(const IsoComponents& c, IsotropicMode mode,
                               double* la_out, double* mu_out) {
  if (mode == IsotropicMode::PIC) {
    *la_out = 1.0;
    *mu_out = 1.0;
    return;
  }
  if (mode == IsotropicMode::PIC1) {
    // minimize (r1414 + r2424) la^2 - 2 r1234 la at mu = 1
    double v;
    *la_out = min_quadratic_box(c.r1414 + c.r2424, -2.0 * c.r1234, &v);
    *mu_out = 1.0;
    return;
  }
  double best = std::numeric_limits<double>::infinity();
  double bl = 0.0, bm = 0.0;
  for (double mu0 : {1.0, -1.0}) {
    double la = 1.0, mu = mu0;
    for (int it = 0; it < 60; ++it) {
      double v;
      const double la_new =
          min_quadratic_box(c.r1414 + mu * mu * c.r2424, -2.0 * mu * c.r1234, &v);
      const double mu_new = min_quadratic_box(
          c.r2323 + la_new * la_new * c.r2424, -2.0 * la_new * c.r1234, &v);
      const double dl = std::abs(la_new - la) + std::abs(mu_new - mu);
      la = la_new;
      mu = mu_new;
      if (dl < 1e-15) break;
    }
    const double val = IsoWorkspace::value(c, la, mu);
    if (val < best) {
      best = val;
      bl = la;
      bm = mu;
    }
  }
  *la_out = bl;
  *mu_out = bm;
}

}  // namespace detail

/// isotropic_value = R_1313 + la^2 R_1414 + mu^2 R_2323 + la^2 mu^2 R_2424
///                   - 2 la mu R_1234, components contracted against f.
inline double isotropic_value(const Tensor& rm, const Frame4& f, double la = 1.0,
                              double mu = 1.0) {
  if (f.dim() != rm.dim())
    throw DimensionMismatch("frame dimension does not match tensor");
  if (!f.orthonormal())
    throw FrameNotOrthonormal("frame Gram residual " +
                              std::to_string(f.gram_residual()));
  detail::IsoWorkspace ws(rm);
  return detail::IsoWorkspace::value(ws.components(f), la, mu);
}

/// Result of the multistart frame optimization.
struct IsotropicReport {
  IsotropicMode mode = IsotropicMode::PIC;
  double minimum = 0.0;
  Frame4 argmin;
  double lambda = 1.0, mu = 1.0;
  int budget = 0;
  bool converged = false;
};

namespace detail {

struct StartResult {
  double value;
  Frame4 frame;
  double la, mu;
  bool converged;
};

/// Projected gradient descent on the Stiefel manifold St(n,4) with QR
/// retraction and Armijo backtracking; (lambda,mu) re-minimized in closed
/// form before every gradient step.
inline StartResult descend(const IsoWorkspace& ws, IsotropicMode mode,
                           Frame4 f, int max_iter = 160) {
  double la = 1.0, mu = 1.0;
  IsoComponents c = ws.components(f);
  minimize_lambda_mu(c, mode, &la, &mu);
  double val = IsoWorkspace::value(c, la, mu);

  double step = 0.25;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::Matrix<double, Eigen::Dynamic, 4> g =
        ws.frame_gradient(f, la, mu);
    // tangent projection: G - F sym(F^T G)
    const Eigen::Matrix4d ftg = f.cols.transpose() * g;
    const Eigen::Matrix<double, Eigen::Dynamic, 4> gt =
        g - f.cols * (0.5 * (ftg + ftg.transpose()));
    const double gn = gt.norm();
    if (gn <= 1e-9) {
      converged = true;
      break;
    }

    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::MatrixXd cand = f.cols - step * gt;
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(cand);
      Eigen::MatrixXd q =
          qr.householderQ() * Eigen::MatrixXd::Identity(f.dim(), 4);
      Eigen::Matrix4d r =
          qr.matrixQR().topRows(4).triangularView<Eigen::Upper>();
      for (int a = 0; a < 4; ++a)
        if (r(a, a) < 0) q.col(a) = -q.col(a);
      Frame4 fn;
      fn.cols = q;
      IsoComponents cn = ws.components(fn);
      double ln, mn;
      minimize_lambda_mu(cn, mode, &ln, &mn);
      const double vn = IsoWorkspace::value(cn, ln, mn);
      if (vn <= val - 1e-4 * step * gn * gn) {
        f = fn;
        c = cn;
        la = ln;
        mu = mn;
        val = vn;
        step = std::min(step * 1.6, 4.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // line search stalled at resolution limit
      break;
    }
  }
  return {val, f, la, mu, converged};
}

}  // namespace detail

/// Multistart minimization of the isotropic value over orthonormal 4-frames
/// (PIC), additionally over lambda (PIC1) or lambda and mu (PIC2).
/// Deterministic given (rm, mode, budget, seed); the reported minimum is a
/// certified upper bound on the true minimum (it is the exact value at the
/// returned argmin).  Internally scale-normalized, so the result is exactly
/// 1-homogeneous in rm.
inline IsotropicReport min_isotropic(const Tensor& rm, IsotropicMode mode,
                                     int budget = 16,
                                     std::uint64_t seed = 0x15071207u) {
  if (rm.dim() < 4)
    throw DimensionOutOfRange("isotropic conditions need n >= 4");
  if (budget < 1) budget = 1;

  const double nrm = frobenius_norm(rm);
  IsotropicReport rep;
  rep.mode = mode;
  rep.budget = budget;
  if (nrm == 0.0) {
    rep.minimum = 0.0;
    rep.argmin = Frame4::axes(rm.dim());
    rep.lambda = (mode == IsotropicMode::PIC) ? 1.0 : 0.0;
    rep.mu = (mode == IsotropicMode::PIC2) ? 0.0 : 1.0;
    rep.converged = true;
    return rep;
  }

  Tensor unit = (1.0 / nrm) * rm;
  detail::IsoWorkspace ws(unit);

  bool have = false;
  detail::StartResult best{};
  for (int s = 0; s < budget; ++s) {
    Frame4 f0;
    if (s == 0) {
      f0 = Frame4::axes(rm.dim());
    } else {
      Rng r = Rng::stream(seed, static_cast<std::uint64_t>(s));
      f0 = Frame4::random(rm.dim(), r);
    }
    detail::StartResult sr = detail::descend(ws, mode, f0);
    if (!have || sr.value < best.value) {  // strict: ties keep lowest start
      best = sr;
      have = true;
    }
  }

  rep.minimum = best.value * nrm;
  rep.argmin = best.frame;
  rep.lambda = best.la;
  rep.mu = best.mu;
  rep.converged = best.converged;
  return rep;
}

/// Warm-started variant for trajectory sweeps: seeds the multistart with a
/// previous argmin frame.  Same contract as min_isotropic.
inline IsotropicReport min_isotropic_warm(const Tensor& rm, IsotropicMode mode,
                                          const Frame4& warm, int budget = 4,
                                          std::uint64_t seed = 0x15071207u) {
  const double nrm = frobenius_norm(rm);
  if (nrm == 0.0 || warm.dim() != rm.dim())
    return min_isotropic(rm, mode, budget, seed);
  Tensor unit = (1.0 / nrm) * rm;
  detail::IsoWorkspace ws(unit);
  detail::StartResult best = detail::descend(ws, mode, warm);
  for (int s = 0; s < budget; ++s) {
    Frame4 f0;
    if (s == 0) {
      f0 = Frame4::axes(rm.dim());
    } else {
      Rng r = Rng::stream(seed, static_cast<std::uint64_t>(s));
      f0 = Frame4::random(rm.dim(), r);
    }
    detail::StartResult sr = detail::descend(ws, mode, f0);
    if (sr.value < best.value) best = sr;
  }
  IsotropicReport rep;
  rep.mode = mode;
  rep.budget = budget + 1;
  rep.minimum = best.value * nrm;
  rep.argmin = best.frame;
  rep.lambda = best.la;
  rep.mu = best.mu;
  rep.converged = best.converged;
  return rep;
}

/// Uniform-PIC constant theta = (isotropic minimum) / (4 R), n >= 5.
inline double uniform_pic_theta(const Tensor& rm, int budget = 16,
                                std::uint64_t seed = 0x15071207u) {
  if (rm.dim() < 5)
    throw DimensionOutOfRange("uniform_pic_theta is the n >= 5 formulation");
  const double r = scalar_curvature(rm);
  if (!(r > 0)) throw NonpositiveScalar("scalar curvature must be positive");
  return min_isotropic(rm, IsotropicMode::PIC, budget, seed).minimum / (4.0 * r);
}

/// (lambda_1 + lambda_2) - delta R, with lambda_1 <= lambda_2 the two
/// smallest Ricci eigenvalues.
inline double two_positive_ricci_margin(const Tensor& rm, double delta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ricci(rm));
  const auto& ev = es.eigenvalues();
  return ev[0] + ev[1] - delta * scalar_curvature(rm);
}

/// Sanity inequalities from the 2-positive-Ricci argument, reported with
/// measured margins (n >= 5, caller asserts weak PIC).
struct WeakPicInequalities {
  bool ricci_lower_ok;    // R_ii >= -R/(n-4)
  bool top_eigen_ok;      // R - 2 R_nn >= 0
  bool ricci_norm_ok;     // |Ric|^2 <= n R^2
  double margin_ricci_lower;
  double margin_top_eigen;
  double margin_ricci_norm;
};

inline WeakPicInequalities weak_pic_proof_inequalities(const Tensor& rm) {
  if (rm.dim() < 5)
    throw DimensionOutOfRange("weak_pic_proof_inequalities needs n >= 5");
  const int n = rm.dim();
  const Eigen::MatrixXd ric = ricci(rm);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ric);
  const auto& ev = es.eigenvalues();
  const double r = scalar_curvature(rm);

  WeakPicInequalities w{};
  w.margin_ricci_lower = ev[0] + r / double(n - 4);
  w.margin_top_eigen = r - 2.0 * ev[n - 1];
  w.margin_ricci_norm = double(n) * r * r - ric.squaredNorm();
  const double tol = 1e-10 * std::max(1.0, frobenius_norm(rm));
  w.ricci_lower_ok = w.margin_ricci_lower >= -tol;
  w.top_eigen_ok = w.margin_top_eigen >= -tol;
  w.ricci_norm_ok = w.margin_ricci_norm >= -tol * tol;
  return w;
}

}  // namespace curv

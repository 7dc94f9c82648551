#pragma once

// Independent test oracles.  Everything here is written as plain nested
// loops straight from the definitions, deliberately avoiding the library's
// optimized paths, so that agreement is a two-route check.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "curv/isotropic.hpp"
#include "curv/rng.hpp"
#include "curv/tensor.hpp"

namespace oracle {

using curv::Tensor;

/// R(x,y,z,w) by direct quadruple contraction.
inline double contract4(const Tensor& rm, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& w) {
  const int n = rm.dim();
  double acc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (x[i] == 0 && y[j] == 0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          acc += rm(i, j, k, l) * x[i] * y[j] * z[k] * w[l];
    }
  return acc;
}

/// Ricci by direct contraction.
inline Eigen::MatrixXd ricci(const Tensor& rm) {
  const int n = rm.dim();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i) ric(j, l) += rm(i, j, i, l);
  return ric;
}

inline double scalar(const Tensor& rm) { return ricci(rm).trace(); }

/// Isotropic value at a frame by direct contraction (no bivector shortcut).
inline double isotropic_value(const Tensor& rm, const curv::Frame4& f,
                              double la = 1.0, double mu = 1.0) {
  const Eigen::VectorXd e1 = f.e(0), e2 = f.e(1), e3 = f.e(2), e4 = f.e(3);
  return contract4(rm, e1, e3, e1, e3) + la * la * contract4(rm, e1, e4, e1, e4) +
         mu * mu * contract4(rm, e2, e3, e2, e3) +
         la * la * mu * mu * contract4(rm, e2, e4, e2, e4) -
         2 * la * mu * contract4(rm, e1, e2, e3, e4);
}

/// Fast frame evaluation for the brute-force minima: pair matrix built here
/// from scratch (definitional re-indexing, not the optimizer path).
class FrameEvaluator {
 public:
  explicit FrameEvaluator(const Tensor& rm) : n_(rm.dim()) {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) pairs_.emplace_back(i, j);
    const int np = static_cast<int>(pairs_.size());
    m_.resize(np, np);
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < np; ++b)
        m_(a, b) = rm(pairs_[a].first, pairs_[a].second, pairs_[b].first,
                      pairs_[b].second);
  }

  double r(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
           const Eigen::VectorXd& z, const Eigen::VectorXd& w) const {
    return wedge(x, y).dot(m_ * wedge(z, w));
  }

  double value(const curv::Frame4& f, double la = 1.0, double mu = 1.0) const {
    const Eigen::VectorXd e1 = f.e(0), e2 = f.e(1), e3 = f.e(2), e4 = f.e(3);
    return r(e1, e3, e1, e3) + la * la * r(e1, e4, e1, e4) +
           mu * mu * r(e2, e3, e2, e3) + la * la * mu * mu * r(e2, e4, e2, e4) -
           2 * la * mu * r(e1, e2, e3, e4);
  }

  /// Exact inner (lambda, mu) minimization for one frame (its own code path).
  double value_min_lm(const curv::Frame4& f, bool over_mu) const {
    const Eigen::VectorXd e1 = f.e(0), e2 = f.e(1), e3 = f.e(2), e4 = f.e(3);
    const double a = r(e1, e3, e1, e3), b = r(e1, e4, e1, e4),
                 c = r(e2, e3, e2, e3), d = r(e2, e4, e2, e4),
                 e = r(e1, e2, e3, e4);
    double best = std::numeric_limits<double>::infinity();
    const int grid = 81;
    for (int i = 0; i < grid; ++i) {
      const double la = -1.0 + 2.0 * i / (grid - 1);
      if (over_mu) {
        for (int j = 0; j < grid; ++j) {
          const double mu = -1.0 + 2.0 * j / (grid - 1);
          best = std::min(best, a + la * la * b + mu * mu * c +
                                    la * la * mu * mu * d - 2 * la * mu * e);
        }
      } else {
        best = std::min(best, a + la * la * b + c + la * la * d - 2 * la * e);
      }
    }
    return best;
  }

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
  Eigen::MatrixXd m_;
};

/// Brute-force minimum over seeded random frames.
inline double brute_force_min(const Tensor& rm, curv::IsotropicMode mode,
                              int frames, std::uint64_t seed) {
  FrameEvaluator ev(rm);
  curv::Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < frames; ++i) {
    const curv::Frame4 f = curv::Frame4::random(rm.dim(), rng);
    double v;
    switch (mode) {
      case curv::IsotropicMode::PIC: v = ev.value(f); break;
      case curv::IsotropicMode::PIC1: v = ev.value_min_lm(f, false); break;
      default: v = ev.value_min_lm(f, true); break;
    }
    best = std::min(best, v);
  }
  return best;
}

/// Largest symmetry residuals, straight from the identities.
struct Residuals {
  double anti, pair, bianchi;
};

inline Residuals residuals(const Tensor& rm) {
  const int n = rm.dim();
  Residuals r{0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          r.anti = std::max({r.anti, std::abs(rm(i, j, k, l) + rm(j, i, k, l)),
                             std::abs(rm(i, j, k, l) + rm(i, j, l, k))});
          r.pair = std::max(r.pair, std::abs(rm(i, j, k, l) - rm(k, l, i, j)));
          r.bianchi = std::max(r.bianchi, std::abs(rm(i, j, k, l) +
                                                   rm(i, k, l, j) +
                                                   rm(i, l, j, k)));
        }
  return r;
}

}  // namespace oracle

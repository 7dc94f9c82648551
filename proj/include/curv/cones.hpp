#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "curv/errors.hpp"
#include "curv/fourd.hpp"
#include "curv/isotropic.hpp"
#include "curv/tensor.hpp"

namespace curv {

/// A scale-invariant curvature cone given by a 1-homogeneous membership
/// margin: positive inside, zero on the boundary, negative outside.
struct ConeSpec {
  std::string name;
  std::function<double(const Tensor&)> margin;
  bool contains_identity_interior = true;
  bool scale_invariant = true;
};

/// The built-in cones: weakly-PIC / PIC1 / PIC2 (isotropic minima as
/// margins) and PSD curvature operator (smallest operator eigenvalue).
inline std::vector<ConeSpec> builtin_cones(int n, int budget = 8,
                                           std::uint64_t seed = 0xC0DE5EEDu) {
  detail::check_dim(n, 4);
  std::vector<ConeSpec> cones;
  auto iso = [budget, seed](IsotropicMode mode) {
    return [mode, budget, seed](const Tensor& rm) {
      return min_isotropic(rm, mode, budget, seed).minimum;
    };
  };
  cones.push_back({"weak-pic", iso(IsotropicMode::PIC), true, true});
  cones.push_back({"weak-pic1", iso(IsotropicMode::PIC1), true, true});
  cones.push_back({"weak-pic2", iso(IsotropicMode::PIC2), true, true});
  cones.push_back({"psd",
                   [](const Tensor& rm) {
                     return psd_curvature_operator(rm).min_eigenvalue;
                   },
                   true, true});
  return cones;
}

inline ConeSpec find_cone(const std::vector<ConeSpec>& cones,
                          const std::string& name) {
  for (const auto& c : cones)
    if (c.name == name) return c;
  throw ConfigError("--cone: unknown cone name '" + name + "'");
}

/// Smallest mu such that margin(Rm + mu I) >= 0, by bisection along the
/// identity ray (monotone since I is interior).  Negative for interior
/// points, ~0 on the boundary.
inline double support_level(const ConeSpec& cone, const Tensor& rm) {
  if (!cone.contains_identity_interior)
    throw ConfigError("support_level needs a cone with identity interior");
  const Tensor eye = identity_tensor<double>(rm.dim());
  const double scale = std::max(frobenius_norm(rm), 1e-12);
  auto margin_at = [&](double mu) { return cone.margin(rm + mu * eye); };

  double lo, hi;
  const double m0 = cone.margin(rm);
  if (m0 >= 0) {
    hi = 0.0;
    lo = -0.25 * scale;
    while (margin_at(lo) >= 0) {
      lo *= 2.0;
      if (-lo > 1e3 * scale)
        throw NoBracket("margin never leaves the cone along -I");
    }
  } else {
    lo = 0.0;
    hi = 0.25 * scale;
    while (margin_at(hi) < 0) {
      hi *= 2.0;
      if (hi > 1e3 * scale)
        throw NoBracket("Rm + mu I never enters the cone within |mu| <= 1e3 |Rm|");
    }
  }
  while (hi - lo > 1e-11 * scale) {
    const double mid = 0.5 * (lo + hi);
    if (margin_at(mid) >= 0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// One-sided directional derivative of the margin at a boundary point along
/// V: central difference with one Richardson extrapolation.  Positive means
/// V points into the tangent cone interior.
inline double tangent_inward_margin(const ConeSpec& cone, const Tensor& rm_boundary,
                                    const Tensor& v) {
  const double vn = frobenius_norm(v);
  if (vn == 0.0) throw DegenerateDirection("|V| = 0");
  const double scale = std::max(frobenius_norm(rm_boundary), 1e-12);
  const double eps = 1e-5 * scale / vn;

  auto central = [&](double e) {
    return (cone.margin(rm_boundary + e * v) -
            cone.margin(rm_boundary + (-e) * v)) /
           (2.0 * e);
  };
  const double d1 = central(eps);
  const double d2 = central(0.5 * eps);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace curv

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "curv/cones.hpp"
#include "curv/models.hpp"
#include "curv/rng.hpp"
#include "curv/tensor.hpp"

namespace curv {

/// Haar-distributed rotation (QR of a Gaussian matrix, sign-fixed,
/// determinant forced to +1).
inline Eigen::MatrixXd random_rotation(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

/// Random valid curvature tensor: white noise symmetrized over the
/// pair/antisymmetry group, then projected onto the Bianchi subspace by
/// subtracting one third of the cyclic sum.
inline Tensor random_curvature_tensor(int n, Rng& rng) {
  Tensor w(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) w.at(i, j, k, l) = rng.gaussian();

  Tensor s(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          s.at(i, j, k, l) =
              (w(i, j, k, l) - w(j, i, k, l) - w(i, j, l, k) + w(j, i, l, k) +
               w(k, l, i, j) - w(l, k, i, j) - w(k, l, j, i) + w(l, k, j, i)) /
              8.0;

  Tensor out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double cyc = s(i, j, k, l) + s(i, k, l, j) + s(i, l, j, k);
          out.at(i, j, k, l) = s(i, j, k, l) - cyc / 3.0;
        }
  return out;
}

/// Bianchi-symmetrize an arbitrary perturbation (same projection as above).
inline Tensor project_to_curvature(const Tensor& w) {
  Rng dummy(0);
  const int n = w.dim();
  Tensor s(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          s.at(i, j, k, l) =
              (w(i, j, k, l) - w(j, i, k, l) - w(i, j, l, k) + w(j, i, l, k) +
               w(k, l, i, j) - w(l, k, i, j) - w(k, l, j, i) + w(l, k, j, i)) /
              8.0;
  Tensor out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double cyc = s(i, j, k, l) + s(i, k, l, j) + s(i, l, j, k);
          out.at(i, j, k, l) = s(i, j, k, l) - cyc / 3.0;
        }
  return out;
}

/// Pool of model tensors used by the convex-hull sampler.
inline std::vector<Tensor> model_pool(int n) {
  std::vector<Tensor> pool;
  pool.push_back(identity_tensor<double>(n));
  pool.push_back(cylinder<double>(n));
  if (n >= 5)
    pool.push_back(product<double>(space_form<double>(n - 2, 1.0), flat<double>(2)));
  if (n == 4) {
    const KahlerModels km = kahler_models();
    pool.push_back(km.cp2);
    pool.push_back(km.cp1_cp1);
    pool.push_back(km.c_cp1);
    pool.push_back(product<double>(space_form<double>(2, 1.0), flat<double>(2)));
  }
  if (n >= 5)
    pool.push_back(
        product<double>(space_form<double>(2, 1.0), space_form<double>(n - 2, 1.0)));
  return pool;
}

/// Convex combination of randomly rotated model tensors plus a small
/// Bianchi-projected Gaussian perturbation (|dRm| <= perturb * |Rm|).
/// All pool models have PSD curvature operator, so unperturbed samples lie
/// in every built-in cone; callers rejection-filter for their condition.
inline Tensor model_hull_sample(int n, Rng& rng, double perturb = 0.05) {
  const std::vector<Tensor> pool = model_pool(n);
  // uniform simplex weights
  std::vector<double> w(pool.size());
  double tot = 0;
  for (auto& x : w) {
    x = -std::log(std::max(rng.uniform(), 1e-300));
    tot += x;
  }
  Tensor out(n);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Eigen::MatrixXd o = random_rotation(n, rng);
    out += (w[i] / tot) * rotate<double>(pool[i], o);
  }
  if (perturb > 0) {
    Tensor noise = random_curvature_tensor(n, rng);
    const double nn = frobenius_norm(noise);
    if (nn > 0)
      out += (perturb * rng.uniform() * frobenius_norm(out) / nn) * noise;
  }
  return out;
}

/// Strictly-inside sample for a cone: model-hull candidates rejection-
/// filtered by margin > min_margin * |Rm|.
inline Tensor sample_inside(const ConeSpec& cone, int n, Rng& rng,
                            double min_margin = 1e-3, double perturb = 0.05,
                            int max_tries = 200) {
  for (int t = 0; t < max_tries; ++t) {
    Tensor c = model_hull_sample(n, rng, perturb);
    if (cone.margin(c) > min_margin * frobenius_norm(c)) return c;
  }
  throw ConfigError("sampler failed to produce an interior point for cone " +
                    cone.name);
}

/// Boundary sample: interior point shifted along -I by its support level,
/// then normalized to |Rm| = 1 (margins are 1-homogeneous, so the boundary
/// is preserved).
inline Tensor sample_boundary(const ConeSpec& cone, int n, Rng& rng,
                              double perturb = 0.05) {
  Tensor in = sample_inside(cone, n, rng, 1e-3, perturb);
  const double mu = support_level(cone, in);
  Tensor b = in + mu * identity_tensor<double>(n);
  const double nb = frobenius_norm(b);
  if (nb > 1e-10) b *= 1.0 / nb;
  return b;
}

}  // namespace curv

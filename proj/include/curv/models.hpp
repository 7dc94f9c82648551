#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "curv/errors.hpp"
#include "curv/tensor.hpp"

namespace curv {

/// Space form of constant sectional curvature kappa: kappa * I.
template <typename S = double>
CurvatureTensor<S> space_form(int n, S kappa) {
  detail::check_dim(n);
  return kappa * identity_tensor<S>(n);
}

/// Cylinder S^{n-1}(1) x R: (1/2) P ^ P with P the rank-(n-1) projection.
template <typename S = double>
CurvatureTensor<S> cylinder(int n) {
  detail::check_dim(n, 3);
  SymBilinear<S> p = SymBilinear<S>::Identity(n, n);
  p(n - 1, n - 1) = S(0);
  return S(0.5) * kulkarni_nomizu<S>(p, p);
}

/// Riemannian product: block-diagonal embedding with zero mixed components.
template <typename S>
CurvatureTensor<S> product(const CurvatureTensor<S>& rm1,
                           const CurvatureTensor<S>& rm2) {
  const int n1 = rm1.dim(), n2 = rm2.dim(), n = n1 + n2;
  detail::check_dim(n);
  CurvatureTensor<S> out(n);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n1; ++l) out.at(i, j, k, l) = rm1(i, j, k, l);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n2; ++k)
        for (int l = 0; l < n2; ++l)
          out.at(n1 + i, n1 + j, n1 + k, n1 + l) = rm2(i, j, k, l);
  return out;
}

/// The flat factor R^k (zero tensor).
template <typename S = double>
CurvatureTensor<S> flat(int k) {
  return CurvatureTensor<S>(k);
}

/// Standard complex structure pairing (e1,e2), (e3,e4), ... : J e_{2k} =
/// e_{2k+1}.
inline Eigen::MatrixXd standard_complex_structure(int n) {
  if (n % 2 != 0) throw DimensionMismatch("complex structure needs even n");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; k += 2) {
    j(k + 1, k) = 1.0;
    j(k, k + 1) = -1.0;
  }
  return j;
}

/// Curvature of CP^m with the Fubini-Study metric normalized to holomorphic
/// sectional curvature 4 (sectional curvatures in [1,4]), together with the
/// compatible complex structure.  m = 1 degenerates to the round S^2 of
/// curvature 4 on two real dimensions.
inline std::pair<Tensor, Eigen::MatrixXd> fubini_study(int m) {
  const int n = 2 * m;
  detail::check_dim(n);
  const Eigen::MatrixXd j = standard_complex_structure(n);
  const double c = 4.0;
  Tensor rm(n);
  auto jdot = [&](int a, int b) { return j(b, a); };  // <J e_a, e_b>
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double del = double((i == k) * (jj == l) - (i == l) * (jj == k));
          const double jterm = jdot(i, k) * jdot(jj, l) -
                               jdot(i, l) * jdot(jj, k) +
                               2.0 * jdot(i, jj) * jdot(k, l);
          rm.at(i, jj, k, l) = 0.25 * c * (del + jterm);
        }
  return {rm, j};
}

/// The four Kaehler-surface model geometries with their complex structure.
struct KahlerModels {
  Tensor c2;         // C^2 (flat)
  Tensor c_cp1;      // C x CP^1
  Tensor cp1_cp1;    // CP^1 x CP^1
  Tensor cp2;        // CP^2
  Eigen::Matrix4d j; // shared standard complex structure
};

inline KahlerModels kahler_models() {
  KahlerModels m;
  m.c2 = flat<double>(4);
  const auto s2 = fubini_study(1).first;  // round S^2(kappa = 4)
  m.c_cp1 = product<double>(flat<double>(2), s2);
  m.cp1_cp1 = product<double>(s2, s2);
  m.cp2 = fubini_study(2).first;
  m.j = standard_complex_structure(4);
  return m;
}

/// Shrinking-cylinder family: sphere factor radius^2 = 2(n-2) tau, i.e.
/// curvature kappa(tau) = 1/(2(n-2) tau); satisfies d/dtau Rm = -Q(Rm).
template <typename S = double>
CurvatureTensor<S> shrinking_cylinder(int n, S tau) {
  if (!(tau > S(0))) throw NonpositiveTau("tau must be positive");
  return (S(1) / (S(2 * (n - 2)) * tau)) * cylinder<S>(n);
}

}  // namespace curv

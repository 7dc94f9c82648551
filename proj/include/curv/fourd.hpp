#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>

#include "curv/errors.hpp"
#include "curv/tensor.hpp"

namespace curv {

// ---------------------------------------------------------------------------
// Self-dual / anti-self-dual decomposition in dimension 4.
//
// With the index pairing (1,2),(3,4) the orthonormal bases of Lambda_+ and
// Lambda_- in the bivector inner product are
//   phi_1^+- = (e1^e2 +- e3^e4)/sqrt2
//   phi_2^+- = (e1^e3 -+ e2^e4)/sqrt2
//   phi_3^+- = (e1^e4 +- e2^e3)/sqrt2
// The curvature operator is expressed in this basis with the calibration
// T = 2 R_ijkl fixed on the kappa=1 space form, which makes tr A = R/2 exact.
// ---------------------------------------------------------------------------

/// 6 x 6 matrix whose columns are phi_1^+, phi_2^+, phi_3^+, phi_1^-,
/// phi_2^-, phi_3^- in the 6-dim pair basis of Lambda^2(R^4).
inline Eigen::Matrix<double, 6, 6> lambda_pm_basis() {
  // pair order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix<double, 6, 6> b = Eigen::Matrix<double, 6, 6>::Zero();
  // self-dual
  b(0, 0) = s; b(5, 0) = s;    // e12 + e34
  b(1, 1) = s; b(4, 1) = -s;   // e13 - e24
  b(2, 2) = s; b(3, 2) = s;    // e14 + e23
  // anti-self-dual
  b(0, 3) = s; b(5, 3) = -s;
  b(1, 4) = s; b(4, 4) = s;
  b(2, 5) = s; b(3, 5) = -s;
  return b;
}

/// Hodge star on Lambda^2(R^4) in the pair basis (orientation e1^e2^e3^e4).
inline Eigen::Matrix<double, 6, 6> hodge_star4() {
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  h(0, 5) = 1; h(5, 0) = 1;    // *(e12) = e34
  h(1, 4) = -1; h(4, 1) = -1;  // *(e13) = -e24
  h(2, 3) = 1; h(3, 2) = 1;    // *(e14) = e23
  return h;
}

/// Blocks of the 4d curvature operator and their ordered spectra.
struct BlockDecomp {
  Eigen::Matrix3d A, B, C;
  Eigen::Vector3d a, b, c;  // a,c eigenvalues ascending; b singular values

  double a1() const { return a[0]; }
  double a2() const { return a[1]; }
  double a3() const { return a[2]; }
  double b1() const { return b[0]; }
  double b2() const { return b[1]; }
  double b3() const { return b[2]; }
  double c1() const { return c[0]; }
  double c2() const { return c[1]; }
  double c3() const { return c[2]; }
};

inline BlockDecomp block_decomposition(const Tensor& rm) {
  if (rm.dim() != 4) throw DimensionNot4("block decomposition needs n = 4");
  const PairBasis pb(4);
  const Eigen::MatrixXd t = operator_matrix(rm, pb);
  const Eigen::Matrix<double, 6, 6> phi = lambda_pm_basis();
  const Eigen::Matrix<double, 6, 6> t6 = phi.transpose() * t * phi;

  BlockDecomp d;
  d.A = t6.topLeftCorner<3, 3>();
  d.B = t6.topRightCorner<3, 3>();
  d.C = t6.bottomRightCorner<3, 3>();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ea(d.A), ec(d.C);
  d.a = ea.eigenvalues();
  d.c = ec.eigenvalues();
  // singular values of B via eigenvalues of B^T B, clamped at the
  // numerical floor and sorted ascending
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eb(d.B.transpose() * d.B);
  for (int i = 0; i < 3; ++i) {
    double v = eb.eigenvalues()[i];
    if (v < 0 && v > -1e-14) v = 0;
    d.b[i] = std::sqrt(std::max(v, 0.0));
  }
  std::sort(d.b.data(), d.b.data() + 3);
  return d;
}

/// Ratios of the 4d pinching lemmas.  Degenerate denominators
/// (<= 1e-12 |Rm|) report +inf with a flag instead of erroring, since
/// boundary models are first-class inputs.
struct PinchingReport {
  double lemma41_a;   // a3/a1
  double lemma41_c;   // c3/c1
  double lemma42;     // b3^2 / ((a1+a2)(c1+c2))
  double lemma43;     // b3^2 / (a1 c1)
  bool lemma41_a_finite, lemma41_c_finite, lemma42_finite, lemma43_finite;
  double lambda;      // uniform-PIC constant (n = 4 formulation), +inf if degenerate
  bool restricted_ok; // Eq-(4.1)-style pinching with K = 6 Lambda^2 + 1
  BlockDecomp blocks;
};

/// Uniform-PIC constant for n = 4: Lambda = max(a3,b3,c3)/min(a1+a2, c1+c2).
inline double uniform_pic_lambda4(const Tensor& rm) {
  const BlockDecomp d = block_decomposition(rm);
  const double denom = std::min(d.a1() + d.a2(), d.c1() + d.c2());
  const double tol = 1e-10 * std::max(1.0, frobenius_norm(rm));
  if (denom <= tol)
    throw NotStrictlyPIC("min(a1+a2, c1+c2) = " + std::to_string(denom) +
                         " not positive at tolerance");
  return std::max({d.a3(), d.b3(), d.c3()}) / denom;
}

inline PinchingReport pinching_report(const Tensor& rm) {
  const BlockDecomp d = block_decomposition(rm);
  const double tol = 1e-12 * std::max(1.0, frobenius_norm(rm));
  const double inf = std::numeric_limits<double>::infinity();

  PinchingReport p{};
  p.blocks = d;
  auto ratio = [&](double num, double den, bool* finite) {
    if (std::abs(den) <= tol) {
      *finite = false;
      return inf;
    }
    *finite = true;
    return num / den;
  };
  p.lemma41_a = ratio(d.a3(), d.a1(), &p.lemma41_a_finite);
  p.lemma41_c = ratio(d.c3(), d.c1(), &p.lemma41_c_finite);
  p.lemma42 = ratio(d.b3() * d.b3(), (d.a1() + d.a2()) * (d.c1() + d.c2()),
                    &p.lemma42_finite);
  p.lemma43 = ratio(d.b3() * d.b3(), d.a1() * d.c1(), &p.lemma43_finite);

  const double denom = std::min(d.a1() + d.a2(), d.c1() + d.c2());
  if (denom <= tol) {
    p.lambda = inf;
    p.restricted_ok = false;
  } else {
    p.lambda = std::max({d.a3(), d.b3(), d.c3()}) / denom;
    const double k = 6.0 * p.lambda * p.lambda + 1.0;
    const double slack = 1e-9 * std::max(1.0, frobenius_norm(rm));
    p.restricted_ok = d.a3() <= k * d.a1() + slack &&
                      d.c3() <= k * d.c1() + slack &&
                      d.b3() * d.b3() <= d.a1() * d.c1() + slack * slack;
  }
  return p;
}

/// Smallest eigenvalue of the calibrated curvature operator (any n <= 12).
struct PsdReport {
  double min_eigenvalue;
  bool psd;
};

inline PsdReport psd_curvature_operator(const Tensor& rm) {
  const PairBasis pb(rm.dim());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(operator_matrix(rm, pb),
                                                    Eigen::EigenvaluesOnly);
  PsdReport r;
  r.min_eigenvalue = es.eigenvalues()[0];
  r.psd = r.min_eigenvalue >= -1e-9 * frobenius_norm(rm);
  return r;
}

// ---------------------------------------------------------------------------
// Kaehler block form.  In the basis adapted to a compatible complex
// structure J the operator takes the form
//   [ R/2  0  0 | rho^T ]
//   [  0   0  0 |   0   ]
//   [  0   0  0 |   0   ]
//   [ rho  0  0 |   C   ]
// and the residual is the largest entry that the display requires to vanish.
// ---------------------------------------------------------------------------

struct KahlerForm {
  double half_scalar;     // R/2
  Eigen::Vector3d rho;
  Eigen::Matrix3d C;
  Eigen::Vector3d c;      // eigenvalues of C, ascending
  double residual;
};

/// Frame {e1, Je1, e2, Je2} built from J (orthogonal, J^2 = -id).
inline Eigen::Matrix4d adapted_frame(const Eigen::Matrix4d& j) {
  if ((j * j + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() > 1e-10 ||
      (j.transpose() * j - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() >
          1e-10)
    throw DimensionMismatch("J must be orthogonal with J^2 = -id");
  Eigen::Vector4d e1 = Eigen::Vector4d::Unit(0);
  Eigen::Vector4d e2 = j * e1;
  // any unit vector orthogonal to span{e1, e2}
  Eigen::Vector4d e3 = Eigen::Vector4d::Unit(1);
  e3 -= e3.dot(e1) * e1 + e3.dot(e2) * e2;
  if (e3.norm() < 0.5) {
    e3 = Eigen::Vector4d::Unit(2);
    e3 -= e3.dot(e1) * e1 + e3.dot(e2) * e2;
  }
  e3.normalize();
  Eigen::Vector4d e4 = j * e3;
  Eigen::Matrix4d f;
  f.col(0) = e1;
  f.col(1) = e2;
  f.col(2) = e3;
  f.col(3) = e4;
  return f;
}

/// The 6x6 operator in the J-adapted Lambda_+- basis.
inline Eigen::Matrix<double, 6, 6> adapted_operator(const Tensor& rm,
                                                    const Eigen::Matrix4d& j) {
  if (rm.dim() != 4) throw DimensionNot4("Kaehler block form needs n = 4");
  const Eigen::Matrix4d f = adapted_frame(j);
  const Tensor rot = rotate<double>(rm, f);  // components in the adapted frame
  const PairBasis pb(4);
  const Eigen::Matrix<double, 6, 6> phi = lambda_pm_basis();
  return phi.transpose() * operator_matrix(rot, pb) * phi;
}

inline KahlerForm kahler_block_form(const Tensor& rm, const Eigen::Matrix4d& j) {
  const Eigen::Matrix<double, 6, 6> t6 = adapted_operator(rm, j);
  // entries required to vanish: everything in the phi_2^+, phi_3^+ rows/cols
  double res = 0.0;
  for (int r = 1; r <= 2; ++r)
    for (int c = 0; c < 6; ++c) res = std::max(res, std::abs(t6(r, c)));
  const double nrm = frobenius_norm(rm);
  if (res > 1e-6 * std::max(1e-300, nrm))
    throw NotKahler("adapted-basis residual " + std::to_string(res) +
                    " exceeds 1e-6 |Rm|");
  KahlerForm k;
  k.half_scalar = t6(0, 0);
  k.rho = t6.block<1, 3>(0, 3).transpose();
  k.C = t6.bottomRightCorner<3, 3>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(k.C);
  k.c = es.eigenvalues();
  k.residual = res;
  return k;
}

// ---------------------------------------------------------------------------
// Sharp operator.
// ---------------------------------------------------------------------------

/// Rm# := Q(Rm) - Rm^2 (operator square on bivectors mapped back to index
/// form); in index form this is the last two summands of Q.
template <typename S>
CurvatureTensor<S> sharp_operator(const CurvatureTensor<S>& rm) {
  return q_reaction(rm) - operator_square(rm);
}

/// Second implementation for n = 4 via the adjoint structure of
/// so(4) = so(3) + so(3): in the Lambda_+- basis
///   T# = 2 [ adj(A)   cof(B) ; cof(B)^T  adj(C) ]
/// with adj/cof the (transposed) cofactor matrices, up to the sign fixed by
/// the Lie brackets of the two factors.
inline Tensor sharp_operator_so4(const Tensor& rm) {
  if (rm.dim() != 4) throw DimensionNot4("so(4) sharp needs n = 4");
  const PairBasis pb(4);
  const Eigen::MatrixXd t = operator_matrix(rm, pb);
  const Eigen::Matrix<double, 6, 6> phi = lambda_pm_basis();
  const Eigen::Matrix<double, 6, 6> t6 = phi.transpose() * t * phi;

  auto cof3 = [](const Eigen::Matrix3d& m) {
    Eigen::Matrix3d c;
    c(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    c(0, 1) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    c(0, 2) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    c(1, 0) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    c(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    c(1, 2) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    c(2, 0) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    c(2, 1) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    c(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return c;
  };

  const Eigen::Matrix3d a = t6.topLeftCorner<3, 3>();
  const Eigen::Matrix3d b = t6.topRightCorner<3, 3>();
  const Eigen::Matrix3d c = t6.bottomRightCorner<3, 3>();

  Eigen::Matrix<double, 6, 6> sharp6;
  sharp6.topLeftCorner<3, 3>() = 2.0 * cof3(a);
  sharp6.bottomRightCorner<3, 3>() = 2.0 * cof3(c);
  const Eigen::Matrix3d bs = -2.0 * cof3(b);
  sharp6.topRightCorner<3, 3>() = bs;
  sharp6.bottomLeftCorner<3, 3>() = bs.transpose();

  const Eigen::Matrix<double, 6, 6> sharp_pairs =
      phi * sharp6 * phi.transpose();
  return tensor_from_operator_matrix<double>(sharp_pairs, pb);
}

}  // namespace curv

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "curv/errors.hpp"

namespace curv {

/// Symmetric bilinear form on R^n (Ricci tensor, id, projections, ...).
template <typename Scalar>
using SymBilinear = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {
constexpr int kMinDim = 2;   // dim-2/3 factors are allowed as building blocks
constexpr int kMinExtDim = 4;  // external entry points require n >= 4
constexpr int kMaxDim = 12;

inline void check_dim(int n, int lo = kMinDim) {
  if (n < lo || n > kMaxDim)
    throw DimensionOutOfRange("dimension n = " + std::to_string(n) +
                              " outside [" + std::to_string(lo) + ", 12]");
}
}  // namespace detail

/// Algebraic curvature tensor on R^n, dense n^4 storage in row-major
/// (i,j,k,l) order.  Immutable value type; all operations below are pure.
template <typename Scalar = double>
class CurvatureTensor {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  CurvatureTensor() : n_(0) {}

  /// Zero tensor.
  explicit CurvatureTensor(int n) : n_(n), data_(Vec::Zero(ipow4(n))) {
    detail::check_dim(n);
  }

  CurvatureTensor(int n, Vec data) : n_(n), data_(std::move(data)) {
    detail::check_dim(n);
  }

  int dim() const { return n_; }
  const Vec& data() const { return data_; }
  Vec& mutable_data() { return data_; }

  Scalar operator()(int i, int j, int k, int l) const {
    return data_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  Scalar& at(int i, int j, int k, int l) {
    return data_[((i * n_ + j) * n_ + k) * n_ + l];
  }

  /// View as the n^2 x n^2 matrix R_(ij),(kl).
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
  paired() const {
    return {data_.data(), n_ * n_, n_ * n_};
  }

  CurvatureTensor& operator+=(const CurvatureTensor& o) {
    data_ += o.data_;
    return *this;
  }
  CurvatureTensor& operator*=(Scalar c) {
    data_ *= c;
    return *this;
  }
  friend CurvatureTensor operator+(CurvatureTensor a, const CurvatureTensor& b) {
    return a += b;
  }
  friend CurvatureTensor operator-(CurvatureTensor a, const CurvatureTensor& b) {
    a.data_ -= b.data_;
    return a;
  }
  friend CurvatureTensor operator*(Scalar c, CurvatureTensor a) {
    return a *= c;
  }

  static int ipow4(int n) { return n * n * n * n; }

 private:
  int n_;
  Vec data_;
};

using Tensor = CurvatureTensor<double>;

/// Entrywise Euclidean (Frobenius) norm.
template <typename S>
S frobenius_norm(const CurvatureTensor<S>& rm) {
  return rm.data().norm();
}

/// Max |entry|; used for scale-relative tolerances.
template <typename S>
S max_abs(const CurvatureTensor<S>& rm) {
  return rm.data().template lpNorm<Eigen::Infinity>();
}

/// Largest residuals of the three curvature identities.
template <typename S>
struct SymmetryResiduals {
  S antisymmetry = 0, pair = 0, bianchi = 0;
};

template <typename S>
SymmetryResiduals<S> symmetry_residuals(const CurvatureTensor<S>& rm) {
  const int n = rm.dim();
  SymmetryResiduals<S> r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const S v = rm(i, j, k, l);
          r.antisymmetry = std::max(
              r.antisymmetry, std::max(std::abs(v + rm(j, i, k, l)),
                                       std::abs(v + rm(i, j, l, k))));
          r.pair = std::max(r.pair, std::abs(v - rm(k, l, i, j)));
          r.bianchi = std::max(
              r.bianchi, std::abs(v + rm(i, k, l, j) + rm(i, l, j, k)));
        }
  return r;
}

/// Validate the three identities at the constructor tolerances
/// (1e-12 / 1e-12 / 1e-10 absolute, scaled by max-entry when that exceeds 1).
template <typename S>
void validate(const CurvatureTensor<S>& rm) {
  if (!rm.data().allFinite())
    throw SymmetryViolation("finiteness", std::numeric_limits<double>::infinity());
  const S scale = std::max(S(1), max_abs(rm));
  const auto res = symmetry_residuals(rm);
  if (res.antisymmetry > S(1e-12) * scale)
    throw SymmetryViolation("antisymmetry", double(res.antisymmetry));
  if (res.pair > S(1e-12) * scale)
    throw SymmetryViolation("pair symmetry", double(res.pair));
  if (res.bianchi > S(1e-10) * scale)
    throw SymmetryViolation("first Bianchi", double(res.bianchi));
}

/// Build a tensor from a dense flat array (row-major i,j,k,l) and validate.
/// Symmetrization is NOT applied silently.
template <typename S>
CurvatureTensor<S> make_tensor(int n,
                               const Eigen::Matrix<S, Eigen::Dynamic, 1>& comp) {
  detail::check_dim(n, detail::kMinExtDim);
  if (comp.size() != CurvatureTensor<S>::ipow4(n))
    throw DimensionMismatch("component array has " + std::to_string(comp.size()) +
                            " entries, expected n^4 = " +
                            std::to_string(CurvatureTensor<S>::ipow4(n)));
  CurvatureTensor<S> rm(n, comp);
  validate(rm);
  return rm;
}

/// I_ijkl = d_ik d_jl - d_il d_jk  (= 1/2 id ^ id).
template <typename S = double>
CurvatureTensor<S> identity_tensor(int n) {
  detail::check_dim(n);
  CurvatureTensor<S> rm(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      rm.at(i, j, i, j) = S(1);
      rm.at(i, j, j, i) = S(-1);
    }
  return rm;
}

/// Kulkarni-Nomizu product:
/// (h ^ k)_ijkl = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il.
template <typename S>
CurvatureTensor<S> kulkarni_nomizu(const SymBilinear<S>& h,
                                   const SymBilinear<S>& k) {
  if (h.rows() != h.cols() || k.rows() != k.cols() || h.rows() != k.rows())
    throw DimensionMismatch("Kulkarni-Nomizu factors must be square and equal-sized");
  const int n = static_cast<int>(h.rows());
  detail::check_dim(n);
  CurvatureTensor<S> rm(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk)
        for (int l = 0; l < n; ++l)
          rm.at(i, j, kk, l) = h(i, kk) * k(j, l) + h(j, l) * k(i, kk) -
                               h(i, l) * k(j, kk) - h(j, kk) * k(i, l);
  return rm;
}

/// Ricci contraction Ric_jl = sum_i R_ijil.
template <typename S>
SymBilinear<S> ricci(const CurvatureTensor<S>& rm) {
  const int n = rm.dim();
  SymBilinear<S> ric = SymBilinear<S>::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      S s = 0;
      for (int i = 0; i < n; ++i) s += rm(i, j, i, l);
      ric(j, l) = s;
    }
  return ric;
}

template <typename S>
S scalar_curvature(const CurvatureTensor<S>& rm) {
  const int n = rm.dim();
  S s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += rm(i, j, i, j);
  return s;
}

/// Quadratic reaction term of the curvature evolution equation,
/// Q(Rm)_ijkl = R_ijpq R_klpq + 2 R_ipkq R_jplq - 2 R_iplq R_jpkq.
/// Evaluated as two n^2 x n^2 Gram products.
template <typename S>
CurvatureTensor<S> q_reaction(const CurvatureTensor<S>& rm) {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = rm.dim();
  const int n2 = n * n;

  Mat M(n2, n2);  // M[(ij),(pq)] = R_ijpq
  Mat G(n2, n2);  // G[(ik),(pq)] = R_ipkq
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          M(i * n + j, p * n + q) = rm(i, j, p, q);
          G(i * n + j, p * n + q) = rm(i, p, j, q);
        }
  const Mat H = M * M.transpose();   // H[(ij),(kl)] = R_ijpq R_klpq
  const Mat W = G * G.transpose();   // W[(ik),(jl)] = R_ipkq R_jplq

  CurvatureTensor<S> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.at(i, j, k, l) = H(i * n + j, k * n + l) +
                               S(2) * W(i * n + k, j * n + l) -
                               S(2) * W(i * n + l, j * n + k);
  return out;
}

/// First summand of Q: the operator square R_ijpq R_klpq (bivector square
/// of the calibrated curvature operator mapped back to index form).
template <typename S>
CurvatureTensor<S> operator_square(const CurvatureTensor<S>& rm) {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = rm.dim();
  const Mat M = rm.paired();
  const Mat H = M * M.transpose();
  CurvatureTensor<S> out(n);
  Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.mutable_data().data(), n * n, n * n) = H;
  return out;
}

/// l_{a,b}(S) = S + b Ric(S)^id + (2(a-b)/n scal(S)) I.
template <typename S>
CurvatureTensor<S> lab_transform(const CurvatureTensor<S>& s, S a, S b) {
  const int n = s.dim();
  const SymBilinear<S> ric = ricci(s);
  const S scal = ric.trace();
  const SymBilinear<S> id = SymBilinear<S>::Identity(n, n);
  CurvatureTensor<S> out = s;
  if (b != S(0)) out += b * kulkarni_nomizu<S>(ric, id);
  const S c = S(2) * (a - b) / S(n) * scal;
  if (c != S(0)) out += c * identity_tensor<S>(n);
  return out;
}

/// Inverse of lab_transform.  The transform acts diagonally on the
/// Weyl / traceless-Ricci / scalar parts with factors 1, 1+(n-2)b and
/// 1+2(n-1)a, so inversion is a two-scalar solve.
template <typename S>
CurvatureTensor<S> lab_invert(const CurvatureTensor<S>& rm, S a, S b) {
  const int n = rm.dim();
  const S fs = S(1) + S(2 * (n - 1)) * a;  // scalar-part factor
  const S fr = S(1) + S(n - 2) * b;        // traceless-Ricci factor
  if (std::abs(fs) < S(1e-12) || std::abs(fr) < S(1e-12))
    throw SingularTransform(double(a), double(b));

  const SymBilinear<S> ric_rm = ricci(rm);
  const S scal_rm = ric_rm.trace();
  const SymBilinear<S> id = SymBilinear<S>::Identity(n, n);

  const S scal_s = scal_rm / fs;
  const SymBilinear<S> ric0_s = (ric_rm - (scal_rm / S(n)) * id) / fr;
  const SymBilinear<S> ric_s = ric0_s + (scal_s / S(n)) * id;

  CurvatureTensor<S> s = rm;
  s += (-b) * kulkarni_nomizu<S>(ric_s, id);
  s += (-S(2) * (a - b) / S(n) * scal_s) * identity_tensor<S>(n);
  return s;
}

/// Frame change on all four indices: (O.Rm)_ijkl = R_abcd O_ai O_bj O_ck O_dl.
template <typename S>
CurvatureTensor<S> rotate(const CurvatureTensor<S>& rm,
                          const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& o) {
  const int n = rm.dim();
  if (o.rows() != n || o.cols() != n)
    throw DimensionMismatch("rotation matrix size mismatch");
  using Vec = typename CurvatureTensor<S>::Vec;
  Vec cur = rm.data(), nxt(cur.size());
  // contract one mode at a time; layout stays row-major (i,j,k,l)
  const int n3 = n * n * n;
  for (int mode = 0; mode < 4; ++mode) {
    nxt.setZero();
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) {
        const S w = o(a, i);
        if (w == S(0)) continue;
        // mode 0 varies slowest after each cyclic pass; we always contract
        // the leading index and cyclically transpose so four passes hit all.
        nxt.segment(i * n3, n3) += w * cur.segment(a * n3, n3);
      }
    // cyclic transpose (i,j,k,l) -> (j,k,l,i)
    Vec tmp(cur.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            tmp[((j * n + k) * n + l) * n + i] = nxt[((i * n + j) * n + k) * n + l];
    cur.swap(tmp);
  }
  return CurvatureTensor<S>(n, std::move(cur));
}

// ---------------------------------------------------------------------------
// Bivector (pair) indexing and the calibrated curvature operator matrix.
// Basis of Lambda^2: {e_i ^ e_j : i < j}, orthonormal in the bivector inner
// product.  The operator matrix is T_(ij),(kl) = 2 R_ijkl; the factor 2 is
// the calibration that makes tr(A) = R/2 hold in the 4d block decomposition
// and gives the kappa=1 space form operator eigenvalue 2.
// ---------------------------------------------------------------------------

struct PairBasis {
  int n = 0;
  std::vector<std::pair<int, int>> pairs;      // ordered (i<j)
  std::vector<std::vector<int>> index;         // index[i][j] -> pair id (i<j)

  explicit PairBasis(int n_) : n(n_), index(n_, std::vector<int>(n_, -1)) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        index[i][j] = static_cast<int>(pairs.size());
        pairs.emplace_back(i, j);
      }
  }
  int size() const { return static_cast<int>(pairs.size()); }
};

/// Calibrated curvature operator matrix over the pair basis (2 R_ijkl).
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> operator_matrix(
    const CurvatureTensor<S>& rm, const PairBasis& pb) {
  const int N = pb.size();
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> t(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      t(a, b) = S(2) * rm(pb.pairs[a].first, pb.pairs[a].second,
                          pb.pairs[b].first, pb.pairs[b].second);
  return t;
}

/// Map a symmetric pair-basis matrix back to index form (inverse of the
/// factor-2 calibration), extending by the curvature antisymmetries.
template <typename S>
CurvatureTensor<S> tensor_from_operator_matrix(
    const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& t,
    const PairBasis& pb) {
  CurvatureTensor<S> rm(pb.n);
  const int N = pb.size();
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const auto [i, j] = pb.pairs[a];
      const auto [k, l] = pb.pairs[b];
      const S v = t(a, b) / S(2);
      rm.at(i, j, k, l) = v;
      rm.at(j, i, k, l) = -v;
      rm.at(i, j, l, k) = -v;
      rm.at(j, i, l, k) = v;
    }
  return rm;
}

/// Bivector coordinates of x ^ y in the pair basis.
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, 1> wedge(
    const Eigen::Matrix<S, Eigen::Dynamic, 1>& x,
    const Eigen::Matrix<S, Eigen::Dynamic, 1>& y, const PairBasis& pb) {
  Eigen::Matrix<S, Eigen::Dynamic, 1> v(pb.size());
  for (int a = 0; a < pb.size(); ++a) {
    const auto [i, j] = pb.pairs[a];
    v[a] = x[i] * y[j] - x[j] * y[i];
  }
  return v;
}

}  // namespace curv

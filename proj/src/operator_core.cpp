#include "lindscat/operator_core.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace lindscat {

namespace {

Eigen::JacobiSVD<Mat> svd_of(const Mat& a, unsigned options = 0) {
  return Eigen::JacobiSVD<Mat>(a, options);
}

bool is_normal(const Mat& a) {
  const double n2 = a.squaredNorm();
  if (n2 == 0.0) return true;
  return (a * a.adjoint() - a.adjoint() * a).norm() <= 1e-12 * n2;
}

bool is_hermitian(const Mat& a) {
  const double n = a.norm();
  return (a - a.adjoint()).norm() <= 1e-13 * std::max(1.0, n);
}

}  // namespace

double trace_norm(const Mat& a) { return svd_of(a).singularValues().sum(); }

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return svd_of(a).singularValues()(0);
}

double min_singular(const Mat& a) {
  const auto sv = svd_of(a).singularValues();
  return sv(sv.size() - 1);
}

double min_eig_hermitian(const Mat& a) {
  Mat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Mat expm(const Mat& m) {
  if (m.rows() != m.cols()) throw dimension_error("expm: non-square input");
  if (is_normal(m)) {
    // Schur vectors are unitary even for degenerate spectra; for a normal
    // input T is diagonal up to roundoff
    Eigen::ComplexSchur<Mat> schur(m);
    const Mat& t = schur.matrixT();
    Mat offdiag = t;
    offdiag.diagonal().setZero();
    if (offdiag.norm() <= 1e-11 * std::max(1.0, t.norm())) {
      Vec e = t.diagonal();
      for (int i = 0; i < e.size(); ++i) e[i] = std::exp(e[i]);
      return schur.matrixU() * e.asDiagonal() * schur.matrixU().adjoint();
    }
  }
  return m.exp();
}

Mat op_exp(const Mat& a, double t, double norm_cap) {
  if (a.rows() != a.cols()) throw dimension_error("op_exp: non-square input");
  Mat r = expm(Mat(-kI * t * a));
  if (!r.allFinite() || r.norm() > norm_cap)
    throw growth_cap_error("op_exp: propagator norm exceeded cap (runaway growth)");
  return r;
}

Propagator::Propagator(Mat a, double norm_cap) : a_(std::move(a)), cap_(norm_cap) {
  hermitian_ = is_hermitian(a_);
  if (hermitian_) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a_);
    u_ = es.eigenvectors();
    eig_ = es.eigenvalues().cast<Complex>();
    normal_ = true;
    return;
  }
  if (is_normal(a_)) {
    Eigen::ComplexSchur<Mat> schur(a_);
    Mat t = schur.matrixT();
    Mat offdiag = t;
    offdiag.diagonal().setZero();
    if (offdiag.norm() <= 1e-11 * std::max(1.0, t.norm())) {
      u_ = schur.matrixU();
      eig_ = t.diagonal();
      normal_ = true;
    }
  }
}

Mat Propagator::at(double t) const {
  if (normal_) {
    Vec ph(eig_.size());
    for (int i = 0; i < eig_.size(); ++i) ph[i] = std::exp(-kI * t * eig_[i]);
    Mat r = u_ * ph.asDiagonal() * u_.adjoint();
    if (!r.allFinite() || r.norm() > cap_)
      throw growth_cap_error("Propagator: norm cap exceeded");
    return r;
  }
  return op_exp(a_, t, cap_);
}

Vec stack(const Mat& x) {
  const int d = static_cast<int>(x.rows());
  Vec v(d * x.cols());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < x.cols(); ++j) v[i * x.cols() + j] = x(i, j);
  return v;
}

Mat unstack(const Vec& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw dimension_error("unstack: size mismatch");
  Mat x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = v[i * dim + j];
  return x;
}

SuperOp SuperOp::compose(const SuperOp& rhs) const {
  if (hdim != rhs.hdim) throw dimension_error("SuperOp::compose: dimension mismatch");
  return {hdim, m * rhs.m};
}

SuperOp left_right_superop(const Mat& l, const Mat& r) {
  if (l.rows() != l.cols() || r.rows() != r.cols() || l.rows() != r.rows())
    throw dimension_error("left_right_superop: dimension mismatch");
  SuperOp s;
  s.hdim = static_cast<int>(l.rows());
  s.m = Eigen::kroneckerProduct(l, r.transpose());
  return s;
}

SuperOp identity_superop(int dim) {
  return {dim, Mat::Identity(dim * dim, dim * dim)};
}

Mat choi(const SuperOp& s) {
  const int d = s.hdim;
  Mat c = Mat::Zero(d * d, d * d);
  Mat e = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      e(j, k) = 1.0;
      Mat img = s.apply(e);
      e(j, k) = 0.0;
      c.block(j * d, k * d, d, d) = img;
    }
  }
  return c;
}

namespace {

// Swap the diagonal entries of the 2x2 upper-triangular block at position p of
// T by a unitary similarity; U accumulates.
void schur_swap(Mat& t, Mat& u, int p) {
  const Complex a = t(p, p), b = t(p + 1, p + 1), c = t(p, p + 1);
  Mat g(2, 2);
  const Complex x1 = c, x2 = b - a;
  const double nx = std::sqrt(std::norm(x1) + std::norm(x2));
  if (nx < 1e-300) {  // equal eigenvalues, diagonal block: plain permutation
    g << 0, 1, 1, 0;
  } else {
    g << x1 / nx, -std::conj(x2) / nx, x2 / nx, std::conj(x1) / nx;
  }
  const int n = static_cast<int>(t.rows());
  t.block(p, 0, 2, n) = g.adjoint() * t.block(p, 0, 2, n);
  t.block(0, p, n, 2) = t.block(0, p, n, 2) * g;
  u.block(0, p, n, 2) = u.block(0, p, n, 2) * g;
  t(p + 1, p) = 0.0;  // enforce triangularity of the touched subdiagonal entry
}

}  // namespace

InvariantSubspace invariant_subspace(const Mat& a,
                                     const std::function<bool(Complex)>& select,
                                     double tol) {
  if (a.rows() != a.cols()) throw dimension_error("invariant_subspace: non-square");
  if (!(tol > 0)) throw std::invalid_argument("invariant_subspace: tol must be > 0");
  const int n = static_cast<int>(a.rows());
  const double scale = std::max(1.0, a.norm());

  Eigen::ComplexSchur<Mat> schur(a);
  Mat t = schur.matrixT();
  Mat u = schur.matrixU();

  std::vector<bool> sel(n);
  for (int i = 0; i < n; ++i) sel[i] = select(t(i, i));

  InvariantSubspace out;
  out.min_cross_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (sel[i] && !sel[j])
        out.min_cross_gap = std::min(out.min_cross_gap, std::abs(t(i, i) - t(j, j)));
  if (std::isfinite(out.min_cross_gap) && out.min_cross_gap <= tol * scale)
    out.boundary_straddle = true;

  // Stable bubble: move selected eigenvalues to the leading positions.
  bool moved = true;
  while (moved) {
    moved = false;
    for (int p = 0; p + 1 < n; ++p) {
      if (!sel[p] && sel[p + 1]) {
        schur_swap(t, u, p);
        std::swap(sel[p], sel[p + 1]);
        moved = true;
      }
    }
  }

  int k = 0;
  while (k < n && sel[k]) ++k;
  out.basis.dim = n;
  out.basis.vectors = u.leftCols(k);
  out.eigenvalues.reserve(k);
  for (int i = 0; i < k; ++i) out.eigenvalues.push_back(t(i, i));

  if (k > 0 && k < n) {
    Mat p = out.basis.projector();
    Mat res = (Mat::Identity(n, n) - p) * a * p;
    out.invariance_residual = res.norm() / scale;
  }
  return out;
}

std::vector<double> principal_angles(const SubspaceBasis& u, const SubspaceBasis& v) {
  if (u.dim != v.dim) throw dimension_error("principal_angles: ambient dim mismatch");
  if (u.rank() == 0 || v.rank() == 0) return {};
  const SubspaceBasis& small_ = (u.rank() <= v.rank()) ? u : v;
  const SubspaceBasis& large_ = (u.rank() <= v.rank()) ? v : u;

  Mat m = small_.vectors.adjoint() * large_.vectors;
  auto cosines = svd_of(m).singularValues();
  // sine route for the small angles: singular values of (I - P_large) small
  Mat residual = small_.vectors - large_.vectors * (large_.vectors.adjoint() * small_.vectors);
  auto sines = svd_of(residual).singularValues();  // descending

  const int k = static_cast<int>(cosines.size());
  std::vector<double> angles(k);
  for (int i = 0; i < k; ++i) {
    double c = std::min(1.0, std::max(-1.0, cosines(i)));
    double ang = std::acos(c);
    if (ang < 0.7) {
      // cosines descending <-> angles ascending; sines give the same angle list
      // descending, so pair cosines(i) with sines(k-1-i).
      double s = std::min(1.0, std::max(0.0, sines(k - 1 - i)));
      ang = std::asin(s);
    }
    angles[i] = ang;
  }
  std::sort(angles.rbegin(), angles.rend());
  return angles;
}

SubspaceBasis range_basis(const Mat& a, double rel_tol) {
  SubspaceBasis b;
  b.dim = static_cast<int>(a.rows());
  if (a.size() == 0) {
    b.vectors = Mat::Zero(b.dim, 0);
    return b;
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = (sv.size() ? sv(0) : 0.0) * rel_tol;
  int r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  b.vectors = svd.matrixU().leftCols(r);
  return b;
}

SubspaceBasis kernel_basis(const Mat& a, double rel_tol) {
  SubspaceBasis b;
  b.dim = static_cast<int>(a.cols());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = (sv.size() ? sv(0) : 0.0) * rel_tol;
  int r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  b.vectors = svd.matrixV().rightCols(b.dim - r);
  return b;
}

SubspaceBasis subspace_sum(const std::vector<SubspaceBasis>& parts, double rel_tol) {
  int dim = 0;
  int total = 0;
  for (const auto& p : parts) {
    if (p.dim) dim = p.dim;
    total += p.rank();
  }
  SubspaceBasis b;
  b.dim = dim;
  if (total == 0) {
    b.vectors = Mat::Zero(dim, 0);
    return b;
  }
  Mat cat(dim, total);
  int c = 0;
  for (const auto& p : parts) {
    if (p.rank() == 0) continue;
    cat.middleCols(c, p.rank()) = p.vectors;
    c += p.rank();
  }
  return range_basis(cat, rel_tol);
}

SubspaceBasis subspace_intersection(const SubspaceBasis& u, const SubspaceBasis& v,
                                    double tol) {
  // x in U∩V  <=>  x ⟂ U^⊥ and x ⟂ V^⊥  <=>  [(I-Pu); (I-Pv)] x = 0
  const int n = u.dim;
  Mat stack_(2 * n, n);
  stack_.topRows(n) = Mat::Identity(n, n) - u.projector();
  stack_.bottomRows(n) = Mat::Identity(n, n) - v.projector();
  Eigen::JacobiSVD<Mat> svd(stack_, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  SubspaceBasis b;
  b.dim = n;
  b.vectors = svd.matrixV().rightCols(n - r);
  return b;
}

SubspaceBasis orthogonal_complement(const SubspaceBasis& u) {
  const int n = u.dim;
  Mat p = Mat::Identity(n, n) - u.projector();
  return range_basis(p, 1e-8);
}

SubspaceBasis full_basis(int dim) {
  SubspaceBasis b;
  b.dim = dim;
  b.vectors = Mat::Identity(dim, dim);
  return b;
}

}  // namespace lindscat

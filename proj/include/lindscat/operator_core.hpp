#pragma once

#include <functional>
#include <optional>

#include "lindscat/types.hpp"

namespace lindscat {

// ---------------------------------------------------------------------------
// Norms and spectra
// ---------------------------------------------------------------------------

// Sum of singular values.
double trace_norm(const Mat& a);

// Largest singular value.
double op_norm(const Mat& a);

// Smallest singular value; strictly positive iff injective.
double min_singular(const Mat& a);

// Smallest eigenvalue of the Hermitian part (a + a*)/2.
double min_eig_hermitian(const Mat& a);

// ---------------------------------------------------------------------------
// Exponentials
// ---------------------------------------------------------------------------

// Plain matrix exponential e^M. Scaling-and-squaring (Padé) core; spectral
// shortcut when M is normal.
Mat expm(const Mat& m);

// e^{-itA}. Spectral route for normal A (detected by ||AA*-A*A|| <= 1e-12 ||A||^2),
// scaling-and-squaring on -itA otherwise. Throws growth_cap_error when the
// result norm exceeds norm_cap.
Mat op_exp(const Mat& a, double t, double norm_cap = 1e12);

// Repeated-t evaluation helper: factorizes once, then e^{-itA} per call.
class Propagator {
 public:
  explicit Propagator(Mat a, double norm_cap = 1e12);
  Mat at(double t) const;
  const Mat& generator() const { return a_; }

 private:
  Mat a_;
  double cap_;
  bool hermitian_ = false;
  bool normal_ = false;
  // normal path: a = u diag(eig) u*
  Mat u_;
  Vec eig_;
};

// ---------------------------------------------------------------------------
// Superoperators (column-stacked, row-major semantic indexing)
//
// stack(X)[i*d + j] = X(i, j); the convention is pinned by
//   stack(A X B) = (A (x) B^T) stack(X),
// verified by test. Every Lindbladian sign below depends on it.
// ---------------------------------------------------------------------------

Vec stack(const Mat& x);
Mat unstack(const Vec& v, int dim);

struct SuperOp {
  int hdim = 0;  // Hilbert dimension d; matrix m is d^2 x d^2
  Mat m;

  Mat apply(const Mat& x) const { return unstack(m * stack(x), hdim); }
  SuperOp compose(const SuperOp& rhs) const;  // this ∘ rhs
};

// Realizes X -> L X R.
SuperOp left_right_superop(const Mat& l, const Mat& r);

// Identity map on d x d operators.
SuperOp identity_superop(int dim);

// Choi matrix sum_{jk} |j><k| (x) S(|j><k|); PSD iff S completely positive.
Mat choi(const SuperOp& s);

// ---------------------------------------------------------------------------
// Invariant subspaces and subspace geometry
// ---------------------------------------------------------------------------

struct SubspaceBasis {
  int dim = 0;        // ambient dimension
  Mat vectors;        // dim x k, orthonormal columns (k may be 0)
  int rank() const { return static_cast<int>(vectors.cols()); }
  Mat projector() const { return vectors * vectors.adjoint(); }
};

struct InvariantSubspace {
  SubspaceBasis basis;
  std::vector<Complex> eigenvalues;  // selected eigenvalues (Schur order)
  bool boundary_straddle = false;    // selected/unselected eigenvalues within tol
  double min_cross_gap = 0.0;        // smallest |λ_sel - λ_unsel|
  double invariance_residual = 0.0;  // ||(I-P) A P|| / ||A||
};

// Orthonormal basis of the A-invariant subspace spanned by (generalized)
// eigenvectors whose eigenvalues satisfy `select`; ordered unitary
// triangularization, no Jordan forms. Clustering trouble (a selected and an
// unselected eigenvalue closer than tol·scale) is reported, not resolved.
InvariantSubspace invariant_subspace(const Mat& a,
                                     const std::function<bool(Complex)>& select,
                                     double tol);

// Nonincreasing principal angles in [0, pi/2]; all ~0 iff subspaces equal
// (when dimensions match). Cosine route with sine refinement for small angles.
std::vector<double> principal_angles(const SubspaceBasis& u, const SubspaceBasis& v);

// Column space of A with singular values below rel_tol * sigma_max treated as zero.
SubspaceBasis range_basis(const Mat& a, double rel_tol = 1e-8);

// Null space of A with the same thresholding.
SubspaceBasis kernel_basis(const Mat& a, double rel_tol = 1e-8);

// Orthonormal basis of the column span of the (not necessarily orthogonal)
// concatenation of the given bases.
SubspaceBasis subspace_sum(const std::vector<SubspaceBasis>& parts, double rel_tol = 1e-10);

// Orthonormal basis of the intersection of two subspaces.
SubspaceBasis subspace_intersection(const SubspaceBasis& u, const SubspaceBasis& v,
                                    double tol = 1e-8);

SubspaceBasis orthogonal_complement(const SubspaceBasis& u);

SubspaceBasis full_basis(int dim);

}  // namespace lindscat

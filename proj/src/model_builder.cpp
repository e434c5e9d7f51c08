#include "lindscat/model_builder.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace lindscat {

RVec lattice_coords(int sites, double spacing) {
  RVec x(sites);
  for (int k = 0; k < sites; ++k) x[k] = (k - 0.5 * (sites - 1)) * spacing;
  return x;
}

ScalarField field_gaussian(int sites, double spacing, double width, double amplitude) {
  RVec x = lattice_coords(sites, spacing);
  ScalarField f(sites);
  for (int k = 0; k < sites; ++k) f[k] = amplitude * std::exp(-x[k] * x[k] / (2 * width * width));
  return f;
}

ScalarField field_box(int sites, double spacing, double radius, double amplitude) {
  RVec x = lattice_coords(sites, spacing);
  ScalarField f(sites);
  for (int k = 0; k < sites; ++k) f[k] = (std::abs(x[k]) <= radius) ? amplitude : 0.0;
  return f;
}

ScalarField field_coulomb_cut(int sites, double spacing, double radius) {
  RVec x = lattice_coords(sites, spacing);
  ScalarField f(sites);
  for (int k = 0; k < sites; ++k) f[k] = 1.0 / std::max(std::abs(x[k]), radius);
  return f;
}

ScalarField field_constant(int sites, Complex value) {
  return ScalarField::Constant(sites, value);
}

Mat discrete_laplacian(int sites, double spacing, Boundary boundary) {
  if (sites < 2) throw std::invalid_argument("discrete_laplacian: need >= 2 sites");
  if (!(spacing > 0)) throw std::invalid_argument("discrete_laplacian: spacing must be > 0");
  Mat lap = Mat::Zero(sites, sites);
  const double inv_h2 = 1.0 / (spacing * spacing);
  for (int k = 0; k < sites; ++k) {
    lap(k, k) = 2.0 * inv_h2;
    if (k + 1 < sites) lap(k, k + 1) = -inv_h2;
    if (k - 1 >= 0) lap(k, k - 1) = -inv_h2;
  }
  if (boundary == Boundary::periodic) {
    lap(0, sites - 1) = -inv_h2;
    lap(sites - 1, 0) = -inv_h2;
  }
  return lap;
}

Mat discrete_laplacian_nd(int sites_per_axis, double spacing, Boundary boundary, int dims) {
  if (dims < 1 || dims > 3)
    throw std::invalid_argument("discrete_laplacian_nd: dims must be 1..3");
  Mat lap1 = discrete_laplacian(sites_per_axis, spacing, boundary);
  const int n = sites_per_axis;
  Mat total;
  for (int axis = 0; axis < dims; ++axis) {
    Mat term = Mat::Identity(1, 1);
    for (int k = 0; k < dims; ++k) {
      const Mat& factor = (k == axis) ? lap1 : Mat(Mat::Identity(n, n));
      term = Eigen::kroneckerProduct(term, factor).eval();
    }
    total = (axis == 0) ? term : Mat(total + term);
  }
  return total;
}

Mat momentum_operator_site(int sites, double spacing, Boundary boundary) {
  if (sites < 3) throw std::invalid_argument("momentum_operator: need >= 3 sites");
  Mat p = Mat::Zero(sites, sites);
  const Complex c = -kI / (2.0 * spacing);
  for (int k = 0; k < sites; ++k) {
    if (k + 1 < sites) p(k, k + 1) = c;
    if (k - 1 >= 0) p(k, k - 1) = -c;
  }
  if (boundary == Boundary::periodic) {
    p(sites - 1, 0) = c;
    p(0, sites - 1) = -c;
  }
  return p;
}

SpinTriple spin_matrices(int two_s) {
  if (two_s < 1) throw std::invalid_argument("spin_matrices: two_s must be >= 1");
  const int d = two_s + 1;
  const double s = 0.5 * two_s;
  Mat sp = Mat::Zero(d, d);  // raising operator in the basis m = s, s-1, ..., -s
  for (int i = 1; i < d; ++i) {
    const double m = s - i;  // S+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>
    sp(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  Mat sm = sp.adjoint();
  SpinTriple t;
  t.sx = 0.5 * (sp + sm);
  t.sy = -0.5 * kI * (sp - sm);
  t.sz = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) t.sz(i, i) = s - i;
  return t;
}

Mat LatticeModel::lift_site_diag(const ScalarField& f) const {
  if (f.size() != sites) throw dimension_error("lift_site_diag: field length != sites");
  Mat diag = f.asDiagonal();
  return Eigen::kroneckerProduct(diag, Mat::Identity(internal_dim, internal_dim));
}

Mat LatticeModel::position_operator() const {
  RVec x = coords();
  return lift_site_diag(x.cast<Complex>());
}

Mat LatticeModel::momentum_operator() const {
  Mat p = momentum_operator_site(sites, spacing, boundary);
  return Eigen::kroneckerProduct(p, Mat::Identity(internal_dim, internal_dim));
}

LatticeModel make_lattice_model(int sites, double spacing, Boundary boundary,
                                int internal_dim, const Mat& h_int) {
  LatticeModel m;
  m.sites = sites;
  m.spacing = spacing;
  m.boundary = boundary;
  m.internal_dim = internal_dim;
  m.h_int = h_int.size() ? h_int : Mat::Zero(internal_dim, internal_dim);
  if (m.h_int.rows() != internal_dim)
    throw dimension_error("make_lattice_model: h_int dimension != internal_dim");
  if (min_eig_hermitian(m.h_int) < -1e-10)
    throw std::invalid_argument("make_lattice_model: H_int must be PSD");
  Mat lap = discrete_laplacian(sites, spacing, boundary);
  m.h0 = Eigen::kroneckerProduct(lap, Mat::Identity(internal_dim, internal_dim)) +
         Eigen::kroneckerProduct(Mat::Identity(sites, sites), m.h_int);
  return m;
}

Mat position_multiplier(const ScalarField& f, const LatticeModel& model) {
  return model.lift_site_diag(f);
}

Mat coupling_position(const ScalarField& g, const LatticeModel& model) {
  RVec x = model.coords();
  ScalarField gx(model.sites);
  for (int k = 0; k < model.sites; ++k) gx[k] = g[k] * x[k];
  return model.lift_site_diag(gx);
}

Mat coupling_spin(const ScalarField& g, const Mat& s, const LatticeModel& model) {
  if (s.rows() != model.internal_dim)
    throw dimension_error("coupling_spin: spin operator dim != internal_dim");
  Mat diag = g.asDiagonal();
  return Eigen::kroneckerProduct(diag, s);
}

Mat coupling_mixed(const ScalarField& g, const std::function<Complex(double)>& f,
                   Complex alpha, Complex beta, const LatticeModel& model) {
  Mat p = model.momentum_operator();
  Eigen::SelfAdjointEigenSolver<Mat> es(p);
  Vec fe(es.eigenvalues().size());
  for (int i = 0; i < fe.size(); ++i) fe[i] = f(es.eigenvalues()(i));
  Mat f_of_p = es.eigenvectors() * fe.asDiagonal() * es.eigenvectors().adjoint();
  Mat x = model.position_operator();
  Mat g_of_x = model.lift_site_diag(g);
  Mat half = g_of_x * (alpha * x + beta * p) * f_of_p;
  return half + half.adjoint();
}

Mat zeeman_hamiltonian(const std::array<ScalarField, 3>& b_field, double beta,
                       const SpinTriple& spin, const LatticeModel& model) {
  const Mat* s[3] = {&spin.sx, &spin.sy, &spin.sz};
  Mat h = Mat::Zero(model.dim(), model.dim());
  for (int j = 0; j < 3; ++j) {
    Mat diag = b_field[j].asDiagonal();
    h += beta * Eigen::kroneckerProduct(diag, *s[j]);
  }
  return h;
}

double rollnik_norm(const ScalarField& d, const LatticeModel& model) {
  if (d.size() != model.sites) throw dimension_error("rollnik_norm: field length != sites");
  RVec x = model.coords();
  const double h2 = model.spacing * model.spacing;
  double sum = 0.0;
  for (int k = 0; k < model.sites; ++k) {
    for (int l = 0; l < model.sites; ++l) {
      if (k == l) continue;
      const double dx = x[k] - x[l];
      sum += std::abs(d[k]) * std::abs(d[l]) / (dx * dx) * h2;
    }
  }
  return std::sqrt(sum);
}

CorollaryVerdict corollary_condition(const ScalarField& g1, const ScalarField& g2,
                                     const ScalarField& g3, double s_norm,
                                     const LatticeModel& model) {
  const double h = model.spacing;
  double linf = 0.0, l32 = 0.0;
  for (int k = 0; k < model.sites; ++k) {
    const double gsum = std::abs(g1[k]) + std::abs(g2[k]) + std::abs(g3[k]);
    linf = std::max(linf, gsum);
    l32 += std::pow(gsum, 1.5) * h;
  }
  l32 = std::pow(l32, 2.0 / 3.0);

  CorollaryVerdict v;
  v.lhs = std::sqrt(linf) * std::sqrt(l32);
  const double base = std::pow(kPi, 1.0 / 3.0) / (3.0 * s_norm);
  v.existence_threshold = base * std::pow(std::pow(2.0, 19) / 3.0, 1.0 / 6.0);
  v.completeness_threshold = base * std::pow(std::pow(2.0, 19) / std::pow(3.0, 13), 1.0 / 6.0);
  v.existence = v.lhs < v.existence_threshold;
  v.completeness = v.lhs < v.completeness_threshold;
  return v;
}

std::vector<Vec> scattering_probes(const LatticeModel& model, double sigma,
                                   double center_offset, bool incoming) {
  const int n = model.sites, di = model.internal_dim;
  RVec x = model.coords();
  const double k0 = kPi / (2.0 * model.spacing);  // maximal group speed

  std::vector<Vec> probes;
  for (double dir : {+1.0, -1.0}) {
    const double kdir = incoming ? dir : -dir;
    Vec site(n);
    for (int k = 0; k < n; ++k) {
      const double dx = x[k] + dir * center_offset * model.spacing;
      site[k] = std::exp(Complex(-dx * dx / (4 * sigma * sigma), kdir * k0 * x[k]));
    }
    site /= site.norm();
    for (int c = 0; c < di; ++c) {
      Vec full = Vec::Zero(n * di);
      for (int k = 0; k < n; ++k) full[k * di + c] = site[k];
      probes.push_back(full);
    }
  }
  return probes;
}

}  // namespace lindscat

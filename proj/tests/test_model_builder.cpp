#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "lindscat/model_builder.hpp"

using namespace lindscat;

TEST_CASE("discrete laplacian small cases") {
  Mat l2 = discrete_laplacian(2, 1.0, Boundary::dirichlet);
  Mat expect(2, 2);
  expect << 2, -1, -1, 2;
  CHECK((l2 - expect).norm() < 1e-14);

  Mat l3 = discrete_laplacian(3, 1.0, Boundary::periodic);
  Eigen::SelfAdjointEigenSolver<Mat> es(l3);
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(es.eigenvalues()(1) == doctest::Approx(3.0));
  CHECK(es.eigenvalues()(2) == doctest::Approx(3.0));
}

TEST_CASE("laplacian 1/h^2 scaling and positivity") {
  for (auto boundary : {Boundary::dirichlet, Boundary::periodic}) {
    Mat a = discrete_laplacian(10, 1.0, boundary);
    Mat b = discrete_laplacian(10, 0.5, boundary);
    CHECK((4.0 * a - b).norm() < 1e-12);
    for (int n : {2, 7, 33, 64})
      CHECK(min_eig_hermitian(discrete_laplacian(n, 1.0, boundary)) >= -1e-12);
  }
}

TEST_CASE("position multiplier") {
  LatticeModel m = make_lattice_model(3, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  CHECK((position_multiplier(field_constant(3, 1.0), m) - Mat::Identity(3, 3)).norm() < 1e-14);

  RVec x = m.coords();
  CHECK(x[0] == doctest::Approx(-1.0));
  CHECK(x[1] == doctest::Approx(0.0));
  CHECK(x[2] == doctest::Approx(1.0));
  ScalarField f(3);
  for (int k = 0; k < 3; ++k) f[k] = x[k];
  Mat pos = position_multiplier(f, m);
  CHECK(std::abs(pos(0, 0) - Complex(-1.0)) < 1e-14);
  CHECK(std::abs(pos(2, 2) - Complex(1.0)) < 1e-14);

  // pointwise product of diagonal fields
  ScalarField g = field_gaussian(3, 1.0, 1.0, 1.0);
  ScalarField fg(3);
  for (int k = 0; k < 3; ++k) fg[k] = f[k] * g[k];
  Mat lhs = position_multiplier(fg, m);
  Mat rhs = position_multiplier(f, m) * position_multiplier(g, m);
  CHECK((lhs - rhs).norm() < 1e-13);
}

TEST_CASE("momentum operator") {
  Mat p = momentum_operator_site(8, 1.0, Boundary::periodic);
  CHECK((p - p.adjoint()).norm() == 0.0);

  // plane wave eigenvector on the periodic lattice
  const int n = 8;
  const double theta = 2.0 * kPi * 3 / n;
  Vec wave(n);
  for (int k = 0; k < n; ++k) wave[k] = std::exp(kI * theta * double(k));
  Vec pw = p * wave;
  CHECK((pw - std::sin(theta) * wave).norm() < 1e-12);

  // [X, P] = i on interior sites for smooth vectors, O(h^2)
  const int big = 64;
  const double h = 0.25;
  LatticeModel m = make_lattice_model(big, h, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  Mat x = m.position_operator();
  Mat pp = m.momentum_operator();
  RVec coords = m.coords();
  Vec gauss(big);
  for (int k = 0; k < big; ++k)
    gauss[k] = std::exp(-coords[k] * coords[k] / 4.0) * std::exp(kI * 0.7 * coords[k]);
  gauss /= gauss.norm();
  Vec comm = x * (pp * gauss) - pp * (x * gauss);
  for (int k = big / 4; k < 3 * big / 4; ++k)
    CHECK(std::abs(comm[k] - kI * gauss[k]) < 0.2 * h * h + 1e-8);
}

TEST_CASE("spin matrices") {
  SpinTriple half = spin_matrices(1);
  Mat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 0.5, 0.5, 0;
  sy << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
  sz << 0.5, 0, 0, -0.5;
  CHECK((half.sx - sx).norm() < 1e-14);
  CHECK((half.sy - sy).norm() < 1e-14);
  CHECK((half.sz - sz).norm() < 1e-14);

  for (int two_s : {1, 2, 3}) {
    SpinTriple s = spin_matrices(two_s);
    Mat comm = s.sx * s.sy - s.sy * s.sx;
    CHECK((comm - kI * s.sz).norm() < 1e-12);
    const double spin = 0.5 * two_s;
    Mat casimir = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
    CHECK((casimir - spin * (spin + 1) * Mat::Identity(two_s + 1, two_s + 1)).norm() < 1e-12);
  }
}

TEST_CASE("coupling builders") {
  LatticeModel m = make_lattice_model(9, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  CHECK(coupling_position(field_constant(9, 0.0), m).norm() == 0.0);
  RVec x = m.coords();
  Mat cx = coupling_position(field_constant(9, 1.0), m);
  CHECK((cx - m.position_operator()).norm() < 1e-13);

  // gaussian envelope: |x| e^{-x^2/2w^2} peaks near x = w
  ScalarField g = field_gaussian(9, 1.0, 1.0, 1.0);
  Mat c = coupling_position(g, m);
  int argmax = 0;
  double best = 0;
  for (int k = 0; k < 9; ++k)
    if (std::abs(c(k, k)) > best) {
      best = std::abs(c(k, k));
      argmax = k;
    }
  CHECK(std::abs(std::abs(x[argmax]) - 1.0) <= 0.5 + 1e-12);
}

TEST_CASE("spin coupling") {
  Mat h_int = Mat::Zero(2, 2);
  LatticeModel m = make_lattice_model(3, 1.0, Boundary::dirichlet, 2, h_int);
  SpinTriple s = spin_matrices(1);
  Mat c = coupling_spin(field_constant(3, 1.0), s.sz, m);
  Mat expect = Eigen::kroneckerProduct(Mat::Identity(3, 3), s.sz).eval();
  CHECK((c - expect).norm() < 1e-14);

  ScalarField g = field_gaussian(3, 1.0, 0.8, 1.3);
  Mat cg = coupling_spin(g, s.sz, m);
  double gmax = 0;
  for (int k = 0; k < 3; ++k) gmax = std::max(gmax, std::abs(g[k]));
  CHECK(op_norm(cg) == doctest::Approx(gmax * op_norm(s.sz)).epsilon(1e-12));

  // C*C = diag(|g|^2) (x) S*S entrywise
  Mat lhs = cg.adjoint() * cg;
  ScalarField g2(3);
  for (int k = 0; k < 3; ++k) g2[k] = std::norm(g[k]);
  Mat rhs = Eigen::kroneckerProduct(Mat(g2.asDiagonal()), Mat(s.sz.adjoint() * s.sz)).eval();
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("mixed coupling is Hermitian by construction") {
  LatticeModel m = make_lattice_model(8, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1));
  ScalarField g = field_gaussian(8, 1.0, 1.5, 0.6);
  auto f = [](double p) { return Complex(std::exp(-p * p), 0.0); };
  Mat c = coupling_mixed(g, f, Complex(0.4, 0.2), Complex(0.1, -0.3), m);
  CHECK((c - c.adjoint()).norm() < 1e-12);

  Mat zero = coupling_mixed(field_constant(8, 0.0), f, Complex(1, 0), Complex(0, 1), m);
  CHECK(zero.norm() < 1e-14);

  // beta = 0, f = 1: C = g X alpha + h.c. = 2 Re(alpha) g(X) X for commuting diagonals
  auto one = [](double) { return Complex(1.0, 0.0); };
  Mat c2 = coupling_mixed(g, one, Complex(0.7, 0.0), Complex(0.0, 0.0), m);
  Mat expect = 2.0 * 0.7 * coupling_position(g, m);
  CHECK((c2 - expect).norm() < 1e-11);
}

TEST_CASE("zeeman term") {
  Mat h_int = Mat::Zero(2, 2);
  LatticeModel m = make_lattice_model(4, 1.0, Boundary::dirichlet, 2, h_int);
  SpinTriple s = spin_matrices(1);
  std::array<ScalarField, 3> zero = {field_constant(4, 0.0), field_constant(4, 0.0),
                                     field_constant(4, 0.0)};
  CHECK(zeeman_hamiltonian(zero, 2.0, s, m).norm() == 0.0);

  std::array<ScalarField, 3> bz = {field_constant(4, 0.0), field_constant(4, 0.0),
                                   field_constant(4, 1.0)};
  Mat z = zeeman_hamiltonian(bz, 1.7, s, m);
  Mat expect = 1.7 * Eigen::kroneckerProduct(Mat::Identity(4, 4), s.sz).eval();
  CHECK((z - expect).norm() < 1e-13);

  Rng rng(21);
  std::array<ScalarField, 3> rnd;
  for (auto& f : rnd) {
    f = ScalarField(4);
    for (int k = 0; k < 4; ++k) f[k] = rng.normal();
  }
  Mat h = zeeman_hamiltonian(rnd, 0.9, s, m);
  CHECK((h - h.adjoint()).norm() < 1e-12);
}

TEST_CASE("rollnik norm") {
  LatticeModel m = make_lattice_model(6, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  CHECK(rollnik_norm(field_constant(6, 0.0), m) == 0.0);

  // two unit values one site apart: two cross terms of 1/1^2
  ScalarField two = field_constant(6, 0.0);
  two[2] = 1.0;
  two[3] = 1.0;
  CHECK(rollnik_norm(two, m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // invariant under absolute value and lattice reflection
  Rng rng(22);
  ScalarField f(6), fabsv(6), frev(6);
  for (int k = 0; k < 6; ++k) f[k] = rng.normal();
  for (int k = 0; k < 6; ++k) {
    fabsv[k] = std::abs(f[k]);
    frev[k] = f[5 - k];
  }
  CHECK(rollnik_norm(f, m) == doctest::Approx(rollnik_norm(fabsv, m)).epsilon(1e-12));
  CHECK(rollnik_norm(f, m) == doctest::Approx(rollnik_norm(frev, m)).epsilon(1e-12));
}

TEST_CASE("corollary thresholds") {
  LatticeModel m = make_lattice_model(8, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  ScalarField zero = field_constant(8, 0.0);
  auto v0 = corollary_condition(zero, zero, zero, 0.5, m);
  CHECK(v0.existence);
  CHECK(v0.completeness);

  ScalarField huge = field_constant(8, 1e6);
  auto v1 = corollary_condition(huge, huge, huge, 0.5, m);
  CHECK_FALSE(v1.existence);
  CHECK_FALSE(v1.completeness);

  // completeness threshold is always 1/9 of the existence threshold
  CHECK(v0.completeness_threshold / v0.existence_threshold ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("model builder invariants") {
  Mat h_int = Mat::Zero(2, 2);
  h_int(1, 1) = 0.4;
  LatticeModel m = make_lattice_model(6, 0.5, Boundary::periodic, 2, h_int);
  CHECK(m.dim() == 12);
  CHECK((m.h0 - m.h0.adjoint()).norm() < 1e-12);
  CHECK(min_eig_hermitian(m.h0) >= -1e-12);
  CHECK_THROWS(make_lattice_model(6, 0.5, Boundary::periodic, 2, Mat(-Mat::Identity(2, 2))));
}

TEST_CASE("scattering probes are normalized and span both directions") {
  LatticeModel m = make_lattice_model(16, 1.0, Boundary::periodic, 2, Mat::Zero(2, 2));
  auto probes = scattering_probes(m);
  CHECK(probes.size() == 4);
  for (const auto& p : probes) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tensor-power laplacian for tiny 3-D toys") {
  Mat l3 = discrete_laplacian_nd(3, 1.0, Boundary::dirichlet, 3);
  CHECK(l3.rows() == 27);
  CHECK((l3 - l3.adjoint()).norm() < 1e-13);
  CHECK(min_eig_hermitian(l3) >= -1e-12);
  // diagonal is 6/h^2 in 3-D
  CHECK(std::abs(l3(13, 13) - Complex(6.0)) < 1e-13);
  // 1-D case reduces to the plain builder
  Mat l1 = discrete_laplacian_nd(5, 0.5, Boundary::periodic, 1);
  CHECK((l1 - discrete_laplacian(5, 0.5, Boundary::periodic)).norm() < 1e-14);
}

TEST_CASE("builder error paths") {
  LatticeModel m = make_lattice_model(4, 1.0, Boundary::dirichlet, 2, Mat::Zero(2, 2));
  SpinTriple s3 = spin_matrices(2);  // spin-1, dim 3 vs internal_dim 2
  CHECK_THROWS_AS(coupling_spin(field_constant(4, 1.0), s3.sz, m), dimension_error);
  CHECK_THROWS_AS(position_multiplier(field_constant(3, 1.0), m), dimension_error);
  CHECK_THROWS(discrete_laplacian(1, 1.0, Boundary::dirichlet));
  CHECK_THROWS(discrete_laplacian(8, -1.0, Boundary::dirichlet));
  CHECK_THROWS(momentum_operator_site(2, 1.0, Boundary::periodic));
  CHECK_THROWS(spin_matrices(0));
  CHECK_THROWS(discrete_laplacian_nd(3, 1.0, Boundary::dirichlet, 4));
  CHECK_THROWS_AS(rollnik_norm(field_constant(3, 1.0), m), dimension_error);
}

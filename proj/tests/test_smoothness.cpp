#include <doctest.h>

#include "lindscat/lindblad_engine.hpp"
#include "lindscat/model_builder.hpp"
#include "lindscat/smoothness.hpp"

using namespace lindscat;

TEST_CASE("gram operator basics") {
  // C = 0 -> zero matrix
  Mat h0 = Mat::Identity(3, 3);
  CHECK(gram_operator(h0, Mat::Zero(3, 3), TimeRange::half_line, 2.0, 0.01).norm() == 0.0);

  // A Hermitian, C = I: integrand constant = I, half line gives T I
  Mat g = gram_operator(h0, Mat::Identity(3, 3), TimeRange::half_line, 2.0, 0.01);
  CHECK((g - 2.0 * Mat::Identity(3, 3)).norm() < 1e-10);

  // 2x2 toy: A = sz, C = |0><1|: conjugation leaves |1><1| fixed -> G = T |1><1|
  Mat sz(2, 2);
  sz << 1, 0, 0, -1;
  Mat c = Mat::Zero(2, 2);
  c(0, 1) = 1.0;
  Mat toy = gram_operator(sz, c, TimeRange::half_line, 1.5, 0.005);
  Mat expect = Mat::Zero(2, 2);
  expect(1, 1) = 1.5;
  CHECK((toy - expect).norm() < 1e-10);
}

TEST_CASE("gram operator is PSD and monotone in T") {
  Rng rng(51);
  Mat h0 = rng.hermitian(4);
  Mat c = rng.matrix(4, 4);
  Mat g1 = gram_operator(h0, c, TimeRange::full_line, 1.0, 0.01);
  Mat g2 = gram_operator(h0, c, TimeRange::full_line, 2.0, 0.01);
  CHECK(min_eig_hermitian(g1) >= -1e-10);
  CHECK(min_eig_hermitian(Mat(g2 - g1)) >= -1e-10);
}

TEST_CASE("estimate_c0: zero coupling, eigenvector obstruction, refined-quadrature oracle") {
  LatticeModel m = make_lattice_model(8, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  CHECK(estimate_c0(m.h0, Mat::Zero(8, 8), 5.0, 0.02).value == 0.0);

  // C = I: integrand never decays; flagged not-converged
  SmoothnessEstimate flat = estimate_c0(m.h0, Mat::Identity(8, 8), 5.0, 0.02);
  CHECK_FALSE(flat.converged);

  // 2-site hopping with a one-sided coupling vs a 10x finer quadrature
  Mat h2(2, 2);
  h2 << 0, -1, -1, 0;
  Mat c2 = Mat::Zero(2, 2);
  c2(0, 0) = 0.3;
  SmoothnessEstimate coarse = estimate_c0(h2, c2, 4.0, 0.02);
  SmoothnessEstimate fine = estimate_c0(h2, c2, 4.0, 0.002);
  CHECK(std::abs(coarse.value - fine.value) <= 1e-3 * std::max(1.0, fine.value));

  // every finite Hermitian H0 has eigenvectors the coupling sees, so the
  // true c0 diverges and the window estimate must say so: the decay flag
  // fires and no tail extrapolation is reported
  LatticeModel big = make_lattice_model(20, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  Mat cl = big.lift_site_diag(field_gaussian(20, 1.0, 1.0, 0.2));
  SmoothnessEstimate windowed = estimate_c0(big.h0, cl, 8.0, 0.02);
  CHECK_FALSE(windowed.converged);
  CHECK_FALSE(windowed.tail_bound.has_value());
  CHECK(windowed.value > 0.0);
}

TEST_CASE("estimate_c_tilde0: total absorption and route agreement") {
  CHECK(estimate_c_tilde0(Mat::Zero(2, 2), Mat::Zero(2, 2), 2.0, 0.01).value == 0.0);

  // H = -(i/2) C*C with C = I: pure decay e^{-t}, ctilde0 -> 1
  Mat c = Mat::Identity(2, 2);
  Mat h = dissipative_hamiltonian(Mat::Zero(2, 2), c);
  SmoothnessEstimate e = estimate_c_tilde0(h, c, 40.0, 0.01);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(e.value <= 1.0 + 1e-9);

  // random model: exact telescoped route vs trapezoid Gram route
  Rng rng(52);
  Mat h0 = rng.hermitian(5);
  h0 *= 1.0 / op_norm(h0);
  Mat cc = rng.matrix(5, 5);
  cc *= 0.5 / op_norm(cc);
  Mat hd = dissipative_hamiltonian(h0, cc);
  SmoothnessEstimate er = estimate_c_tilde0(hd, cc, 6.0, 0.002);
  REQUIRE(er.cross_value.has_value());
  CHECK(*er.route_disagreement <= 1e-3);
  CHECK(er.value <= 1.0 + 1e-9);
}

TEST_CASE("estimate_c_V basics") {
  LatticeModel m = make_lattice_model(6, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  Mat pi = Mat::Identity(6, 6);
  CHECK(estimate_c_V(m.h0, Mat::Zero(6, 6), pi, 3.0, 0.02).value == 0.0);
  CHECK(estimate_c_V(m.h0, Mat::Identity(6, 6), Mat::Zero(6, 6), 3.0, 0.02).value == 0.0);

  Mat c = m.lift_site_diag(field_gaussian(6, 1.0, 1.0, 0.4));
  SmoothnessEstimate coarse = estimate_c_V(m.h0, c, pi, 4.0, 0.02);
  SmoothnessEstimate fine = estimate_c_V(m.h0, c, pi, 4.0, 0.002);
  CHECK(std::abs(coarse.value - fine.value) <= 1e-3 * std::max(1.0, fine.value));
  // with Pi = I this is the full-line c0
  SmoothnessEstimate c0 = estimate_c0(m.h0, c, 4.0, 0.02);
  CHECK(coarse.value == doctest::Approx(c0.value).epsilon(1e-9));

  Mat site_proj = Mat::Zero(6, 6);
  site_proj(0, 0) = 1.0;  // does not commute with the hopping H0
  CHECK_THROWS(estimate_c_V(m.h0, c, site_proj, 4.0, 0.02));
}

TEST_CASE("resolvent smoothness: scalar divergence as eta -> 0") {
  // H0 = 0 (1x1), C = 1: ||C(R(z)-R(zbar))C|| = 2 eta/|z|^2, sup at Re z = 0 -> 2/eta
  Mat h0 = Mat::Zero(1, 1), c = Mat::Identity(1, 1);
  for (double eta : {0.5, 0.1, 0.02}) {
    ZGrid grid;
    grid.eta_min = eta;
    grid.points = {Complex(0.0, eta)};
    SmoothnessEstimate e = resolvent_smoothness(h0, c, grid);
    CHECK(e.value == doctest::Approx(2.0 / eta).epsilon(1e-10));
  }
}

TEST_CASE("resolvent c0 and supersmooth inequalities") {
  LatticeModel m = make_lattice_model(10, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  Mat c = m.lift_site_diag(field_gaussian(10, 1.0, 1.0, 0.3));
  ZGrid grid = default_z_grid(m.h0);
  SmoothnessEstimate cp = resolvent_smoothness(m.h0, c, grid);
  SmoothnessEstimate d0 = supersmooth_constant(m.h0, c, grid);
  CHECK(cp.value > 0.0);
  // triangle inequality on the two resolvents
  CHECK(d0.value >= 0.5 * cp.value - 1e-12);
  CHECK(supersmooth_constant(m.h0, Mat(Mat::Zero(10, 10)), grid).value == 0.0);
}

TEST_CASE("smoothness chain lemma bounds (windowed)") {
  LatticeModel m = make_lattice_model(10, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
  Mat c = m.lift_site_diag(field_gaussian(10, 1.0, 1.0, 0.25));
  Mat h = dissipative_hamiltonian(m.h0, c);
  const double T = 8.0;
  SmoothnessEstimate e0 = estimate_c0(m.h0, c, T, 0.02);
  SmoothnessEstimate et = estimate_c_tilde0(h, c, T, 0.02);
  REQUIRE(e0.value < 2.0);

  Propagator ph(h);
  double max_norm = 1.0;
  for (double t = 0.25; t <= T; t += 0.25) {
    max_norm = std::max(max_norm, op_norm(ph.at(t)));
    max_norm = std::max(max_norm, op_norm(ph.at(-t)));
  }
  CHECK(max_norm <= 1.0 / (1.0 - e0.value / 2.0) * (1 + 1e-6));
  CHECK(max_norm <= std::pow(1.0 - et.value * et.value, -0.5) * (1 + 1e-6));
  CHECK(et.value * et.value <= 1.0 - std::pow(1.0 - e0.value / 2.0, 2) + 1e-6);
  CHECK(et.value <= std::sqrt(1.0 - 1.0 / (max_norm * max_norm)) + 1e-6);
}

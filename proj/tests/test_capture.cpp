#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "lindscat/capture.hpp"

using namespace lindscat;

namespace {

// strong radiative-capture coupling C = a |phi_b><chi| over a well
struct CaptureFixture {
  LatticeModel model;
  Mat h0, v, h_v, c, h;
  Vec phi_b;
  ProbeSet probes;
  Schedule hsched, ssched;

  explicit CaptureFixture(double amplitude)
      : model(make_lattice_model(24, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1))) {
    h0 = model.h0;
    RVec x = model.coords();
    ScalarField vf(24);
    for (int k = 0; k < 24; ++k) vf[k] = (std::abs(x[k] + 2.5) <= 0.6) ? -2.5 : 0.0;
    v = model.lift_site_diag(vf);
    h_v = h0 + v;
    Eigen::SelfAdjointEigenSolver<Mat> es(h_v);
    phi_b = es.eigenvectors().col(0);
    ScalarField gw = field_gaussian(24, 1.0, 1.0, 1.0);
    Vec chi(24);
    for (int k = 0; k < 24; ++k) chi[k] = gw[k];
    chi -= phi_b * (phi_b.adjoint() * chi);
    chi /= chi.norm();
    c = amplitude * (phi_b * chi.adjoint());
    h = dissipative_hamiltonian(h_v, c);
    probes = ProbeSet(scattering_probes(model, 1.5, 1.0));
    hsched = Schedule::linear(4.0, 7.5, 15, 2e-3);
    ssched = Schedule::linear(4.0, 7.5, 15, 2e-2);
  }
};

}  // namespace

TEST_CASE("classify_spectrum trivial cases") {
  // C = 0: every eigenvector has a real eigenvalue; bound = full space, pi = 0
  Rng rng(81);
  Mat h_v = rng.hermitian(5);
  SpectralClassification cls =
      classify_spectrum(h_v, h_v, Mat::Zero(5, 5), 1e-9, 0.1, 0.15, 5, 1);
  CHECK(cls.bound.rank() == 5);
  CHECK(cls.decaying.rank() == 0);
  CHECK(cls.pi.norm() < 1e-10);
  // dark cross-check: H_pp cap Ker(0) = full space; angle 0
  CHECK(cls.bound_crosscheck_angle < 1e-10);

  // H = -(i/2) I: everything decays
  Mat c = Mat::Identity(3, 3);
  Mat h = dissipative_hamiltonian(Mat::Zero(3, 3), c);
  SpectralClassification cls2 = classify_spectrum(h, Mat::Zero(3, 3), c, 1e-9, 0.1, 0.15, 3, 1);
  CHECK(cls2.decaying.rank() == 3);
  CHECK(cls2.bound.rank() == 0);
}

TEST_CASE("classify_spectrum on the capture model") {
  CaptureFixture f(1.35);
  SpectralClassification cls =
      classify_spectrum(f.h, f.h_v, f.c, 1e-8 * f.h.norm(), 0.1, 0.15, 24, 1);
  // dark bound state recognized by both routes
  CHECK(cls.bound.rank() == 1);
  CHECK(cls.bound_crosscheck_angle <= 1e-6);
  auto angles = principal_angles(cls.bound, SubspaceBasis{24, Mat(f.phi_b)});
  CHECK(angles.front() <= 1e-6);
  // a strongly decaying mode from the rank-1 absorber
  REQUIRE(cls.decaying.rank() >= 1);
  // eigenvector decay is exact in t: check well past the classification rate.
  // decay_tol = 0.1 guarantees |Im| >= 0.1, so by t = 140 norms are < 1e-6
  for (int j = 0; j < cls.decaying.rank(); ++j) {
    Vec d = cls.decaying.vectors.col(j);
    CHECK(evolve_vector(f.h, d, 140.0).norm() < 1e-6);
  }
  // H_b(H) = H_b(H*) as subspaces (eigenvalue route on the adjoint)
  auto adj_bound = invariant_subspace(
      Mat(f.h.adjoint()), [&](Complex z) { return std::abs(z.imag()) <= 1e-8 * f.h.norm(); },
      1e-8 * f.h.norm());
  auto cross = principal_angles(cls.bound, adj_bound.basis);
  CHECK(cross.front() <= 1e-6);
}

TEST_CASE("classification straddle flag on near-boundary eigenvalues") {
  Mat h_v = Mat::Zero(2, 2);
  Mat c = Mat::Zero(2, 2);
  c(0, 0) = 1e-5;  // eigenvalue at -5e-11 i, just below the realness cut
  Mat h = dissipative_hamiltonian(h_v, c);
  SpectralClassification cls = classify_spectrum(h, h_v, c, 1e-10, 1e-12, 0.15, 2, 1);
  CHECK(cls.boundary_straddle);
}

TEST_CASE("escape probabilities on the capture model") {
  CaptureFixture f(1.35);
  Rng rng(82);
  const int n = 24;
  SpectralClassification cls =
      classify_spectrum(f.h, f.h_v, f.c, 1e-8 * f.h.norm(), 0.1, 0.15, 24, 1);
  SuperOp lind = build_lindbladian(f.h_v, f.c);
  StateProbeSet sp(f.probes.vectors(), n, &rng, 2);
  OmegaLimit om = modified_omega_minus(f.h0, lind, cls.pi_scattering, f.ssched, sp);
  REQUIRE(om.converged());

  // theorem range on random states
  for (int s = 0; s < 50; ++s) {
    const double e = escape_probability(om, rng.density(n));
    CHECK(e >= -1e-8);
    CHECK(e <= 1.0 + 1e-8);
  }

  // linearity in the state
  Mat rho_a = rng.density(n), rho_b = rng.density(n);
  const double mix = escape_probability(om, Mat(0.5 * rho_a + 0.5 * rho_b));
  const double avg =
      0.5 * escape_probability(om, rho_a) + 0.5 * escape_probability(om, rho_b);
  CHECK(mix == doctest::Approx(avg).epsilon(1e-6));

  // decaying states are captured (Π annihilates the decaying subspace)
  double worst = 0.0;
  for (int j = 0; j < cls.decaying.rank(); ++j) {
    Vec d = cls.decaying.vectors.col(j);
    worst = std::max(worst, std::abs(escape_probability(om, Mat(d * d.adjoint()))));
  }
  CHECK(worst <= 1e-4);

  // scattering packets mostly escape
  Vec phi = f.probes.vectors().front();
  const double e_scatter = escape_probability(om, Mat(phi * phi.adjoint()));
  CHECK(e_scatter > 0.3);
  CHECK(e_scatter <= 1.0 + 1e-8);

  CHECK_THROWS(escape_probability(om, Mat(2.0 * rho_a)));
}

TEST_CASE("monotone absorption and compact-probe decay proxies") {
  CaptureFixture f(1.35);
  SpectralClassification cls =
      classify_spectrum(f.h, f.h_v, f.c, 1e-8 * f.h.norm(), 0.1, 0.15, 24, 1);
  SuperOp lind = build_lindbladian(f.h_v, f.c);
  SuperPropagatorCache cache(lind);
  Rng rng(85);
  Mat rho = rng.density(24);
  // t -> tr(Pi rho_t Pi): observed non-increasing on this model (reported
  // behavior, not a theorem)
  double prev = 1e300;
  int increases = 0;
  for (double t = 0.0; t <= 8.0 + 1e-9; t += 0.4) {
    Mat rho_t = evolve_density(cache, rho, t);
    const double val =
        (cls.pi_scattering * rho_t * cls.pi_scattering).trace().real();
    if (val > prev + 1e-9) ++increases;
    prev = val;
  }
  CHECK(increases == 0);

  // compact-probe decay for scattering states: K finite rank near the target,
  // u a wave packet projected off H_b
  Mat k_probe = Mat::Zero(24, 24);
  for (int j = 11; j <= 13; ++j) k_probe(j, j) = 1.0;
  Vec u = f.probes.vectors().front();
  u -= f.phi_b * (f.phi_b.adjoint() * u);
  u /= u.norm();
  const double local_amp = (k_probe * evolve_vector(f.h, u, 7.5)).norm();
  // the continuum limit sends this to zero; the lattice floor is the
  // dispersed packet amplitude that still overlaps K at the window end
  CHECK(local_amp < 5e-2);
}

TEST_CASE("range formula: weak coupling against a deep well") {
  // deep well -> fast bound-state phases; Hann-tapered window averages them out
  LatticeModel model = make_lattice_model(28, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1));
  RVec x = model.coords();
  ScalarField vf(28);
  for (int k = 0; k < 28; ++k) vf[k] = (std::abs(x[k] + 0.5) <= 0.1) ? -8.0 : 0.0;
  Mat v = model.lift_site_diag(vf);
  Mat h_v = model.h0 + v;
  Eigen::SelfAdjointEigenSolver<Mat> es(h_v);
  Vec phi_b = es.eigenvectors().col(0);
  Mat proj = Mat::Identity(28, 28) - phi_b * phi_b.adjoint();
  Mat c = Mat(model.lift_site_diag(field_gaussian(28, 1.0, 1.2, 0.35))) * proj;
  Mat h = dissipative_hamiltonian(h_v, c);

  std::vector<Vec> pv;
  for (double off : {1.5, 2.5, 3.5}) {
    auto batch = scattering_probes(model, 1.5, off);
    pv.insert(pv.end(), batch.begin(), batch.end());
  }
  ProbeSet probes(pv);
  Schedule sched = Schedule::linear(3.0, 9.5, 27, 2.5e-2);
  sched.taper = Taper::hann;

  SpectralClassification cls =
      classify_spectrum(h, h_v, c, 1e-8 * std::max(1.0, h.norm()), 0.5, 0.15, 28, 1);
  CHECK(cls.bound.rank() == 1);
  CHECK(cls.bound_crosscheck_angle <= 1e-6);

  RangeFormulaReport rep = range_formula_check(h, model.h0, c, cls, sched, probes);
  REQUIRE(rep.converged);
  CHECK(rep.expected_corank == 1);
  CHECK(rep.max_principal_angle <= 1e-3);
  const double overlap = (phi_b.adjoint() * rep.w_plus.value).norm();
  CHECK(overlap <= 1e-3);
  CHECK(rep.injectivity_margin > 0.5);
}

TEST_CASE("assumption V0 proxy report") {
  // free case: no out-of-band or localized states, Pi_ac = I
  LatticeModel m = make_lattice_model(14, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1));
  ProbeSet probes(scattering_probes(m));
  Schedule sched = Schedule::linear(2.0, 3.5, 7, 1e-2);
  AssumptionV0Report free_rep =
      assumption_V0_report(m.h0, Mat(Mat::Zero(14, 14)), m, sched, probes);
  CHECK(free_rep.out_of_band.empty());
  CHECK(free_rep.localized_in_band.empty());
  CHECK((free_rep.pi_ac - Mat::Identity(14, 14)).norm() < 1e-10);

  // deep single-site well: exactly one eigenvalue below the band
  RVec x = m.coords();
  ScalarField vf(14);
  for (int k = 0; k < 14; ++k) vf[k] = (std::abs(x[k] - 0.5) <= 0.1) ? -3.0 : 0.0;
  Mat v = m.lift_site_diag(vf);
  AssumptionV0Report rep = assumption_V0_report(m.h0, v, m, sched, probes);
  CHECK(rep.out_of_band.size() == 1);  // one bound state below the band
  CHECK(free_rep.w_plus_hv_h0.converged);
}

TEST_CASE("assumption V0: shallow well wave operators near-unitary on Pi_ac") {
  LatticeModel m = make_lattice_model(24, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1));
  RVec x = m.coords();
  ScalarField vf(24);
  for (int k = 0; k < 24; ++k) vf[k] = (std::abs(x[k] + 0.5) <= 0.1) ? -1.2 : 0.0;
  Mat v = m.lift_site_diag(vf);
  ProbeSet probes(scattering_probes(m, 1.5, 1.5));
  Schedule sched = Schedule::linear(3.0, 7.0, 17, 5e-3);
  sched.taper = Taper::hann;
  AssumptionV0Report rep = assumption_V0_report(m.h0, v, m, sched, probes);
  REQUIRE(rep.w_plus_hv_h0.converged);
  CHECK(rep.completeness_residual <= 1e-2);
  CHECK(rep.isometry_residual <= 1e-2);
}

TEST_CASE("capture scenario end-to-end sweep") {
  CaptureFixture f(1.35);
  Rng rng(83);
  auto make_c = [&](double a) { return Mat(a / 1.35 * f.c); };
  std::vector<double> amps = {0.45, 0.8, 1.15, 1.5, 1.85};
  StateProbeSet sp(f.probes.vectors(), 24, &rng, 2);
  CaptureScenarioReport rep =
      capture_scenario_5_2(f.model, f.v, 0.5, make_c, amps, f.hsched, f.ssched, 8.0, 0.02,
                           f.probes, sp);
  CHECK(rep.c1_proxy > 0.0);
  // with the potential present the reference packet carries some bound-state
  // weight, which neither escapes nor is dynamically captured
  CHECK(rep.escape_free > 0.85);
  CHECK(rep.escape_free <= 1.0 + 1e-8);
  REQUIRE(rep.sweep.size() == 5);
  // escape decreases with coupling amplitude (reported trend)
  int decreases = 0;
  for (std::size_t i = 1; i < rep.sweep.size(); ++i)
    if (rep.sweep[i].escape <= rep.sweep[i - 1].escape + 1e-6) ++decreases;
  CHECK(decreases >= 3);
  for (const auto& row : rep.sweep) {
    CHECK(row.escape >= -1e-8);
    CHECK(row.escape <= 1.0 + 1e-8);
  }
}

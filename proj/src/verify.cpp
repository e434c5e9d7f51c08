#include "lindscat/verify.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "lindscat/capture.hpp"
#include "lindscat/scenario.hpp"

namespace lindscat {

namespace {

struct Check {
  std::ostringstream detail;
  bool pass = true;
  void require(bool ok, const std::string& what, double measured, double limit) {
    if (!ok) pass = false;
    detail << (ok ? "  ok  " : "  FAIL") << " " << what << ": measured=" << measured
           << " limit=" << limit << "\n";
  }
};

// ---------------------------------------------------------------------------
// shared acceptance models
// ---------------------------------------------------------------------------

// 16-site, internal-dim-2 lattice with a compact box coupling; amplitude sets
// the measured c0. Used by criteria 4 and 5.
struct WaveModel {
  LatticeModel model;
  Mat h0, c, h;
  double c0 = 0.0, c_tilde0 = 0.0;
  ProbeSet probes;           // incoming family (t -> -∞ composites)
  ProbeSet probes_outgoing;  // outgoing family (t -> +∞ composites)
  Schedule schedule;
};

WaveModel make_wave_model(double amplitude) {
  WaveModel wm;
  Mat h_int = Mat::Zero(2, 2);
  h_int(1, 1) = 0.35;
  wm.model = make_lattice_model(16, 1.0, Boundary::periodic, 2, h_int);
  ScalarField g = field_box(16, 1.0, 1.0, amplitude);
  wm.c = wm.model.lift_site_diag(g);
  wm.model.couplings.push_back(wm.c);
  wm.h0 = wm.model.h0;
  wm.h = dissipative_hamiltonian(wm.h0, wm.c);
  wm.probes = ProbeSet(scattering_probes(wm.model, 1.3, 1.0, true));
  wm.probes_outgoing = ProbeSet(scattering_probes(wm.model, 1.3, 1.0, false));
  wm.schedule = Schedule::linear(2.75, 4.75, 9, 2.5e-4);
  SmoothnessEstimate e0 = estimate_c0(wm.h0, wm.c, 10.0, 0.02);
  SmoothnessEstimate et = estimate_c_tilde0(wm.h, wm.c, 10.0, 0.02);
  wm.c0 = e0.value;
  wm.c_tilde0 = et.value;
  return wm;
}

// amplitude pinned to the largest value whose intertwining residual clears
// 1e-5 with margin; the measured c0 is printed in the acceptance line
constexpr double kWaveAmplitude = 0.08;

// capture model A: weak patch coupling + deep single-site well (c_V < 2 regime;
// range formula against the bound-state direction, Hann-tapered window)
struct CaptureModelA {
  LatticeModel model;
  Mat h0, v, h_v, c, h;
  Vec phi_b;
  ProbeSet probes;
  Schedule hilbert_schedule;
  Schedule super_schedule;
};

CaptureModelA make_capture_model_a() {
  CaptureModelA cm;
  cm.model = make_lattice_model(32, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1));
  cm.h0 = cm.model.h0;
  RVec x = cm.model.coords();
  ScalarField vf(32);
  for (int k = 0; k < 32; ++k) vf[k] = (std::abs(x[k] + 0.5) <= 0.1) ? -8.0 : 0.0;
  cm.v = cm.model.lift_site_diag(vf);
  cm.h_v = cm.h0 + cm.v;
  Eigen::SelfAdjointEigenSolver<Mat> es(cm.h_v);
  cm.phi_b = es.eigenvectors().col(0);
  // patch coupling orthogonalized against the bound state so phi_b stays dark
  ScalarField g = field_gaussian(32, 1.0, 1.2, 0.35);
  Mat patch = cm.model.lift_site_diag(g);
  Mat proj = Mat::Identity(32, 32) - cm.phi_b * cm.phi_b.adjoint();
  cm.c = patch * proj;
  cm.h = dissipative_hamiltonian(cm.h_v, cm.c);
  std::vector<Vec> pv;
  for (double off : {1.5, 2.5, 3.5}) {
    auto batch = scattering_probes(cm.model, 1.5, off);
    pv.insert(pv.end(), batch.begin(), batch.end());
  }
  cm.probes = ProbeSet(pv);
  cm.hilbert_schedule = Schedule::linear(3.0, 10.0, 29, 2.5e-2);
  cm.hilbert_schedule.taper = Taper::hann;
  cm.super_schedule = Schedule::linear(3.0, 10.0, 29, 5e-2);
  cm.super_schedule.taper = Taper::hann;
  return cm;
}

// capture model B: strong radiative-capture coupling C = a |phi_b><chi|
// (fast-decaying subspace exists; escape of decaying states and capture sweep)
struct CaptureModelB {
  LatticeModel model;
  Mat h0, v, h_v, c, h;
  Vec phi_b;
  ProbeSet probes;
  Schedule hilbert_schedule;
  Schedule super_schedule;
};

CaptureModelB make_capture_model_b(double amplitude) {
  CaptureModelB cm;
  cm.model = make_lattice_model(24, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1));
  cm.h0 = cm.model.h0;
  RVec x = cm.model.coords();
  ScalarField vf(24);
  for (int k = 0; k < 24; ++k) vf[k] = (std::abs(x[k] + 2.5) <= 0.6) ? -2.5 : 0.0;
  cm.v = cm.model.lift_site_diag(vf);
  cm.h_v = cm.h0 + cm.v;
  Eigen::SelfAdjointEigenSolver<Mat> es(cm.h_v);
  cm.phi_b = es.eigenvectors().col(0);
  ScalarField gw = field_gaussian(24, 1.0, 1.0, 1.0);
  Vec chi(24);
  for (int k = 0; k < 24; ++k) chi[k] = gw[k];
  chi -= cm.phi_b * (cm.phi_b.adjoint() * chi);
  chi /= chi.norm();
  cm.c = amplitude * (cm.phi_b * chi.adjoint());
  cm.h = dissipative_hamiltonian(cm.h_v, cm.c);
  cm.probes = ProbeSet(scattering_probes(cm.model, 1.5, 1.0));
  cm.hilbert_schedule = Schedule::linear(4.0, 7.5, 15, 2e-3);
  cm.super_schedule = Schedule::linear(4.0, 7.5, 15, 2e-2);
  return cm;
}

// ---------------------------------------------------------------------------

CriterionResult criterion_1() {
  CriterionResult r{1, "QDS axioms (semigroup properties, complete positivity)"};
  Check ck;
  Rng rng(20240811);
  double worst_trace = 0, worst_semigroup = 0, worst_contraction = 0, worst_factor2 = 0;
  double worst_pos = 0, worst_choi = 0;
  for (int s = 0; s < 50; ++s) {
    const int d = rng.integer(2, 12);
    Mat h0 = rng.hermitian(d);
    h0 *= 1.5 / std::max(1.0, op_norm(h0));
    const int nc = rng.integer(0, 3);
    std::vector<Mat> cs;
    for (int j = 0; j < nc; ++j) {
      Mat c = rng.matrix(d, d);
      cs.push_back(c * (0.6 / std::max(1.0, op_norm(c))));
    }
    SuperOp gen = build_lindbladian(h0, cs);
    QdsReport rep = qds_report(gen, 1, {0.1, 1.0, 5.0}, rng);
    worst_trace = std::max(worst_trace, rep.trace_residual);
    worst_semigroup = std::max(worst_semigroup, rep.semigroup_residual);
    worst_contraction = std::max(worst_contraction, rep.contraction_excess);
    worst_factor2 = std::max(worst_factor2, rep.factor_two_excess);
    worst_pos = std::min(worst_pos, rep.positivity_min_eig);
    worst_choi = std::min(worst_choi, rep.choi_min_eig);
  }
  ck.require(worst_trace <= 1e-9, "trace residual", worst_trace, 1e-9);
  ck.require(worst_pos >= -1e-9, "positivity min eig", worst_pos, -1e-9);
  ck.require(worst_contraction <= 1e-9, "self-adjoint contraction excess", worst_contraction, 1e-9);
  ck.require(worst_choi >= -1e-8, "Choi min eig", worst_choi, -1e-8);
  ck.require(worst_semigroup <= 1e-8, "semigroup-law residual", worst_semigroup, 1e-8);
  ck.require(worst_factor2 <= 1e-9, "general-rho factor-2 excess", worst_factor2, 1e-9);
  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_2() {
  CriterionResult r{2, "dissipation and adjoint energy-balance identities"};
  Check ck;
  Rng rng(7052);
  const double dt = 1e-3, t_final = 1.0;
  const int steps = static_cast<int>(std::llround(t_final / dt));
  double worst = 0, worst_adj = 0;
  for (int s = 0; s < 20; ++s) {
    const int d = rng.integer(2, 6);
    Mat h0 = rng.hermitian(d);
    h0 *= 1.0 / std::max(1.0, op_norm(h0));
    Mat c = rng.matrix(d, d);
    c *= 0.7 / std::max(1.0, op_norm(c));
    Mat h = dissipative_hamiltonian(h0, c);
    Vec u = rng.unit_vector(d);

    Mat ustep = op_exp(h, dt);
    Mat ustep_adj = op_exp(Mat(-h.adjoint()), dt);  // e^{+i dt H*}
    Vec v = u, w = u;
    double quad = 0, quad_adj = 0;
    for (int k = 0; k <= steps; ++k) {
      const double wq = (k == 0 || k == steps) ? 0.5 : 1.0;
      quad += wq * dt * (c * v).squaredNorm();
      quad_adj += wq * dt * (c * w).squaredNorm();
      if (k < steps) {
        v = ustep * v;
        w = ustep_adj * w;
      }
    }
    worst = std::max(worst, std::abs(quad - (1.0 - v.squaredNorm())));
    worst_adj = std::max(worst_adj, std::abs(quad_adj - (1.0 - w.squaredNorm())));
  }
  ck.require(worst <= 1e-6, "dissipation identity residual", worst, 1e-6);
  ck.require(worst_adj <= 1e-6, "adjoint identity residual", worst_adj, 1e-6);
  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_3() {
  CriterionResult r{3, "smoothness chain (uniform bounds from c0 and c-tilde0)"};
  Check ck;
  const double t_meas = 10.0, dt = 0.02;
  double worst_ct = 0;
  for (double amp : {0.08, 0.16, 0.3, 0.5}) {
    LatticeModel m = make_lattice_model(12, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
    ScalarField g = field_gaussian(12, 1.0, 1.2, amp);
    Mat c = m.lift_site_diag(g);
    Mat h = dissipative_hamiltonian(m.h0, c);
    SmoothnessEstimate e0 = estimate_c0(m.h0, c, t_meas, dt);
    SmoothnessEstimate et = estimate_c_tilde0(h, c, t_meas, dt);
    worst_ct = std::max(worst_ct, et.value);

    Propagator ph(h);
    double max_norm = 1.0;
    for (double t = 0.5; t <= t_meas + 1e-9; t += 0.5) {
      max_norm = std::max(max_norm, op_norm(ph.at(t)));
      max_norm = std::max(max_norm, op_norm(ph.at(-t)));
    }
    std::ostringstream tag;
    tag << "amp=" << amp << " c0=" << e0.value << " ctilde0=" << et.value;
    if (e0.value < 2.0) {
      const double bound = 1.0 / (1.0 - e0.value / 2.0) * (1.0 + 1e-6);
      ck.require(max_norm <= bound, tag.str() + " |e^{-itH}| <= 1/(1-c0/2)", max_norm, bound);
      const double ct_sq_bound = 1.0 - std::pow(1.0 - e0.value / 2.0, 2) + 1e-6;
      ck.require(et.value * et.value <= ct_sq_bound,
                 tag.str() + " ctilde0^2 <= 1-(1-c0/2)^2", et.value * et.value, ct_sq_bound);
    }
    const double m_meas = std::max(max_norm, 1.0);
    const double conv = std::sqrt(std::max(0.0, 1.0 - 1.0 / (m_meas * m_meas))) + 1e-6;
    ck.require(et.value <= conv, tag.str() + " converse m -> ctilde0", et.value, conv);
  }
  ck.require(worst_ct <= 1.0 + 1e-9, "ctilde0 <= 1 always", worst_ct, 1.0 + 1e-9);
  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_4() {
  CriterionResult r{4, "Hilbert-space wave operators (inverses, intertwining, S-operator)"};
  Check ck;
  WaveModel wm = make_wave_model(kWaveAmplitude);
  const int n = wm.model.dim();
  ck.detail << "  model: 16 sites x internal 2, measured c0=" << wm.c0
            << " ctilde0=" << wm.c_tilde0 << "\n";

  LimitResult wp = wave_operator(wm.h, wm.h0, TimeSign::plus, std::nullopt, wm.schedule, wm.probes);
  LimitResult wm0 = wave_operator(wm.h0, wm.h, TimeSign::minus, std::nullopt, wm.schedule,
                                  wm.probes_outgoing);
  LimitResult wp0 = wave_operator(wm.h0, wm.h, TimeSign::plus, std::nullopt, wm.schedule, wm.probes);
  LimitResult wmm = wave_operator(wm.h, wm.h0, TimeSign::minus, std::nullopt, wm.schedule,
                                  wm.probes_outgoing);
  for (const auto* lr : {&wp, &wm0, &wp0, &wmm})
    ck.require(lr->converged, "wave operator plateau before recurrence",
               lr->converged ? 1.0 : 0.0, 1.0);

  const Mat id = Mat::Identity(n, n);
  const double inv_p = std::max(wm.probes.metric(Mat(wp.value * wp0.value - id)),
                                wm.probes.metric(Mat(wp0.value * wp.value - id)));
  const double inv_m =
      std::max(wm.probes_outgoing.metric(Mat(wmm.value * wm0.value - id)),
               wm.probes_outgoing.metric(Mat(wm0.value * wmm.value - id)));
  ck.require(inv_p <= 1e-5, "inverse pair W+(H,H0) W+(H0,H)", inv_p, 1e-5);
  ck.require(inv_m <= 1e-5, "inverse pair W-(H,H0) W-(H0,H)", inv_m, 1e-5);

  const double itw_p = intertwining_residual(wp.value, wm.h, wm.h0, wm.probes);
  const double itw_m = intertwining_residual(wm0.value, wm.h0, wm.h, wm.probes_outgoing);
  const double itw_p0 = intertwining_residual(wp0.value, wm.h0, wm.h, wm.probes);
  const double itw_mm = intertwining_residual(wmm.value, wm.h, wm.h0, wm.probes_outgoing);
  ck.require(itw_p <= 1e-5, "intertwining W+(H,H0)", itw_p, 1e-5);
  ck.require(itw_m <= 1e-5, "intertwining W-(H0,H)", itw_m, 1e-5);
  ck.require(itw_p0 <= 1e-5, "intertwining W+(H0,H)", itw_p0, 1e-5);
  ck.require(itw_mm <= 1e-5, "intertwining W-(H,H0)", itw_mm, 1e-5);

  ck.require(op_norm(wp.value) <= 1.0 + 1e-8, "contraction |W+(H,H0)|", op_norm(wp.value),
             1.0 + 1e-8);
  ck.require(op_norm(wm0.value) <= 1.0 + 1e-8, "contraction |W-(H0,H)|",
             op_norm(wm0.value), 1.0 + 1e-8);
  const double margin = 1.0 - wm.c0 / 2.0 - 0.05;
  ck.require(min_singular(wp.value) >= margin, "injectivity margin W+(H,H0)",
             min_singular(wp.value), margin);

  ScatteringOperatorResult s =
      scattering_operator(wm.h, wm.h0, wm.schedule, wm.probes_outgoing);
  ck.require(s.route_residual <= 1e-4, "S(H,H0) two-route agreement", s.route_residual, 1e-4);

  // adjoint identities
  AdjointWaveReport adj = adjoint_wave_operator(wm.h, wm.h0, TimeSign::plus, wm.schedule, wm.probes);
  ck.require(adj.adjoint_identity_1 <= 1e-5, "adjoint identity W+(H0,H*) = W+(H,H0)*",
             adj.adjoint_identity_1, 1e-5);

  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_5() {
  CriterionResult r{5, "Lindblad wave operators (existence, inverses, intertwining, factorization)"};
  Check ck;
  Rng rng(99101);
  WaveModel wm = make_wave_model(kWaveAmplitude);
  const int n = wm.model.dim();
  ck.detail << "  model: superoperator dim " << n * n << ", measured c0=" << wm.c0
            << " (< 2-sqrt2: " << (wm.c0 < 2.0 - std::sqrt(2.0) ? "yes" : "no") << ")\n";

  SuperOp lind = build_lindbladian(wm.h0, wm.c);
  StateProbeSet sprobes(wm.probes.vectors(), n, &rng, 2);

  OmegaLimit om_p = omega_plus(lind, wm.h0, wm.schedule, sprobes);
  OmegaLimit om_m = omega_minus(wm.h0, lind, wm.schedule, sprobes);
  ck.require(om_p.converged(), "Omega+ plateau", om_p.converged() ? 1 : 0, 1);
  ck.require(om_m.converged(), "Omega- plateau", om_m.converged() ? 1 : 0, 1);

  // trace preservation and positivity of the limits
  double trace_res = 0, pos_min = 0;
  for (const auto& s : sprobes.states()) {
    if (trace_norm(Mat(s - s.adjoint())) > 1e-12) continue;
    for (const OmegaLimit* om : {&om_p, &om_m}) {
      Mat img = om->apply(s);
      trace_res = std::max(trace_res, std::abs((img.trace() - s.trace()).real()) +
                                          std::abs(img.trace().imag()));
      pos_min = std::min(pos_min, min_eig_hermitian(img));
    }
  }
  ck.require(trace_res <= 1e-8, "trace preservation of limits", trace_res, 1e-8);
  ck.require(pos_min >= -1e-8, "positivity of limits", pos_min, -1e-8);

  OmegaLimit om_p_rev = omega_plus_reverse(lind, wm.h0, wm.schedule, sprobes);
  OmegaLimit om_m_rev = omega_minus_reverse(lind, wm.h0, wm.schedule, sprobes);
  double inv_p = 0, inv_m = 0;
  for (const auto& s : sprobes.states()) {
    inv_p = std::max(inv_p, trace_norm(Mat(om_p.apply(om_p_rev.apply(s)) - s)));
    inv_p = std::max(inv_p, trace_norm(Mat(om_p_rev.apply(om_p.apply(s)) - s)));
    inv_m = std::max(inv_m, trace_norm(Mat(om_m.apply(om_m_rev.apply(s)) - s)));
    inv_m = std::max(inv_m, trace_norm(Mat(om_m_rev.apply(om_m.apply(s)) - s)));
  }
  ck.require(inv_p <= 1e-4, "inverse pair Omega+ (c0 < 2-sqrt2)", inv_p, 1e-4);
  ck.require(inv_m <= 1e-4, "inverse pair Omega- (c0 < 2-sqrt2)", inv_m, 1e-4);

  // intertwining at t = schedule spacing
  {
    const double dt = wm.schedule.checkpoints[1] - wm.schedule.checkpoints[0];
    Mat el = expm(Mat(dt * lind.m));
    Mat u = op_exp(wm.h0, dt);
    double intw_p = 0, intw_m = 0;
    for (const auto& s : sprobes.states()) {
      Mat lhs_p = unstack(el * stack(om_p.apply(s)), n);
      Mat rhs_p = om_p.apply(Mat(u * s * u.adjoint()));
      intw_p = std::max(intw_p, trace_norm(Mat(lhs_p - rhs_p)));
      Mat lhs_m = u * om_m.apply(s) * u.adjoint();
      Mat rhs_m = om_m.apply(unstack(el * stack(s), n));
      intw_m = std::max(intw_m, trace_norm(Mat(lhs_m - rhs_m)));
    }
    ck.require(intw_p <= 1e-4, "intertwining Omega+", intw_p, 1e-4);
    ck.require(intw_m <= 1e-4, "intertwining Omega-", intw_m, 1e-4);
  }

  // factorization route: Omega+ = Omega+(L, L1) ∘ (W+ . W+*)
  {
    LimitResult wp =
        wave_operator(wm.h, wm.h0, TimeSign::plus, std::nullopt, wm.schedule, wm.probes);
    OmegaLimit om_p1 = omega_plus_vs_dissipative(lind, wm.h, wm.schedule, sprobes);
    double fact = 0;
    for (const auto& s : sprobes.states()) {
      Mat route_a = om_p.apply(s);
      Mat route_b = om_p1.apply(Mat(wp.value * s * wp.value.adjoint()));
      fact = std::max(fact, trace_norm(Mat(route_a - route_b)));
    }
    ck.require(fact <= 1e-4, "factorization Omega+(L,L0) = Omega+(L,L1) W+.W+*", fact, 1e-4);
  }

  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_6() {
  CriterionResult r{6, "Dyson-Phillips series (term bounds, geometric decay, uniform bound)"};
  Check ck;
  Rng rng(424242);
  // qubit-scale model with windowed ctilde0 < 1/sqrt2
  const int d = 2;
  Mat h0(2, 2);
  h0 << 0.0, 0.5, 0.5, 0.0;
  Mat c(2, 2);
  c << 0.42, 0.0, 0.0, 0.13;
  Mat h = dissipative_hamiltonian(h0, c);
  const double t_window = 2.0;
  SmoothnessEstimate et = estimate_c_tilde0(h, c, t_window, 1e-3);
  const double ct = et.value;
  ck.detail << "  ctilde0(T=" << t_window << ") = " << ct << "\n";
  ck.require(ct < 1.0 / std::sqrt(2.0), "ctilde0 < 1/sqrt2", ct, 1.0 / std::sqrt(2.0));

  SuperOp lind = build_lindbladian(h0, c);
  SuperPropagatorCache cache(lind);
  Mat rho = rng.density(d);
  const double t_eval = 1.0, dt = 1e-3;
  Mat exact = evolve_density(cache, rho, t_eval);

  DysonEngine engine(h, c, rho, t_eval, dt);
  const double q = ct * ct / (1.0 - ct * ct);
  const double term_prefactor = 1.0 / (1.0 - ct * ct);
  std::vector<double> errors;
  Mat partial = Mat::Zero(d, d);
  double worst_term_excess = -1e300;
  for (int nn = 0; nn <= 6; ++nn) {
    DysonTermResult term = engine.term(nn);
    const double bound = term_prefactor * std::pow(q, nn) * trace_norm(rho) * 1.05;
    worst_term_excess = std::max(worst_term_excess, term.trace_norm_value - bound);
    partial += term.value;
    errors.push_back(trace_norm(Mat(partial - exact)));
  }
  ck.require(worst_term_excess <= 0.0, "per-term bound with 5% slack", worst_term_excess, 0.0);

  double worst_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] < 1e-5) break;  // quadrature floor
    worst_ratio = std::max(worst_ratio, errors[i + 1] / errors[i]);
  }
  const double ratio_bound = q * 1.1;
  ck.require(worst_ratio <= ratio_bound, "partial-sum error geometric ratio", worst_ratio,
             ratio_bound);

  // two-sided uniform bound
  const double bound2 = 1.0 / (1.0 - 2.0 * ct * ct) * 1.05;
  double worst_norm = 0.0;
  for (double t = -t_window; t <= t_window + 1e-9; t += 0.25) {
    for (int s = 0; s < 3; ++s) {
      Mat any = rng.density(d);
      worst_norm = std::max(worst_norm, trace_norm(evolve_density(cache, any, t, true)));
    }
  }
  ck.require(worst_norm <= bound2, "two-sided bound 1/(1-2c^2) with 5% slack", worst_norm,
             bound2);

  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_7() {
  CriterionResult r{7, "capture (escape probabilities, range formula, H_b identity)"};
  Check ck;
  Rng rng(31337);

  // ----- model A: weak coupling (c_V < 2), deep well, range formula -----
  {
    CaptureModelA cm = make_capture_model_a();
    const int n = cm.model.dim();
    AssumptionV0Report v0 =
        assumption_V0_report(cm.h0, cm.v, cm.model, cm.hilbert_schedule, cm.probes);
    SmoothnessEstimate cv = estimate_c_V(cm.h_v, cm.c, v0.pi_ac, 10.0, 0.02);
    ck.detail << "  model A: n=32, deep well, measured c_V = " << cv.value << "\n";
    ck.require(cv.value < 2.0, "A: model regime c_V < 2", cv.value, 2.0);
    ck.require(v0.out_of_band.size() == 1, "A: one bound state below the band",
               double(v0.out_of_band.size()), 1.0);

    SpectralClassification cls =
        classify_spectrum(cm.h, cm.h_v, cm.c, 1e-8 * std::max(1.0, cm.h.norm()), 0.5,
                          0.15, cm.model.sites, cm.model.internal_dim);
    ck.require(cls.bound_crosscheck_angle <= 1e-6, "A: H_b identity principal angle",
               cls.bound_crosscheck_angle, 1e-6);
    ck.require(cls.bound.rank() == 1, "A: H_b spanned by the dark bound state",
               double(cls.bound.rank()), 1.0);

    RangeFormulaReport rf =
        range_formula_check(cm.h, cm.h0, cm.c, cls, cm.hilbert_schedule, cm.probes);
    ck.require(rf.converged, "A: W+(H,H0) plateau", rf.converged ? 1 : 0, 1);
    ck.require(rf.max_principal_angle <= 1e-3, "A: range-formula principal angle",
               rf.max_principal_angle, 1e-3);
    const double margin = 1.0 - cv.value / 2.0 - 0.05;
    ck.require(rf.injectivity_margin >= margin, "A: injectivity margin >= 1-c_V/2-0.05",
               rf.injectivity_margin, margin);
    const double overlap = (cm.phi_b.adjoint() * rf.w_plus.value).norm();
    ck.require(overlap <= 1e-3, "A: bound state orthogonal to Ran(W+)", overlap, 1e-3);
    (void)n;
  }

  // ----- model B: strong radiative capture; escape probabilities -----
  {
    CaptureModelB cm = make_capture_model_b(1.35);
    const int n = cm.model.dim();
    const double decay_tol = 0.1;
    SpectralClassification cls =
        classify_spectrum(cm.h, cm.h_v, cm.c, 1e-8 * std::max(1.0, cm.h.norm()),
                          decay_tol, 0.15, cm.model.sites, cm.model.internal_dim);
    ck.require(cls.bound_crosscheck_angle <= 1e-6, "B: H_b identity principal angle",
               cls.bound_crosscheck_angle, 1e-6);
    ck.require(cls.decaying.rank() >= 1, "B: decaying subspace nonempty",
               double(cls.decaying.rank()), 1.0);

    SuperOp lind = build_lindbladian(cm.h_v, cm.c);
    StateProbeSet sprobes(cm.probes.vectors(), n, &rng, 2);
    OmegaLimit om = modified_omega_minus(cm.h0, lind, cls.pi_scattering,
                                         cm.super_schedule, sprobes);
    ck.require(om.converged(), "B: modified Omega- plateau", om.converged() ? 1 : 0, 1);

    double lo = 1e300, hi = -1e300;
    for (int s = 0; s < 50; ++s) {
      Mat rho = rng.density(n);
      const double e = escape_probability(om, rho);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    ck.require(lo >= -1e-8, "B: escape probability lower bound (50 states)", lo, -1e-8);
    ck.require(hi <= 1.0 + 1e-8, "B: escape probability upper bound (50 states)", hi,
               1.0 + 1e-8);

    double worst_decaying = 0.0;
    for (int j = 0; j < cls.decaying.rank(); ++j) {
      Vec d = cls.decaying.vectors.col(j);
      worst_decaying =
          std::max(worst_decaying, std::abs(escape_probability(om, Mat(d * d.adjoint()))));
    }
    ck.require(worst_decaying <= 1e-4, "B: escape of fully-decaying states",
               worst_decaying, 1e-4);
  }

  // ----- free case: C = 0, V = 0 gives escape exactly 1 -----
  {
    LatticeModel free_model =
        make_lattice_model(20, 1.0, Boundary::periodic, 1, Mat::Zero(1, 1));
    const int n = free_model.dim();
    SuperOp lind_free = build_lindbladian(free_model.h0, std::vector<Mat>{});
    SpectralClassification cls_free = classify_spectrum(
        free_model.h0, free_model.h0, Mat(Mat::Zero(n, n)), 1e-9, 0.1, 0.15, 20, 1);
    StateProbeSet sp_free(scattering_probes(free_model, 1.5, 1.0), n, nullptr, 0);
    Schedule sched = Schedule::linear(3.5, 6.0, 11, 1e-8);
    OmegaLimit om_free =
        modified_omega_minus(free_model.h0, lind_free, cls_free.pi_scattering, sched,
                             sp_free);
    Vec phi = scattering_probes(free_model, 1.5, 1.0).front();
    const double e_free = escape_probability(om_free, Mat(phi * phi.adjoint()));
    ck.require(std::abs(e_free - 1.0) <= 1e-8, "free-case escape probability", e_free, 1.0);
  }

  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_8() {
  CriterionResult r{8, "continuum constants: non-reproduction, stability, cross-relation"};
  Check ck;
  const double t_meas = 8.0, dt = 0.02;

  // Simon-type constant for the cutoff Coulomb weight, 1-D lattice
  auto simon_measure = [&](int nn, double h) {
    LatticeModel m = make_lattice_model(nn, h, Boundary::dirichlet, 1, Mat::Zero(1, 1));
    Mat c = m.lift_site_diag(field_coulomb_cut(nn, h, 0.75));
    return estimate_c0(m.h0, c, t_meas, dt).value;
  };
  const double simon_a = simon_measure(24, 1.0);
  const double simon_b = simon_measure(48, 0.5);
  ck.require(std::isfinite(simon_a) && simon_a > 0, "Simon analogue finite", simon_a, 0);
  ck.require(std::abs(simon_b - simon_a) <= 0.2 * simon_a,
             "Simon analogue refinement stability 20%", std::abs(simon_b - simon_a) / simon_a,
             0.2);
  ck.detail << "  Simon analogue c0^2 = " << simon_a * simon_a
            << " (continuum pi = " << kPi << ": not reproduced, as expected)\n";

  // weighted (1-Delta)^{1/4} estimate, 1-D lattice; the energy weight is
  // capped at a fixed physical scale so refinement compares the same object
  // (the refined band top otherwise adds new high-frequency content)
  auto weighted_measure = [&](int nn, double h) {
    LatticeModel m = make_lattice_model(nn, h, Boundary::dirichlet, 1, Mat::Zero(1, 1));
    RVec x = m.coords();
    ScalarField w(nn);
    for (int k = 0; k < nn; ++k) w[k] = 1.0 / std::sqrt(1.0 + x[k] * x[k]);
    Eigen::SelfAdjointEigenSolver<Mat> es(m.h0);
    Vec quarter(nn);
    for (int k = 0; k < nn; ++k)
      quarter[k] = std::pow(1.0 + std::min(es.eigenvalues()(k), 4.0), 0.25);
    Mat c = m.lift_site_diag(w) * es.eigenvectors() * quarter.asDiagonal() *
            es.eigenvectors().adjoint();
    return estimate_c0(m.h0, c, t_meas, dt).value;
  };
  const double wa = weighted_measure(24, 1.0);
  const double wb = weighted_measure(48, 0.5);
  ck.require(std::isfinite(wa) && wa > 0, "weighted analogue finite", wa, 0);
  ck.require(std::abs(wb - wa) <= 0.2 * wa, "weighted analogue refinement stability 20%",
             std::abs(wb - wa) / wa, 0.2);
  ck.detail << "  weighted analogue c0^2 = " << wa * wa << " (continuum pi/2 = " << kPi / 2
            << ": not reproduced)\n";

  // Rollnik bound on a small 3-D lattice: ratio finite and O(1), not <= 1
  auto rollnik_3d = [&](int nn, double h) {
    const int big = nn * nn * nn;
    Mat h3 = discrete_laplacian_nd(nn, h, Boundary::dirichlet, 3);
    auto idx = [nn](int i, int j, int k) { return (i * nn + j) * nn + k; };
    RVec xs = lattice_coords(nn, h);
    Vec dvals(big);
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j)
        for (int k = 0; k < nn; ++k)
          dvals[idx(i, j, k)] =
              std::exp(-(xs[i] * xs[i] + xs[j] * xs[j] + xs[k] * xs[k]) / 2.0);
    Mat dmat = dvals.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es(h3);
    const double width = es.eigenvalues()(big - 1) - es.eigenvalues()(0);
    double d0 = 0.0;
    for (double re = es.eigenvalues()(0); re <= es.eigenvalues()(big - 1) + 1e-9;
         re += width / 10.0) {
      const Complex z(re, 0.1 * width);
      Vec inv_eig(big);
      for (int q = 0; q < big; ++q) inv_eig[q] = 1.0 / (es.eigenvalues()(q) - z);
      Mat res = es.eigenvectors() * inv_eig.asDiagonal() * es.eigenvectors().adjoint();
      d0 = std::max(d0, op_norm(Mat(dmat * res * dmat)));
    }
    double rr = 0.0;
    for (int a = 0; a < big; ++a) {
      const int ai = a / (nn * nn), aj = (a / nn) % nn, ak = a % nn;
      for (int b = 0; b < big; ++b) {
        if (a == b) continue;
        const int bi = b / (nn * nn), bj = (b / nn) % nn, bk = b % nn;
        const double dx = xs[ai] - xs[bi], dy = xs[aj] - xs[bj], dz = xs[ak] - xs[bk];
        rr += std::norm(dvals[a]) * std::norm(dvals[b]) / (dx * dx + dy * dy + dz * dz) *
              std::pow(h, 6);
      }
    }
    return std::make_pair(d0, std::sqrt(rr) / (4.0 * kPi));
  };
  auto [d0_small, roll_small] = rollnik_3d(5, 1.0);
  const double ratio = d0_small / roll_small;
  ck.require(std::isfinite(ratio) && ratio >= 0.1 && ratio <= 10.0,
             "Rollnik/4pi ratio finite and O(1) on 3-D toy (bound not reproduced)", ratio,
             10.0);

  // cross-relation: lambda-integrated resolvent constant <= 2 pi c0 (1 + 15%)
  {
    LatticeModel m = make_lattice_model(24, 1.0, Boundary::dirichlet, 1, Mat::Zero(1, 1));
    Mat c = m.lift_site_diag(field_gaussian(24, 1.0, 1.2, 0.15));
    const double c0v = estimate_c0(m.h0, c, t_meas, dt).value;
    SmoothnessEstimate cpi = resolvent_integral_constant(m.h0, c, 1.0 / (2.0 * t_meas));
    ck.require(cpi.value <= 2.0 * kPi * c0v * 1.15, "c0' <= 2 pi c0 (15% slack)", cpi.value,
               2.0 * kPi * c0v * 1.15);
    ck.detail << "  c0'(integral route)/(2 pi c0) = " << cpi.value / (2.0 * kPi * c0v)
              << " (sharp constant sqrt(2 pi); 2 pi is the loose textbook choice)\n";
    // supersmooth d0 >= c0'/2 on the same grid
    ZGrid grid = default_z_grid(m.h0);
    SmoothnessEstimate cp = resolvent_smoothness(m.h0, c, grid);
    SmoothnessEstimate d0 = supersmooth_constant(m.h0, c, grid);
    ck.require(d0.value >= 0.5 * cp.value - 1e-12, "d0 >= c0'/2 (triangle inequality)",
               d0.value, 0.5 * cp.value);
  }

  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

CriterionResult criterion_9() {
  CriterionResult r{9, "negative controls (corrupted dissipator, total absorption)"};
  Check ck;
  Rng rng(55005);

  // (a) sign-corrupted dissipator must fail the Choi test
  {
    const int d = 4;
    Mat h0 = rng.hermitian(d);
    Mat c = rng.matrix(d, d);
    c *= 0.7 / op_norm(c);
    SuperOp good = build_lindbladian(h0, c);
    SuperOp bad = good;
    // flip the sign of the sandwich term C . C*
    bad.m -= 2.0 * Eigen::kroneckerProduct(c, c.conjugate());
    Mat prop = expm(Mat(1.0 * bad.m));
    const double bad_choi = min_eig_hermitian(choi(SuperOp{d, prop}));
    ck.require(bad_choi < -1e-8, "corrupted dissipator fails Choi test", bad_choi, -1e-8);
    Mat good_prop = expm(Mat(1.0 * good.m));
    const double good_choi = min_eig_hermitian(choi(SuperOp{d, good_prop}));
    ck.require(good_choi >= -1e-8, "uncorrupted fixture passes Choi test", good_choi, -1e-8);
  }

  // (b) total-absorption toy: Omega- converges but similarity fails
  {
    const int d = 4;
    Mat h0 = Mat::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) {
      h0(k, k + 1) = -1.0;
      h0(k + 1, k) = -1.0;
    }
    Mat c = Mat::Zero(d, d);
    c(0, 0) = std::sqrt(1.5);
    Mat h = dissipative_hamiltonian(h0, c);
    const double t_win = 16.0;
    SmoothnessEstimate et = estimate_c_tilde0(h, c, t_win, 0.01);
    ck.require(et.value >= 0.999, "toy reaches ctilde0 = 1 (total absorption)", et.value,
               0.999);

    SuperOp lind = build_lindbladian(h0, c);
    std::vector<Vec> toy_probes;
    for (int k = 0; k < d; ++k) {
      Vec v = Vec::Zero(d);
      v[k] = 1.0;
      toy_probes.push_back(v);
    }
    StateProbeSet sp(toy_probes, d, &rng, 2);
    // window set well past the Liouvillian relaxation time
    Eigen::ComplexEigenSolver<Mat> gev(lind.m);
    double gap = 1e300;
    for (int q = 0; q < gev.eigenvalues().size(); ++q) {
      const double re = -gev.eigenvalues()(q).real();
      if (re > 1e-9) gap = std::min(gap, re);
    }
    const double t_relax = 6.0 / gap;
    Schedule sched = Schedule::linear(t_relax, 1.4 * t_relax, 13, 5e-3);
    OmegaLimit om = omega_minus(h0, lind, sched, sp);
    ck.require(om.converged(), "Omega- converges on absorbing toy", om.converged() ? 1 : 0, 1);

    // similarity would need injectivity; the absorbing limit collapses states
    Mat r1 = om.apply(sp.states()[0]);
    Mat r2 = om.apply(sp.states()[1]);
    const double separation = trace_norm(Mat(r1 - r2));
    ck.require(separation <= 0.1, "limit collapses distinct states (similarity fails)",
               separation, 0.1);
  }

  r.pass = ck.pass;
  r.detail = ck.detail.str();
  return r;
}

}  // namespace

CriterionResult run_criterion(int index) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (index) {
    case 1: r = criterion_1(); break;
    case 2: r = criterion_2(); break;
    case 3: r = criterion_3(); break;
    case 4: r = criterion_4(); break;
    case 5: r = criterion_5(); break;
    case 6: r = criterion_6(); break;
    case 7: r = criterion_7(); break;
    case 8: r = criterion_8(); break;
    case 9: r = criterion_9(); break;
    default: throw std::invalid_argument("criterion index must be 1..9");
  }
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<int> criteria_for_subset(const std::string& subset) {
  if (subset == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9};
  if (subset == "qds") return {1, 9};
  if (subset == "dissipative") return {2, 3, 4, 8};
  if (subset == "lindblad") return {5, 6};
  if (subset == "capture") return {7};
  throw std::invalid_argument("unknown verify subset: " + subset);
}

int verify(const std::string& subset, std::ostream& os) {
  int failures = 0;
  for (int idx : criteria_for_subset(subset)) {
    CriterionResult r = run_criterion(idx);
    os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.index << ": " << r.name << " ["
       << r.seconds << " s]\n";
    os << r.detail;
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace lindscat

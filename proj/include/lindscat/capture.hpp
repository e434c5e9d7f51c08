#pragma once

#include "lindscat/lindblad_scattering.hpp"
#include "lindscat/model_builder.hpp"
#include "lindscat/smoothness.hpp"

namespace lindscat {

struct SpectralClassification {
  SubspaceBasis bound;             // H_b: real-eigenvalue eigenvectors of H (|Im| <= tol)
  SubspaceBasis dark;              // H_pp(H_V) ∩ Ker(C): the dark-state identity
  SubspaceBasis decaying;          // H_d(H): Im λ < -decay_tol
  SubspaceBasis decaying_adjoint;  // H_d(H*): Im μ > +decay_tol
  Mat pi;                          // projector onto (bound ⊕ decaying)^⊥
  Mat pi_scattering;               // projector onto (dark ⊕ decaying)^⊥ (capture flows)
  bool boundary_straddle = false;
  double bound_crosscheck_angle = 0.0;  // bound vs dark (pi/2 on dimension mismatch)
};

// Eigenvalue classification of the dissipative H = H_V - (i/2) C*C by ordered
// triangularization. Finite lattices collapse the exact real/complex
// dichotomy into two scales: `tol` classifies an eigenvalue as real (H_b),
// `decay_tol` separates in-window absorption (H_d) from slow band leakage.
// decay_tol <= 0 selects decay_tol = tol (the single-scale reading). The H_b
// identity is cross-checked against the dark-state construction
// (point-spectrum-proxy eigenspaces of H_V intersected with Ker C); capture
// pipelines use pi_scattering, which stays the full projector on models whose
// H_V spectrum is purely band-like even though every lattice eigenvalue is
// discrete.
SpectralClassification classify_spectrum(const Mat& h, const Mat& h_v, const Mat& c,
                                         double tol, double decay_tol = 0.0,
                                         double participation_fraction = 0.15,
                                         int sites = 0, int internal_dim = 1);

// tr(Ω̃- ρ): probability that a particle in state ρ eventually escapes the
// target; capture probability is the complement.
double escape_probability(const SuperOp& omega_tilde, const Mat& rho);
double escape_probability(const OmegaLimit& omega_tilde, const Mat& rho);

struct RangeFormulaReport {
  LimitResult w_plus;
  double max_principal_angle = 0.0;   // Ran(W+) vs (H_b ⊕ H_d(H*))^⊥, rank-matched
  double injectivity_margin = 0.0;    // smallest "large" singular value of W+
  double deficiency_gap = 0.0;        // σ_{n-k}/σ_{n-k+1} split of the singular spectrum
  int expected_corank = 0;            // dim H_b + dim H_d(H*)
  bool converged = false;
};

// Computes W+(H,H0), compares its range (rank-matched, SVD split reported)
// against (H_b(H) ⊕ H_d(H*))^⊥ by principal angles, and checks the
// injectivity margin >= 1 - c_V/2 - 0.05.
RangeFormulaReport range_formula_check(const Mat& h, const Mat& h0, const Mat& c,
                                       const SpectralClassification& cls,
                                       const Schedule& schedule, const ProbeSet& probes);

struct AssumptionV0Report {
  std::vector<double> out_of_band;      // H_V eigenvalues outside the free band
  std::vector<double> localized_in_band;  // in-band eigenvalues with low participation
  Mat pi_ac;                            // proxy projector onto the scattering states
  LimitResult w_plus_hv_h0;             // W+(H_V, H0)
  LimitResult w_plus_h0_hv;             // W+(H0, H_V) Π_ac
  double completeness_residual = 0.0;   // ||W+(H0,HV) W+(HV,H0) - I|| (probe metric)
  double isometry_residual = 0.0;       // ||W+(HV,H0) W+(H0,HV) - Π_ac|| (probe metric)
};

AssumptionV0Report assumption_V0_report(const Mat& h0, const Mat& v,
                                        const LatticeModel& model,
                                        const Schedule& schedule, const ProbeSet& probes,
                                        double participation_fraction = 0.15);

struct CaptureSweepRow {
  double amplitude = 0.0;
  double measured_c_v = 0.0;
  double escape = 0.0;
  bool converged = false;
};

struct CaptureScenarioReport {
  double c1_proxy = 0.0;             // weighted smoothness constant
  double coupling_weighted_norm = 0.0;  // ||C <X>^{1+eps}||
  bool hypothesis_holds = false;     // ||C <X>^{1+eps}|| < 2 / c1
  double escape_free = 0.0;          // escape probability of the reference packet
  std::vector<CaptureSweepRow> sweep;
};

// End-to-end weighted-capture run: weighted smoothness proxy, hypothesis
// check, modified wave operator, escape probabilities for a packet family,
// and a coupling-amplitude sweep. `make_coupling` maps amplitude -> C.
CaptureScenarioReport capture_scenario_5_2(
    const LatticeModel& model, const Mat& v, double epsilon,
    const std::function<Mat(double)>& make_coupling,
    const std::vector<double>& amplitudes, const Schedule& hilbert_schedule,
    const Schedule& super_schedule, double smooth_t, double smooth_dt,
    const ProbeSet& probes, const StateProbeSet& state_probes);

}  // namespace lindscat

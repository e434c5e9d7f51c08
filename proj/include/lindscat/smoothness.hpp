#pragma once

#include <optional>
#include <string>

#include "lindscat/operator_core.hpp"

namespace lindscat {

enum class TimeRange { half_line, full_line };

enum class EstimateKind { c0, c_tilde0, c_V, c0_prime, c0_prime_integral, d0 };

struct SmoothnessEstimate {
  EstimateKind kind = EstimateKind::c0;
  double value = 0.0;
  double truncation_time = 0.0;       // T
  double quadrature_step = 0.0;       // dt
  std::optional<double> tail_bound;   // decay-rate extrapolation; empty = unknown
  std::string grid;                   // z-grid description for resolvent kinds
  bool converged = true;              // false = divergence / not-converged flag
  // c_tilde0 extras: second route and the disagreement between routes
  std::optional<double> cross_value;
  std::optional<double> route_disagreement;
};

// G_T = ∫ e^{itA*} C*C e^{-itA} dt over [0,T] (half_line) or [-T,T] (full_line),
// composite trapezoid with step dt. Hermitian, PSD, PSD-monotone in T.
Mat gram_operator(const Mat& a, const Mat& c, TimeRange range, double t_max, double dt);

// c0: sqrt(λ_max) of the full-line Gram operator for (H0, C); the divergence
// flag fires when the integrand norm fails to decay by 10x over [T/2, T].
SmoothnessEstimate estimate_c0(const Mat& h0, const Mat& c, double t_max, double dt);

// c̃0 for the dissipative H: exact telescoped route λ_max(I - M(T)*M(T)) as the
// value; generic Gram quadrature as the cross-check (disagreement > 1e-3 flagged).
SmoothnessEstimate estimate_c_tilde0(const Mat& h, const Mat& c, double t_max, double dt);

// c_V: restricted to Ran(Pi_ac); Pi_ac must commute with H_V within 1e-8.
SmoothnessEstimate estimate_c_V(const Mat& h_v, const Mat& c, const Mat& pi_ac,
                                double t_max, double dt);

struct ZGrid {
  std::vector<Complex> points;
  double eta_min = 0.0;
  std::string describe() const;
};

// Horizontal lines Im z in {η, 2η, 4η} sweeping Re z across the numerical
// range; default η = 0.05 × spectral width.
ZGrid default_z_grid(const Mat& h0, double eta_factor = 0.05, int re_points = 41);

// sup over grid of ||C((H0-z)^{-1} - (H0-z̄)^{-1})C*||  (kind c0_prime).
SmoothnessEstimate resolvent_smoothness(const Mat& h0, const Mat& c, const ZGrid& grid);

// λ-integrated resolvent route at η = eta (kind c0_prime_integral):
// sqrt(sup_u ∫ [||C R(λ+iη)u||² + ||C R(λ-iη)u||²] dλ / ||u||²).
SmoothnessEstimate resolvent_integral_constant(const Mat& h0, const Mat& c, double eta,
                                               double lambda_pad = 1.0,
                                               double dlambda = 0.05);

// d0 = sup over grid of ||C (H0 - z)^{-1} C*||  (kind d0).
SmoothnessEstimate supersmooth_constant(const Mat& h0, const Mat& c, const ZGrid& grid);

}  // namespace lindscat

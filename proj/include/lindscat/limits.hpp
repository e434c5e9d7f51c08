#pragma once

#include <functional>
#include <optional>

#include "lindscat/operator_core.hpp"

namespace lindscat {

enum class TimeSign { plus, minus };  // W± takes t -> ∓∞

enum class Taper { flat, hann };

struct Schedule {
  std::vector<double> checkpoints;  // strictly increasing, > 0
  double tol = 1e-4;
  bool recurrence_guard = true;
  int plateau_min = 3;          // consecutive residuals <= tol
  double rebound_factor = 5.0;  // residual > tol*factor after plateau => recurrence
  // plateau-averaging weights; hann suppresses oscillatory leakage from
  // isolated spectral frequencies (deep bound states)
  Taper taper = Taper::flat;
  std::vector<double> taper_weights(int count) const;

  static Schedule linear(double t_first, double t_last, int count, double tol);
  static Schedule geometric(double t_first, double t_last, int count, double tol);
  void validate() const;
  bool uniform_spacing(double rel = 1e-9) const;
};

struct Checkpoint {
  double t = 0.0;
  double residual = 0.0;         // probe-metric Cauchy residual vs previous checkpoint
  double opnorm_residual = 0.0;  // full operator-norm residual (diagnostic)
};

struct LimitResult {
  Mat value;
  std::vector<Checkpoint> checkpoints;
  std::optional<std::pair<double, double>> plateau;  // (t_start, t_end)
  double plateau_std = 0.0;  // max probe-metric spread of plateau members about the mean
  bool converged = false;
  bool recurrence_detected = false;
};

// Probe-induced residual metric: max_i ||M φ_i|| over unit probe vectors.
// The finite-lattice analogue of strong limits probed on scattering
// states; the full operator norm saturates at the worst-case absorbed
// fraction (refocusing states) and is reported separately.
class ProbeSet {
 public:
  ProbeSet() = default;
  explicit ProbeSet(std::vector<Vec> probes);
  double metric(const Mat& m) const;  // max ||M φ|| / ||φ||
  const std::vector<Vec>& vectors() const { return probes_; }
  bool empty() const { return probes_.empty(); }

 private:
  std::vector<Vec> probes_;
};

// Shared plateau detector: values F_k at schedule checkpoints with a residual
// functor between consecutive values; averaged plateau value.
LimitResult detect_plateau(const std::vector<Mat>& values, const Schedule& schedule,
                           const std::function<double(const Mat&)>& metric,
                           const std::function<double(const Mat&)>& opnorm_metric);

// s-lim e^{itA} e^{-itB} Π as t -> ∓∞ (time_sign = plus/minus).
LimitResult wave_operator(const Mat& a, const Mat& b, TimeSign time_sign,
                          const std::optional<Mat>& pre_projection,
                          const Schedule& schedule, const ProbeSet& probes);

// ||A W - W B|| / (1 + ||A|| ||W||), probe metric on the numerator when
// probes are given, operator norm otherwise.
double intertwining_residual(const Mat& w, const Mat& a, const Mat& b,
                             const ProbeSet& probes = ProbeSet());

struct IntegralRepresentationResult {
  double residual = 0.0;       // max matrix-element defect over the probe frame
  bool quadrature_decayed = true;
};

// Cook-integral representation check:
//   which = plus:  W ≈ I - 1/2 ∫_0^T e^{-itH} C*C e^{itH0} dt   (W+(H,H0))
//   which = minus: W ≈ I - 1/2 ∫_0^T e^{itH0} C*C e^{-itH} dt   (W-(H0,H))
IntegralRepresentationResult integral_representation_residual(
    const Mat& h0, const Mat& h, const Mat& c, const Mat& w, TimeSign which,
    double t_max, double dt);

struct ScatteringOperatorResult {
  LimitResult direct;     // s-lim e^{itH0} e^{-2itH} e^{itH0}
  Mat composed;           // W-(H0,H) W+(H,H0)
  double route_residual = 0.0;
};

ScatteringOperatorResult scattering_operator(const Mat& h, const Mat& h0,
                                             const Schedule& schedule,
                                             const ProbeSet& probes);

struct ClosedRangeReport {
  double min_singular_w = 0.0;
  double restricted_bound = 0.0;  // max_t || e^{-itH} |_{Ran W} ||
  double product = 0.0;           // min_singular * restricted_bound, ~1 when consistent
  bool consistent = false;        // product within [0.9, 1.1]
};

ClosedRangeReport closed_range_diagnostic(const Mat& w, const Mat& h,
                                          const std::vector<double>& t_grid);

struct AdjointWaveReport {
  LimitResult w_a_b;        // W±(H, H0)
  LimitResult w_b_astar;    // W±(H0, H*)
  LimitResult w_astar_b;    // W±(H*, H0)
  LimitResult w_b_a;        // W±(H0, H)
  double adjoint_identity_1 = 0.0;  // ||W±(H0,H*) - W±(H,H0)*|| (probe metric)
  double adjoint_identity_2 = 0.0;  // ||W±(H*,H0) - W±(H0,H)*|| (probe metric)
};

AdjointWaveReport adjoint_wave_operator(const Mat& h, const Mat& h0, TimeSign which,
                                        const Schedule& schedule, const ProbeSet& probes);

}  // namespace lindscat

#include "lindscat/limits.hpp"

#include <cmath>

namespace lindscat {

Schedule Schedule::linear(double t_first, double t_last, int count, double tol) {
  Schedule s;
  s.tol = tol;
  if (count < 2) throw std::invalid_argument("Schedule::linear: count must be >= 2");
  for (int i = 0; i < count; ++i)
    s.checkpoints.push_back(t_first + (t_last - t_first) * i / (count - 1));
  s.validate();
  return s;
}

Schedule Schedule::geometric(double t_first, double t_last, int count, double tol) {
  Schedule s;
  s.tol = tol;
  if (count < 2) throw std::invalid_argument("Schedule::geometric: count must be >= 2");
  const double ratio = std::pow(t_last / t_first, 1.0 / (count - 1));
  double t = t_first;
  for (int i = 0; i < count; ++i, t *= ratio) s.checkpoints.push_back(t);
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (checkpoints.size() < 2) throw std::invalid_argument("Schedule: need >= 2 checkpoints");
  if (!(tol > 0)) throw std::invalid_argument("Schedule: tol must be > 0");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] > 0)) throw std::invalid_argument("Schedule: checkpoints must be > 0");
    if (i && !(checkpoints[i] > checkpoints[i - 1]))
      throw std::invalid_argument("Schedule: checkpoints must be strictly increasing");
  }
}

std::vector<double> Schedule::taper_weights(int count) const {
  std::vector<double> w(count, 1.0);
  if (taper == Taper::hann && count > 1) {
    for (int i = 0; i < count; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * (i + 1) / (count + 1));
  }
  double sum = 0.0;
  for (double x : w) sum += x;
  for (double& x : w) x /= sum;
  return w;
}

bool Schedule::uniform_spacing(double rel) const {
  if (checkpoints.size() < 3) return true;
  const double d0 = checkpoints[1] - checkpoints[0];
  for (std::size_t i = 2; i < checkpoints.size(); ++i)
    if (std::abs((checkpoints[i] - checkpoints[i - 1]) - d0) > rel * std::abs(d0))
      return false;
  return true;
}

ProbeSet::ProbeSet(std::vector<Vec> probes) : probes_(std::move(probes)) {
  for (auto& p : probes_) {
    const double n = p.norm();
    if (n > 0) p /= n;
  }
}

double ProbeSet::metric(const Mat& m) const {
  if (probes_.empty()) return op_norm(m);
  double best = 0.0;
  for (const auto& p : probes_) best = std::max(best, (m * p).norm());
  return best;
}

LimitResult detect_plateau(const std::vector<Mat>& values, const Schedule& schedule,
                           const std::function<double(const Mat&)>& metric,
                           const std::function<double(const Mat&)>& opnorm_metric) {
  const auto& ts = schedule.checkpoints;
  if (values.size() != ts.size())
    throw dimension_error("detect_plateau: values/checkpoints count mismatch");
  const int m = static_cast<int>(values.size());

  LimitResult res;
  res.checkpoints.resize(m);
  res.checkpoints[0] = {ts[0], 0.0, 0.0};
  std::vector<double> r(m, 0.0);
  for (int k = 1; k < m; ++k) {
    Mat d = values[k] - values[k - 1];
    r[k] = metric(d);
    res.checkpoints[k] = {ts[k], r[k], opnorm_metric ? opnorm_metric(d) : 0.0};
  }

  // first maximal run of residuals <= tol covering >= plateau_min steps
  int start = -1, end = -1;
  for (int k = 1; k < m;) {
    if (r[k] <= schedule.tol) {
      int j = k;
      while (j + 1 < m && r[j + 1] <= schedule.tol) ++j;
      if (j - k + 1 >= schedule.plateau_min) {
        start = k - 1;  // plateau covers values[k-1 .. j]
        end = j;
        break;
      }
      k = j + 1;
    } else {
      ++k;
    }
  }

  if (start >= 0) {
    // rebound after the plateau => finite-lattice revival
    for (int k = end + 1; k < m; ++k) {
      if (r[k] > schedule.rebound_factor * schedule.tol) {
        res.recurrence_detected = true;
        break;
      }
    }
    res.converged = true;
    res.plateau = std::make_pair(ts[start], ts[end]);
    const auto w = schedule.taper_weights(end - start + 1);
    Mat avg = Mat::Zero(values[0].rows(), values[0].cols());
    for (int k = start; k <= end; ++k) avg += w[k - start] * values[k];
    res.value = avg;
    double spread = 0.0;
    for (int k = start; k <= end; ++k) spread = std::max(spread, metric(Mat(values[k] - avg)));
    res.plateau_std = spread;
  } else {
    // no plateau: recurrence if residuals dipped below tol then rebounded
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < m; ++k) {
      if (r[k] < best) best = r[k];
      if (best <= schedule.tol && r[k] > schedule.rebound_factor * schedule.tol)
        res.recurrence_detected = true;
    }
    res.converged = false;
    res.value = values.back();
  }
  return res;
}

LimitResult wave_operator(const Mat& a, const Mat& b, TimeSign time_sign,
                          const std::optional<Mat>& pre_projection,
                          const Schedule& schedule, const ProbeSet& probes) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw dimension_error("wave_operator: dimension mismatch");
  schedule.validate();
  const double sign = (time_sign == TimeSign::plus) ? -1.0 : +1.0;  // t -> ∓∞
  Propagator pa(a), pb(b);
  std::vector<Mat> values;
  values.reserve(schedule.checkpoints.size());
  for (double tau : schedule.checkpoints) {
    const double t = sign * tau;
    Mat f = pa.at(-t) * pb.at(t);  // e^{itA} e^{-itB}
    if (pre_projection) f = f * (*pre_projection);
    values.push_back(std::move(f));
  }
  return detect_plateau(values, schedule,
                        [&](const Mat& m) { return probes.metric(m); },
                        [](const Mat& m) { return op_norm(m); });
}

double intertwining_residual(const Mat& w, const Mat& a, const Mat& b,
                             const ProbeSet& probes) {
  Mat defect = a * w - w * b;
  const double num = probes.empty() ? op_norm(defect) : probes.metric(defect);
  return num / (1.0 + op_norm(a) * op_norm(w));
}

IntegralRepresentationResult integral_representation_residual(
    const Mat& h0, const Mat& h, const Mat& c, const Mat& w, TimeSign which,
    double t_max, double dt) {
  const int n = static_cast<int>(h.rows());
  const int steps = std::max(1, static_cast<int>(std::llround(t_max / dt)));
  const double step = t_max / steps;
  Propagator ph(h), ph0(h0);
  Mat cc = c.adjoint() * c;
  Mat integral = Mat::Zero(n, n);
  double first_norm = 0.0, last_norm = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double t = k * step;
    const double wq = (k == 0 || k == steps) ? 0.5 : 1.0;
    Mat term = (which == TimeSign::plus) ? Mat(ph.at(t) * cc * ph0.at(-t))
                                         : Mat(ph0.at(-t) * cc * ph.at(t));
    const double tn = term.norm();
    if (k == 0) first_norm = tn;
    if (k == steps) last_norm = tn;
    integral += (wq * step) * term;
  }
  Mat k_matrix = Mat::Identity(n, n) - 0.5 * integral;
  IntegralRepresentationResult out;
  out.residual = (w - k_matrix).cwiseAbs().maxCoeff();
  out.quadrature_decayed = last_norm <= 1e-3 * std::max(first_norm, 1e-300);
  return out;
}

ScatteringOperatorResult scattering_operator(const Mat& h, const Mat& h0,
                                             const Schedule& schedule,
                                             const ProbeSet& probes) {
  Propagator ph(h), ph0(h0);
  std::vector<Mat> values;
  values.reserve(schedule.checkpoints.size());
  for (double t : schedule.checkpoints)
    values.push_back(Mat(ph0.at(-t) * ph.at(2 * t) * ph0.at(-t)));  // e^{itH0} e^{-2itH} e^{itH0}
  ScatteringOperatorResult out;
  out.direct = detect_plateau(values, schedule,
                              [&](const Mat& m) { return probes.metric(m); },
                              [](const Mat& m) { return op_norm(m); });
  LimitResult wm = wave_operator(h0, h, TimeSign::minus, std::nullopt, schedule, probes);
  LimitResult wp = wave_operator(h, h0, TimeSign::plus, std::nullopt, schedule, probes);
  out.composed = wm.value * wp.value;
  out.route_residual = probes.metric(Mat(out.direct.value - out.composed));
  return out;
}

ClosedRangeReport closed_range_diagnostic(const Mat& w, const Mat& h,
                                          const std::vector<double>& t_grid) {
  ClosedRangeReport rep;
  rep.min_singular_w = min_singular(w);
  SubspaceBasis ran = range_basis(w, 1e-8);
  Propagator ph(h);
  double bound = 0.0;
  for (double t : t_grid)
    bound = std::max(bound, op_norm(Mat(ph.at(t) * ran.vectors)));
  rep.restricted_bound = bound;
  rep.product = rep.min_singular_w * rep.restricted_bound;
  rep.consistent = rep.product >= 0.9 && rep.product <= 1.1;
  return rep;
}

AdjointWaveReport adjoint_wave_operator(const Mat& h, const Mat& h0, TimeSign which,
                                        const Schedule& schedule, const ProbeSet& probes) {
  AdjointWaveReport rep;
  Mat hstar = h.adjoint();
  rep.w_a_b = wave_operator(h, h0, which, std::nullopt, schedule, probes);
  rep.w_b_astar = wave_operator(h0, hstar, which, std::nullopt, schedule, probes);
  rep.w_astar_b = wave_operator(hstar, h0, which, std::nullopt, schedule, probes);
  rep.w_b_a = wave_operator(h0, h, which, std::nullopt, schedule, probes);
  rep.adjoint_identity_1 =
      probes.metric(Mat(rep.w_b_astar.value - rep.w_a_b.value.adjoint()));
  rep.adjoint_identity_2 =
      probes.metric(Mat(rep.w_astar_b.value - rep.w_b_a.value.adjoint()));
  return rep;
}

}  // namespace lindscat

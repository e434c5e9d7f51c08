#include "lindscat/lindblad_engine.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace lindscat {

SuperOp build_lindbladian(const Mat& h0, const std::vector<Mat>& cs) {
  const int d = static_cast<int>(h0.rows());
  if (h0.rows() != h0.cols()) throw dimension_error("build_lindbladian: H0 not square");
  const Mat id = Mat::Identity(d, d);
  // -i [H0, ρ]
  Mat g = -kI * (Eigen::kroneckerProduct(h0, id) - Eigen::kroneckerProduct(id, h0.transpose()));
  for (const auto& c : cs) {
    if (c.rows() != d || c.cols() != d)
      throw dimension_error("build_lindbladian: coupling dimension mismatch");
    Mat cc = c.adjoint() * c;
    g += Eigen::kroneckerProduct(c, c.conjugate());
    g -= 0.5 * (Eigen::kroneckerProduct(cc, id) + Eigen::kroneckerProduct(id, cc.transpose()));
  }
  return {d, std::move(g)};
}

SuperOp build_lindbladian(const Mat& h0, const Mat& c) {
  return build_lindbladian(h0, std::vector<Mat>{c});
}

SuperOp build_conjugation_generator(const Mat& a) {
  const int d = static_cast<int>(a.rows());
  const Mat id = Mat::Identity(d, d);
  // -i (A ρ - ρ A*) => G = -i (A (x) 1) + i (1 (x) conj(A))
  Mat g = -kI * Eigen::kroneckerProduct(a, id) + kI * Eigen::kroneckerProduct(id, a.conjugate());
  return {d, std::move(g)};
}

Mat dissipative_hamiltonian(const Mat& h_sa, const std::vector<Mat>& cs) {
  Mat h = h_sa;
  for (const auto& c : cs) {
    if (c.rows() != h_sa.rows()) throw dimension_error("dissipative_hamiltonian: dim mismatch");
    h -= 0.5 * kI * (c.adjoint() * c);
  }
  return h;
}

Mat dissipative_hamiltonian(const Mat& h_sa, const Mat& c) {
  return dissipative_hamiltonian(h_sa, std::vector<Mat>{c});
}

Mat SuperPropagatorCache::at(double t, bool allow_negative) const {
  if (t < 0 && !allow_negative)
    throw std::invalid_argument("SuperPropagatorCache: negative time requires the diagnostic flag");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
  }
  Mat p = expm(Mat(t * gen_.m));
  if (!p.allFinite() || p.norm() > 1e12)
    throw growth_cap_error("SuperPropagatorCache: propagator norm exceeded cap");
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(t, std::move(p)).first->second;
}

Mat evolve_density(const SuperPropagatorCache& lind, const Mat& rho, double t,
                   bool allow_negative) {
  return unstack(lind.at(t, allow_negative) * stack(rho), lind.hdim());
}

Mat evolve_density(const SuperOp& gen, const Mat& rho, double t, bool allow_negative) {
  if (t < 0 && !allow_negative)
    throw std::invalid_argument("evolve_density: negative time requires the diagnostic flag");
  Mat p = expm(Mat(t * gen.m));
  if (!p.allFinite() || p.norm() > 1e12)
    throw growth_cap_error("evolve_density: propagator norm exceeded cap");
  return unstack(p * stack(rho), gen.hdim);
}

Vec evolve_vector(const Mat& h, const Vec& u, double t, double norm_cap) {
  return op_exp(h, t, norm_cap) * u;
}

QdsReport qds_report(const SuperOp& gen, int seeds, const std::vector<double>& t_grid,
                     Rng& rng) {
  const int d = gen.hdim;
  QdsReport rep;
  rep.positivity_min_eig = 1e300;
  rep.choi_min_eig = 1e300;
  SuperPropagatorCache cache(gen);

  for (double t : t_grid) {
    Mat pt = cache.at(t);
    // complete positivity of exp(tG)
    Mat ch = choi(SuperOp{d, pt});
    rep.choi_min_eig = std::min(rep.choi_min_eig, min_eig_hermitian(ch));

    for (int s = 0; s < seeds; ++s) {
      Mat rho = rng.density(d);
      Mat rho_t = unstack(pt * stack(rho), d);
      rep.trace_residual = std::max(rep.trace_residual,
                                    std::abs(rho_t.trace().real() - 1.0) +
                                        std::abs(rho_t.trace().imag()));
      rep.positivity_min_eig = std::min(rep.positivity_min_eig, min_eig_hermitian(rho_t));

      // semigroup law at (t/2, t/2)
      Mat half = cache.at(t / 2);
      Mat two_step = unstack(half * (half * stack(rho)), d);
      rep.semigroup_residual =
          std::max(rep.semigroup_residual, trace_norm(two_step - rho_t));

      // self-adjoint contraction on a Hermitian (not necessarily positive) input
      Mat herm = rng.hermitian(d);
      Mat herm_t = unstack(pt * stack(herm), d);
      rep.contraction_excess =
          std::max(rep.contraction_excess, trace_norm(herm_t) - trace_norm(herm));

      // general-ρ factor-2 bound
      Mat any = rng.matrix(d, d);
      Mat any_t = unstack(pt * stack(any), d);
      rep.factor_two_excess =
          std::max(rep.factor_two_excess, trace_norm(any_t) - 2.0 * trace_norm(any));
    }
  }

  // strong-continuity proxy at small epsilon
  const double eps = 1e-6;
  Mat peps = cache.at(eps);
  Mat rho = rng.density(d);
  rep.continuity_residual = trace_norm(unstack(peps * stack(rho), d) - rho);
  return rep;
}

DysonEngine::DysonEngine(Mat h, Mat c, Mat rho, double t, double dt)
    : h_(std::move(h)), c_(std::move(c)), rho_(std::move(rho)), t_(t), dt_(dt) {
  if (!(dt > 0)) throw std::invalid_argument("DysonEngine: dt must be > 0");
  steps_ = std::max(1, static_cast<int>(std::llround(t_ / dt_)));
  dt_ = t_ / steps_;  // land exactly on t
  props_.resize(steps_ + 1);
  Propagator prop(h_);
  for (int k = 0; k <= steps_; ++k) props_[k] = prop.at(k * dt_);
}

const std::vector<Mat>& DysonEngine::order_grid(int order) {
  while (static_cast<int>(grids_.size()) <= order) {
    const int n = static_cast<int>(grids_.size());
    std::vector<Mat> grid(steps_ + 1);
    if (n == 0) {
      for (int k = 0; k <= steps_; ++k)
        grid[k] = props_[k] * rho_ * props_[k].adjoint();
    } else {
      const auto& lower = grids_[n - 1];
      // sandwiched lower-order terms, reused across all upper limits
      std::vector<Mat> kernel(steps_ + 1);
      for (int j = 0; j <= steps_; ++j) kernel[j] = c_ * lower[j] * c_.adjoint();
      grid[0] = Mat::Zero(h_.rows(), h_.cols());
      for (int k = 1; k <= steps_; ++k) {
        Mat acc = Mat::Zero(h_.rows(), h_.cols());
        for (int j = 0; j <= k; ++j) {
          const double w = (j == 0 || j == k) ? 0.5 : 1.0;
          acc += w * (props_[k - j] * kernel[j] * props_[k - j].adjoint());
        }
        grid[k] = dt_ * acc;
      }
    }
    grids_.push_back(std::move(grid));
  }
  return grids_[order];
}

DysonTermResult DysonEngine::term(int order) {
  if (order < 0) throw std::invalid_argument("dyson term: order must be >= 0");
  DysonTermResult r;
  r.order = order;
  r.value = order_grid(order)[steps_];
  r.trace_norm_value = trace_norm(r.value);
  r.quadrature_step = dt_;
  return r;
}

Mat DysonEngine::partial_sum(int max_order) {
  Mat sum = Mat::Zero(h_.rows(), h_.cols());
  for (int n = 0; n <= max_order; ++n) sum += order_grid(n)[steps_];
  return sum;
}

DysonTermResult dyson_term(int order, double t, const Mat& h, const Mat& c,
                           const Mat& rho, double dt) {
  DysonEngine engine(h, c, rho, t, dt);
  return engine.term(order);
}

Mat dyson_partial_sum(int max_order, double t, const Mat& h, const Mat& c,
                      const Mat& rho, double dt) {
  DysonEngine engine(h, c, rho, t, dt);
  return engine.partial_sum(max_order);
}

}  // namespace lindscat

#pragma once

#include <map>
#include <mutex>

#include "lindscat/operator_core.hpp"

namespace lindscat {

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// Matrix G of the generator of t -> e^{-itL}: G stack(ρ) = stack(-i L ρ) with
//   L ρ = [H0, ρ] - (i/2) Σ {C_j* C_j, ρ} + i Σ C_j ρ C_j*,
// so the propagator at time t is exp(t G).
SuperOp build_lindbladian(const Mat& h0, const std::vector<Mat>& cs);
SuperOp build_lindbladian(const Mat& h0, const Mat& c);

// Generator of the conjugation group e^{-it ad(A)} ρ = e^{-itA} ρ e^{itA*};
// also used for L0 = ad(H0) and L1 = ad(H).
SuperOp build_conjugation_generator(const Mat& a);

// H = H_sa - (i/2) Σ C_j* C_j.
Mat dissipative_hamiltonian(const Mat& h_sa, const std::vector<Mat>& cs);
Mat dissipative_hamiltonian(const Mat& h_sa, const Mat& c);

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

// Append-only propagator cache for a fixed generator matrix.
class SuperPropagatorCache {
 public:
  explicit SuperPropagatorCache(SuperOp gen) : gen_(std::move(gen)) {}
  // exp(t G); negative t allowed (diagnostic use only) behind the flag.
  Mat at(double t, bool allow_negative = false) const;
  const SuperOp& generator() const { return gen_; }
  int hdim() const { return gen_.hdim; }

 private:
  SuperOp gen_;
  mutable std::mutex mu_;
  mutable std::map<double, Mat> cache_;
};

// ρ_t = unstack(exp(tG) stack(ρ)).
Mat evolve_density(const SuperPropagatorCache& lind, const Mat& rho, double t,
                   bool allow_negative = false);
Mat evolve_density(const SuperOp& gen, const Mat& rho, double t,
                   bool allow_negative = false);

// e^{-itH} u.
Vec evolve_vector(const Mat& h, const Vec& u, double t, double norm_cap = 1e12);

// ---------------------------------------------------------------------------
// Quantum-dynamical-semigroup report
// ---------------------------------------------------------------------------

struct QdsReport {
  double semigroup_residual = 0.0;       // ||T(s)T(t)ρ - T(s+t)ρ||_1
  double continuity_residual = 0.0;      // ||T(ε)ρ - ρ||_1 at ε = 1e-6
  double contraction_excess = 0.0;       // max(||T(t)ρ||_1 - ||ρ||_1), Hermitian ρ
  double positivity_min_eig = 0.0;       // min eig of T(t)ρ over PSD ρ
  double trace_residual = 0.0;           // |tr T(t)ρ - tr ρ|
  double choi_min_eig = 0.0;             // min eig of choi(exp(tG))
  double factor_two_excess = 0.0;        // max(||T(t)ρ||_1 - 2||ρ||_1), general ρ
  bool pass(double tol_trace = 1e-9, double tol_pos = 1e-9, double tol_choi = 1e-8,
            double tol_semigroup = 1e-8) const {
    return semigroup_residual <= tol_semigroup && contraction_excess <= 1e-9 &&
           positivity_min_eig >= -tol_pos && trace_residual <= tol_trace &&
           choi_min_eig >= -tol_choi && factor_two_excess <= 1e-9;
  }
};

QdsReport qds_report(const SuperOp& gen, int seeds, const std::vector<double>& t_grid,
                     Rng& rng);

// ---------------------------------------------------------------------------
// Dyson–Phillips series:  e^{-itL} = S_0(t) + Σ_{n>=1} S_n(t),
//   S_0(t)ρ = e^{-itH} ρ e^{itH*},
//   S_n(t)ρ = ∫_0^t e^{-i(t-s)H} C (S_{n-1}(s)ρ) C* e^{i(t-s)H*} ds.
// ---------------------------------------------------------------------------

struct DysonTermResult {
  int order = 0;
  Mat value;
  double trace_norm_value = 0.0;
  double quadrature_step = 0.0;
};

// Grid-cached evaluator: composite trapezoid with uniform step dt, lower-order
// terms memoized on the same grid.
class DysonEngine {
 public:
  DysonEngine(Mat h, Mat c, Mat rho, double t, double dt);
  DysonTermResult term(int order);           // S_n(t) ρ
  Mat partial_sum(int max_order);            // Σ_{n<=N} S_n(t) ρ

 private:
  const std::vector<Mat>& order_grid(int order);
  Mat h_, c_, rho_;
  double t_, dt_;
  int steps_;
  std::vector<Mat> props_;                  // e^{-i k dt H}
  std::vector<std::vector<Mat>> grids_;     // grids_[n][k] = S_n(k dt) ρ
};

DysonTermResult dyson_term(int order, double t, const Mat& h, const Mat& c,
                           const Mat& rho, double dt);
Mat dyson_partial_sum(int max_order, double t, const Mat& h, const Mat& c,
                      const Mat& rho, double dt);

}  // namespace lindscat

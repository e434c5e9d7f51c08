#pragma once

#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lindscat {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Raised when a propagator norm runs past the configured cap
// (strongly non-dissipative input evolved in the growing direction).
class growth_cap_error : public std::runtime_error {
 public:
  explicit growth_cap_error(const std::string& what) : std::runtime_error(what) {}
};

class dimension_error : public std::invalid_argument {
 public:
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// Deterministic RNG wrapper. Every randomized routine takes one of these;
// reports are byte-identical for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(gen_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  Complex cnormal() { return {normal(), normal()}; }
  int integer(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

  Vec vector(int dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = cnormal();
    return v;
  }
  Vec unit_vector(int dim) {
    Vec v = vector(dim);
    return v / v.norm();
  }
  Mat matrix(int rows, int cols) {
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = cnormal();
    return m;
  }
  Mat hermitian(int dim) {
    Mat m = matrix(dim, dim);
    return 0.5 * (m + m.adjoint());
  }
  // Haar unitary via QR with phase fix.
  Mat unitary(int dim) {
    Mat m = matrix(dim, dim);
    Eigen::HouseholderQR<Mat> qr(m);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
      Complex d = r(j, j);
      q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : 1.0);
    }
    return q;
  }
  // Ginibre density matrix: PSD, unit trace, full rank a.s.
  Mat density(int dim, int rank = 0) {
    if (rank <= 0) rank = dim;
    Mat g = matrix(dim, rank);
    Mat rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lindscat

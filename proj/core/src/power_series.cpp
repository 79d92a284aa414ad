#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "spectral_forge/errors.hpp"
#include "spectral_forge/marchenko.hpp"

namespace spectral_forge::marchenko {

namespace {

// C(x) in double; x < 0 uses the left norming constants.
Eigen::MatrixXd c_matrix(const BoundStateSet& b, double x) {
  const std::size_t n = b.size();
  std::vector<double> lc = b.log_c2;
  if (x < 0.0) {
    const auto lres = log_transmission_residues(b.kappa);
    for (std::size_t i = 0; i < n; ++i) lc[i] = 2.0 * lres[i] - b.log_c2[i];
  }
  const double y = std::abs(x);
  Eigen::MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double kk = b.kappa[i] + b.kappa[j];
      c(i, j) = std::exp(0.5 * (lc[i] + lc[j]) - kk * y) / kk;
    }
  }
  return c;
}

}  // namespace

double spectral_radius(const BoundStateSet& b, double x) {
  const Eigen::MatrixXd c = c_matrix(b, x);
  if (!c.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double potential_power_series(const BoundStateSet& b, double x, std::size_t r_max) {
  if (r_max == 0) throw ValidationError("power series needs r_max >= 1");
  const double rho = spectral_radius(b, x);
  if (!(rho < 1.0 - 1e-12)) {
    throw ConvergenceError("trace series diverges at x = " + std::to_string(x) +
                           " (spectral radius " + std::to_string(rho) + ")");
  }
  const Eigen::MatrixXd c = c_matrix(b, x);
  const std::size_t n = b.size();
  const Eigen::VectorXd k = Eigen::Map<const Eigen::VectorXd>(b.kappa.data(), Eigen::Index(n));

  // powers[a] = C^a
  std::vector<Eigen::MatrixXd> powers(r_max + 1);
  powers[0] = Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t a = 1; a <= r_max; ++a) powers[a] = powers[a - 1] * c;

  // Tr(L A L B) = sum_ij k_i A_ij k_j B_ji
  auto tr_lalb = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& bm) {
    return (k.asDiagonal() * a * k.asDiagonal()).cwiseProduct(bm.transpose()).sum();
  };

  // (Tr C^r)'' = 2r [2 Tr(L^2 C^r) + 2 sum_{a=1}^{r-1} Tr(L C^a L C^{r-a})]
  double sum = 0.0;
  for (std::size_t r = 1; r <= r_max; ++r) {
    double inner = 2.0 * (k.array().square().matrix().asDiagonal() * powers[r]).trace();
    for (std::size_t a = 1; a < r; ++a) inner += 2.0 * tr_lalb(powers[a], powers[r - a]);
    const double second = 2.0 * static_cast<double>(r) * inner;
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    sum += sign / static_cast<double>(r) * second;
  }
  return 2.0 * sum;
}

}  // namespace spectral_forge::marchenko

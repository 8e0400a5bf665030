#include "modclass/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace modclass {

LaguerreRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: need at least one node");
  // Jacobi matrix of the Laguerre recurrence: diag 2k+1, off-diagonal k.
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) sub(k - 1) = static_cast<double>(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_laguerre: eigen solver failed");

  LaguerreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.log_weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    rule.log_weights[static_cast<std::size_t>(k)] =
        v0 == 0.0 ? -std::numeric_limits<double>::infinity() : 2.0 * std::log(std::abs(v0));
  }
  return rule;
}

std::vector<double> periodic_nodes(double lo, double period, int n) {
  if (n < 1) throw std::invalid_argument("periodic_nodes: need at least one node");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = lo + period * k / n;
  return out;
}

}  // namespace modclass

#pragma once

#include <vector>

namespace modclass {

// Nodes x_k and log-weights for int_0^inf e^{-x} f(x) dx ~ sum_k w_k f(x_k).
struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

/// n-point Gauss-Laguerre rule (Golub-Welsch on the Jacobi matrix).
LaguerreRule gauss_laguerre(int n);

/// n equally spaced nodes on [lo, lo + period): the trapezoid rule for periodic integrands.
std::vector<double> periodic_nodes(double lo, double period, int n);

}  // namespace modclass

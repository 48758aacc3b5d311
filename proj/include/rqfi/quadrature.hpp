#pragma once

#include <Eigen/Dense>

namespace rqfi {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre recurrence.
GaussLegendreRule gauss_legendre(int n);

/// Composite Gauss-Legendre rule on [a, b] with equal panels of `per_panel` nodes.
/// The total node count is rounded up to a multiple of `per_panel`.
class CompositeRule {
 public:
  CompositeRule(double a, double b, int total_nodes, int per_panel = 16);

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& w() const { return w_; }
  Eigen::Index size() const { return x_.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x_.size(); ++i) acc += w_[i] * f(x_[i]);
    return acc;
  }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd w_;
};

}  // namespace rqfi

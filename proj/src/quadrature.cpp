#include "rqfi/quadrature.hpp"

#include <cmath>

#include "rqfi/error.hpp"

namespace rqfi {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussLegendreRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

CompositeRule::CompositeRule(double a, double b, int total_nodes, int per_panel) {
  if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "integration interval is empty");
  const int panels = std::max(1, (total_nodes + per_panel - 1) / per_panel);
  static thread_local GaussLegendreRule cached;
  if (cached.nodes.size() != per_panel) cached = gauss_legendre(per_panel);

  x_.resize(static_cast<Eigen::Index>(panels) * per_panel);
  w_.resize(x_.size());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const auto seg = Eigen::seqN(p * per_panel, per_panel);
    x_(seg) = (mid + 0.5 * width * cached.nodes.array()).matrix();
    w_(seg) = 0.5 * width * cached.weights;
  }
}

}  // namespace rqfi

#ifndef BLOWUP_GRID_HPP
#define BLOWUP_GRID_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace blowup {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Node values u_0..u_{N+1} aligned with a Grid. Dirichlet fields keep both
/// boundary entries at zero.
using GridFunction = Vector<double>;

/// Marker for the sup-norm in discrete_norm().
inline constexpr double kSupNorm = std::numeric_limits<double>::infinity();

/// Uniform grid x_j = -1 + j h, j = 0..N+1, on [-1, 1] with h = 2/(N+1).
template <typename Scalar>
struct BasicGrid {
  Eigen::Index n_interior = 0;
  Scalar h = Scalar(0);
  Vector<Scalar> nodes;

  Eigen::Index size() const { return n_interior + 2; }
  Scalar x(Eigen::Index j) const { return nodes[j]; }
};

using Grid = BasicGrid<double>;

template <typename Scalar = double>
BasicGrid<Scalar> build_grid(Eigen::Index n_interior) {
  if (n_interior < 1) {
    throw std::invalid_argument("build_grid: n_interior must be >= 1, got " +
                                std::to_string(n_interior));
  }
  BasicGrid<Scalar> g;
  g.n_interior = n_interior;
  g.h = Scalar(2) / Scalar(n_interior + 1);
  g.nodes.resize(n_interior + 2);
  for (Eigen::Index j = 0; j < n_interior + 2; ++j) {
    g.nodes[j] = Scalar(-1) + Scalar(j) * g.h;
  }
  // Pin the right end; j*h can land one ulp off 1.
  g.nodes[n_interior + 1] = Scalar(1);
  return g;
}

/// Advisory mesh-size rule min(h0, ((2/(b_inf q)) M^{1-q})^{1/(2-q)}).
/// Degenerates to h0 when b_inf == 0.
template <typename Scalar>
Scalar mesh_rule(Scalar h0, Scalar b_inf, Scalar q, Scalar max_abs) {
  using std::pow;
  if (!(q < Scalar(2)) || !(q > Scalar(1))) {
    throw std::invalid_argument("mesh_rule: q must lie in (1, 2)");
  }
  if (!(h0 > Scalar(0)) || !(max_abs > Scalar(0)) || b_inf < Scalar(0)) {
    throw std::invalid_argument("mesh_rule: need h0 > 0, M > 0, b_inf >= 0");
  }
  if (b_inf == Scalar(0)) return h0;
  const Scalar bound =
      pow(Scalar(2) / (b_inf * q) * pow(max_abs, Scalar(1) - q),
          Scalar(1) / (Scalar(2) - q));
  return std::min(h0, bound);
}

namespace detail {
template <typename Derived, typename Scalar>
void check_aligned(const Eigen::MatrixBase<Derived>& u,
                   const BasicGrid<Scalar>& g, const char* who) {
  if (u.size() != g.size()) {
    throw std::invalid_argument(std::string(who) + ": expected " +
                                std::to_string(g.size()) + " node values, got " +
                                std::to_string(u.size()));
  }
}
}  // namespace detail

/// (u_{j+1} - 2u_j + u_{j-1}) / h^2 for j = 1..N.
template <typename Derived, typename Scalar>
Vector<typename Derived::Scalar> second_difference(
    const Eigen::MatrixBase<Derived>& u, const BasicGrid<Scalar>& g) {
  detail::check_aligned(u, g, "second_difference");
  const auto n = g.n_interior;
  return (u.segment(2, n) - 2 * u.segment(1, n) + u.segment(0, n)) /
         (g.h * g.h);
}

/// (u_{j+1} - u_{j-1}) / (2h) for j = 1..N.
template <typename Derived, typename Scalar>
Vector<typename Derived::Scalar> central_difference(
    const Eigen::MatrixBase<Derived>& u, const BasicGrid<Scalar>& g) {
  detail::check_aligned(u, g, "central_difference");
  const auto n = g.n_interior;
  return (u.segment(2, n) - u.segment(0, n)) / (2 * g.h);
}

/// (u_{j+1} - u_j) / h for j = 1..N.
template <typename Derived, typename Scalar>
Vector<typename Derived::Scalar> forward_difference(
    const Eigen::MatrixBase<Derived>& u, const BasicGrid<Scalar>& g) {
  detail::check_aligned(u, g, "forward_difference");
  const auto n = g.n_interior;
  return (u.segment(2, n) - u.segment(1, n)) / g.h;
}

/// (u_j - u_{j-1}) / h for j = 1..N.
template <typename Derived, typename Scalar>
Vector<typename Derived::Scalar> backward_difference(
    const Eigen::MatrixBase<Derived>& u, const BasicGrid<Scalar>& g) {
  detail::check_aligned(u, g, "backward_difference");
  const auto n = g.n_interior;
  return (u.segment(1, n) - u.segment(0, n)) / g.h;
}

/// Weighted l^alpha norm (sum_{j=1}^N h |u_j|^alpha)^{1/alpha} over interior
/// nodes; alpha = kSupNorm gives max_j |u_j| over all N+2 nodes.
template <typename Derived, typename Scalar>
typename Derived::Scalar discrete_norm(const Eigen::MatrixBase<Derived>& u,
                                       const BasicGrid<Scalar>& g,
                                       double alpha) {
  using S = typename Derived::Scalar;
  using std::pow;
  detail::check_aligned(u, g, "discrete_norm");
  if (std::isnan(alpha) || alpha < 1.0) {
    throw std::invalid_argument("discrete_norm: alpha must be >= 1");
  }
  if (std::isinf(alpha)) return u.cwiseAbs().maxCoeff();
  const auto interior = u.segment(1, g.n_interior).cwiseAbs();
  if (alpha == 2.0) return std::sqrt(S(g.h) * interior.squaredNorm());
  const S sum = interior.array().pow(S(alpha)).sum();
  return pow(S(g.h) * sum, S(1) / S(alpha));
}

}  // namespace blowup

#endif  // BLOWUP_GRID_HPP

#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCore>

#include "wcur/geometry.hpp"

namespace wcur {

/// A linear solve did not reach its tolerance. Maps to exit status 3.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double achieved_residual)
      : std::runtime_error(what), achieved(achieved_residual) {}
  double achieved;
};

enum class SolverKind { automatic, direct, iterative };

struct PoissonOptions {
  SolverKind kind = SolverKind::automatic;
  double tolerance = 1e-10;
  int direct_node_limit = 257 * 257;
};

/// Second-order symmetric discretization of d_j(|g|^{1/2} g^{jk} d_k u) on
/// the valid region of a given margin. Non-periodic region edges carry
/// u = 0; a fully periodic grid pins u at the centre node instead and
/// projects the right-hand side onto the compatible (mean-zero) subspace.
class WeightedPoisson {
 public:
  WeightedPoisson(const GeometryCache& c, int margin, PoissonOptions opt = {});

  /// Solves d_j(|g|^{1/2} g^{jk} d_k u) = |g|^{1/2} rhs componentwise.
  /// The result has the margin of the operator.
  Field solve(const Field& rhs) const;

  /// The discrete operator applied to a full nodal field (boundary values
  /// included) at every unknown node; other nodes are 0.
  Field apply(const Field& f) const;

  /// Matrix of -(discrete operator) on the unknowns; symmetric positive definite.
  const Eigen::SparseMatrix<double>& matrix() const { return K_; }
  int unknowns() const { return static_cast<int>(K_.rows()); }
  int margin() const { return margin_; }
  /// Largest relative algebraic residual of the last solve() call.
  double last_residual() const { return last_residual_; }
  bool direct() const { return direct_; }

 private:
  struct Impl;
  Grid grid_;
  int margin_;
  PoissonOptions opt_;
  bool direct_ = true;
  int gauge_ = -1;
  std::vector<int> unknown_of_node_;
  std::vector<int> node_of_unknown_;
  std::vector<double> weight_;  // |g|^{1/2} per node
  std::vector<std::array<double, 9>> coeff_;  // operator stencil per unknown
  Eigen::SparseMatrix<double> K_;
  std::shared_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

/// One-shot helper: Dirichlet-zero solve on the margin of rhs.
Field solve_weighted_poisson(const GeometryCache& c, const Field& rhs, PoissonOptions opt = {});

struct ScalarPotential {
  Field value;
  double defect = 0.0;          // discrete curl / loop circulation over max(sup|P|, 1)
  bool compatible = true;       // defect <= 1e-2
  int gauge_i = 0, gauge_j = 0;
};

/// Least-squares integration of a flat gradient field (P_1, P_2) over its
/// valid region with the potential pinned to zero at the gauge node.
/// Each component is integrated independently.
ScalarPotential recover_scalar_potential(const FieldPair& P, int gauge_i, int gauge_j);
ScalarPotential recover_scalar_potential(const FieldPair& P);  // gauge at the grid centre

inline constexpr double kCompatibilityThreshold = 1e-2;

}  // namespace wcur

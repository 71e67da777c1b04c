#include "wcur/poisson.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "wcur/format.hpp"

namespace wcur {

struct WeightedPoisson::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
};

WeightedPoisson::WeightedPoisson(const GeometryCache& c, int margin, PoissonOptions opt)
    : grid_(c.grid()), margin_(margin), opt_(opt), impl_(std::make_shared<Impl>()) {
  const Grid& g = grid_;
  Field region(g, 1, margin);  // only used for its valid-range bookkeeping
  auto boundary = [&](int i, int j) {
    return (!g.u.periodic && (i == region.begin(0) || i == region.end(0) - 1)) ||
           (!g.v.periodic && (j == region.begin(1) || j == region.end(1) - 1));
  };
  if (g.closed()) gauge_ = g.index(g.center(0), g.center(1));

  unknown_of_node_.assign(g.nodes(), -1);
  region.for_each_valid([&](int i, int j) {
    const int n = g.index(i, j);
    if (boundary(i, j) || n == gauge_) return;
    unknown_of_node_[n] = static_cast<int>(node_of_unknown_.size());
    node_of_unknown_.push_back(n);
  });
  const int nu = static_cast<int>(node_of_unknown_.size());
  if (nu == 0) throw ValidationError("Poisson problem has no interior unknowns at margin " + std::to_string(margin));

  // A = |g|^{1/2} g^{-1}
  weight_.resize(g.nodes());
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) weight_[g.index(i, j)] = c.sqrt_det(i, j, 0);
  auto A = [&](int s, int i, int j) { return c.sqrt_det(i, j, 0) * c.inverse(i, j, s); };
  const double h1 = g.u.h(), h2 = g.v.h();
  coeff_.resize(nu);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(nu) * 9);
  for (int k = 0; k < nu; ++k) {
    const int n = node_of_unknown_[k];
    const int i = n / g.v.n, j = n % g.v.n;
    const int ip = g.shift(0, i, 1), im = g.shift(0, i, -1), jp = g.shift(1, j, 1), jm = g.shift(1, j, -1);
    const double ep = 0.5 * (A(0, i, j) + A(0, ip, j)) / (h1 * h1);
    const double em = 0.5 * (A(0, i, j) + A(0, im, j)) / (h1 * h1);
    const double fp = 0.5 * (A(2, i, j) + A(2, i, jp)) / (h2 * h2);
    const double fm = 0.5 * (A(2, i, j) + A(2, i, jm)) / (h2 * h2);
    const double x = 1.0 / (4 * h1 * h2);
    // D stencil, indexed (di + 1) * 3 + (dj + 1).
    std::array<double, 9>& w = coeff_[k];
    w = {x * (A(1, im, j) + A(1, i, jm)), em, -x * (A(1, im, j) + A(1, i, jp)),
         fm, -(ep + em + fp + fm), fp,
         -x * (A(1, ip, j) + A(1, i, jm)), ep, x * (A(1, ip, j) + A(1, i, jp))};
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        // K = -D
        const int q = unknown_of_node_[g.index(g.shift(0, i, di), g.shift(1, j, dj))];
        if (q >= 0) trip.emplace_back(k, q, -w[(di + 1) * 3 + (dj + 1)]);
      }
  }
  K_.resize(nu, nu);
  K_.setFromTriplets(trip.begin(), trip.end());
  K_.makeCompressed();

  direct_ = opt_.kind == SolverKind::direct ||
            (opt_.kind == SolverKind::automatic && g.nodes() <= opt_.direct_node_limit);
  if (direct_) {
    impl_->ldlt.compute(K_);
    if (impl_->ldlt.info() != Eigen::Success) throw SolverFailure("Poisson factorization failed", 1.0);
  } else {
    impl_->cg.setTolerance(opt_.tolerance);
    impl_->cg.setMaxIterations(20 * g.nodes());
    impl_->cg.compute(K_);
  }
}

Field WeightedPoisson::solve(const Field& rhs) const {
  const Grid& g = grid_;
  if (!(rhs.grid() == g)) throw std::invalid_argument("Poisson rhs on a different grid");
  if (rhs.margin() > margin_) {
    throw ValidationError("Poisson right-hand side narrower than the solve region (margin " +
                          std::to_string(rhs.margin()) + " > " + std::to_string(margin_) + ")");
  }
  const int nu = unknowns();
  const int nc = rhs.components();
  Field out(g, nc, margin_);
  last_residual_ = 0.0;
  for (int comp = 0; comp < nc; ++comp) {
    auto weighted = [&](int n) { return weight_[n] * rhs.values()[static_cast<size_t>(n) * nc + comp]; };
    double mean = 0.0;
    if (gauge_ >= 0) {
      for (int n = 0; n < g.nodes(); ++n) mean += weighted(n);
      mean /= g.nodes();
    }
    Eigen::VectorXd b(nu);
    for (int k = 0; k < nu; ++k) b[k] = -(weighted(node_of_unknown_[k]) - mean);
    const double bnorm = b.norm();
    if (!std::isfinite(bnorm)) throw ValidationError("Poisson right-hand side has non-finite values");
    if (bnorm == 0.0) continue;

    Eigen::VectorXd x;
    if (direct_) {
      x = impl_->ldlt.solve(b);
      x += impl_->ldlt.solve(b - K_ * x);  // one step of iterative refinement
    } else {
      x = impl_->cg.solve(b);
    }
    const double res = (K_ * x - b).norm() / bnorm;
    last_residual_ = std::max(last_residual_, res);
    if (!(res <= opt_.tolerance)) {
      throw SolverFailure("Poisson solve did not converge: relative residual " + format_number(res, 3), res);
    }
    for (int k = 0; k < nu; ++k) out.values()[static_cast<size_t>(node_of_unknown_[k]) * nc + comp] = x[k];
  }
  return out;
}

Field WeightedPoisson::apply(const Field& f) const {
  const Grid& g = grid_;
  if (!(f.grid() == g)) throw std::invalid_argument("Poisson operand on a different grid");
  const int nc = f.components();
  Field out(g, nc, margin_);
  for (int k = 0; k < unknowns(); ++k) {
    const int n = node_of_unknown_[k];
    const int i = n / g.v.n, j = n % g.v.n;
    for (int comp = 0; comp < nc; ++comp) {
      double s = 0.0;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) s += coeff_[k][(di + 1) * 3 + (dj + 1)] * f(g.shift(0, i, di), g.shift(1, j, dj), comp);
      out(i, j, comp) = s;
    }
  }
  return out;
}

Field solve_weighted_poisson(const GeometryCache& c, const Field& rhs, PoissonOptions opt) {
  return WeightedPoisson(c, rhs.margin(), opt).solve(rhs);
}

ScalarPotential recover_scalar_potential(const FieldPair& P) {
  const Grid& g = P[0].grid();
  return recover_scalar_potential(P, g.center(0), g.center(1));
}

ScalarPotential recover_scalar_potential(const FieldPair& P, int gi, int gj) {
  const Grid& g = P[0].grid();
  const int nc = P[0].components();
  if (P[1].components() != nc || !(P[1].grid() == g)) throw std::invalid_argument("gradient pair shape mismatch");
  const int margin = std::max(P[0].margin(), P[1].margin());
  Field region(g, 1, margin);
  if (!region.valid(gi, gj)) throw ValidationError("gauge node outside the valid region");

  double sup = 0.0;
  region.for_each_valid([&](int i, int j) {
    for (int a = 0; a < 2; ++a)
      for (int q = 0; q < nc; ++q) {
        const double x = P[a](i, j, q);
        if (!std::isfinite(x)) throw ValidationError("gradient field has non-finite values");
        sup = std::max(sup, std::abs(x));
      }
  });

  const int gauge = g.index(gi, gj);
  std::vector<int> unk(g.nodes(), -1);
  std::vector<int> node_of;
  region.for_each_valid([&](int i, int j) {
    const int n = g.index(i, j);
    if (n == gauge) return;
    unk[n] = static_cast<int>(node_of.size());
    node_of.push_back(n);
  });
  const int nu = static_cast<int>(node_of.size());
  const double h[2] = {g.u.h(), g.v.h()};

  // Edges from (i, j) to its + neighbour along each axis, inside the region.
  struct Edge {
    int from, to, axis, i, j, i2, j2;
  };
  std::vector<Edge> edges;
  region.for_each_valid([&](int i, int j) {
    for (int a = 0; a < 2; ++a) {
      const int i2 = a == 0 ? g.shift(0, i, 1) : i;
      const int j2 = a == 1 ? g.shift(1, j, 1) : j;
      if (!region.valid(i2, j2)) continue;
      edges.push_back({g.index(i, j), g.index(i2, j2), a, i, j, i2, j2});
    }
  });

  std::vector<Eigen::Triplet<double>> trip;
  for (const Edge& e : edges) {
    const double w = 1.0 / (h[e.axis] * h[e.axis]);
    const int p = unk[e.from], q = unk[e.to];
    if (p >= 0) trip.emplace_back(p, p, w);
    if (q >= 0) trip.emplace_back(q, q, w);
    if (p >= 0 && q >= 0) {
      trip.emplace_back(p, q, -w);
      trip.emplace_back(q, p, -w);
    }
  }
  Eigen::SparseMatrix<double> Lap(nu, nu);
  Lap.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Lap);
  if (solver.info() != Eigen::Success) throw SolverFailure("potential recovery factorization failed", 1.0);

  ScalarPotential out;
  out.value = Field(g, nc, margin);
  out.gauge_i = gi;
  out.gauge_j = gj;
  for (int q = 0; q < nc; ++q) {
    auto mid = [&](const Edge& e) { return 0.5 * (P[e.axis](e.i, e.j, q) + P[e.axis](e.i2, e.j2, q)); };
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nu);
    for (const Edge& e : edges) {
      const double s = mid(e) / h[e.axis];
      if (unk[e.to] >= 0) b[unk[e.to]] += s;
      if (unk[e.from] >= 0) b[unk[e.from]] -= s;
    }
    const Eigen::VectorXd x = solver.solve(b);
    for (int k = 0; k < nu; ++k) out.value.values()[static_cast<size_t>(node_of[k]) * nc + q] = x[k];

    if (sup == 0.0) continue;
    // Discrete curl on cells and circulation along periodic loops.
    double worst = 0.0;
    const double lu = g.u.periodic ? g.u.hi - g.u.lo : (region.end(0) - 1 - region.begin(0)) * h[0];
    const double lv = g.v.periodic ? g.v.hi - g.v.lo : (region.end(1) - 1 - region.begin(1)) * h[1];
    const double l_ref = std::min(lu, lv);
    region.for_each_valid([&](int i, int j) {
      const int i2 = g.shift(0, i, 1), j2 = g.shift(1, j, 1);
      if (!region.valid(i2, j) || !region.valid(i, j2) || !region.valid(i2, j2)) return;
      const double circ = h[0] * 0.5 * (P[0](i, j, q) + P[0](i2, j, q)) +
                          h[1] * 0.5 * (P[1](i2, j, q) + P[1](i2, j2, q)) -
                          h[0] * 0.5 * (P[0](i, j2, q) + P[0](i2, j2, q)) -
                          h[1] * 0.5 * (P[1](i, j, q) + P[1](i, j2, q));
      worst = std::max(worst, std::abs(circ) / (h[0] * h[1]) * l_ref);
    });
    for (int a = 0; a < 2; ++a) {
      if (!g.axis(a).periodic) continue;
      const int lines = a == 0 ? g.v.n : g.u.n;
      const int len = g.axis(a).n;
      for (int l = 0; l < lines; ++l) {
        const int i = a == 0 ? 0 : l, j = a == 0 ? l : 0;
        if (!region.valid(i, j)) continue;
        double circ = 0.0;
        for (int k = 0; k < len; ++k) {
          const int ii = a == 0 ? k : i, jj = a == 0 ? j : k;
          const int ii2 = a == 0 ? g.shift(0, k, 1) : i, jj2 = a == 0 ? j : g.shift(1, k, 1);
          circ += h[a] * 0.5 * (P[a](ii, jj, q) + P[a](ii2, jj2, q));
        }
        worst = std::max(worst, std::abs(circ) / (len * h[a]));
      }
    }
    // Fields that are pure truncation noise (|P| << 1) are judged on the
    // absolute curl; otherwise the ratio would only measure noise over noise.
    out.defect = std::max(out.defect, worst / std::max(sup, 1.0));
  }
  out.compatible = out.defect <= kCompatibilityThreshold;
  return out;
}

}  // namespace wcur

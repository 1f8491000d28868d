// Axisymmetric finite-volume discretisation of the depletion obstacle problem
//
//   find u >= 0 with  -Lap(u) + q >= 0,  u (-Lap(u) + q) = 0
//
// on the diamond part of a (rho, z) grid, solved by a primal-dual active-set
// iteration. Every step solves the Poisson problem on the current depleted
// set with the neutral nodes pinned at zero; the matrix keeps one sparsity
// pattern so the symbolic factorisation is done once.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "chargetune/band_bending.hpp"
#include "chargetune/errors.hpp"

namespace chargetune {

namespace {

struct Grid {
  int ni = 0, nj = 0;  // node counts
  int j_surface = 0;   // row index of z = 0
  double h_rho = 0.0, h_z = 0.0;
  std::vector<double> rho, z;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * ni + i; }
};

Grid make_grid(const PillarGeometry& geometry, const GridSpec& spec, double depth) {
  Grid g;
  g.ni = spec.n_rho + 1;
  g.nj = spec.n_z + 1;
  g.h_rho = geometry.unit_cell_radius_m / spec.n_rho;
  const double height = geometry.is_flat() ? 0.0 : geometry.total_height_m();
  int n_top = 0;
  if (height > 0.0) {
    n_top = static_cast<int>(std::lround(spec.n_z * height / (height + depth)));
    n_top = std::clamp(n_top, 1, spec.n_z - 1);
    g.h_z = height / n_top;
  } else {
    g.h_z = depth / spec.n_z;
  }
  g.j_surface = spec.n_z - n_top;
  for (int i = 0; i < g.ni; ++i) g.rho.push_back(i * g.h_rho);
  for (int j = 0; j < g.nj; ++j) g.z.push_back((j - g.j_surface) * g.h_z);
  return g;
}

std::vector<NodeKind> classify(const Grid& g, const PillarGeometry& geometry) {
  const double height = geometry.is_flat() ? 0.0 : geometry.total_height_m();
  std::vector<char> diamond(static_cast<std::size_t>(g.ni) * g.nj, 0);
  for (int j = 0; j < g.nj; ++j) {
    const double zc = std::min(g.z[j], height);
    const double radius = j <= g.j_surface ? 0.0 : geometry.radius_at(zc);
    for (int i = 0; i < g.ni; ++i) {
      diamond[g.index(i, j)] = j <= g.j_surface || g.rho[i] <= radius * (1.0 + 1e-12);
    }
  }

  std::vector<NodeKind> kind(diamond.size(), NodeKind::Vacuum);
  for (int j = 0; j < g.nj; ++j) {
    for (int i = 0; i < g.ni; ++i) {
      const std::size_t k = g.index(i, j);
      if (!diamond[k]) continue;
      bool exposed = j == g.nj - 1;
      if (i > 0 && !diamond[g.index(i - 1, j)]) exposed = true;
      if (i + 1 < g.ni && !diamond[g.index(i + 1, j)]) exposed = true;
      if (j > 0 && !diamond[g.index(i, j - 1)]) exposed = true;
      if (j + 1 < g.nj && !diamond[g.index(i, j + 1)]) exposed = true;

      if (j == 0) kind[k] = NodeKind::Bottom;
      else if (exposed) kind[k] = NodeKind::Surface;
      else if (i == g.ni - 1) kind[k] = NodeKind::FarField;
      else kind[k] = NodeKind::Interior;
    }
  }
  return kind;
}

}  // namespace

PotentialField pillar_poisson_solve(const PillarGeometry& geometry, const MaterialParams& material,
                                    double e_bb_eV, const GridSpec& spec) {
  geometry.validate();
  material.validate();
  spec.validate();
  if (!(std::isfinite(e_bb_eV) && e_bb_eV >= 0.0)) throw DomainError("band bending must be non-negative");

  const DepletionProfile1D profile = flat_depletion(material, e_bb_eV);
  double depth = spec.depth_below_surface_m;
  if (depth == 0.0) depth = profile.d_dep_m > 0.0 ? 3.0 * profile.d_dep_m : 1e-6;

  const Grid g = make_grid(geometry, spec, depth);
  if (!geometry.is_flat() && geometry.apex_top_radius_m < 10.0 * g.h_rho) {
    throw DomainError("grid must resolve the apex radius with at least 10 cells");
  }
  const std::vector<NodeKind> kind = classify(g, geometry);
  const std::size_t n_nodes = kind.size();

  std::vector<double> u(n_nodes, 0.0);
  for (int j = 0; j < g.nj; ++j) {
    for (int i = 0; i < g.ni; ++i) {
      const std::size_t k = g.index(i, j);
      if (kind[k] == NodeKind::Surface) u[k] = e_bb_eV;
      else if (kind[k] == NodeKind::FarField) u[k] = profile.vacuum_level_eV(g.z[j]);
    }
  }

  std::vector<int> unknown(n_nodes, -1);
  std::vector<std::size_t> node_of;
  for (std::size_t k = 0; k < n_nodes; ++k) {
    if (kind[k] == NodeKind::Interior) {
      unknown[k] = static_cast<int>(node_of.size());
      node_of.push_back(k);
    }
  }
  const int n = static_cast<int>(node_of.size());

  SolverStats stats;
  std::vector<std::uint8_t> depleted(n_nodes, 0);
  auto finish = [&]() {
    for (std::size_t k = 0; k < n_nodes; ++k) {
      if (kind[k] == NodeKind::Vacuum || kind[k] == NodeKind::Bottom) continue;
      depleted[k] = u[k] > 0.0;
      if (kind[k] == NodeKind::Interior) ++(depleted[k] ? stats.depleted_nodes : stats.neutral_nodes);
    }
    return PotentialField(geometry, material, e_bb_eV, g.rho, g.z, u, kind, depleted, stats);
  };
  if (e_bb_eV == 0.0 || n == 0) {
    stats.converged = true;
    return finish();
  }

  // Assemble the symmetric positive definite operator and load vector.
  const double q = space_charge_curvature(material);
  auto area = [&](int i) { return i == 0 ? g.h_rho * g.h_rho / 8.0 : i * g.h_rho * g.h_rho; };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 5);
  Eigen::VectorXd f(n), charge(n);
  for (int p = 0; p < n; ++p) {
    const std::size_t k = node_of[p];
    const int i = static_cast<int>(k % g.ni);
    const int j = static_cast<int>(k / g.ni);
    charge(p) = q * area(i) * g.h_z;
    f(p) = -charge(p);
    double diag = 0.0;
    auto couple = [&](int in, int jn, double c) {
      diag += c;
      const std::size_t kn = g.index(in, jn);
      if (unknown[kn] >= 0) triplets.emplace_back(p, unknown[kn], -c);
      else f(p) += c * u[kn];
    };
    couple(i + 1, j, (i + 0.5) * g.h_z);
    if (i > 0) couple(i - 1, j, (i - 0.5) * g.h_z);
    couple(i, j + 1, area(i) / g.h_z);
    couple(i, j - 1, area(i) / g.h_z);
    triplets.emplace_back(p, p, diag);
  }
  Eigen::SparseMatrix<double> a0(n, n);
  a0.setFromTriplets(triplets.begin(), triplets.end());
  a0.makeCompressed();

  Eigen::SparseMatrix<double> a = a0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.analyzePattern(a);

  // Warm start from the flat depletion front; the active set then only has to
  // move where the geometry bends it.
  std::vector<char> active(n, 0);
  for (int p = 0; p < n; ++p) active[p] = g.z[node_of[p] / g.ni] < -profile.d_dep_m;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n), lambda(n), rhs(n);
  const double u_tol = 1e-13 * e_bb_eV;

  for (int it = 1; it <= spec.max_iterations; ++it) {
    for (int col = 0; col < n; ++col) {
      Eigen::SparseMatrix<double>::InnerIterator pinned(a0, col);
      for (Eigen::SparseMatrix<double>::InnerIterator e(a, col); e; ++e, ++pinned) {
        const int row = static_cast<int>(e.row());
        e.valueRef() = (active[row] || active[col]) ? (row == col ? pinned.value() : 0.0) : pinned.value();
      }
      rhs(col) = active[col] ? 0.0 : f(col);
    }
    ldlt.factorize(a);
    if (ldlt.info() != Eigen::Success) throw SolverError("sparse factorisation failed", it, stats.residual);
    x = ldlt.solve(rhs);
    lambda = a0 * x - f;

    bool changed = false;
    for (int p = 0; p < n; ++p) {
      const bool next = active[p] ? lambda(p) > 1e-12 * charge(p) : x(p) < -u_tol;
      if (next != static_cast<bool>(active[p])) {
        active[p] = next;
        changed = true;
      }
    }

    stats.iterations = it;
    stats.residual = 0.0;
    stats.complementarity = 0.0;
    for (int p = 0; p < n; ++p) {
      const double mult = lambda(p) / charge(p);
      if (!active[p]) stats.residual = std::max(stats.residual, std::abs(mult));
      stats.complementarity =
          std::max(stats.complementarity, std::abs(std::min(x(p) / e_bb_eV, active[p] ? mult : 0.0)));
    }
    if (!changed && stats.residual <= spec.residual_tolerance) {
      stats.converged = true;
      break;
    }
  }

  for (int p = 0; p < n; ++p) u[node_of[p]] = std::max(0.0, x(p));
  if (!stats.converged) {
    throw SolverError("free-boundary iteration did not settle within the iteration budget", stats.iterations,
                      stats.residual);
  }
  return finish();
}

}  // namespace chargetune

#include "cauchyfem/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cauchyfem {

namespace {

void check_trace_size(const StiffnessSystem& sys, const Trace& t, const char* where) {
  if (t.values.size() != sys.part.node_count(t.region))
    throw std::invalid_argument(std::string(where) + ": trace length " +
                                std::to_string(t.values.size()) + " does not match region " +
                                region_name(t.region) + " node count " +
                                std::to_string(sys.part.node_count(t.region)));
}

// Jacobi-preconditioned CG on an SPD (or consistent singular) sparse system.
// When project_constants is set the constant mode is removed from the residual
// every iteration; the returned iterate then solves the system up to an
// additive constant.
Vector pcg(const SparseMatrix& A, const Vector& b, double rtol, int max_iters,
           bool project_constants) {
  const auto dim = b.size();
  Vector x = Vector::Zero(dim);
  if (dim == 0) return x;

  Vector diag_inv(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double d = A.coeff(i, i);
    diag_inv[i] = d > 0.0 ? 1.0 / d : 1.0;
  }

  auto deflate = [&](Vector& v) {
    if (project_constants) v.array() -= v.mean();
  };

  Vector r = b;
  deflate(r);
  const double target = rtol * r.norm();
  if (r.norm() == 0.0) return x;

  Vector z = diag_inv.asDiagonal() * r;
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iters; ++it) {
    if (r.norm() <= target) return x;
    Vector Ap = A * p;
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0)
      throw std::runtime_error("pcg: lost positive definiteness (p'Ap = " + std::to_string(pAp) +
                               ")");
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    deflate(r);
    z = diag_inv.asDiagonal() * r;
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (r.norm() <= target) return x;
  throw std::runtime_error("pcg: no convergence after " + std::to_string(max_iters) +
                           " iterations, relative residual " +
                           std::to_string(r.norm() / (target / rtol)));
}

int solver_cap(const StiffnessSystem& sys) {
  return sys.solver_max_iters > 0 ? sys.solver_max_iters : 10 * sys.n;
}

}  // namespace

Trace dirichlet_on(Region r, Vector values) {
  return {r, Trace::Kind::Dirichlet, std::move(values)};
}

Trace weak_neumann_on(Region r, Vector weights) {
  return {r, Trace::Kind::WeakNeumann, std::move(weights)};
}

Trace zero_dirichlet(const BoundaryPartition& part, Region r) {
  return dirichlet_on(r, Vector::Zero(part.node_count(r)));
}

Trace zero_weak_neumann(const BoundaryPartition& part, Region r) {
  return weak_neumann_on(r, Vector::Zero(part.node_count(r)));
}

StiffnessSystem assemble(const Mesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> kt;
  kt.reserve(9 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const Vec2& p0 = mesh.vertices[t[0]];
    const Vec2& p1 = mesh.vertices[t[1]];
    const Vec2& p2 = mesh.vertices[t[2]];
    const double area2 = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    if (area2 <= 0.0) throw std::invalid_argument("assemble: non-positive triangle orientation");
    // Gradient of basis i is (b_i, c_i) / area2 with (b, c) from the opposite edge.
    const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        kt.emplace_back(t[i], t[j], (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2));
  }

  StiffnessSystem sys{mesh, BoundaryPartition(mesh), {}, {}, {}, n};
  sys.K.resize(n, n);
  sys.K.setFromTriplets(kt.begin(), kt.end());

  for (Region r : {Region::S, Region::B}) {
    std::vector<Eigen::Triplet<double>> mt;
    for (const BoundaryEdge& e : sys.part.edges(r)) {
      const double dx = mesh.vertices[e.a].x - mesh.vertices[e.b].x;
      const double dy = mesh.vertices[e.a].y - mesh.vertices[e.b].y;
      const double len = std::hypot(dx, dy);
      mt.emplace_back(e.a, e.a, len / 3.0);
      mt.emplace_back(e.b, e.b, len / 3.0);
      mt.emplace_back(e.a, e.b, len / 6.0);
      mt.emplace_back(e.b, e.a, len / 6.0);
    }
    SparseMatrix& M = (r == Region::S) ? sys.M_S : sys.M_B;
    M.resize(n, n);
    M.setFromTriplets(mt.begin(), mt.end());
  }
  return sys;
}

Vector assemble_load(const Mesh& mesh, const VolumeLoad& f) {
  const int n = static_cast<int>(mesh.vertices.size());
  Vector F = Vector::Zero(n);
  if (f.is_zero()) return F;
  if (f.nodal.size() != 0 && f.nodal.size() != n)
    throw std::invalid_argument("assemble_load: nodal load length does not match vertex count");
  for (const auto& t : mesh.triangles) {
    const Vec2& p0 = mesh.vertices[t[0]];
    const Vec2& p1 = mesh.vertices[t[1]];
    const Vec2& p2 = mesh.vertices[t[2]];
    const double area =
        0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    if (f.nodal.size() == 0) {
      for (int i = 0; i < 3; ++i) F[t[i]] += f.constant * area / 3.0;
    } else {
      // Local mass action: area/12 * (2 f_i + f_j + f_k).
      const double fv[3] = {f.nodal[t[0]], f.nodal[t[1]], f.nodal[t[2]]};
      for (int i = 0; i < 3; ++i)
        F[t[i]] += area / 12.0 * (2.0 * fv[i] + fv[(i + 1) % 3] + fv[(i + 2) % 3]);
    }
  }
  return F;
}

Vector restrict_to_region(const StiffnessSystem& sys, Region r, const Vector& full) {
  const auto& nodes = sys.part.nodes(r);
  Vector out(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) out[i] = full[nodes[i]];
  return out;
}

void scatter_add(const StiffnessSystem& sys, Region r, const Vector& weights, Vector& full) {
  const auto& nodes = sys.part.nodes(r);
  if (weights.size() != static_cast<Eigen::Index>(nodes.size()))
    throw std::invalid_argument("scatter_add: weight length does not match region node count");
  for (size_t i = 0; i < nodes.size(); ++i) full[nodes[i]] += weights[i];
}

Vector scattered(const StiffnessSystem& sys, const Trace& t) {
  Vector full = Vector::Zero(sys.n);
  scatter_add(sys, t.region, t.values, full);
  return full;
}

Trace trace_of(const StiffnessSystem& sys, Region r, const Field& u) {
  return dirichlet_on(r, restrict_to_region(sys, r, u));
}

Vector zero_interface(const StiffnessSystem& sys, Region r, Vector values) {
  for (int v : sys.part.interface_nodes()) {
    const int li = sys.part.local_index(r, v);
    if (li >= 0) values[li] = 0.0;
  }
  return values;
}

bool vanishes_at_interface(const StiffnessSystem& sys, const Trace& t, double tol) {
  for (int v : sys.part.interface_nodes()) {
    const int li = sys.part.local_index(t.region, v);
    if (li >= 0 && std::abs(t.values[li]) > tol) return false;
  }
  return true;
}

Field solve_constrained(const StiffnessSystem& sys, const Vector& rhs,
                        const std::vector<Trace>& dirichlet) {
  if (rhs.size() != sys.n)
    throw std::invalid_argument("solve_constrained: rhs length does not match vertex count");

  std::vector<char> fixed(sys.n, 0);
  Vector fixed_values = Vector::Zero(sys.n);
  for (const Trace& t : dirichlet) {
    if (t.kind != Trace::Kind::Dirichlet)
      throw std::invalid_argument("solve_constrained: only Dirichlet traces can be imposed");
    check_trace_size(sys, t, "solve_constrained");
    const auto& nodes = sys.part.nodes(t.region);
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (!fixed[nodes[i]]) {  // first listed trace wins at shared nodes
        fixed[nodes[i]] = 1;
        fixed_values[nodes[i]] = t.values[i];
      }
    }
  }

  std::vector<int> free_of_full(sys.n, -1);
  std::vector<int> free_nodes;
  for (int i = 0; i < sys.n; ++i) {
    if (!fixed[i]) {
      free_of_full[i] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(i);
    }
  }
  if (free_nodes.size() == static_cast<size_t>(sys.n))
    throw std::invalid_argument("solve_constrained: needs at least one Dirichlet node");

  const Vector lifted = sys.K * fixed_values;
  Vector b(free_nodes.size());
  for (size_t i = 0; i < free_nodes.size(); ++i) b[i] = rhs[free_nodes[i]] - lifted[free_nodes[i]];

  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < sys.K.outerSize(); ++col) {
    if (free_of_full[col] < 0) continue;
    for (SparseMatrix::InnerIterator it(sys.K, col); it; ++it) {
      if (free_of_full[it.row()] >= 0)
        triplets.emplace_back(free_of_full[it.row()], free_of_full[col], it.value());
    }
  }
  SparseMatrix A(free_nodes.size(), free_nodes.size());
  A.setFromTriplets(triplets.begin(), triplets.end());

  const Vector x = pcg(A, b, sys.solver_rtol, solver_cap(sys), false);
  Field u = fixed_values;
  for (size_t i = 0; i < free_nodes.size(); ++i) u[free_nodes[i]] = x[i];
  return u;
}

Field solve_mixed(const StiffnessSystem& sys, const VolumeLoad& f,
                  const std::vector<Trace>& bcs) {
  Vector rhs = assemble_load(sys.mesh, f);
  std::vector<Trace> dirichlet;
  for (const Trace& t : bcs) {
    check_trace_size(sys, t, "solve_mixed");
    if (t.kind == Trace::Kind::Dirichlet)
      dirichlet.push_back(t);
    else
      scatter_add(sys, t.region, t.values, rhs);
  }
  if (dirichlet.empty())
    throw std::invalid_argument("solve_mixed: needs at least one Dirichlet trace");
  return solve_constrained(sys, rhs, dirichlet);
}

Trace weak_normal_derivative(const StiffnessSystem& sys, const Field& u, const VolumeLoad& f,
                             Region region) {
  const Vector residual = sys.K * u - assemble_load(sys.mesh, f);
  return weak_neumann_on(region, restrict_to_region(sys, region, residual));
}

Field solve_neumann_mean_constrained(const StiffnessSystem& sys, const Vector& rhs,
                                     Region mean_region, double mean_target) {
  if (rhs.size() != sys.n)
    throw std::invalid_argument("solve_neumann_mean_constrained: rhs length mismatch");
  const double imbalance = rhs.sum();
  const double scale = rhs.lpNorm<1>();
  if (scale > 0.0 && std::abs(imbalance) > 1e-10 * scale)
    throw std::invalid_argument(
        "solve_neumann_mean_constrained: incompatible rhs, entries sum to " +
        std::to_string(imbalance));
  Field u = pcg(sys.K, rhs, sys.solver_rtol, solver_cap(sys), true);
  u.array() += mean_target - region_mean(sys, mean_region, u);
  return u;
}

Field solve_neumann_mean_constrained(const StiffnessSystem& sys, const Trace& g_s,
                                     const Trace& g_b, Region mean_region, double mean_target) {
  if (g_s.kind != Trace::Kind::WeakNeumann || g_b.kind != Trace::Kind::WeakNeumann)
    throw std::invalid_argument("solve_neumann_mean_constrained: traces must be WeakNeumann");
  check_trace_size(sys, g_s, "solve_neumann_mean_constrained");
  check_trace_size(sys, g_b, "solve_neumann_mean_constrained");
  Vector rhs = scattered(sys, g_s);
  scatter_add(sys, g_b.region, g_b.values, rhs);
  return solve_neumann_mean_constrained(sys, rhs, mean_region, mean_target);
}

double region_measure(const StiffnessSystem& sys, Region r) {
  return sys.part.length(r);
}

double region_integral(const StiffnessSystem& sys, Region r, const Field& u) {
  return Vector::Ones(sys.n).dot(sys.boundary_mass(r) * u);
}

double region_mean(const StiffnessSystem& sys, Region r, const Field& u) {
  return region_integral(sys, r, u) / region_measure(sys, r);
}

}  // namespace cauchyfem

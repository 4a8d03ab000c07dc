#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <vector>

#include "cauchyfem/mesh.hpp"

namespace cauchyfem {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// P1 nodal function on the mesh; one value per vertex.
using Field = Vector;

// Boundary data attached to one region, indexed by the BoundaryPartition node
// order of that region.
//   Dirichlet:   prescribed nodal values.
//   WeakNeumann: weights g_i of the boundary functional <g, phi_i>; these are
//                assembled integrals, never pointwise flux values.
struct Trace {
  enum class Kind { Dirichlet, WeakNeumann };
  Region region = Region::S;
  Kind kind = Kind::Dirichlet;
  Vector values;
};

Trace dirichlet_on(Region r, Vector values);
Trace weak_neumann_on(Region r, Vector weights);
Trace zero_dirichlet(const BoundaryPartition& part, Region r);
Trace zero_weak_neumann(const BoundaryPartition& part, Region r);

// Volume source: a constant or a P1 nodal interpolant.
struct VolumeLoad {
  double constant = 0.0;
  Vector nodal;  // empty means constant load

  static VolumeLoad uniform(double c) { return {c, {}}; }
  static VolumeLoad interpolant(Vector values) { return {0.0, std::move(values)}; }
  bool is_zero() const { return nodal.size() == 0 && constant == 0.0; }
};

// Assembled P1 operators for one mesh. K is the full stiffness matrix with
// the constants as kernel; M_S and M_B are boundary mass matrices supported
// on the region node sets. The mesh and partition ride along because nearly
// every operation needs them.
struct StiffnessSystem {
  Mesh mesh;
  BoundaryPartition part;
  SparseMatrix K;
  SparseMatrix M_S;
  SparseMatrix M_B;
  int n = 0;

  // Inner linear solver: PCG with Jacobi preconditioner on the reduced SPD
  // system. All identity tests assume solves are accurate to ~rtol.
  double solver_rtol = 1e-12;
  int solver_max_iters = 0;  // 0 means the default cap of 10 * n

  const SparseMatrix& boundary_mass(Region r) const { return r == Region::S ? M_S : M_B; }
};

StiffnessSystem assemble(const Mesh& mesh);

// Assembled load vector F_i = integral of f * phi_i.
Vector assemble_load(const Mesh& mesh, const VolumeLoad& f);

// Gather the entries of a full-length vector at the region's nodes.
Vector restrict_to_region(const StiffnessSystem& sys, Region r, const Vector& full);
// Add region-indexed weights into a full-length vector.
void scatter_add(const StiffnessSystem& sys, Region r, const Vector& weights, Vector& full);
Vector scattered(const StiffnessSystem& sys, const Trace& t);

// Dirichlet trace of a field on a region.
Trace trace_of(const StiffnessSystem& sys, Region r, const Field& u);

// Zero out the interface entries of a region-indexed value vector.
Vector zero_interface(const StiffnessSystem& sys, Region r, Vector values);
bool vanishes_at_interface(const StiffnessSystem& sys, const Trace& t, double tol = 1e-12);

// Mixed boundary-value solve: stiffness against the load plus any WeakNeumann
// traces, Dirichlet traces imposed by elimination. Where two Dirichlet traces
// meet (interface nodes), the first one listed wins. At least one Dirichlet
// node is required for coercivity.
Field solve_mixed(const StiffnessSystem& sys, const VolumeLoad& f,
                  const std::vector<Trace>& bcs);

// Same solve with a fully assembled right-hand side.
Field solve_constrained(const StiffnessSystem& sys, const Vector& rhs,
                        const std::vector<Trace>& dirichlet);

// Weak normal derivative on a region: the residual K u - F restricted to the
// region's nodes, F the assembled load. Interface entries carry the combined
// reaction of both regions and are kept; norms and homogeneous solves never
// read them. No geometric normals are involved.
Trace weak_normal_derivative(const StiffnessSystem& sys, const Field& u,
                             const VolumeLoad& f, Region region);

// Pure-Neumann solve K u = rhs for compatible rhs (entries summing to zero
// within 1e-10 of the l1 scale), with the constant mode projected out during
// PCG and the additive constant fixed so that the M-weighted mean of u over
// mean_region equals mean_target.
Field solve_neumann_mean_constrained(const StiffnessSystem& sys, const Vector& rhs,
                                     Region mean_region, double mean_target);
Field solve_neumann_mean_constrained(const StiffnessSystem& sys, const Trace& g_s,
                                     const Trace& g_b, Region mean_region,
                                     double mean_target);

// Region measure, integral, and M-weighted mean of a field over a region.
double region_measure(const StiffnessSystem& sys, Region r);
double region_integral(const StiffnessSystem& sys, Region r, const Field& u);
double region_mean(const StiffnessSystem& sys, Region r, const Field& u);

}  // namespace cauchyfem

#pragma once

#include "cauchyfem/fem.hpp"

namespace cauchyfem {

// The three boundary spaces realized through harmonic representatives:
//   HminusHalf: flux data; representative has the given weak flux on the
//               region and vanishes on the rest of the boundary.
//   Hhalf00:    Dirichlet data vanishing at the interface; representative
//               carries it on the region and is zero elsewhere on the boundary.
//   Hhalf:      free Dirichlet data; representative carries it on the region
//               with zero weak flux on the rest, norm augmented by the
//               squared region mean so constants are not null.
enum class TraceSpace { HminusHalf, Hhalf00, Hhalf };

// Harmonic representative of a boundary-space element. All inner products
// below are Dirichlet energies of these fields (plus the mean term for
// Hhalf); the field itself is the canonical storage of the element.
struct HarmonicRep {
  Field field;
  TraceSpace space = TraceSpace::Hhalf00;
  Region region = Region::S;
  double region_mean = 0.0;  // M-weighted mean over `region`; used by Hhalf only
};

// Lift flux data psi (WeakNeumann on its region) to the representative with
// weak flux psi there and zero Dirichlet values on the complementary region.
HarmonicRep lift_neumann(const StiffnessSystem& sys, const Trace& psi);

// Lift Dirichlet data phi vanishing at the interface to the representative
// equal to phi on its region and zero on the rest of the boundary. Nonzero
// interface values violate the space and are rejected.
HarmonicRep lift_dirichlet_00(const StiffnessSystem& sys, const Trace& phi);

// Lift free Dirichlet data phi to the representative equal to phi on its
// region with zero weak flux on the complement.
HarmonicRep lift_h12(const StiffnessSystem& sys, const Trace& phi);

// Inner product of two representatives of the same space and region.
double inner(const StiffnessSystem& sys, const HarmonicRep& a, const HarmonicRep& b);
double norm(const StiffnessSystem& sys, const HarmonicRep& a);

// Norm of trace data through one lift.
double trace_norm(const StiffnessSystem& sys, const Trace& t, TraceSpace space);

// Field-level building blocks for solver code that manages representatives
// directly: plain Dirichlet energy, and the Hhalf inner product with the
// mean term over a region.
double energy_inner(const StiffnessSystem& sys, const Field& a, const Field& b);
double h12_inner(const StiffnessSystem& sys, Region r, const Field& a, const Field& b);

// L2 inner product of nodal boundary values on a region (boundary mass).
double l2_inner(const StiffnessSystem& sys, Region r, const Vector& a, const Vector& b);
double l2_norm(const StiffnessSystem& sys, Region r, const Vector& a);

}  // namespace cauchyfem

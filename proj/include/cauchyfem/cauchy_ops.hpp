#pragma once

#include "cauchyfem/fem.hpp"
#include "cauchyfem/sobolev.hpp"

namespace cauchyfem {

// One Cauchy problem instance: both data on S, source in the volume.
// sigma is Dirichlet, tau is WeakNeumann.
struct CauchyData {
  Trace sigma;
  Trace tau;
  VolumeLoad f;
};

CauchyData homogeneous_data(const StiffnessSystem& sys);

// Solution operators. solve_N keeps the Dirichlet datum on S and takes a
// trial flux on B; solve_D keeps the flux datum on S and takes a trial trace
// on B. The 0-suffixed versions are their homogeneous parts (f = 0, zero S
// data), so every operator splits affinely as op(data, x) = op(data, 0) + op0(x).
Field solve_N(const StiffnessSystem& sys, const CauchyData& data, const Trace& psi_b);
Field solve_D(const StiffnessSystem& sys, const CauchyData& data, const Trace& phi_b);
Field solve_N0(const StiffnessSystem& sys, const Trace& psi_b);
Field solve_D0(const StiffnessSystem& sys, const Trace& phi_b);

// Forward maps to S: the flux of the solve_N field on S, and the trace of
// the solve_D field on S.
Trace op_N(const StiffnessSystem& sys, const CauchyData& data, const Trace& psi_b);
Trace op_N0(const StiffnessSystem& sys, const Trace& psi_b);
Trace op_D(const StiffnessSystem& sys, const CauchyData& data, const Trace& phi_b);
Trace op_D0(const StiffnessSystem& sys, const Trace& phi_b);

// Alternating-method updates on B: op_KM maps a flux to the flux of the
// follow-up solve_D; op_MK maps a trace to the trace of the follow-up
// solve_N (the same two solves in the opposite order).
Trace op_KM(const StiffnessSystem& sys, const CauchyData& data, const Trace& psi_b);
Trace op_KM0(const StiffnessSystem& sys, const Trace& psi_b);
Trace op_MK(const StiffnessSystem& sys, const CauchyData& data, const Trace& phi_b);
Trace op_MK0(const StiffnessSystem& sys, const Trace& phi_b);

// The trace extension used as the affine offset of the Dirichlet-form
// iterations: one op_MK applied to the zero trace.
Trace sigma_extension(const StiffnessSystem& sys, const CauchyData& data);

// Adjoint of op_N0 between the flux spaces: lift xi on S, read the weak flux
// of the lift on B. One solve.
Trace adjoint_N0(const StiffnessSystem& sys, const Trace& xi_s);

// Adjoint of op_D0 between the interface-vanishing Dirichlet spaces: lift
// gamma on S, then solve with the negated weak flux of the lift on B and
// zero Dirichlet values on S; the result's B-trace is the adjoint value.
// Two solves.
Trace adjoint_D0(const StiffnessSystem& sys, const Trace& gamma_s);

// Representative-level shortcuts used by the conjugate-gradient solvers.
// d0_on_rep: w vanishes on the boundary except B; returns the representative
// of op_D0(w|_B), which vanishes on B. One solve plus a subtraction.
Field d0_on_rep(const StiffnessSystem& sys, const Field& w);
// d0star_on_rep: w vanishes on the boundary except S; returns the
// representative of adjoint_D0(w|_S): zero on S, free elsewhere with
// right-hand side -(K w) at the free rows. One solve.
Field d0star_on_rep(const StiffnessSystem& sys, const Field& w);

// Dirichlet-to-Neumann map on S: harmonic extension of gamma with zero weak
// flux on B, returning its weak flux on S.
Trace op_FDN(const StiffnessSystem& sys, const Trace& gamma_s);

// Adjoint of the L2(S)-embedded op_D0. Solves the pure-Neumann problem with
// weak flux M_S * gamma on S, the compensating constant flux on B, and the
// B-mean pinned to the integral of gamma over S. The B-trace of the solution
// is the adjoint output; the full field is kept for the re-lift.
struct EmbeddedAdjoint {
  Field field;
  Trace trace_b;  // Dirichlet values on B
};
EmbeddedAdjoint iota_d0_star(const StiffnessSystem& sys, const Vector& gamma_s_nodal);

}  // namespace cauchyfem

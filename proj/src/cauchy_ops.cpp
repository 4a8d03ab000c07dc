#include "cauchyfem/cauchy_ops.hpp"

#include <stdexcept>

namespace cauchyfem {

namespace {

void check_data(const CauchyData& data) {
  if (data.sigma.region != Region::S || data.sigma.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("CauchyData: sigma must be Dirichlet on S");
  if (data.tau.region != Region::S || data.tau.kind != Trace::Kind::WeakNeumann)
    throw std::invalid_argument("CauchyData: tau must be WeakNeumann on S");
}

void check_flux_b(const Trace& psi_b) {
  if (psi_b.region != Region::B || psi_b.kind != Trace::Kind::WeakNeumann)
    throw std::invalid_argument("expected a WeakNeumann trace on B");
}

void check_trace_b(const Trace& phi_b) {
  if (phi_b.region != Region::B || phi_b.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("expected a Dirichlet trace on B");
}

}  // namespace

CauchyData homogeneous_data(const StiffnessSystem& sys) {
  return {zero_dirichlet(sys.part, Region::S), zero_weak_neumann(sys.part, Region::S),
          VolumeLoad{}};
}

Field solve_N(const StiffnessSystem& sys, const CauchyData& data, const Trace& psi_b) {
  check_data(data);
  check_flux_b(psi_b);
  // sigma listed first so its values win at the interface.
  return solve_mixed(sys, data.f, {data.sigma, psi_b});
}

Field solve_D(const StiffnessSystem& sys, const CauchyData& data, const Trace& phi_b) {
  check_data(data);
  check_trace_b(phi_b);
  return solve_mixed(sys, data.f, {phi_b, data.tau});
}

Field solve_N0(const StiffnessSystem& sys, const Trace& psi_b) {
  check_flux_b(psi_b);
  return solve_mixed(sys, VolumeLoad{}, {zero_dirichlet(sys.part, Region::S), psi_b});
}

Field solve_D0(const StiffnessSystem& sys, const Trace& phi_b) {
  check_trace_b(phi_b);
  return solve_mixed(sys, VolumeLoad{}, {phi_b, zero_weak_neumann(sys.part, Region::S)});
}

Trace op_N(const StiffnessSystem& sys, const CauchyData& data, const Trace& psi_b) {
  return weak_normal_derivative(sys, solve_N(sys, data, psi_b), data.f, Region::S);
}

Trace op_N0(const StiffnessSystem& sys, const Trace& psi_b) {
  return weak_normal_derivative(sys, solve_N0(sys, psi_b), VolumeLoad{}, Region::S);
}

Trace op_D(const StiffnessSystem& sys, const CauchyData& data, const Trace& phi_b) {
  return trace_of(sys, Region::S, solve_D(sys, data, phi_b));
}

Trace op_D0(const StiffnessSystem& sys, const Trace& phi_b) {
  return trace_of(sys, Region::S, solve_D0(sys, phi_b));
}

Trace op_KM(const StiffnessSystem& sys, const CauchyData& data, const Trace& psi_b) {
  const Field u1 = solve_N(sys, data, psi_b);
  const Field u2 = solve_D(sys, data, trace_of(sys, Region::B, u1));
  return weak_normal_derivative(sys, u2, data.f, Region::B);
}

Trace op_KM0(const StiffnessSystem& sys, const Trace& psi_b) {
  const Field u1 = solve_N0(sys, psi_b);
  const Field u2 = solve_D0(sys, trace_of(sys, Region::B, u1));
  return weak_normal_derivative(sys, u2, VolumeLoad{}, Region::B);
}

Trace op_MK(const StiffnessSystem& sys, const CauchyData& data, const Trace& phi_b) {
  const Field u1 = solve_D(sys, data, phi_b);
  const Field u2 = solve_N(sys, data, weak_normal_derivative(sys, u1, data.f, Region::B));
  return trace_of(sys, Region::B, u2);
}

Trace op_MK0(const StiffnessSystem& sys, const Trace& phi_b) {
  const Field u1 = solve_D0(sys, phi_b);
  const Field u2 = solve_N0(sys, weak_normal_derivative(sys, u1, VolumeLoad{}, Region::B));
  return trace_of(sys, Region::B, u2);
}

Trace sigma_extension(const StiffnessSystem& sys, const CauchyData& data) {
  return op_MK(sys, data, zero_dirichlet(sys.part, Region::B));
}

Trace adjoint_N0(const StiffnessSystem& sys, const Trace& xi_s) {
  if (xi_s.region != Region::S || xi_s.kind != Trace::Kind::WeakNeumann)
    throw std::invalid_argument("adjoint_N0: expected a WeakNeumann trace on S");
  const HarmonicRep q = lift_neumann(sys, xi_s);
  return weak_normal_derivative(sys, q.field, VolumeLoad{}, Region::B);
}

Trace adjoint_D0(const StiffnessSystem& sys, const Trace& gamma_s) {
  if (gamma_s.region != Region::S || gamma_s.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("adjoint_D0: expected a Dirichlet trace on S");
  const HarmonicRep q = lift_dirichlet_00(sys, gamma_s);
  const Field r = d0star_on_rep(sys, q.field);
  return trace_of(sys, Region::B, r);
}

Field d0_on_rep(const StiffnessSystem& sys, const Field& w) {
  return solve_D0(sys, trace_of(sys, Region::B, w)) - w;
}

Field d0star_on_rep(const StiffnessSystem& sys, const Field& w) {
  // Adjoint pairing flips the orientation of the flux handed across: the
  // free-row right-hand side is the negated residual of w.
  const Vector rhs = -(sys.K * w);
  return solve_constrained(sys, rhs, {zero_dirichlet(sys.part, Region::S)});
}

Trace op_FDN(const StiffnessSystem& sys, const Trace& gamma_s) {
  if (gamma_s.region != Region::S || gamma_s.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("op_FDN: expected a Dirichlet trace on S");
  const HarmonicRep z = lift_h12(sys, gamma_s);
  return weak_normal_derivative(sys, z.field, VolumeLoad{}, Region::S);
}

EmbeddedAdjoint iota_d0_star(const StiffnessSystem& sys, const Vector& gamma_s_nodal) {
  if (gamma_s_nodal.size() != sys.part.node_count(Region::S))
    throw std::invalid_argument("iota_d0_star: value length does not match S node count");
  Vector gamma_full = Vector::Zero(sys.n);
  scatter_add(sys, Region::S, gamma_s_nodal, gamma_full);

  const Vector flux_s = sys.M_S * gamma_full;
  const double integral_s = flux_s.sum();
  const Vector rhs = flux_s - (integral_s / sys.part.length(Region::B)) *
                                  (sys.M_B * Vector::Ones(sys.n));
  Field w = solve_neumann_mean_constrained(sys, rhs, Region::B, integral_s);
  Trace tb = trace_of(sys, Region::B, w);
  return {std::move(w), std::move(tb)};
}

}  // namespace cauchyfem

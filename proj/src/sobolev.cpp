#include "cauchyfem/sobolev.hpp"

#include <cmath>
#include <stdexcept>

namespace cauchyfem {

namespace {

void check_pair(const HarmonicRep& a, const HarmonicRep& b) {
  if (a.space != b.space || a.region != b.region)
    throw std::invalid_argument("inner: representatives live in different spaces");
}

}  // namespace

HarmonicRep lift_neumann(const StiffnessSystem& sys, const Trace& psi) {
  if (psi.kind != Trace::Kind::WeakNeumann)
    throw std::invalid_argument("lift_neumann: flux data must be a WeakNeumann trace");
  Field v = solve_mixed(sys, VolumeLoad{}, {zero_dirichlet(sys.part, complement(psi.region)), psi});
  return {std::move(v), TraceSpace::HminusHalf, psi.region, 0.0};
}

HarmonicRep lift_dirichlet_00(const StiffnessSystem& sys, const Trace& phi) {
  if (phi.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("lift_dirichlet_00: data must be a Dirichlet trace");
  if (!vanishes_at_interface(sys, phi))
    throw std::invalid_argument("lift_dirichlet_00: data does not vanish at the interface");
  // Zero on the complement listed first so interface nodes stay pinned at zero.
  Field v = solve_mixed(sys, VolumeLoad{}, {zero_dirichlet(sys.part, complement(phi.region)), phi});
  return {std::move(v), TraceSpace::Hhalf00, phi.region, 0.0};
}

HarmonicRep lift_h12(const StiffnessSystem& sys, const Trace& phi) {
  if (phi.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("lift_h12: data must be a Dirichlet trace");
  Field v = solve_mixed(sys, VolumeLoad{}, {phi, zero_weak_neumann(sys.part, complement(phi.region))});
  const double mean = region_mean(sys, phi.region, v);
  return {std::move(v), TraceSpace::Hhalf, phi.region, mean};
}

double inner(const StiffnessSystem& sys, const HarmonicRep& a, const HarmonicRep& b) {
  check_pair(a, b);
  double v = energy_inner(sys, a.field, b.field);
  if (a.space == TraceSpace::Hhalf) v += a.region_mean * b.region_mean;
  return v;
}

double norm(const StiffnessSystem& sys, const HarmonicRep& a) {
  return std::sqrt(std::max(0.0, inner(sys, a, a)));
}

double trace_norm(const StiffnessSystem& sys, const Trace& t, TraceSpace space) {
  switch (space) {
    case TraceSpace::HminusHalf:
      return norm(sys, lift_neumann(sys, t));
    case TraceSpace::Hhalf00:
      return norm(sys, lift_dirichlet_00(sys, t));
    case TraceSpace::Hhalf:
      return norm(sys, lift_h12(sys, t));
  }
  throw std::invalid_argument("trace_norm: unknown space");
}

double energy_inner(const StiffnessSystem& sys, const Field& a, const Field& b) {
  return a.dot(sys.K * b);
}

double h12_inner(const StiffnessSystem& sys, Region r, const Field& a, const Field& b) {
  return energy_inner(sys, a, b) + region_mean(sys, r, a) * region_mean(sys, r, b);
}

double l2_inner(const StiffnessSystem& sys, Region r, const Vector& a, const Vector& b) {
  const auto& nodes = sys.part.nodes(r);
  if (a.size() != static_cast<Eigen::Index>(nodes.size()) || b.size() != a.size())
    throw std::invalid_argument("l2_inner: value length does not match region node count");
  Vector fa = Vector::Zero(sys.n), fb = Vector::Zero(sys.n);
  scatter_add(sys, r, a, fa);
  scatter_add(sys, r, b, fb);
  return fa.dot(sys.boundary_mass(r) * fb);
}

double l2_norm(const StiffnessSystem& sys, Region r, const Vector& a) {
  return std::sqrt(std::max(0.0, l2_inner(sys, r, a, a)));
}

}  // namespace cauchyfem

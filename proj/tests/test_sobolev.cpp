#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

using namespace cauchyfem;
using testsupport::parabola_system;
using testsupport::random_flux;
using testsupport::random_trace00;
using testsupport::random_vector;
using testsupport::square_system;

TEST_SUITE("sobolev") {

TEST_CASE("flux lift satisfies its defining weak form") {
  // The representative v of flux psi on S is characterized by
  // energy(v, w) = psi . w|_S for every w vanishing on B and the interface.
  const StiffnessSystem sys = parabola_system(0.2);
  const Trace psi = random_flux(sys, Region::S, 61);
  const HarmonicRep v = lift_neumann(sys, psi);
  CHECK(v.space == TraceSpace::HminusHalf);

  for (std::uint64_t seed : {62, 63, 64}) {
    const Trace w00 = random_trace00(sys, Region::S, seed);
    const Field w = lift_dirichlet_00(sys, w00).field;
    const double lhs = energy_inner(sys, v.field, w);
    const double rhs = psi.values.dot(restrict_to_region(sys, Region::S, w));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }

  // Boundary side conditions: zero Dirichlet values on B.
  for (int vtx : sys.part.nodes(Region::B)) CHECK(std::abs(v.field[vtx]) < 1e-10);
}

TEST_CASE("interface-vanishing lift reproduces its data and nothing else") {
  const StiffnessSystem sys = parabola_system(0.2);
  const Trace phi = random_trace00(sys, Region::B, 65);
  const HarmonicRep v = lift_dirichlet_00(sys, phi);
  CHECK(v.space == TraceSpace::Hhalf00);

  const Vector back = restrict_to_region(sys, Region::B, v.field);
  CHECK((back - phi.values).lpNorm<Eigen::Infinity>() < 1e-14);
  for (int vtx : sys.part.nodes(Region::S)) CHECK(std::abs(v.field[vtx]) < 1e-14);

  Vector bad = phi.values;
  bad[0] = 1.0;  // interface node
  CHECK_THROWS_AS(lift_dirichlet_00(sys, dirichlet_on(Region::B, bad)),
                  std::invalid_argument);
  CHECK_THROWS_AS(lift_dirichlet_00(sys, random_flux(sys, Region::B, 66)),
                  std::invalid_argument);
}

TEST_CASE("free Dirichlet lift keeps its data and kills the far flux") {
  const StiffnessSystem sys = parabola_system(0.2);
  const Vector g = random_vector(sys.part.node_count(Region::B), 67);
  const HarmonicRep v = lift_h12(sys, dirichlet_on(Region::B, g));
  CHECK(v.space == TraceSpace::Hhalf);
  CHECK((restrict_to_region(sys, Region::B, v.field) - g).lpNorm<Eigen::Infinity>() == 0.0);

  // Zero weak flux on S away from the interface.
  const Trace flux_s = weak_normal_derivative(sys, v.field, VolumeLoad::uniform(0.0), Region::S);
  const Vector masked = zero_interface(sys, Region::S, flux_s.values);
  CHECK(masked.lpNorm<Eigen::Infinity>() < 1e-9 * (1.0 + g.lpNorm<Eigen::Infinity>()));

  CHECK(v.region_mean == doctest::Approx(region_mean(sys, Region::B, v.field)));
}

TEST_CASE("constant data has norm |c| in the free Dirichlet space") {
  // The representative of a constant is the constant field: zero energy,
  // mean c, so the norm reduces to |c| exactly.
  const StiffnessSystem sys = square_system(0.25);
  const Trace c = dirichlet_on(Region::B, Vector::Constant(sys.part.node_count(Region::B), -2.5));
  const HarmonicRep v = lift_h12(sys, c);
  CHECK((v.field.array() + 2.5).abs().maxCoeff() < 1e-10);
  CHECK(norm(sys, v) == doctest::Approx(2.5).epsilon(1e-10));

  // The same constant in the interface-vanishing space is illegal data.
  CHECK_THROWS_AS(lift_dirichlet_00(sys, c), std::invalid_argument);
}

TEST_CASE("zero-flux lift minimizes energy among extensions of the same data") {
  const StiffnessSystem sys = parabola_system(0.2);
  const Vector g = random_vector(sys.part.node_count(Region::B), 68);
  const Trace phi = dirichlet_on(Region::B, g);
  const double e_min = energy_inner(sys, lift_h12(sys, phi).field, lift_h12(sys, phi).field);

  // Competitors: harmonic extensions pinned to arbitrary values on S.
  for (std::uint64_t seed : {69, 70}) {
    const Field w = solve_mixed(
        sys, VolumeLoad::uniform(0.0),
        {phi, dirichlet_on(Region::S, random_vector(sys.part.node_count(Region::S), seed))});
    CHECK(e_min <= energy_inner(sys, w, w) * (1.0 + 1e-10));
  }
  const Field wz = solve_mixed(sys, VolumeLoad::uniform(0.0),
                               {phi, zero_dirichlet(sys.part, Region::S)});
  CHECK(e_min <= energy_inner(sys, wz, wz) * (1.0 + 1e-10));
}

TEST_CASE("inner products are bilinear and obey Cauchy-Schwarz") {
  const StiffnessSystem sys = square_system(0.2);
  for (TraceSpace space : {TraceSpace::HminusHalf, TraceSpace::Hhalf00, TraceSpace::Hhalf}) {
    auto make = [&](std::uint64_t seed) {
      const int nb = sys.part.node_count(Region::B);
      switch (space) {
        case TraceSpace::HminusHalf:
          return lift_neumann(sys, random_flux(sys, Region::B, seed));
        case TraceSpace::Hhalf00:
          return lift_dirichlet_00(sys, random_trace00(sys, Region::B, seed));
        default:
          return lift_h12(sys, dirichlet_on(Region::B, random_vector(nb, seed)));
      }
    };
    const HarmonicRep a = make(71);
    const HarmonicRep b = make(72);

    CHECK(inner(sys, a, b) == doctest::Approx(inner(sys, b, a)).epsilon(1e-12));
    const double na = norm(sys, a);
    const double nb = norm(sys, b);
    CHECK(na > 0.0);
    CHECK(std::abs(inner(sys, a, b)) <= na * nb * (1.0 + 1e-10));

    // Parallelogram law through a scaled sum representative.
    HarmonicRep apb = a;
    apb.field = a.field + b.field;
    apb.region_mean = a.region_mean + b.region_mean;
    const double lhs = norm(sys, apb) * norm(sys, apb);
    CHECK(lhs == doctest::Approx(na * na + 2.0 * inner(sys, a, b) + nb * nb).epsilon(1e-11));
  }
  CHECK_THROWS_AS(
      inner(sys, lift_neumann(sys, random_flux(sys, Region::B, 73)),
            lift_h12(sys, dirichlet_on(Region::B, random_vector(sys.part.node_count(Region::B), 74)))),
      std::invalid_argument);
}

TEST_CASE("trace_norm goes through the matching lift") {
  const StiffnessSystem sys = parabola_system(0.25);
  const Trace psi = random_flux(sys, Region::B, 75);
  const HarmonicRep v = lift_neumann(sys, psi);
  CHECK(trace_norm(sys, psi, TraceSpace::HminusHalf) == doctest::Approx(norm(sys, v)));

  const Trace phi = random_trace00(sys, Region::B, 76);
  CHECK(trace_norm(sys, phi, TraceSpace::Hhalf00) ==
        doctest::Approx(norm(sys, lift_dirichlet_00(sys, phi))));

  const Trace free_phi = dirichlet_on(Region::B, random_vector(sys.part.node_count(Region::B), 77));
  CHECK(trace_norm(sys, free_phi, TraceSpace::Hhalf) ==
        doctest::Approx(norm(sys, lift_h12(sys, free_phi))));
}

TEST_CASE("boundary L2 products match a hand-written edge sum") {
  const StiffnessSystem sys = parabola_system(0.25);
  const int ns = sys.part.node_count(Region::S);
  const Vector a = random_vector(ns, 78);
  const Vector b = random_vector(ns, 79);

  double expected = 0.0;
  for (const BoundaryEdge& e : sys.part.edges(Region::S)) {
    const Vec2 pa = sys.mesh.vertices[e.a];
    const Vec2 pb = sys.mesh.vertices[e.b];
    const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
    const int ia = sys.part.local_index(Region::S, e.a);
    const int ib = sys.part.local_index(Region::S, e.b);
    expected += len / 6.0 * (2.0 * a[ia] * b[ia] + a[ia] * b[ib] + a[ib] * b[ia] +
                             2.0 * a[ib] * b[ib]);
  }
  CHECK(l2_inner(sys, Region::S, a, b) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(l2_norm(sys, Region::S, a) ==
        doctest::Approx(std::sqrt(l2_inner(sys, Region::S, a, a))).epsilon(1e-13));

  // Ones integrate to the region measure.
  const Vector ones = Vector::Ones(ns);
  CHECK(l2_norm(sys, Region::S, ones) ==
        doctest::Approx(std::sqrt(region_measure(sys, Region::S))).epsilon(1e-13));

  CHECK_THROWS_AS(l2_inner(sys, Region::S, Vector::Ones(ns + 1), b), std::invalid_argument);
}

TEST_CASE("norms scale linearly and vanish only at zero") {
  const StiffnessSystem sys = square_system(0.25);
  const Trace psi = random_flux(sys, Region::B, 80);
  const double n1 = trace_norm(sys, psi, TraceSpace::HminusHalf);
  Trace psi3 = psi;
  psi3.values *= -3.0;
  CHECK(trace_norm(sys, psi3, TraceSpace::HminusHalf) == doctest::Approx(3.0 * n1).epsilon(1e-11));
  CHECK(n1 > 0.0);

  const Trace zero = zero_weak_neumann(sys.part, Region::B);
  CHECK(trace_norm(sys, zero, TraceSpace::HminusHalf) == 0.0);
  CHECK(trace_norm(sys, zero_dirichlet(sys.part, Region::B), TraceSpace::Hhalf00) == 0.0);
  CHECK(trace_norm(sys, zero_dirichlet(sys.part, Region::B), TraceSpace::Hhalf) == 0.0);
}

}  // TEST_SUITE

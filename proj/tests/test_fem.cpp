#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"

using namespace cauchyfem;
using testsupport::parabola_system;
using testsupport::random_vector;
using testsupport::square_system;

namespace {

Vector coordinate_field(const Mesh& m, double cx, double cy, double c0 = 0.0) {
  Vector u(static_cast<int>(m.vertices.size()));
  for (int i = 0; i < u.size(); ++i)
    u[i] = cx * m.vertices[i].x + cy * m.vertices[i].y + c0;
  return u;
}

}  // namespace

TEST_SUITE("fem") {

TEST_CASE("stiffness has constants in its kernel and is symmetric") {
  for (const StiffnessSystem& sys : {square_system(0.2), parabola_system(0.2)}) {
    const Vector ones = Vector::Ones(sys.n);
    CHECK((sys.K * ones).lpNorm<Eigen::Infinity>() < 1e-13);
    SparseMatrix diff = SparseMatrix(sys.K.transpose()) - sys.K;
    CHECK(Eigen::Map<const Vector>(diff.valuePtr(), diff.nonZeros())
              .lpNorm<Eigen::Infinity>() < 1e-14);
  }
}

TEST_CASE("energy of linear fields equals slope squared times area") {
  // P1 interpolation is exact on linears, so u' K u is a closed form.
  const StiffnessSystem sq = square_system(0.25);
  const Vector ux = coordinate_field(sq.mesh, 1.0, 0.0);
  const Vector uxy = coordinate_field(sq.mesh, 1.0, 2.0, 0.7);
  CHECK(ux.dot(sq.K * ux) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(uxy.dot(sq.K * uxy) == doctest::Approx(5.0).epsilon(1e-13));

  const StiffnessSystem pb = parabola_system(0.25);
  const double area = mesh_area(pb.mesh);
  const Vector v = coordinate_field(pb.mesh, 3.0, -1.0);
  CHECK(v.dot(pb.K * v) == doctest::Approx(10.0 * area).epsilon(1e-13));
}

TEST_CASE("load assembly integrates constants exactly") {
  const StiffnessSystem sys = parabola_system(0.25);
  const Vector F = assemble_load(sys.mesh, VolumeLoad::uniform(3.0));
  CHECK(F.sum() == doctest::Approx(3.0 * mesh_area(sys.mesh)).epsilon(1e-13));

  // A nodal interpolant of the constant must assemble to the same vector.
  const Vector Fn = assemble_load(
      sys.mesh, VolumeLoad::interpolant(Vector::Constant(sys.n, 3.0)));
  CHECK((F - Fn).lpNorm<Eigen::Infinity>() < 1e-13);

  // Linear load against the constant test function: integral of x over the
  // symmetric domain vanishes.
  const Vector Fx = assemble_load(
      sys.mesh, VolumeLoad::interpolant(coordinate_field(sys.mesh, 1.0, 0.0)));
  CHECK(Fx.sum() == doctest::Approx(0.0).epsilon(1e-13));

  CHECK_THROWS_AS(assemble_load(sys.mesh, VolumeLoad::interpolant(Vector::Ones(3))),
                  std::invalid_argument);
}

TEST_CASE("boundary mass matrices integrate the regions") {
  const StiffnessSystem sys = square_system(0.25);
  const Vector ones = Vector::Ones(sys.n);
  CHECK(ones.dot(sys.M_S * ones) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ones.dot(sys.M_B * ones) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(region_measure(sys, Region::S) == doctest::Approx(1.0));
  CHECK(region_measure(sys, Region::B) == doctest::Approx(3.0));

  // Integral of x over the top side in closed form.
  const Vector x = coordinate_field(sys.mesh, 1.0, 0.0);
  CHECK(region_integral(sys, Region::S, x) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(region_mean(sys, Region::S, x) == doctest::Approx(0.5).epsilon(1e-13));

  // The parabola arc length exceeds the chord length 2 and the polyline
  // shortens as it refines toward the smooth length.
  const StiffnessSystem pb1 = parabola_system(0.2);
  const StiffnessSystem pb2 = parabola_system(0.1);
  CHECK(region_measure(pb1, Region::S) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(region_measure(pb1, Region::B) > 2.0);
  CHECK(region_measure(pb2, Region::B) > region_measure(pb1, Region::B));
  const Vector onesp = Vector::Ones(pb1.n);
  CHECK(onesp.dot(pb1.M_B * onesp) ==
        doctest::Approx(region_measure(pb1, Region::B)).epsilon(1e-13));
}

TEST_CASE("restrict, scatter, and traces are consistent") {
  const StiffnessSystem sys = square_system(0.25);
  const int ns = sys.part.node_count(Region::S);
  const Vector w = random_vector(ns, 11);

  Vector full = Vector::Zero(sys.n);
  scatter_add(sys, Region::S, w, full);
  CHECK((restrict_to_region(sys, Region::S, full) - w).norm() == 0.0);

  const Vector sc = scattered(sys, dirichlet_on(Region::S, w));
  double off_region = 0.0;
  for (int v = 0; v < sys.n; ++v)
    if (sys.part.local_index(Region::S, v) < 0) off_region += std::abs(sc[v]);
  CHECK(off_region == 0.0);

  const Vector u = random_vector(sys.n, 12);
  const Trace t = trace_of(sys, Region::S, u);
  CHECK(t.kind == Trace::Kind::Dirichlet);
  for (int i = 0; i < ns; ++i) CHECK(t.values[i] == u[sys.part.nodes(Region::S)[i]]);

  CHECK_THROWS_AS(scatter_add(sys, Region::S, Vector::Ones(ns + 1), full),
                  std::invalid_argument);
}

TEST_CASE("interface masking") {
  const StiffnessSystem sys = square_system(0.25);
  const int ns = sys.part.node_count(Region::S);
  Vector w = Vector::Ones(ns);
  const Vector z = zero_interface(sys, Region::S, w);
  CHECK(z[0] == 0.0);
  CHECK(z[ns - 1] == 0.0);
  CHECK(z.sum() == doctest::Approx(ns - 2));
  CHECK(!vanishes_at_interface(sys, dirichlet_on(Region::S, w)));
  CHECK(vanishes_at_interface(sys, dirichlet_on(Region::S, z)));
}

TEST_CASE("full Dirichlet data reproduces a linear field") {
  for (const StiffnessSystem& sys : {square_system(0.2), parabola_system(0.2)}) {
    const Vector u_exact = coordinate_field(sys.mesh, 2.0, -1.0, 0.3);
    const Field u = solve_mixed(sys, VolumeLoad::uniform(0.0),
                                {trace_of(sys, Region::S, u_exact),
                                 trace_of(sys, Region::B, u_exact)});
    CHECK((u - u_exact).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("solve_constrained agrees with a dense direct factorization") {
  const StiffnessSystem sys = parabola_system(0.25);
  const Vector rhs = random_vector(sys.n, 21);
  const Vector g = random_vector(sys.part.node_count(Region::S), 22);
  const Field u = solve_constrained(sys, rhs, {dirichlet_on(Region::S, g)});

  // Independent route: assemble the same eliminated system densely and
  // factor it with LDLT.
  std::vector<int> free_ids;
  Vector fixed = Vector::Zero(sys.n);
  std::vector<bool> is_fixed(sys.n, false);
  for (int i = 0; i < g.size(); ++i) {
    const int v = sys.part.nodes(Region::S)[i];
    is_fixed[v] = true;
    fixed[v] = g[i];
  }
  for (int v = 0; v < sys.n; ++v)
    if (!is_fixed[v]) free_ids.push_back(v);
  const int nf = static_cast<int>(free_ids.size());
  const Eigen::MatrixXd Kd = Eigen::MatrixXd(sys.K);
  Eigen::MatrixXd A(nf, nf);
  Eigen::VectorXd b(nf);
  for (int r = 0; r < nf; ++r) {
    for (int c = 0; c < nf; ++c) A(r, c) = Kd(free_ids[r], free_ids[c]);
    b[r] = rhs[free_ids[r]] - Kd.row(free_ids[r]).dot(fixed);
  }
  const Eigen::VectorXd uf = A.ldlt().solve(b);
  Vector u_ref = fixed;
  for (int r = 0; r < nf; ++r) u_ref[free_ids[r]] = uf[r];

  CHECK((u - u_ref).norm() < 1e-9 * u_ref.norm());
}

TEST_CASE("mixed data round trip recovers the field and its weak flux") {
  const StiffnessSystem sys = parabola_system(0.2);
  const VolumeLoad f = VolumeLoad::uniform(2.0);
  const Trace sigma = dirichlet_on(Region::S, random_vector(sys.part.node_count(Region::S), 31));
  const Trace phi = dirichlet_on(Region::B, random_vector(sys.part.node_count(Region::B), 32));
  const Field u_star = solve_mixed(sys, f, {sigma, phi});

  const Trace tau_b = weak_normal_derivative(sys, u_star, f, Region::B);
  CHECK(tau_b.kind == Trace::Kind::WeakNeumann);
  const Field u = solve_mixed(sys, f, {sigma, tau_b});
  CHECK((u - u_star).norm() < 1e-9 * u_star.norm());

  // And the reverse reading: the recomputed weak flux matches away from the
  // interface (interface rows carry both regions' reactions).
  const Trace tau_back = weak_normal_derivative(sys, u, f, Region::B);
  const Vector dv = zero_interface(sys, Region::B, tau_back.values - tau_b.values);
  CHECK(dv.norm() < 1e-9 * tau_b.values.norm());
}

TEST_CASE("weak flux pairs with interior-solving fields by the Green identity") {
  const StiffnessSystem sys = square_system(0.2);
  const VolumeLoad f = VolumeLoad::uniform(1.5);
  const Field u = solve_mixed(
      sys, f,
      {dirichlet_on(Region::S, random_vector(sys.part.node_count(Region::S), 41)),
       dirichlet_on(Region::B, random_vector(sys.part.node_count(Region::B), 42))});
  const Trace tau_s = weak_normal_derivative(sys, u, f, Region::S);

  // Test function: zero on B and at the interface, free elsewhere.
  const Vector F = assemble_load(sys.mesh, f);
  const Vector wS =
      zero_interface(sys, Region::S, random_vector(sys.part.node_count(Region::S), 43));
  Vector w = random_vector(sys.n, 44);
  for (int v : sys.part.nodes(Region::B)) w[v] = 0.0;
  for (int i = 0; i < wS.size(); ++i) w[sys.part.nodes(Region::S)[i]] = wS[i];

  const double lhs = w.dot(sys.K * u) - w.dot(F);
  const double rhs = tau_s.values.dot(restrict_to_region(sys, Region::S, w));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("first listed Dirichlet trace wins at shared interface nodes") {
  const StiffnessSystem sys = square_system(0.25);
  const Trace s5 = dirichlet_on(Region::S, Vector::Constant(sys.part.node_count(Region::S), 5.0));
  const Trace b7 = dirichlet_on(Region::B, Vector::Constant(sys.part.node_count(Region::B), 7.0));
  const int pi = sys.part.interface_nodes()[0];

  const Field u_sb = solve_mixed(sys, VolumeLoad::uniform(0.0), {s5, b7});
  CHECK(u_sb[pi] == 5.0);
  const Field u_bs = solve_mixed(sys, VolumeLoad::uniform(0.0), {b7, s5});
  CHECK(u_bs[pi] == 7.0);
}

TEST_CASE("pure Neumann solve hits the prescribed mean and the equation") {
  const StiffnessSystem sys = parabola_system(0.2);
  const Vector u0 = random_vector(sys.n, 51);
  const Vector rhs = sys.K * u0;  // compatible by construction
  const Field u = solve_neumann_mean_constrained(sys, rhs, Region::B, 0.25);

  CHECK(region_mean(sys, Region::B, u) == doctest::Approx(0.25).epsilon(1e-11));
  CHECK((sys.K * u - rhs).norm() < 1e-8 * rhs.norm());

  // Same solution as u0 up to an additive constant.
  const Vector d = u - u0;
  CHECK((d.array() - d.mean()).abs().maxCoeff() < 1e-8);

  CHECK_THROWS_AS(solve_neumann_mean_constrained(sys, Vector::Unit(sys.n, 0), Region::B, 0.0),
                  std::invalid_argument);
}

TEST_CASE("solver input validation") {
  StiffnessSystem sys = square_system(0.25);
  CHECK_THROWS_AS(solve_mixed(sys, VolumeLoad::uniform(1.0),
                              {zero_weak_neumann(sys.part, Region::S),
                               zero_weak_neumann(sys.part, Region::B)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_mixed(sys, VolumeLoad::uniform(0.0),
                              {dirichlet_on(Region::S, Vector::Ones(2))}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_constrained(sys, Vector::Zero(3),
                                    {zero_dirichlet(sys.part, Region::S)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_constrained(sys, Vector::Zero(sys.n),
                                    {zero_weak_neumann(sys.part, Region::S)}),
                  std::invalid_argument);

  // A starved iteration cap must surface as an error, not a bad answer.
  sys.solver_max_iters = 2;
  CHECK_THROWS_AS(solve_mixed(sys, VolumeLoad::uniform(1.0),
                              {zero_dirichlet(sys.part, Region::S)}),
                  std::runtime_error);
}

TEST_CASE("assemble rejects flipped triangles") {
  Mesh m = build_unit_square(0.5, {Side::Top});
  std::swap(m.triangles[0][0], m.triangles[0][1]);
  CHECK_THROWS_AS(assemble(m), std::invalid_argument);
}

}  // TEST_SUITE

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cauchyfem/experiment.hpp"
#include "cauchyfem/rng.hpp"

namespace cf = cauchyfem;

namespace {

const char* reason_name(cf::StopReason r) {
  switch (r) {
    case cf::StopReason::Discrepancy:
      return "discrepancy";
    case cf::StopReason::IterationCap:
      return "iteration-cap";
    case cf::StopReason::Stagnation:
      return "stagnation";
  }
  return "unknown";
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct DomainFlags {
  bool square = false;
  double depth = 0.5;
  double h = 0.05;
};

void add_domain_flags(CLI::App* sub, DomainFlags& d) {
  sub->set_help_flag("--help", "print this help message and exit");
  auto* sq = sub->add_flag("--square", d.square, "unit square domain, S = top side");
  sub->add_flag("--parabola", "parabolic domain (default)")->excludes(sq);
  sub->add_option("--depth", d.depth, "parabola depth")->capture_default_str();
  sub->add_option("--h", d.h, "target mesh size")
      ->check(CLI::Range(1e-4, 0.999))
      ->capture_default_str();
}

struct RunFlags {
  DomainFlags domain;
  cf::ExperimentConfig cfg;
  std::string out_dir;
};

void add_run_flags(CLI::App* sub, RunFlags& r, bool with_algorithm) {
  add_domain_flags(sub, r.domain);
  sub->add_option("--f0", r.cfg.f0, "constant volume forcing")->capture_default_str();
  sub->add_option("--u0", r.cfg.u0, "bump height of the true base trace")->capture_default_str();
  sub->add_option("--s", r.cfg.s, "bump width of the true base trace")->capture_default_str();
  sub->add_option("--p", r.cfg.p, "noise percent of the peak field value")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--seed", r.cfg.seed, "noise seed")->capture_default_str();
  if (with_algorithm) {
    static const std::map<std::string, cf::Algorithm> names{
        {"km", cf::Algorithm::KM},
        {"landweber", cf::Algorithm::Landweber},
        {"cg-h12", cf::Algorithm::CgH12},
        {"cg-l2", cf::Algorithm::CgL2}};
    sub->add_option("--algorithm", r.cfg.algorithm, "iteration to run")
        ->transform(CLI::CheckedTransformer(names))
        ->default_str("km");
  }
  sub->add_option("--lambda", r.cfg.lambda, "discrepancy factor")
      ->check(CLI::Range(1.0, 100.0))
      ->capture_default_str();
  sub->add_option("--max-iter", r.cfg.max_iter, "iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tol", r.cfg.solver_tol, "inner solver relative tolerance")
      ->check(CLI::Range(1e-15, 1e-3))
      ->capture_default_str();
  sub->add_option("--out-dir", r.out_dir, "output directory")->required();
}

cf::ExperimentConfig resolve_config(const RunFlags& r) {
  cf::ExperimentConfig cfg = r.cfg;
  cfg.parabola = !r.domain.square;
  cfg.depth = r.domain.depth;
  cfg.h = r.domain.h;
  return cfg;
}

std::map<std::string, std::string> metric_lines(const std::string& prefix,
                                                const cf::RunResult& run) {
  std::map<std::string, std::string> m;
  m[prefix + "stop_iteration"] = std::to_string(run.metrics.stop_iteration);
  m[prefix + "stop_reason"] = reason_name(run.metrics.reason);
  m[prefix + "final_residual_l2"] = cf::format_double(run.metrics.final_residual_l2);
  m[prefix + "err_l2_b"] = cf::format_double(run.metrics.err_l2_b);
  m[prefix + "err_h00_b"] = cf::format_double(run.metrics.err_h00_b);
  m[prefix + "osc_near_pi"] = cf::format_double(run.metrics.osc_near_pi);
  m[prefix + "wall_seconds"] = cf::format_double(run.wall_seconds);
  return m;
}

void print_run(const std::string& name, const cf::RunResult& run, double lambda) {
  std::cout << name << ": stopped at k=" << run.metrics.stop_iteration << " ("
            << reason_name(run.metrics.reason) << "), residual_l2 "
            << short_double(run.metrics.final_residual_l2) << " vs level "
            << short_double(lambda * run.delta) << ", err_l2_b "
            << short_double(run.metrics.err_l2_b) << "\n";
}

int cmd_mesh(const DomainFlags& domain, const std::vector<cf::Side>& s_sides,
             const std::string& out) {
  cf::Mesh mesh;
  if (domain.square) {
    mesh = cf::build_unit_square(domain.h, s_sides);
  } else {
    mesh = cf::build_parabola_domain(domain.h, domain.depth);
  }
  const auto errors = cf::validate_mesh(mesh);
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "invalid mesh: " << e << "\n";
    return 1;
  }
  cf::save_mesh(mesh, out);
  const cf::BoundaryPartition part(mesh);
  std::cout << "wrote " << out << ": " << mesh.vertices.size() << " vertices, "
            << mesh.triangles.size() << " triangles, h_max " << short_double(mesh.h_max)
            << ", |S| " << short_double(part.length(cf::Region::S)) << ", |B| "
            << short_double(part.length(cf::Region::B)) << "\n";
  return 0;
}

int cmd_run(const RunFlags& flags) {
  const cf::ExperimentConfig cfg = resolve_config(flags);
  std::filesystem::create_directories(flags.out_dir);
  const auto dir = std::filesystem::path(flags.out_dir);

  const cf::PreparedInstance inst = cf::prepare_instance(cfg);
  const cf::RunResult run = cf::run_on_instance(inst, cfg, cfg.algorithm);

  const std::string alg = cf::algorithm_name(cfg.algorithm);
  cf::save_history(run.history, (dir / ("history_" + alg + ".csv")).string());

  // Landweber mirrors the alternating iteration, so its trace shares that column.
  const bool km_column =
      cfg.algorithm == cf::Algorithm::KM || cfg.algorithm == cf::Algorithm::Landweber;
  cf::write_text_file(
      (dir / "trace.csv").string(),
      cf::format_trace_table(inst.sys, inst.truth.phi_true, km_column ? &run.phi : nullptr,
                             cfg.algorithm == cf::Algorithm::CgH12 ? &run.phi : nullptr,
                             cfg.algorithm == cf::Algorithm::CgL2 ? &run.phi : nullptr));

  auto extra = metric_lines("", run);
  extra["delta"] = cf::format_double(run.delta);
  extra["u_max"] = cf::format_double(run.u_max);
  extra["vertices"] = std::to_string(inst.sys.n);
  extra["h_max"] = cf::format_double(inst.sys.mesh.h_max);
  if (cfg.algorithm == cf::Algorithm::Landweber)
    extra["trace_table_note"] = "km column carries the landweber trace";
  cf::write_text_file((dir / "manifest.txt").string(), cf::format_manifest(cfg, extra));

  print_run(alg, run, cfg.lambda);
  std::cout << "wrote history_" << alg << ".csv, trace.csv, manifest.txt in " << flags.out_dir
            << "\n";
  return 0;
}

int cmd_compare(const RunFlags& flags) {
  cf::ExperimentConfig cfg = resolve_config(flags);
  std::filesystem::create_directories(flags.out_dir);
  const auto dir = std::filesystem::path(flags.out_dir);

  const cf::ComparisonResult cmp = cf::compare_algorithms(cfg);
  cf::save_history(cmp.km.history, (dir / "history_km.csv").string());
  cf::save_history(cmp.cg_h12.history, (dir / "history_cg-h12.csv").string());
  cf::save_history(cmp.cg_l2.history, (dir / "history_cg-l2.csv").string());
  cf::write_text_file((dir / "trace.csv").string(),
                      cf::format_trace_table(cmp.instance.sys, cmp.instance.truth.phi_true,
                                             &cmp.km.phi, &cmp.cg_h12.phi, &cmp.cg_l2.phi));

  std::map<std::string, std::string> extra;
  for (const auto& [name, run] :
       {std::pair<std::string, const cf::RunResult*>{"km_", &cmp.km},
        {"cg_h12_", &cmp.cg_h12},
        {"cg_l2_", &cmp.cg_l2}}) {
    auto lines = metric_lines(name, *run);
    extra.insert(lines.begin(), lines.end());
  }
  extra["delta"] = cf::format_double(cmp.km.delta);
  extra["u_max"] = cf::format_double(cmp.km.u_max);
  extra["vertices"] = std::to_string(cmp.instance.sys.n);
  extra["h_max"] = cf::format_double(cmp.instance.sys.mesh.h_max);
  cf::write_text_file((dir / "manifest.txt").string(), cf::format_manifest(cfg, extra));

  print_run("km", cmp.km, cfg.lambda);
  print_run("cg-h12", cmp.cg_h12, cfg.lambda);
  print_run("cg-l2", cmp.cg_l2, cfg.lambda);
  std::cout << "wrote history_{km,cg-h12,cg-l2}.csv, trace.csv, manifest.txt in "
            << flags.out_dir << "\n";
  return 0;
}

// ---- verify: operator identity self-checks on small meshes ----

using CheckFn = std::function<double(const cf::StiffnessSystem&, const cf::CauchyData&,
                                     std::uint64_t)>;

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

double rel_vec(const cf::Vector& x, const cf::Vector& y) {
  const double scale = std::max(x.norm(), y.norm());
  return scale > 0.0 ? (x - y).norm() / scale : 0.0;
}

double check_adjoint_n0(const cf::StiffnessSystem& sys, const cf::CauchyData&,
                        std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace psi = cf::weak_neumann_on(cf::Region::B,
                                            rng.normal_vector(sys.part.node_count(cf::Region::B)));
  const cf::Trace xi = cf::weak_neumann_on(cf::Region::S,
                                           rng.normal_vector(sys.part.node_count(cf::Region::S)));
  const double lhs =
      cf::inner(sys, cf::lift_neumann(sys, cf::op_N0(sys, psi)), cf::lift_neumann(sys, xi));
  const double rhs =
      cf::inner(sys, cf::lift_neumann(sys, psi), cf::lift_neumann(sys, cf::adjoint_N0(sys, xi)));
  return rel_diff(lhs, rhs);
}

double check_adjoint_d0(const cf::StiffnessSystem& sys, const cf::CauchyData&,
                        std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace phi = cf::dirichlet_on(
      cf::Region::B, cf::zero_interface(sys, cf::Region::B,
                                        rng.normal_vector(sys.part.node_count(cf::Region::B))));
  const cf::Trace gamma = cf::dirichlet_on(
      cf::Region::S, cf::zero_interface(sys, cf::Region::S,
                                        rng.normal_vector(sys.part.node_count(cf::Region::S))));
  const double lhs = cf::inner(sys, cf::lift_dirichlet_00(sys, cf::op_D0(sys, phi)),
                               cf::lift_dirichlet_00(sys, gamma));
  const double rhs = cf::inner(sys, cf::lift_dirichlet_00(sys, phi),
                               cf::lift_dirichlet_00(sys, cf::adjoint_D0(sys, gamma)));
  return rel_diff(lhs, rhs);
}

double check_adjoint_embed(const cf::StiffnessSystem& sys, const cf::CauchyData&,
                           std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Vector phi = rng.normal_vector(sys.part.node_count(cf::Region::B));
  const cf::Vector gamma = rng.normal_vector(sys.part.node_count(cf::Region::S));
  const cf::Field z = cf::solve_D0(sys, cf::dirichlet_on(cf::Region::B, phi));
  const double lhs =
      cf::l2_inner(sys, cf::Region::S, cf::restrict_to_region(sys, cf::Region::S, z), gamma);
  const cf::EmbeddedAdjoint w = cf::iota_d0_star(sys, gamma);
  const cf::Field q = cf::solve_D0(sys, w.trace_b);
  const double rhs = cf::energy_inner(sys, z, q) +
                     cf::region_mean(sys, cf::Region::B, z) * cf::region_mean(sys, cf::Region::B, q);
  return rel_diff(lhs, rhs);
}

double check_normal_eq_flux(const cf::StiffnessSystem& sys, const cf::CauchyData&,
                            std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace psi = cf::weak_neumann_on(cf::Region::B,
                                            rng.normal_vector(sys.part.node_count(cf::Region::B)));
  const cf::Trace lhs = cf::adjoint_N0(sys, cf::op_N0(sys, psi));
  const cf::Vector rhs = psi.values - cf::op_KM0(sys, psi).values;
  const double num = cf::trace_norm(sys, cf::weak_neumann_on(cf::Region::B, lhs.values - rhs),
                                    cf::TraceSpace::HminusHalf);
  const double den =
      cf::trace_norm(sys, cf::weak_neumann_on(cf::Region::B, rhs), cf::TraceSpace::HminusHalf);
  return den > 0.0 ? num / den : num;
}

double check_normal_eq_trace(const cf::StiffnessSystem& sys, const cf::CauchyData&,
                             std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace phi = cf::dirichlet_on(
      cf::Region::B, cf::zero_interface(sys, cf::Region::B,
                                        rng.normal_vector(sys.part.node_count(cf::Region::B))));
  const cf::Trace lhs = cf::adjoint_D0(sys, cf::op_D0(sys, phi));
  const cf::Vector rhs = phi.values - cf::op_MK0(sys, phi).values;
  const double num = cf::trace_norm(sys, cf::dirichlet_on(cf::Region::B, lhs.values - rhs),
                                    cf::TraceSpace::Hhalf00);
  const double den =
      cf::trace_norm(sys, cf::dirichlet_on(cf::Region::B, rhs), cf::TraceSpace::Hhalf00);
  return den > 0.0 ? num / den : num;
}

double check_affine_flux(const cf::StiffnessSystem& sys, const cf::CauchyData& data,
                         std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace psi = cf::weak_neumann_on(cf::Region::B,
                                            rng.normal_vector(sys.part.node_count(cf::Region::B)));
  const cf::Vector lhs = cf::op_N(sys, data, psi).values;
  const cf::Vector rhs =
      cf::op_N(sys, data, cf::zero_weak_neumann(sys.part, cf::Region::B)).values +
      cf::op_N0(sys, psi).values;
  return rel_vec(lhs, rhs);
}

double check_affine_trace(const cf::StiffnessSystem& sys, const cf::CauchyData& data,
                          std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace phi =
      cf::dirichlet_on(cf::Region::B, rng.normal_vector(sys.part.node_count(cf::Region::B)));
  const cf::Vector lhs = cf::op_D(sys, data, phi).values;
  const cf::Vector rhs = cf::op_D(sys, data, cf::zero_dirichlet(sys.part, cf::Region::B)).values +
                         cf::op_D0(sys, phi).values;
  return rel_vec(lhs, rhs);
}

double check_route_flux(const cf::StiffnessSystem& sys, const cf::CauchyData& data,
                        std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace psi0 = cf::weak_neumann_on(cf::Region::B,
                                             rng.normal_vector(sys.part.node_count(cf::Region::B)));
  cf::StoppingRule rule;
  rule.mode = cf::StoppingRule::Mode::FixedCount;
  rule.residual_norm = cf::StoppingRule::ResidualNorm::Native;
  rule.max_iter = 3;
  const cf::FluxIterResult km = cf::km_neumann(sys, data, psi0, rule);
  const cf::FluxIterResult lw = cf::landweber_neumann(sys, data, psi0, 1.0, rule);
  const double num = cf::trace_norm(
      sys, cf::weak_neumann_on(cf::Region::B, km.psi.values - lw.psi.values),
      cf::TraceSpace::HminusHalf);
  const double den = cf::trace_norm(sys, km.psi, cf::TraceSpace::HminusHalf);
  return den > 0.0 ? num / den : num;
}

double check_route_trace(const cf::StiffnessSystem& sys, const cf::CauchyData& data,
                         std::uint64_t) {
  const cf::Trace phi_hat = cf::sigma_extension(sys, data);
  cf::StoppingRule rule;
  rule.mode = cf::StoppingRule::Mode::FixedCount;
  rule.max_iter = 3;
  const cf::TraceIterResult km = cf::km_dirichlet(sys, data, phi_hat, rule);
  const cf::TraceIterResult lw =
      cf::landweber_dirichlet(sys, data, phi_hat, cf::zero_dirichlet(sys.part, cf::Region::B), rule);
  const cf::Vector diff =
      cf::zero_interface(sys, cf::Region::B, km.phi.values - lw.phi.values);
  const double num =
      cf::trace_norm(sys, cf::dirichlet_on(cf::Region::B, diff), cf::TraceSpace::Hhalf00);
  const cf::Vector ref = cf::zero_interface(sys, cf::Region::B, km.phi.values);
  const double den =
      cf::trace_norm(sys, cf::dirichlet_on(cf::Region::B, ref), cf::TraceSpace::Hhalf00);
  return den > 0.0 ? num / den : num;
}

double check_norm_n0(const cf::StiffnessSystem& sys, const cf::CauchyData&, std::uint64_t seed) {
  const int nb = sys.part.node_count(cf::Region::B);
  const auto est = cf::power_norm(
      nb, seed, 30,
      [&](const cf::Vector& x) {
        return cf::adjoint_N0(sys, cf::op_N0(sys, cf::weak_neumann_on(cf::Region::B, x))).values;
      },
      [&](const cf::Vector& a, const cf::Vector& b) {
        return cf::inner(sys, cf::lift_neumann(sys, cf::weak_neumann_on(cf::Region::B, a)),
                         cf::lift_neumann(sys, cf::weak_neumann_on(cf::Region::B, b)));
      });
  return std::max(0.0, est.lambda_max - 1.0);  // defect = excess over the contraction bound
}

double check_norm_d0(const cf::StiffnessSystem& sys, const cf::CauchyData&, std::uint64_t seed) {
  const int nb = sys.part.node_count(cf::Region::B);
  const auto est = cf::power_norm(
      nb, seed, 30,
      [&](const cf::Vector& x) {
        const cf::Trace phi =
            cf::dirichlet_on(cf::Region::B, cf::zero_interface(sys, cf::Region::B, x));
        return cf::adjoint_D0(sys, cf::op_D0(sys, phi)).values;
      },
      [&](const cf::Vector& a, const cf::Vector& b) {
        const cf::Trace ta =
            cf::dirichlet_on(cf::Region::B, cf::zero_interface(sys, cf::Region::B, a));
        const cf::Trace tb =
            cf::dirichlet_on(cf::Region::B, cf::zero_interface(sys, cf::Region::B, b));
        return cf::inner(sys, cf::lift_dirichlet_00(sys, ta), cf::lift_dirichlet_00(sys, tb));
      });
  return std::max(0.0, est.lambda_max - 1.0);
}

double check_symmetry_km0(const cf::StiffnessSystem& sys, const cf::CauchyData&,
                          std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Trace p1 = cf::weak_neumann_on(cf::Region::B,
                                           rng.normal_vector(sys.part.node_count(cf::Region::B)));
  const cf::Trace p2 = cf::weak_neumann_on(cf::Region::B,
                                           rng.normal_vector(sys.part.node_count(cf::Region::B)));
  const double lhs =
      cf::inner(sys, cf::lift_neumann(sys, cf::op_KM0(sys, p1)), cf::lift_neumann(sys, p2));
  const double rhs =
      cf::inner(sys, cf::lift_neumann(sys, p1), cf::lift_neumann(sys, cf::op_KM0(sys, p2)));
  return rel_diff(lhs, rhs);
}

double check_error_transfer(const cf::StiffnessSystem& sys, const cf::CauchyData& data,
                            std::uint64_t seed) {
  cf::GaussianSampler rng(seed);
  const cf::Vector bump = 0.01 * rng.normal_vector(sys.part.node_count(cf::Region::S));
  const cf::Trace sigma_eps = cf::dirichlet_on(cf::Region::S, data.sigma.values + bump);
  cf::CauchyData data_eps = data;
  data_eps.sigma = sigma_eps;
  const cf::SigmaErrorRewrite rewrite = cf::rewrite_sigma_error(sys, sigma_eps, data.sigma);

  const cf::Trace psi = cf::weak_neumann_on(cf::Region::B,
                                            rng.normal_vector(sys.part.node_count(cf::Region::B)));
  const cf::Vector lhs = cf::op_N(sys, data, psi).values;
  const cf::Vector rhs = cf::op_N(sys, data_eps, psi).values - rewrite.tau_eps.values;
  return rel_vec(lhs, rhs);
}

int cmd_verify(const std::vector<std::string>& requested, double tol, int seeds) {
  static const std::vector<std::pair<std::string, CheckFn>> registry{
      {"adjoint-n0", check_adjoint_n0},
      {"adjoint-d0", check_adjoint_d0},
      {"adjoint-embed", check_adjoint_embed},
      {"normal-eq-flux", check_normal_eq_flux},
      {"normal-eq-trace", check_normal_eq_trace},
      {"affine-flux", check_affine_flux},
      {"affine-trace", check_affine_trace},
      {"route-flux", check_route_flux},
      {"route-trace", check_route_trace},
      {"norm-n0", check_norm_n0},
      {"norm-d0", check_norm_d0},
      {"symmetry-km0", check_symmetry_km0},
      {"error-transfer", check_error_transfer}};

  std::vector<std::string> names = requested;
  if (names.empty())
    for (const auto& [n, fn] : registry) names.push_back(n);
  for (const auto& n : names) {
    bool known = false;
    for (const auto& [rn, fn] : registry) known = known || rn == n;
    if (!known) throw std::invalid_argument("verify: unknown check '" + n + "'");
  }

  // One small instance per domain; identity defects scale with the solver
  // tolerance, never with h, so coarse meshes are enough here.
  struct Instance {
    std::string label;
    cf::StiffnessSystem sys;
    cf::CauchyData data;
  };
  std::vector<Instance> instances;
  for (const bool parabola : {false, true}) {
    cf::ExperimentConfig cfg;
    cfg.parabola = parabola;
    cfg.h = 0.1;
    cfg.solver_tol = tol;
    cf::PreparedInstance inst = cf::prepare_instance(cfg);
    instances.push_back(
        {parabola ? "parabola" : "square", std::move(inst.sys), std::move(inst.data)});
  }

  const double limit = 1e4 * tol;
  bool all_pass = true;
  for (const auto& name : names) {
    const CheckFn* fn = nullptr;
    for (const auto& [rn, f] : registry)
      if (rn == name) fn = &f;
    for (const auto& inst : instances) {
      double worst = 0.0;
      for (int s = 0; s < seeds; ++s)
        worst = std::max(worst, (*fn)(inst.sys, inst.data, 1000 + 17 * s));
      // Contraction checks compare against an absolute bound already.
      const double lim = (name == "norm-n0" || name == "norm-d0") ? 1e-6 : limit;
      const bool pass = worst <= lim;
      all_pass = all_pass && pass;
      std::cout << (pass ? "pass" : "FAIL") << "  " << name << " [" << inst.label
                << "]  defect " << short_double(worst) << "  limit " << short_double(lim)
                << "\n";
    }
  }
  std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cauchy data reconstruction on planar domains"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  DomainFlags mesh_domain;
  mesh_domain.h = 0.1;
  std::vector<cf::Side> s_sides{cf::Side::Top};
  std::string mesh_out;
  auto* mesh_cmd = app.add_subcommand("mesh", "build and save a domain mesh");
  add_domain_flags(mesh_cmd, mesh_domain);
  static const std::map<std::string, cf::Side> side_names{{"bottom", cf::Side::Bottom},
                                                          {"right", cf::Side::Right},
                                                          {"top", cf::Side::Top},
                                                          {"left", cf::Side::Left}};
  mesh_cmd->add_option("--s-side", s_sides, "square sides forming region S")
      ->transform(CLI::CheckedTransformer(side_names))
      ->default_str("top");
  mesh_cmd->add_option("--out", mesh_out, "output mesh file")->required();

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run one reconstruction on synthetic data");
  add_run_flags(run_cmd, run_flags, true);

  RunFlags cmp_flags;
  auto* cmp_cmd = app.add_subcommand("compare", "run km, cg-h12 and cg-l2 on identical data");
  add_run_flags(cmp_cmd, cmp_flags, false);

  std::vector<std::string> checks;
  double verify_tol = 1e-12;
  int verify_seeds = 3;
  auto* verify_cmd = app.add_subcommand("verify", "operator identity self-checks");
  verify_cmd->add_option("--checks", checks, "subset of checks to run (default: all)");
  verify_cmd->add_option("--tol", verify_tol, "inner solver relative tolerance")
      ->check(CLI::Range(1e-15, 1e-3))
      ->capture_default_str();
  verify_cmd->add_option("--seeds", verify_seeds, "seeded repetitions per check")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mesh_cmd->parsed()) return cmd_mesh(mesh_domain, s_sides, mesh_out);
    if (run_cmd->parsed()) return cmd_run(run_flags);
    if (cmp_cmd->parsed()) return cmd_compare(cmp_flags);
    if (verify_cmd->parsed()) return cmd_verify(checks, verify_tol, verify_seeds);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include "cauchyfem/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cauchyfem/rng.hpp"

namespace cauchyfem {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::KM:
      return "km";
    case Algorithm::Landweber:
      return "landweber";
    case Algorithm::CgH12:
      return "cg-h12";
    case Algorithm::CgL2:
      return "cg-l2";
  }
  return "unknown";
}

Mesh build_domain(const ExperimentConfig& cfg) {
  if (cfg.parabola) return build_parabola_domain(cfg.h, cfg.depth);
  return build_unit_square(cfg.h, {Side::Top});
}

Vector bump_values(const StiffnessSystem& sys, double u0, double s) {
  const auto& nodes = sys.part.nodes(Region::B);
  Vector v(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double x = sys.mesh.vertices[nodes[i]].x;
    v[i] = u0 * std::exp(-x * x / (2.0 * s * s));
  }
  return v;
}

SyntheticTruth make_synthetic(const StiffnessSystem& sys, const ExperimentConfig& cfg) {
  SyntheticTruth t;
  t.phi_true = dirichlet_on(Region::B, bump_values(sys, cfg.u0, cfg.s));
  t.u_true = solve_mixed(sys, VolumeLoad::uniform(cfg.f0),
                         {t.phi_true, zero_weak_neumann(sys.part, Region::S)});
  t.sigma_true = trace_of(sys, Region::S, t.u_true);
  t.u_max = t.u_true.cwiseAbs().maxCoeff();
  return t;
}

CauchyData exact_data(const StiffnessSystem& sys, const SyntheticTruth& truth,
                      const ExperimentConfig& cfg) {
  return {truth.sigma_true, zero_weak_neumann(sys.part, Region::S),
          VolumeLoad::uniform(cfg.f0)};
}

NoisyData add_noise(const StiffnessSystem& sys, const Trace& sigma, double p, double u_max,
                    std::uint64_t seed) {
  if (sigma.region != Region::S || sigma.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("add_noise: expected a Dirichlet trace on S");
  if (p < 0.0) throw std::invalid_argument("add_noise: noise percent must be >= 0");
  GaussianSampler rng(seed);
  const Vector noise = (u_max * p / 100.0) * rng.normal_vector(sigma.values.size());
  NoisyData out;
  out.sigma_noisy = dirichlet_on(Region::S, sigma.values + noise);
  out.delta = l2_norm(sys, Region::S, noise);
  return out;
}

PreparedInstance prepare_instance(const ExperimentConfig& cfg) {
  PreparedInstance inst{assemble(build_domain(cfg)), {}, {}, 0.0};
  inst.sys.solver_rtol = cfg.solver_tol;
  inst.truth = make_synthetic(inst.sys, cfg);
  inst.data = exact_data(inst.sys, inst.truth, cfg);
  NoisyData noisy = add_noise(inst.sys, inst.truth.sigma_true, cfg.p, inst.truth.u_max, cfg.seed);
  inst.data.sigma = std::move(noisy.sigma_noisy);
  inst.delta = noisy.delta;
  return inst;
}

namespace {

double osc_near_interface(const Vector& phi_b) {
  const int n = static_cast<int>(phi_b.size());
  double osc = 0.0;
  for (int off = 1; off <= 3; ++off) {
    if (off < n) osc = std::max(osc, std::abs(phi_b[off]));
    if (n - 1 - off >= 0) osc = std::max(osc, std::abs(phi_b[n - 1 - off]));
  }
  return osc;
}

RunMetrics measure(const StiffnessSystem& sys, const SyntheticTruth& truth,
                   const TraceIterResult& res) {
  RunMetrics m;
  m.stop_iteration = res.history.stop_index();
  m.reason = res.history.reason;
  m.final_residual_l2 = res.history.steps.back().residual_l2;

  const Vector diff = res.phi.values - truth.phi_true.values;
  m.err_l2_b = l2_norm(sys, Region::B, diff) / l2_norm(sys, Region::B, truth.phi_true.values);

  const Vector diff00 = zero_interface(sys, Region::B, diff);
  const Vector true00 = zero_interface(sys, Region::B, truth.phi_true.values);
  m.err_h00_b = trace_norm(sys, dirichlet_on(Region::B, diff00), TraceSpace::Hhalf00) /
                trace_norm(sys, dirichlet_on(Region::B, true00), TraceSpace::Hhalf00);

  m.osc_near_pi = osc_near_interface(res.phi.values);
  return m;
}

}  // namespace

RunResult run_on_instance(const PreparedInstance& inst, const ExperimentConfig& cfg,
                          Algorithm algorithm) {
  const StiffnessSystem& sys = inst.sys;
  StoppingRule rule;
  rule.mode = StoppingRule::Mode::Discrepancy;
  rule.residual_norm = StoppingRule::ResidualNorm::L2S;
  rule.delta = inst.delta;
  rule.lambda = cfg.lambda;
  rule.max_iter = cfg.max_iter;
  rule.data_scale = l2_norm(sys, Region::S, inst.data.sigma.values);
  TruthTraces truth;
  truth.trace_b = &inst.truth.phi_true;

  const auto t0 = std::chrono::steady_clock::now();
  TraceIterResult res;
  switch (algorithm) {
    case Algorithm::KM:
      res = km_dirichlet(sys, inst.data, zero_dirichlet(sys.part, Region::B), rule, truth);
      break;
    case Algorithm::Landweber: {
      const Trace phi_hat = sigma_extension(sys, inst.data);
      res = landweber_dirichlet(sys, inst.data, phi_hat, zero_dirichlet(sys.part, Region::B),
                                rule, truth);
      break;
    }
    case Algorithm::CgH12: {
      const Field u0 = solve_mixed(sys, inst.data.f,
                                   {inst.data.sigma, zero_dirichlet(sys.part, Region::B)});
      res = cg_dirichlet_h12(sys, inst.data, u0, rule, truth);
      break;
    }
    case Algorithm::CgL2:
      res = cg_dirichlet_l2(sys, inst.data, zero_dirichlet(sys.part, Region::B), rule, truth);
      break;
  }
  const auto t1 = std::chrono::steady_clock::now();

  RunResult out;
  out.metrics = measure(sys, inst.truth, res);
  out.history = std::move(res.history);
  out.phi = std::move(res.phi);
  out.reconstruction = std::move(res.u);
  out.delta = inst.delta;
  out.u_max = inst.truth.u_max;
  out.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const PreparedInstance inst = prepare_instance(cfg);
  return run_on_instance(inst, cfg, cfg.algorithm);
}

ComparisonResult compare_algorithms(const ExperimentConfig& cfg) {
  ComparisonResult out{prepare_instance(cfg), {}, {}, {}};
  out.km = run_on_instance(out.instance, cfg, Algorithm::KM);
  out.cg_h12 = run_on_instance(out.instance, cfg, Algorithm::CgH12);
  out.cg_l2 = run_on_instance(out.instance, cfg, Algorithm::CgL2);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_trace_table(const StiffnessSystem& sys, const Trace& truth_b,
                               const Trace* km, const Trace* cg_h12, const Trace* cg_l2) {
  const auto& nodes = sys.part.nodes(Region::B);
  if (truth_b.values.size() != static_cast<Eigen::Index>(nodes.size()))
    throw std::invalid_argument("format_trace_table: truth length mismatch");
  auto cell = [&](const Trace* t, size_t i) -> std::string {
    return t ? format_double(t->values[i]) : "";
  };

  std::string out = "arclength,x,y,true,km,cg_h12,cg_l2\n";
  double arc = 0.0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const Vec2& v = sys.mesh.vertices[nodes[i]];
    if (i > 0) {
      const Vec2& prev = sys.mesh.vertices[nodes[i - 1]];
      arc += std::hypot(v.x - prev.x, v.y - prev.y);
    }
    out += format_double(arc);
    out += ',';
    out += format_double(v.x);
    out += ',';
    out += format_double(v.y);
    out += ',';
    out += format_double(truth_b.values[i]);
    out += ',';
    out += cell(km, i);
    out += ',';
    out += cell(cg_h12, i);
    out += ',';
    out += cell(cg_l2, i);
    out += '\n';
  }
  return out;
}

std::string format_manifest(const ExperimentConfig& cfg,
                            const std::map<std::string, std::string>& extra) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  line("domain", cfg.parabola ? "parabola" : "square");
  line("depth", format_double(cfg.depth));
  line("h", format_double(cfg.h));
  line("f0", format_double(cfg.f0));
  line("u0", format_double(cfg.u0));
  line("s", format_double(cfg.s));
  line("p", format_double(cfg.p));
  line("seed", std::to_string(cfg.seed));
  line("algorithm", algorithm_name(cfg.algorithm));
  line("lambda", format_double(cfg.lambda));
  line("max_iter", std::to_string(cfg.max_iter));
  line("solver_tol", format_double(cfg.solver_tol));
  for (const auto& [k, v] : extra) line(k, v);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("write_text_file: write failed for " + path);
}

}  // namespace cauchyfem

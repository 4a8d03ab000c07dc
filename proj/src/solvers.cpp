#include "cauchyfem/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "cauchyfem/rng.hpp"

namespace cauchyfem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kExactDataFloorFactor = 1e4;  // floor = factor * solver_rtol * data_scale
constexpr double kTinyDenominator = 1e-300;

std::string fmt_cell(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_rule(const StoppingRule& rule) {
  if (rule.max_iter < 0) throw std::invalid_argument("StoppingRule: max_iter must be >= 0");
  if (rule.mode == StoppingRule::Mode::Discrepancy) {
    if (rule.lambda < 1.0) throw std::invalid_argument("StoppingRule: lambda must be >= 1");
    if (rule.delta < 0.0) throw std::invalid_argument("StoppingRule: delta must be >= 0");
  }
}

// Records rows and applies the stopping policy; each solver drives one.
struct IterationLoop {
  const StoppingRule& rule;
  double solver_rtol;
  IterationHistory history;

  // Push row k and decide whether the iteration is done.
  bool record_and_stop(int k, double rn, double rl2, double err) {
    history.steps.push_back({k, rn, rl2, kNaN, kNaN, err});
    if (rule.mode == StoppingRule::Mode::Discrepancy &&
        discrepancy_reached(rule, solver_rtol, rn, rl2)) {
      history.reason = StopReason::Discrepancy;
      return true;
    }
    if (k >= rule.max_iter) {
      history.reason = StopReason::IterationCap;
      return true;
    }
    return false;
  }

  void set_alpha(double a) { history.steps.back().alpha = a; }
  void set_beta(double b) { history.steps.back().beta = b; }
  void stagnate() { history.reason = StopReason::Stagnation; }
};

double flux_truth_error(const StiffnessSystem& sys, const Vector& psi_values,
                        const TruthTraces& truth) {
  if (!truth.flux_b) return kNaN;
  return trace_norm(sys, weak_neumann_on(Region::B, psi_values - truth.flux_b->values),
                    TraceSpace::HminusHalf);
}

double trace_truth_error(const StiffnessSystem& sys, const Vector& phi_values,
                         const TruthTraces& truth) {
  if (!truth.trace_b) return kNaN;
  // Project out the interface entries so the difference lives in the
  // interface-vanishing space even for arbitrary starting iterates.
  Vector diff = zero_interface(sys, Region::B, phi_values - truth.trace_b->values);
  return trace_norm(sys, dirichlet_on(Region::B, std::move(diff)), TraceSpace::Hhalf00);
}

void check_truth(const StiffnessSystem& sys, const TruthTraces& truth) {
  if (truth.flux_b) {
    if (truth.flux_b->region != Region::B || truth.flux_b->kind != Trace::Kind::WeakNeumann ||
        truth.flux_b->values.size() != sys.part.node_count(Region::B))
      throw std::invalid_argument("TruthTraces: flux_b must be WeakNeumann on B");
  }
  if (truth.trace_b) {
    if (truth.trace_b->region != Region::B || truth.trace_b->kind != Trace::Kind::Dirichlet ||
        truth.trace_b->values.size() != sys.part.node_count(Region::B))
      throw std::invalid_argument("TruthTraces: trace_b must be Dirichlet on B");
  }
}

void reject_l2_rule(const StoppingRule& rule, const char* where) {
  if (rule.mode == StoppingRule::Mode::Discrepancy &&
      rule.residual_norm == StoppingRule::ResidualNorm::L2S)
    throw std::invalid_argument(std::string(where) +
                                ": flux residuals have no L2 reading, use the native norm");
}

}  // namespace

std::string format_history(const IterationHistory& h) {
  std::string out = "k,residual_native,residual_l2,alpha,beta,err_truth_b\n";
  for (const IterationRecord& r : h.steps) {
    out += std::to_string(r.k);
    out += ',';
    out += fmt_cell(r.residual_native);
    out += ',';
    out += fmt_cell(r.residual_l2);
    out += ',';
    out += fmt_cell(r.alpha);
    out += ',';
    out += fmt_cell(r.beta);
    out += ',';
    out += fmt_cell(r.err_truth_b);
    out += '\n';
  }
  return out;
}

void save_history(const IterationHistory& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_history: cannot open " + path);
  out << format_history(h);
  if (!out) throw std::runtime_error("save_history: write failed for " + path);
}

bool discrepancy_reached(const StoppingRule& rule, double solver_rtol, double residual_native,
                         double residual_l2) {
  const double floor = kExactDataFloorFactor * solver_rtol * rule.data_scale;
  const double level = std::max(rule.lambda * rule.delta, floor);
  const double value = rule.residual_norm == StoppingRule::ResidualNorm::Native
                           ? residual_native
                           : residual_l2;
  return value < level;
}

int replay_stop_index(const IterationHistory& h, const StoppingRule& rule, double solver_rtol) {
  for (const IterationRecord& r : h.steps)
    if (discrepancy_reached(rule, solver_rtol, r.residual_native, r.residual_l2)) return r.k;
  return -1;
}

FluxIterResult landweber_neumann(const StiffnessSystem& sys, const CauchyData& data,
                                 const Trace& psi0, double relaxation, const StoppingRule& rule,
                                 const TruthTraces& truth) {
  if (!(relaxation > 0.0 && relaxation <= 1.0))
    throw std::invalid_argument("landweber_neumann: relaxation must lie in (0, 1]");
  validate_rule(rule);
  reject_l2_rule(rule, "landweber_neumann");
  check_truth(sys, truth);

  Trace psi = psi0;
  IterationLoop loop{rule, sys.solver_rtol, {}};
  for (int k = 0;; ++k) {
    const Field u = solve_N(sys, data, psi);
    const Trace flux_s = weak_normal_derivative(sys, u, data.f, Region::S);
    const Trace rho = weak_neumann_on(Region::S, data.tau.values - flux_s.values);
    const HarmonicRep rep = lift_neumann(sys, rho);
    const double native = norm(sys, rep);
    if (loop.record_and_stop(k, native, kNaN, flux_truth_error(sys, psi.values, truth)))
      return {std::move(psi), u, std::move(loop.history)};
    loop.set_alpha(relaxation);
    // The flux of the lifted residual on B is the adjoint applied to rho.
    const Trace step = weak_normal_derivative(sys, rep.field, VolumeLoad{}, Region::B);
    psi.values += relaxation * step.values;
  }
}

FluxIterResult km_neumann(const StiffnessSystem& sys, const CauchyData& data, const Trace& psi0,
                          const StoppingRule& rule, const TruthTraces& truth) {
  validate_rule(rule);
  reject_l2_rule(rule, "km_neumann");
  check_truth(sys, truth);

  Trace psi = psi0;
  IterationLoop loop{rule, sys.solver_rtol, {}};
  for (int k = 0;; ++k) {
    const Field u = solve_N(sys, data, psi);
    const Trace flux_s = weak_normal_derivative(sys, u, data.f, Region::S);
    const double native =
        trace_norm(sys, weak_neumann_on(Region::S, data.tau.values - flux_s.values),
                   TraceSpace::HminusHalf);
    if (loop.record_and_stop(k, native, kNaN, flux_truth_error(sys, psi.values, truth)))
      return {std::move(psi), u, std::move(loop.history)};
    const Field v = solve_D(sys, data, trace_of(sys, Region::B, u));
    psi = weak_normal_derivative(sys, v, data.f, Region::B);
  }
}

TraceIterResult km_dirichlet(const StiffnessSystem& sys, const CauchyData& data,
                             const Trace& phi0, const StoppingRule& rule,
                             const TruthTraces& truth) {
  validate_rule(rule);
  check_truth(sys, truth);

  Trace phi = phi0;
  IterationLoop loop{rule, sys.solver_rtol, {}};
  for (int k = 0;; ++k) {
    const Field w = solve_D(sys, data, phi);
    const Vector rho = data.sigma.values - restrict_to_region(sys, Region::S, w);
    const double rl2 = l2_norm(sys, Region::S, rho);
    const double native =
        trace_norm(sys, dirichlet_on(Region::S, zero_interface(sys, Region::S, rho)),
                   TraceSpace::Hhalf00);
    if (loop.record_and_stop(k, native, rl2, trace_truth_error(sys, phi.values, truth)))
      return {std::move(phi), w, std::move(loop.history)};
    const Field v = solve_N(sys, data, weak_normal_derivative(sys, w, data.f, Region::B));
    phi = trace_of(sys, Region::B, v);
  }
}

TraceIterResult landweber_dirichlet(const StiffnessSystem& sys, const CauchyData& data,
                                    const Trace& phi_hat, const Trace& eta0,
                                    const StoppingRule& rule, const TruthTraces& truth) {
  validate_rule(rule);
  check_truth(sys, truth);
  if (eta0.region != Region::B || eta0.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("landweber_dirichlet: eta0 must be Dirichlet on B");
  if (!vanishes_at_interface(sys, eta0))
    throw std::invalid_argument("landweber_dirichlet: eta0 must vanish at the interface");

  Trace eta = eta0;
  IterationLoop loop{rule, sys.solver_rtol, {}};
  for (int k = 0;; ++k) {
    Trace phi = dirichlet_on(Region::B, phi_hat.values + eta.values);
    const Field w = solve_D(sys, data, phi);
    const Vector rho = data.sigma.values - restrict_to_region(sys, Region::S, w);
    const double rl2 = l2_norm(sys, Region::S, rho);
    const Trace rho00 = dirichlet_on(Region::S, zero_interface(sys, Region::S, rho));
    const HarmonicRep rep = lift_dirichlet_00(sys, rho00);
    const double native = norm(sys, rep);
    if (loop.record_and_stop(k, native, rl2, trace_truth_error(sys, phi.values, truth)))
      return {std::move(phi), w, std::move(loop.history)};
    loop.set_alpha(1.0);
    const Field r = d0star_on_rep(sys, rep.field);
    eta.values += restrict_to_region(sys, Region::B, r);
  }
}

TraceIterResult cg_dirichlet_h12(const StiffnessSystem& sys, const CauchyData& data,
                                 const Field& u0, const StoppingRule& rule,
                                 const TruthTraces& truth) {
  validate_rule(rule);
  check_truth(sys, truth);
  if (u0.size() != sys.n) throw std::invalid_argument("cg_dirichlet_h12: u0 length mismatch");
  {
    const Vector s_vals = restrict_to_region(sys, Region::S, u0);
    const double scale = 1.0 + data.sigma.values.cwiseAbs().maxCoeff();
    if ((s_vals - data.sigma.values).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::invalid_argument("cg_dirichlet_h12: u0 does not carry sigma on S");
  }

  Field u = u0;
  Field r = u - solve_D(sys, data, trace_of(sys, Region::B, u));
  Field d;        // direction, zero on S
  double qq_prev = 0.0;

  IterationLoop loop{rule, sys.solver_rtol, {}};
  for (int k = 0;; ++k) {
    const double native = std::sqrt(std::max(0.0, energy_inner(sys, r, r)));
    const double rl2 = l2_norm(sys, Region::S, restrict_to_region(sys, Region::S, r));
    const bool done = loop.record_and_stop(
        k, native, rl2, trace_truth_error(sys, restrict_to_region(sys, Region::B, u), truth));
    if (done) break;

    const Field q = d0star_on_rep(sys, r);
    const double qq = energy_inner(sys, q, q);
    if (qq <= kTinyDenominator) {
      loop.stagnate();
      break;
    }
    if (k == 0) {
      d = q;
    } else {
      const double beta = qq / qq_prev;
      loop.set_beta(beta);
      d = q + beta * d;
    }
    qq_prev = qq;

    const Field s = d0_on_rep(sys, d);
    const double ss = energy_inner(sys, s, s);
    if (ss <= kTinyDenominator) {
      loop.stagnate();
      break;
    }
    const double alpha = qq / ss;
    loop.set_alpha(alpha);
    u += alpha * d;
    r -= alpha * s;
  }

  Trace phi = trace_of(sys, Region::B, u);
  Field rec = solve_D(sys, data, phi);
  return {std::move(phi), std::move(rec), std::move(loop.history)};
}

TraceIterResult cg_dirichlet_l2(const StiffnessSystem& sys, const CauchyData& data,
                                const Trace& phi0, const StoppingRule& rule,
                                const TruthTraces& truth) {
  validate_rule(rule);
  check_truth(sys, truth);

  Field u = solve_D(sys, data, phi0);
  Vector rvec = data.sigma.values - restrict_to_region(sys, Region::S, u);
  Field d;  // direction: zero weak flux on S, free on B
  double qq_prev = 0.0;

  IterationLoop loop{rule, sys.solver_rtol, {}};
  for (int k = 0;; ++k) {
    const double rl2 = l2_norm(sys, Region::S, rvec);
    const bool done = loop.record_and_stop(
        k, rl2, rl2, trace_truth_error(sys, restrict_to_region(sys, Region::B, u), truth));
    if (done) break;

    // Adjoint then re-lift: the adjoint field has flux on S, the conjugate
    // directions must not, so its B-trace is carried over to a zero-S-flux
    // representative.
    const EmbeddedAdjoint w = iota_d0_star(sys, rvec);
    const Field q = solve_D0(sys, w.trace_b);
    const double qq = energy_inner(sys, q, q) + std::pow(region_mean(sys, Region::B, q), 2);
    if (qq <= kTinyDenominator) {
      loop.stagnate();
      break;
    }
    if (k == 0) {
      d = q;
    } else {
      const double beta = qq / qq_prev;
      loop.set_beta(beta);
      d = q + beta * d;
    }
    qq_prev = qq;

    const Vector d_s = restrict_to_region(sys, Region::S, d);
    const double ss = l2_inner(sys, Region::S, d_s, d_s);
    if (ss <= kTinyDenominator) {
      loop.stagnate();
      break;
    }
    const double alpha = qq / ss;
    loop.set_alpha(alpha);
    u += alpha * d;
    rvec -= alpha * d_s;
  }

  Trace phi = trace_of(sys, Region::B, u);
  return {std::move(phi), std::move(u), std::move(loop.history)};
}

SigmaErrorRewrite rewrite_sigma_error(const StiffnessSystem& sys, const Trace& sigma_eps,
                                      const Trace& sigma) {
  if (sigma_eps.region != Region::S || sigma_eps.kind != Trace::Kind::Dirichlet ||
      sigma.region != Region::S || sigma.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("rewrite_sigma_error: expected Dirichlet traces on S");
  Trace tau_eps = op_FDN(sys, dirichlet_on(Region::S, sigma_eps.values - sigma.values));
  const double n = trace_norm(sys, tau_eps, TraceSpace::HminusHalf);
  return {std::move(tau_eps), n};
}

double adjusted_stop_level(double lambda, double delta, double norm_tau_eps) {
  return lambda * (delta + norm_tau_eps);
}

ReducedDirichletData reduce_dirichlet_noise(const StiffnessSystem& sys,
                                            const Trace& sigma_delta) {
  if (sigma_delta.region != Region::S || sigma_delta.kind != Trace::Kind::Dirichlet)
    throw std::invalid_argument("reduce_dirichlet_noise: expected a Dirichlet trace on S");
  Field u_delta = solve_mixed(sys, VolumeLoad{},
                              {sigma_delta, zero_weak_neumann(sys.part, Region::B)});
  const Trace flux_s = weak_normal_derivative(sys, u_delta, VolumeLoad{}, Region::S);
  Field v_delta =
      solve_mixed(sys, VolumeLoad{}, {zero_dirichlet(sys.part, Region::B), flux_s});
  Trace reduced = trace_of(sys, Region::S, v_delta);
  return {std::move(reduced), std::move(u_delta), std::move(v_delta)};
}

PowerEstimate power_norm(int n, std::uint64_t seed, int iters,
                         const std::function<Vector(const Vector&)>& normal_op,
                         const std::function<double(const Vector&, const Vector&)>& dot) {
  if (n <= 0) throw std::invalid_argument("power_norm: need n > 0");
  if (iters <= 0) throw std::invalid_argument("power_norm: need iters > 0");
  GaussianSampler rng(seed);
  Vector x = rng.normal_vector(n);
  const double nx = std::sqrt(std::max(0.0, dot(x, x)));
  if (nx <= 0.0) throw std::runtime_error("power_norm: degenerate start vector");
  x /= nx;

  double lambda = 0.0, change = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Vector y = normal_op(x);
    const double rayleigh = dot(x, y);
    change = std::abs(rayleigh - lambda);
    lambda = rayleigh;
    const double ny = std::sqrt(std::max(0.0, dot(y, y)));
    if (ny <= kTinyDenominator) {
      lambda = 0.0;
      change = 0.0;
      break;
    }
    x = y / ny;
  }
  return {lambda, change, std::sqrt(std::max(0.0, lambda))};
}

}  // namespace cauchyfem

#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "cauchyfem/cauchy_ops.hpp"

namespace cauchyfem {

// Stopping policy shared by all outer iterations.
//   Discrepancy: stop at the first residual below lambda * delta (lambda > 1);
//     with delta = 0 the threshold degenerates to the exact-data floor
//     1e4 * solver_rtol * data_scale, the level at which residuals are pure
//     inner-solver noise.
//   IterationCap: run to max_iter.
//   FixedCount:   run exactly max_iter steps (used by route-equality checks).
struct StoppingRule {
  enum class Mode { Discrepancy, IterationCap, FixedCount };
  enum class ResidualNorm { Native, L2S };
  Mode mode = Mode::Discrepancy;
  ResidualNorm residual_norm = ResidualNorm::L2S;
  double delta = 0.0;
  double lambda = 1.1;
  int max_iter = 200;
  double data_scale = 0.0;  // reference scale for the exact-data floor
};

enum class StopReason { Discrepancy, IterationCap, Stagnation };

// One row per outer iteration. residual_* are the norms of the data misfit
// at iterate k; alpha is the step leaving k, beta the coefficient that built
// direction k. err_truth_b is the native-norm error of the B iterate against
// a reference, when one was supplied. NaN marks fields that do not apply.
struct IterationRecord {
  int k = 0;
  double residual_native = 0.0;
  double residual_l2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double err_truth_b = 0.0;
};

struct IterationHistory {
  std::vector<IterationRecord> steps;
  StopReason reason = StopReason::IterationCap;
  int stop_index() const { return steps.empty() ? 0 : steps.back().k; }
};

// Comma-delimited table "k,residual_native,residual_l2,alpha,beta,err_truth_b"
// with NaN entries left empty; full double precision.
std::string format_history(const IterationHistory& h);
void save_history(const IterationHistory& h, const std::string& path);

// The discrepancy decision for one residual value, and its offline replay
// over a recorded history (first index meeting the rule, -1 if none).
bool discrepancy_reached(const StoppingRule& rule, double solver_rtol,
                         double residual_native, double residual_l2);
int replay_stop_index(const IterationHistory& h, const StoppingRule& rule,
                      double solver_rtol);

// Optional reference traces; when set, the matching solvers fill err_truth_b.
struct TruthTraces {
  const Trace* flux_b = nullptr;   // WeakNeumann reference for the flux iterations
  const Trace* trace_b = nullptr;  // Dirichlet reference for the trace iterations
};

struct FluxIterResult {
  Trace psi;  // WeakNeumann on B at stop
  Field u;    // solve_N reconstruction for psi
  IterationHistory history;
};

struct TraceIterResult {
  Trace phi;  // Dirichlet on B at stop
  Field u;    // reconstruction field for phi
  IterationHistory history;
};

// Flux-form iterations on B. Residuals are native-norm only (the misfit is a
// flux on S and has no L2 reading); rules asking for L2S are rejected.
// landweber_neumann: psi += a * adjoint_N0(tau - op_N(psi)), 0 < a <= 1.
// km_neumann: the same fixed point via the two-solve alternating composition.
FluxIterResult landweber_neumann(const StiffnessSystem& sys, const CauchyData& data,
                                 const Trace& psi0, double relaxation,
                                 const StoppingRule& rule, const TruthTraces& truth = {});
FluxIterResult km_neumann(const StiffnessSystem& sys, const CauchyData& data,
                          const Trace& psi0, const StoppingRule& rule,
                          const TruthTraces& truth = {});

// Trace-form iterations on B.
// km_dirichlet: phi <- op_MK(phi), the alternating method the experiments run.
// landweber_dirichlet: phi = phi_hat + eta, eta += adjoint_D0(sigma - op_D(phi));
//   eta0 must vanish at the interface. Matches km_dirichlet iterates exactly.
TraceIterResult km_dirichlet(const StiffnessSystem& sys, const CauchyData& data,
                             const Trace& phi0, const StoppingRule& rule,
                             const TruthTraces& truth = {});
TraceIterResult landweber_dirichlet(const StiffnessSystem& sys, const CauchyData& data,
                                    const Trace& phi_hat, const Trace& eta0,
                                    const StoppingRule& rule, const TruthTraces& truth = {});

// Conjugate gradient on the normal equations of op_D0 between the
// interface-vanishing Dirichlet spaces, run entirely on harmonic
// representatives. u0 must carry sigma on S (a Dirichlet-Dirichlet solve);
// the reconstruction returned is solve_D of the final B-trace.
TraceIterResult cg_dirichlet_h12(const StiffnessSystem& sys, const CauchyData& data,
                                 const Field& u0, const StoppingRule& rule,
                                 const TruthTraces& truth = {});

// Conjugate gradient for the L2(S)-embedded operator: iterates in the
// mean-augmented Dirichlet space on B, residuals in L2(S); directions are
// carried as zero-flux-on-S representatives. Returns the running field.
TraceIterResult cg_dirichlet_l2(const StiffnessSystem& sys, const CauchyData& data,
                                const Trace& phi0, const StoppingRule& rule,
                                const TruthTraces& truth = {});

// Transfer of Dirichlet-data error into flux-data error: tau_eps =
// op_FDN(sigma_eps - sigma), whose norm widens the stopping level to
// lambda * (delta + norm). The transfer identity is
// op_N(data, psi) = op_N(data_eps, psi) - tau_eps for every psi.
struct SigmaErrorRewrite {
  Trace tau_eps;
  double norm_tau_eps = 0.0;  // native norm on S
};
SigmaErrorRewrite rewrite_sigma_error(const StiffnessSystem& sys, const Trace& sigma_eps,
                                      const Trace& sigma);
double adjusted_stop_level(double lambda, double delta, double norm_tau_eps);

// Noise reduction for Dirichlet data: solve with sigma_delta on S and zero
// weak flux on B, then re-solve with that field's S-flux and zero values on
// B. The returned S-trace vanishes at the interface and replaces sigma_delta
// in a reduced Cauchy problem.
struct ReducedDirichletData {
  Trace sigma_reduced;  // Dirichlet on S, zero at the interface
  Field u_delta;        // first solve
  Field v_delta;        // second solve
};
ReducedDirichletData reduce_dirichlet_noise(const StiffnessSystem& sys,
                                            const Trace& sigma_delta);

// Power iteration on a self-adjoint positive operator given by `normal_op`
// (typically an adjoint-times-forward composition) in the inner product
// `dot`. Returns the last Rayleigh quotient, its change over the final step,
// and the square root as the norm estimate of the factored operator.
struct PowerEstimate {
  double lambda_max = 0.0;
  double last_change = 0.0;
  double norm_estimate = 0.0;
};
PowerEstimate power_norm(int n, std::uint64_t seed, int iters,
                         const std::function<Vector(const Vector&)>& normal_op,
                         const std::function<double(const Vector&, const Vector&)>& dot);

}  // namespace cauchyfem

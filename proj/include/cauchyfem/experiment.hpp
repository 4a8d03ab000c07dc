#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cauchyfem/solvers.hpp"

namespace cauchyfem {

enum class Algorithm { KM, Landweber, CgH12, CgL2 };
const char* algorithm_name(Algorithm a);

// Benchmark configuration. Defaults are the reference setup: parabolic
// domain of depth 1/2, constant forcing 8, basal bump of height 1/2 and
// width 1/3, 1% gaussian noise, L2 discrepancy stopping with lambda = 1.1.
struct ExperimentConfig {
  bool parabola = true;  // false: unit square with S = top side
  double depth = 0.5;
  double h = 0.05;
  double f0 = 8.0;
  double u0 = 0.5;
  double s = 1.0 / 3.0;
  double p = 1.0;  // noise percent of the peak field value
  std::uint64_t seed = 7;
  Algorithm algorithm = Algorithm::KM;
  double lambda = 1.1;
  int max_iter = 200;
  double solver_tol = 1e-12;
};

Mesh build_domain(const ExperimentConfig& cfg);

// Forward problem: constant forcing, gaussian bump Dirichlet values on B,
// zero weak flux on S. The measured data are sigma = u|_S and tau = 0.
struct SyntheticTruth {
  Field u_true;
  Trace sigma_true;  // Dirichlet on S
  Trace phi_true;    // Dirichlet on B
  double u_max = 0.0;
};
Vector bump_values(const StiffnessSystem& sys, double u0, double s);
SyntheticTruth make_synthetic(const StiffnessSystem& sys, const ExperimentConfig& cfg);
CauchyData exact_data(const StiffnessSystem& sys, const SyntheticTruth& truth,
                      const ExperimentConfig& cfg);

// Independent gaussian perturbation at every S node with standard deviation
// u_max * p / 100, deterministic in the seed; delta is the realized L2(S)
// norm of the perturbation.
struct NoisyData {
  Trace sigma_noisy;
  double delta = 0.0;
};
NoisyData add_noise(const StiffnessSystem& sys, const Trace& sigma, double p,
                    double u_max, std::uint64_t seed);

// Quality metrics of a stopped reconstruction against the synthetic truth.
//   err_l2_b:    relative L2(B) error of the B-trace;
//   err_h00_b:   relative native-norm error with interface values projected out;
//   osc_near_pi: largest |value| among the three B nodes nearest each
//                interface node, where the true trace is near zero.
struct RunMetrics {
  int stop_iteration = 0;
  StopReason reason = StopReason::IterationCap;
  double final_residual_l2 = 0.0;
  double err_l2_b = 0.0;
  double err_h00_b = 0.0;
  double osc_near_pi = 0.0;
};

struct RunResult {
  IterationHistory history;
  Trace phi;  // stopped B-trace
  Field reconstruction;
  RunMetrics metrics;
  double delta = 0.0;
  double u_max = 0.0;
  double wall_seconds = 0.0;
};

// Shared instance for runs that must see identical data.
struct PreparedInstance {
  StiffnessSystem sys;
  SyntheticTruth truth;
  CauchyData data;  // sigma replaced by the noisy trace
  double delta = 0.0;
};
PreparedInstance prepare_instance(const ExperimentConfig& cfg);

// One full pipeline run: mesh, synthesize, perturb, iterate from a zero
// starting trace, measure.
RunResult run_experiment(const ExperimentConfig& cfg);
// Run one algorithm on an already prepared instance.
RunResult run_on_instance(const PreparedInstance& inst, const ExperimentConfig& cfg,
                          Algorithm algorithm);

// The three-way benchmark on identical data: KM, CG in the Dirichlet pair,
// CG against L2(S).
struct ComparisonResult {
  PreparedInstance instance;
  RunResult km;
  RunResult cg_h12;
  RunResult cg_l2;
};
ComparisonResult compare_algorithms(const ExperimentConfig& cfg);

// B-trace table along the base, one row per B node in boundary order:
// "arclength,x,y,true,km,cg_h12,cg_l2". Absent columns stay empty.
std::string format_trace_table(const StiffnessSystem& sys, const Trace& truth_b,
                               const Trace* km, const Trace* cg_h12, const Trace* cg_l2);

// Run manifest: the resolved configuration and summary numbers as "key = value"
// lines, enough to reproduce the run.
std::string format_manifest(const ExperimentConfig& cfg,
                            const std::map<std::string, std::string>& extra);
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cauchyfem

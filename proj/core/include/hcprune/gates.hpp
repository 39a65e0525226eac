#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hcprune/graph.hpp"
#include "hcprune/rng.hpp"

namespace hcprune {

// Stochastic binary-ish gates built on a stretched, clamped concrete
// distribution. Each gate element is driven by a learnable log_alpha:
//
//   u  ~ U(0,1)
//   s  = sigmoid((1/beta) * log(u/(1-u)) + log_alpha)
//   sb = s * (zeta - gamma) + gamma
//   z  = clamp(sb, 0, 1)
//
// The stretch (gamma < 0 < 1 < zeta) gives z exact point masses at 0 and 1.
// Note that log_alpha sits OUTSIDE the 1/beta scaling; the closed forms
// below are derived for exactly this parameterization.
//
// P(z > 0): z > 0 iff sb > 0 iff s > t with t = -gamma/(zeta-gamma).
//   s > t iff (1/beta) logit(u) + log_alpha > logit(t)
//         iff logit(u) > beta * (logit(t) - log_alpha)
//         iff u > sigmoid(beta * (logit(t) - log_alpha)).
//   With logit(t) = log(t/(1-t)) = log(-gamma/zeta) and u uniform:
//   P(z > 0) = sigmoid(beta * (log_alpha - log(-gamma/zeta))).

enum class Granularity { MhaLayer, FfnLayer, QkDim, VoDim, FfnInt };

const char* granularity_name(Granularity g);

struct GateHyper {
  double beta = 2.0 / 3.0;
  double gamma = -0.1;
  double zeta = 1.1;
  double u_margin = 1e-6;  // u is clamped to [u_margin, 1-u_margin]

  void validate() const;  // throws unless gamma < 0 < 1 < zeta and beta > 0
};

// A vector of gate elements of one granularity in one layer. log_alpha is a
// leaf parameter; params_per_unit says how many raw weights one element
// controls (used by the sparsity accounting).
struct GateGroup {
  Var log_alpha;
  GateHyper hyper;
  Granularity granularity = Granularity::FfnInt;
  int layer_index = 0;
  bool ste_enabled = true;
  long params_per_unit = 0;

  std::size_t size() const { return log_alpha.value().size(); }

  // Gates start effectively open: log_alpha ~ N(2/beta, init_sd).
  static GateGroup open_init(Granularity g, int layer_index, std::size_t n,
                             const GateHyper& hyper, bool ste_enabled, long params_per_unit,
                             Rng& rng, double init_sd = 0.01);
};

// Draws one stochastic z vector as a graph node, differentiable w.r.t.
// log_alpha. With ste_enabled the clamp carries the clipped pass-through
// backward rule instead of the clamp's zero-in-saturation rule.
Var sample(const GateGroup& group, Rng& rng);

// Closed-form P(z > 0) per element (see derivation above).
std::vector<double> prob_nonzero(const GateGroup& group);

// Same quantity as a graph node, differentiable w.r.t. log_alpha.
Var prob_nonzero_node(const GateGroup& group);

// Noise-free gate value used for evaluation and compaction:
//   zhat = clamp(sigmoid(log_alpha) * (zeta - gamma) + gamma, 0, 1)
std::vector<double> deterministic_eval(const GateGroup& group);

// The clipped straight-through rule, elementwise:
//   out = 1 if upstream >= 1; -1 if upstream < -1; upstream otherwise.
Tensor ste_grad_transform(const Tensor& upstream);

struct GateStats {
  double p_zero = 0.0;
  double p_one = 0.0;
  double mean_z = 0.0;
  std::vector<double> histogram;  // mass of z strictly inside (0,1), equal-width bins
  std::size_t n_samples = 0;
};

// Monte Carlo estimate of the gate distribution, pooled over the group's
// elements. Serves as the independent oracle for the closed forms.
GateStats monte_carlo_stats(const GateGroup& group, std::size_t n_samples, Rng& rng,
                            std::size_t histogram_bins = 20);

// One row of the gate-sim CSV (log_alpha, p_zero, p_one, mean_z, det_z).
struct GateSimRow {
  double log_alpha = 0.0;
  double p_zero = 0.0;
  double p_one = 0.0;
  double mean_z = 0.0;
  double det_z = 0.0;
};

std::vector<GateSimRow> gate_sim_sweep(const GateHyper& hyper, double lo, double hi,
                                       double step, std::size_t n_samples, Rng& rng);

std::string gate_sim_csv(const std::vector<GateSimRow>& rows);

}  // namespace hcprune

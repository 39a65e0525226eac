#include "hcprune/fdcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcprune {

namespace {

double eval_loss(const std::function<Var()>& build, bool* kink_seen, double kink_margin) {
  Var root = build();
  if (!root.value().is_scalar()) {
    throw std::runtime_error("hcprune: finite_difference_check: loss is not scalar");
  }
  const double v = root.value().item();
  if (!std::isfinite(v)) {
    throw std::runtime_error("hcprune: finite_difference_check: non-finite loss");
  }
  if (min_kink_distance(root) < kink_margin) *kink_seen = true;
  return v;
}

}  // namespace

FdReport finite_difference_check(const std::function<Var()>& build,
                                 const std::vector<std::pair<std::string, Var>>& params,
                                 double h, double tol, std::size_t probes_per_param,
                                 Rng* probe_rng, double kink_margin) {
  FdReport report;
  report.tol = tol;
  report.kink_margin = kink_margin;

  // Analytic pass over a fresh graph.
  Var root = build();
  if (!root.value().is_scalar()) {
    throw std::runtime_error("hcprune: finite_difference_check: loss is not scalar");
  }
  if (!std::isfinite(root.value().item())) {
    throw std::runtime_error("hcprune: finite_difference_check: non-finite loss");
  }
  if (min_kink_distance(root) < kink_margin) report.kink_proximity = true;
  for (const auto& [name, p] : params) Var(p).zero_grad();
  backward(root);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& [name, p] : params) {
    const Node& n = *p.node();
    if (n.grad_allocated) {
      analytic.push_back(n.grad.vec());
    } else {
      analytic.emplace_back(n.value.size(), 0.0);
    }
  }

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    const auto& [name, pv] = params[pi];
    Tensor& x = Var(pv).mutable_value();

    std::vector<std::size_t> probes;
    if (probes_per_param >= x.size()) {
      probes.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) probes[i] = i;
    } else {
      if (!probe_rng) {
        throw std::runtime_error(
            "hcprune: finite_difference_check: probe subset requested without rng");
      }
      for (std::size_t k = 0; k < probes_per_param; ++k) {
        probes.push_back(static_cast<std::size_t>(probe_rng->next_u64() % x.size()));
      }
    }

    for (std::size_t i : probes) {
      const double x0 = x[i];
      x[i] = x0 + h;
      const double lp = eval_loss(build, &report.kink_proximity, kink_margin);
      x[i] = x0 - h;
      const double lm = eval_loss(build, &report.kink_proximity, kink_margin);
      x[i] = x0;

      FdEntry e;
      e.param = name;
      e.index = i;
      e.analytic = analytic[pi][i];
      e.numeric = (lp - lm) / (2.0 * h);
      const double denom = std::max({std::abs(e.analytic), std::abs(e.numeric), 1e-6});
      e.rel_err = std::abs(e.analytic - e.numeric) / denom;
      report.max_rel_err = std::max(report.max_rel_err, e.rel_err);
      report.entries.push_back(std::move(e));
    }
  }

  report.pass = report.kink_proximity || report.max_rel_err <= tol;
  return report;
}

}  // namespace hcprune

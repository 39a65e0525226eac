#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hcprune/graph.hpp"
#include "hcprune/rng.hpp"

namespace hcprune {

struct FdEntry {
  std::string param;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

struct FdReport {
  double max_rel_err = 0.0;
  double tol = 0.0;
  bool pass = false;
  // True when some clamp input came within kink_margin of a clamp bound in
  // any evaluated graph. Central differences are meaningless across the
  // kink, so the report flags the configuration instead of failing it.
  bool kink_proximity = false;
  double kink_margin = 0.0;
  std::vector<FdEntry> entries;
};

// Central-difference gradient check. `build` must rebuild the loss graph
// from the current values of the `params` leaves (define-by-run). If
// `probes_per_param` is smaller than a parameter's size, probe indices are
// drawn from `probe_rng`. Throws on non-finite loss.
FdReport finite_difference_check(const std::function<Var()>& build,
                                 const std::vector<std::pair<std::string, Var>>& params,
                                 double h, double tol,
                                 std::size_t probes_per_param = static_cast<std::size_t>(-1),
                                 Rng* probe_rng = nullptr, double kink_margin = 1e-3);

}  // namespace hcprune

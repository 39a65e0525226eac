#include "hcprune/gates.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "hcprune/ops.hpp"

namespace hcprune {

const char* granularity_name(Granularity g) {
  switch (g) {
    case Granularity::MhaLayer: return "mha_layer";
    case Granularity::FfnLayer: return "ffn_layer";
    case Granularity::QkDim: return "qk_dim";
    case Granularity::VoDim: return "vo_dim";
    case Granularity::FfnInt: return "ffn_int";
  }
  return "?";
}

void GateHyper::validate() const {
  if (!(gamma < 0.0 && zeta > 1.0 && beta > 0.0)) {
    throw std::runtime_error("hcprune: gate hyperparameters need gamma < 0 < 1 < zeta, beta > 0");
  }
  if (!(u_margin > 0.0 && u_margin < 0.5)) {
    throw std::runtime_error("hcprune: gate u_margin must lie in (0, 0.5)");
  }
}

GateGroup GateGroup::open_init(Granularity g, int layer_index, std::size_t n,
                               const GateHyper& hyper, bool ste_enabled, long params_per_unit,
                               Rng& rng, double init_sd) {
  hyper.validate();
  Tensor la({n});
  const double mean = 2.0 / hyper.beta;
  for (std::size_t i = 0; i < n; ++i) la[i] = rng.normal(mean, init_sd);
  GateGroup group;
  group.log_alpha = Var::param(std::move(la));
  group.hyper = hyper;
  group.granularity = g;
  group.layer_index = layer_index;
  group.ste_enabled = ste_enabled;
  group.params_per_unit = params_per_unit;
  return group;
}

Var sample(const GateGroup& group, Rng& rng) {
  const std::size_t n = group.size();
  const GateHyper& hp = group.hyper;
  Tensor noise({n});
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform_open(hp.u_margin);
    noise[i] = std::log(u / (1.0 - u)) / hp.beta;
  }
  Var s = sigmoid(add(group.log_alpha, Var::constant(std::move(noise))));
  Var stretched = add_scalar(scale(s, hp.zeta - hp.gamma), hp.gamma);
  Var z = clamp(stretched, 0.0, 1.0);
  if (group.ste_enabled) z = custom_grad(z, ste_grad_transform);
  return z;
}

namespace {

double open_threshold(const GateHyper& hp) { return std::log(-hp.gamma / hp.zeta); }

}  // namespace

std::vector<double> prob_nonzero(const GateGroup& group) {
  const double c = open_threshold(group.hyper);
  const Tensor& la = group.log_alpha.value();
  std::vector<double> p(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    p[i] = sigmoid_scalar(group.hyper.beta * (la[i] - c));
  }
  return p;
}

Var prob_nonzero_node(const GateGroup& group) {
  const double c = open_threshold(group.hyper);
  return sigmoid(scale(add_scalar(group.log_alpha, -c), group.hyper.beta));
}

std::vector<double> deterministic_eval(const GateGroup& group) {
  const GateHyper& hp = group.hyper;
  const Tensor& la = group.log_alpha.value();
  std::vector<double> z(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    const double v = sigmoid_scalar(la[i]) * (hp.zeta - hp.gamma) + hp.gamma;
    z[i] = std::min(1.0, std::max(0.0, v));
  }
  return z;
}

Tensor ste_grad_transform(const Tensor& upstream) {
  Tensor out = upstream;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] >= 1.0) {
      out[i] = 1.0;
    } else if (out[i] < -1.0) {
      out[i] = -1.0;
    }
  }
  return out;
}

GateStats monte_carlo_stats(const GateGroup& group, std::size_t n_samples, Rng& rng,
                            std::size_t histogram_bins) {
  if (n_samples < 1) throw std::runtime_error("hcprune: monte_carlo_stats needs n_samples >= 1");
  const GateHyper& hp = group.hyper;
  const Tensor& la = group.log_alpha.value();

  GateStats stats;
  stats.histogram.assign(histogram_bins, 0.0);
  stats.n_samples = n_samples;

  std::size_t zeros = 0, ones = 0;
  double acc = 0.0;
  const double total = static_cast<double>(n_samples * la.size());
  for (std::size_t t = 0; t < n_samples; ++t) {
    for (std::size_t i = 0; i < la.size(); ++i) {
      const double u = rng.uniform_open(hp.u_margin);
      const double s = sigmoid_scalar(std::log(u / (1.0 - u)) / hp.beta + la[i]);
      const double sb = s * (hp.zeta - hp.gamma) + hp.gamma;
      const double z = std::min(1.0, std::max(0.0, sb));
      acc += z;
      if (z <= 0.0) {
        ++zeros;
      } else if (z >= 1.0) {
        ++ones;
      } else {
        std::size_t bin = static_cast<std::size_t>(z * static_cast<double>(histogram_bins));
        if (bin >= histogram_bins) bin = histogram_bins - 1;
        stats.histogram[bin] += 1.0;
      }
    }
  }
  stats.p_zero = static_cast<double>(zeros) / total;
  stats.p_one = static_cast<double>(ones) / total;
  stats.mean_z = acc / total;
  for (double& b : stats.histogram) b /= total;
  return stats;
}

std::vector<GateSimRow> gate_sim_sweep(const GateHyper& hyper, double lo, double hi, double step,
                                       std::size_t n_samples, Rng& rng) {
  if (step <= 0.0) throw std::runtime_error("hcprune: gate_sim_sweep needs step > 0");
  std::vector<GateSimRow> rows;
  for (double a = lo; a <= hi + 1e-12; a += step) {
    GateGroup g;
    g.log_alpha = Var::constant(Tensor({1}, {a}));
    g.hyper = hyper;
    // common random numbers across sweep points: z is monotone in log_alpha
    // for fixed u, so the sampled mean curve inherits the monotonicity
    Rng point_rng = rng.split(0xC5u);
    GateStats st = monte_carlo_stats(g, n_samples, point_rng);
    GateSimRow row;
    row.log_alpha = a;
    row.p_zero = st.p_zero;
    row.p_one = st.p_one;
    row.mean_z = st.mean_z;
    row.det_z = deterministic_eval(g)[0];
    rows.push_back(row);
  }
  return rows;
}

std::string gate_sim_csv(const std::vector<GateSimRow>& rows) {
  std::ostringstream os;
  os << "log_alpha,p_zero,p_one,mean_z,det_z\n";
  char buf[192];
  for (const GateSimRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g,%.6g\n", r.log_alpha, r.p_zero, r.p_one,
                  r.mean_z, r.det_z);
    os << buf;
  }
  return os.str();
}

}  // namespace hcprune

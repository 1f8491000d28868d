#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chargetune/errors.hpp"
#include "chargetune/fitting.hpp"
#include "least_squares.hpp"

namespace chargetune {

const char* to_string(FitFlag flag) {
  switch (flag) {
    case FitFlag::NotConverged: return "not_converged";
    case FitFlag::NonIdentifiable: return "non_identifiable";
    case FitFlag::BoundActive: return "bound_active";
    case FitFlag::ConstraintViolated: return "constraint_violated";
    case FitFlag::NoPeak: return "no_peak";
    case FitFlag::Truncated: return "truncated";
  }
  return "unknown";
}

std::vector<std::string> flag_names(std::uint32_t flags) {
  std::vector<std::string> out;
  for (std::uint32_t bit = 1; bit <= static_cast<std::uint32_t>(FitFlag::Truncated); bit <<= 1) {
    if (flags & bit) out.emplace_back(to_string(static_cast<FitFlag>(bit)));
  }
  return out;
}

namespace {

std::size_t position(const std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no fit parameter named " + name);
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

double FitResult::value(const std::string& name) const { return values[position(names, name)]; }
double FitResult::error(const std::string& name) const { return std_errors[position(names, name)]; }

void PLTrace::validate() const {
  if (t_park_s.size() != counts_per_s.size()) throw DomainError("trace columns differ in length");
  if (!sigma.empty() && sigma.size() != t_park_s.size()) throw DomainError("trace sigma column has the wrong length");
  for (std::size_t i = 0; i < t_park_s.size(); ++i) {
    if (!std::isfinite(t_park_s[i]) || !std::isfinite(counts_per_s[i])) throw DomainError("trace values must be finite");
    if (i > 0 && !(t_park_s[i] > t_park_s[i - 1])) throw DomainError("trace times must be strictly increasing");
    if (counts_per_s[i] < 0.0) throw DomainError("trace counts must be non-negative");
    if (!sigma.empty() && !(sigma[i] > 0.0)) throw DomainError("trace uncertainties must be positive");
  }
}

namespace {

std::vector<double> trace_weights(const PLTrace& trace, TraceWeighting weighting) {
  std::vector<double> w(trace.t_park_s.size(), 1.0);
  // Zero-count bins need a variance floor. Tying it to the brightest sample
  // keeps the estimate unchanged when all counts are rescaled.
  const double y_max = trace.counts_per_s.empty()
                           ? 0.0
                           : *std::max_element(trace.counts_per_s.begin(), trace.counts_per_s.end());
  const double floor = y_max > 0.0 ? 1e-3 * y_max : 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    switch (weighting) {
      case TraceWeighting::Poisson: w[i] = 1.0 / std::max(trace.counts_per_s[i], floor); break;
      case TraceWeighting::Sigma: w[i] = 1.0 / (trace.sigma[i] * trace.sigma[i]); break;
      case TraceWeighting::Uniform: break;
    }
  }
  return w;
}

detail::LsqSpec trace_problem(const PLTrace& trace, const std::vector<double>& w, const TraceFitOptions& options) {
  const int n = static_cast<int>(trace.t_park_s.size());
  detail::LsqSpec spec;
  spec.n_params = 4;
  spec.n_residuals = n + 1;
  spec.max_iterations = options.max_iterations;
  const double inf = std::numeric_limits<double>::infinity();
  spec.lower = {-inf, -inf, 0.0, 0.0};
  spec.upper = {inf, inf, inf, inf};
  const double pen = std::sqrt(2.0 * options.penalty_weight);
  spec.eval = [&trace, w, n, pen](const double* p, double* r, double* jac) {
    const TraceModelParams m{p[0], p[1], p[2], p[3], 0.0};
    for (int i = 0; i < n; ++i) {
      const double t = trace.t_park_s[i];
      const double sw = std::sqrt(w[i]);
      r[i] = sw * (pl_trace(t, m) - trace.counts_per_s[i]);
      if (jac) {
        const TraceGradient g = pl_trace_gradient(t, m);
        jac[4 * i + 0] = sw * g.dA;
        jac[4 * i + 1] = sw * g.dB;
        jac[4 * i + 2] = sw * g.dk;
        jac[4 * i + 3] = sw * g.dD;
      }
    }
    const double gap = p[0] + p[1];
    const bool violated = gap < 0.0;
    r[n] = violated ? -pen * gap : 0.0;
    if (jac) {
      jac[4 * n + 0] = violated ? -pen : 0.0;
      jac[4 * n + 1] = violated ? -pen : 0.0;
      jac[4 * n + 2] = 0.0;
      jac[4 * n + 3] = 0.0;
    }
  };
  return spec;
}

// (A, B) for fixed k and D by weighted linear regression of
// ln(D/y - 1) = A + B exp(-k t).
bool linear_start(const PLTrace& trace, double k, double d, double& a, double& b) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t i = 0; i < trace.t_park_s.size(); ++i) {
    const double y = std::clamp(trace.counts_per_s[i], 0.5, d * (1.0 - 1e-9));
    const double z = std::log(d / y - 1.0);
    const double x = std::exp(-k * trace.t_park_s[i]);
    const double w = y * (d - y) * (d - y) / (d * d);
    if (!(w > 0.0) || !std::isfinite(z)) continue;
    sw += w;
    sx += w * x;
    sy += w * z;
    sxx += w * x * x;
    sxy += w * x * z;
    ++used;
  }
  const double det = sw * sxx - sx * sx;
  if (used < 2 || !(det > 1e-300)) return false;
  b = (sw * sxy - sx * sy) / det;
  a = (sy - b * sx) / sw;
  return std::isfinite(a) && std::isfinite(b);
}

}  // namespace

double trace_objective(const PLTrace& trace, const TraceModelParams& params, const TraceFitOptions& options) {
  trace.validate();
  const auto w = trace_weights(trace, options.weighting);
  const auto spec = trace_problem(trace, w, options);
  std::vector<double> r(spec.n_residuals);
  const double p[4] = {params.A, params.B, params.k_per_s, params.D};
  spec.eval(p, r.data(), nullptr);
  double s = 0.0;
  for (double v : r) s += v * v;
  return 0.5 * s;
}

FitResult fit_trace(const PLTrace& trace, const TraceFitOptions& options) {
  trace.validate();
  const int n = static_cast<int>(trace.t_park_s.size());
  if (n < 8) throw DomainError("trace fit needs at least 8 samples");
  if (options.weighting == TraceWeighting::Sigma && trace.sigma.empty()) {
    throw DomainError("sigma weighting requested but the trace has no uncertainties");
  }
  if (options.k_grid_points < 1) throw DomainError("k grid needs at least one point");

  const auto w = trace_weights(trace, options.weighting);
  const auto spec = trace_problem(trace, w, options);

  const double span = trace.t_park_s.back() - trace.t_park_s.front();
  const double y_max = *std::max_element(trace.counts_per_s.begin(), trace.counts_per_s.end());
  const double y_min = *std::min_element(trace.counts_per_s.begin(), trace.counts_per_s.end());

  detail::LsqOutcome best;
  best.cost = std::numeric_limits<double>::infinity();
  bool have_best = false;
  if (y_max > 0.0) {
    const double k_lo = 0.1 / span, k_hi = 10.0 / span;
    for (int g = 0; g < options.k_grid_points; ++g) {
      const double frac = options.k_grid_points > 1 ? static_cast<double>(g) / (options.k_grid_points - 1) : 0.5;
      const double k0 = k_lo * std::pow(k_hi / k_lo, frac);
      for (double d_factor : {1.001, 1.02, 1.2}) {
        const double d0 = y_max * d_factor;
        double a0 = 0.0, b0 = 0.0;
        if (!linear_start(trace, k0, d0, a0, b0)) continue;
        if (a0 + b0 <= 0.0) b0 = 1.0 - a0;
        const auto outcome = detail::solve_lsq(spec, {a0, b0, k0, d0});
        if (std::isfinite(outcome.cost) && outcome.cost < best.cost) {
          best = outcome;
          have_best = true;
        }
      }
    }
  }
  if (!have_best) {
    // Nothing to invert (e.g. all counts zero): report the flat start.
    best.params = {0.0, 0.0, 1.0 / span, std::max(2.0 * y_max, 1.0)};
    best.converged = false;
  }

  FitResult out;
  out.names = {"A", "B", "k", "D"};
  detail::summarise(out, spec, best, n, options.weighting != TraceWeighting::Uniform, options.rank_tolerance);

  const double a_plus_b = out.values[0] + out.values[1];
  out.derived["A_plus_B"] = a_plus_b;
  if (!(a_plus_b > 0.0)) out.set(FitFlag::ConstraintViolated);

  // A trace with no significant variation cannot separate A, B and k.
  double chi2_const = 0.0;
  {
    double sw = 0.0, swy = 0.0;
    for (int i = 0; i < n; ++i) {
      sw += w[i];
      swy += w[i] * trace.counts_per_s[i];
    }
    const double mean = swy / sw;
    for (int i = 0; i < n; ++i) chi2_const += w[i] * (trace.counts_per_s[i] - mean) * (trace.counts_per_s[i] - mean);
  }
  const bool flat = options.weighting == TraceWeighting::Uniform ? (y_max - y_min) <= 1e-9 * std::max(y_max, 1.0)
                                                                 : chi2_const <= static_cast<double>(n);
  if (flat || !have_best) {
    out.set(FitFlag::NonIdentifiable);
    std::fill(out.std_errors.begin(), out.std_errors.end(), std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace chargetune

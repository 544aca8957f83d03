#include "feedmix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "feedmix/analytic.hpp"
#include "feedmix/errors.hpp"
#include "feedmix/parallel.hpp"

namespace feedmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxHalvings = 60;

// splitmix64; deterministic across platforms, unlike <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform in (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

// Weight of an outer CES argument: dF/da = (a/F)^(r-1).
double ces_weight(double a, double f, double r) {
  if (r == 1.0) return 1.0;
  if (a > 0.0) return std::pow(a / f, r - 1.0);
  return r > 1.0 ? 0.0 : kInf;
}

struct Face {
  std::vector<std::size_t> index;
  std::vector<double> weights;  // lambda
  std::vector<double> upper;    // (1 - shrink) W / mu
};

Face make_face(const Scenario& s, std::span<const std::size_t> support, double shrink) {
  Face face;
  for (auto i : support) {
    if (i >= s.size()) throw std::out_of_range("support index out of range");
    face.index.push_back(i);
    face.weights.push_back(s.feedstocks[i].conversion);
    face.upper.push_back((1.0 - shrink) * reservoir_limit(s.feedstocks[i]));
  }
  return face;
}

double face_capacity(const Face& face) {
  double cap = 0.0;
  for (std::size_t k = 0; k < face.index.size(); ++k) cap += face.weights[k] * face.upper[k];
  return cap;
}

void expand(const Face& face, std::span<const double> compact, std::vector<double>& full) {
  std::fill(full.begin(), full.end(), 0.0);
  for (std::size_t k = 0; k < face.index.size(); ++k) full[face.index[k]] = compact[k];
}

bool better(double fa, std::span<const double> xa, double fb, std::span<const double> xb) {
  if (fa != fb) return fa < fb;
  return std::lexicographical_compare(xa.begin(), xa.end(), xb.begin(), xb.end());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  return r.next();
}

// z^g - x^g without cancellation when z is close to x.
double power_change(double x, double z, double g) {
  if (x > 0.0 && z > 0.0) return std::pow(x, g) * std::expm1(g * std::log1p((z - x) / x));
  return std::pow(z, g) - std::pow(x, g);
}

// F(z) - F(x), accurate relative to the difference itself rather than to F.
// `cost` and `water` are the totals at x. Near a minimum the plain difference
// of two objective values is dominated by rounding, which stalls the line
// search long before the iterate has converged.
double objective_change(std::span<const double> x, std::span<const double> z, const Scenario& s,
                        double cost, double water) {
  double d_cost = 0.0, d_water = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == z[i]) continue;
    const auto& f = s.feedstocks[i];
    const double dx = z[i] - x[i];
    d_cost += f.unit_cost * dx;
    if (f.transport_cost != 0.0) d_cost += f.transport_cost * power_change(x[i], z[i], s.transport_exponent);
    if (f.reservoir.is_bounded()) {
      const double w = f.reservoir.volume();
      d_water += w * w * f.footprint * dx / (std::fma(-f.footprint, z[i], w) * std::fma(-f.footprint, x[i], w));
    } else {
      d_water += f.footprint * dx;
    }
  }
  const double r = s.ces_exponent;
  if (r == 1.0) return d_cost + d_water;
  const double m = std::max(cost, water);
  if (!(m > 0.0)) return ces(cost + d_cost, water + d_water, r) - ces(cost, water, r);
  auto part = [&](double a, double da) {
    if (a > 0.0) return std::pow(a / m, r) * std::expm1(r * std::log1p(da / a));
    return std::pow(std::max(da, 0.0) / m, r);
  };
  const double base = std::pow(cost / m, r) + std::pow(water / m, r);
  const double rel = (part(cost, d_cost) + part(water, d_water)) / base;
  return m * std::pow(base, 1.0 / r) * std::expm1(std::log1p(rel) / r);
}

}  // namespace

void validate(const SolverConfig& cfg) {
  if (cfg.max_iters == 0) throw std::invalid_argument("max_iters must be positive");
  if (!(cfg.step_tol > 0.0)) throw std::invalid_argument("step_tol must be positive");
  if (cfg.multi_starts == 0) throw std::invalid_argument("multi_starts must be positive");
  if (!(cfg.barrier_shrink > 0.0) || !(cfg.barrier_shrink < 1e-3))
    throw std::invalid_argument("barrier_shrink must lie in (0, 1e-3)");
  if (cfg.support_enum_limit == 0) throw std::invalid_argument("support_enum_limit must be positive");
  if (!(cfg.grad_eps > 0.0)) throw std::invalid_argument("grad_eps must be positive");
}

std::vector<double> gradient(std::span<const double> x, const Scenario& s, double grad_eps) {
  const double cost = total_cost(x, s);
  const double water = water_impact(x, s);
  const double r = s.ces_exponent;
  const double f = ces(cost, water, r);
  const double w_cost = ces_weight(cost, f, r);
  const double w_water = ces_weight(water, f, r);
  const double gamma = s.transport_exponent;

  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& fs = s.feedstocks[i];
    double d_cost = fs.unit_cost;
    if (fs.transport_cost != 0.0) {
      d_cost += gamma * fs.transport_cost * std::pow(std::max(x[i], grad_eps), gamma - 1.0);
    }
    double d_water = fs.footprint;
    if (fs.reservoir.is_bounded()) {
      const double w = fs.reservoir.volume();
      const double slack = std::fma(-fs.footprint, x[i], w);
      d_water = fs.footprint * w * w / (slack * slack);
    }
    g[i] = (d_cost != 0.0 ? w_cost * d_cost : 0.0) + w_water * d_water;
  }
  return g;
}

double KktReport::max_stationarity() const { return inf_norm(stationarity); }

KktReport kkt_residual(std::span<const double> x, const Scenario& s, double active_tol,
                       double grad_eps) {
  KktReport report;
  double produced = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) produced += s.feedstocks[i].conversion * x[i];
  report.primal = std::abs(produced - s.demand);

  const auto g = gradient(x, s, grad_eps);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > active_tol)) continue;
    const double lam = s.feedstocks[i].conversion;
    report.active.push_back(i);
    num += g[i] * lam;
    den += lam * lam;
  }
  if (den > 0.0) report.xi_estimate = num / den;
  for (auto i : report.active) {
    report.stationarity.push_back(g[i] - report.xi_estimate * s.feedstocks[i].conversion);
  }
  return report;
}

std::vector<double> project_onto_slice(std::span<const double> y, std::span<const double> weights,
                                       std::span<const double> upper, double target) {
  const std::size_t n = y.size();
  // x_k(nu) = clamp(y_k + nu w_k, 0, u_k); h(nu) = sum w_k x_k(nu) is
  // nondecreasing and piecewise linear with breakpoints where a coordinate
  // hits a bound.
  auto at = [&](double nu, std::size_t k) {
    return std::clamp(y[k] + nu * weights[k], 0.0, upper[k]);
  };
  auto produced = [&](double nu) {
    double h = 0.0;
    for (std::size_t k = 0; k < n; ++k) h += weights[k] * at(nu, k);
    return h;
  };
  std::vector<double> breaks;
  breaks.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    breaks.push_back(-y[k] / weights[k]);
    if (std::isfinite(upper[k])) breaks.push_back((upper[k] - y[k]) / weights[k]);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::size_t b = 0;
  while (b < breaks.size() && produced(breaks[b]) < target) ++b;
  if (b == 0) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = at(breaks[0], k);
    return x;
  }
  if (b == breaks.size()) {
    bool open = false;
    for (std::size_t k = 0; k < n; ++k) open = open || !std::isfinite(upper[k]);
    if (!open) throw InfeasibleScenario("face capacity is below demand");
  }
  // Within the bracketing segment the active set is fixed, so nu solves a
  // linear equation directly.
  const double lo = breaks[b - 1];
  const double mid = b == breaks.size() ? lo + 1.0 : 0.5 * (lo + breaks[b]);
  double fixed = 0.0, slope = 0.0;
  std::vector<bool> free(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = y[k] + mid * weights[k];
    if (v > 0.0 && v < upper[k]) {
      free[k] = true;
      fixed += weights[k] * y[k];
      slope += weights[k] * weights[k];
    } else {
      fixed += weights[k] * at(mid, k);
    }
  }
  std::vector<double> x(n);
  if (slope == 0.0) {
    for (std::size_t k = 0; k < n; ++k) x[k] = at(breaks[b], k);
    return x;
  }
  const double nu = (target - fixed) / slope;
  for (std::size_t k = 0; k < n; ++k) x[k] = at(nu, k);
  // Push the leftover rounding onto the heaviest free coordinate.
  std::size_t heavy = n;
  for (std::size_t k = 0; k < n; ++k)
    if (free[k] && (heavy == n || weights[k] > weights[heavy])) heavy = k;
  double h = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (k != heavy) h += weights[k] * x[k];
  x[heavy] = std::clamp((target - h) / weights[heavy], 0.0, upper[heavy]);
  return x;
}

DescentRun projected_gradient_descent(const Scenario& s, std::span<const std::size_t> support,
                                      std::span<const double> start, const SolverConfig& cfg,
                                      bool record_history) {
  if (start.size() != s.size()) throw DimensionMismatch("start point has wrong length");
  const Face face = make_face(s, support, cfg.barrier_shrink);
  const std::size_t k = face.index.size();
  const double q = s.demand;

  std::vector<double> full(s.size(), 0.0), full_z(s.size(), 0.0);
  auto grad_at = [&](std::span<const double> c) {
    expand(face, c, full);
    const auto g = gradient(full, s, cfg.grad_eps);
    std::vector<double> gc(k);
    for (std::size_t j = 0; j < k; ++j) gc[j] = g[face.index[j]];
    return gc;
  };

  std::vector<double> y(k);
  for (std::size_t j = 0; j < k; ++j) y[j] = start[face.index[j]];
  std::vector<double> x = project_onto_slice(y, face.weights, face.upper, q);
  std::vector<double> g = grad_at(x);  // leaves `full` at x
  double cost_x = total_cost(full, s);
  double water_x = water_impact(full, s);
  double fx = ces(cost_x, water_x, s.ces_exponent);

  DescentRun run;
  if (record_history) run.history.push_back(fx);
  double alpha = std::max(1.0, inf_norm(x)) / std::max(inf_norm(g), 1e-300);
  std::vector<double> trial(k), z;
  for (std::size_t it = 0; it < cfg.max_iters && !run.converged; ++it) {
    run.iterations = it + 1;
    bool accepted = false;
    double df = 0.0;
    // Projection leaves sum lambda z - Q at rounding level; near a minimum
    // that drift, priced at the multiplier, swamps the true decrease. The
    // line search therefore works on the Lagrangian with xi frozen.
    double gl = 0.0, ll = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (x[j] > 0.0 && x[j] < face.upper[j]) {
        gl += g[j] * face.weights[j];
        ll += face.weights[j] * face.weights[j];
      }
    }
    const double xi = ll > 0.0 ? gl / ll : 0.0;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t j = 0; j < k; ++j) trial[j] = x[j] - alpha * g[j];
      z = project_onto_slice(trial, face.weights, face.upper, q);
      double step = 0.0, decrease = 0.0, drift = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double dj = z[j] - x[j];
        step = std::max(step, std::abs(dj));
        decrease += (g[j] - xi * face.weights[j]) * dj;
        drift += face.weights[j] * dj;
      }
      if (step == 0.0) break;  // fixed point of the projected step
      if (decrease < 0.0) {
        expand(face, z, full_z);
        df = objective_change(full, full_z, s, cost_x, water_x) - xi * drift;
        if (df <= kArmijo * decrease) {
          accepted = true;
          break;
        }
      }
      alpha *= kBacktrack;
    }
    if (!accepted) {
      run.converged = true;
      break;
    }
    std::vector<double> gz = grad_at(z);
    double ss = 0.0, sy = 0.0, step = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double sj = z[j] - x[j];
      ss += sj * sj;
      sy += sj * (gz[j] - g[j]);
      step = std::max(step, std::abs(sj));
    }
    x.swap(z);
    g.swap(gz);
    cost_x = total_cost(full, s);
    water_x = water_impact(full, s);
    // Large steps resync with a fresh evaluation; small ones accumulate so
    // the tail stays resolved below the rounding of F itself.
    const double fresh = ces(cost_x, water_x, s.ces_exponent);
    fx = df < -1e-8 * std::abs(fx) ? std::min(fresh, fx) : fx + df;
    if (record_history) run.history.push_back(fx);
    if (step <= cfg.step_tol * std::max(1.0, inf_norm(x))) run.converged = true;
    // Barzilai-Borwein step for the next trial; grow on negative curvature.
    alpha = sy > 0.0 ? ss / sy : 4.0 * alpha;
    alpha = std::clamp(alpha, 1e-30, 1e30);
  }
  run.mix.assign(s.size(), 0.0);
  expand(face, x, run.mix);
  run.objective = objective(run.mix, s);
  return run;
}

std::vector<std::vector<double>> starting_points(const Scenario& s,
                                                 std::span<const std::size_t> support,
                                                 const SolverConfig& cfg, std::uint64_t stream) {
  const Face face = make_face(s, support, cfg.barrier_shrink);
  const std::size_t k = face.index.size();
  const double q = s.demand;
  std::vector<std::vector<double>> starts;
  starts.reserve(cfg.multi_starts);

  std::vector<double> compact(k);
  const double cap = face_capacity(face);
  if (std::isfinite(cap)) {
    const double eta = std::min(1.0, q / cap);
    for (std::size_t j = 0; j < k; ++j) compact[j] = eta * face.upper[j];
  } else {
    double norm2 = 0.0;
    for (double w : face.weights) norm2 += w * w;
    for (std::size_t j = 0; j < k; ++j) compact[j] = q * face.weights[j] / norm2;
  }
  auto push = [&](const std::vector<double>& c) {
    const auto p = project_onto_slice(c, face.weights, face.upper, q);
    std::vector<double> x(s.size(), 0.0);
    expand(face, p, x);
    starts.push_back(std::move(x));
  };
  push(compact);

  Rng rng(mix_seed(cfg.seed, stream));
  std::vector<double> w(k);
  while (starts.size() < cfg.multi_starts) {
    double total = 0.0;
    for (auto& e : w) {
      e = -std::log(rng.uniform());
      total += e;
    }
    for (std::size_t j = 0; j < k; ++j) compact[j] = w[j] / total * q / face.weights[j];
    push(compact);
  }
  return starts;
}

Solution solve_general(const Scenario& s, const SolverConfig& cfg) {
  validate(s);
  validate(cfg);
  if (!existence_condition(s)) {
    throw InfeasibleScenario("combined reservoir capacity does not exceed demand");
  }
  const std::size_t n = s.size();

  std::vector<std::vector<std::size_t>> supports;
  if (n <= cfg.support_enum_limit && n < 63) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) idx.push_back(i);
      supports.push_back(std::move(idx));
    }
    std::sort(supports.begin(), supports.end());
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto p = productive_potentials(s);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    for (std::size_t len = 1; len <= n; ++len) {
      std::vector<std::size_t> idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
      std::sort(idx.begin(), idx.end());
      supports.push_back(std::move(idx));
    }
  }

  struct FaceResult {
    bool usable = false;
    bool converged = false;
    std::vector<double> mix;
    double objective = kInf;
  };
  std::vector<FaceResult> results(supports.size());
  parallel_for(supports.size(), [&](std::size_t si) {
    const auto& support = supports[si];
    const Face face = make_face(s, support, cfg.barrier_shrink);
    if (!(face_capacity(face) >= s.demand)) return;
    FaceResult& out = results[si];
    out.usable = true;
    if (support.size() == 1) {
      out.mix.assign(n, 0.0);
      out.mix[support[0]] = s.demand / face.weights[0];
      out.objective = objective(out.mix, s);
      out.converged = true;
      return;
    }
    std::uint64_t stream = 0;
    for (auto i : support) stream = stream * 1315423911ULL + i + 1;
    for (const auto& start : starting_points(s, support, cfg, stream)) {
      auto run = projected_gradient_descent(s, support, start, cfg);
      out.converged = out.converged || run.converged;
      if (out.mix.empty() || better(run.objective, run.mix, out.objective, out.mix)) {
        out.mix = std::move(run.mix);
        out.objective = run.objective;
      }
    }
  });

  const FaceResult* best = nullptr;
  for (const auto& r : results) {
    if (!r.usable) continue;
    if (best == nullptr || better(r.objective, r.mix, best->objective, best->mix)) best = &r;
  }
  if (best == nullptr) {
    throw InfeasibleScenario("no support can meet demand within the reservoir margins");
  }

  Solution sol;
  sol.mix = best->mix;
  sol.objective = best->objective;
  sol.xi = kkt_residual(sol.mix, s, 1e-10, cfg.grad_eps).xi_estimate;
  sol.status = Status::NumericBestEffort;
  sol.regime = diagnose(s).regime;
  if (!best->converged) {
    throw NonConvergence("iteration cap reached on every start of the best support", sol);
  }
  return sol;
}

Solution solve(const Scenario& s, const SolverConfig& cfg) {
  validate(s);
  validate(cfg);
  if (!existence_condition(s)) {
    throw InfeasibleScenario("combined reservoir capacity does not exceed demand");
  }
  if (diagnose(s).regime != Regime::General) {
    AnalyticConfig acfg;
    acfg.support_enum_limit = cfg.support_enum_limit;
    try {
      return solve_analytic(s, acfg);
    } catch (const SupportEnumerationOverflow&) {
      // too many feedstocks for exhaustive faces; use the numerical method
    }
  }
  return solve_general(s, cfg);
}

}  // namespace feedmix

#include "feedmix/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"

#include "feedmix/analytic.hpp"
#include "feedmix/errors.hpp"
#include "feedmix/oracle.hpp"
#include "feedmix/report.hpp"
#include "feedmix/scenario_io.hpp"
#include "feedmix/solver.hpp"

namespace feedmix::cli {

namespace {

std::optional<Scenario> load_or_report(const std::filesystem::path& file, std::ostream& err) {
  try {
    return load_scenario(file);
  } catch (const ScenarioParseError& e) {
    err << file.string() << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

void emit(std::ostream& out, const Solution& sol, const Scenario& s, const SolveOptions& opts) {
  if (opts.format == "json") {
    write_json(out, sol, s, opts.method);
  } else if (opts.format == "csv") {
    write_csv(out, sol, s);
  } else {
    write_table(out, sol, s, opts.method);
  }
}

}  // namespace

int cmd_check(const std::filesystem::path& file, std::ostream& out, std::ostream& err) {
  const auto s = load_or_report(file, err);
  if (!s) return kBadInput;
  const double capacity = reservoir_capacity(*s);
  out << std::setprecision(6);
  out << "reservoir capacity (sum lambda*W/mu): " << capacity
      << (std::isfinite(capacity) ? "" : " (unbounded reservoir)") << '\n'
      << "demand Q: " << s->demand << '\n';
  if (existence_condition(*s)) {
    out << "FEASIBLE\n";
    return kOk;
  }
  out << "INFEASIBLE\n";
  return kInfeasible;
}

int cmd_solve(const std::filesystem::path& file, const SolveOptions& opts, std::ostream& out,
              std::ostream& err) {
  const auto loaded = load_or_report(file, err);
  if (!loaded) return kBadInput;
  const Scenario& s = *loaded;
  if (opts.method == "oracle" && s.size() > kMaxOracleSize) {
    err << "method oracle supports at most " << kMaxOracleSize << " feedstocks, scenario has "
        << s.size() << '\n';
    return kMethodMismatch;
  }
  if (!existence_condition(s)) {
    err << "infeasible: combined reservoir capacity " << reservoir_capacity(s)
        << " does not exceed demand " << s.demand << '\n';
    return kInfeasible;
  }

  SolverConfig cfg;
  cfg.seed = opts.seed;
  try {
    Solution sol;
    if (opts.method == "auto") {
      sol = solve(s, cfg);
    } else if (opts.method == "analytic") {
      AnalyticConfig acfg;
      acfg.support_enum_limit = cfg.support_enum_limit;
      sol = solve_analytic(s, acfg);
    } else if (opts.method == "general") {
      sol = solve_general(s, cfg);
    } else if (opts.method == "oracle") {
      GridSpec g;
      g.points_per_axis = opts.grid_points;
      sol = grid_search(s, g);
    } else {
      err << "unknown method " << opts.method << '\n';
      return kBadInput;
    }
    emit(out, sol, s, opts);
    return kOk;
  } catch (const NonConvergence& e) {
    err << "warning: " << e.what() << "; reporting best iterate\n";
    emit(out, e.best(), s, opts);
    return kNonConvergence;
  } catch (const RegimeMismatch& e) {
    err << "method " << opts.method << ": " << e.what() << '\n';
    return kMethodMismatch;
  } catch (const SupportEnumerationOverflow& e) {
    err << "method " << opts.method << ": " << e.what() << '\n';
    return kMethodMismatch;
  } catch (const InfeasibleScenario& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const EmptyGrid& e) {
    err << "oracle: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kBadInput;
  }
}

int cmd_potentials(const std::filesystem::path& file, std::ostream& out, std::ostream& err) {
  const auto loaded = load_or_report(file, err);
  if (!loaded) return kBadInput;
  const Scenario& s = *loaded;
  const auto top = xi_bar(s);
  const auto bottom = min_potential(s);
  std::ostringstream os;
  os << std::setprecision(6);
  os << std::left << std::setw(4) << "#" << std::setw(18) << "name" << std::right << std::setw(14)
     << "P" << "\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << std::left << std::setw(4) << i << std::setw(18) << s.feedstocks[i].name << std::right
       << std::setw(14) << productive_potential(s, i);
    if (i == top.index) os << "  max";
    if (i == bottom.index) os << "  min";
    os << '\n';
  }
  const auto regime = diagnose(s).regime;
  if (regime == Regime::LinearFree) {
    os << (interchangeable_linear(s) ? "INTERCHANGEABLE" : "NOT INTERCHANGEABLE") << '\n';
  } else {
    os << "note: the equal-potential test applies to the LinearFree regime only (regime is "
       << to_string(regime) << ")\n";
  }
  out << os.str();
  return kOk;
}

ParamSelector ParamSelector::parse(const std::string& text, const Scenario& s) {
  ParamSelector sel;
  if (text == "Q") {
    sel.target = Target::Demand;
  } else if (text == "gamma") {
    sel.target = Target::Gamma;
  } else if (text == "r") {
    sel.target = Target::R;
  } else {
    const auto dot = text.find('.');
    if (dot == std::string::npos || dot == 0) {
      throw std::invalid_argument("selector must be Q, gamma, r or <index>.<field>, got '" + text + "'");
    }
    const std::string idx = text.substr(0, dot);
    if (idx.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("bad feedstock index '" + idx + "'");
    }
    sel.target = Target::Record;
    sel.index = std::stoul(idx);
    sel.field = text.substr(dot + 1);
    if (sel.index >= s.size()) {
      throw std::invalid_argument("feedstock index " + idx + " out of range");
    }
    static const std::vector<std::string> fields{"lambda", "c", "C", "mu", "W"};
    if (std::find(fields.begin(), fields.end(), sel.field) == fields.end()) {
      throw std::invalid_argument("unknown field '" + sel.field + "' (lambda, c, C, mu, W)");
    }
  }
  return sel;
}

void ParamSelector::apply(Scenario& s, double value) const {
  switch (target) {
    case Target::Demand: s.demand = value; return;
    case Target::Gamma: s.transport_exponent = value; return;
    case Target::R: s.ces_exponent = value; return;
    case Target::Record: break;
  }
  auto& f = s.feedstocks.at(index);
  if (field == "lambda") f.conversion = value;
  else if (field == "c") f.unit_cost = value;
  else if (field == "C") f.transport_cost = value;
  else if (field == "mu") f.footprint = value;
  else if (field == "W") f.reservoir = Reservoir::finite(value);
}

int cmd_sweep(const std::filesystem::path& file, const SweepOptions& opts, std::ostream& out,
              std::ostream& err) {
  const auto loaded = load_or_report(file, err);
  if (!loaded) return kBadInput;
  const Scenario& base = *loaded;
  ParamSelector sel;
  try {
    sel = ParamSelector::parse(opts.param, base);
  } catch (const std::invalid_argument& e) {
    err << "invalid selector: " << e.what() << '\n';
    return kBadInput;
  }
  if (opts.steps < 2) {
    err << "steps must be at least 2\n";
    return kBadInput;
  }

  std::ostringstream csv;
  csv << "param,feasible,F,xi,regime,support";
  for (std::size_t i = 0; i < base.size(); ++i) csv << ",x" << i;
  csv << '\n';

  SolverConfig cfg;
  cfg.seed = opts.seed;
  const std::string empty_mix(base.size(), ',');
  for (std::size_t k = 0; k < opts.steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(opts.steps - 1);
    const double value = k + 1 == opts.steps ? opts.to : opts.from + t * (opts.to - opts.from);
    Scenario s = base;
    sel.apply(s, value);
    csv << format_number(value) << ',';
    try {
      validate(s);
    } catch (const InvalidScenario&) {
      csv << "INVALID,,,,," << empty_mix << '\n';
      continue;
    }
    const auto regime = to_string(diagnose(s).regime);
    if (!existence_condition(s)) {
      csv << "INFEASIBLE,,," << regime << ',' << empty_mix << '\n';
      continue;
    }
    Solution sol;
    try {
      sol = solve(s, cfg);
    } catch (const NonConvergence& e) {
      sol = e.best();
    } catch (const InfeasibleScenario&) {
      csv << "INFEASIBLE,,," << regime << ',' << empty_mix << '\n';
      continue;
    }
    csv << "FEASIBLE," << format_number(sol.objective) << ','
        << (sol.xi ? format_number(*sol.xi) : "") << ',' << regime << ','
        << support_mask(sol.mix);
    for (double x : sol.mix) csv << ',' << format_number(x);
    csv << '\n';
  }

  if (opts.out_file) {
    std::ofstream f(*opts.out_file, std::ios::binary);
    if (!f) {
      err << "cannot write " << opts.out_file->string() << '\n';
      return kBadInput;
    }
    f << csv.str();
  } else {
    out << csv.str();
  }
  return kOk;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"feedmix: cost and water-impact optimal feedstock import mixes"};
  app.require_subcommand(1);

  std::string check_file;
  auto* check = app.add_subcommand("check", "Test whether the reservoirs can cover the demand");
  check->add_option("file", check_file, "Scenario JSON")->required();

  std::string solve_file;
  SolveOptions solve_opts;
  std::size_t grid_points = 0;
  auto* solve_cmd = app.add_subcommand("solve", "Compute an optimal import mix");
  solve_cmd->add_option("file", solve_file, "Scenario JSON")->required();
  solve_cmd->add_option("--method", solve_opts.method, "auto | analytic | general | oracle")
      ->check(CLI::IsMember({"auto", "analytic", "general", "oracle"}));
  solve_cmd->add_option("--format", solve_opts.format, "table | json | csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  solve_cmd->add_option("--seed", solve_opts.seed, "Seed for multi-start points");
  auto* grid_opt = solve_cmd->add_option("--grid-points", grid_points, "Oracle points per axis")
                       ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 20));

  std::string pot_file;
  auto* potentials = app.add_subcommand("potentials", "List productive potentials");
  potentials->add_option("file", pot_file, "Scenario JSON")->required();

  std::string sweep_file;
  SweepOptions sweep_opts;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Re-solve over a range of one parameter");
  sweep->add_option("file", sweep_file, "Scenario JSON")->required();
  sweep->add_option("--param", sweep_opts.param, "Q, gamma, r or <index>.<field>")->required();
  sweep->add_option("--from", sweep_opts.from)->required();
  sweep->add_option("--to", sweep_opts.to)->required();
  sweep->add_option("--steps", sweep_opts.steps)->required();
  sweep->add_option("--out", sweep_out, "CSV output file (default stdout)");
  sweep->add_option("--seed", sweep_opts.seed, "Seed held fixed across steps");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  if (*check) return cmd_check(check_file, out, err);
  if (*solve_cmd) {
    if (grid_opt->count() > 0) solve_opts.grid_points = grid_points;
    return cmd_solve(solve_file, solve_opts, out, err);
  }
  if (*potentials) return cmd_potentials(pot_file, out, err);
  if (*sweep) {
    if (!sweep_out.empty()) sweep_opts.out_file = sweep_out;
    return cmd_sweep(sweep_file, sweep_opts, out, err);
  }
  return kBadInput;
}

}  // namespace feedmix::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "feedmix/model.hpp"

namespace feedmix::cli {

enum ExitCode : int {
  kOk = 0,
  kBadInput = 1,        ///< parse/schema error, bad selector or usage
  kInfeasible = 2,
  kMethodMismatch = 3,  ///< method cannot handle this scenario (e.g. oracle with N > 4)
  kNonConvergence = 4,  ///< report still printed
};

int cmd_check(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

struct SolveOptions {
  std::string method = "auto";  ///< auto | analytic | general | oracle
  std::string format = "table";  ///< table | json | csv
  std::uint64_t seed = 0;
  std::optional<std::size_t> grid_points;
};

int cmd_solve(const std::filesystem::path& file, const SolveOptions& opts, std::ostream& out,
              std::ostream& err);

int cmd_potentials(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

/// Which scenario parameter a sweep varies: "Q", "gamma", "r", or
/// "<index>.<field>" with field one of lambda, c, C, mu, W.
struct ParamSelector {
  enum class Target { Demand, Gamma, R, Record };
  Target target = Target::Demand;
  std::size_t index = 0;
  std::string field;

  /// Throws std::invalid_argument.
  static ParamSelector parse(const std::string& text, const Scenario& s);
  void apply(Scenario& s, double value) const;
};

struct SweepOptions {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  std::size_t steps = 2;
  std::optional<std::filesystem::path> out_file;
  std::uint64_t seed = 0;
};

/// CSV columns: param,feasible,F,xi,regime,support,x0..x{N-1}.
int cmd_sweep(const std::filesystem::path& file, const SweepOptions& opts, std::ostream& out,
              std::ostream& err);

/// Entry point; `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace feedmix::cli

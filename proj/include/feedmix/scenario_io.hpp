#pragma once

// Scenario files are JSON:
//
//   {
//     "Q": 10, "gamma": 0.5, "r": 1,
//     "feedstocks": [
//       {"name": "palm/ID", "lambda": 0.9, "c": 1.2, "C": 0.3, "mu": 5, "W": 1e4},
//       {"name": "soy/BR",  "lambda": 0.8, "c": 1.0, "C": 0.2, "mu": 4, "W": null}
//     ]
//   }
//
// "W": null marks an unbounded reservoir. Unknown keys are rejected.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "feedmix/errors.hpp"
#include "feedmix/model.hpp"

namespace feedmix {

/// Malformed JSON or a schema violation. `key` is the JSON path of the
/// offending entry (empty for syntax errors); `line` is 1-based when known.
class ScenarioParseError : public Error {
 public:
  ScenarioParseError(std::string key, std::optional<std::size_t> line, const std::string& detail);
  const std::string& key() const noexcept { return key_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::string key_;
  std::optional<std::size_t> line_;
};

/// Parses and validates a scenario document. Throws ScenarioParseError.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a file. Throws ScenarioParseError (also for unreadable files).
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::ordered_json scenario_to_json(const Scenario& s);

std::string dump_scenario(const Scenario& s);

}  // namespace feedmix

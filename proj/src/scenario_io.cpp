#include "feedmix/scenario_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <span>
#include <sstream>

namespace feedmix {

namespace {

using json = nlohmann::json;

std::string compose(const std::string& key, std::optional<std::size_t> line,
                    const std::string& detail) {
  std::string msg;
  if (line) msg += "line " + std::to_string(*line) + ": ";
  if (!key.empty()) msg += "\"" + key + "\": ";
  return msg + detail;
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the `occurrence`-th (0-based) object key named `key`, found by a
// small lexer pass that skips string contents.
std::optional<std::size_t> locate_key(std::string_view text, std::string_view key,
                                      std::size_t occurrence) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '"') continue;
    const std::size_t begin = i + 1;
    std::size_t j = begin;
    while (j < text.size() && text[j] != '"') j += text[j] == '\\' ? 2 : 1;
    if (j >= text.size()) return std::nullopt;
    const auto token = text.substr(begin, j - begin);
    std::size_t k = j + 1;
    while (k < text.size() && (text[k] == ' ' || text[k] == '\t' || text[k] == '\n' || text[k] == '\r')) ++k;
    if (k < text.size() && text[k] == ':' && token == key) {
      if (seen++ == occurrence) return line_of_offset(text, i);
    }
    i = j;
  }
  return std::nullopt;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, std::string_view key, std::size_t occurrence,
                         const std::string& detail) const {
    throw ScenarioParseError(path, locate_key(text_, key, occurrence), detail);
  }

  void reject_unknown(const json& obj, std::span<const std::string_view> allowed,
                      const std::string& prefix) const {
    for (const auto& [k, v] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(prefix + k, k, 0, "unknown key");
      }
    }
  }

  double number(const json& obj, std::string_view key, const std::string& path,
                std::size_t occurrence) const {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioParseError(path, std::nullopt, "missing required key");
    if (!it->is_number()) fail(path, key, occurrence, "expected a number");
    return it->get<double>();
  }

 private:
  std::string_view text_;
};

constexpr std::array<std::string_view, 4> kTopKeys{"Q", "gamma", "r", "feedstocks"};
constexpr std::array<std::string_view, 6> kRecordKeys{"name", "lambda", "c", "C", "mu", "W"};

}  // namespace

ScenarioParseError::ScenarioParseError(std::string key, std::optional<std::size_t> line,
                                       const std::string& detail)
    : Error(compose(key, line, detail)), key_(std::move(key)), line_(line) {}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioParseError("", line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1),
                             "malformed JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ScenarioParseError("", 1, "top level must be an object");

  Reader rd(text);
  rd.reject_unknown(doc, kTopKeys, "");

  Scenario s;
  s.demand = rd.number(doc, "Q", "Q", 0);
  s.transport_exponent = rd.number(doc, "gamma", "gamma", 0);
  s.ces_exponent = rd.number(doc, "r", "r", 0);

  const auto fs = doc.find("feedstocks");
  if (fs == doc.end()) throw ScenarioParseError("feedstocks", std::nullopt, "missing required key");
  if (!fs->is_array()) rd.fail("feedstocks", "feedstocks", 0, "expected an array");
  if (fs->empty()) rd.fail("feedstocks", "feedstocks", 0, "needs at least one feedstock");

  for (std::size_t i = 0; i < fs->size(); ++i) {
    const auto& item = (*fs)[i];
    const std::string prefix = "feedstocks[" + std::to_string(i) + "].";
    if (!item.is_object()) {
      rd.fail("feedstocks[" + std::to_string(i) + "]", "feedstocks", 0, "expected an object");
    }
    rd.reject_unknown(item, kRecordKeys, prefix);
    FeedstockRecord rec;
    const auto name = item.find("name");
    if (name == item.end()) throw ScenarioParseError(prefix + "name", std::nullopt, "missing required key");
    if (!name->is_string()) rd.fail(prefix + "name", "name", i, "expected a string");
    rec.name = name->get<std::string>();
    rec.conversion = rd.number(item, "lambda", prefix + "lambda", i);
    rec.unit_cost = rd.number(item, "c", prefix + "c", i);
    rec.transport_cost = rd.number(item, "C", prefix + "C", i);
    rec.footprint = rd.number(item, "mu", prefix + "mu", i);
    const auto w = item.find("W");
    if (w == item.end()) throw ScenarioParseError(prefix + "W", std::nullopt, "missing required key (use null for unbounded)");
    if (w->is_null()) {
      rec.reservoir = Reservoir::unbounded();
    } else if (w->is_number()) {
      rec.reservoir = Reservoir::finite(w->get<double>());
    } else {
      rd.fail(prefix + "W", "W", i, "expected a number or null");
    }
    s.feedstocks.push_back(std::move(rec));
  }

  try {
    validate(s);
  } catch (const InvalidScenario& e) {
    throw ScenarioParseError("", std::nullopt, std::string("invalid scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError("", std::nullopt, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json doc;
  doc["Q"] = s.demand;
  doc["gamma"] = s.transport_exponent;
  doc["r"] = s.ces_exponent;
  auto& arr = doc["feedstocks"] = nlohmann::ordered_json::array();
  for (const auto& f : s.feedstocks) {
    nlohmann::ordered_json rec;
    rec["name"] = f.name;
    rec["lambda"] = f.conversion;
    rec["c"] = f.unit_cost;
    rec["C"] = f.transport_cost;
    rec["mu"] = f.footprint;
    rec["W"] = f.reservoir.is_bounded() ? nlohmann::ordered_json(f.reservoir.volume())
                                        : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(rec));
  }
  return doc;
}

std::string dump_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

}  // namespace feedmix

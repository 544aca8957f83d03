#include "feedmix/report.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace feedmix {

std::vector<ReportRow> report_rows(const Solution& sol, const Scenario& s) {
  const double cost = total_cost(sol.mix, s);
  const double water = water_impact(sol.mix, s);
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& f = s.feedstocks[i];
    const double x = sol.mix[i];
    ReportRow row;
    row.name = f.name;
    row.x = x;
    row.commodity = f.conversion * x;
    const double cost_i = x == 0.0 ? 0.0 : f.unit_cost * x + f.transport_cost * std::pow(x, s.transport_exponent);
    double water_i = f.footprint * x;
    if (f.reservoir.is_bounded()) {
      const double w = f.reservoir.volume();
      water_i = w / std::fma(-f.footprint, x, w) * f.footprint * x;
    }
    row.cost_share = cost > 0.0 ? cost_i / cost : 0.0;
    row.water_share = water > 0.0 ? water_i / water : 0.0;
    row.potential = productive_potential(s, i);
    row.active = x > kActiveTol;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string support_mask(const std::vector<double>& mix) {
  std::string mask;
  for (double x : mix) mask += x > kActiveTol ? '1' : '0';
  return mask;
}

nlohmann::ordered_json solution_to_json(const Solution& sol, const Scenario& s,
                                        std::string_view method) {
  nlohmann::ordered_json doc;
  doc["method"] = std::string(method);
  doc["regime"] = std::string(to_string(sol.regime));
  doc["status"] = std::string(to_string(sol.status));
  doc["objective"] = sol.objective;
  doc["xi"] = sol.xi ? nlohmann::ordered_json(*sol.xi) : nlohmann::ordered_json(nullptr);
  doc["total_cost"] = total_cost(sol.mix, s);
  doc["water_impact"] = water_impact(sol.mix, s);
  auto& arr = doc["feedstocks"] = nlohmann::ordered_json::array();
  for (const auto& row : report_rows(sol, s)) {
    nlohmann::ordered_json r;
    r["name"] = row.name;
    r["x"] = row.x;
    r["commodity"] = row.commodity;
    r["cost_share"] = row.cost_share;
    r["water_share"] = row.water_share;
    r["potential"] = row.potential;
    r["active"] = row.active;
    arr.push_back(std::move(r));
  }
  return doc;
}

void write_json(std::ostream& os, const Solution& sol, const Scenario& s, std::string_view method) {
  os << solution_to_json(sol, s, method).dump(2) << '\n';
}

void write_table(std::ostream& os, const Solution& sol, const Scenario& s, std::string_view method) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "method:  " << method << '\n'
      << "regime:  " << to_string(sol.regime) << '\n'
      << "status:  " << to_string(sol.status) << '\n'
      << "F:       " << sol.objective << '\n'
      << "xi:      ";
  if (sol.xi) {
    out << *sol.xi << '\n';
  } else {
    out << "n/a\n";
  }
  out << "cost:    " << total_cost(sol.mix, s) << '\n'
      << "water:   " << water_impact(sol.mix, s) << "\n\n";
  out << std::left << std::setw(4) << "#" << std::setw(18) << "name" << std::right
      << std::setw(14) << "x" << std::setw(14) << "lambda*x" << std::setw(12) << "cost%"
      << std::setw(12) << "water%" << std::setw(14) << "P" << "  active\n";
  const auto rows = report_rows(sol, s);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << std::left << std::setw(4) << i << std::setw(18) << r.name << std::right
        << std::setw(14) << r.x << std::setw(14) << r.commodity << std::setw(12)
        << 100.0 * r.cost_share << std::setw(12) << 100.0 * r.water_share << std::setw(14)
        << r.potential << "  " << (r.active ? "yes" : "no") << '\n';
  }
  os << out.str();
}

void write_csv(std::ostream& os, const Solution& sol, const Scenario& s) {
  os << "regime,status,F,xi,name,x,commodity,cost_share,water_share,potential,active\n";
  const std::string xi = sol.xi ? format_number(*sol.xi) : "";
  for (const auto& r : report_rows(sol, s)) {
    os << to_string(sol.regime) << ',' << to_string(sol.status) << ','
       << format_number(sol.objective) << ',' << xi << ',' << csv_field(r.name) << ','
       << format_number(r.x) << ',' << format_number(r.commodity) << ','
       << format_number(r.cost_share) << ',' << format_number(r.water_share) << ','
       << format_number(r.potential) << ',' << (r.active ? 1 : 0) << '\n';
  }
}

}  // namespace feedmix

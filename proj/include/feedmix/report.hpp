#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "feedmix/model.hpp"

namespace feedmix {

inline constexpr double kActiveTol = 1e-10;

struct ReportRow {
  std::string name;
  double x = 0.0;
  double commodity = 0.0;    ///< lambda * x
  double cost_share = 0.0;   ///< fraction of total cost
  double water_share = 0.0;  ///< fraction of water impact
  double potential = 0.0;
  bool active = false;       ///< x > kActiveTol
};

std::vector<ReportRow> report_rows(const Solution& sol, const Scenario& s);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

/// Support as a string of '0'/'1', character i for feedstock i.
std::string support_mask(const std::vector<double>& mix);

/// Column order: method, regime, status, objective, xi, total_cost,
/// water_impact, feedstocks[{name, x, commodity, cost_share, water_share,
/// potential, active}].
nlohmann::ordered_json solution_to_json(const Solution& sol, const Scenario& s,
                                        std::string_view method);

void write_table(std::ostream& os, const Solution& sol, const Scenario& s, std::string_view method);
void write_json(std::ostream& os, const Solution& sol, const Scenario& s, std::string_view method);

/// Header: regime,status,F,xi,name,x,commodity,cost_share,water_share,potential,active
void write_csv(std::ostream& os, const Solution& sol, const Scenario& s);

}  // namespace feedmix

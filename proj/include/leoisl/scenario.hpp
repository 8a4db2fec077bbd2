#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leoisl/ifc.hpp"
#include "leoisl/link_budget.hpp"
#include "leoisl/orbital.hpp"
#include "leoisl/topology.hpp"

namespace leoisl {

/// London, Madrid, Rome, Reykjavik, Gander.
std::vector<GroundNode> default_ground_stations();
/// Ten A320-class aircraft (10.7 km, 0.23 km/s) over Europe and the eastern
/// North Atlantic.
std::vector<GroundNode> default_aircraft();

struct Scenario {
  ConstellationConfig constellation;
  std::vector<GroundNode> ground_stations = default_ground_stations();
  std::vector<GroundNode> aircraft = default_aircraft();
  LinkBudgetSet links;
  TopologySettings topology;
  ifc::IfcSettings ifc;
  double snapshot_duration_s = 10.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  /// Component invariants plus unique node ids; throws std::invalid_argument.
  void validate() const;
  ifc::SlotInputs slot_inputs() const;
  bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string source, int line, std::string field, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }  // 1-based, 0 when unknown
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  int line_;
  std::string field_;
};

/// YAML text to scenario. Missing fields keep their defaults; unknown fields
/// and invalid values raise ScenarioError naming the field and line.
Scenario parse_scenario(std::string_view text, std::string_view source = "<string>");
Scenario load_scenario(const std::string& path);
/// YAML that parse_scenario maps back to an identical scenario.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace leoisl

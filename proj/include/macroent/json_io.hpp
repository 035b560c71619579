#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "macroent/mcsim.hpp"
#include "macroent/optimizer.hpp"
#include "macroent/quantum.hpp"
#include "macroent/robustness.hpp"
#include "macroent/witness.hpp"

namespace macroent {

nlohmann::json to_json(const WitnessReport& r);
nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const SweepTable& t);
nlohmann::json to_json(const McEstimate& e);
nlohmann::json to_json(const OptResult& r);

// Scenario schema: {"dim": int, "state": [[re, im], ...] flattened ket in
// row-major pair ordering, "observables": {"A1".."B2": [[re, im], ...]
// row-major d x d}. The loader validates all invariants and rejects on
// failure; the writer requires a pure sigma.
nlohmann::json scenario_to_json(const PairScenario& s);
PairScenario scenario_from_json(const nlohmann::json& j);

PairScenario load_scenario_file(const std::string& path);
void save_scenario_file(const PairScenario& s, const std::string& path);

}  // namespace macroent

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcrobust/cps.hpp"
#include "tcrobust/market.hpp"

namespace tcr {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON file; SpecError with field "<file>" on failure.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Builds a model family from a market spec document (see docs/market_spec.md).
/// Every problem is reported as SpecError naming the dotted field path.
ModelFamily parse_market_spec(const Json& doc);
ModelFamily load_market_spec(const std::string& path);

/// Inverse of parse_market_spec.
Json market_spec_to_json(const ModelFamily& family);

/// {"x": .., "slots": [{kind, event, time, scenarios, buy, sell}, ...]}.
Json strategy_to_json(const Strategy& strategy, const ScenarioTree& tree);
Strategy strategy_from_json(const Json& doc, const ScenarioTree& tree);

/// Certificate: per layer and cell, Z0, Z1 and the shadow price.
Json cps_to_json(const ConsistentPriceSystem& cps, const ModelFamily& family);
ConsistentPriceSystem cps_from_json(const Json& doc, const ModelFamily& family);

/// {"claim": {"<scenario label>": value, ...}}; every scenario required.
std::vector<double> claim_from_json(const Json& doc, const ScenarioTree& tree);

}  // namespace tcr

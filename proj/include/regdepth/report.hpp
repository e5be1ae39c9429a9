#pragma once

// JSON views of library results, shared by the CLI and the tests.

#include <string>
#include <vector>

#include "json.hpp"
#include "regdepth/breakdown.hpp"
#include "regdepth/depth.hpp"
#include "regdepth/median.hpp"
#include "regdepth/rational.hpp"
#include "regdepth/sim.hpp"

namespace regdepth::report {

using nlohmann::json;

/// "%.17g" of v.
std::string decimal17(double v);

/// {"fraction": "num/den", "decimal": "<17 significant digits>"}
json to_json(const Rational& r);
json to_json(const DepthWitness& w);
json to_json(const DeepestFitResult& r);
json to_json(const BreakdownBounds& b);
json to_json(const AttackPlan& plan);
json to_json(const SweepResult& s);
json to_json(const NullspacePair& pair);
json to_json(const SearchResult& s);
json to_json(const SimulationSummary& s, bool with_records = false);
json to_json(const BoxplotCell& c);
json dataset_json(const Dataset& d);

/// Pretty JSON followed by a newline.
std::string render(const json& j);

}  // namespace regdepth::report

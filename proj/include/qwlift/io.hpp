#pragma once

// Graph text format, JSON artifacts and CSV tables. The grammar is described
// in docs/formats.md; JSON layouts in docs/schemas/.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qwlift/analysis.hpp"
#include "qwlift/bridge.hpp"
#include "qwlift/graph.hpp"
#include "qwlift/markov.hpp"
#include "qwlift/quantum_walk.hpp"

namespace qwlift::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Throws ParseError (syntax, dangling endpoints) or ValidationError, both
// prefixed by "name:line:col".
Graph parse_graph(std::string_view text, const std::string& name = "<input>");
Graph parse_graph_file(const std::filesystem::path& path);
std::string format_graph(const Graph& g);

json to_json(const Graph& g);
Graph graph_from_json(const json& j);

json to_json(const Distribution& p);
Distribution distribution_from_json(const json& j);

// Entries are emitted row-major as nested arrays.
json to_json(const TransitionMatrix& P);
TransitionMatrix transition_from_json(const json& j, std::shared_ptr<const Graph> locality = nullptr);

json to_json(const StochasticBridge& b);
StochasticBridge bridge_from_json(const json& j, std::shared_ptr<const Graph> g = nullptr);

// Includes the base graph, the dense P_lift and the index convention.
json to_json(const LiftedChain& chain);
LiftedChain lifted_chain_from_json(const json& j);

json to_json(const SpectralDecomposition& s);  // phases and ranks only

json to_json(const MixingReport& r);
MixingReport mixing_report_from_json(const json& j);

json to_json(const ConductanceReport& r);
ConductanceReport conductance_from_json(const json& j);

json to_json(const DiameterMixingReport& r);
DiameterMixingReport diameter_report_from_json(const json& j);

json to_json(const ComparisonRow& r);
ComparisonRow comparison_from_json(const json& j);

// "t,tv" rows.
void write_curve_csv(std::ostream& out, const std::vector<double>& curve);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

// Full precision, shortest round-trip form.
std::string format_double(double x);

}  // namespace qwlift::io

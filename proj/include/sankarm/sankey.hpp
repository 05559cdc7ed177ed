#ifndef SANKARM_SANKEY_HPP
#define SANKARM_SANKEY_HPP

#include "sankarm/selector.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sankarm {

struct SankeyLink {
    std::size_t source = 0;
    std::size_t target = 0;
    double value = 0.0;

    bool operator==(const SankeyLink&) const = default;
};

/// Named nodes and weighted links, in the shape d3-sankey consumes.
struct SankeyGraph {
    std::vector<std::string> nodes;
    std::vector<SankeyLink> links;

    bool operator==(const SankeyGraph&) const = default;
};

/// Edge of a single rule before merging across rules.
struct FlowEdge {
    std::string source;
    std::string target;
    double value = 0.0;
};

/// Antecedent chain A1->A2->...->An, then An->Ck for every consequent; every
/// edge carries the rule's fitness.
std::vector<FlowEdge> rule_flow(const ScoredRule& rule, const FeatureCatalog& catalog);

/// Union of the rule flows with identical (source, target) edges summed.
/// Nodes and links keep the order they are first seen in.
SankeyGraph build_flow(const RuleSelection& selection, const FeatureCatalog& catalog);

/// Fixed six decimals with trailing zeros removed ("0.7262", "2").
std::string format_value(double value);

/// Compact {"nodes":[{"name":...}],"links":[{"source":..,"target":..,"value":..}]}.
/// '<', '>' and '&' in names are written as \u escapes so the text can be
/// embedded verbatim in HTML.
std::string emit_json(const SankeyGraph& graph);

/// Parses and validates emit_json output.
SankeyGraph sankey_from_json(std::string_view text);

/// Self-contained HTML page, one "Time period i" section per graph, each
/// embedding emit_json output and rendered by an inline script.
std::string emit_report(const std::vector<std::pair<std::string, SankeyGraph>>& graphs);

} // namespace sankarm

#endif // SANKARM_SANKEY_HPP

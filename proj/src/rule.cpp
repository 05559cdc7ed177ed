#include "sankarm/rule.hpp"
#include "sankarm/errors.hpp"

#include <algorithm>
#include <iterator>
#include <optional>
#include <set>

namespace sankarm {

AssociationRule::AssociationRule(std::vector<Item> antecedent, std::vector<Item> consequent)
    : antecedent_(std::move(antecedent)), consequent_(std::move(consequent)) {
    if (antecedent_.empty() || consequent_.empty())
        throw ArgumentError("association rule needs a non-empty antecedent and consequent");
    std::set<std::size_t> features;
    for (const auto* side : {&antecedent_, &consequent_})
        for (const auto& item : *side)
            if (!features.insert(item.feature).second)
                throw ArgumentError("feature " + std::to_string(item.feature) + " appears twice in a rule");
}

bool AssociationRule::valid_for(const FeatureCatalog& catalog) const {
    for (const auto* side : {&antecedent_, &consequent_})
        for (const auto& item : *side)
            if (item.feature >= catalog.size() || item.attribute >= catalog.domain_size(item.feature))
                return false;
    return true;
}

RuleKey AssociationRule::key() const {
    RuleKey k{antecedent_, consequent_};
    std::sort(k.antecedent.begin(), k.antecedent.end());
    std::sort(k.consequent.begin(), k.consequent.end());
    return k;
}

AssociationRule AssociationRule::canonical() const {
    auto k = key();
    return AssociationRule(std::move(k.antecedent), std::move(k.consequent));
}

namespace {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

Mask match(const std::vector<Item>& items, const TransactionDB& db) {
    Mask m = Mask::Constant(static_cast<Eigen::Index>(db.size()), true);
    for (const auto& item : items)
        m = m && (db.codes().col(static_cast<Eigen::Index>(item.feature)).array() ==
                  static_cast<std::int32_t>(item.attribute));
    return m;
}

} // namespace

MatchCounts count_matches(const AssociationRule& rule, const TransactionDB& db) {
    if (db.size() == 0)
        throw PreconditionError("rule metrics need at least one transaction");
    if (!rule.valid_for(db.catalog()))
        throw PreconditionError("rule does not fit the database catalog");
    const Mask ante = match(rule.antecedent(), db);
    const Mask joint = ante && match(rule.consequent(), db);
    return {static_cast<std::size_t>(ante.count()), static_cast<std::size_t>(joint.count()), db.size()};
}

double support(const AssociationRule& rule, const TransactionDB& db) {
    const auto c = count_matches(rule, db);
    return static_cast<double>(c.joint) / static_cast<double>(c.total);
}

double confidence(const AssociationRule& rule, const TransactionDB& db) {
    const auto c = count_matches(rule, db);
    return c.antecedent == 0 ? 0.0 : static_cast<double>(c.joint) / static_cast<double>(c.antecedent);
}

double fitness_from_metrics(double confidence, double support, FitnessWeights w) {
    if (!(w.alpha >= 0.0) || !(w.beta >= 0.0))
        throw ArgumentError("fitness weights must be non-negative");
    if (w.alpha + w.beta <= 0.0)
        throw ArgumentError("fitness weights must not both be zero");
    return (w.alpha * confidence + w.beta * support) / (w.alpha + w.beta);
}

double fitness(const AssociationRule& rule, const TransactionDB& db, FitnessWeights weights) {
    return score(rule, db, weights).fitness;
}

ScoredRule score(const AssociationRule& rule, const TransactionDB& db, FitnessWeights weights) {
    const auto c = count_matches(rule, db);
    ScoredRule s;
    s.rule = rule;
    s.support = static_cast<double>(c.joint) / static_cast<double>(c.total);
    s.confidence = c.antecedent == 0 ? 0.0 : static_cast<double>(c.joint) / static_cast<double>(c.antecedent);
    s.fitness = fitness_from_metrics(s.confidence, s.support, weights);
    return s;
}

std::vector<ScoredRule> filter_thresholds(const std::vector<ScoredRule>& rules, double s_min, double c_min) {
    std::vector<ScoredRule> kept;
    std::copy_if(rules.begin(), rules.end(), std::back_inserter(kept),
                 [&](const ScoredRule& r) { return r.support >= s_min && r.confidence >= c_min; });
    return kept;
}

namespace {

std::pair<std::size_t, std::size_t> overlap(std::vector<Item> a, std::vector<Item> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<Item> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return {common.size(), a.size() + b.size() - common.size()};
}

} // namespace

double similarity(const AssociationRule& r1, const AssociationRule& r2) {
    const auto [ante_common, ante_union] = overlap(r1.antecedent(), r2.antecedent());
    const auto [cons_common, cons_union] = overlap(r1.consequent(), r2.consequent());
    return static_cast<double>(ante_common + cons_common) / static_cast<double>(ante_union + cons_union);
}

SimilarityMatrix adjacency(const std::vector<ScoredRule>& rules, std::size_t n_tilde) {
    if (n_tilde > rules.size())
        throw ArgumentError("n_tilde " + std::to_string(n_tilde) + " exceeds the " + std::to_string(rules.size()) +
                            " available rules");
    const auto n = static_cast<Eigen::Index>(n_tilde);
    SimilarityMatrix adj = SimilarityMatrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            adj(i, j) = adj(j, i) = similarity(rules[static_cast<std::size_t>(i)].rule,
                                               rules[static_cast<std::size_t>(j)].rule);
    return adj;
}

std::string format_item(const Item& item, const FeatureCatalog& catalog) {
    const auto& f = catalog.feature(item.feature);
    return f.name + "_" + f.attributes.at(item.attribute);
}

std::string format_rule(const AssociationRule& rule, const FeatureCatalog& catalog) {
    std::string out;
    auto side = [&](const std::vector<Item>& items) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i)
                out += " & ";
            out += format_item(items[i], catalog);
        }
    };
    side(rule.antecedent());
    out += " => ";
    side(rule.consequent());
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view text, std::string_view sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto hit = text.find(sep, pos);
        if (hit == std::string_view::npos) {
            parts.push_back(text.substr(pos));
            return parts;
        }
        parts.push_back(text.substr(pos, hit - pos));
        pos = hit + sep.size();
    }
}

Item parse_item(std::string_view token, const FeatureCatalog& catalog) {
    std::optional<Item> best;
    std::size_t best_len = 0;
    for (std::size_t j = 0; j < catalog.size(); ++j) {
        const auto& name = catalog.feature(j).name;
        if (token.size() <= name.size() + 1 || token.substr(0, name.size()) != name || token[name.size()] != '_')
            continue;
        const auto attr = catalog.find_attribute(j, token.substr(name.size() + 1));
        if (attr && (!best || name.size() > best_len)) {
            best = Item{j, *attr};
            best_len = name.size();
        }
    }
    if (!best)
        throw ParseError("unknown attribute token '" + std::string(token) + "'");
    return *best;
}

} // namespace

AssociationRule parse_rule(std::string_view text, const FeatureCatalog& catalog) {
    const auto sides = split(text, " => ");
    if (sides.size() != 2)
        throw ParseError("rule '" + std::string(text) + "' must contain exactly one ' => '");
    std::vector<Item> parts[2];
    std::set<std::size_t> features;
    for (int s = 0; s < 2; ++s) {
        if (sides[s].empty())
            throw ParseError("rule '" + std::string(text) + "' has an empty " +
                             (s == 0 ? "antecedent" : "consequent"));
        for (auto token : split(sides[s], " & ")) {
            if (token.empty())
                throw ParseError("empty attribute token in rule '" + std::string(text) + "'");
            const Item item = parse_item(token, catalog);
            if (!features.insert(item.feature).second)
                throw ParseError("duplicate feature in token '" + std::string(token) + "'");
            parts[s].push_back(item);
        }
    }
    return AssociationRule(std::move(parts[0]), std::move(parts[1]));
}

} // namespace sankarm

#include "sankarm/selector.hpp"
#include "sankarm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace sankarm {

std::string to_string(SelectionMode mode) {
    switch (mode) {
    case SelectionMode::Auto:
        return "auto";
    case SelectionMode::Exact:
        return "exact";
    case SelectionMode::DP:
        return "dp";
    }
    return "auto";
}

std::optional<SelectionMode> parse_selection_mode(std::string_view text) {
    if (text == "auto")
        return SelectionMode::Auto;
    if (text == "exact")
        return SelectionMode::Exact;
    if (text == "dp")
        return SelectionMode::DP;
    return std::nullopt;
}

std::vector<ScoredRule> top_n(const RuleArchive& archive, std::size_t n_tilde, const FeatureCatalog& catalog) {
    if (archive.empty())
        throw ArgumentError("archive '" + archive.period_label() + "' is empty");
    auto ranked = archive.ranked(catalog);
    if (ranked.size() > n_tilde)
        ranked.resize(n_tilde);
    return ranked;
}

double pairwise_objective(std::span<const ScoredRule> rules) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rules.size(); ++i)
        for (std::size_t j = i + 1; j < rules.size(); ++j)
            sum += similarity(rules[i].rule, rules[j].rule);
    return sum;
}

double total_fitness(std::span<const ScoredRule> rules) {
    double sum = 0.0;
    for (const auto& r : rules)
        sum += r.fitness;
    return sum;
}

namespace {

RuleSelection make_selection(const std::vector<ScoredRule>& rules, const std::vector<std::size_t>& chosen,
                             SelectionMode mode) {
    RuleSelection s;
    s.mode = mode;
    s.indices = chosen;
    for (auto i : chosen)
        s.chosen.push_back(rules[i]);
    s.objective = pairwise_objective(s.chosen);
    s.total_fitness = total_fitness(s.chosen);
    return s;
}

class SubsetSearch {
public:
    SubsetSearch(const SimilarityMatrix& adj, const std::vector<ScoredRule>& rules, std::size_t cap)
        : adj_(adj), rules_(rules), cap_(cap) {}

    std::vector<std::size_t> run() {
        descend(0, 0.0, 0.0);
        return best_;
    }

private:
    // Depth-first in lexicographic order of index sets, so an earlier
    // candidate always wins an exact tie.
    void descend(std::size_t from, double objective, double fitness) {
        for (std::size_t i = from; i < rules_.size(); ++i) {
            double gain = 0.0;
            for (auto j : current_)
                gain += adj_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            current_.push_back(i);
            const double obj = objective + gain;
            const double fit = fitness + rules_[i].fitness;
            if (better(obj, fit)) {
                best_ = current_;
                best_objective_ = obj;
                best_fitness_ = fit;
            }
            if (current_.size() < cap_)
                descend(i + 1, obj, fit);
            current_.pop_back();
        }
    }

    bool better(double obj, double fit) const {
        if (best_.empty())
            return true;
        if (obj > best_objective_ + kTieTolerance)
            return true;
        if (obj < best_objective_ - kTieTolerance)
            return false;
        return fit > best_fitness_ + kTieTolerance;
    }

    const SimilarityMatrix& adj_;
    const std::vector<ScoredRule>& rules_;
    std::size_t cap_;
    std::vector<std::size_t> current_;
    std::vector<std::size_t> best_;
    double best_objective_ = 0.0;
    double best_fitness_ = 0.0;
};

} // namespace

RuleSelection select_exact(const std::vector<ScoredRule>& rules, std::size_t M) {
    if (M < 1)
        throw ArgumentError("map size M must be at least 1");
    if (rules.empty())
        throw ArgumentError("cannot select from an empty rule list");
    if (rules.size() > kExactLimit)
        throw ArgumentError("exact selection handles at most " + std::to_string(kExactLimit) + " rules, got " +
                            std::to_string(rules.size()) + "; use dp mode");
    const SimilarityMatrix adj = adjacency(rules, rules.size());
    SubsetSearch search(adj, rules, M);
    return make_selection(rules, search.run(), SelectionMode::Exact);
}

std::vector<std::size_t> knapsack_01(const Eigen::VectorXd& profit, std::span<const std::size_t> w,
                                     std::size_t capacity) {
    const auto n = static_cast<std::size_t>(profit.size());
    if (w.size() != n)
        throw ArgumentError("knapsack needs one weight per item");
    // table(i, c): best profit from items i..n-1 with capacity c.
    Eigen::MatrixXd table =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(capacity + 1));
    for (std::size_t i = n; i-- > 0;) {
        const auto r = static_cast<Eigen::Index>(i);
        for (std::size_t c = 0; c <= capacity; ++c) {
            const auto cc = static_cast<Eigen::Index>(c);
            double v = table(r + 1, cc);
            if (w[i] <= c)
                v = std::max(v, profit(r) + table(r + 1, static_cast<Eigen::Index>(c - w[i])));
            table(r, cc) = v;
        }
    }

    std::vector<std::size_t> chosen;
    std::size_t c = capacity;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        if (w[i] <= c && profit(r) + table(r + 1, static_cast<Eigen::Index>(c - w[i])) >=
                             table(r, static_cast<Eigen::Index>(c)) - kTieTolerance) {
            chosen.push_back(i);
            c -= w[i];
        }
    }
    return chosen;
}

RuleSelection select_dp(const std::vector<ScoredRule>& rules, std::size_t M, std::span<const int> weights) {
    if (M < 1)
        throw ArgumentError("map size M must be at least 1");
    if (rules.empty())
        throw ArgumentError("cannot select from an empty rule list");
    const std::size_t n = rules.size();
    std::vector<std::size_t> w(n, 1);
    if (!weights.empty()) {
        if (weights.size() != n)
            throw ArgumentError("expected " + std::to_string(n) + " knapsack weights, got " +
                                std::to_string(weights.size()));
        for (std::size_t i = 0; i < n; ++i) {
            if (weights[i] <= 0)
                throw ArgumentError("knapsack weights must be positive integers");
            w[i] = static_cast<std::size_t>(weights[i]);
        }
    }

    const Eigen::VectorXd profit = adjacency(rules, n).rowwise().sum();
    const auto chosen = knapsack_01(profit, w, M);
    return make_selection(rules, chosen, SelectionMode::DP);
}

RuleSelection select(const RuleArchive& archive, const SelectionParams& params, const FeatureCatalog& catalog) {
    if (params.M < 1)
        throw ArgumentError("map size M must be at least 1");
    if (params.n_tilde < 1)
        throw ArgumentError("n_tilde must be at least 1");
    if (archive.empty())
        throw ArgumentError("archive '" + archive.period_label() + "' is empty");
    RuleArchive kept(archive.period_label());
    for (const auto& [key, rule] : archive.entries())
        if (rule.support >= params.s_min && rule.confidence >= params.c_min)
            kept.offer(rule);
    if (kept.empty())
        throw ArgumentError("no rule in archive '" + archive.period_label() + "' meets the support/confidence thresholds");

    auto rules = top_n(kept, params.n_tilde, catalog);
    RuleSelection s;
    switch (params.mode) {
    case SelectionMode::Exact:
        s = select_exact(rules, params.M);
        break;
    case SelectionMode::DP:
        s = select_dp(rules, params.M, params.weights);
        break;
    case SelectionMode::Auto:
        if (rules.size() <= kExactLimit) {
            s = select_exact(rules, params.M);
        } else {
            rules.resize(kExactLimit);
            s = select_dp(rules, params.M);
        }
        break;
    }
    s.period = archive.period_label();
    return s;
}

std::string selection_to_json(const RuleSelection& selection, const FeatureCatalog& catalog) {
    nlohmann::ordered_json doc;
    doc["period"] = selection.period;
    doc["rules"] = nlohmann::ordered_json::array();
    doc["objective"] = selection.objective;
    doc["total_fitness"] = selection.total_fitness;
    doc["mode"] = to_string(selection.mode);
    doc["details"] = nlohmann::ordered_json::array();
    for (const auto& r : selection.chosen) {
        const auto text = format_rule(r.rule, catalog);
        doc["rules"].push_back(text);
        nlohmann::ordered_json d;
        d["rule"] = text;
        d["support"] = r.support;
        d["confidence"] = r.confidence;
        d["fitness"] = r.fitness;
        doc["details"].push_back(std::move(d));
    }
    return doc.dump(2) + "\n";
}

RuleSelection selection_from_json(std::string_view text, const FeatureCatalog& catalog) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("selection JSON: ") + e.what());
    }
    auto require = [&](const char* key, auto check, const char* kind) -> const nlohmann::json& {
        if (!doc.is_object() || !doc.contains(key) || !check(doc[key]))
            throw SchemaError(std::string("selection JSON needs ") + kind + " \"" + key + "\"");
        return doc[key];
    };
    RuleSelection s;
    s.period = require("period", [](const auto& j) { return j.is_string(); }, "a string").template get<std::string>();
    const auto& rules = require("rules", [](const auto& j) { return j.is_array(); }, "an array");
    s.objective = require("objective", [](const auto& j) { return j.is_number(); }, "a number").template get<double>();
    s.total_fitness =
        require("total_fitness", [](const auto& j) { return j.is_number(); }, "a number").template get<double>();
    const auto mode = parse_selection_mode(
        require("mode", [](const auto& j) { return j.is_string(); }, "a string").template get<std::string>());
    if (!mode || *mode == SelectionMode::Auto)
        throw SchemaError("selection \"mode\" must be \"exact\" or \"dp\"");
    s.mode = *mode;

    const auto& details = require("details", [](const auto& j) { return j.is_array(); }, "an array");
    if (details.size() != rules.size())
        throw SchemaError("selection \"details\" and \"rules\" differ in length");
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& d = details[i];
        if (!rules[i].is_string() || !d.is_object() || !d.contains("rule") || d["rule"] != rules[i])
            throw SchemaError("selection detail " + std::to_string(i) + " does not match its rule");
        ScoredRule r;
        r.rule = parse_rule(rules[i].get<std::string>(), catalog);
        for (auto [name, field] : {std::pair{"support", &r.support}, std::pair{"confidence", &r.confidence},
                                   std::pair{"fitness", &r.fitness}}) {
            if (!d.contains(name) || !d[name].is_number())
                throw SchemaError(std::string("selection detail needs a numeric \"") + name + "\"");
            *field = d[name].get<double>();
        }
        s.chosen.push_back(std::move(r));
    }
    return s;
}

} // namespace sankarm

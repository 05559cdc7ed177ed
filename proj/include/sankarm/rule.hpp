#ifndef SANKARM_RULE_HPP
#define SANKARM_RULE_HPP

#include "sankarm/dataset.hpp"

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sankarm {

/// One attribute of one feature, by catalog position.
struct Item {
    std::size_t feature = 0;
    std::size_t attribute = 0;

    auto operator<=>(const Item&) const = default;
};

/// Order-insensitive identity of a rule: both sides sorted.
struct RuleKey {
    std::vector<Item> antecedent;
    std::vector<Item> consequent;

    auto operator<=>(const RuleKey&) const = default;
};

/// X => Y over a catalog. Both sides are non-empty and no feature appears
/// twice across the rule. Item order inside each side is kept as given; the
/// miner stores its permutation order there.
class AssociationRule {
public:
    AssociationRule() = default;

    /// Throws ArgumentError when a side is empty or a feature repeats.
    AssociationRule(std::vector<Item> antecedent, std::vector<Item> consequent);

    const std::vector<Item>& antecedent() const noexcept { return antecedent_; }
    const std::vector<Item>& consequent() const noexcept { return consequent_; }

    bool valid_for(const FeatureCatalog& catalog) const;

    RuleKey key() const;

    /// Same rule with each side sorted by feature index.
    AssociationRule canonical() const;

    auto operator<=>(const AssociationRule&) const = default;

private:
    std::vector<Item> antecedent_;
    std::vector<Item> consequent_;
};

struct ScoredRule {
    AssociationRule rule;
    double support = 0.0;
    double confidence = 0.0;
    double fitness = 0.0;
};

/// Weights of confidence (alpha) and support (beta) in the fitness.
struct FitnessWeights {
    double alpha = 1.0;
    double beta = 1.0;
};

struct MatchCounts {
    std::size_t antecedent = 0; ///< transactions matching every antecedent item
    std::size_t joint = 0;      ///< transactions matching both sides
    std::size_t total = 0;
};

/// Positional matching of the rule's items against every transaction.
MatchCounts count_matches(const AssociationRule& rule, const TransactionDB& db);

double support(const AssociationRule& rule, const TransactionDB& db);

/// Zero when the antecedent never occurs.
double confidence(const AssociationRule& rule, const TransactionDB& db);

double fitness_from_metrics(double confidence, double support, FitnessWeights weights);
double fitness(const AssociationRule& rule, const TransactionDB& db, FitnessWeights weights = {});

ScoredRule score(const AssociationRule& rule, const TransactionDB& db, FitnessWeights weights = {});

/// Rules with support >= s_min and confidence >= c_min, order kept.
std::vector<ScoredRule> filter_thresholds(const std::vector<ScoredRule>& rules, double s_min, double c_min);

/// Shared (feature, attribute) items over all items, side by side.
double similarity(const AssociationRule& r1, const AssociationRule& r2);

using SimilarityMatrix = Eigen::MatrixXd;

/// Pairwise similarity of the first `n_tilde` rules.
SimilarityMatrix adjacency(const std::vector<ScoredRule>& rules, std::size_t n_tilde);

/// "A_a1 & B_b2 => C_c1".
std::string format_rule(const AssociationRule& rule, const FeatureCatalog& catalog);
std::string format_item(const Item& item, const FeatureCatalog& catalog);

/// Inverse of format_rule. Tokens resolve by the longest matching feature name.
AssociationRule parse_rule(std::string_view text, const FeatureCatalog& catalog);

} // namespace sankarm

#endif // SANKARM_RULE_HPP

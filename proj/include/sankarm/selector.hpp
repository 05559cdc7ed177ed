#ifndef SANKARM_SELECTOR_HPP
#define SANKARM_SELECTOR_HPP

#include "sankarm/archive.hpp"
#include "sankarm/rule.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sankarm {

enum class SelectionMode {
    Auto,  ///< exact up to kExactLimit rules, otherwise dp over the best kExactLimit
    Exact, ///< enumerate every subset of at most M rules
    DP     ///< 0/1 knapsack over adjacency row sums
};

/// Largest rule count select_exact accepts.
inline constexpr std::size_t kExactLimit = 25;

/// Subset comparisons treat objectives and fitness sums closer than this as equal.
inline constexpr double kTieTolerance = 1e-9;

std::string to_string(SelectionMode mode);
std::optional<SelectionMode> parse_selection_mode(std::string_view text);

struct SelectionParams {
    std::size_t M = 4;
    std::size_t n_tilde = 100;
    SelectionMode mode = SelectionMode::Auto;
    std::vector<int> weights; ///< per-rule knapsack weights for dp; empty means all 1
    double s_min = 0.0;
    double c_min = 0.0;
};

struct RuleSelection {
    std::string period;
    std::vector<ScoredRule> chosen; ///< in ranking order
    std::vector<std::size_t> indices; ///< positions of `chosen` in the input rule list
    double objective = 0.0;         ///< sum of pairwise similarity over chosen
    double total_fitness = 0.0;
    SelectionMode mode = SelectionMode::Exact;
};

/// Archive entries by descending fitness (ties by canonical rule text),
/// truncated to n_tilde.
std::vector<ScoredRule> top_n(const RuleArchive& archive, std::size_t n_tilde, const FeatureCatalog& catalog);

/// Sum over unordered pairs of similarity(R_i, R_j).
double pairwise_objective(std::span<const ScoredRule> rules);
double total_fitness(std::span<const ScoredRule> rules);

/// Subset of at most M rules with the largest pairwise objective; ties go to
/// the larger fitness sum, then to the lexicographically smallest index set.
RuleSelection select_exact(const std::vector<ScoredRule>& rules, std::size_t M);

/// Classic 0/1 knapsack over item profits and positive integer weights.
/// Returns the chosen item indices ascending; on equal table values the
/// lower-index item is taken.
std::vector<std::size_t> knapsack_01(const Eigen::VectorXd& profit, std::span<const std::size_t> weights,
                                     std::size_t capacity);

/// 0/1 knapsack with capacity M and item profit equal to its adjacency row sum
/// (diagonal included). Reconstruction takes lower-index items on ties.
RuleSelection select_dp(const std::vector<ScoredRule>& rules, std::size_t M, std::span<const int> weights = {});

/// Thresholds, top_n, then mode dispatch.
RuleSelection select(const RuleArchive& archive, const SelectionParams& params, const FeatureCatalog& catalog);

/// {"period", "rules", "objective", "total_fitness", "mode", "details"}; the
/// trailing "details" array carries per-rule scores for the sankey stage.
std::string selection_to_json(const RuleSelection& selection, const FeatureCatalog& catalog);
RuleSelection selection_from_json(std::string_view text, const FeatureCatalog& catalog);

} // namespace sankarm

#endif // SANKARM_SELECTOR_HPP

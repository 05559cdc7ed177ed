#ifndef SANKARM_ARCHIVE_HPP
#define SANKARM_ARCHIVE_HPP

#include "sankarm/rule.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sankarm {

/// Deduplicated rules found while mining one time period.
///
/// Insertion is a keyed upsert that keeps the higher fitness; on equal
/// fitness the rule with the smaller item sequence wins, so the final
/// contents do not depend on the order rules were offered in.
class RuleArchive {
public:
    explicit RuleArchive(std::string period_label = {}) : label_(std::move(period_label)) {}

    /// Returns true when the archive changed.
    bool offer(const ScoredRule& rule);

    const std::string& period_label() const noexcept { return label_; }
    void set_period_label(std::string label) { label_ = std::move(label); }

    const std::map<RuleKey, ScoredRule>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool contains(const AssociationRule& rule) const { return entries_.contains(rule.key()); }
    const ScoredRule* find(const AssociationRule& rule) const;

    /// Highest entry fitness, 0 for an empty archive.
    double best_fitness() const noexcept { return best_; }

    /// Entries by descending fitness, ties by ascending canonical rule text.
    std::vector<ScoredRule> ranked(const FeatureCatalog& catalog) const;

    bool operator==(const RuleArchive& other) const;

private:
    std::string label_;
    std::map<RuleKey, ScoredRule> entries_;
    double best_ = 0.0;
};

/// JSON array of {rule, support, confidence, fitness} in ranked order.
std::string archive_to_json(const RuleArchive& archive, const FeatureCatalog& catalog);
RuleArchive archive_from_json(std::string_view text, const FeatureCatalog& catalog, std::string label);

/// "archive-period-2.json" -> "period-2"; otherwise the file stem.
std::string label_from_filename(const std::string& path, std::string_view prefix);

} // namespace sankarm

#endif // SANKARM_ARCHIVE_HPP

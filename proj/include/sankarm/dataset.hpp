#ifndef SANKARM_DATASET_HPP
#define SANKARM_DATASET_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sankarm {

struct Feature {
    std::string name;
    std::vector<std::string> attributes;

    bool operator==(const Feature&) const = default;
};

/// Ordered features and their categorical attribute domains.
///
/// Construction validates the catalog: at least two features, unique
/// non-empty feature names, and a non-empty list of unique non-empty
/// attribute values per feature.
class FeatureCatalog {
public:
    FeatureCatalog() = default;
    explicit FeatureCatalog(std::vector<Feature> features);

    std::size_t size() const noexcept { return features_.size(); }
    const Feature& feature(std::size_t j) const { return features_.at(j); }
    const std::vector<Feature>& features() const noexcept { return features_; }

    /// Number of attribute values of feature `j`.
    std::size_t domain_size(std::size_t j) const { return features_.at(j).attributes.size(); }

    std::optional<std::size_t> find_feature(std::string_view name) const;
    std::optional<std::size_t> find_attribute(std::size_t feature, std::string_view value) const;

    bool operator==(const FeatureCatalog&) const = default;

private:
    std::vector<Feature> features_;
};

enum class TimestampKind { Date, Integer };

/// Ordered timestamp key. Dates are stored as days since 1970-01-01.
struct Timestamp {
    TimestampKind kind = TimestampKind::Integer;
    std::int64_t key = 0;

    auto operator<=>(const Timestamp&) const = default;
};

/// Parses "YYYY-MM-DD" or a signed decimal integer.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Attribute codes, one row per transaction and one column per feature.
using CodeMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A single transaction: one attribute index per catalog feature.
struct Transaction {
    std::vector<std::int32_t> values;
    std::optional<Timestamp> timestamp;

    bool operator==(const Transaction&) const = default;
};

/// Immutable categorical transaction database.
class TransactionDB {
public:
    TransactionDB() = default;

    /// Validates codes against the catalog and timestamps for ordering.
    TransactionDB(FeatureCatalog catalog, CodeMatrix codes,
                  std::optional<std::vector<Timestamp>> timestamps, std::string label);

    const FeatureCatalog& catalog() const noexcept { return catalog_; }
    const CodeMatrix& codes() const noexcept { return codes_; }
    const std::optional<std::vector<Timestamp>>& timestamps() const noexcept { return timestamps_; }
    const std::string& label() const noexcept { return label_; }

    std::size_t size() const noexcept { return static_cast<std::size_t>(codes_.rows()); }
    std::size_t feature_count() const noexcept { return catalog_.size(); }
    bool has_timestamps() const noexcept { return timestamps_.has_value(); }

    Transaction transaction(std::size_t i) const;

    /// Same transactions and catalog under a different label.
    TransactionDB relabeled(std::string label) const;

private:
    FeatureCatalog catalog_;
    CodeMatrix codes_;
    std::optional<std::vector<Timestamp>> timestamps_;
    std::string label_;
};

/// Reads a comma-separated file with a header row of feature names and an
/// optional leading "timestamp" column. Without a catalog, the catalog is
/// inferred from distinct column values in order of first appearance after
/// chronological sorting.
TransactionDB load_transactions(std::istream& source,
                                const std::optional<FeatureCatalog>& catalog = std::nullopt,
                                std::string label = "all");
TransactionDB load_transactions_file(const std::string& path,
                                     const std::optional<FeatureCatalog>& catalog = std::nullopt);

/// Catalog made of the values that actually occur in `db`, by first appearance.
FeatureCatalog infer_catalog(const TransactionDB& db);

FeatureCatalog catalog_from_json(std::string_view text);
FeatureCatalog load_catalog_file(const std::string& path);
std::string catalog_to_json(const FeatureCatalog& catalog);

struct EqualCount {
    std::size_t periods = 4;
};

struct TimeBoundaries {
    /// K-1 strictly increasing boundaries.
    std::vector<Timestamp> boundaries;
};

using PartitionSpec = std::variant<EqualCount, TimeBoundaries>;

/// Splits `db` into chronological parts labelled "period-1" ... "period-K".
std::vector<TransactionDB> partition(const TransactionDB& db, const PartitionSpec& spec);

/// Buckets a numeric column into three labels by nearest-rank terciles.
/// Values tied with a cut-off go to the lower bucket.
std::vector<std::string> tercile_discretize(std::span<const double> column,
                                            const std::array<std::string, 3>& labels);

} // namespace sankarm

#endif // SANKARM_DATASET_HPP

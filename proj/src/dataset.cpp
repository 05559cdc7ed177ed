#include "sankarm/dataset.hpp"
#include "sankarm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

namespace sankarm {

FeatureCatalog::FeatureCatalog(std::vector<Feature> features) : features_(std::move(features)) {
    if (features_.size() < 2)
        throw SchemaError("catalog needs at least two features, got " + std::to_string(features_.size()));
    std::set<std::string> names;
    for (const auto& f : features_) {
        if (f.name.empty())
            throw SchemaError("catalog has a feature with an empty name");
        if (!names.insert(f.name).second)
            throw SchemaError("duplicate feature name '" + f.name + "'");
        if (f.attributes.empty())
            throw SchemaError("feature '" + f.name + "' has no attribute values");
        std::set<std::string> values;
        for (const auto& a : f.attributes) {
            if (a.empty())
                throw SchemaError("feature '" + f.name + "' has an empty attribute value");
            if (!values.insert(a).second)
                throw SchemaError("feature '" + f.name + "' repeats attribute '" + a + "'");
        }
    }
}

std::optional<std::size_t> FeatureCatalog::find_feature(std::string_view name) const {
    for (std::size_t j = 0; j < features_.size(); ++j)
        if (features_[j].name == name)
            return j;
    return std::nullopt;
}

std::optional<std::size_t> FeatureCatalog::find_attribute(std::size_t feature, std::string_view value) const {
    const auto& attrs = features_.at(feature).attributes;
    for (std::size_t k = 0; k < attrs.size(); ++k)
        if (attrs[k] == value)
            return k;
    return std::nullopt;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    auto parse_int = [](std::string_view s, std::int64_t& out) {
        if (s.empty())
            return false;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
    };

    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        std::int64_t y = 0, m = 0, d = 0;
        if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d))
            return std::nullopt;
        if (text[0] == '-' || text[5] == '-' || text[8] == '-' || text[5] == '+' || text[8] == '+')
            return std::nullopt;
        const year_month_day ymd{year{static_cast<int>(y)}, month{static_cast<unsigned>(m)},
                                 day{static_cast<unsigned>(d)}};
        if (!ymd.ok())
            return std::nullopt;
        return Timestamp{TimestampKind::Date, sys_days{ymd}.time_since_epoch().count()};
    }
    std::int64_t value = 0;
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    if (!parse_int(text, value))
        return std::nullopt;
    return Timestamp{TimestampKind::Integer, value};
}

TransactionDB::TransactionDB(FeatureCatalog catalog, CodeMatrix codes,
                             std::optional<std::vector<Timestamp>> timestamps, std::string label)
    : catalog_(std::move(catalog)), codes_(std::move(codes)), timestamps_(std::move(timestamps)),
      label_(std::move(label)) {
    if (static_cast<std::size_t>(codes_.cols()) != catalog_.size() && codes_.rows() > 0)
        throw SchemaError("transaction arity " + std::to_string(codes_.cols()) + " does not match catalog size " +
                          std::to_string(catalog_.size()));
    if (codes_.rows() == 0)
        codes_.resize(0, static_cast<Eigen::Index>(catalog_.size()));
    for (Eigen::Index i = 0; i < codes_.rows(); ++i)
        for (Eigen::Index j = 0; j < codes_.cols(); ++j) {
            const auto c = codes_(i, j);
            if (c < 0 || static_cast<std::size_t>(c) >= catalog_.domain_size(static_cast<std::size_t>(j)))
                throw DomainError("attribute code " + std::to_string(c) + " out of range for feature '" +
                                  catalog_.feature(static_cast<std::size_t>(j)).name + "'");
        }
    if (timestamps_) {
        if (timestamps_->size() != size())
            throw SchemaError("timestamp count does not match transaction count");
        if (!std::is_sorted(timestamps_->begin(), timestamps_->end()))
            throw SchemaError("transactions are not sorted by timestamp");
        if (!timestamps_->empty()) {
            const auto kind = timestamps_->front().kind;
            for (const auto& t : *timestamps_)
                if (t.kind != kind)
                    throw SchemaError("timestamp column mixes dates and integers");
        }
    }
}

Transaction TransactionDB::transaction(std::size_t i) const {
    const auto row = codes_.row(static_cast<Eigen::Index>(i));
    Transaction t;
    t.values.assign(row.data(), row.data() + row.size());
    if (timestamps_)
        t.timestamp = timestamps_->at(i);
    return t;
}

TransactionDB TransactionDB::relabeled(std::string label) const {
    TransactionDB copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

namespace {

// One CSV record. Handles double-quoted fields with "" escapes; a record may
// not span lines.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            if (!cell.empty() || was_quoted)
                throw ParseError("unexpected quote inside field", row);
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
            was_quoted = false;
        } else {
            if (was_quoted)
                throw ParseError("characters after closing quote", row);
            cell.push_back(c);
        }
    }
    if (quoted)
        throw ParseError("unterminated quoted field", row);
    cells.push_back(std::move(cell));
    return cells;
}

} // namespace

TransactionDB load_transactions(std::istream& source, const std::optional<FeatureCatalog>& catalog,
                                std::string label) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(source, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        header = split_csv_line(line, row);
        break;
    }
    if (header.empty())
        throw ParseError("missing header row");

    const bool has_ts = header.front() == "timestamp";
    const std::size_t first = has_ts ? 1 : 0;
    std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(first), header.end());
    {
        std::set<std::string> seen;
        for (const auto& n : names) {
            if (n.empty())
                throw SchemaError("empty column name in header");
            if (n == "timestamp")
                throw SchemaError("\"timestamp\" must be the first column");
            if (!seen.insert(n).second)
                throw SchemaError("duplicate header name '" + n + "'");
        }
    }
    if (names.size() < 2)
        throw SchemaError("need at least two feature columns");

    // column_of[j] is the CSV column (after the timestamp) holding catalog feature j.
    std::vector<std::size_t> column_of(names.size());
    if (catalog) {
        if (catalog->size() != names.size())
            throw SchemaError("catalog has " + std::to_string(catalog->size()) + " features but the file has " +
                              std::to_string(names.size()));
        for (std::size_t c = 0; c < names.size(); ++c) {
            const auto j = catalog->find_feature(names[c]);
            if (!j)
                throw SchemaError("column '" + names[c] + "' is not in the catalog");
            column_of[*j] = c;
        }
    } else {
        std::iota(column_of.begin(), column_of.end(), std::size_t{0});
    }

    std::vector<std::vector<std::string>> cells;
    std::vector<Timestamp> stamps;
    while (std::getline(source, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto rec = split_csv_line(line, row);
        if (rec.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(rec.size()),
                             row);
        for (std::size_t c = 0; c < rec.size(); ++c)
            if (rec[c].empty())
                throw ParseError("empty cell in column '" + header[c] + "'", row);
        if (has_ts) {
            const auto ts = parse_timestamp(rec.front());
            if (!ts)
                throw ParseError("bad timestamp '" + rec.front() + "'", row);
            if (!stamps.empty() && stamps.front().kind != ts->kind)
                throw SchemaError("timestamp column mixes dates and integers (row " + std::to_string(row) + ")");
            stamps.push_back(*ts);
            rec.erase(rec.begin());
        }
        cells.push_back(std::move(rec));
    }

    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (has_ts)
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return stamps[a] < stamps[b]; });

    FeatureCatalog cat;
    if (catalog) {
        cat = *catalog;
    } else {
        std::vector<Feature> features;
        for (std::size_t c = 0; c < names.size(); ++c) {
            Feature f{names[c], {}};
            for (auto r : order) {
                const auto& v = cells[r][c];
                if (std::find(f.attributes.begin(), f.attributes.end(), v) == f.attributes.end())
                    f.attributes.push_back(v);
            }
            if (f.attributes.empty())
                f.attributes.push_back("?");
            features.push_back(std::move(f));
        }
        cat = FeatureCatalog(std::move(features));
    }

    CodeMatrix codes(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& rec = cells[order[i]];
        for (std::size_t j = 0; j < names.size(); ++j) {
            const auto& value = rec[column_of[j]];
            const auto k = cat.find_attribute(j, value);
            if (!k)
                throw DomainError("value '" + value + "' is not in the domain of feature '" + cat.feature(j).name +
                                  "'");
            codes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<std::int32_t>(*k);
        }
    }

    std::optional<std::vector<Timestamp>> ts;
    if (has_ts) {
        ts.emplace();
        ts->reserve(order.size());
        for (auto r : order)
            ts->push_back(stamps[r]);
    }
    return TransactionDB(std::move(cat), std::move(codes), std::move(ts), std::move(label));
}

TransactionDB load_transactions_file(const std::string& path, const std::optional<FeatureCatalog>& catalog) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return load_transactions(in, catalog);
}

FeatureCatalog infer_catalog(const TransactionDB& db) {
    const auto& cat = db.catalog();
    std::vector<Feature> features;
    for (std::size_t j = 0; j < cat.size(); ++j) {
        Feature f{cat.feature(j).name, {}};
        std::vector<bool> seen(cat.domain_size(j), false);
        for (Eigen::Index i = 0; i < db.codes().rows(); ++i) {
            const auto k = static_cast<std::size_t>(db.codes()(i, static_cast<Eigen::Index>(j)));
            if (!seen[k]) {
                seen[k] = true;
                f.attributes.push_back(cat.feature(j).attributes[k]);
            }
        }
        features.push_back(std::move(f));
    }
    return FeatureCatalog(std::move(features));
}

FeatureCatalog catalog_from_json(std::string_view text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("catalog JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("catalog JSON must be an object of feature -> [attributes]");
    std::vector<Feature> features;
    for (const auto& [name, attrs] : doc.items()) {
        if (!attrs.is_array())
            throw SchemaError("catalog entry '" + name + "' must be an array");
        Feature f{name, {}};
        for (const auto& a : attrs) {
            if (!a.is_string())
                throw SchemaError("catalog entry '" + name + "' must contain strings");
            f.attributes.push_back(a.get<std::string>());
        }
        features.push_back(std::move(f));
    }
    return FeatureCatalog(std::move(features));
}

FeatureCatalog load_catalog_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return catalog_from_json(buf.str());
}

std::string catalog_to_json(const FeatureCatalog& catalog) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& f : catalog.features())
        doc[f.name] = f.attributes;
    return doc.dump(2) + "\n";
}

namespace {

TransactionDB slice(const TransactionDB& db, std::size_t begin, std::size_t end, std::string label) {
    const auto n = static_cast<Eigen::Index>(end - begin);
    CodeMatrix part = db.codes().middleRows(static_cast<Eigen::Index>(begin), n);
    std::optional<std::vector<Timestamp>> ts;
    if (db.timestamps())
        ts.emplace(db.timestamps()->begin() + static_cast<std::ptrdiff_t>(begin),
                   db.timestamps()->begin() + static_cast<std::ptrdiff_t>(end));
    return TransactionDB(db.catalog(), std::move(part), std::move(ts), std::move(label));
}

} // namespace

std::vector<TransactionDB> partition(const TransactionDB& db, const PartitionSpec& spec) {
    const std::size_t n = db.size();
    std::vector<std::size_t> cuts{0};

    if (const auto* eq = std::get_if<EqualCount>(&spec)) {
        const std::size_t k = eq->periods;
        if (k < 1)
            throw ArgumentError("period count must be at least 1");
        if (k > n)
            throw ArgumentError("period count " + std::to_string(k) + " exceeds transaction count " +
                                std::to_string(n));
        const std::size_t base = n / k, extra = n % k;
        for (std::size_t p = 0; p < k; ++p)
            cuts.push_back(cuts.back() + base + (p < extra ? 1 : 0));
    } else {
        const auto& bounds = std::get<TimeBoundaries>(spec).boundaries;
        if (!db.timestamps())
            throw SchemaError("boundary partitioning requires a timestamp column");
        const std::size_t k = bounds.size() + 1;
        if (k > n)
            throw ArgumentError("period count " + std::to_string(k) + " exceeds transaction count " +
                                std::to_string(n));
        for (std::size_t b = 0; b < bounds.size(); ++b) {
            if (n > 0 && bounds[b].kind != db.timestamps()->front().kind)
                throw SchemaError("boundary kind does not match the timestamp column");
            if (b > 0 && !(bounds[b - 1] < bounds[b]))
                throw ArgumentError("boundaries must be strictly increasing");
        }
        // Transaction goes to the first period whose boundary exceeds its timestamp.
        const auto& ts = *db.timestamps();
        for (const auto& bound : bounds) {
            const auto it = std::lower_bound(ts.begin(), ts.end(), bound);
            cuts.push_back(static_cast<std::size_t>(it - ts.begin()));
        }
        cuts.push_back(n);
    }

    std::vector<TransactionDB> parts;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p)
        parts.push_back(slice(db, cuts[p], cuts[p + 1], "period-" + std::to_string(p + 1)));
    return parts;
}

std::vector<std::string> tercile_discretize(std::span<const double> column, const std::array<std::string, 3>& labels) {
    if (column.empty())
        throw ArgumentError("cannot discretize an empty column");
    if (labels[0] == labels[1] || labels[1] == labels[2] || labels[0] == labels[2])
        throw ArgumentError("tercile labels must be distinct");
    for (double v : column)
        if (!std::isfinite(v))
            throw DataError("non-finite value in numeric column");

    std::vector<double> sorted(column.begin(), column.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    // Nearest rank: ceil(p * n) with p = 1/3 and 2/3, as 1-based ranks.
    const std::size_t r1 = (n + 2) / 3;
    const std::size_t r2 = (2 * n + 2) / 3;
    const double low_cut = sorted[r1 - 1];
    const double mid_cut = sorted[r2 - 1];

    std::vector<std::string> out;
    out.reserve(n);
    for (double v : column)
        out.push_back(v <= low_cut ? labels[0] : v <= mid_cut ? labels[1] : labels[2]);
    return out;
}

} // namespace sankarm

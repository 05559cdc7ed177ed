#include "sankarm/archive.hpp"
#include "sankarm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>

namespace sankarm {

namespace {

bool item_order_less(const AssociationRule& a, const AssociationRule& b) {
    return std::tie(a.antecedent(), a.consequent()) < std::tie(b.antecedent(), b.consequent());
}

} // namespace

bool RuleArchive::offer(const ScoredRule& rule) {
    auto key = rule.rule.key();
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        entries_.emplace(std::move(key), rule);
    } else if (rule.fitness > it->second.fitness ||
               (rule.fitness == it->second.fitness && item_order_less(rule.rule, it->second.rule))) {
        it->second = rule;
    } else {
        return false;
    }
    best_ = std::max(best_, rule.fitness);
    return true;
}

const ScoredRule* RuleArchive::find(const AssociationRule& rule) const {
    const auto it = entries_.find(rule.key());
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<ScoredRule> RuleArchive::ranked(const FeatureCatalog& catalog) const {
    std::vector<std::pair<std::string, ScoredRule>> keyed;
    keyed.reserve(entries_.size());
    for (const auto& [key, rule] : entries_)
        keyed.emplace_back(format_rule(rule.rule.canonical(), catalog), rule);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.second.fitness != b.second.fitness)
            return a.second.fitness > b.second.fitness;
        return a.first < b.first;
    });
    std::vector<ScoredRule> out;
    out.reserve(keyed.size());
    for (auto& [text, rule] : keyed)
        out.push_back(std::move(rule));
    return out;
}

bool RuleArchive::operator==(const RuleArchive& other) const {
    if (label_ != other.label_ || entries_.size() != other.entries_.size() || best_ != other.best_)
        return false;
    return std::equal(entries_.begin(), entries_.end(), other.entries_.begin(), [](const auto& a, const auto& b) {
        return a.first == b.first && a.second.rule == b.second.rule && a.second.support == b.second.support &&
               a.second.confidence == b.second.confidence && a.second.fitness == b.second.fitness;
    });
}

std::string archive_to_json(const RuleArchive& archive, const FeatureCatalog& catalog) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : archive.ranked(catalog)) {
        nlohmann::ordered_json entry;
        entry["rule"] = format_rule(r.rule, catalog);
        entry["support"] = r.support;
        entry["confidence"] = r.confidence;
        entry["fitness"] = r.fitness;
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

RuleArchive archive_from_json(std::string_view text, const FeatureCatalog& catalog, std::string label) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("archive JSON: ") + e.what());
    }
    if (!doc.is_array())
        throw SchemaError("archive JSON must be an array");
    RuleArchive archive(std::move(label));
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("rule") || !entry["rule"].is_string())
            throw SchemaError("archive entry needs a string \"rule\"");
        ScoredRule r;
        r.rule = parse_rule(entry["rule"].get<std::string>(), catalog);
        for (auto [name, field] : {std::pair{"support", &r.support}, std::pair{"confidence", &r.confidence},
                                   std::pair{"fitness", &r.fitness}}) {
            if (!entry.contains(name) || !entry[name].is_number())
                throw SchemaError(std::string("archive entry needs a numeric \"") + name + "\"");
            *field = entry[name].get<double>();
            if (*field < 0.0 || *field > 1.0)
                throw SchemaError(std::string("archive field \"") + name + "\" outside [0, 1]");
        }
        archive.offer(r);
    }
    return archive;
}

std::string label_from_filename(const std::string& path, std::string_view prefix) {
    std::string stem = std::filesystem::path(path).stem().string();
    if (stem.size() > prefix.size() && stem.compare(0, prefix.size(), prefix) == 0)
        stem.erase(0, prefix.size());
    return stem;
}

} // namespace sankarm

#pragma once

// Attribute vocabulary handling: schemas, labeled records, and the
// attribute-set intersection-over-union that drives the soft contrastive
// targets.

#include <Eigen/Core>
#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aima/core/error.hpp"
#include "aima/core/jsonio.hpp"

namespace aima {

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

struct AttributeCategory {
    std::string name;
    std::vector<std::string> values;
    bool multi = false;  // multi-valued category (e.g. carried items)
};

struct AttributeSchema {
    std::string name;
    std::vector<AttributeCategory> categories;

    const AttributeCategory* find(const std::string& category) const {
        for (const auto& c : categories)
            if (c.name == category) return &c;
        return nullptr;
    }

    bool has_value(const std::string& category, const std::string& value) const {
        const auto* c = find(category);
        if (!c) return false;
        return std::find(c->values.begin(), c->values.end(), value) != c->values.end();
    }

    /// All distinct value words across categories, lower-cased.
    std::set<std::string> value_universe() const {
        std::set<std::string> u;
        for (const auto& c : categories)
            for (const auto& v : c.values) u.insert(to_lower(v));
        return u;
    }

    void validate() const {
        if (name.empty()) throw ValidationError("schema: missing name");
        if (categories.empty()) throw ValidationError("schema '" + name + "': no categories");
        std::set<std::string> seen;
        for (const auto& c : categories) {
            if (c.name.empty()) throw ValidationError("schema '" + name + "': empty category name");
            if (!seen.insert(c.name).second)
                throw ValidationError("schema '" + name + "': duplicate category '" + c.name + "'");
            if (c.values.empty())
                throw ValidationError("schema '" + name + "': category '" + c.name + "' has no values");
            std::set<std::string> vals;
            for (const auto& v : c.values) {
                if (v.empty()) throw ValidationError("schema '" + name + "': empty value in '" + c.name + "'");
                if (!vals.insert(v).second)
                    throw ValidationError("schema '" + name + "': duplicate value '" + v + "' in '" + c.name + "'");
            }
        }
    }

    static AttributeSchema from_json(const Json& j) {
        AttributeSchema s;
        try {
            s.name = j.at("name").get<std::string>();
            for (const auto& jc : j.at("categories")) {
                AttributeCategory c;
                c.name = jc.at("name").get<std::string>();
                c.values = jc.at("values").get<std::vector<std::string>>();
                c.multi = jc.value("multi", false);
                s.categories.push_back(std::move(c));
            }
        } catch (const Json::exception& e) {
            throw ValidationError(std::string("schema json: ") + e.what());
        }
        s.validate();
        return s;
    }

    Json to_json() const {
        Json j;
        j["name"] = name;
        j["categories"] = Json::array();
        for (const auto& c : categories)
            j["categories"].push_back({{"name", c.name}, {"values", c.values}, {"multi", c.multi}});
        return j;
    }
};

inline AttributeSchema load_schema(const std::filesystem::path& path) {
    return AttributeSchema::from_json(load_json(path));
}

struct AttributeRecord {
    std::int64_t identity = -1;
    std::string image;  // file path or synthetic reference
    // category -> chosen value(s); a category absent from the map is unknown.
    std::map<std::string, std::vector<std::string>> attrs;
    std::string split = "train";

    bool known(const std::string& category) const {
        auto it = attrs.find(category);
        return it != attrs.end() && !it->second.empty();
    }
};

/// Collects every violation before reporting; returns the record unchanged
/// when valid.
inline const AttributeRecord& validate_record(const AttributeRecord& rec, const AttributeSchema& schema) {
    std::vector<std::string> problems;
    if (rec.identity < 0) problems.push_back("identity-id must be >= 0");
    for (const auto& [cat, values] : rec.attrs) {
        const auto* c = schema.find(cat);
        if (!c) {
            problems.push_back("unknown category '" + cat + "'");
            continue;
        }
        if (!c->multi && values.size() > 1)
            problems.push_back("category '" + cat + "' is single-valued but has " + std::to_string(values.size()) + " values");
        for (const auto& v : values)
            if (std::find(c->values.begin(), c->values.end(), v) == c->values.end())
                problems.push_back("value '" + v + "' not allowed in category '" + cat + "'");
    }
    if (!problems.empty()) {
        std::string msg = "record (identity " + std::to_string(rec.identity) + "):";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
    return rec;
}

/// The word set A_i for one record: lower-cased values of every known
/// category. Multi-word values stay intact as one set element.
struct AttributeSet {
    std::set<std::string> words;

    static AttributeSet from_record(const AttributeRecord& rec) {
        AttributeSet s;
        for (const auto& [cat, values] : rec.attrs)
            for (const auto& v : values)
                if (!v.empty()) s.words.insert(to_lower(v));
        return s;
    }

    bool empty() const { return words.empty(); }
    std::size_t size() const { return words.size(); }
};

/// |a n b| / |a u b|. Two empty sets give 0 so downstream row sums stay
/// finite; fully-unknown records are the only way to hit that case.
inline double attribute_iou(const AttributeSet& a, const AttributeSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& w : a.words) inter += b.words.count(w);
    std::size_t uni = a.size() + b.size() - inter;
    return double(inter) / double(uni);
}

inline Eigen::MatrixXd iou_matrix(const std::vector<AttributeSet>& batch) {
    const Eigen::Index n = Eigen::Index(batch.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = attribute_iou(batch[i], batch[i]);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = attribute_iou(batch[i], batch[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

}  // namespace aima

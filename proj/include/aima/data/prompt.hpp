#pragma once

// Prompt templates turn an attribute record into a natural sentence while
// remembering exactly where each attribute value landed, so the masking
// stage can target attribute words and nothing else.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "aima/core/error.hpp"
#include "aima/data/schema.hpp"

namespace aima {

struct TemplatePiece {
    bool is_slot = false;
    std::string text;  // literal text, or the slot's category name
};

struct TemplateClause {
    std::vector<TemplatePiece> pieces;

    bool has_slot(const std::string& category) const {
        for (const auto& p : pieces)
            if (p.is_slot && p.text == category) return true;
        return false;
    }
};

struct PromptTemplate {
    std::string dataset;
    std::vector<TemplateClause> clauses;

    std::vector<std::string> slot_categories() const {
        std::vector<std::string> out;
        for (const auto& cl : clauses)
            for (const auto& p : cl.pieces)
                if (p.is_slot && std::find(out.begin(), out.end(), p.text) == out.end())
                    out.push_back(p.text);
        return out;
    }

    void validate(const AttributeSchema& schema) const {
        for (const auto& cat : slot_categories())
            if (!schema.find(cat))
                throw ValidationError("template '" + dataset + "': slot [" + cat + "] not in schema '" + schema.name + "'");
    }

    /// Parses clause-per-line text with [Category] slot syntax.
    static PromptTemplate parse(const std::string& text, const std::string& dataset_name) {
        PromptTemplate t;
        t.dataset = dataset_name;
        std::string line;
        std::istringstream in(text);
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
            if (line.empty()) continue;
            TemplateClause clause;
            std::string literal;
            for (std::size_t i = 0; i < line.size();) {
                if (line[i] == '[') {
                    std::size_t close = line.find(']', i);
                    if (close == std::string::npos)
                        throw ValidationError("template '" + dataset_name + "': unterminated slot in: " + line);
                    if (!literal.empty()) {
                        clause.pieces.push_back({false, literal});
                        literal.clear();
                    }
                    std::string cat = line.substr(i + 1, close - i - 1);
                    if (cat.empty()) throw ValidationError("template '" + dataset_name + "': empty slot name");
                    clause.pieces.push_back({true, cat});
                    i = close + 1;
                } else {
                    literal.push_back(line[i]);
                    ++i;
                }
            }
            if (!literal.empty()) clause.pieces.push_back({false, literal});
            t.clauses.push_back(std::move(clause));
        }
        if (t.clauses.empty()) throw ValidationError("template '" + dataset_name + "': no clauses");
        return t;
    }

    /// One slot-only clause per category: the "no prompt" ablation text.
    static PromptTemplate bare(const AttributeSchema& schema) {
        PromptTemplate t;
        t.dataset = schema.name + "-bare";
        for (const auto& c : schema.categories) {
            TemplateClause cl;
            cl.pieces.push_back({true, c.name});
            t.clauses.push_back(std::move(cl));
        }
        return t;
    }
};

inline PromptTemplate load_template(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return PromptTemplate::parse(ss.str(), path.stem().string());
}

struct SpanInfo {
    std::string category;
    std::string value;
    int begin = 0;  // character offsets, [begin, end)
    int end = 0;
};

struct RenderedSentence {
    std::string text;
    std::vector<SpanInfo> spans;
    std::int64_t identity = -1;
};

struct RenderOptions {
    enum class Unknown { DropClause, Literal };
    Unknown unknown = Unknown::DropClause;  // drop clauses touching unknown slots
    bool vowel_articles = true;             // "a" vs "an" by the filled value
    std::string multi_join = " and ";
    bool gender_pronouns = true;  // later [Gender] slots become he/she
};

namespace prompt_detail {

inline bool is_gender(const std::string& category) { return to_lower(category) == "gender"; }

inline std::optional<std::string> pronoun_for(const std::string& value) {
    std::string v = to_lower(value);
    if (v == "man" || v == "male" || v == "boy") return "he";
    if (v == "woman" || v == "female" || v == "girl") return "she";
    return "they";
}

inline bool starts_with_vowel(const std::string& s) {
    if (s.empty()) return false;
    char c = char(std::tolower(static_cast<unsigned char>(s[0])));
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

/// True when the emitted text sits at the start of a sentence (text start
/// or right after a period).
inline bool at_sentence_start(const std::string& out) {
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
        if (*it == ' ') continue;
        return *it == '.';
    }
    return true;
}

/// Checks whether `out` ends with a standalone article and returns its
/// start offset (article + one trailing space).
inline std::optional<std::size_t> trailing_article(const std::string& out) {
    if (out.size() < 2 || out.back() != ' ') return std::nullopt;
    std::size_t end = out.size() - 1;  // index of the space
    std::size_t start = end;
    while (start > 0 && out[start - 1] != ' ') --start;
    std::string word = out.substr(start, end - start);
    std::string lw = to_lower(word);
    if (lw == "a" || lw == "an") return start;
    return std::nullopt;
}

}  // namespace prompt_detail

/// Fills the template with the record's values. Clauses referencing an
/// unknown category are dropped (default policy). The first gender slot
/// renders the noun and is recorded as a maskable span; later gender slots
/// render pronouns and are not.
inline RenderedSentence render_prompt(const PromptTemplate& tmpl, const AttributeRecord& rec,
                                      const AttributeSchema& schema, const RenderOptions& opt = {}) {
    using namespace prompt_detail;
    tmpl.validate(schema);
    validate_record(rec, schema);

    RenderedSentence out;
    out.identity = rec.identity;
    bool gender_emitted = false;

    auto emit = [&out](const std::string& s) { out.text += s; };

    auto emit_value = [&](const std::string& category, const std::string& value) {
        // Article agreement happens on the literal text just before a span.
        if (auto art = trailing_article(out.text)) {
            bool negated = value.rfind("no ", 0) == 0 || to_lower(value) == "nothing";
            if (negated) {
                out.text.erase(*art);  // "carries a" + "no bag" -> "carries no bag"
            } else if (opt.vowel_articles) {
                bool cap = std::isupper(static_cast<unsigned char>(out.text[*art]));
                std::string article = starts_with_vowel(value) ? (cap ? "An" : "an") : (cap ? "A" : "a");
                out.text.erase(*art);
                out.text += article;
                out.text += ' ';
            }
        }
        SpanInfo span;
        span.category = category;
        span.value = value;
        span.begin = int(out.text.size());
        emit(value);
        span.end = int(out.text.size());
        out.spans.push_back(std::move(span));
    };

    bool first_clause = true;
    for (const auto& clause : tmpl.clauses) {
        // Unknown-slot policy: drop the clause outright.
        bool skip = false;
        if (opt.unknown == RenderOptions::Unknown::DropClause) {
            for (const auto& p : clause.pieces)
                if (p.is_slot && !rec.known(p.text)) skip = true;
        }
        if (skip) continue;

        if (!first_clause) emit(" ");
        first_clause = false;

        for (const auto& p : clause.pieces) {
            if (!p.is_slot) {
                emit(p.text);
                continue;
            }
            if (!rec.known(p.text)) {  // Literal policy
                emit("unknown");
                continue;
            }
            const auto& values = rec.attrs.at(p.text);
            if (is_gender(p.text) && opt.gender_pronouns && gender_emitted) {
                auto pron = pronoun_for(values.front());
                std::string w = *pron;
                if (at_sentence_start(out.text)) w[0] = char(std::toupper(static_cast<unsigned char>(w[0])));
                emit(w);
                continue;
            }
            for (std::size_t k = 0; k < values.size(); ++k) {
                if (k > 0) emit(opt.multi_join);
                emit_value(p.text, values[k]);
            }
            if (is_gender(p.text)) gender_emitted = true;
        }
    }
    return out;
}

}  // namespace aima

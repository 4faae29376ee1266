#pragma once

// Closed-vocabulary word tokenizer: lower-cases, splits punctuation, and
// tracks how rendered-sentence character spans map onto token positions.
// The masking stage implements the 15% span selection with the 90/10
// mask/keep split.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "aima/core/error.hpp"
#include "aima/core/rng.hpp"
#include "aima/data/prompt.hpp"

namespace aima {

struct Vocabulary {
    static constexpr std::int32_t kPad = 0;
    static constexpr std::int32_t kSos = 1;
    static constexpr std::int32_t kEos = 2;
    static constexpr std::int32_t kMask = 3;
    static constexpr std::int32_t kUnk = 4;
    static constexpr std::int32_t kReserved = 5;

    std::vector<std::string> tokens;  // index = id; first 5 reserved
    std::unordered_map<std::string, std::int32_t> index;

    Vocabulary() {
        tokens = {"[PAD]", "[SOS]", "[EOS]", "[MASK]", "[UNK]"};
        for (std::size_t i = 0; i < tokens.size(); ++i) index[tokens[i]] = std::int32_t(i);
    }

    std::int32_t size() const { return std::int32_t(tokens.size()); }

    std::int32_t id_of(const std::string& tok) const {
        auto it = index.find(tok);
        return it == index.end() ? kUnk : it->second;
    }

    bool contains(const std::string& tok) const { return index.count(tok) > 0; }

    void add(const std::string& tok) {
        if (index.count(tok)) return;
        index[tok] = std::int32_t(tokens.size());
        tokens.push_back(tok);
    }

    void save(const std::filesystem::path& path) const { spit(path, serialize()); }

    std::string serialize() const {
        std::string out = "#aima-vocab v1\n#reserved [PAD] [SOS] [EOS] [MASK] [UNK]\n";
        for (const auto& t : tokens) out += t + "\n";
        return out;
    }

    static Vocabulary deserialize(const std::string& text) {
        Vocabulary v;
        v.tokens.clear();
        v.index.clear();
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r')) line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            v.index[line] = std::int32_t(v.tokens.size());
            v.tokens.push_back(line);
        }
        if (v.tokens.size() < kReserved || v.tokens[0] != "[PAD]" || v.tokens[kUnk] != "[UNK]")
            throw ValidationError("vocabulary file: reserved token header damaged");
        return v;
    }

    static Vocabulary load(const std::filesystem::path& path) { return deserialize(slurp(path)); }
};

struct TokenPiece {
    std::string text;
    int char_begin = 0;
    int char_end = 0;
};

/// Lower-cased word tokens; punctuation characters become their own tokens.
inline std::vector<TokenPiece> word_tokenize(const std::string& text) {
    std::vector<TokenPiece> out;
    std::size_t i = 0;
    auto is_word = [](unsigned char c) { return std::isalnum(c) != 0; };
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (is_word(c)) {
            std::size_t j = i;
            while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({to_lower(text.substr(i, j - i)), int(i), int(j)});
            i = j;
        } else {
            out.push_back({std::string(1, char(std::tolower(c))), int(i), int(i + 1)});
            ++i;
        }
    }
    return out;
}

/// Frequency-ranked vocabulary over a rendered corpus. Ties break by first
/// appearance, so the result is deterministic for a given corpus order.
inline Vocabulary build_vocab(const std::vector<std::string>& corpus, std::int32_t target_size) {
    if (corpus.empty()) throw ValidationError("build_vocab: empty corpus");
    if (target_size < Vocabulary::kReserved + 1)
        throw ValidationError("build_vocab: target_size must exceed the reserved token count");
    std::unordered_map<std::string, std::pair<std::int64_t, std::int64_t>> stats;  // token -> (count, first pos)
    std::int64_t pos = 0;
    for (const auto& text : corpus)
        for (const auto& piece : word_tokenize(text)) {
            auto it = stats.find(piece.text);
            if (it == stats.end())
                stats.emplace(piece.text, std::make_pair(std::int64_t(1), pos));
            else
                it->second.first++;
            ++pos;
        }
    std::vector<std::pair<std::string, std::pair<std::int64_t, std::int64_t>>> ranked(stats.begin(), stats.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.second.second < b.second.second;
    });
    Vocabulary v;
    for (const auto& [tok, _] : ranked) {
        if (v.size() >= target_size) break;
        v.add(tok);
    }
    return v;
}

inline Vocabulary build_vocab(const std::vector<RenderedSentence>& corpus, std::int32_t target_size) {
    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& s : corpus) texts.push_back(s.text);
    return build_vocab(texts, target_size);
}

struct TokenSpan {
    std::string category;
    int begin = 0;  // token indices into ids, [begin, end)
    int end = 0;
};

struct TokenSequence {
    std::vector<std::int32_t> ids;  // fixed max_len, padded with kPad
    int true_len = 0;               // positions [0, true_len) are SOS..EOS
    std::vector<TokenSpan> spans;   // attribute spans, strictly inside SOS/EOS
};

struct EncodeStats {
    std::int64_t truncated_sentences = 0;
    std::int64_t dropped_spans = 0;
};

inline TokenSequence encode(const RenderedSentence& sentence, const Vocabulary& vocab, int max_len = 77,
                            EncodeStats* stats = nullptr) {
    if (sentence.text.empty()) throw ValidationError("encode: empty sentence");
    auto pieces = word_tokenize(sentence.text);

    TokenSequence seq;
    seq.ids.assign(std::size_t(max_len), Vocabulary::kPad);
    const int body_cap = max_len - 2;
    const int body = std::min<int>(int(pieces.size()), body_cap);
    if (int(pieces.size()) > body_cap && stats) stats->truncated_sentences++;

    seq.ids[0] = Vocabulary::kSos;
    for (int t = 0; t < body; ++t) seq.ids[std::size_t(t) + 1] = vocab.id_of(pieces[std::size_t(t)].text);
    seq.ids[std::size_t(body) + 1] = Vocabulary::kEos;
    seq.true_len = body + 2;

    for (const auto& span : sentence.spans) {
        int tb = -1, te = -1;
        bool clipped = false;  // span tokens falling past the truncation cut
        for (int t = 0; t < int(pieces.size()); ++t) {
            const auto& p = pieces[std::size_t(t)];
            if (p.char_end <= span.begin || p.char_begin >= span.end) continue;  // no overlap
            if (t >= body) {
                clipped = true;
                continue;
            }
            if (tb < 0) tb = t;
            te = t + 1;
        }
        if (tb < 0 || clipped) {
            if (stats) stats->dropped_spans++;
            continue;
        }
        seq.spans.push_back({span.category, tb + 1, te + 1});  // +1 for SOS
    }
    return seq;
}

inline std::vector<std::string> decode(const std::vector<std::int32_t>& ids, const Vocabulary& vocab,
                                       bool skip_special = true) {
    std::vector<std::string> out;
    for (auto id : ids) {
        if (id < 0 || id >= vocab.size()) throw ValidationError("decode: id out of range");
        if (skip_special && id < Vocabulary::kReserved) continue;
        out.push_back(vocab.tokens[std::size_t(id)]);
    }
    return out;
}

struct MaskedSequence {
    static constexpr std::int32_t kIgnore = -1;
    std::vector<std::int32_t> ids;     // with substitutions applied
    std::vector<std::int32_t> labels;  // original id at masked positions, kIgnore elsewhere
    std::vector<int> positions;        // the set F, ascending
};

/// Span-level masking: each attribute span is independently selected with
/// probability `rate`; a selected span becomes [MASK] with probability
/// `mask_frac` (all of its tokens at once) and otherwise stays unchanged.
/// Both branches label every token of the span with its original id. When
/// the draw selects nothing, one span is force-selected so each sample
/// contributes at least one prediction target.
inline MaskedSequence mask_attributes(const TokenSequence& seq, double rate, double mask_frac, Rng& rng) {
    if (seq.spans.empty()) throw ValidationError("mask_attributes: sequence has no attribute spans");
    MaskedSequence m;
    m.ids = seq.ids;
    m.labels.assign(seq.ids.size(), MaskedSequence::kIgnore);

    std::vector<std::size_t> selected;
    for (std::size_t s = 0; s < seq.spans.size(); ++s)
        if (rng.uniform() < rate) selected.push_back(s);
    if (selected.empty())
        selected.push_back(std::size_t(rng.uniform_int(0, std::int64_t(seq.spans.size()) - 1)));

    for (std::size_t s : selected) {
        const auto& span = seq.spans[s];
        const bool replace = rng.uniform() < mask_frac;
        for (int t = span.begin; t < span.end; ++t) {
            m.labels[std::size_t(t)] = seq.ids[std::size_t(t)];
            if (replace) m.ids[std::size_t(t)] = Vocabulary::kMask;
            m.positions.push_back(t);
        }
    }
    std::sort(m.positions.begin(), m.positions.end());
    m.positions.erase(std::unique(m.positions.begin(), m.positions.end()), m.positions.end());
    return m;
}

/// Token-level masking over every non-special position (the MLM ablation):
/// same selection rate and 90/10 split, but any word token qualifies.
inline MaskedSequence mask_tokens(const TokenSequence& seq, double rate, double mask_frac, Rng& rng) {
    MaskedSequence m;
    m.ids = seq.ids;
    m.labels.assign(seq.ids.size(), MaskedSequence::kIgnore);
    std::vector<int> candidates;
    for (int t = 1; t < seq.true_len - 1; ++t) candidates.push_back(t);
    if (candidates.empty()) throw ValidationError("mask_tokens: sequence has no maskable tokens");

    std::vector<int> selected;
    for (int t : candidates)
        if (rng.uniform() < rate) selected.push_back(t);
    if (selected.empty())
        selected.push_back(candidates[std::size_t(rng.uniform_int(0, std::int64_t(candidates.size()) - 1))]);

    for (int t : selected) {
        m.labels[std::size_t(t)] = seq.ids[std::size_t(t)];
        if (rng.uniform() < mask_frac) m.ids[std::size_t(t)] = Vocabulary::kMask;
        m.positions.push_back(t);
    }
    return m;
}

}  // namespace aima

#include <gtest/gtest.h>

#include <set>

#include "aima/data/tokenizer.hpp"
#include "../test_util.hpp"

using namespace aima;

namespace {

Vocabulary toy_vocab() {
    Vocabulary v;
    for (const auto& t : {"a", "woman", ".", "man", "hat", "red", "blue"}) v.add(t);
    return v;
}

RenderedSentence sentence_with_spans(const std::string& text, std::vector<SpanInfo> spans) {
    RenderedSentence s;
    s.text = text;
    s.spans = std::move(spans);
    return s;
}

}  // namespace

TEST(BuildVocab, SingleSentenceEnumeratesExactly) {
    auto v = build_vocab(std::vector<std::string>{"a woman ."}, 64);
    EXPECT_EQ(v.size(), Vocabulary::kReserved + 3);
    EXPECT_TRUE(v.contains("a"));
    EXPECT_TRUE(v.contains("woman"));
    EXPECT_TRUE(v.contains("."));
}

TEST(BuildVocab, TruncationSendsRareTokensToUnk) {
    auto v = build_vocab(std::vector<std::string>{"x x y"}, Vocabulary::kReserved + 1);
    EXPECT_EQ(v.size(), Vocabulary::kReserved + 1);
    EXPECT_EQ(v.id_of("x"), Vocabulary::kReserved);
    EXPECT_EQ(v.id_of("y"), Vocabulary::kUnk);
}

TEST(BuildVocab, EmptyCorpusRejected) {
    EXPECT_THROW(build_vocab(std::vector<std::string>{}, 64), ValidationError);
}

TEST(BuildVocab, DeterministicGivenCorpusOrder) {
    std::vector<std::string> corpus = {"b a", "c a b", "d"};
    auto v1 = build_vocab(corpus, 64);
    auto v2 = build_vocab(corpus, 64);
    EXPECT_EQ(v1.tokens, v2.tokens);
    // Frequency rank first, then first appearance.
    EXPECT_LT(v1.id_of("a"), v1.id_of("c"));
    EXPECT_LT(v1.id_of("b"), v1.id_of("c"));
}

TEST(Vocabulary, SaveLoadRoundTripKeepsReservedIds) {
    auto v = toy_vocab();
    auto dir = aima_test::tmp_dir("vocab");
    v.save(dir / "vocab.txt");
    auto w = Vocabulary::load(dir / "vocab.txt");
    EXPECT_EQ(w.tokens, v.tokens);
    EXPECT_EQ(w.id_of("[MASK]"), Vocabulary::kMask);
    EXPECT_EQ(w.id_of("woman"), v.id_of("woman"));
}

TEST(Encode, DirectMapping) {
    auto seq = encode(sentence_with_spans("a woman .", {{"Gender", "woman", 2, 7}}), toy_vocab(), 16);
    EXPECT_EQ(seq.true_len, 5);
    EXPECT_EQ(seq.ids[0], Vocabulary::kSos);
    EXPECT_EQ(seq.ids[1], toy_vocab().id_of("a"));
    EXPECT_EQ(seq.ids[2], toy_vocab().id_of("woman"));
    EXPECT_EQ(seq.ids[3], toy_vocab().id_of("."));
    EXPECT_EQ(seq.ids[4], Vocabulary::kEos);
    for (std::size_t i = 5; i < seq.ids.size(); ++i) EXPECT_EQ(seq.ids[i], Vocabulary::kPad);
    ASSERT_EQ(seq.spans.size(), 1u);
    EXPECT_EQ(seq.spans[0].begin, 2);
    EXPECT_EQ(seq.spans[0].end, 3);
}

TEST(Encode, BoundaryLengthNoTruncation) {
    const int max_len = 8;
    EncodeStats stats;
    auto seq = encode(sentence_with_spans("a a a a a a", {}), toy_vocab(), max_len, &stats);
    EXPECT_EQ(seq.true_len, max_len);
    EXPECT_EQ(seq.ids[max_len - 1], Vocabulary::kEos);
    EXPECT_EQ(stats.truncated_sentences, 0);
}

TEST(Encode, TruncationDropsSpansPastTheCut) {
    const int max_len = 6;
    EncodeStats stats;
    auto s = sentence_with_spans("a a a a woman hat", {{"Gender", "woman", 8, 13}, {"Hat", "hat", 14, 17}});
    auto seq = encode(s, toy_vocab(), max_len, &stats);
    EXPECT_EQ(seq.true_len, max_len);
    EXPECT_EQ(stats.truncated_sentences, 1);
    EXPECT_EQ(stats.dropped_spans, 2);
    EXPECT_TRUE(seq.spans.empty());
}

TEST(Encode, RoundTripThroughDecode) {
    auto vocab = toy_vocab();
    auto seq = encode(sentence_with_spans("a red hat . a blue woman .", {}), vocab, 32);
    auto words = decode(seq.ids, vocab);
    std::vector<std::string> expect = {"a", "red", "hat", ".", "a", "blue", "woman", "."};
    EXPECT_EQ(words, expect);
}

TEST(Encode, EmptySentenceRejected) {
    EXPECT_THROW(encode(sentence_with_spans("", {}), toy_vocab(), 8), ValidationError);
}

TEST(MaskAttributes, DegenerateRateMasksEverySpan) {
    auto vocab = toy_vocab();
    auto seq = encode(sentence_with_spans("a woman . a hat .", {{"Gender", "woman", 2, 7}, {"Hat", "hat", 12, 15}}),
                      vocab, 16);
    Rng rng(0);
    auto m = mask_attributes(seq, 1.0, 1.0, rng);
    ASSERT_EQ(m.positions.size(), 2u);
    for (int pos : m.positions) {
        EXPECT_EQ(m.ids[std::size_t(pos)], Vocabulary::kMask);
        EXPECT_EQ(m.labels[std::size_t(pos)], seq.ids[std::size_t(pos)]);
    }
}

TEST(MaskAttributes, ZeroRateForcesExactlyOneSpan) {
    auto vocab = toy_vocab();
    auto seq = encode(sentence_with_spans("a woman . a hat .", {{"Gender", "woman", 2, 7}, {"Hat", "hat", 12, 15}}),
                      vocab, 16);
    Rng rng(123);
    auto m = mask_attributes(seq, 0.0, 0.9, rng);
    EXPECT_EQ(m.positions.size(), 1u);
    int labeled = 0;
    for (auto l : m.labels)
        if (l != MaskedSequence::kIgnore) ++labeled;
    EXPECT_EQ(labeled, 1);
}

TEST(MaskAttributes, PositionsOutsideSpansNeverAltered) {
    auto vocab = toy_vocab();
    auto seq = encode(sentence_with_spans("a woman . a hat .", {{"Gender", "woman", 2, 7}, {"Hat", "hat", 12, 15}}),
                      vocab, 16);
    std::set<int> span_positions;
    for (const auto& sp : seq.spans)
        for (int t = sp.begin; t < sp.end; ++t) span_positions.insert(t);
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        Rng rng(trial);
        auto m = mask_attributes(seq, 0.5, 0.9, rng);
        for (std::size_t t = 0; t < seq.ids.size(); ++t) {
            if (!span_positions.count(int(t))) {
                EXPECT_EQ(m.ids[t], seq.ids[t]);
                EXPECT_EQ(m.labels[t], MaskedSequence::kIgnore);
            }
        }
        for (int pos : m.positions) EXPECT_TRUE(span_positions.count(pos));
    }
}

TEST(MaskAttributes, MultiTokenSpanMaskedAtomically) {
    Vocabulary v;
    for (const auto& t : {"she", "carries", "a", "shoulder", "bag", "."}) v.add(t);
    auto s = sentence_with_spans("she carries a shoulder bag .", {{"Bag", "shoulder bag", 14, 26}});
    auto seq = encode(s, v, 16);
    ASSERT_EQ(seq.spans.size(), 1u);
    EXPECT_EQ(seq.spans[0].end - seq.spans[0].begin, 2);
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng(trial);
        auto m = mask_attributes(seq, 1.0, 0.5, rng);
        bool first_masked = m.ids[std::size_t(seq.spans[0].begin)] == Vocabulary::kMask;
        bool second_masked = m.ids[std::size_t(seq.spans[0].begin) + 1] == Vocabulary::kMask;
        EXPECT_EQ(first_masked, second_masked);  // all-or-nothing within a span
        EXPECT_EQ(m.labels[std::size_t(seq.spans[0].begin)], seq.ids[std::size_t(seq.spans[0].begin)]);
    }
}

TEST(MaskAttributes, DeterministicUnderSeed) {
    auto vocab = toy_vocab();
    auto seq = encode(sentence_with_spans("a woman . a hat .", {{"Gender", "woman", 2, 7}, {"Hat", "hat", 12, 15}}),
                      vocab, 16);
    Rng r1(42), r2(42);
    auto m1 = mask_attributes(seq, 0.15, 0.9, r1);
    auto m2 = mask_attributes(seq, 0.15, 0.9, r2);
    EXPECT_EQ(m1.ids, m2.ids);
    EXPECT_EQ(m1.labels, m2.labels);
    EXPECT_EQ(m1.positions, m2.positions);
}

TEST(MaskAttributes, NoSpansRejected) {
    auto seq = encode(sentence_with_spans("a a a", {}), toy_vocab(), 8);
    Rng rng(0);
    EXPECT_THROW(mask_attributes(seq, 0.15, 0.9, rng), ValidationError);
}

TEST(MaskTokens, MlmMasksAnyWordToken) {
    auto vocab = toy_vocab();
    auto seq = encode(sentence_with_spans("a woman . a hat .", {}), vocab, 16);
    Rng rng(5);
    auto m = mask_tokens(seq, 1.0, 1.0, rng);
    EXPECT_EQ(int(m.positions.size()), seq.true_len - 2);
    for (int pos : m.positions) EXPECT_EQ(m.ids[std::size_t(pos)], Vocabulary::kMask);
    EXPECT_EQ(m.ids[0], Vocabulary::kSos);
    EXPECT_EQ(m.ids[std::size_t(seq.true_len) - 1], Vocabulary::kEos);
}

TEST(MaskTokens, ForcedFloorWhenNothingSelected) {
    auto seq = encode(sentence_with_spans("a woman .", {}), toy_vocab(), 8);
    Rng rng(9);
    auto m = mask_tokens(seq, 0.0, 0.9, rng);
    EXPECT_EQ(m.positions.size(), 1u);
}

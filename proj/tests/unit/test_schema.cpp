#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "aima/data/schema.hpp"
#include "../test_util.hpp"

using namespace aima;

namespace {

// Independent brute-force oracle: dedupe two word lists and count common /
// total elements by nested scans.
double iou_oracle(std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    if (a.empty() && b.empty()) return 0.0;
    int common = 0;
    for (const auto& x : a)
        for (const auto& y : b)
            if (x == y) ++common;
    int total = int(a.size()) + int(b.size()) - common;
    return double(common) / double(total);
}

AttributeSet make_set(std::initializer_list<std::string> words) {
    AttributeSet s;
    for (const auto& w : words) s.words.insert(w);
    return s;
}

}  // namespace

TEST(Schema, LoadsBundledMarket1501) {
    auto schema = load_schema(aima_test::asset("schemas/market1501.json"));
    EXPECT_EQ(schema.name, "market1501");
    EXPECT_EQ(schema.categories.size(), 10u);
    EXPECT_NE(schema.find("Gender"), nullptr);
    EXPECT_TRUE(schema.has_value("Age", "young"));
}

TEST(Schema, LoadsBundledPetaAndPa100k) {
    auto peta = load_schema(aima_test::asset("schemas/peta.json"));
    EXPECT_EQ(peta.categories.size(), 17u);
    EXPECT_TRUE(peta.find("Carrying")->multi);
    auto pa = load_schema(aima_test::asset("schemas/pa100k.json"));
    EXPECT_EQ(pa.categories.size(), 11u);
}

TEST(Schema, SingletonSchemaIsValid) {
    AttributeSchema s;
    s.name = "singleton";
    s.categories.push_back({"Only", {"one"}, false});
    EXPECT_NO_THROW(s.validate());
}

TEST(Schema, DuplicateCategoryNamesTheOffender) {
    AttributeSchema s;
    s.name = "bad";
    s.categories.push_back({"Age", {"young"}, false});
    s.categories.push_back({"Age", {"old"}, false});
    try {
        s.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("Age"), std::string::npos);
    }
}

TEST(Schema, EmptyValueListRejected) {
    AttributeSchema s;
    s.name = "bad";
    s.categories.push_back({"Age", {}, false});
    EXPECT_THROW(s.validate(), ValidationError);
}

TEST(AttributeIou, IdentityCaseIsOne) {
    auto a = make_set({"woman", "adult", "bag"});
    EXPECT_DOUBLE_EQ(attribute_iou(a, a), 1.0);
}

TEST(AttributeIou, DisjointIsZero) {
    EXPECT_DOUBLE_EQ(attribute_iou(make_set({"woman"}), make_set({"man"})), 0.0);
}

TEST(AttributeIou, PaperStyleExample) {
    // {woman, adult, bag, shorts} vs {woman, adult, hat, shorts}: 3 common,
    // 5 in the union. Expected value frozen from the brute-force oracle.
    std::vector<std::string> a = {"woman", "adult", "bag", "shorts"};
    std::vector<std::string> b = {"woman", "adult", "hat", "shorts"};
    ASSERT_DOUBLE_EQ(iou_oracle(a, b), 0.6);
    EXPECT_DOUBLE_EQ(attribute_iou(make_set({"woman", "adult", "bag", "shorts"}),
                                   make_set({"woman", "adult", "hat", "shorts"})),
                     0.6);
}

TEST(AttributeIou, BothEmptyDefinedAsZero) {
    EXPECT_DOUBLE_EQ(attribute_iou(AttributeSet{}, AttributeSet{}), 0.0);
}

TEST(AttributeIou, SymmetryAndRangeOnRandomSets) {
    std::mt19937_64 gen(7);
    const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g", "h"};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::string> wa, wb;
        for (const auto& w : pool) {
            if (gen() % 2) wa.push_back(w);
            if (gen() % 2) wb.push_back(w);
        }
        AttributeSet a, b;
        a.words.insert(wa.begin(), wa.end());
        b.words.insert(wb.begin(), wb.end());
        double ab = attribute_iou(a, b), ba = attribute_iou(b, a);
        EXPECT_DOUBLE_EQ(ab, ba);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_DOUBLE_EQ(ab, iou_oracle(wa, wb));
        if (!a.empty() || !b.empty()) {
            EXPECT_EQ(ab == 1.0, a.words == b.words && !a.empty());
            bool disjoint = true;
            for (const auto& w : a.words)
                if (b.words.count(w)) disjoint = false;
            EXPECT_EQ(ab == 0.0, disjoint);
        }
    }
}

TEST(AttributeIou, DuplicateAndOrderInvariance) {
    AttributeRecord r1, r2;
    r1.identity = r2.identity = 0;
    r1.attrs["A"] = {"x"};
    r1.attrs["B"] = {"y"};
    r2.attrs["B"] = {"y"};
    r2.attrs["A"] = {"x"};
    r2.attrs["C"] = {"X"};  // lower-cases to the same word as A's value
    auto s1 = AttributeSet::from_record(r1);
    auto s2 = AttributeSet::from_record(r2);
    EXPECT_EQ(s2.size(), 2u);
    EXPECT_DOUBLE_EQ(attribute_iou(s1, s2), 1.0);
}

TEST(IouMatrix, SingletonBatch) {
    auto m = iou_matrix({make_set({"w"})});
    ASSERT_EQ(m.rows(), 1);
    EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
}

TEST(IouMatrix, TwoDisjointSets) {
    auto m = iou_matrix({make_set({"a"}), make_set({"b"})});
    EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(m(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(m(1, 1), 1.0);
}

TEST(IouMatrix, MatchesPairwiseOracleOnRandomBatch) {
    std::mt19937_64 gen(13);
    const std::vector<std::string> pool = {"p", "q", "r", "s", "t", "u"};
    std::vector<AttributeSet> batch;
    std::vector<std::vector<std::string>> raw;
    for (int i = 0; i < 8; ++i) {
        std::vector<std::string> w;
        for (const auto& x : pool)
            if (gen() % 2) w.push_back(x);
        if (w.empty()) w.push_back(pool[gen() % pool.size()]);
        AttributeSet s;
        s.words.insert(w.begin(), w.end());
        batch.push_back(s);
        raw.push_back(w);
    }
    auto m = iou_matrix(batch);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) EXPECT_DOUBLE_EQ(m(i, j), iou_oracle(raw[std::size_t(i)], raw[std::size_t(j)]));
}

TEST(ValidateRecord, ValidRecordReturnedUnchanged) {
    auto schema = load_schema(aima_test::asset("schemas/market1501.json"));
    AttributeRecord rec;
    rec.identity = 3;
    rec.attrs["Age"] = {"young"};
    rec.attrs["Gender"] = {"woman"};
    const auto& out = validate_record(rec, schema);
    EXPECT_EQ(&out, &rec);
}

TEST(ValidateRecord, ValueOutsideAllowedListNamed) {
    auto schema = load_schema(aima_test::asset("schemas/market1501.json"));
    AttributeRecord rec;
    rec.identity = 0;
    rec.attrs["Upper color"] = {"magenta"};
    try {
        validate_record(rec, schema);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("magenta"), std::string::npos);
        EXPECT_NE(msg.find("Upper color"), std::string::npos);
    }
}

TEST(ValidateRecord, MultiValueOnSingleValuedCategory) {
    auto schema = load_schema(aima_test::asset("schemas/market1501.json"));
    AttributeRecord rec;
    rec.identity = 0;
    rec.attrs["Gender"] = {"woman", "man"};
    try {
        validate_record(rec, schema);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("Gender"), std::string::npos);
    }
}

TEST(ValidateRecord, UnknownCategoryNamed) {
    auto schema = load_schema(aima_test::asset("schemas/market1501.json"));
    AttributeRecord rec;
    rec.identity = 0;
    rec.attrs["Shoes"] = {"red"};
    try {
        validate_record(rec, schema);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("Shoes"), std::string::npos);
    }
}

#include <orderbench/codec.hpp>
#include <orderbench/error.hpp>

#include <gtest/gtest.h>

#include <regex>
#include <set>

namespace orderbench {
namespace {

ShuffledInstance three_sentences()
{
    // S' = [B, A, C] for gold [A, B, C]: Y* = [2, 1, 3].
    return ShuffledInstance::make({"abc", {"A went out.", "B came back.", "C slept."}}, Permutation({2, 1, 3}));
}

TEST(EncodeInput, SequentialLayout)
{
    const auto inst = three_sentences();
    const auto input = encode_input(inst, MarkerMode::sequential());
    EXPECT_EQ(input.text, "[shuffled] <S1> B came back. <S2> A went out. <S3> C slept. [orig]");
    EXPECT_EQ(input.marker_of_slot, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(gold_marker_text(inst, input), "2 1 3");
}

TEST(EncodeInput, NoMarkers)
{
    const auto input = encode_input(three_sentences(), MarkerMode::none());
    EXPECT_EQ(input.text, "[shuffled] B came back. A went out. C slept. [orig]");
    EXPECT_FALSE(input.has_markers);
}

TEST(EncodeInput, RandomMarkersDistinctAndSeeded)
{
    const auto inst = three_sentences();
    const auto a = encode_input(inst, MarkerMode::random(5));
    const auto b = encode_input(inst, MarkerMode::random(5));
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.marker_of_slot, b.marker_of_slot);
    const std::set<int> distinct(a.marker_of_slot.begin(), a.marker_of_slot.end());
    EXPECT_EQ(distinct.size(), 3u);
    for (int m : a.marker_of_slot) {
        EXPECT_GE(m, 0);
        EXPECT_LE(m, 100);
    }
    const std::regex shape(R"(\[shuffled\] <S\d{1,3}> B came back\. <S\d{1,3}> A went out\. <S\d{1,3}> C slept\. \[orig\])");
    EXPECT_TRUE(std::regex_match(a.text, shape)) << a.text;

    // Different instance ids draw different label sets (with overwhelming probability).
    auto other = inst;
    other.id = "another";
    EXPECT_NE(encode_input(other, MarkerMode::random(5)).marker_of_slot, a.marker_of_slot);
}

TEST(EncodeInput, RandomMarkersLimit)
{
    Document doc{"big", {}};
    for (int i = 0; i < 102; ++i) {
        doc.sentences.push_back("s" + std::to_string(i));
    }
    const auto big = ShuffledInstance::make(doc, Permutation::identity(102));
    EXPECT_THROW(encode_input(big, MarkerMode::random(1)), UsageError);
    doc.sentences.pop_back();
    const auto fits = ShuffledInstance::make(doc, Permutation::identity(101));
    const auto input = encode_input(fits, MarkerMode::random(1));
    EXPECT_EQ(std::set<int>(input.marker_of_slot.begin(), input.marker_of_slot.end()).size(), 101u);
}

TEST(EncodeInput, LoadedDocument)
{
    const auto corpus = load_corpus(std::string(ORDER_BENCH_TEST_DATA) + "/three_sentences.jsonl", "three");
    ASSERT_EQ(corpus.size(), 1u);
    const auto inst = ShuffledInstance::make(corpus.documents[0], Permutation({3, 1, 2}), "store-trip");
    const auto input = encode_input(inst, MarkerMode::sequential());
    EXPECT_EQ(input.text, "[shuffled] <S1> She bought some milk. <S2> Then she walked home. <S3> She went to the store. [orig]");
    EXPECT_EQ(gold_marker_text(inst, input), "3 1 2");
    EXPECT_EQ(reconstruct(inst, decode_output("3 1 2", input).y), corpus.documents[0].sentences);
}

TEST(ParseOutput, Examples)
{
    EXPECT_EQ(parse_output("2 1 3").tokens, (std::vector<std::int64_t>{2, 1, 3}));
    EXPECT_EQ(parse_output("2, 1, 3.").tokens, (std::vector<std::int64_t>{2, 1, 3}));
    EXPECT_EQ(parse_output("order: 2 2 9").tokens, (std::vector<std::int64_t>{2, 2, 9}));
    EXPECT_EQ(parse_output("<S47><S3>").tokens, (std::vector<std::int64_t>{47, 3}));
    EXPECT_TRUE(parse_output("").tokens.empty());
    EXPECT_TRUE(parse_output("none").tokens.empty());
    EXPECT_EQ(parse_output("99999999999999999999999").tokens.front(), std::numeric_limits<std::int64_t>::max());
}

TEST(Repair, Examples)
{
    EXPECT_EQ(repair({{2, 1, 3}}, 3), Permutation({2, 1, 3}));
    EXPECT_EQ(repair({{2, 2, 9}}, 3), Permutation({2, 1, 3}));
    EXPECT_EQ(repair({{}}, 3), Permutation({1, 2, 3}));
    EXPECT_EQ(repair({{3, 0, -4, 3, 1, 2, 5}}, 3), Permutation({3, 1, 2}));
    EXPECT_EQ(repair({{1, 2, 3, 4}}, 2), Permutation({1, 2}));
    EXPECT_THROW(repair({{1}}, 0), UsageError);
}

TEST(Repair, TotalAndIdempotentOnAdversarialInput)
{
    Rng rng(31337);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.below(20);
        RawPrediction raw;
        const std::size_t len = rng.below(3 * n + 2);
        for (std::size_t k = 0; k < len; ++k) {
            switch (rng.below(4)) {
            case 0:
                raw.tokens.push_back(static_cast<std::int64_t>(rng.below(n + 3)) - 1);
                break;
            case 1:
                raw.tokens.push_back(-static_cast<std::int64_t>(rng.next() >> 2));
                break;
            case 2:
                raw.tokens.push_back(static_cast<std::int64_t>(rng.next() >> 1));
                break;
            default:
                raw.tokens.push_back(1 + static_cast<std::int64_t>(rng.below(n)));
                break;
            }
        }
        const auto fixed = repair(raw, n);
        ASSERT_EQ(fixed.size(), n);
        ASSERT_TRUE(Permutation::is_valid(fixed.values()));
        const RawPrediction again{{fixed.values().begin(), fixed.values().end()}};
        ASSERT_EQ(repair(again, n), fixed);
        ASSERT_TRUE(is_valid_prediction(again, n));
    }
}

TEST(Reconstruct, Examples)
{
    const auto inst = ShuffledInstance::make({"d", {"A", "B", "C"}}, Permutation({2, 1, 3}));
    ASSERT_EQ(inst.shuffled, (std::vector<std::string>{"B", "A", "C"}));
    EXPECT_EQ(reconstruct(inst, Permutation({2, 1, 3})), (std::vector<std::string>{"A", "B", "C"}));
    EXPECT_EQ(reconstruct(inst, inst.gold), inst.doc.sentences);
    EXPECT_EQ(reconstruct(inst, Permutation({3, 2, 1})), (std::vector<std::string>{"C", "A", "B"}));
    EXPECT_THROW(reconstruct(inst, Permutation::identity(2)), DataError);
}

TEST(Codec, GoldRoundTripAllModes)
{
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(20);
        Document doc{"doc-" + std::to_string(trial), {}};
        for (std::size_t i = 0; i < n; ++i) {
            doc.sentences.push_back("Sentence " + std::to_string(rng.below(1000)) + " number " + std::to_string(i) + ".");
        }
        const auto inst = shuffle_document(doc, rng.next());
        for (const auto& mode : {MarkerMode::sequential(), MarkerMode::random(rng.next()), MarkerMode::none()}) {
            const auto input = encode_input(inst, mode);
            const auto decoded = decode_output(gold_marker_text(inst, input), input);
            EXPECT_FALSE(decoded.repaired);
            EXPECT_EQ(decoded.y, inst.gold);
            EXPECT_EQ(reconstruct(inst, decoded.y), doc.sentences);
            if (mode.kind != MarkerMode::Kind::none) {
                std::size_t occurrences = 0;
                for (int label : input.marker_of_slot) {
                    const std::string tok = "<S" + std::to_string(label) + ">";
                    for (auto pos = input.text.find(tok); pos != std::string::npos; pos = input.text.find(tok, pos + 1)) {
                        ++occurrences;
                    }
                }
                EXPECT_EQ(occurrences, n);
            }
        }
    }
}

TEST(LabelsToSlots, UnknownLabelsBecomeZero)
{
    const std::vector<int> labels{47, 78, 3};
    EXPECT_EQ(labels_to_slots({{78, 3, 47, 5}}, labels).tokens, (std::vector<std::int64_t>{2, 3, 1, 0}));
    MarkedInput input;
    input.marker_of_slot = labels;
    const auto decoded = decode_output("9 9", input);
    EXPECT_TRUE(decoded.repaired);
    EXPECT_EQ(decoded.y, Permutation({1, 2, 3}));
}

} // namespace
} // namespace orderbench

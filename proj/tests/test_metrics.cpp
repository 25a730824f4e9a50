#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cstool/errors.hpp"
#include "cstool/metrics.hpp"
#include "cstool/rng.hpp"
#include "cstool/text.hpp"

using namespace cst;

namespace {

// Brute-force minimal edit count by recursion; exponential, fine for <= 8 words.
uint64_t brute_edits(const std::vector<std::string>& ref, const std::vector<std::string>& hyp,
                     size_t i, size_t j) {
    if (i == ref.size()) return hyp.size() - j;
    if (j == hyp.size()) return ref.size() - i;
    uint64_t best = brute_edits(ref, hyp, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
    best = std::min(best, brute_edits(ref, hyp, i + 1, j) + 1);
    best = std::min(best, brute_edits(ref, hyp, i, j + 1) + 1);
    return best;
}

std::string join(const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
        if (!s.empty()) s += ' ';
        s += w;
    }
    return s;
}

}  // namespace

TEST_CASE("wer basics") {
    WerBreakdown b = wer("a b c", "a b c");
    CHECK(b.wer == 0.0);
    CHECK(b.edits() == 0);
    CHECK(b.ref_words == 3);

    b = wer("a b c", "a x c");
    CHECK(b.substitutions == 1);
    CHECK(b.insertions == 0);
    CHECK(b.deletions == 0);
    CHECK(b.wer == doctest::Approx(1.0 / 3.0));

    b = wer("a b", "a b c");
    CHECK(b.insertions == 1);

    b = wer("a b c", "a c");
    CHECK(b.deletions == 1);

    // both empty is fine; empty ref with non-empty hyp is not
    CHECK(wer("", "").wer == 0.0);
    CHECK_THROWS_AS(wer("", "a"), empty_reference);
}

TEST_CASE("wer matches brute-force minimal edits on random pairs") {
    const std::vector<std::string> vocab = {"uno", "dos", "tres", "cat", "dog"};
    Rng rng(314);
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<std::string> ref(1 + rng.next_below(8)), hyp(rng.next_below(9));
        for (auto& w : ref) w = vocab[rng.next_below(vocab.size())];
        for (auto& w : hyp) w = vocab[rng.next_below(vocab.size())];

        WerBreakdown b = wer(join(ref), join(hyp));
        CHECK(b.edits() == brute_edits(ref, hyp, 0, 0));
        CHECK(b.substitutions + b.deletions <= b.ref_words);
    }
}

TEST_CASE("wer is edit-symmetric: S symmetric, I(a,b) = D(b,a)") {
    const std::vector<std::string> vocab = {"x", "y", "z"};
    Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> a(1 + rng.next_below(6)), b(1 + rng.next_below(6));
        for (auto& w : a) w = vocab[rng.next_below(vocab.size())];
        for (auto& w : b) w = vocab[rng.next_below(vocab.size())];
        WerBreakdown ab = wer(join(a), join(b));
        WerBreakdown ba = wer(join(b), join(a));
        CHECK(ab.substitutions == ba.substitutions);
        CHECK(ab.insertions == ba.deletions);
        CHECK(ab.deletions == ba.insertions);
    }
}

TEST_CASE("normalize option lowercases and strips punctuation") {
    CHECK(wer("Hello, world!", "hello world", {.normalize = true}).wer == 0.0);
    CHECK(wer("Hello, world!", "hello world").wer > 0.0);
}

TEST_CASE("corpus_wer micro-averages") {
    CHECK_THROWS_AS(corpus_wer({}), empty_input);

    WerBreakdown single = corpus_wer({{"a b c", "a x c"}});
    CHECK(single.wer == wer("a b c", "a x c").wer);

    // two equal-length pairs, wer 0 and 1 -> pooled 0.5
    WerBreakdown pooled = corpus_wer({{"a b", "a b"}, {"c d", "x y"}});
    CHECK(pooled.wer == doctest::Approx(0.5));

    // order invariance
    WerBreakdown rev = corpus_wer({{"c d", "x y"}, {"a b", "a b"}});
    CHECK(rev.wer == pooled.wer);
    CHECK(rev.edits() == pooled.edits());
}

TEST_CASE("micro-average lies within per-pair bounds for equal-length refs") {
    Rng rng(8);
    const std::vector<std::string> vocab = {"p", "q", "r"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, std::string>> pairs;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int k = 0; k < 4; ++k) {
            std::vector<std::string> ref(4), hyp(4);
            for (auto& w : ref) w = vocab[rng.next_below(3)];
            for (auto& w : hyp) w = vocab[rng.next_below(3)];
            pairs.emplace_back(join(ref), join(hyp));
            double w_ = wer(pairs.back().first, pairs.back().second).wer;
            lo = std::min(lo, w_);
            hi = std::max(hi, w_);
        }
        double pooled = corpus_wer(pairs).wer;
        CHECK(pooled >= lo - 1e-12);
        CHECK(pooled <= hi + 1e-12);
    }
}

TEST_CASE("cs_corpus_stats over a fixture manifest") {
    namespace fs = std::filesystem;
    fs::path p = fs::temp_directory_path() / "cstool_stats.jsonl";
    {
        std::ofstream out(p);
        out << R"({"audio_filepath":"cs_0.wav","duration":18.0,"text":"the cat hola","lang":"cs",)"
            << R"("segments":[{"lang":"en","text":"the cat","offset":0.0,"duration":9.0,"source":"a.wav"},)"
            << R"({"lang":"es","text":"hola","offset":9.0,"duration":9.0,"source":"b.wav"}]})" << "\n";
        out << R"({"audio_filepath":"cs_1.wav","duration":18.0,"text":"sat mat","lang":"cs",)"
            << R"("segments":[{"lang":"en","text":"sat mat","offset":0.0,"duration":18.0,"source":"c.wav"}]})" << "\n";
    }
    CorpusStats s = cs_corpus_stats(p);
    CHECK(s.utterances == 2);
    CHECK(s.total_hours == doctest::Approx(36.0 / 3600.0));
    // unique non-space characters of "the cat hola" + "sat mat"
    CHECK(s.unique_characters == 9);  // t h e c a o l s m
    CHECK(s.switches_histogram.at(1) == 1);
    CHECK(s.switches_histogram.at(0) == 1);
    CHECK(s.lang_share.at("en") == doctest::Approx(27.0 / 36.0));
    CHECK(s.lang_share.at("es") == doctest::Approx(9.0 / 36.0));

    // manifest without segments is malformed for stats
    fs::path q = fs::temp_directory_path() / "cstool_stats_bad.jsonl";
    {
        std::ofstream out(q);
        out << R"({"audio_filepath":"x.wav","duration":1.0,"text":"a","lang":"en"})" << "\n";
    }
    CHECK_THROWS_AS(cs_corpus_stats(q), malformed_line);
    fs::remove(p);
    fs::remove(q);
}

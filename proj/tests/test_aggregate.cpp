#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "cstool/aggregate.hpp"
#include "cstool/errors.hpp"
#include "cstool/rng.hpp"
#include "cstool/tokenizer.hpp"

using namespace cst;

namespace {

MonoTokenizer toy_tokenizer(const std::string& lang, const std::vector<std::string>& corpus,
                            uint32_t vocab) {
    return train_bpe(corpus, vocab, lang).tokenizer;
}

AggregateTokenizer en_es_fixture() {
    std::vector<std::pair<std::string, MonoTokenizer>> parts;
    parts.emplace_back("en", toy_tokenizer("en", {"the cat sat on the mat", "a cat and a bat"}, 32));
    parts.emplace_back("es", toy_tokenizer("es", {"hola que tal amigo", "la casa de la playa"}, 32));
    return AggregateTokenizer(std::move(parts));
}

}  // namespace

TEST_CASE("offsets are prefix sums and ranges partition the id space") {
    AggregateTokenizer agg = en_es_fixture();
    REQUIRE(agg.entries().size() == 2);
    CHECK(agg.entries()[0].offset == 0);
    CHECK(agg.entries()[1].offset == agg.entries()[0].tokenizer.vocab_size());
    CHECK(agg.total_vocab() ==
          agg.entries()[0].tokenizer.vocab_size() + agg.entries()[1].tokenizer.vocab_size());

    // exhaustive: each language owns exactly vocab_size ids
    std::map<std::string, uint32_t> seen;
    for (uint32_t g = 0; g < agg.total_vocab(); ++g) {
        auto [lang, local] = agg.to_local(g);
        CHECK(agg.to_global(lang, local) == g);
        ++seen[lang];
    }
    for (const auto& e : agg.entries()) CHECK(seen[e.language] == e.tokenizer.vocab_size());
}

TEST_CASE("partition holds for random part sizes and orders") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        size_t n_parts = 2 + rng.next_below(4);
        std::vector<std::pair<std::string, MonoTokenizer>> parts;
        std::vector<uint32_t> sizes;
        for (size_t i = 0; i < n_parts; ++i) {
            // vocab 2..5: <unk> plus 1..4 single-char pieces
            std::string chars = "wxyz";
            size_t n_chars = 1 + rng.next_below(4);
            std::vector<std::string> pieces = {"<unk>"};
            for (size_t c = 0; c < n_chars; ++c) pieces.push_back(std::string(1, chars[c]) + std::to_string(i));
            sizes.push_back(static_cast<uint32_t>(pieces.size()));
            parts.emplace_back("l" + std::to_string(i),
                               MonoTokenizer("l" + std::to_string(i), ModelKind::bpe, pieces, {}, {}));
        }
        AggregateTokenizer agg(std::move(parts));

        uint32_t expected_offset = 0;
        for (size_t i = 0; i < n_parts; ++i) {
            CHECK(agg.entries()[i].offset == expected_offset);
            expected_offset += sizes[i];
        }
        CHECK(agg.total_vocab() == expected_offset);
        std::map<std::string, uint32_t> seen;
        for (uint32_t g = 0; g < agg.total_vocab(); ++g) ++seen[agg.to_local(g).first];
        for (size_t i = 0; i < n_parts; ++i) CHECK(seen["l" + std::to_string(i)] == sizes[i]);
    }
}

TEST_CASE("build rejections") {
    auto tok = toy_tokenizer("en", {"a b a b"}, 8);
    std::vector<std::pair<std::string, MonoTokenizer>> dup = {{"en", tok}, {"en", tok}};
    CHECK_THROWS_AS(AggregateTokenizer(std::move(dup)), duplicate_language);

    std::vector<std::pair<std::string, MonoTokenizer>> one = {{"en", tok}};
    CHECK_THROWS_AS(AggregateTokenizer(std::move(one)), too_few_parts);
}

TEST_CASE("to_global/to_local bounds") {
    AggregateTokenizer agg = en_es_fixture();
    CHECK_THROWS_AS(agg.to_local(agg.total_vocab()), id_out_of_range);
    CHECK_THROWS_AS(agg.to_global("fr", 0), unknown_language);
    CHECK_THROWS_AS(agg.to_global("en", agg.entries()[0].tokenizer.vocab_size()),
                    id_out_of_range);
}

TEST_CASE("encode_tagged routes segments and never crosses ranges") {
    AggregateTokenizer agg = en_es_fixture();
    TaggedText tagged{{{"es", "hola amigo"}, {"en", "the cat"}}};
    auto tokens = agg.encode_tagged(tagged);
    REQUIRE(!tokens.empty());

    const auto& en = *agg.find("en");
    const auto& es = *agg.find("es");
    bool seen_en = false;
    for (const auto& t : tokens) {
        if (t.language == "es") {
            CHECK(!seen_en);  // segment order preserved
            CHECK(t.global_id >= es.offset);
            CHECK(t.global_id < es.offset + es.tokenizer.vocab_size());
        } else {
            seen_en = true;
            CHECK(t.global_id >= en.offset);
            CHECK(t.global_id < en.offset + en.tokenizer.vocab_size());
        }
        CHECK(t.global_id == agg.to_global(t.language, t.local_id));
    }
    CHECK(seen_en);

    CHECK(agg.encode_tagged(TaggedText{}).empty());
    TaggedText bad{{{"fr", "bonjour"}}};
    CHECK_THROWS_AS(agg.encode_tagged(bad), unknown_language);
}

TEST_CASE("decode round trip merges same-language runs") {
    AggregateTokenizer agg = en_es_fixture();
    TaggedText tagged{{{"es", "hola amigo"}, {"en", "the cat"}, {"es", "la casa"}}};
    auto tokens = agg.encode_tagged(tagged);
    std::vector<uint32_t> ids;
    for (const auto& t : tokens) ids.push_back(t.global_id);

    DecodedTokens dec = agg.decode_tokens(ids);
    REQUIRE(dec.text.segments.size() == 3);
    CHECK(dec.text == tagged);
    CHECK(dec.token_langs.size() == ids.size());

    // adjacent same-language segments merge on decode
    TaggedText doubled{{{"en", "the"}, {"en", "cat"}}};
    auto ids2_tok = agg.encode_tagged(doubled);
    std::vector<uint32_t> ids2;
    for (const auto& t : ids2_tok) ids2.push_back(t.global_id);
    DecodedTokens dec2 = agg.decode_tokens(ids2);
    REQUIRE(dec2.text.segments.size() == 1);
    CHECK(dec2.text.segments[0] == std::pair<std::string, std::string>("en", "the cat"));
}

TEST_CASE("alternating single tokens yield one segment per token") {
    AggregateTokenizer agg = en_es_fixture();
    // pick one whole-word-ish id from each side
    uint32_t en_id = agg.to_global("en", agg.find("en")->tokenizer.encode("cat").front());
    uint32_t es_id = agg.to_global("es", agg.find("es")->tokenizer.encode("hola").front());
    std::vector<uint32_t> ids = {en_id, es_id, en_id, es_id};
    DecodedTokens dec = agg.decode_tokens(ids);
    CHECK(dec.text.segments.size() == ids.size());
}

TEST_CASE("decode rejects out-of-range ids") {
    AggregateTokenizer agg = en_es_fixture();
    CHECK_THROWS_AS(agg.decode_tokens({agg.total_vocab()}), id_out_of_range);
    CHECK(agg.decode_tokens({}).text.segments.empty());
}

TEST_CASE("aggregate save/load with hash verification") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cstool_agg_test";
    fs::create_directories(dir);

    auto en = toy_tokenizer("en", {"the cat sat"}, 16);
    auto es = toy_tokenizer("es", {"hola que tal"}, 16);
    save_model(en, dir / "en.json");
    save_model(es, dir / "es.json");

    std::vector<std::pair<std::string, MonoTokenizer>> parts = {{"en", en}, {"es", es}};
    AggregateTokenizer agg(std::move(parts));
    save_aggregate(agg, dir / "agg.json", {"en.json", "es.json"});

    AggregateTokenizer loaded = load_aggregate(dir / "agg.json");
    CHECK(loaded.total_vocab() == agg.total_vocab());
    CHECK(loaded.entries()[0].language == "en");
    CHECK(loaded.entries()[1].offset == agg.entries()[1].offset);

    // tamper with a referenced model: hash check must fail
    {
        std::ofstream out(dir / "en.json", std::ios::app);
        out << "\n";
    }
    CHECK_THROWS_AS(load_aggregate(dir / "agg.json"), malformed_model);

    fs::remove_all(dir);
}

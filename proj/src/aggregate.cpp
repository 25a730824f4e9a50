#include "cstool/aggregate.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <openssl/evp.h>

#include <json.hpp>

#include "cstool/errors.hpp"

namespace cst {

AggregateTokenizer::AggregateTokenizer(std::vector<std::pair<std::string, MonoTokenizer>> parts) {
    if (parts.size() < 2) throw too_few_parts();
    std::unordered_set<std::string> seen;
    uint32_t offset = 0;
    entries_.reserve(parts.size());
    for (auto& [lang, tok] : parts) {
        if (!seen.insert(lang).second) throw duplicate_language(lang);
        uint32_t v = tok.vocab_size();
        entries_.push_back({lang, std::move(tok), offset});
        offset += v;
    }
    total_vocab_ = offset;
}

const AggregateTokenizer::Entry* AggregateTokenizer::find(const std::string& language) const {
    for (const Entry& e : entries_)
        if (e.language == language) return &e;
    return nullptr;
}

uint32_t AggregateTokenizer::to_global(const std::string& language, uint32_t local_id) const {
    const Entry* e = find(language);
    if (!e) throw unknown_language(language);
    if (local_id >= e->tokenizer.vocab_size())
        throw id_out_of_range(local_id, e->tokenizer.vocab_size());
    return e->offset + local_id;
}

const AggregateTokenizer::Entry& AggregateTokenizer::entry_of(uint32_t global_id) const {
    if (global_id >= total_vocab_) throw id_out_of_range(global_id, total_vocab_);
    // Last entry whose offset <= global_id.
    auto it = std::upper_bound(entries_.begin(), entries_.end(), global_id,
                               [](uint32_t id, const Entry& e) { return id < e.offset; });
    return *std::prev(it);
}

std::pair<std::string, uint32_t> AggregateTokenizer::to_local(uint32_t global_id) const {
    const Entry& e = entry_of(global_id);
    return {e.language, global_id - e.offset};
}

std::vector<LabeledToken> AggregateTokenizer::encode_tagged(const TaggedText& tagged,
                                                            bool normalize) const {
    std::vector<LabeledToken> out;
    for (size_t i = 0; i < tagged.segments.size(); ++i) {
        const auto& [lang, text] = tagged.segments[i];
        const Entry* e = find(lang);
        if (!e) throw unknown_language(lang, i);
        for (uint32_t local : e->tokenizer.encode(text, normalize))
            out.push_back({e->offset + local, lang, local});
    }
    return out;
}

DecodedTokens AggregateTokenizer::decode_tokens(const std::vector<uint32_t>& global_ids) const {
    DecodedTokens result;
    result.token_langs.reserve(global_ids.size());

    const Entry* run_entry = nullptr;
    std::vector<uint32_t> run_locals;
    auto flush = [&] {
        if (!run_entry) return;
        result.text.segments.emplace_back(run_entry->language,
                                          run_entry->tokenizer.decode(run_locals));
        run_locals.clear();
    };

    for (size_t i = 0; i < global_ids.size(); ++i) {
        uint32_t id = global_ids[i];
        if (id >= total_vocab_)
            throw id_out_of_range(id, total_vocab_);
        const Entry& e = entry_of(id);
        if (run_entry != &e) {
            flush();
            run_entry = &e;
        }
        run_locals.push_back(id - e.offset);
        result.token_langs.push_back(e.language);
    }
    flush();
    return result;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

void save_aggregate(const AggregateTokenizer& agg, const std::filesystem::path& path,
                    const std::vector<std::filesystem::path>& model_paths) {
    if (model_paths.size() != agg.entries().size())
        throw validation_error("one model path required per aggregate entry");

    nlohmann::ordered_json j;
    j["entries"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < agg.entries().size(); ++i) {
        const auto& e = agg.entries()[i];
        nlohmann::ordered_json entry;
        entry["language"] = e.language;
        entry["model_path"] = model_paths[i].generic_string();
        const auto resolved = model_paths[i].is_absolute()
                                  ? model_paths[i]
                                  : path.parent_path() / model_paths[i];
        entry["model_sha256"] = sha256_file(resolved);
        entry["offset"] = e.offset;
        entry["vocab_size"] = e.tokenizer.vocab_size();
        j["entries"].push_back(std::move(entry));
    }
    j["total_vocab"] = agg.total_vocab();
    j["version"] = 1;

    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << j.dump() << '\n';
    if (!out) throw io_error("write failed: " + path.string());
}

AggregateTokenizer load_aggregate(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw malformed_model(std::string("invalid aggregate JSON: ") + e.what());
    }
    if (!j.contains("entries") || !j["entries"].is_array())
        throw malformed_model("missing \"entries\"");

    std::vector<std::pair<std::string, MonoTokenizer>> parts;
    for (const auto& entry : j["entries"]) {
        for (const char* field : {"language", "model_path", "model_sha256", "offset", "vocab_size"})
            if (!entry.contains(field))
                throw malformed_model(std::string("entry missing field \"") + field + "\"");

        std::filesystem::path model_path = entry["model_path"].get<std::string>();
        if (model_path.is_relative()) model_path = path.parent_path() / model_path;

        const std::string expected = entry["model_sha256"].get<std::string>();
        const std::string actual = sha256_file(model_path);
        if (actual != expected)
            throw malformed_model("model hash mismatch for " + model_path.string() +
                                  " (expected " + expected + ", got " + actual + ")");

        MonoTokenizer tok = load_model(model_path);
        if (tok.vocab_size() != entry["vocab_size"].get<uint32_t>())
            throw malformed_model("vocab size mismatch for " + model_path.string());
        parts.emplace_back(entry["language"].get<std::string>(), std::move(tok));
    }

    AggregateTokenizer agg(std::move(parts));

    // Cross-check the serialized layout against the reconstructed one.
    for (size_t i = 0; i < agg.entries().size(); ++i)
        if (agg.entries()[i].offset != j["entries"][i]["offset"].get<uint32_t>())
            throw malformed_model("offset mismatch at entry " + std::to_string(i));
    if (j.contains("total_vocab") && agg.total_vocab() != j["total_vocab"].get<uint32_t>())
        throw malformed_model("total_vocab mismatch");
    return agg;
}

}  // namespace cst

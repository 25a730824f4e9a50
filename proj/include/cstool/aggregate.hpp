#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cstool/tokenizer.hpp"

namespace cst {

// Global ids annotated with the language and local id they resolve to.
struct LabeledToken {
    uint32_t global_id;
    std::string language;
    uint32_t local_id;

    bool operator==(const LabeledToken&) const = default;
};

struct DecodedTokens {
    TaggedText text;
    std::vector<std::string> token_langs;
};

// Monolingual tokenizers composed under disjoint global-id ranges. Entry
// order is caller-specified; offsets are the exclusive prefix sums of vocab
// sizes, so the ranges partition [0, total_vocab) exactly.
class AggregateTokenizer {
  public:
    struct Entry {
        std::string language;
        MonoTokenizer tokenizer;
        uint32_t offset;
    };

    explicit AggregateTokenizer(std::vector<std::pair<std::string, MonoTokenizer>> parts);

    const std::vector<Entry>& entries() const { return entries_; }
    uint32_t total_vocab() const { return total_vocab_; }
    const Entry* find(const std::string& language) const;

    uint32_t to_global(const std::string& language, uint32_t local_id) const;
    std::pair<std::string, uint32_t> to_local(uint32_t global_id) const;

    std::vector<LabeledToken> encode_tagged(const TaggedText& tagged, bool normalize = true) const;

    // Resolves every id to its language, merges maximal same-language runs
    // into one segment and detokenizes each run with that entry's tokenizer.
    DecodedTokens decode_tokens(const std::vector<uint32_t>& global_ids) const;

  private:
    const Entry& entry_of(uint32_t global_id) const;

    std::vector<Entry> entries_;
    uint32_t total_vocab_;
};

// Serialized form references the monolingual model files by path + sha256 so
// pre-trained tokenizers are shared, not copied. Relative model paths resolve
// against the aggregate file's directory.
void save_aggregate(const AggregateTokenizer& agg, const std::filesystem::path& path,
                    const std::vector<std::filesystem::path>& model_paths);
AggregateTokenizer load_aggregate(const std::filesystem::path& path);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace cst

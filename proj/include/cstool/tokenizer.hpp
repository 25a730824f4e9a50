#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cst {

enum class ModelKind { bpe, scored };

// One language's subword inventory. Immutable after construction; all
// encode/decode paths are const and safe to share across threads.
class MonoTokenizer {
  public:
    static constexpr uint32_t kUnkId = 0;

    MonoTokenizer(std::string language, ModelKind kind, std::vector<std::string> pieces,
                  std::vector<double> scores, std::vector<std::pair<std::string, std::string>> merges);

    const std::string& language() const { return language_; }
    ModelKind kind() const { return kind_; }
    const std::vector<std::string>& pieces() const { return pieces_; }
    const std::vector<double>& scores() const { return scores_; }
    const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
    uint32_t vocab_size() const { return static_cast<uint32_t>(pieces_.size()); }

    // Local id of a piece, if present.
    std::optional<uint32_t> piece_id(const std::string& piece) const;

    // Text -> local ids. Splits on whitespace, prefixes the boundary marker
    // and segments each word (merge replay for bpe, Viterbi for scored).
    // Uncoverable character runs collapse to a single <unk>.
    std::vector<uint32_t> encode(const std::string& text, bool normalize = true) const;

    // Local ids -> text. Boundary markers become spaces, one leading space
    // stripped; <unk> renders as the literal "<unk>".
    std::string decode(const std::vector<uint32_t>& ids) const;

    // Max-score segmentation of one marker-prefixed word (kind=scored).
    std::vector<uint32_t> viterbi_segment(const std::string& word) const;

    bool operator==(const MonoTokenizer& other) const;

  private:
    std::vector<uint32_t> encode_word_bpe(const std::string& word) const;

    std::string language_;
    ModelKind kind_;
    std::vector<std::string> pieces_;
    std::vector<double> scores_;
    std::vector<std::pair<std::string, std::string>> merges_;
    std::unordered_map<std::string, uint32_t> piece_index_;
    size_t max_piece_cp_len_ = 0;
};

struct TrainResult {
    MonoTokenizer tokenizer;
    // True when merge learning ran out of repeating pairs before reaching the
    // requested vocab size.
    bool vocab_exhausted = false;
};

// Learns a BPE vocabulary: <unk>, then every base symbol (word-initial
// characters carry the boundary marker) in lexicographic order, then merges in
// frequency order. Equal-frequency pairs break by lexicographic order of the
// pair. Learning stops when vocab_size is reached or no pair occurs twice.
TrainResult train_bpe(const std::vector<std::string>& corpus, uint32_t vocab_size,
                      const std::string& language, bool normalize = true);

void save_model(const MonoTokenizer& tok, const std::filesystem::path& path);
MonoTokenizer load_model(const std::filesystem::path& path);

// A transcript as ordered (language, text span) segments.
struct TaggedText {
    std::vector<std::pair<std::string, std::string>> segments;

    bool operator==(const TaggedText&) const = default;
};

}  // namespace cst

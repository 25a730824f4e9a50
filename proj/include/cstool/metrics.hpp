#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cst {

struct WerBreakdown {
    uint64_t substitutions = 0;
    uint64_t insertions = 0;
    uint64_t deletions = 0;
    uint64_t ref_words = 0;
    double wer = 0.0;

    uint64_t edits() const { return substitutions + insertions + deletions; }
};

// Optional scoring normalization: lowercase and strip punctuation before the
// whitespace word split. Off by default; the plain split only NFC-assumes input.
struct WerOptions {
    bool normalize = false;
};

WerBreakdown wer(const std::string& reference, const std::string& hypothesis,
                 const WerOptions& opts = {});

// Micro-average: edits and reference words pooled over all pairs.
WerBreakdown corpus_wer(const std::vector<std::pair<std::string, std::string>>& pairs,
                        const WerOptions& opts = {});

struct CorpusStats {
    uint64_t utterances = 0;
    double total_hours = 0.0;
    uint64_t unique_characters = 0;
    std::map<uint64_t, uint64_t> switches_histogram;
    std::map<std::string, double> lang_share;  // fraction of total duration
};

// Descriptive stats over a generated manifest (rows must carry "segments").
CorpusStats cs_corpus_stats(const std::filesystem::path& manifest_path);

}  // namespace cst

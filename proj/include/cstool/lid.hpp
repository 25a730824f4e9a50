#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cstool/aggregate.hpp"

namespace cst {

struct LidResult {
    std::string predicted;
    std::map<std::string, uint64_t> counts;
    uint64_t total_tokens = 0;
};

struct LidReportRow {
    std::string language;
    uint64_t samples = 0;
    uint64_t correct = 0;
    double accuracy = 0.0;
};

using LidReport = std::vector<LidReportRow>;

// Majority vote over the per-token languages of a global-id sequence. Ties
// break toward the language of the earliest token among the tied languages.
LidResult utterance_lid(const AggregateTokenizer& agg, const std::vector<uint32_t>& global_ids);

// Per-reference-language accuracy rows, ordered by language code.
LidReport evaluate_lid(const std::vector<std::pair<std::string, LidResult>>& pairs);

}  // namespace cst

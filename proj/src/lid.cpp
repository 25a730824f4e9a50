#include "cstool/lid.hpp"

#include "cstool/errors.hpp"

namespace cst {

LidResult utterance_lid(const AggregateTokenizer& agg, const std::vector<uint32_t>& global_ids) {
    if (global_ids.empty()) throw empty_token_sequence();

    LidResult result;
    std::map<std::string, size_t> first_seen;
    for (size_t i = 0; i < global_ids.size(); ++i) {
        auto [lang, local] = agg.to_local(global_ids[i]);
        ++result.counts[lang];
        first_seen.emplace(lang, i);
    }
    result.total_tokens = global_ids.size();

    uint64_t best_count = 0;
    size_t best_first = 0;
    for (const auto& [lang, count] : result.counts) {
        size_t first = first_seen.at(lang);
        if (count > best_count || (count == best_count && first < best_first)) {
            result.predicted = lang;
            best_count = count;
            best_first = first;
        }
    }
    return result;
}

LidReport evaluate_lid(const std::vector<std::pair<std::string, LidResult>>& pairs) {
    std::map<std::string, LidReportRow> rows;
    for (const auto& [ref_lang, result] : pairs) {
        LidReportRow& row = rows[ref_lang];
        row.language = ref_lang;
        ++row.samples;
        if (result.predicted == ref_lang) ++row.correct;
    }
    LidReport report;
    report.reserve(rows.size());
    for (auto& [_, row] : rows) {
        row.accuracy = row.samples ? static_cast<double>(row.correct) / row.samples : 0.0;
        report.push_back(std::move(row));
    }
    return report;
}

}  // namespace cst

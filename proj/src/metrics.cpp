#include "cstool/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "cstool/corpus.hpp"
#include "cstool/errors.hpp"
#include "cstool/text.hpp"

namespace cst {

namespace {

std::vector<std::string> score_tokens(const std::string& text, const WerOptions& opts) {
    if (!opts.normalize) return split_words(text);
    std::string lowered = normalize_text(text);
    std::string stripped;
    stripped.reserve(lowered.size());
    for (char c : lowered)
        if (!std::ispunct(static_cast<unsigned char>(c))) stripped.push_back(c);
    return split_words(stripped);
}

// Levenshtein alignment with backtrace. Tie order: substitution, deletion,
// insertion.
WerBreakdown align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    const size_t r = ref.size(), h = hyp.size();
    std::vector<std::vector<uint32_t>> dp(r + 1, std::vector<uint32_t>(h + 1));
    for (size_t i = 0; i <= r; ++i) dp[i][0] = static_cast<uint32_t>(i);
    for (size_t j = 0; j <= h; ++j) dp[0][j] = static_cast<uint32_t>(j);
    for (size_t i = 1; i <= r; ++i) {
        for (size_t j = 1; j <= h; ++j) {
            uint32_t sub = dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
            uint32_t del = dp[i - 1][j] + 1;
            uint32_t ins = dp[i][j - 1] + 1;
            dp[i][j] = std::min({sub, del, ins});
        }
    }

    WerBreakdown b;
    b.ref_words = r;
    size_t i = r, j = h;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && dp[i][j] == dp[i - 1][j - 1] && ref[i - 1] == hyp[j - 1]) {
            --i;
            --j;
        } else if (i > 0 && j > 0 && dp[i][j] == dp[i - 1][j - 1] + 1) {
            ++b.substitutions;
            --i;
            --j;
        } else if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
            ++b.deletions;
            --i;
        } else {
            ++b.insertions;
            --j;
        }
    }
    b.wer = r ? static_cast<double>(b.edits()) / static_cast<double>(r) : 0.0;
    return b;
}

}  // namespace

WerBreakdown wer(const std::string& reference, const std::string& hypothesis,
                 const WerOptions& opts) {
    std::vector<std::string> ref = score_tokens(reference, opts);
    std::vector<std::string> hyp = score_tokens(hypothesis, opts);
    if (ref.empty() && !hyp.empty()) throw empty_reference();
    return align(ref, hyp);
}

WerBreakdown corpus_wer(const std::vector<std::pair<std::string, std::string>>& pairs,
                        const WerOptions& opts) {
    if (pairs.empty()) throw empty_input();
    WerBreakdown total;
    for (const auto& [ref, hyp] : pairs) {
        WerBreakdown b = wer(ref, hyp, opts);
        total.substitutions += b.substitutions;
        total.insertions += b.insertions;
        total.deletions += b.deletions;
        total.ref_words += b.ref_words;
    }
    total.wer = total.ref_words
                    ? static_cast<double>(total.edits()) / static_cast<double>(total.ref_words)
                    : 0.0;
    return total;
}

CorpusStats cs_corpus_stats(const std::filesystem::path& manifest_path) {
    std::vector<UtteranceRecord> rows = load_manifest(manifest_path);

    CorpusStats stats;
    std::set<std::string> chars;
    std::map<std::string, double> lang_seconds;
    double total_seg_seconds = 0.0;
    size_t line_no = 0;
    for (const UtteranceRecord& row : rows) {
        ++line_no;
        ++stats.utterances;
        stats.total_hours += row.duration / 3600.0;
        for (const std::string& cp : utf8_codepoints(row.text))
            if (cp != " ") chars.insert(cp);

        if (!row.extra.contains("segments") || !row.extra["segments"].is_array())
            throw malformed_line(line_no, "missing \"segments\" array");
        uint64_t switches = 0;
        std::string prev_lang;
        for (const auto& seg : row.extra["segments"]) {
            if (!seg.contains("lang") || !seg.contains("duration"))
                throw malformed_line(line_no, "segment missing lang or duration");
            std::string lang = seg["lang"].get<std::string>();
            double dur = seg["duration"].get<double>();
            if (!prev_lang.empty() && lang != prev_lang) ++switches;
            prev_lang = lang;
            lang_seconds[lang] += dur;
            total_seg_seconds += dur;
        }
        ++stats.switches_histogram[switches];
    }
    stats.unique_characters = chars.size();
    if (total_seg_seconds > 0.0)
        for (const auto& [lang, secs] : lang_seconds)
            stats.lang_share[lang] = secs / total_seg_seconds;
    return stats;
}

}  // namespace cst

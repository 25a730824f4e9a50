#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cstool/corpus.hpp"
#include "cstool/rng.hpp"
#include "cstool/tokenizer.hpp"

namespace cst {

enum class SwitchPolicy { alternate, uniform };

struct GenConfig {
    double min_gen_sample_duration = 17.0;
    double max_gen_sample_duration = 19.0;
    double target_total_hours = 0.0;
    SwitchPolicy switch_policy = SwitchPolicy::alternate;
    double pause_lo = 0.0;
    double pause_hi = 0.5;
    double target_rms_dbfs = -20.0;
    double min_seg_dur = 1.0;
    uint64_t seed = 0;
    int max_resample_attempts = 5;
    uint32_t sample_rate = 16000;
    unsigned jobs = 0;  // 0 = hardware concurrency
};

struct PlanSegment {
    std::string lang;
    UtteranceRecord record;
    double pause_after = 0.0;  // silence inserted after this segment; 0 on the last
};

struct SamplePlan {
    std::vector<PlanSegment> segments;
    double planned_duration = 0.0;

    size_t switches() const;
};

struct SegmentMeta {
    std::string lang;
    std::string source;
    double offset = 0.0;    // seconds from sample start, exact to the sample
    double duration = 0.0;  // rendered segment duration
    bool peak_limited = false;
    bool silent = false;
};

struct CsSample {
    Waveform audio;
    TaggedText tagged_transcript;
    std::vector<SegmentMeta> metadata;
};

struct NormalizeFlags {
    double scale = 1.0;
    bool peak_limited = false;
    bool silent = false;
};

// Scales uniformly so RMS hits 10^(target_rms_dbfs/20) full scale. If that
// would push any sample past 0.99, rescales so the peak lands at 0.99 exactly.
// Silent input is returned unchanged with the silent flag set.
Waveform normalize_segment(const Waveform& w, double target_rms_dbfs,
                           NormalizeFlags* flags = nullptr);

using Pools = std::map<std::string, std::vector<UtteranceRecord>>;

// Plans one synthetic code-switched sample: uniform start language, uniform
// in-pool draws without in-plan repeats, bounded retry on duration overshoot,
// discard-and-replan when the result undershoots the minimum duration.
SamplePlan plan_sample(const Pools& pools, const GenConfig& cfg, Rng& rng,
                       uint64_t* discarded = nullptr);

// Renders a plan: per segment read + RMS-normalize + append, with digital
// silence pauses between segments.
CsSample render_sample(const SamplePlan& plan, const GenConfig& cfg);

struct GenStats {
    uint64_t sample_count = 0;
    double total_hours = 0.0;
    std::map<uint64_t, uint64_t> switches_histogram;
    std::map<std::string, double> lang_seconds;
    std::map<std::string, uint64_t> start_counts;
    std::map<std::string, uint64_t> end_counts;
    uint64_t zero_switch_samples = 0;
    uint64_t peak_limited_segments = 0;
    uint64_t silent_segments = 0;
    uint64_t discarded_plans = 0;
};

// Plans and renders samples until the target duration is reached, writing
// cs_{index:08}.wav files plus manifest.jsonl and stats.json into out_dir.
// Rendering is parallel over samples; per-sample RNG streams derive from
// (seed, index), so output is identical for any job count.
GenStats generate_corpus(const Pools& pools, const GenConfig& cfg,
                         const std::filesystem::path& out_dir);

}  // namespace cst

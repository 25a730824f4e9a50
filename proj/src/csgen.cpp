#include "cstool/csgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cstool/dsp.hpp"
#include "cstool/errors.hpp"

namespace cst {

size_t SamplePlan::switches() const {
    size_t n = 0;
    for (size_t i = 1; i < segments.size(); ++i)
        if (segments[i].lang != segments[i - 1].lang) ++n;
    return n;
}

Waveform normalize_segment(const Waveform& w, double target_rms_dbfs, NormalizeFlags* flags) {
    NormalizeFlags local;
    NormalizeFlags& f = flags ? *flags : local;

    double current_rms = dsp::rms(w.samples);
    if (current_rms <= 0.0) {
        f.silent = true;
        f.scale = 1.0;
        return w;
    }
    double target = std::pow(10.0, target_rms_dbfs / 20.0);
    double scale = target / current_rms;
    double peak = static_cast<double>(dsp::peak_abs(w.samples));
    if (peak * scale > 0.99) {
        scale = 0.99 / peak;
        f.peak_limited = true;
    }
    f.scale = scale;

    Waveform out = w;
    dsp::scale(out.samples, static_cast<float>(scale));
    return out;
}

namespace {

std::string pool_histogram(const Pools& pools) {
    std::ostringstream os;
    for (const auto& [lang, records] : pools) {
        double total = 0.0, lo = 1e18, hi = 0.0;
        for (const auto& r : records) {
            total += r.duration;
            lo = std::min(lo, r.duration);
            hi = std::max(hi, r.duration);
        }
        os << lang << ": " << records.size() << " utts, " << total << " s";
        if (!records.empty()) os << " (min " << lo << " s, max " << hi << " s)";
        os << "; ";
    }
    return os.str();
}

std::string next_language(const std::vector<std::string>& langs, const std::string& current,
                          SwitchPolicy policy, Rng& rng) {
    size_t cur = static_cast<size_t>(
        std::find(langs.begin(), langs.end(), current) - langs.begin());
    if (policy == SwitchPolicy::alternate) return langs[(cur + 1) % langs.size()];
    // uniform over the other languages: a genuine switch every segment
    size_t pick = rng.next_below(langs.size() - 1);
    if (pick >= cur) ++pick;
    return langs[pick];
}

}  // namespace

SamplePlan plan_sample(const Pools& pools, const GenConfig& cfg, Rng& rng, uint64_t* discarded) {
    std::vector<std::string> langs;
    for (const auto& [lang, records] : pools) {
        if (records.empty()) throw empty_pool(lang);
        langs.push_back(lang);
    }
    if (langs.size() < 2) throw generation_stuck("need at least 2 language pools");

    const long max_replans = static_cast<long>(cfg.max_resample_attempts) * 100;
    for (long replan = 0; replan < max_replans; ++replan) {
        SamplePlan plan;
        std::set<std::pair<std::string, size_t>> used;
        double duration = 0.0;
        std::string lang = langs[rng.next_below(langs.size())];

        for (;;) {
            const auto& pool = pools.at(lang);
            bool appended = false;
            for (int attempt = 0; attempt < cfg.max_resample_attempts; ++attempt) {
                size_t idx = rng.next_below(pool.size());
                double pause = plan.segments.empty() ? 0.0 : rng.next_range(cfg.pause_lo, cfg.pause_hi);
                if (used.count({lang, idx})) continue;
                if (duration + pause + pool[idx].duration > cfg.max_gen_sample_duration) continue;
                if (!plan.segments.empty()) plan.segments.back().pause_after = pause;
                plan.segments.push_back({lang, pool[idx], 0.0});
                used.insert({lang, idx});
                duration += pause + pool[idx].duration;
                appended = true;
                break;
            }
            if (!appended) break;
            lang = next_language(langs, lang, cfg.switch_policy, rng);
        }

        if (duration >= cfg.min_gen_sample_duration) {
            plan.planned_duration = duration;
            return plan;
        }
        if (discarded) ++*discarded;
    }
    throw generation_stuck("could not reach min duration " +
                           std::to_string(cfg.min_gen_sample_duration) + " s after " +
                           std::to_string(max_replans) + " replans; pools: " +
                           pool_histogram(pools));
}

CsSample render_sample(const SamplePlan& plan, const GenConfig& cfg) {
    CsSample sample;
    sample.audio.sample_rate = cfg.sample_rate;

    for (const PlanSegment& seg : plan.segments) {
        Waveform w = read_wav(seg.record.audio_filepath);
        if (w.sample_rate != cfg.sample_rate)
            throw unsupported_format("sample rate " + std::to_string(w.sample_rate) +
                                     " != " + std::to_string(cfg.sample_rate) + " in " +
                                     seg.record.audio_filepath);
        if (std::fabs(w.duration() - seg.record.duration) > 0.05)
            throw duration_mismatch(seg.record.audio_filepath, seg.record.duration, w.duration());

        NormalizeFlags flags;
        Waveform norm = normalize_segment(w, cfg.target_rms_dbfs, &flags);

        SegmentMeta meta;
        meta.lang = seg.lang;
        meta.source = seg.record.audio_filepath;
        meta.offset = static_cast<double>(sample.audio.samples.size()) / cfg.sample_rate;
        meta.duration = norm.duration();
        meta.peak_limited = flags.peak_limited;
        meta.silent = flags.silent;
        sample.metadata.push_back(std::move(meta));

        sample.audio.samples.insert(sample.audio.samples.end(), norm.samples.begin(),
                                    norm.samples.end());
        sample.tagged_transcript.segments.emplace_back(seg.lang, seg.record.text);

        size_t pause_samples =
            static_cast<size_t>(std::llround(seg.pause_after * cfg.sample_rate));
        sample.audio.samples.insert(sample.audio.samples.end(), pause_samples, 0.0f);
    }
    return sample;
}

GenStats generate_corpus(const Pools& pools, const GenConfig& cfg,
                         const std::filesystem::path& out_dir) {
    if (cfg.target_total_hours <= 0.0)
        throw validation_error("target_total_hours must be positive");
    if (std::filesystem::exists(out_dir))
        throw io_error("output directory already exists: " + out_dir.string());

    const double target_seconds = cfg.target_total_hours * 3600.0;

    // Plan sequentially (cheap, no audio I/O). Each sample draws from its own
    // seed-derived stream, so plans do not depend on each other.
    std::vector<SamplePlan> plans;
    GenStats stats;
    double planned_total = 0.0;
    uint64_t index = 0;
    while (planned_total < target_seconds) {
        Rng rng = Rng::for_sample(cfg.seed, index);
        SamplePlan plan = plan_sample(pools, cfg, rng, &stats.discarded_plans);
        planned_total += plan.planned_duration;
        plans.push_back(std::move(plan));
        ++index;
    }

    const std::filesystem::path tmp_dir = out_dir.string() + ".tmp";
    std::filesystem::remove_all(tmp_dir);
    std::filesystem::create_directories(tmp_dir);

    // Render in parallel; rows are assembled in index order afterwards.
    std::vector<UtteranceRecord> rows(plans.size());
    std::vector<CsSample> rendered(plans.size());
    std::atomic<size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mu;

    unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, plans.size() ? plans.size() : 1);
    auto worker = [&] {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= plans.size() || failed.load()) return;
            try {
                char name[32];
                std::snprintf(name, sizeof(name), "cs_%08zu.wav", i);
                CsSample sample = render_sample(plans[i], cfg);
                write_wav(tmp_dir / name, sample.audio);

                UtteranceRecord row;
                row.audio_filepath = name;
                row.duration = sample.audio.duration();
                std::string text;
                for (const auto& [lang, t] : sample.tagged_transcript.segments) {
                    if (!text.empty()) text += ' ';
                    text += t;
                }
                row.text = std::move(text);
                row.lang = "cs";
                nlohmann::json segs = nlohmann::json::array();
                for (size_t k = 0; k < sample.metadata.size(); ++k) {
                    const SegmentMeta& m = sample.metadata[k];
                    segs.push_back({{"lang", m.lang},
                                    {"text", sample.tagged_transcript.segments[k].second},
                                    {"offset", m.offset},
                                    {"duration", m.duration},
                                    {"source", m.source}});
                }
                row.extra["segments"] = std::move(segs);
                rows[i] = std::move(row);
                rendered[i] = std::move(sample);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failed.load()) {
        std::filesystem::remove_all(tmp_dir);
        throw generation_error("rendering failed: " + first_error);
    }

    for (size_t i = 0; i < plans.size(); ++i) {
        const SamplePlan& plan = plans[i];
        const CsSample& sample = rendered[i];
        ++stats.sample_count;
        stats.total_hours += rows[i].duration / 3600.0;
        uint64_t switches = plan.switches();
        ++stats.switches_histogram[switches];
        if (switches == 0) ++stats.zero_switch_samples;
        ++stats.start_counts[plan.segments.front().lang];
        ++stats.end_counts[plan.segments.back().lang];
        for (const SegmentMeta& m : sample.metadata) {
            stats.lang_seconds[m.lang] += m.duration;
            if (m.peak_limited) ++stats.peak_limited_segments;
            if (m.silent) ++stats.silent_segments;
        }
    }

    save_manifest(rows, tmp_dir / "manifest.jsonl");

    nlohmann::ordered_json sj;
    sj["sample_count"] = stats.sample_count;
    sj["total_hours"] = stats.total_hours;
    sj["switches_histogram"] = stats.switches_histogram;
    sj["lang_seconds"] = stats.lang_seconds;
    sj["start_counts"] = stats.start_counts;
    sj["end_counts"] = stats.end_counts;
    sj["zero_switch_samples"] = stats.zero_switch_samples;
    sj["peak_limited_segments"] = stats.peak_limited_segments;
    sj["silent_segments"] = stats.silent_segments;
    {
        std::ofstream out(tmp_dir / "stats.json");
        out << sj.dump(2) << '\n';
        if (!out) throw io_error("write failed: " + (tmp_dir / "stats.json").string());
    }

    std::filesystem::rename(tmp_dir, out_dir);
    return stats;
}

}  // namespace cst

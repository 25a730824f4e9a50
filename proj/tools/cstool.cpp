#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cstool/aggregate.hpp"
#include "cstool/corpus.hpp"
#include "cstool/csgen.hpp"
#include "cstool/dsp.hpp"
#include "cstool/errors.hpp"
#include "cstool/lid.hpp"
#include "cstool/metrics.hpp"
#include "cstool/tokenizer.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitGeneration = 3;

struct LinedJson {
    size_t line_no;
    json value;
};

std::vector<LinedJson> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw cst::io_error("cannot open: " + path.string());
    std::vector<LinedJson> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back({line_no, json::parse(line)});
        } catch (const json::exception& e) {
            throw cst::malformed_line(line_no, std::string("invalid JSON: ") + e.what());
        }
    }
    return out;
}

std::pair<std::string, std::string> split_kv(const std::string& s, const std::string& flag) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw cst::validation_error(flag + " expects LANG=PATH, got \"" + s + "\"");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

int cmd_train(const std::string& corpus_path, unsigned vocab_size, const std::string& lang,
              const std::string& out_path, bool no_normalize, bool json_out) {
    std::ifstream in(corpus_path);
    if (!in) throw cst::io_error("cannot open corpus: " + corpus_path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);

    cst::TrainResult result = cst::train_bpe(lines, vocab_size, lang, !no_normalize);
    cst::save_model(result.tokenizer, out_path);

    if (json_out) {
        ordered_json j;
        j["language"] = lang;
        j["pieces"] = result.tokenizer.vocab_size();
        j["merges"] = result.tokenizer.merges().size();
        j["vocab_exhausted"] = result.vocab_exhausted;
        j["model"] = out_path;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "trained " << lang << " tokenizer: " << result.tokenizer.vocab_size()
                  << " pieces, " << result.tokenizer.merges().size() << " merges -> " << out_path
                  << '\n';
        if (result.vocab_exhausted)
            std::cout << "warning: ran out of repeating pairs before reaching " << vocab_size
                      << " pieces\n";
    }
    return kExitOk;
}

cst::AggregateTokenizer build_from_parts(const std::vector<std::string>& part_flags,
                                         std::vector<std::filesystem::path>& model_paths) {
    std::vector<std::pair<std::string, cst::MonoTokenizer>> parts;
    for (const std::string& p : part_flags) {
        auto [lang, path] = split_kv(p, "--part");
        model_paths.emplace_back(path);
        parts.emplace_back(lang, cst::load_model(path));
    }
    return cst::AggregateTokenizer(std::move(parts));
}

int cmd_aggregate_build(const std::vector<std::string>& part_flags, const std::string& out_path,
                        bool json_out) {
    std::vector<std::filesystem::path> model_paths;
    cst::AggregateTokenizer agg = build_from_parts(part_flags, model_paths);

    // Store paths relative to the aggregate file when possible.
    std::filesystem::path out(out_path);
    std::vector<std::filesystem::path> stored;
    for (const auto& p : model_paths) {
        std::error_code ec;
        auto rel = std::filesystem::relative(p, out.parent_path().empty() ? "." : out.parent_path(), ec);
        stored.push_back(ec || rel.empty() ? p : rel);
    }
    cst::save_aggregate(agg, out, stored);

    if (json_out) {
        ordered_json j;
        j["total_vocab"] = agg.total_vocab();
        j["entries"] = json::array();
        for (const auto& e : agg.entries())
            j["entries"].push_back({{"language", e.language},
                                    {"offset", e.offset},
                                    {"vocab_size", e.tokenizer.vocab_size()}});
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "aggregate with " << agg.entries().size() << " parts, total vocab "
                  << agg.total_vocab() << " -> " << out_path << '\n';
    }
    return kExitOk;
}

int cmd_aggregate_inspect(const std::string& path, bool json_out) {
    cst::AggregateTokenizer agg = cst::load_aggregate(path);
    if (json_out) {
        ordered_json j;
        j["entries"] = json::array();
        for (const auto& e : agg.entries())
            j["entries"].push_back({{"language", e.language},
                                    {"offset", e.offset},
                                    {"vocab_size", e.tokenizer.vocab_size()}});
        j["total_vocab"] = agg.total_vocab();
        std::cout << j.dump() << '\n';
    } else {
        for (const auto& e : agg.entries())
            std::cout << e.language << ' ' << e.offset << ".."
                      << e.offset + e.tokenizer.vocab_size() - 1 << '\n';
        std::cout << "total " << agg.total_vocab() << '\n';
    }
    return kExitOk;
}

cst::TaggedText tagged_from_json(const json& j, size_t line_no) {
    if (!j.contains("segments") || !j["segments"].is_array())
        throw cst::malformed_line(line_no, "missing \"segments\" array");
    cst::TaggedText t;
    for (const auto& seg : j["segments"]) {
        if (seg.is_array() && seg.size() == 2)
            t.segments.emplace_back(seg[0].get<std::string>(), seg[1].get<std::string>());
        else if (seg.is_object() && seg.contains("lang") && seg.contains("text"))
            t.segments.emplace_back(seg["lang"].get<std::string>(), seg["text"].get<std::string>());
        else
            throw cst::malformed_line(line_no, "segment must be [lang, text] or {lang, text}");
    }
    return t;
}

int cmd_encode(const std::string& agg_path, const std::string& input, bool no_normalize) {
    cst::AggregateTokenizer agg = cst::load_aggregate(agg_path);
    bool any_error = false;
    for (const LinedJson& lj : read_jsonl(input)) {
        try {
            cst::TaggedText tagged = tagged_from_json(lj.value, lj.line_no);
            auto tokens = agg.encode_tagged(tagged, !no_normalize);
            ordered_json out;
            out["token_ids"] = json::array();
            for (const auto& t : tokens) out["token_ids"].push_back(t.global_id);
            std::cout << out.dump() << '\n';
        } catch (const cst::validation_error& e) {
            std::cout << json{{"error", e.what()}, {"line", lj.line_no}}.dump() << '\n';
            any_error = true;
        }
    }
    return any_error ? kExitValidation : kExitOk;
}

int cmd_decode(const std::string& agg_path, const std::string& input) {
    cst::AggregateTokenizer agg = cst::load_aggregate(agg_path);
    bool any_error = false;
    for (const LinedJson& lj : read_jsonl(input)) {
        try {
            if (!lj.value.contains("token_ids"))
                throw cst::malformed_line(lj.line_no, "missing \"token_ids\"");
            auto ids = lj.value["token_ids"].get<std::vector<uint32_t>>();
            cst::DecodedTokens dec = agg.decode_tokens(ids);
            ordered_json out;
            out["segments"] = json::array();
            for (const auto& [lang, text] : dec.text.segments)
                out["segments"].push_back({{"lang", lang}, {"text", text}});
            out["token_langs"] = dec.token_langs;
            std::cout << out.dump() << '\n';
        } catch (const cst::validation_error& e) {
            std::cout << json{{"error", e.what()}, {"line", lj.line_no}}.dump() << '\n';
            any_error = true;
        } catch (const json::exception& e) {
            std::cout << json{{"error", e.what()}, {"line", lj.line_no}}.dump() << '\n';
            any_error = true;
        }
    }
    return any_error ? kExitValidation : kExitOk;
}

int cmd_lid_eval(const std::string& agg_path, const std::string& input, bool json_out) {
    cst::AggregateTokenizer agg = cst::load_aggregate(agg_path);
    std::vector<std::pair<std::string, cst::LidResult>> pairs;
    for (const LinedJson& lj : read_jsonl(input)) {
        if (!lj.value.contains("ref_lang") || !lj.value.contains("token_ids"))
            throw cst::malformed_line(lj.line_no, "need \"ref_lang\" and \"token_ids\"");
        auto ids = lj.value["token_ids"].get<std::vector<uint32_t>>();
        pairs.emplace_back(lj.value["ref_lang"].get<std::string>(),
                           cst::utterance_lid(agg, ids));
    }
    cst::LidReport report = cst::evaluate_lid(pairs);
    if (json_out) {
        ordered_json j = json::array();
        for (const auto& row : report)
            j.push_back({{"language", row.language},
                         {"samples", row.samples},
                         {"correct", row.correct},
                         {"accuracy", row.accuracy}});
        std::cout << j.dump() << '\n';
    } else {
        std::cout << std::left << std::setw(10) << "language" << std::setw(10) << "samples"
                  << std::setw(10) << "correct" << "accuracy\n";
        for (const auto& row : report)
            std::cout << std::left << std::setw(10) << row.language << std::setw(10)
                      << row.samples << std::setw(10) << row.correct << std::fixed
                      << std::setprecision(4) << row.accuracy << '\n';
    }
    return kExitOk;
}

int cmd_csgen(const std::vector<std::string>& pool_flags, const cst::GenConfig& cfg,
              const std::string& out_dir, bool json_out) {
    cst::Pools pools;
    for (const std::string& p : pool_flags) {
        auto [lang, path] = split_kv(p, "--pool");
        cst::FilterStats fstats;
        auto records = cst::filter_pool(cst::load_manifest(path), cfg.min_seg_dur,
                                        cfg.max_gen_sample_duration, cfg.sample_rate, &fstats);
        if (records.empty()) throw cst::empty_pool(lang);
        for (const auto& [reason, n] : fstats.dropped)
            std::cerr << lang << ": dropped " << n << " (" << reason << ")\n";
        pools.emplace(lang, std::move(records));
    }

    cst::GenStats stats = cst::generate_corpus(pools, cfg, out_dir);

    ordered_json j;
    j["sample_count"] = stats.sample_count;
    j["total_hours"] = stats.total_hours;
    j["switches_histogram"] = stats.switches_histogram;
    j["lang_seconds"] = stats.lang_seconds;
    j["start_counts"] = stats.start_counts;
    j["end_counts"] = stats.end_counts;
    j["zero_switch_samples"] = stats.zero_switch_samples;
    j["peak_limited_segments"] = stats.peak_limited_segments;
    j["discarded_plans"] = stats.discarded_plans;
    if (json_out) {
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "generated " << stats.sample_count << " samples ("
                  << std::fixed << std::setprecision(4) << stats.total_hours << " h) -> "
                  << out_dir << '\n';
        for (const auto& [lang, secs] : stats.lang_seconds)
            std::cout << "  " << lang << ": " << std::setprecision(1) << secs << " s speech, "
                      << stats.start_counts[lang] << " starts, " << stats.end_counts[lang]
                      << " ends\n";
    }
    return kExitOk;
}

int cmd_wer(const std::string& ref_path, const std::string& hyp_path, bool normalize,
            bool json_out) {
    auto load_side = [](const std::string& path) {
        std::map<std::string, std::string> by_id;
        for (const LinedJson& lj : read_jsonl(path)) {
            if (!lj.value.contains("id") || !lj.value.contains("text"))
                throw cst::malformed_line(lj.line_no, "need \"id\" and \"text\"");
            by_id[lj.value["id"].get<std::string>()] = lj.value["text"].get<std::string>();
        }
        return by_id;
    };
    auto refs = load_side(ref_path);
    auto hyps = load_side(hyp_path);

    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [id, ref] : refs) {
        auto it = hyps.find(id);
        if (it == hyps.end()) throw cst::validation_error("id \"" + id + "\" missing from hypothesis file");
        pairs.emplace_back(ref, it->second);
    }
    for (const auto& [id, _] : hyps)
        if (!refs.count(id)) throw cst::validation_error("id \"" + id + "\" missing from reference file");

    cst::WerBreakdown b = cst::corpus_wer(pairs, {.normalize = normalize});
    if (json_out) {
        ordered_json j;
        j["wer"] = b.wer;
        j["substitutions"] = b.substitutions;
        j["insertions"] = b.insertions;
        j["deletions"] = b.deletions;
        j["ref_words"] = b.ref_words;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "WER " << std::fixed << std::setprecision(4) << 100.0 * b.wer << "% (S="
                  << b.substitutions << " I=" << b.insertions << " D=" << b.deletions
                  << " / N=" << b.ref_words << ")\n";
    }
    return kExitOk;
}

int cmd_corpus_stats(const std::string& manifest, bool json_out) {
    cst::CorpusStats s = cst::cs_corpus_stats(manifest);
    if (json_out) {
        ordered_json j;
        j["utterances"] = s.utterances;
        j["total_hours"] = s.total_hours;
        j["unique_characters"] = s.unique_characters;
        j["switches_histogram"] = s.switches_histogram;
        j["lang_share"] = s.lang_share;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << s.utterances << " utterances, " << std::fixed << std::setprecision(4)
                  << s.total_hours << " h, " << s.unique_characters << " unique characters\n";
        for (const auto& [lang, share] : s.lang_share)
            std::cout << "  " << lang << ": " << std::setprecision(1) << 100.0 * share << "%\n";
        for (const auto& [switches, n] : s.switches_histogram)
            std::cout << "  " << switches << " switches: " << n << " samples\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"code-switched ASR data toolkit: tokenizers, synthetic corpus generation, LID and WER evaluation"};
    app.require_subcommand(1);

    bool json_out = false;
    std::string simd = "auto";
    app.add_flag("--json", json_out, "machine-readable JSON on stdout");
    app.add_option("--simd", simd, "kernel variant: auto, scalar, avx2")->default_val("auto");

    // train-tokenizer
    auto* train = app.add_subcommand("train-tokenizer", "train a BPE tokenizer from a text corpus");
    std::string corpus_path, lang, out_path;
    unsigned vocab_size = 1024;
    bool no_normalize = false;
    train->add_option("--corpus", corpus_path, "text corpus, one line per sentence")->required();
    train->add_option("--vocab-size", vocab_size, "target vocabulary size")->default_val(1024)
        ->check(CLI::PositiveNumber.description("--vocab-size must be positive"));
    train->add_option("--lang", lang, "language code")->required();
    train->add_option("--out", out_path, "output model file")->required();
    train->add_flag("--no-normalize", no_normalize, "skip lowercasing/whitespace cleanup");

    // aggregate-build
    auto* abuild = app.add_subcommand("aggregate-build", "compose monolingual models into an aggregate");
    std::vector<std::string> parts;
    std::string agg_out;
    abuild->add_option("--part", parts, "LANG=MODEL_PATH, repeated, order defines id ranges")
        ->required();
    abuild->add_option("--out", agg_out, "output aggregate file")->required();

    // aggregate-inspect
    auto* ainspect = app.add_subcommand("aggregate-inspect", "print per-language id ranges");
    std::string agg_in;
    ainspect->add_option("path", agg_in, "aggregate file")->required();

    // encode / decode
    auto* encode = app.add_subcommand("encode", "tagged text JSONL -> global token ids");
    std::string enc_agg, enc_input;
    bool enc_no_normalize = false;
    encode->add_option("--agg", enc_agg, "aggregate file")->required();
    encode->add_option("--input", enc_input, "JSONL with \"segments\"")->required();
    encode->add_flag("--no-normalize", enc_no_normalize, "skip text normalization");

    auto* decode = app.add_subcommand("decode", "global token ids JSONL -> tagged text");
    std::string dec_agg, dec_input;
    decode->add_option("--agg", dec_agg, "aggregate file")->required();
    decode->add_option("--input", dec_input, "JSONL with \"token_ids\"")->required();

    // lid-eval
    auto* lid = app.add_subcommand("lid-eval", "utterance LID accuracy per reference language");
    std::string lid_agg, lid_input;
    lid->add_option("--agg", lid_agg, "aggregate file")->required();
    lid->add_option("--input", lid_input, "JSONL with \"ref_lang\" and \"token_ids\"")->required();

    // csgen
    auto* csgen = app.add_subcommand("csgen", "generate a synthetic code-switched corpus");
    std::vector<std::string> pool_flags;
    cst::GenConfig cfg;
    std::string csgen_out, switch_policy = "alternate";
    csgen->set_config("--config", "", "key=value config file; explicit flags win");
    csgen->add_option("--pool", pool_flags, "LANG=MANIFEST_PATH, repeated")->required();
    csgen->add_option("--out", csgen_out, "output directory (created atomically)")->required();
    csgen->add_option("--min-duration", cfg.min_gen_sample_duration, "min generated sample duration, s")
        ->capture_default_str();
    csgen->add_option("--max-duration", cfg.max_gen_sample_duration, "max generated sample duration, s")
        ->capture_default_str();
    csgen->add_option("--target-hours", cfg.target_total_hours, "total hours to generate")->required();
    csgen->add_option("--switch-policy", switch_policy, "alternate or uniform")
        ->check(CLI::IsMember({"alternate", "uniform"}))->capture_default_str();
    csgen->add_option("--pause-lo", cfg.pause_lo, "min inter-segment pause, s")->capture_default_str();
    csgen->add_option("--pause-hi", cfg.pause_hi, "max inter-segment pause, s")->capture_default_str();
    csgen->add_option("--target-rms-dbfs", cfg.target_rms_dbfs, "segment loudness target")
        ->capture_default_str();
    csgen->add_option("--min-seg-dur", cfg.min_seg_dur, "min source utterance duration, s")
        ->capture_default_str();
    csgen->add_option("--seed", cfg.seed, "generation seed")->capture_default_str();
    csgen->add_option("--max-resample-attempts", cfg.max_resample_attempts)->capture_default_str();
    csgen->add_option("--sample-rate", cfg.sample_rate)->capture_default_str();
    csgen->add_option("--jobs", cfg.jobs, "parallel render workers, 0 = all cores")
        ->capture_default_str();

    // wer
    auto* wer_cmd = app.add_subcommand("wer", "micro-averaged word error rate over paired JSONL");
    std::string ref_path, hyp_path;
    bool wer_normalize = false;
    wer_cmd->add_option("--ref", ref_path, "reference JSONL ({\"id\",\"text\"})")->required();
    wer_cmd->add_option("--hyp", hyp_path, "hypothesis JSONL ({\"id\",\"text\"})")->required();
    wer_cmd->add_flag("--normalize", wer_normalize, "lowercase and strip punctuation");

    // corpus-stats
    auto* stats_cmd = app.add_subcommand("corpus-stats", "descriptive stats over a generated manifest");
    std::string stats_manifest;
    stats_cmd->add_option("--manifest", stats_manifest, "manifest.jsonl")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (!cst::dsp::select_kernels(simd))
            throw cst::validation_error("unknown or unavailable --simd variant \"" + simd + "\"");

        if (*train)
            return cmd_train(corpus_path, vocab_size, lang, out_path, no_normalize, json_out);
        if (*abuild) return cmd_aggregate_build(parts, agg_out, json_out);
        if (*ainspect) return cmd_aggregate_inspect(agg_in, json_out);
        if (*encode) return cmd_encode(enc_agg, enc_input, enc_no_normalize);
        if (*decode) return cmd_decode(dec_agg, dec_input);
        if (*lid) return cmd_lid_eval(lid_agg, lid_input, json_out);
        if (*csgen) {
            cfg.switch_policy = switch_policy == "uniform" ? cst::SwitchPolicy::uniform
                                                           : cst::SwitchPolicy::alternate;
            return cmd_csgen(pool_flags, cfg, csgen_out, json_out);
        }
        if (*wer_cmd) return cmd_wer(ref_path, hyp_path, wer_normalize, json_out);
        if (*stats_cmd) return cmd_corpus_stats(stats_manifest, json_out);
    } catch (const cst::generation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitGeneration;
    } catch (const cst::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const cst::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

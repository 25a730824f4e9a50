#pragma once

#include <stdexcept>
#include <string>

namespace cst {

// Top-level error categories. The CLI maps them to exit codes:
// validation_error -> 1, io_error -> 2, generation_error -> 3.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tokenizer_core
struct empty_corpus : validation_error {
    empty_corpus() : validation_error("empty corpus: no words to train on") {}
};

struct vocab_too_small : validation_error {
    vocab_too_small(size_t requested, size_t needed)
        : validation_error("vocab_size " + std::to_string(requested) +
                           " is smaller than base inventory " + std::to_string(needed)) {}
};

struct id_out_of_range : validation_error {
    id_out_of_range(long long id, size_t limit)
        : validation_error("token id " + std::to_string(id) + " out of range [0, " +
                           std::to_string(limit) + ")") {}
};

struct malformed_model : validation_error {
    explicit malformed_model(const std::string& reason)
        : validation_error("malformed model: " + reason) {}
};

// aggregate
struct unknown_language : validation_error {
    explicit unknown_language(const std::string& lang)
        : validation_error("unknown language \"" + lang + "\"") {}
    unknown_language(const std::string& lang, size_t segment_index)
        : validation_error("unknown language \"" + lang + "\" in segment " +
                           std::to_string(segment_index)) {}
};

struct duplicate_language : validation_error {
    explicit duplicate_language(const std::string& lang)
        : validation_error("duplicate language \"" + lang + "\"") {}
};

struct too_few_parts : validation_error {
    too_few_parts() : validation_error("an aggregate needs at least 2 parts") {}
};

// lid / metrics
struct empty_token_sequence : validation_error {
    empty_token_sequence() : validation_error("empty token sequence") {}
};

struct empty_reference : validation_error {
    empty_reference() : validation_error("reference has no words but hypothesis is non-empty") {}
};

struct empty_input : validation_error {
    empty_input() : validation_error("empty input") {}
};

// corpus
struct malformed_line : validation_error {
    malformed_line(size_t line_no, const std::string& reason)
        : validation_error("line " + std::to_string(line_no) + ": " + reason),
          line(line_no) {}
    size_t line;
};

struct missing_field : validation_error {
    missing_field(size_t line_no, const std::string& field)
        : validation_error("line " + std::to_string(line_no) + ": missing field \"" + field + "\""),
          line(line_no) {}
    size_t line;
};

struct unsupported_format : io_error {
    explicit unsupported_format(const std::string& detail)
        : io_error("unsupported audio format: " + detail) {}
};

// csgen
struct empty_pool : validation_error {
    explicit empty_pool(const std::string& lang)
        : validation_error("pool for language \"" + lang + "\" is empty after filtering") {}
};

struct generation_stuck : generation_error {
    explicit generation_stuck(const std::string& diagnostics)
        : generation_error("generation stuck: " + diagnostics) {}
};

struct duration_mismatch : validation_error {
    duration_mismatch(const std::string& path, double manifest_s, double actual_s)
        : validation_error("audio duration of " + path + " (" + std::to_string(actual_s) +
                           " s) disagrees with manifest (" + std::to_string(manifest_s) +
                           " s) by more than 50 ms") {}
};

}  // namespace cst

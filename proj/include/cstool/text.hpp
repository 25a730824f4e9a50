#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cst {

// Word-boundary marker (U+2581, "lower one eighth block").
inline constexpr std::string_view kBoundaryMarker = "\xE2\x96\x81";
inline constexpr std::string_view kUnkPiece = "<unk>";

// Number of bytes in the UTF-8 sequence starting at `lead`. Returns 1 for
// invalid lead bytes so iteration always makes progress.
size_t utf8_seq_len(unsigned char lead);

// Splits a UTF-8 string into codepoint substrings.
std::vector<std::string> utf8_codepoints(std::string_view text);

size_t utf8_count(std::string_view text);

// Default text cleanup applied before training/encoding: lowercases Latin
// codepoints (ASCII, Latin-1 supplement, Latin Extended-A) and condenses
// whitespace runs to single spaces. Input is expected to already be in
// composed (NFC) form; no recomposition is attempted.
std::string normalize_text(std::string_view text);

// Whitespace word split (any ASCII whitespace).
std::vector<std::string> split_words(std::string_view text);

}  // namespace cst

#include "cstool/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "cstool/errors.hpp"
#include "cstool/text.hpp"

namespace cst {

namespace {

// Score assigned to an <unk> edge in the Viterbi lattice. Low enough that any
// all-piece segmentation of a word beats any path using an unk edge.
constexpr double kUnkEdgeScore = -1e15;

std::vector<std::string> word_symbols(const std::string& word) {
    std::vector<std::string> symbols = utf8_codepoints(word);
    if (!symbols.empty()) symbols.front() = std::string(kBoundaryMarker) + symbols.front();
    return symbols;
}

}  // namespace

MonoTokenizer::MonoTokenizer(std::string language, ModelKind kind,
                             std::vector<std::string> pieces, std::vector<double> scores,
                             std::vector<std::pair<std::string, std::string>> merges)
    : language_(std::move(language)),
      kind_(kind),
      pieces_(std::move(pieces)),
      scores_(std::move(scores)),
      merges_(std::move(merges)) {
    if (pieces_.empty() || pieces_.front() != kUnkPiece)
        throw malformed_model("piece 0 must be \"<unk>\"");
    for (size_t i = 1; i < pieces_.size(); ++i) {
        const std::string& p = pieces_[i];
        if (p.empty()) throw malformed_model("empty piece at id " + std::to_string(i));
        if (p.find_first_of(" \t\n\r\f\v") != std::string::npos)
            throw malformed_model("piece contains whitespace: \"" + p + "\"");
    }
    for (size_t i = 0; i < pieces_.size(); ++i) {
        auto [it, inserted] = piece_index_.emplace(pieces_[i], static_cast<uint32_t>(i));
        if (!inserted) throw malformed_model("duplicate piece: \"" + pieces_[i] + "\"");
        max_piece_cp_len_ = std::max(max_piece_cp_len_, utf8_count(pieces_[i]));
    }
    if (kind_ == ModelKind::scored) {
        if (scores_.size() != pieces_.size())
            throw malformed_model("scores length " + std::to_string(scores_.size()) +
                                  " does not match pieces length " +
                                  std::to_string(pieces_.size()));
        for (double s : scores_)
            if (!std::isfinite(s)) throw malformed_model("non-finite score");
        if (!merges_.empty()) throw malformed_model("scored model must not carry merges");
    } else {
        if (!scores_.empty()) throw malformed_model("bpe model must not carry scores");
        for (const auto& [l, r] : merges_)
            if (!piece_index_.count(l + r))
                throw malformed_model("merge output \"" + l + r + "\" not in pieces");
    }
}

std::optional<uint32_t> MonoTokenizer::piece_id(const std::string& piece) const {
    auto it = piece_index_.find(piece);
    if (it == piece_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<uint32_t> MonoTokenizer::encode_word_bpe(const std::string& word) const {
    std::vector<std::string> symbols = word_symbols(word);
    for (const auto& [l, r] : merges_) {
        for (size_t i = 0; i + 1 < symbols.size();) {
            if (symbols[i] == l && symbols[i + 1] == r) {
                symbols[i] = l + r;
                symbols.erase(symbols.begin() + static_cast<ptrdiff_t>(i) + 1);
            } else {
                ++i;
            }
        }
    }
    std::vector<uint32_t> ids;
    bool in_unk_run = false;
    for (const std::string& sym : symbols) {
        if (auto id = piece_id(sym)) {
            ids.push_back(*id);
            in_unk_run = false;
        } else if (!in_unk_run) {
            ids.push_back(kUnkId);
            in_unk_run = true;
        }
    }
    return ids;
}

std::vector<uint32_t> MonoTokenizer::viterbi_segment(const std::string& word) const {
    if (kind_ != ModelKind::scored)
        throw validation_error("viterbi_segment requires a scored model");
    const std::vector<std::string> cps = utf8_codepoints(word);
    const size_t n = cps.size();
    // Byte offset of each codepoint boundary, for substring extraction.
    std::vector<size_t> offs(n + 1, 0);
    for (size_t i = 0; i < n; ++i) offs[i + 1] = offs[i] + cps[i].size();

    struct Node {
        double score = -std::numeric_limits<double>::infinity();
        size_t count = 0;
        size_t prev = 0;
        uint32_t piece = kUnkId;
    };
    std::vector<Node> best(n + 1);
    best[0].score = 0.0;

    for (size_t end = 1; end <= n; ++end) {
        size_t lo = end > max_piece_cp_len_ ? end - max_piece_cp_len_ : 0;
        for (size_t start = lo; start < end; ++start) {
            std::string sub = word.substr(offs[start], offs[end] - offs[start]);
            auto id = piece_id(sub);
            double edge;
            uint32_t piece;
            if (id && *id != kUnkId) {
                edge = scores_[*id];
                piece = *id;
            } else if (start + 1 == end) {
                edge = kUnkEdgeScore;  // single-char fallback
                piece = kUnkId;
            } else {
                continue;
            }
            double cand_score = best[start].score + edge;
            size_t cand_count = best[start].count + 1;
            Node& cur = best[end];
            // Ties: fewer pieces, then the longer final piece (smaller start).
            bool better = cand_score > cur.score ||
                          (cand_score == cur.score &&
                           (cand_count < cur.count ||
                            (cand_count == cur.count && start < cur.prev)));
            if (better) cur = {cand_score, cand_count, start, piece};
        }
    }

    std::vector<uint32_t> ids;
    for (size_t pos = n; pos > 0; pos = best[pos].prev) ids.push_back(best[pos].piece);
    std::reverse(ids.begin(), ids.end());

    // Collapse maximal unk runs to a single <unk>.
    std::vector<uint32_t> out;
    for (uint32_t id : ids) {
        if (id == kUnkId && !out.empty() && out.back() == kUnkId) continue;
        out.push_back(id);
    }
    return out;
}

std::vector<uint32_t> MonoTokenizer::encode(const std::string& text, bool normalize) const {
    const std::string prepared = normalize ? normalize_text(text) : text;
    std::vector<uint32_t> ids;
    for (const std::string& word : split_words(prepared)) {
        std::vector<uint32_t> word_ids =
            kind_ == ModelKind::bpe
                ? encode_word_bpe(word)
                : viterbi_segment(std::string(kBoundaryMarker) + word);
        ids.insert(ids.end(), word_ids.begin(), word_ids.end());
    }
    return ids;
}

std::string MonoTokenizer::decode(const std::vector<uint32_t>& ids) const {
    std::string joined;
    for (uint32_t id : ids) {
        if (id >= pieces_.size()) throw id_out_of_range(id, pieces_.size());
        joined += pieces_[id];
    }
    std::string out;
    out.reserve(joined.size());
    size_t i = 0;
    while (i < joined.size()) {
        if (joined.compare(i, kBoundaryMarker.size(), kBoundaryMarker) == 0) {
            out.push_back(' ');
            i += kBoundaryMarker.size();
        } else {
            out.push_back(joined[i]);
            ++i;
        }
    }
    if (!out.empty() && out.front() == ' ') out.erase(out.begin());
    return out;
}

bool MonoTokenizer::operator==(const MonoTokenizer& other) const {
    return language_ == other.language_ && kind_ == other.kind_ && pieces_ == other.pieces_ &&
           scores_ == other.scores_ && merges_ == other.merges_;
}

TrainResult train_bpe(const std::vector<std::string>& corpus, uint32_t vocab_size,
                      const std::string& language, bool normalize) {
    // Words as symbol sequences, with occurrence counts.
    std::map<std::vector<std::string>, long> word_counts_map;
    for (const std::string& line : corpus) {
        const std::string prepared = normalize ? normalize_text(line) : line;
        for (const std::string& word : split_words(prepared))
            ++word_counts_map[word_symbols(word)];
    }
    if (word_counts_map.empty()) throw empty_corpus();

    std::vector<std::pair<std::vector<std::string>, long>> words(word_counts_map.begin(),
                                                                 word_counts_map.end());

    std::map<std::string, bool> base_symbols;
    for (const auto& [syms, cnt] : words)
        for (const std::string& s : syms) base_symbols[s] = true;

    if (1 + base_symbols.size() > vocab_size)
        throw vocab_too_small(vocab_size, 1 + base_symbols.size());

    std::vector<std::string> pieces;
    pieces.reserve(vocab_size);
    pieces.emplace_back(kUnkPiece);
    for (const auto& [s, _] : base_symbols) pieces.push_back(s);

    std::vector<std::pair<std::string, std::string>> merges;
    std::map<std::string, bool> piece_set;
    for (const std::string& p : pieces) piece_set[p] = true;

    while (pieces.size() < vocab_size) {
        std::map<std::pair<std::string, std::string>, long> pair_counts;
        for (const auto& [syms, cnt] : words)
            for (size_t i = 0; i + 1 < syms.size(); ++i)
                pair_counts[{syms[i], syms[i + 1]}] += cnt;

        // Most frequent pair; equal counts break toward the lexicographically
        // smaller pair, which std::map iteration order provides.
        const std::pair<std::string, std::string>* best = nullptr;
        long best_count = 0;
        for (const auto& [pr, cnt] : pair_counts) {
            if (cnt > best_count) {
                best = &pr;
                best_count = cnt;
            }
        }
        if (!best || best_count < 2) {
            return {MonoTokenizer(language, ModelKind::bpe, std::move(pieces), {},
                                  std::move(merges)),
                    true};
        }

        const auto [l, r] = *best;
        const std::string merged = l + r;
        for (auto& [syms, cnt] : words) {
            for (size_t i = 0; i + 1 < syms.size();) {
                if (syms[i] == l && syms[i + 1] == r) {
                    syms[i] = merged;
                    syms.erase(syms.begin() + static_cast<ptrdiff_t>(i) + 1);
                } else {
                    ++i;
                }
            }
        }
        merges.emplace_back(l, r);
        if (!piece_set[merged]) {
            piece_set[merged] = true;
            pieces.push_back(merged);
        }
    }
    return {MonoTokenizer(language, ModelKind::bpe, std::move(pieces), {}, std::move(merges)),
            false};
}

void save_model(const MonoTokenizer& tok, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["language"] = tok.language();
    j["kind"] = tok.kind() == ModelKind::bpe ? "bpe" : "scored";
    j["pieces"] = tok.pieces();
    if (tok.kind() == ModelKind::scored) j["scores"] = tok.scores();
    if (tok.kind() == ModelKind::bpe) {
        nlohmann::ordered_json m = nlohmann::ordered_json::array();
        for (const auto& [l, r] : tok.merges()) m.push_back({l, r});
        j["merges"] = std::move(m);
    }
    j["version"] = 1;

    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << j.dump() << '\n';
    if (!out) throw io_error("write failed: " + path.string());
}

MonoTokenizer load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw malformed_model(std::string("invalid JSON: ") + e.what());
    }

    for (const char* field : {"language", "kind", "pieces", "version"})
        if (!j.contains(field)) throw malformed_model(std::string("missing field \"") + field + "\"");
    if (j["version"] != 1)
        throw malformed_model("unsupported version " + j["version"].dump());

    const std::string kind_str = j["kind"].get<std::string>();
    ModelKind kind;
    if (kind_str == "bpe")
        kind = ModelKind::bpe;
    else if (kind_str == "scored")
        kind = ModelKind::scored;
    else
        throw malformed_model("unknown kind \"" + kind_str + "\"");

    std::vector<std::string> pieces;
    std::vector<double> scores;
    std::vector<std::pair<std::string, std::string>> merges;
    try {
        pieces = j["pieces"].get<std::vector<std::string>>();
        if (kind == ModelKind::scored) {
            if (!j.contains("scores")) throw malformed_model("missing field \"scores\"");
            scores = j["scores"].get<std::vector<double>>();
        }
        if (kind == ModelKind::bpe && j.contains("merges")) {
            for (const auto& m : j["merges"]) {
                if (!m.is_array() || m.size() != 2) throw malformed_model("merge is not a pair");
                merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw malformed_model(std::string("bad field type: ") + e.what());
    }

    return MonoTokenizer(j["language"].get<std::string>(), kind, std::move(pieces),
                         std::move(scores), std::move(merges));
}

}  // namespace cst

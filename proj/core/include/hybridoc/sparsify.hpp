// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Turns LM-head logits into a quantized lexical vector:
//   pool chunks (max) -> lemmatize (max per lemma) -> filter -> log-saturate,
//   scale, round, keep the top-k.

#include "hybridoc/types.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace hybridoc::sparsify {

/// token -> lemma. Tokens absent from the table lemmatize to themselves.
class LemmaMap {
public:
    LemmaMap() = default;
    explicit LemmaMap(std::unordered_map<std::string, std::string> entries);

    /// `token<TAB>lemma` per line.
    static LemmaMap load(const std::filesystem::path& path);

    std::string_view lookup(std::string_view token) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    std::unordered_map<std::string, std::string, Hash, std::equal_to<>> entries_;
};

/// Lowercase lemma strings removed during filtering.
class StopwordSet {
public:
    StopwordSet() = default;
    /// Entries are trimmed and lowercased; empty entries are dropped.
    explicit StopwordSet(std::unordered_set<std::string> entries);

    /// One token per line, '#' lines ignored.
    static StopwordSet load(const std::filesystem::path& path);

    bool contains(std::string_view lowercase_lemma) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    std::unordered_set<std::string, Hash, std::equal_to<>> entries_;
};

struct Resources {
    LemmaMap lemmas;
    StopwordSet stopwords;
};

struct Params {
    std::size_t top_k = 256;
    double scale = 100.0;
};

/// Elementwise max over the union of keys. Throws InvalidArgument("no chunks").
TokenLogits pool_chunk_logits(std::span<const TokenLogits> chunks);

TokenLogits lemmatize_aggregate(const TokenLogits& logits, const LemmaMap& lemmas);

/// True when the whitespace-trimmed token has at least one letter. Letters
/// are ASCII a-z/A-Z and any non-ASCII code point outside the Latin-1
/// punctuation/symbol range, the multiplication/division signs and the
/// General Punctuation block.
bool has_alphabetic(std::string_view token);

/// Drops invalid tokens and stopwords; survivors are trimmed and lowercased,
/// collisions keep the max.
TokenLogits filter_tokens(const TokenLogits& logits, const StopwordSet& stopwords);

/// weight = round_half_away(scale * ln(1 + max(0, v))); weights <= 0 dropped;
/// the top_k largest kept, ties to the lexicographically smaller key.
SparseVec process_logits(const TokenLogits& logits, const Params& params = {});

SparseVec sparsify_record(std::span<const TokenLogits> chunks, const LemmaMap& lemmas,
                          const StopwordSet& stopwords, const Params& params = {});

inline SparseVec sparsify_record(std::span<const TokenLogits> chunks, const Resources& res,
                                 const Params& params = {}) {
    return sparsify_record(chunks, res.lemmas, res.stopwords, params);
}

}  // namespace hybridoc::sparsify

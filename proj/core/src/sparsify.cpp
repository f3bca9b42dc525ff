// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/sparsify.hpp"

#include "hybridoc/error.hpp"
#include "hybridoc/text.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace hybridoc::sparsify {

namespace {

// Decodes one UTF-8 code point starting at s[i]; advances i. Malformed
// sequences yield 0 and consume one byte.
char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0;
    }
    if (i + len > s.size()) {
        ++i;
        return 0;
    }
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

bool is_letter(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp < 0xC0) return false;                      // C1 controls, Latin-1 punctuation/symbols
    if (cp == 0xD7 || cp == 0xF7) return false;       // multiplication / division sign
    if (cp >= 0x2000 && cp <= 0x206F) return false;   // General Punctuation
    if (cp == 0xFFFD || cp == 0xFEFF) return false;   // replacement char, BOM
    return true;
}

}  // namespace

LemmaMap::LemmaMap(std::unordered_map<std::string, std::string> entries) {
    for (auto& [token, lemma] : entries) {
        if (lemma.empty()) throw InvalidArgument("empty lemma for token \"" + token + "\"");
        entries_.emplace(token, std::move(lemma));
    }
}

LemmaMap LemmaMap::load(const std::filesystem::path& path) {
    std::unordered_map<std::string, std::string> entries;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (line.empty()) return;
        const auto fields = text::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw ParseError(path.string(), number, "expected token<TAB>lemma");
        }
        entries.insert_or_assign(std::string(fields[0]), std::string(fields[1]));
    });
    return LemmaMap(std::move(entries));
}

std::string_view LemmaMap::lookup(std::string_view token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? token : std::string_view(it->second);
}

StopwordSet::StopwordSet(std::unordered_set<std::string> entries) {
    for (const auto& e : entries) {
        auto normalized = text::ascii_lower(text::trim(e));
        if (!normalized.empty()) entries_.insert(std::move(normalized));
    }
}

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
    std::unordered_set<std::string> entries;
    text::for_each_line(path, [&](std::size_t, std::string_view line) {
        if (!line.empty() && line.front() == '#') return;
        entries.emplace(line);
    });
    return StopwordSet(std::move(entries));
}

bool StopwordSet::contains(std::string_view lowercase_lemma) const {
    return entries_.find(lowercase_lemma) != entries_.end();
}

TokenLogits pool_chunk_logits(std::span<const TokenLogits> chunks) {
    if (chunks.empty()) throw InvalidArgument("no chunks");
    TokenLogits pooled = chunks.front();
    for (const auto& chunk : chunks.subspan(1)) {
        for (const auto& [token, value] : chunk) {
            auto [it, inserted] = pooled.emplace(token, value);
            if (!inserted && value > it->second) it->second = value;
        }
    }
    return pooled;
}

TokenLogits lemmatize_aggregate(const TokenLogits& logits, const LemmaMap& lemmas) {
    TokenLogits out;
    for (const auto& [token, value] : logits) {
        const auto lemma = lemmas.lookup(token);
        auto it = out.find(lemma);
        if (it == out.end()) {
            out.emplace(std::string(lemma), value);
        } else if (value > it->second) {
            it->second = value;
        }
    }
    return out;
}

bool has_alphabetic(std::string_view token) {
    const auto t = text::trim(token);
    for (std::size_t i = 0; i < t.size();) {
        if (is_letter(next_code_point(t, i))) return true;
    }
    return false;
}

TokenLogits filter_tokens(const TokenLogits& logits, const StopwordSet& stopwords) {
    TokenLogits out;
    for (const auto& [token, value] : logits) {
        if (!has_alphabetic(token)) continue;
        auto key = text::ascii_lower(text::trim(token));
        if (stopwords.contains(key)) continue;
        auto [it, inserted] = out.emplace(std::move(key), value);
        if (!inserted && value > it->second) it->second = value;
    }
    return out;
}

namespace {

// round(scale * log1p(v)), halves away from zero. The double result can be
// an ulp off, which only matters right at a .5 boundary; those are redone
// with 50 significant digits.
double quantize(double value, double scale) {
    const double y = scale * std::log1p(value);
    const double frac = y - std::floor(y);
    if (std::abs(frac - 0.5) > 1e-9 * std::max(1.0, std::abs(y))) return std::round(y);
    using Big = boost::multiprecision::cpp_bin_float_50;
    const Big x = Big(scale) * boost::multiprecision::log1p(Big(value));
    const Big r = x >= 0 ? boost::multiprecision::floor(x + Big(0.5)) : boost::multiprecision::ceil(x - Big(0.5));
    return r.convert_to<double>();
}

}  // namespace

SparseVec process_logits(const TokenLogits& logits, const Params& params) {
    struct Weighted {
        const std::string* key;
        std::int32_t weight;
    };
    std::vector<Weighted> kept;
    kept.reserve(logits.size());
    for (const auto& [token, value] : logits) {
        if (!(value > 0.0) || !std::isfinite(value)) continue;  // ReLU, non-finite dropped
        const double w = quantize(value, params.scale);
        if (w <= 0.0) continue;
        kept.push_back({&token, static_cast<std::int32_t>(w)});
    }
    const auto better = [](const Weighted& a, const Weighted& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return *a.key < *b.key;
    };
    if (kept.size() > params.top_k) {
        std::nth_element(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(params.top_k), kept.end(),
                         better);
        kept.resize(params.top_k);
    }
    SparseVec out;
    for (const auto& w : kept) out.emplace(*w.key, w.weight);
    return out;
}

SparseVec sparsify_record(std::span<const TokenLogits> chunks, const LemmaMap& lemmas,
                          const StopwordSet& stopwords, const Params& params) {
    return process_logits(filter_tokens(lemmatize_aggregate(pool_chunk_logits(chunks), lemmas), stopwords),
                          params);
}

}  // namespace hybridoc::sparsify

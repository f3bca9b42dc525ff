// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hybridoc/sparsify.hpp"
#include "hybridoc/vecindex.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace hybridoc::index {

/// Sparse postings, norms and the dense store of one corpus.
struct IndexSnapshot {
    InvertedIndex sparse;
    DenseStore dense;

    friend bool operator==(const IndexSnapshot&, const IndexSnapshot&) = default;
};

/// Sparsifies every document and builds both channels.
IndexSnapshot build_snapshot(std::span<const DocumentRecord> corpus, const sparsify::Resources& resources,
                             const sparsify::Params& params = {});

/// Binary, little-endian, leading magic "HYDX1\n". Layout:
///   u32 n_docs, n_docs x str            sparse doc ids (ascending)
///   u32 n_terms, n_terms x { str lemma, u32 n, n x (u32 ordinal, i32 weight) }
///   n_docs x f64                         norms (0 for empty vectors)
///   u8 kind, u32 dim, u32 n_dense,
///   n_dense x { str doc_id, u32 n_vec, n_vec*dim x f32 }
/// where str is u32 length + bytes. Encoding is a pure function of the
/// snapshot, so decode followed by encode reproduces the input bytes.
std::string encode_snapshot(const IndexSnapshot& snapshot);

/// Throws InvalidArgument on truncation, bad magic or inconsistent norms;
/// load_snapshot reports the same as ParseError naming the file.
IndexSnapshot decode_snapshot(std::string_view bytes);

void save_snapshot(const std::filesystem::path& path, const IndexSnapshot& snapshot);
IndexSnapshot load_snapshot(const std::filesystem::path& path);

}  // namespace hybridoc::index

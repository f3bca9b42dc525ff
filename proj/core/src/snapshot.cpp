// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/snapshot.hpp"

#include "hybridoc/error.hpp"
#include "hybridoc/text.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

namespace hybridoc::index {

namespace {

constexpr std::string_view kMagic = "HYDX1\n";

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void count(std::size_t n) {
        if (n > UINT32_MAX) throw InvalidArgument("snapshot section too large");
        u32(static_cast<std::uint32_t>(n));
    }
    void str(std::string_view s) {
        count(s.size());
        out_.append(s);
    }
    void raw(std::string_view s) { out_.append(s); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const auto n = u32();
        return std::string(take(n));
    }
    std::string_view take(std::size_t n) {
        if (in_.size() - pos_ < n) throw InvalidArgument("truncated snapshot");
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const noexcept { return pos_ == in_.size(); }

private:
    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace

IndexSnapshot build_snapshot(std::span<const DocumentRecord> corpus, const sparsify::Resources& resources,
                             const sparsify::Params& params) {
    std::vector<std::pair<std::string, SparseVec>> sparse;
    std::vector<std::pair<std::string, DenseRep>> dense;
    sparse.reserve(corpus.size());
    dense.reserve(corpus.size());
    for (const auto& doc : corpus) {
        sparse.emplace_back(doc.doc_id, sparsify::sparsify_record(doc.raw_logits, resources, params));
        dense.emplace_back(doc.doc_id, doc.dense);
    }
    IndexSnapshot snap;
    snap.sparse = InvertedIndex::build(sparse);
    snap.dense = DenseStore::build(std::move(dense));
    return snap;
}

std::string encode_snapshot(const IndexSnapshot& snapshot) {
    Writer w;
    w.raw(kMagic);

    const auto& sparse = snapshot.sparse;
    w.count(sparse.size());
    for (const auto& id : sparse.doc_ids()) w.str(id);
    w.count(sparse.postings().size());
    for (const auto& [lemma, list] : sparse.postings()) {
        w.str(lemma);
        w.count(list.size());
        for (const auto& p : list) {
            w.u32(p.doc);
            w.i32(p.weight);
        }
    }
    for (std::uint32_t i = 0; i < sparse.size(); ++i) w.f64(sparse.norm_at(i));

    const auto& dense = snapshot.dense;
    w.u8(dense.kind() == DenseKind::single ? 0 : 1);
    w.count(dense.dim());
    w.count(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) {
        w.str(dense.doc_ids()[i]);
        const auto& rep = dense.at(i);
        w.count(rep.count());
        for (const auto& v : rep.vectors) {
            for (float x : v) w.f32(x);
        }
    }
    return w.take();
}

IndexSnapshot decode_snapshot(std::string_view bytes) {
    if (bytes.substr(0, kMagic.size()) != kMagic) throw InvalidArgument("not a HYDX1 snapshot");
    Reader r(bytes.substr(kMagic.size()));

    std::vector<std::string> doc_ids(r.u32());
    for (auto& id : doc_ids) id = r.str();
    PostingMap postings;
    const auto n_terms = r.u32();
    for (std::uint32_t t = 0; t < n_terms; ++t) {
        auto lemma = r.str();
        std::vector<Posting> list(r.u32());
        for (auto& p : list) {
            p.doc = r.u32();
            p.weight = r.i32();
        }
        if (!postings.emplace(std::move(lemma), std::move(list)).second) {
            throw InvalidArgument("duplicate lemma in snapshot");
        }
    }
    std::vector<double> norms(doc_ids.size());
    for (auto& n : norms) n = r.f64();

    IndexSnapshot snap;
    try {
        snap.sparse = InvertedIndex::from_parts(std::move(doc_ids), std::move(postings));
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("corrupt postings: ") + e.what());
    }
    for (std::uint32_t i = 0; i < norms.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(norms[i]) != std::bit_cast<std::uint64_t>(snap.sparse.norm_at(i))) {
            throw InvalidArgument("stored norms disagree with postings");
        }
    }

    const auto kind_byte = r.u8();
    if (kind_byte > 1) throw InvalidArgument("unknown dense kind");
    const auto kind = kind_byte == 0 ? DenseKind::single : DenseKind::multi;
    const auto dim = r.u32();
    const auto n_dense = r.u32();
    std::vector<std::pair<std::string, DenseRep>> entries;
    entries.reserve(n_dense);
    for (std::uint32_t i = 0; i < n_dense; ++i) {
        auto id = r.str();
        DenseRep rep;
        rep.kind = kind;
        rep.vectors.resize(r.u32());
        for (auto& v : rep.vectors) {
            v.resize(dim);
            for (auto& x : v) x = r.f32();
        }
        entries.emplace_back(std::move(id), std::move(rep));
    }
    if (!r.done()) throw InvalidArgument("trailing bytes after snapshot");
    try {
        snap.dense = DenseStore::build(std::move(entries));
    } catch (const Error& e) {
        throw InvalidArgument(std::string("corrupt dense store: ") + e.what());
    }
    return snap;
}

void save_snapshot(const std::filesystem::path& path, const IndexSnapshot& snapshot) {
    text::write_file_atomic(path, encode_snapshot(snapshot));
}

IndexSnapshot load_snapshot(const std::filesystem::path& path) {
    const auto bytes = text::read_file(path);
    try {
        return decode_snapshot(bytes);
    } catch (const InvalidArgument& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

}  // namespace hybridoc::index

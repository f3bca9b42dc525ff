// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixture_gen.hpp"
#include "hybridoc/dump_io.hpp"
#include "hybridoc/text.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

namespace ht = hybridoc::testing;

TEST(Fixture, GeneratorReproducesCheckedInFiles) {
    const auto files = hybridoc::fixture::generate();
    for (const auto& [name, contents] : files) {
        const auto path = ht::fixture_dir() / "e2e" / name;
        ASSERT_TRUE(std::filesystem::exists(path)) << path;
        EXPECT_TRUE(hybridoc::text::read_file(path) == contents) << name << " differs from the generator output";
    }
}

TEST(Fixture, DumpsAreValid) {
    const auto dir = ht::fixture_dir() / "e2e";
    std::size_t n = 0;
    EXPECT_TRUE(hybridoc::model::validate_dump_file(dir / "corpus.jsonl", hybridoc::model::RecordKind::document, &n).empty());
    EXPECT_EQ(n, 200u);
    EXPECT_TRUE(hybridoc::model::validate_dump_file(dir / "queries.jsonl", hybridoc::model::RecordKind::query, &n).empty());
    EXPECT_EQ(n, 20u);
    const auto qrels = hybridoc::model::load_qrels(dir / "qrels.tsv");
    EXPECT_EQ(qrels.size(), 20u);
}

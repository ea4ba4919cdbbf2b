// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dubkit/error.hpp"
#include "dubkit/manifest.hpp"
#include "support/generators.hpp"

#ifndef DUBKIT_TEST_DATA_DIR
#error "DUBKIT_TEST_DATA_DIR must be defined"
#endif

namespace dubkit::formats {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Manifest, MinimalRecordUsesDefaults) {
  const auto r = record_from_json(nlohmann::json{{"clip_id", "a"}});
  EXPECT_EQ(r.kind, "clip");
  EXPECT_EQ(r.status, SampleStatus::kActive);
  EXPECT_FALSE(r.scene.has_value());
  EXPECT_EQ(record_to_json(r), (nlohmann::json{{"clip_id", "a"}, {"duration", 0.0}}));
}

TEST(Manifest, UnknownFieldsSurviveRoundTrip) {
  const auto j = nlohmann::json::parse(R"({"clip_id":"a","duration":1.5,"vendor_note":{"x":[1,2]},"zz":true})");
  EXPECT_EQ(record_to_json(record_from_json(j)), j);
}

TEST(Manifest, RandomRecordsRoundTrip) {
  gen::Rng rng(21);
  std::vector<SampleRecord> records;
  for (int i = 0; i < 200; ++i) records.push_back(gen::record(rng, i));
  const auto text = write_manifest(records);
  const auto back = read_manifest(text);
  EXPECT_EQ(back, records);
  EXPECT_EQ(write_manifest(back), text);
}

TEST(Manifest, CanonicalFileIsAFixedPoint) {
  const auto text = slurp(std::filesystem::path(DUBKIT_TEST_DATA_DIR) / "canonical_manifest.jsonl");
  EXPECT_EQ(write_manifest(read_manifest(text)), text);
}

TEST(Manifest, BlankLinesAreIgnored) {
  const auto recs = read_manifest("\n{\"clip_id\":\"a\"}\n\n{\"clip_id\":\"b\"}\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[1].clip_id, "b");
}

TEST(Manifest, SchemaErrorsReportTheLine) {
  const std::vector<std::pair<std::string, std::size_t>> cases = {
      {"{\"clip_id\":\"a\"}\n{not json}\n", 2},
      {"{\"clip_id\":\"a\"}\n{\"duration\":1}\n", 2},
      {"{\"clip_id\":\"\"}\n", 1},
      {"{\"clip_id\":\"a\",\"kind\":\"movie\"}\n", 1},
      {"{\"clip_id\":\"a\",\"duration\":-1}\n", 1},
      {"{\"clip_id\":\"a\",\"scene\":\"opera\"}\n", 1},
      {"{\"clip_id\":\"a\",\"status\":\"lost\"}\n", 1},
      {"{\"clip_id\":\"a\",\"tuples\":{}}\n", 1},
      {"\n\n{\"clip_id\":\"a\",\"tuples\":[{\"start\":5,\"spk\":0,\"gender\":\"male\",\"age\":\"adult\",\"end\":5}]}\n", 3},
      {"{\"clip_id\":\"a\",\"verdicts\":[{\"stage\":\"x\",\"keep\":false}]}\n", 1},
      {"{\"clip_id\":\"a\",\"ssc_plan\":{\"token_length\":3,\"insertions\":[{\"position\":2,\"spk\":0},{\"position\":2,\"spk\":1}]}}\n", 1},
      {"{\"clip_id\":\"a\",\"diarization\":[{\"start\":3,\"end\":3,\"speaker\":\"s\"}]}\n", 1},
      {"{\"clip_id\":7}\n", 1},
  };
  for (const auto& [text, line] : cases) {
    try {
      read_manifest(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}

TEST(Manifest, FileRoundTrip) {
  gen::Rng rng(22);
  std::vector<SampleRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(gen::record(rng, i));
  const auto path = std::filesystem::temp_directory_path() / "dubkit_manifest_test.jsonl";
  write_manifest_file(path, records);
  EXPECT_EQ(read_manifest_file(path), records);
  std::filesystem::remove(path);
  EXPECT_THROW(read_manifest_file(path), Error);
}

}  // namespace
}  // namespace dubkit::formats

// Copyright 2026 The lit-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lit/errors.hpp"
#include "lit/text.hpp"
#include "lit/value.hpp"

namespace lit {
namespace {

TEST(CanonicalJson, KeyOrderIndependent) {
  const Json a = Json::parse(R"({"a":1,"b":"x"})");
  const Json b = Json::parse(R"({"b":"x","a":1})");
  EXPECT_EQ(canonical_json(a), canonical_json(b));
  EXPECT_EQ(canonical_hash(a), canonical_hash(b));
  EXPECT_EQ(canonical_hash(a), "ecf9e98ec0641e23113ff3ce8bdc78d0ddd249886517fd4a7f68cc83d4e65667");
}

TEST(CanonicalJson, EmptyObjectHashesTwoBytes) {
  EXPECT_EQ(canonical_json(Json::object()), "{}");
  EXPECT_EQ(canonical_hash(Json::object()), sha256_hex("{}"));
  EXPECT_EQ(canonical_hash(Json::object()),
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
}

// Digests below come from Python's json.dumps(sort_keys=True,
// separators=(",", ":"), ensure_ascii=False) piped through hashlib.sha256.
TEST(CanonicalJson, MatchesIndependentSerializer) {
  Json sentiment = Json::object();
  sentiment["sentence"] = "it's not the ultimate depression-era gangster movie.";
  sentiment["label"] = "0";
  sentiment["genre"] = "drama";
  EXPECT_EQ(canonical_json(sentiment),
            R"({"genre":"drama","label":"0","sentence":"it's not the ultimate depression-era gangster movie."})");
  EXPECT_EQ(canonical_hash(sentiment),
            "a399b5b77f252c6ae65ee7494bdcce2c1d1d29958eb886f30586d2d930c521be");

  const Json mixed = Json::parse(R"({"text":"café ☕ naïve","score":0.1,"n":42,"vec":[0.5,-2.25,1e-7]})");
  EXPECT_EQ(canonical_json(mixed), R"({"n":42,"score":0.1,"text":"café ☕ naïve","vec":[0.5,-2.25,1e-07]})");
  EXPECT_EQ(canonical_hash(mixed),
            "7d3eb6f12ac367bc64fd3b84526aae0ef804a97f91bbbcc6b240aa9d181f6557");

  const Json keys = Json::parse(R"({"é":1,"z":2,"a":3,"Z":[true,false,null]})");
  EXPECT_EQ(canonical_hash(keys),
            "b0a82084a4bfbdcd91ab3375dac250095836948cb1fe5c7f700bdd25d0834749");

  Json escapes = Json::object();
  escapes["s"] = "quote\" back\\ nl\n tab\t ctl\x01";
  EXPECT_EQ(canonical_hash(escapes),
            "8c53aa6f1fce9d5fc0c1d85e9c8ecfd1400a0583ac9076994d2b3a92e3f1c75f");
}

TEST(CanonicalJson, NumbersRenderShortest) {
  EXPECT_EQ(canonical_json(Json(0.1)), "0.1");
  EXPECT_EQ(canonical_json(Json(1.0 / 3.0)), "0.3333333333333333");
  EXPECT_EQ(canonical_json(Json(-7)), "-7");
  EXPECT_EQ(canonical_json(Json(std::uint64_t{18446744073709551615ULL})), "18446744073709551615");
  EXPECT_EQ(canonical_json(Json(2.5e-300)), "2.5e-300");
}

TEST(CanonicalJson, RejectsNonFinite) {
  Json v = Json::object();
  v["x"] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(canonical_hash(v), Error);
  v["x"] = Json::array({1.0, std::numeric_limits<double>::infinity()});
  try {
    canonical_hash(v);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(CanonicalJson, DumpCompactKeepsInsertionOrder) {
  Json v = Json::object();
  v["z"] = 1;
  v["a"] = "é";
  EXPECT_EQ(dump_compact(v), R"({"z":1,"a":"é"})");
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Errors, CodeNames) {
  EXPECT_EQ(error_code_name(ErrorCode::kNotApplicable), "not_applicable");
  EXPECT_EQ(error_code_name(ErrorCode::kValidation), "validation_error");
  EXPECT_EQ(error_code_name(ErrorCode::kRetryable), "retryable");
  Error e(ErrorCode::kRetryable, "boom", "probas");
  e.with_index_range(16, 32);
  ASSERT_TRUE(e.index_range());
  EXPECT_EQ(e.index_range()->first, 16u);
  EXPECT_EQ(e.field(), "probas");
}

TEST(Text, WordTokensFoldCaseAndSplitPunctuation) {
  EXPECT_EQ(text::word_tokens("It's NOT bad!"),
            (std::vector<std::string>{"it", "s", "not", "bad"}));
  EXPECT_EQ(text::word_tokens("great great!"), (std::vector<std::string>{"great", "great"}));
  EXPECT_EQ(text::word_tokens("Ünïcode ÉCOLE 42x"),
            (std::vector<std::string>{"ünïcode", "école", "42x"}));
  EXPECT_TRUE(text::word_tokens("  ...  ").empty());
}

TEST(Text, SpansPointIntoSource) {
  const std::string s = "a  Bc,d";
  const auto spans = text::word_spans(s);
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(s.substr(spans[1].begin, spans[1].end - spans[1].begin), "Bc");
  EXPECT_EQ(spans[1].folded, "bc");
  EXPECT_EQ(spans[2].begin, 6u);
}

TEST(Text, ContainsTokenRespectsBoundaries) {
  EXPECT_TRUE(text::contains_token("not bad", "not"));
  EXPECT_FALSE(text::contains_token("knot", "not"));
  EXPECT_FALSE(text::contains_token("nothing", "not"));
  EXPECT_TRUE(text::contains_token("It's NOT.", "not"));
  EXPECT_FALSE(text::contains_token("cannot", "not"));
}

TEST(Text, WhitespaceSplitAndJoin) {
  const auto parts = text::split_whitespace("  a\tb  c\n");
  EXPECT_EQ(parts, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(text::join(parts, " "), "a b c");
  EXPECT_TRUE(text::split_whitespace("   ").empty());
}

TEST(Text, CaseFoldNonAscii) {
  EXPECT_EQ(text::case_fold("ÀÉÎÕÜ Ÿ ΑΒΓ ДЖ"), "àéîõü ÿ αβγ дж");
}

}  // namespace
}  // namespace lit

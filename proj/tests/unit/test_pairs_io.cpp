#include <sstream>

#include <gtest/gtest.h>

#include "simcal/error.hpp"
#include "simcal/pairs_io.hpp"

using namespace simcal;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream is(text);
  try {
    read_pairs_jsonl(is);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(PairsJsonl, RoundTrip) {
  const std::vector<ScoredPair> pairs{{"a", -0.25, 0.0}, {"b", 0.1234567890123456789, 1.0}};
  std::stringstream ss;
  write_pairs_jsonl(ss, pairs);
  const auto back = read_pairs_jsonl(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].id, "b");
  EXPECT_EQ(back[1].model_score, pairs[1].model_score);
  EXPECT_EQ(back[0].human_score, 0.0);
}

TEST(PairsJsonl, BlankLinesSkipped) {
  std::istringstream is("\n{\"id\":\"x\",\"model_score\":0.5,\"human_score\":0.5}\n\n");
  EXPECT_EQ(read_pairs_jsonl(is).size(), 1u);
}

TEST(PairsJsonl, ErrorsNameTheLine) {
  const std::string good = "{\"id\":\"x\",\"model_score\":0.5,\"human_score\":0.5}\n";
  EXPECT_NE(error_of(good + "{\"id\":\"y\",\"model_score\":1.5,\"human_score\":0.5}\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(error_of(good + good + "{\"id\":\"y\",\"model_score\":0.5,\"human_score\":-0.1}\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(error_of("not json\n").find("line 1"), std::string::npos);
}

TEST(PairsJsonl, MissingIdDefaultsToLineNumber) {
  std::istringstream is("{\"id\":\"a\",\"model_score\":0.5,\"human_score\":0.5}\n{\"model_score\":0.5,\"human_score\":0.5}\n");
  EXPECT_EQ(read_pairs_jsonl(is).at(1).id, "2");
}

TEST(PairsJsonl, MissingFile) {
  EXPECT_THROW(load_pairs("/nonexistent/pairs.jsonl"), ValidationError);
}

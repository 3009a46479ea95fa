#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spanproto/episode.hpp"

using namespace spanproto;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("spanproto_test_" + name);
}

Episode small_episode() {
  Episode ep;
  ep.types = {"PER", "LOC"};
  LabeledSentence s1;
  s1.tokens = {"anna", "visited", "oslo"};
  s1.mentions = {{{0, 0}, "PER"}, {{2, 2}, "LOC"}};
  LabeledSentence q1;
  q1.tokens = {"oslo", "greeted", "anna"};
  q1.mentions = {{{0, 0}, "LOC"}, {{2, 2}, "PER"}};
  ep.support = {s1};
  ep.query = {q1};
  return ep;
}

}  // namespace

TEST(EpisodeFile, SingleRecordRoundStructure) {
  const auto path = temp_file("single.jsonl");
  std::ofstream out(path);
  out << R"({"types":["PER","LOC"],)"
      << R"("support":[{"tokens":["anna","visited","oslo"],"spans":[[0,0,"PER"],[2,2,"LOC"]]}],)"
      << R"("query":[{"tokens":["hi","anna"],"spans":[[1,1,"PER"]]}]})" << "\n";
  out.close();

  const EpisodeDataset ds = read_episodes(path.string());
  ASSERT_EQ(ds.episodes.size(), 1u);
  EXPECT_FALSE(ds.empty_input_warning);
  EXPECT_EQ(ds.episodes[0].types.size(), 2u);
  EXPECT_EQ(ds.episodes[0].support.size(), 1u);
  EXPECT_EQ(ds.episodes[0].query.size(), 1u);
  EXPECT_EQ(ds.episodes[0].support[0].mentions[0].type, "PER");
  fs::remove(path);
}

TEST(EpisodeFile, UnknownMentionTypeIsValidationError) {
  const auto path = temp_file("badtype.jsonl");
  std::ofstream out(path);
  out << R"({"types":["PER"],)"
      << R"("support":[{"tokens":["anna"],"spans":[[0,0,"PER"]]}],)"
      << R"("query":[{"tokens":["june","2020"],"spans":[[0,1,"TIME"]]}]})" << "\n";
  out.close();
  EXPECT_THROW(read_episodes(path.string()), ValidationError);
  fs::remove(path);
}

TEST(EpisodeFile, EmptyFileWarns) {
  const auto path = temp_file("empty.jsonl");
  std::ofstream(path).close();
  const EpisodeDataset ds = read_episodes(path.string());
  EXPECT_TRUE(ds.episodes.empty());
  EXPECT_TRUE(ds.empty_input_warning);
  fs::remove(path);
}

TEST(EpisodeFile, MalformedLineNamesLineNumber) {
  const auto path = temp_file("malformed.jsonl");
  std::ofstream out(path);
  out << R"({"types":["PER"],"support":[{"tokens":["anna"],"spans":[[0,0,"PER"]]}],)"
      << R"("query":[{"tokens":["x"],"spans":[]}]})" << "\n";
  out << "{not json\n";
  out.close();
  try {
    read_episodes(path.string());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  fs::remove(path);
}

TEST(EpisodeFile, RoundTripIsIdentity) {
  EpisodeDataset ds;
  ds.split = Split::dev;
  for (int i = 0; i < 3; ++i) ds.episodes.push_back(small_episode());
  // Nested spans survive verbatim.
  ds.episodes[1].support[0].mentions.push_back({{0, 2}, "LOC"});

  const auto path = temp_file("roundtrip.jsonl");
  write_episodes(ds, path.string());
  const EpisodeDataset back = read_episodes(path.string(), Split::dev);
  EXPECT_EQ(ds, back);

  // Bit-stable: a second write of the re-read dataset is byte-identical.
  const auto path2 = temp_file("roundtrip2.jsonl");
  write_episodes(back, path2.string());
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  EXPECT_EQ(sa, sb);
  fs::remove(path);
  fs::remove(path2);
}

TEST(EpisodeFile, UnwritablePathIsIoError) {
  EpisodeDataset ds;
  ds.episodes.push_back(small_episode());
  EXPECT_THROW(write_episodes(ds, "/nonexistent-dir/x/y.jsonl"), IoError);
}

TEST(EpisodeValidation, DuplicateSpanTypePairRejected) {
  Episode ep = small_episode();
  ep.query[0].mentions.push_back(ep.query[0].mentions[0]);
  EXPECT_THROW(ep.validate(0), ValidationError);
}

TEST(EpisodeValidation, SpanOutOfRangeRejected) {
  Episode ep = small_episode();
  ep.query[0].mentions.push_back({{2, 3}, "PER"});
  EXPECT_THROW(ep.validate(0), ValidationError);
}

TEST(EpisodeValidation, TypeWithoutSupportMentionRejected) {
  Episode ep = small_episode();
  ep.types.push_back("ORG");
  EXPECT_THROW(ep.validate(0), ValidationError);
}

TEST(EpisodeValidation, ZeroMentionQuerySentencePermitted) {
  Episode ep = small_episode();
  ep.query[0].mentions.clear();
  EXPECT_NO_THROW(ep.validate(0));
}

TEST(EpisodeValidation, NestedSpansAllowed) {
  Episode ep = small_episode();
  ep.support[0].mentions.push_back({{0, 2}, "LOC"});
  ep.support[0].mentions.push_back({{1, 2}, "LOC"});
  EXPECT_NO_THROW(ep.validate(0));
}

TEST(EpisodeValidation, ErrorNamesEpisodeIndexAndField) {
  Episode ep = small_episode();
  ep.query[0].mentions.push_back({{5, 9}, "PER"});
  try {
    ep.validate(7);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("episode 7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("spans"), std::string::npos) << msg;
  }
}

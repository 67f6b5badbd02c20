#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "l2s/conll.hpp"

using namespace l2s;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

std::string fixture(const char* name) {
  return std::string(L2S_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("blank lines separate sentences") {
  auto path = write_temp("l2s_two_sents.conll", "a X\nb Y\n\nc X\n");
  LabelDict labels;
  auto sents = read_conll(path, -1, labels);
  REQUIRE(sents.size() == 2);
  REQUIRE(sents[0].size() == 2);
  REQUIRE(sents[1].size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("empty file yields an empty corpus") {
  auto path = write_temp("l2s_empty.conll", "");
  LabelDict labels;
  REQUIRE(read_conll(path, -1, labels).empty());
  std::remove(path.c_str());
}

TEST_CASE("ragged columns raise a parse error naming the line") {
  auto path = write_temp("l2s_ragged.conll", "a P X\nb X\n");
  LabelDict labels;
  try {
    read_conll(path, -1, labels);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    REQUIRE(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("label ids follow first-appearance order") {
  auto path = write_temp("l2s_labels.conll", "a X\nb Y\nc X\n\nd Z\n");
  LabelDict labels;
  auto sents = read_conll(path, -1, labels);
  REQUIRE(labels.size() == 3);
  REQUIRE(labels.names == std::vector<std::string>{"X", "Y", "Z"});
  REQUIRE(sents[0].gold_labels == std::vector<int>{0, 1, 0});
  std::remove(path.c_str());
}

TEST_CASE("negative label column counts from the end") {
  auto path = write_temp("l2s_cols.conll", "w1 P1 X\n");
  LabelDict last, first;
  read_conll(path, -1, last);
  read_conll(path, 0, first);
  REQUIRE(last.names == std::vector<std::string>{"X"});
  REQUIRE(first.names == std::vector<std::string>{"w1"});
  std::remove(path.c_str());
}

TEST_CASE("bundled BIO fixture has a 7-label dictionary") {
  LabelDict labels;
  auto sents = read_conll(fixture("ner_fixture.conll"), -1, labels);
  REQUIRE(sents.size() == 5);
  REQUIRE(labels.size() == 7);
}

TEST_CASE("fixture round-trips through write_conll byte for byte") {
  LabelDict labels;
  auto sents = read_conll(fixture("ner_fixture.conll"), -1, labels);
  std::ostringstream rewritten;
  write_conll(rewritten, sents);

  std::ifstream in(fixture("ner_fixture.conll"));
  std::stringstream original;
  original << in.rdbuf();
  REQUIRE(rewritten.str() == original.str());

  // and structurally through a second read
  auto path = write_temp("l2s_roundtrip.conll", rewritten.str());
  LabelDict labels2;
  auto sents2 = read_conll(path, -1, labels2);
  REQUIRE(sents2.size() == sents.size());
  REQUIRE(labels2.names == labels.names);
  for (size_t s = 0; s < sents.size(); ++s)
    REQUIRE(sents2[s].gold_labels == sents[s].gold_labels);
  std::remove(path.c_str());
}

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdg/spec_doc.hpp"

using namespace tdg;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(TDG_SPEC_DIR))
    if (e.path().extension() == ".tdg") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("minimal document parses") {
  auto r = parse_spec(
      "digraph d rank 0\n"
      "vertex u rank 0\n"
      "vertex v rank 0\n"
      "arc a from u to v\n");
  REQUIRE(r.ok());
  CHECK(r.bundle.vertices.size() == 2);
  CHECK(r.bundle.arcs.size() == 1);
  CHECK(r.bundle.name == "d");
}

TEST_CASE("unknown keywords are rejected") {
  auto r = parse_spec("digraph d rank 0\nfrobnicate x\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.front().code == "SyntaxError");
}

TEST_CASE("duplicate ids are rejected") {
  auto r = parse_spec("digraph d rank 0\nvertex u rank 0\nvertex u rank 0\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.front().code == "DuplicateId");
}

TEST_CASE("undefined template node is a forward reference") {
  auto r = parse_spec(
      "digraph d rank 0\n"
      "template t { node a; arc x from a@k to b@k; }\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.front().code == "ForwardReference");
}

TEST_CASE("instance of unknown template is a forward reference") {
  auto r = parse_spec("digraph d rank 0\ninstance i template nope\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.front().code == "ForwardReference");
}

TEST_CASE("errors carry line and column") {
  auto r = parse_spec("digraph d rank 0\nvertex u rank banana\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.front().line == 2);
  CHECK(r.errors.front().col > 1);
}

TEST_CASE("reference syntax round-trips through Ref::str") {
  for (const char* s :
       {"u", "v1[3]", "v1[r+1]", "lad.top@5", "rays[r].d@k+1", "V.in",
        "V.out[r-1]", "x[k]", "line.n@0"}) {
    Ref ref;
    REQUIRE_MESSAGE(parse_ref(s, ref, "k", "r"), s);
    CHECK(ref.str() == s);
  }
}

TEST_CASE("parse-print-parse is the identity on the corpus") {
  for (const auto& path : corpus_files()) {
    CAPTURE(path);
    auto first = parse_spec(slurp(path));
    std::string msg1 =
        first.errors.empty() ? std::string() : first.errors.front().message;
    REQUIRE_MESSAGE(first.ok(), path << ": " << msg1);
    std::string printed = print_spec(first.bundle);
    auto second = parse_spec(printed);
    std::string msg2 =
        second.errors.empty() ? std::string() : second.errors.front().message;
    REQUIRE_MESSAGE(second.ok(), path << " reprint: " << msg2);
    CHECK(print_spec(second.bundle) == printed);
  }
}

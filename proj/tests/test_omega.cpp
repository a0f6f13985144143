#include <doctest.h>

#include "tdg/connect.hpp"
#include "tdg/omega.hpp"
#include "tdg/spec_doc.hpp"

using namespace tdg;

namespace {

const char* kStar =
    "digraph star rank arrow\n"
    "vertex hub rank 0\n"
    "arrow-template base 0 {\n"
    "  vertex-pattern A from 1 members [ S.out[k-1] ];\n"
    "  walk-pattern S from 0 mode out terminal hub tips out;\n"
    "}\n";

const char* kArrow =
    "digraph arrowex rank arrow\n"
    "arrow-template base 0 {\n"
    "  vertex-pattern V from 0 members [ W.out[k-1] ];\n"
    "  walk-pattern W from 0 mode out terminal V[k] tips out;\n"
    "}\n"
    "arrow-walk Aout mode out base V[0] spine V W\n";

const char* kArrowBoth =
    "digraph arrowboth rank arrow\n"
    "arrow-template base 0 {\n"
    "  vertex-pattern V from 0 members [ W.out[k-1] Wi.in[k-1] ];\n"
    "  walk-pattern W from 0 mode out terminal V[k] tips out;\n"
    "  walk-pattern Wi from 0 mode in terminal V[k] tips in;\n"
    "}\n"
    "arrow-walk Aout mode out base V[0] spine V W\n"
    "arrow-walk Ain mode in base V[0] spine V Wi\n"
    "arrow-walk E mode endless base V[0] out-spine V W in-spine V Wi\n";

}  // namespace

TEST_CASE("the star assembles but has no arrow ditips") {
  auto b = parse_spec_or_throw(kStar);
  auto assembled = assemble_arrow(b);
  CHECK(assembled.rank.is_arrow());
  CHECK(arrow_ditips(assembled).empty());
  CHECK(validate_bundle(assembled).ok());
}

TEST_CASE("no spine-shaped arrow walk validates over the star") {
  auto b = parse_spec_or_throw(kStar);
  ArrowWalk w;
  w.id = "X";
  w.mode = WalkMode::ExtendedOut;
  REQUIRE(parse_ref("A[1]", w.base, "k", ""));
  w.spine_vertex = "A";
  w.spine_walk = "S";
  CHECK_THROWS_WITH_AS(is_extended_arrow(b, w),
                       doctest::Contains("InvalidArrowWalk"), DomainError);
}

TEST_CASE("the single out-diwalk yields exactly one arrow outtip") {
  auto b = parse_spec_or_throw(kArrow);
  CHECK(validate_bundle(b).ok());
  auto tips = arrow_ditips(b);
  REQUIRE(tips.size() == 1);
  CHECK(tips[0].id == "Aout.out");
  CHECK(tips[0].dir == TipDir::Out);
  CHECK(tips[0].rank.is_arrow());
  CHECK(is_extended_arrow(b, b.arrow_walks.at("Aout")));
}

TEST_CASE("joining matching in and out presentations is extended endless") {
  auto b = parse_spec_or_throw(kArrowBoth);
  auto joined = join_endless(b, b.arrow_walks.at("Ain"), b.arrow_walks.at("Aout"));
  CHECK(joined.mode == WalkMode::Endless);
  CHECK(is_extended_arrow(b, joined));
  // The declared endless walk E shares both spines, so it lands in the same
  // tip classes.
  auto tips = arrow_ditips(b);
  REQUIRE(tips.size() == 2);
  for (const auto& t : tips) CHECK(t.members.size() == 2);
}

TEST_CASE("join with mismatched bases fails") {
  auto b = parse_spec_or_throw(kArrowBoth);
  ArrowWalk in2 = b.arrow_walks.at("Ain");
  REQUIRE(parse_ref("V[1]", in2.base, "k", ""));
  CHECK_THROWS_WITH_AS(join_endless(b, in2, b.arrow_walks.at("Aout")),
                       doctest::Contains("BaseMismatch"), DomainError);
  CHECK_THROWS_AS(
      join_endless(b, b.arrow_walks.at("Aout"), b.arrow_walks.at("Ain")),
      DomainError);
}

TEST_CASE("elevate_to_omega on the star reports EmptyTipSet") {
  auto b = parse_spec_or_throw(kStar);
  PartitionSpec spec;
  spec.rank = Rank::arrow();
  CHECK_THROWS_WITH_AS(elevate_to_omega(b, spec),
                       doctest::Contains("EmptyTipSet"), DomainError);
}

TEST_CASE("elevate_to_omega merges an endless walk's tips into one vertex") {
  auto b = parse_spec_or_throw(kArrowBoth);
  PartitionSpec spec;
  spec.id = "merge";
  spec.rank = Rank::arrow();
  PartitionCell cell;
  cell.id = "vo";
  Ref r1, r2;
  REQUIRE(parse_ref("Ain.in", r1));
  REQUIRE(parse_ref("Aout.out", r2));
  cell.tips = {r1, r2};
  spec.cells.push_back(cell);
  auto lifted = elevate_to_omega(b, spec);
  CHECK(lifted.rank.is_omega());
  REQUIRE(lifted.vertices.count("vo"));
  CHECK(lifted.vertices.at("vo").in_members.size() == 1);
  CHECK(lifted.vertices.at("vo").out_members.size() == 1);
  CHECK(validate_bundle(lifted).ok());

  // Incomplete and overlapping partitions fail.
  PartitionSpec missing = spec;
  missing.cells[0].tips.pop_back();
  CHECK_THROWS_WITH_AS(elevate_to_omega(b, missing),
                       doctest::Contains("NotAPartition"), DomainError);
}

TEST_CASE("omega diwalks validate through arrow tips") {
  auto b = parse_spec_or_throw(kArrowBoth);
  PartitionSpec spec;
  spec.id = "merge";
  spec.rank = Rank::arrow();
  PartitionCell cell;
  cell.id = "vo";
  Ref r1, r2;
  REQUIRE(parse_ref("Ain.in", r1));
  REQUIRE(parse_ref("Aout.out", r2));
  cell.tips = {r1, r2};
  spec.cells.push_back(cell);
  auto lifted = elevate_to_omega(b, spec);

  CHECK_NOTHROW(validate_omega_diwalk(lifted, {"vo"}));
  CHECK_NOTHROW(validate_omega_diwalk(lifted, {"vo", "E", "vo"}));
  CHECK_THROWS_WITH_AS(validate_omega_diwalk(lifted, {"vo", "Aout", "vo"}),
                       doctest::Contains("NonConformingDirection"),
                       DomainError);
  CHECK_THROWS_AS(validate_omega_diwalk(lifted, {"vo", "E"}), DomainError);
}

TEST_CASE("level stubs materialize with fresh ids and validate up to k=4") {
  auto b = parse_spec_or_throw(kArrowBoth);
  auto stubs = materialize_arrow_levels(b, 4);
  REQUIRE(stubs.size() == 5);
  for (const auto& s : stubs) {
    CHECK(s.rank == Rank::finite(s.level));
    if (s.level >= 1) {
      REQUIRE(s.vertices.size() == 1);
      CHECK(s.vertices[0].in_members.size() +
                s.vertices[0].out_members.size() ==
            2);
    }
  }
}

TEST_CASE("id collisions across levels raise TemplateInstantiationError") {
  auto b = parse_spec_or_throw(kArrow);
  // A concrete vertex colliding with a materialized pattern id.
  Vertex clash;
  clash.id = "V[1]";
  clash.rank = Rank::finite(0);
  b.vertices[clash.id] = clash;
  CHECK_THROWS_WITH_AS(materialize_arrow_levels(b, 2),
                       doctest::Contains("TemplateInstantiationError"),
                       DomainError);
}

TEST_CASE("arrow bundles validate as every finite truncation") {
  auto b = parse_spec_or_throw(kArrowBoth);
  for (int k = 0; k <= 4; ++k) {
    auto stubs = materialize_arrow_levels(b, k);
    CHECK(stubs.size() == static_cast<std::size_t>(k + 1));
  }
  CHECK(validate_bundle(b).ok());
}

TEST_CASE("omega components run over the omega vertices") {
  auto b = parse_spec_or_throw(kArrowBoth);
  PartitionSpec spec;
  spec.id = "split";
  spec.rank = Rank::arrow();
  PartitionCell c1, c2;
  c1.id = "vin";
  c2.id = "vout";
  Ref r1, r2;
  REQUIRE(parse_ref("Ain.in", r1));
  REQUIRE(parse_ref("Aout.out", r2));
  c1.tips = {r1};
  c2.tips = {r2};
  spec.cells = {c1, c2};
  auto lifted = elevate_to_omega(b, spec);
  // The endless walk E steps from the intip holder to the outtip holder.
  auto weak = components(lifted, Rank::omega(), ConnectKind::Weak);
  bool joined = false;
  for (const auto& blk : weak.blocks) {
    if (std::count(blk.members.begin(), blk.members.end(), "vin") &&
        std::count(blk.members.begin(), blk.members.end(), "vout"))
      joined = true;
  }
  CHECK(joined);
}

TEST_CASE("finitely many overridden initial terms keep a walk extended") {
  auto b = parse_spec_or_throw(kArrow);
  ArrowWalk w = b.arrow_walks.at("Aout");
  w.id = "Aover";
  w.overrides[0] = "alt0";
  w.overrides[1] = "alt1";
  w.overrides[2] = "alt2";
  CHECK(is_extended_arrow(b, w));
  // Overrides do not split tip classes: eventual identity ignores finitely
  // many terms.
  Bundle b2 = b;
  b2.arrow_walks[w.id] = w;
  auto tips = arrow_ditips(b2);
  REQUIRE(tips.size() == 1);
  CHECK(tips[0].members.size() == 2);
}

TEST_CASE("an omega step needs its tips in the flanking vertices") {
  auto b = parse_spec_or_throw(kArrowBoth);
  PartitionSpec spec;
  spec.id = "split";
  spec.rank = Rank::arrow();
  PartitionCell c1, c2;
  c1.id = "vin";
  c2.id = "vout";
  Ref r1, r2;
  REQUIRE(parse_ref("Ain.in", r1));
  REQUIRE(parse_ref("Aout.out", r2));
  c1.tips = {r1};
  c2.tips = {r2};
  spec.cells = {c1, c2};
  auto lifted = elevate_to_omega(b, spec);
  CHECK_NOTHROW(validate_omega_diwalk(lifted, {"vin", "E", "vout"}));
  CHECK_THROWS_WITH_AS(validate_omega_diwalk(lifted, {"vout", "E", "vout"}),
                       doctest::Contains("BadIncidence"), DomainError);
}

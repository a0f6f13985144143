#include <doctest.h>

#include <vector>
#include "tdg/rank.hpp"

using namespace tdg;

TEST_CASE("rank compare is the stated total order") {
  CHECK(rank_compare(Rank::finite(3), Rank::finite(3)) == Ordering::Equal);
  CHECK(rank_compare(Rank::finite(1000000), Rank::arrow()) == Ordering::Less);
  CHECK(rank_compare(Rank::arrow(), Rank::omega()) == Ordering::Less);
  CHECK(rank_compare(Rank::omega(), Rank::finite(0)) == Ordering::Greater);
  CHECK(rank_compare(Rank::finite(-1), Rank::finite(0)) == Ordering::Less);
}

TEST_CASE("total order laws over a tag sample") {
  std::vector<Rank> sample = {Rank::finite(-1), Rank::finite(0),
                              Rank::finite(1),  Rank::finite(7),
                              Rank::arrow(),    Rank::omega()};
  for (const auto& a : sample)
    for (const auto& b : sample) {
      auto ab = rank_compare(a, b), ba = rank_compare(b, a);
      if (ab == Ordering::Equal) CHECK(ba == Ordering::Equal);
      if (ab == Ordering::Less) CHECK(ba == Ordering::Greater);
      for (const auto& c : sample) {
        if (ab == Ordering::Less && rank_compare(b, c) == Ordering::Less)
          CHECK(rank_compare(a, c) == Ordering::Less);
      }
    }
}

TEST_CASE("parse and print round-trip") {
  for (const char* s : {"0", "3", "-1", "arrow", "omega"}) {
    Rank r = Rank::finite(0);
    REQUIRE(Rank::parse(s, r));
    CHECK(r.str() == s);
  }
  Rank r = Rank::finite(0);
  CHECK_FALSE(Rank::parse("x", r));
  CHECK_FALSE(Rank::parse("-2", r));
}

TEST_CASE("tip and vertex rank steps") {
  CHECK(Rank::finite(1).tip_rank() == Rank::finite(0));
  CHECK(Rank::omega().tip_rank() == Rank::arrow());
  CHECK(Rank::finite(0).vertex_rank() == Rank::finite(1));
  CHECK(Rank::arrow().vertex_rank() == Rank::omega());
}

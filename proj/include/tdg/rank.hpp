#ifndef TDG_RANK_HPP
#define TDG_RANK_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace tdg {

// Rank in the hierarchy -1, 0, 1, 2, ..., arrow, omega.
// Finite ranks start at -1 (the rank of arc tips); every finite rank
// precedes arrow, which precedes omega.
class Rank {
 public:
  static Rank finite(int n);
  static Rank arrow() { return Rank(kArrow); }
  static Rank omega() { return Rank(kOmega); }

  bool is_finite() const { return code_ < kArrow; }
  bool is_arrow() const { return code_ == kArrow; }
  bool is_omega() const { return code_ == kOmega; }

  // Finite value; only valid when is_finite().
  int value() const;

  // Rank of the tips a vertex of this rank contains: finite n -> n-1,
  // omega -> arrow. Not defined for arrow or finite -1.
  Rank tip_rank() const;
  // Rank of the vertices built from tips of this rank: n -> n+1, arrow -> omega.
  Rank vertex_rank() const;

  std::strong_ordering operator<=>(const Rank& o) const = default;
  bool operator==(const Rank& o) const = default;

  std::string str() const;
  // Parses "0", "17", "-1", "arrow", "omega". Returns false on anything else.
  static bool parse(const std::string& text, Rank& out);

 private:
  explicit Rank(std::int64_t code) : code_(code) {}
  static constexpr std::int64_t kArrow = INT64_MAX - 1;
  static constexpr std::int64_t kOmega = INT64_MAX;
  std::int64_t code_;
};

enum class Ordering { Less, Equal, Greater };

// Total order over rank tags: finite by value, every finite < arrow < omega.
Ordering rank_compare(const Rank& a, const Rank& b);

}  // namespace tdg

#endif

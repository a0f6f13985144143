#include "tdg/rank.hpp"

#include <stdexcept>

namespace tdg {

Rank Rank::finite(int n) {
  if (n < -1) throw std::invalid_argument("finite rank below -1");
  return Rank(n);
}

int Rank::value() const {
  if (!is_finite()) throw std::logic_error("value() on non-finite rank");
  return static_cast<int>(code_);
}

Rank Rank::tip_rank() const {
  if (is_omega()) return arrow();
  if (is_finite() && value() >= 0) return finite(value() - 1);
  throw std::logic_error("no tip rank for " + str());
}

Rank Rank::vertex_rank() const {
  if (is_arrow()) return omega();
  if (is_finite()) return finite(value() + 1);
  throw std::logic_error("no vertex rank above omega");
}

std::string Rank::str() const {
  if (is_arrow()) return "arrow";
  if (is_omega()) return "omega";
  return std::to_string(value());
}

bool Rank::parse(const std::string& text, Rank& out) {
  if (text == "arrow") {
    out = arrow();
    return true;
  }
  if (text == "omega") {
    out = omega();
    return true;
  }
  if (text.empty()) return false;
  std::size_t i = text[0] == '-' ? 1 : 0;
  if (i == text.size()) return false;
  for (std::size_t j = i; j < text.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) return false;
  long v = std::stol(text);
  if (v < -1) return false;
  out = finite(static_cast<int>(v));
  return true;
}

Ordering rank_compare(const Rank& a, const Rank& b) {
  if (a < b) return Ordering::Less;
  if (b < a) return Ordering::Greater;
  return Ordering::Equal;
}

}  // namespace tdg

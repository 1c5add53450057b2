#include "qmt/rational.hpp"

#include <charconv>

namespace qmt {

std::string rat_to_string(const Rat& r) {
  Int n = num(r), d = den(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

std::optional<Rat> parse_rat(std::string_view s) {
  if (s.empty()) return std::nullopt;
  auto is_int = [](std::string_view t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  try {
    if (slash == std::string_view::npos) {
      if (!is_int(s)) return std::nullopt;
      return Rat(Int(std::string(s)));
    }
    auto p = s.substr(0, slash), q = s.substr(slash + 1);
    if (!is_int(p) || !is_int(q)) return std::nullopt;
    Int qi{std::string(q)};
    if (qi == 0) return std::nullopt;
    return Rat(Int(std::string(p)), qi);
  } catch (...) {
    return std::nullopt;
  }
}

Rat abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

Int rat_ceil(const Rat& r) {
  Int q = num(r) / den(r);
  if (r > 0 && q * den(r) != num(r)) ++q;
  return q;
}

long ceil_log2(const Int& n) {
  if (n < 1) return 0;
  long k = 0;
  Int p = 1;
  while (p < n) {
    p <<= 1;
    ++k;
  }
  return k;
}

}  // namespace qmt

#include "qmt/functional.hpp"

#include <algorithm>

#include "json.hpp"

namespace qmt {

Functional::Functional() : Functional("id", [](long m) { return m; }) {}

Functional::Functional(std::string name, std::function<long(long)> raw) {
  st_ = std::make_shared<State>();
  st_->name = std::move(name);
  st_->raw = std::move(raw);
}

long Functional::operator()(long m) const {
  if (m < 0) m = 0;
  auto& cum = st_->cummax;
  while (long(cum.size()) <= m) {
    long i = long(cum.size());
    long v = st_->raw(i);
    if (v < i) v = i;
    if (i > 0 && cum[i - 1] > v) v = cum[i - 1];
    cum.push_back(v);
  }
  return cum[m];
}

long Functional::iterate(long power, long m) const {
  long v = m < 0 ? 0 : m;
  for (long i = 0; i < power; ++i) v = (*this)(v);
  return v;
}

Functional Functional::identity() { return Functional(); }

Functional Functional::constant(long c) {
  return Functional("const(" + std::to_string(c) + ")", [c](long) { return c; });
}

Functional Functional::affine(long a, long b) {
  return Functional("affine(" + std::to_string(a) + "," + std::to_string(b) + ")",
                    [a, b](long m) { return a * m + b; });
}

Functional2::Functional2() : Functional2("id2", [](long, long m) { return m; }) {}

Functional2::Functional2(std::string name, std::function<long(long, long)> raw)
    : name_(std::move(name)), raw_(std::move(raw)), per_d_(std::make_shared<std::map<long, Functional>>()) {}

Functional Functional2::fix_first(long d) const {
  auto it = per_d_->find(d);
  if (it != per_d_->end()) return it->second;
  auto raw = raw_;
  Functional f(name_ + "[D=" + std::to_string(d) + "]", [raw, d](long m) { return raw(d, m); });
  per_d_->emplace(d, f);
  return f;
}

GridFn::GridFn() : GridFn("id_grid", [](long, long r) { return r; }) {}

GridFn::GridFn(std::string name, std::function<long(long, long)> raw) {
  st_ = std::make_shared<State>();
  st_->name = std::move(name);
  st_->raw = std::move(raw);
}

long GridFn::operator()(long k, long r) const {
  auto key = std::make_pair(k, r);
  auto it = st_->memo.find(key);
  if (it != st_->memo.end()) return it->second;
  long v = st_->raw(k, r);
  st_->memo.emplace(key, v);
  return v;
}

PartitionFunctional::PartitionFunctional()
    : PartitionFunctional("id", [](const Partition& a) { return a; }) {}

PartitionFunctional::PartitionFunctional(std::string name,
                                         std::function<Partition(const Partition&)> raw) {
  st_ = std::make_shared<State>();
  st_->name = std::move(name);
  st_->raw = std::move(raw);
}

Partition PartitionFunctional::operator()(const Partition& a) const {
  for (const auto& [k, v] : st_->memo)
    if (k == a) return v;
  Partition out = st_->raw(a);
  if (!refines(a, out))
    fail(Err::PreconditionViolated, "partition functional " + st_->name + " is not inflationary");
  st_->memo.emplace_back(a, out);
  return out;
}

PartitionFunctional PartitionFunctional::identity() { return PartitionFunctional(); }

PartitionFunctional PartitionFunctional::split_in_two(const MeasureSpace& sp) {
  return PartitionFunctional("split2", [sp](const Partition& a) {
    std::vector<AtomSet> cells;
    for (const AtomSet& sigma : a.cells()) {
      std::vector<int> pos, nul;
      for (int at = 0; at < sp.atom_count(); ++at)
        if (sigma.contains(at)) (sp.weight(at) > 0 ? pos : nul).push_back(at);
      if (pos.size() < 2) {
        cells.push_back(sigma);
        continue;
      }
      // Halve the positive atoms; null atoms stay with the first half so no
      // zero-measure cell is created.
      AtomSet lo, hi;
      for (std::size_t i = 0; i < pos.size(); ++i)
        (i < (pos.size() + 1) / 2 ? lo : hi) = (i < (pos.size() + 1) / 2 ? lo : hi) | AtomSet::single(pos[i]);
      for (int at : nul) lo = lo | AtomSet::single(at);
      cells.push_back(lo);
      cells.push_back(hi);
    }
    return Partition(std::move(cells));
  });
}

PartitionFunctional PartitionFunctional::to_atomic(const MeasureSpace& sp) {
  return PartitionFunctional("atomic", [sp](const Partition& a) {
    std::vector<AtomSet> cells;
    for (const AtomSet& sigma : a.cells()) {
      // Attach null atoms to the least positive atom of their cell.
      int anchor = -1;
      for (int at = 0; at < sp.atom_count(); ++at)
        if (sigma.contains(at) && sp.weight(at) > 0) {
          anchor = at;
          break;
        }
      if (anchor < 0) {
        cells.push_back(sigma);
        continue;
      }
      AtomSet anchor_cell = AtomSet::single(anchor);
      for (int at = 0; at < sp.atom_count(); ++at) {
        if (!sigma.contains(at) || at == anchor) continue;
        if (sp.weight(at) == 0)
          anchor_cell = anchor_cell | AtomSet::single(at);
        else
          cells.push_back(AtomSet::single(at));
      }
      cells.push_back(anchor_cell);
    }
    return Partition(std::move(cells));
  });
}

namespace {

using nlohmann::json;

std::function<long(long)> build1(const json& j);

std::function<long(long)> build1(const json& j) {
  if (j.is_string() && j.get<std::string>() == "id") return [](long m) { return m; };
  if (j.is_number_integer()) {
    long c = j.get<long>();
    return [c](long) { return c; };
  }
  if (!j.is_object() || j.size() != 1) fail(Err::ParseError, "bad functional spec: " + j.dump());
  const auto& [key, val] = *j.items().begin();
  if (key == "affine") {
    long a = val.at(0).get<long>(), b = val.at(1).get<long>();
    return [a, b](long m) { return a * m + b; };
  }
  if (key == "const") {
    long c = val.get<long>();
    return [c](long) { return c; };
  }
  if (key == "max") {
    std::vector<std::function<long(long)>> fs;
    for (const auto& e : val) fs.push_back(build1(e));
    return [fs](long m) {
      long v = m;
      for (const auto& f : fs) v = std::max(v, f(m));
      return v;
    };
  }
  if (key == "comp") {
    auto f = build1(val.at(0)), g = build1(val.at(1));
    return [f, g](long m) { return f(g(m)); };
  }
  if (key == "iter") {
    auto f = build1(val.at(0));
    long k = val.at(1).get<long>();
    if (k < 0 || k > 64) fail(Err::ParseError, "iterate count out of range");
    return [f, k](long m) {
      long v = m;
      for (long i = 0; i < k; ++i) v = std::max(v, f(v));
      return v;
    };
  }
  fail(Err::ParseError, "unknown functional spec key: " + key);
}

}  // namespace

Functional functional_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(Err::ParseError, std::string("functional spec: ") + e.what());
  }
  return Functional(j.dump(), build1(j));
}

Functional2 functional2_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(Err::ParseError, std::string("functional spec: ") + e.what());
  }
  if (j.is_object() && j.contains("affine2")) {
    long a = j["affine2"].at(0).get<long>(), b = j["affine2"].at(1).get<long>(),
         c = j["affine2"].at(2).get<long>();
    return Functional2(j.dump(), [a, b, c](long d, long m) { return a * d + b * m + c; });
  }
  // Fall back to a one-argument spec ignoring D.
  auto f = build1(j);
  return Functional2(j.dump(), [f](long, long m) { return f(m); });
}

}  // namespace qmt

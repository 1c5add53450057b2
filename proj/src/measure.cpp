#include "qmt/measure.hpp"

#include <algorithm>
#include <bit>

namespace qmt {

int AtomSet::count() const { return std::popcount(bits); }

int AtomSet::lowest() const { return bits == 0 ? -1 : std::countr_zero(bits); }

MeasureSpace MeasureSpace::make(std::vector<Rat> weights) {
  if (weights.empty() || weights.size() > 16)
    fail(Err::ValidationError, "space needs 1..16 atoms, got " + std::to_string(weights.size()));
  Rat sum = 0;
  for (const Rat& w : weights) {
    if (w < 0) fail(Err::NegativeWeight, "atom weight " + rat_to_string(w));
    sum += w;
  }
  if (sum != 1) fail(Err::SumNotOne, "weights sum to " + rat_to_string(sum));
  auto d = std::make_shared<Data>();
  d->weights = std::move(weights);
  return MeasureSpace(std::move(d));
}

Rat MeasureSpace::mu(AtomSet s) const {
  require_in_space(s);
  Rat m = 0;
  for (int a = 0; a < atom_count(); ++a)
    if (s.contains(a)) m += weight(a);
  return m;
}

void MeasureSpace::require_in_space(AtomSet s) const {
  if (!in_space(s)) fail(Err::ForeignAtoms, "set has atoms outside the space");
}

Partition::Partition(std::vector<AtomSet> cells) : cells_(std::move(cells)) {
  std::uint32_t seen = 0;
  for (const AtomSet& c : cells_) {
    if (c.empty()) fail(Err::ValidationError, "empty cell in partition");
    if (c.bits & seen) fail(Err::ValidationError, "partition cells overlap");
    seen |= c.bits;
  }
  std::sort(cells_.begin(), cells_.end(),
            [](const AtomSet& x, const AtomSet& y) { return x.lowest() < y.lowest(); });
}

Partition Partition::atomic(const MeasureSpace& sp) {
  std::vector<AtomSet> cs;
  for (int a = 0; a < sp.atom_count(); ++a) cs.push_back(AtomSet::single(a));
  return Partition(std::move(cs));
}

Partition Partition::coarsest(const MeasureSpace& sp) { return Partition({sp.omega()}); }

AtomSet Partition::carrier() const {
  AtomSet u;
  for (const AtomSet& c : cells_) u = u | c;
  return u;
}

bool refines(const Partition& coarse, const Partition& fine) {
  if (coarse.carrier() != fine.carrier()) return false;
  for (const AtomSet& tau : fine.cells()) {
    bool found = false;
    for (const AtomSet& sigma : coarse.cells())
      if (tau.subset_of(sigma)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

Partition restrict_to(const Partition& fine, AtomSet sigma) {
  std::vector<AtomSet> cs;
  for (const AtomSet& tau : fine.cells())
    if (tau.subset_of(sigma)) cs.push_back(tau);
  return Partition(std::move(cs));
}

AtomSet parent_cell(AtomSet tau, const Partition& coarse) {
  for (const AtomSet& sigma : coarse.cells())
    if (tau.subset_of(sigma)) return sigma;
  fail(Err::NotRefinement, "cell has no parent in the coarser partition");
}

StepMeasure::StepMeasure(MeasureSpace space, std::vector<Rat> atom_values)
    : space_(std::move(space)), vals_(std::move(atom_values)) {
  if (int(vals_.size()) != space_.atom_count())
    fail(Err::ValidationError, "value count does not match atom count");
  for (int a = 0; a < space_.atom_count(); ++a)
    if (space_.weight(a) == 0 && vals_[a] != 0)
      fail(Err::ValidationError, "nonzero value on a null atom");
}

Rat StepMeasure::atom_density(int a) const {
  if (space_.weight(a) == 0) return 0;
  return vals_[a] / space_.weight(a);
}

Rat StepMeasure::of_set(AtomSet s) const {
  space_.require_in_space(s);
  Rat v = 0;
  for (int a = 0; a < space_.atom_count(); ++a)
    if (s.contains(a)) v += vals_[a];
  return v;
}

StepMeasure StepMeasure::mu(const MeasureSpace& sp) {
  std::vector<Rat> v;
  for (int a = 0; a < sp.atom_count(); ++a) v.push_back(sp.weight(a));
  return StepMeasure(sp, std::move(v));
}

StepMeasure StepMeasure::zero(const MeasureSpace& sp) {
  return StepMeasure(sp, std::vector<Rat>(sp.atom_count(), Rat(0)));
}

StepMeasure StepMeasure::operator+(const StepMeasure& o) const {
  if (!(space_ == o.space_)) fail(Err::SpaceMismatch, "adding measures on different spaces");
  std::vector<Rat> v(vals_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.vals_[i];
  return StepMeasure(space_, std::move(v));
}

StepMeasure StepMeasure::operator-(const StepMeasure& o) const {
  if (!(space_ == o.space_)) fail(Err::SpaceMismatch, "subtracting measures on different spaces");
  std::vector<Rat> v(vals_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.vals_[i];
  return StepMeasure(space_, std::move(v));
}

Rat measure_eval(const StepMeasure& nu, AtomSet target, EvalMode mode) {
  Rat v = nu.of_set(target);
  return mode == EvalMode::Signed ? v : abs(v);
}

Rat measure_eval(const StepMeasure& nu, const Partition& target, EvalMode mode) {
  Rat v = 0;
  for (const AtomSet& c : target.cells()) {
    Rat cv = nu.of_set(c);
    v += mode == EvalMode::Signed ? cv : abs(cv);
  }
  return v;
}

Rat density(const StepMeasure& nu, AtomSet sigma, EvalMode mode) {
  Rat m = nu.space().mu(sigma);
  if (m == 0) fail(Err::NullCarrier, "density on a set of measure zero");
  return measure_eval(nu, sigma, mode) / m;
}

Rat density(const StepMeasure& nu, const Partition& a, EvalMode mode) {
  Rat m = nu.space().mu(a.carrier());
  if (m == 0) fail(Err::NullCarrier, "density on a partition of measure zero");
  return measure_eval(nu, a, mode) / m;
}

Rat l1_norm(const StepMeasure& nu) {
  Rat s = 0;
  for (int a = 0; a < nu.space().atom_count(); ++a) s += abs(nu.atom_value(a));
  return s;
}

long modulus_of_continuity(const StepMeasure& nu, long e) {
  if (e < 1) fail(Err::PreconditionViolated, "modulus needs E >= 1");
  const MeasureSpace& sp = nu.space();
  const int n = sp.atom_count();
  const Rat eps = Rat(1, e);
  // A partition with carrier S maximizes |nu| at the atomic partition of S,
  // so it suffices to scan subsets.  D must satisfy: mu(S) < 1/D implies
  // sum_{a in S} |nu(a)| < 1/E; a violating S forces D >= ceil(1/mu(S)).
  Int best = 1;
  for (std::uint32_t m = 1; m < (std::uint32_t(1) << n); ++m) {
    AtomSet s(m);
    Rat total = 0;
    for (int a = 0; a < n; ++a)
      if (s.contains(a)) total += abs(nu.atom_value(a));
    if (total < eps) continue;
    Rat mu = sp.mu(s);
    // total >= 1/E > 0 forces some non-null atom, so mu > 0 here.
    Int need = rat_ceil(Rat(1) / mu);
    if (need > best) best = need;
  }
  return long(best);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t bell_number(int n) {
  // Bell triangle.
  std::vector<std::vector<std::uint64_t>> t{{1}};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> row{t.back().back()};
    for (std::uint64_t x : t.back()) row.push_back(row.back() + x);
    t.push_back(std::move(row));
  }
  return t[n][0];
}

namespace {

// Restricted growth strings a[0..n-1]: a[0]=0, a[i] <= 1+max(a[0..i-1]).
// Lexicographic order: first is all zeros (one block), last is 0,1,..,n-1.
bool next_rgs(std::vector<int>& a) {
  const int n = int(a.size());
  for (int i = n - 1; i >= 1; --i) {
    int mx = 0;
    for (int j = 0; j < i; ++j) mx = std::max(mx, a[j]);
    if (a[i] <= mx) {
      ++a[i];
      std::fill(a.begin() + i + 1, a.end(), 0);
      return true;
    }
  }
  return false;
}

std::vector<std::vector<int>> rgs_to_blocks(const std::vector<int>& a) {
  int k = 0;
  for (int x : a) k = std::max(k, x + 1);
  std::vector<std::vector<int>> blocks(k);
  for (int i = 0; i < int(a.size()); ++i) blocks[a[i]].push_back(i);
  return blocks;
}

std::vector<int> random_rgs(int n, std::uint64_t& rng) {
  std::vector<int> a(n, 0);
  int mx = 0;
  for (int i = 1; i < n; ++i) {
    a[i] = int(splitmix64(rng) % std::uint64_t(mx + 2));
    mx = std::max(mx, a[i]);
  }
  return a;
}

}  // namespace

std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> a(n, 0);
  do {
    out.push_back(rgs_to_blocks(a));
  } while (next_rgs(a));
  return out;
}

std::uint64_t interval_size(const Partition& a, const Partition& b) {
  if (!refines(a, b)) fail(Err::NotRefinement, "interval endpoints not in refinement order");
  const std::uint64_t cap = std::uint64_t(1) << 62;
  std::uint64_t total = 1;
  for (const AtomSet& sigma : a.cells()) {
    std::uint64_t k = std::uint64_t(restrict_to(b, sigma).size());
    std::uint64_t bell = bell_number(int(k));
    if (total > cap / bell) return cap;
    total *= bell;
  }
  return total;
}

namespace {

Partition assemble(const Partition& a, const Partition& b,
                   const std::vector<std::vector<int>>& rgs_per_cell) {
  std::vector<AtomSet> cells;
  for (std::size_t ci = 0; ci < a.size(); ++ci) {
    Partition children = restrict_to(b, a.cell(ci));
    auto blocks = rgs_to_blocks(rgs_per_cell[ci]);
    for (const auto& blk : blocks) {
      AtomSet u;
      for (int idx : blk) u = u | children.cell(idx);
      cells.push_back(u);
    }
  }
  return Partition(std::move(cells));
}

}  // namespace

std::vector<Partition> enumerate_between(const Partition& a, const Partition& b, std::size_t limit,
                                         std::uint64_t seed) {
  if (!refines(a, b)) fail(Err::NotRefinement, "enumerate_between needs a <= b");
  std::uint64_t count = interval_size(a, b);
  std::vector<Partition> out;
  if (count <= limit) {
    // Full enumeration: odometer over per-cell restricted growth strings.
    std::vector<std::vector<int>> rgs;
    for (const AtomSet& sigma : a.cells())
      rgs.emplace_back(restrict_to(b, sigma).size(), 0);
    while (true) {
      out.push_back(assemble(a, b, rgs));
      int ci = int(rgs.size()) - 1;
      while (ci >= 0 && !next_rgs(rgs[ci])) {
        std::fill(rgs[ci].begin(), rgs[ci].end(), 0);
        --ci;
      }
      if (ci < 0) break;
    }
    return out;
  }
  // Seeded sample: endpoints first, then distinct random elements.
  out.push_back(a);
  out.push_back(b);
  std::uint64_t rng = seed ^ 0xa076'1d64'78bd'642fULL;
  std::size_t guard = 64 * (limit + 2);
  while (out.size() < limit + 2 && guard-- > 0) {
    std::vector<std::vector<int>> rgs;
    for (const AtomSet& sigma : a.cells()) rgs.push_back(random_rgs(int(restrict_to(b, sigma).size()), rng));
    Partition p = assemble(a, b, rgs);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

}  // namespace qmt

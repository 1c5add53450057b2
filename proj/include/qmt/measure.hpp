#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qmt/error.hpp"
#include "qmt/rational.hpp"

namespace qmt {

// A set of atoms, represented as a bitmask over atom indices 0..N-1.
// Sets carry no space pointer; operations that need measures take the space.
struct AtomSet {
  std::uint32_t bits = 0;

  constexpr AtomSet() = default;
  constexpr explicit AtomSet(std::uint32_t b) : bits(b) {}
  static constexpr AtomSet single(int a) { return AtomSet(std::uint32_t(1) << a); }

  constexpr bool empty() const { return bits == 0; }
  constexpr bool contains(int a) const { return (bits >> a) & 1u; }
  constexpr bool subset_of(AtomSet o) const { return (bits & ~o.bits) == 0; }
  constexpr AtomSet operator|(AtomSet o) const { return AtomSet(bits | o.bits); }
  constexpr AtomSet operator&(AtomSet o) const { return AtomSet(bits & o.bits); }
  constexpr AtomSet minus(AtomSet o) const { return AtomSet(bits & ~o.bits); }
  constexpr AtomSet sym_diff(AtomSet o) const { return AtomSet(bits ^ o.bits); }
  constexpr bool operator==(const AtomSet&) const = default;
  int count() const;
  int lowest() const;  // -1 when empty
};

// Finite atomic probability space: ordered atoms with exact nonnegative
// rational weights summing to 1.  Zero-weight atoms are permitted.
class MeasureSpace {
 public:
  // Validates: weights nonnegative, sum exactly 1.
  static MeasureSpace make(std::vector<Rat> weights);

  int atom_count() const { return int(data_->weights.size()); }
  const Rat& weight(int a) const { return data_->weights[a]; }
  AtomSet omega() const { return AtomSet((std::uint32_t(1) << atom_count()) - 1u); }
  Rat mu(AtomSet s) const;
  bool in_space(AtomSet s) const { return s.subset_of(omega()); }
  void require_in_space(AtomSet s) const;

  bool operator==(const MeasureSpace& o) const { return data_ == o.data_ || data_->weights == o.data_->weights; }

 private:
  struct Data {
    std::vector<Rat> weights;
  };
  explicit MeasureSpace(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

// Pairwise-disjoint nonempty atom sets; union need not cover the space.
// Canonical form: cells sorted by least atom, so equality is syntactic.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<AtomSet> cells);  // validates disjoint + nonempty
  static Partition singleton(AtomSet s) { return Partition({s}); }
  static Partition atomic(const MeasureSpace& sp);
  static Partition coarsest(const MeasureSpace& sp);  // {Omega}

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const AtomSet& cell(std::size_t i) const { return cells_[i]; }
  const std::vector<AtomSet>& cells() const { return cells_; }
  AtomSet carrier() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<AtomSet> cells_;
};

// true iff carriers agree and each cell of fine sits inside a cell of coarse
// (i.e. coarse "precedes" fine in the refinement order).
bool refines(const Partition& coarse, const Partition& fine);

// Cells of fine contained in sigma.
Partition restrict_to(const Partition& fine, AtomSet sigma);

// The unique cell of coarse containing tau; throws NotRefinement if none.
AtomSet parent_cell(AtomSet tau, const Partition& coarse);

// Additive set function given by its atom values.  Null atoms must carry
// value 0, so every density is finite where defined.
class StepMeasure {
 public:
  StepMeasure(MeasureSpace space, std::vector<Rat> atom_values);

  const MeasureSpace& space() const { return space_; }
  const Rat& atom_value(int a) const { return vals_[a]; }
  // Density of the atom (value / weight); 0 for null atoms by convention.
  Rat atom_density(int a) const;

  Rat of_set(AtomSet s) const;

  bool operator==(const StepMeasure& o) const { return space_ == o.space_ && vals_ == o.vals_; }

  static StepMeasure mu(const MeasureSpace& sp);  // the ambient measure as a StepMeasure
  static StepMeasure zero(const MeasureSpace& sp);

  StepMeasure operator+(const StepMeasure& o) const;
  StepMeasure operator-(const StepMeasure& o) const;

 private:
  MeasureSpace space_;
  std::vector<Rat> vals_;
};

enum class EvalMode { Signed, Absolute };

Rat measure_eval(const StepMeasure& nu, AtomSet target, EvalMode mode);
Rat measure_eval(const StepMeasure& nu, const Partition& target, EvalMode mode);

// delta_nu: nu(A) / mu(A).  Throws NullCarrier when mu(A) = 0.
Rat density(const StepMeasure& nu, AtomSet sigma, EvalMode mode = EvalMode::Signed);
Rat density(const StepMeasure& nu, const Partition& a, EvalMode mode = EvalMode::Signed);

// Sum of |nu(atom)|; on a finite atomic algebra this equals the supremum of
// |nu|(A) over all partitions A.
Rat l1_norm(const StepMeasure& nu);

// Least D >= 1 such that every partition A with mu(A) < 1/D has |nu|(A) < 1/E.
// Exhaustive over all 2^N atom subsets (the atomic partition of a subset
// maximizes |nu| among partitions with that carrier).
long modulus_of_continuity(const StepMeasure& nu, long e);

// Number of partitions C with a <= C <= b (exact; saturates at 2^62).
std::uint64_t interval_size(const Partition& a, const Partition& b);

// All elements of [a, b] in a fixed deterministic order (starts at a, ends
// at b) when their number is <= limit; otherwise the two endpoints followed
// by a deterministic seeded sample of size limit.
std::vector<Partition> enumerate_between(const Partition& a, const Partition& b, std::size_t limit,
                                         std::uint64_t seed);

// Set partitions of {0..n-1} as lists of blocks, in restricted-growth-string
// order (first: one block; last: n singletons).
std::vector<std::vector<std::vector<int>>> set_partitions(int n);

std::uint64_t bell_number(int n);  // exact for n <= 16

// splitmix64: the library's deterministic PRNG step.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace qmt

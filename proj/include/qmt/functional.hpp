#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qmt/error.hpp"
#include "qmt/measure.hpp"

namespace qmt {

// Monotone inflationary index functional on naturals.  Wraps a raw callable
// with the closure m |-> max(m, max_{n<=m} raw(n)), so every Functional
// satisfies f(n) <= f(m) for n <= m and f(m) >= m regardless of the raw
// function.  Values are cached; raw is evaluated at most once per argument.
class Functional {
 public:
  Functional();  // identity
  Functional(std::string name, std::function<long(long)> raw);

  long operator()(long m) const;
  long iterate(long power, long m) const;  // f^power(m)
  const std::string& name() const { return st_->name; }

  static Functional identity();
  static Functional constant(long c);    // max(m, c) after wrapping
  static Functional affine(long a, long b);  // a*m + b

 private:
  struct State {
    std::string name;
    std::function<long(long)> raw;
    std::vector<long> cummax;  // cummax[i] = wrapped value at i
  };
  std::shared_ptr<State> st_;
};

// Two-argument functional (D, m) -> N, used by the uniform-continuity
// statements.  fix_first(D) yields the monotone closure in m.
class Functional2 {
 public:
  Functional2();
  Functional2(std::string name, std::function<long(long, long)> raw);
  long operator()(long d, long m) const { return fix_first(d)(m); }
  Functional fix_first(long d) const;
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<long(long, long)> raw_;
  std::shared_ptr<std::map<long, Functional>> per_d_;
};

// (k, r) -> N with a provenance label; memoized.  Used for the paired-index
// functionals of the exchange constructions.
class GridFn {
 public:
  GridFn();
  GridFn(std::string name, std::function<long(long, long)> raw);
  long operator()(long k, long r) const;
  const std::string& name() const { return st_->name; }

 private:
  struct State {
    std::string name;
    std::function<long(long, long)> raw;
    std::map<std::pair<long, long>, long> memo;
  };
  std::shared_ptr<State> st_;
};

// Function on partitions: A |-> B(A) with A <= B(A).  The wrapper checks the
// refinement property on every call.
class PartitionFunctional {
 public:
  PartitionFunctional();  // identity
  PartitionFunctional(std::string name, std::function<Partition(const Partition&)> raw);
  Partition operator()(const Partition& a) const;
  const std::string& name() const { return st_->name; }

  static PartitionFunctional identity();
  // Splits every cell with >= 2 atoms into two halves (low atoms / high
  // atoms by index); null atoms travel with their cell's positive part.
  static PartitionFunctional split_in_two(const MeasureSpace& sp);
  static PartitionFunctional to_atomic(const MeasureSpace& sp);

 private:
  struct State {
    std::string name;
    std::function<Partition(const Partition&)> raw;
    std::vector<std::pair<Partition, Partition>> memo;
  };
  std::shared_ptr<State> st_;
};

// Tiny data-level expression grammar for functionals in scenarios:
//   {"affine":[a,b]}          m -> a*m+b
//   {"const": c}              m -> c
//   "id"                      m -> m
//   {"max":[spec,spec,...]}   pointwise max
//   {"comp":[f,g]}            f after g
//   {"iter":[spec,k]}         k-fold iterate
// Two-argument specs may use {"affine2":[a,b,c]} for (d,m) -> a*d+b*m+c.
struct FuncSpec;
Functional functional_from_json_text(const std::string& text);
Functional2 functional2_from_json_text(const std::string& text);

}  // namespace qmt

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qmt/functional.hpp"
#include "qmt/products.hpp"
#include "qmt/sequence.hpp"

namespace qmt {

struct EnergyParams {
  long e = 1;
  long d = 1;
  Rat k;      // cutoff; defaults per construction site
  Rat bound;  // L1 bound in play
};

enum class EnergyKind { L2, L1WithCutoff };

// Split of b into (high, low) by |density| > k.  Cells must have positive
// measure.
std::pair<Partition, Partition> cutoff(const Partition& b, const StepMeasure& nu, const Rat& k);

// theta_{L2} or theta_{L1}: quadratic below the cutoff, linear with weight 2K
// above it.
Rat energy(const Partition& c, const StepMeasure& nu, EnergyKind kind, const Rat& k = Rat(0));

// Cells of fine whose density moved >= 1/e from their parent in coarse.
// Zero-measure cells never enter the difference set.
Partition difference_set(long e, const Partition& coarse, const StepMeasure& nu,
                         const Partition& fine);

// B^K: high cells of the argument pass through unsplit, the rest receive
// bhat's refinement.
PartitionFunctional bhat_k(const PartitionFunctional& bhat, const StepMeasure& nu, const Rat& k);

// Gap set of two measures on b, with the measure bound asserted; requires
// |nu - nu'|(b) < 1/(d e).
Partition density_gap_set(const StepMeasure& nu, const StepMeasure& nu2, const Partition& b, long d,
                          long e);

struct SearchOptions {
  std::size_t enum_limit = 10000;
  std::uint64_t seed = 1;
};

struct TraceRow {
  long iteration = 0;
  Rat energy;
};

struct RegularityWitness {
  Partition bsharp;
  std::vector<TraceRow> trace;  // trace[0] = initial energy
  EnergyParams params;
  long iterations() const { return long(trace.size()) - 1; }
};

// One-dimensional L1 regularity by energy increment: returns bsharp >= a_flat
// such that every b in [bsharp, bhat(bsharp)] has mu(D_{e,bsharp,nu}(b)) < 1/d.
RegularityWitness regularity_1d(const StepMeasure& nu, const Partition& a_flat, long e, long d,
                                const PartitionFunctional& bhat, const SearchOptions& opt = {});

// Re-derives the conclusion from scratch over the (enumerated) interval.
bool verify_regularity_1d(const StepMeasure& nu, const Partition& bsharp, long e, long d,
                          const PartitionFunctional& bhat, const SearchOptions& opt = {});

// Energy trace as CSV rows: iteration,energy_num,energy_den.
std::string trace_to_csv(const std::vector<TraceRow>& trace);

// ---- sequential forms ----------------------------------------------------

// k_hat(m, B') with provenance and memoization.
class PartIndexFunctional {
 public:
  PartIndexFunctional();
  PartIndexFunctional(std::string name, std::function<long(long, const Partition&)> raw);
  long operator()(long m, const Partition& bp) const;
  const std::string& name() const { return st_->name; }
  const void* id() const { return st_.get(); }  // stable identity for frame keys

 private:
  struct State {
    std::string name;
    std::function<long(long, const Partition&)> raw;
    std::vector<std::tuple<long, Partition, long>> memo;
  };
  std::shared_ptr<State> st_;
};

using SeqMHat = std::function<long(long, const PartIndexFunctional&, const Partition&,
                                   const Partition&, const Partition&)>;
using SeqBHat = std::function<Partition(long, const PartIndexFunctional&, const Partition&)>;

struct SeqRegularityWitness {
  Partition bsharp;
  long nsharp = 0;
  PartIndexFunctional khat;
  std::vector<TraceRow> trace;  // accepted energy increments, theta_k values
  long max_chain_depth = 0;
};

// Sequential regularity: (bsharp, nsharp, khat) such that for every pair
// bsharp <= B <= B' <= bhat(nsharp, khat, bsharp), setting m = mhat(...) and
// k = khat(m, B'), m >= nsharp implies k >= m and mu(D_{e,B,nu_k}(B')) < 1/d.
SeqRegularityWitness regularity_1d_seq(const MeasureSequence& seq, const Partition& a_flat, long e,
                                       long d, const SeqMHat& mhat, const SeqBHat& bhat,
                                       const SearchOptions& opt = {});

bool verify_regularity_1d_seq(const MeasureSequence& seq, const SeqRegularityWitness& w, long e,
                              long d, const SeqMHat& mhat, const SeqBHat& bhat,
                              const SearchOptions& opt = {});

// ---- interval form --------------------------------------------------------

struct IntervalKHat {
  std::string name;
  std::function<long(long, const Functional&, const Partition&, const Partition&)> fn;
  long operator()(long m, const Functional& lhat, const Partition& b, const Partition& bp) const {
    return fn(m, lhat, b, bp);
  }
};

using IntervalMHat = std::function<long(long, const IntervalKHat&, const Partition&)>;
using IntervalLHat = std::function<Functional(long, const IntervalKHat&, const Partition&)>;
using IntervalBHat = std::function<Partition(long, const IntervalKHat&, const Partition&)>;

struct IntervalWitness {
  Partition bsharp;
  long nsharp = 0;
  IntervalKHat khat;
  SeqRegularityWitness inner;
};

// Interval regularity: for all pairs B <= B' in [bsharp, bhat(...)], with
// m_flat = mhat(nsharp, khat, bsharp) and lhat_flat = Lhat(nsharp, khat,
// bsharp), if m_flat >= nsharp then k = khat(m_flat, lhat_flat, B, B') >=
// m_flat and mu(D_{e,B,nu_l}(B')) < 1/d for every l in [k, lhat_flat(k)].
IntervalWitness regularity_interval(const MeasureSequence& seq, const Partition& a_flat, long e,
                                    long d, const IntervalBHat& bhat, const IntervalMHat& mhat,
                                    const IntervalLHat& lhat, const SearchOptions& opt = {});

bool verify_regularity_interval(const MeasureSequence& seq, const IntervalWitness& w, long e,
                                long d, const IntervalBHat& bhat, const IntervalMHat& mhat,
                                const IntervalLHat& lhat, const SearchOptions& opt = {});

// ---- doubled interval form ------------------------------------------------

struct DblKHat {
  std::string name;
  std::function<long(long, long, const GridFn&, const GridFn&, const Partition&, const Partition&)>
      fn;
  long operator()(long m, long q, const GridFn& l, const GridFn& s, const Partition& b0,
                  const Partition& b1) const {
    return fn(m, q, l, s, b0, b1);
  }
};

using DblMHat = std::function<long(long, long, const DblKHat&, const DblKHat&, const Partition&)>;
using DblBHat =
    std::function<Partition(long, long, const DblKHat&, const DblKHat&, const Partition&)>;
using DblLHat = std::function<GridFn(long, long, const DblKHat&, const DblKHat&, const Partition&)>;

struct DblWitness {
  Partition bsharp;
  long nsharp = 0, psharp = 0;
  DblKHat khat, rhat;
};

// Two nested interval applications, one per family.  Conclusion: with the
// statement's derived values, k >= m_flat, r >= q_flat, the first family's
// difference sets on b0 = bhat0(...) stay under 1/d along [k, lhat(k,r)] and
// the second family's on b1 = bhat1(...) along [r, shat(k,r)].
DblWitness regularity_interval_double(const MeasureSequence& rho_family,
                                      const MeasureSequence& lambda_family, long e, long d,
                                      const DblBHat& bhat0, const DblBHat& bhat1,
                                      const DblMHat& mhat, const DblLHat& lhat, const DblMHat& qhat,
                                      const DblLHat& shat, const SearchOptions& opt = {});

}  // namespace qmt

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmt/functional.hpp"
#include "qmt/sequence.hpp"

namespace qmt {

// Least m >= base whose window [m, mhat(m)] has oscillation < 1/e on sigma.
// Terminates for eventually-constant sequences.
long stabilize_from(const MeasureSequence& seq, AtomSet sigma, long e, const Functional& mhat,
                    long base);

struct WeakWitness {
  long msharp = 0;  // M_sharp: uniform start bound over all sigma
  long e = 1;
  std::string mhat_name;
  bool verified = false;
};

// Metastable weak convergence witness: for every sigma there is an
// m <= msharp with |nu_a(sigma) - nu_b(sigma)| < 1/e on [m, mhat(m)].
// Verified exhaustively over all atom sets.
WeakWitness search_metastable_weak(const MeasureSequence& seq, long e, const Functional& mhat,
                                   long n);

struct PartitionWeakWitness {
  long msharp = 0;
  long e = 1;
  bool verified = false;
};

// One m_sharp >= n making every cell of b stable at tolerance 1/e on the
// window [m_sharp, mhat(m_sharp)].  Built by peeling one cell at a time and
// composing the window functional through the remaining cells.
PartitionWeakWitness metastable_partition_weak(const MeasureSequence& seq, long e,
                                               const Partition& b, const Functional& mhat, long n);

// Least v such that some start in [n, mhat^v(n)] stabilizes its window on
// sigma at tolerance 1/e.
long count_fluctuations(const MeasureSequence& seq, AtomSet sigma, long e, const Functional& mhat,
                        long n);
// Exact-power variant: least v with window [mhat^v(n), mhat^(v+1)(n)] stable.
long count_fluctuations_power(const MeasureSequence& seq, AtomSet sigma, long e,
                              const Functional& mhat, long n);

struct BulkWitness {
  long msharp = 0;
  std::vector<AtomSet> good;            // cells stable on [msharp, mhat(msharp)]
  std::vector<Rat> stage_exceptional;   // per-stage exceptional measures
  long stages = 0;                      // the proof's k
  long v_star = 0;                      // msharp = mhat^(v_star)(n)
  bool verified = false;
};

// Good sub-partition of measure >= (1 - 1/d) mu(b): the proof's k-fold
// greedy stage iteration, k least with (1-1/v_bound)^k <= 1/d.  v_bound is
// the fluctuation certificate; stage s searches per-cell stabilization
// powers v <= v_bound of mhat^((v_bound+1)^(k-s)).
BulkWitness metastable_partition_bulk(const MeasureSequence& seq, long e, long d,
                                      const Functional& mhat, long n, const Partition& b,
                                      long v_bound);

struct VhsWitness {
  long msharp = 0;
  long dsharp = 1;
  AtomSet sigma_anchor;               // the chain's final set
  std::vector<long> chain_m;          // m_0 < m_1 < ... (the proof's chain)
  std::vector<AtomSet> chain_sigma;
  std::vector<long> chain_d;          // D_i schedule
  long e = 1;
  bool verified = false;
};

// Quantitative Vitali-Hahn-Saks: (msharp, dsharp) with |nu_m(sigma)| < 1/e
// for every m in [msharp, mhat(dsharp, msharp)] and every mu(sigma) <
// 1/dsharp.  dsharp = 2 * (inflated modulus of nu_msharp at 16e), where the
// inflated moduli follow w[m] = max(2 w[m-1], omega_m).
VhsWitness quantitative_vhs(const MeasureSequence& seq, long e, const Functional2& mhat, long n);

// The inflated modulus schedule value at index m for tolerance e.
long vhs_inflated_modulus(const MeasureSequence& seq, long m, long e);

// Defining inequality of metastable uniform continuity for a candidate
// (msharp, dsharp), checked exhaustively over all sigma and the window.
bool msuc_check(const MeasureSequence& seq, long e, const Functional2& mhat, long n, long msharp,
                long dsharp);

// Partition corollary at half tolerance: if the set check passes at 2e, then
// |nu_m|(A) < 1/e for every partition A with mu(A) < 1/dsharp.  Exhaustive
// over sub-partitions of each supplied partition's carrier is not required;
// the supplied partitions themselves are checked.
bool msuc_partition_corollary(const MeasureSequence& seq, long e, const Functional2& mhat,
                              long msharp, long dsharp, const std::vector<Partition>& samples);

// (m, q) -> index functional with provenance, for the double-sequence forms.
using PairFn = GridFn;

struct NpMsucWitness {
  long dsharp = 1;
  long msharp = 0;
  long qsharp = 0;
  GridFn rhat;        // r_hat_sharp
  AtomSet sigma0;
  long e = 1;         // the tolerance the three-part conclusion is stated at
  // Achieved values at the designated indices (for reporting):
  long m_flat = 0, q_flat = 0, r_sharp = 0;
  bool guards_hold = false;  // m_flat >= msharp and q_flat >= qsharp
  bool verified = false;
  std::string strategy;  // "proof" or "search"
};

// The n-over-p uniform continuity core: produces (D,m,q,rhat,sigma0) whose
// three-part conclusion holds at tolerance e (set checks exhaustive):
//   (i)  r_sharp >= q_flat,
//   (ii) |(g(msharp, r) - g(m_flat, r))(sigma)| < 1/e near sigma0,
//   (iii)|g(msharp, r)(sigma)| < 1/(4e) for mu(sigma) < 2/D.
// mhat/qhat receive (D, m, q, rhat).
using NpIndexFn = std::function<long(long d, long m, long q, const GridFn& rhat)>;

NpMsucWitness np_msuc_core(const DoubleSequence& ds, long e, const NpIndexFn& mhat,
                           const NpIndexFn& qhat, long n, long p);

// Full n/p-metastable uniform continuity witness: runs the core at 4e and
// certifies |(rho_{m_flat} lambda_{r_sharp})(sigma)| < 1/e for mu(sigma) <
// 1/dsharp.  Falls back to bounded exhaustive search when use_search is set
// (test oracle cross-validation, not the public contract).
NpMsucWitness np_msuc_witness(const DoubleSequence& ds, long e, const NpIndexFn& mhat,
                              const NpIndexFn& qhat, long n, long p, bool use_search = false);

// Certified fluctuation bound for first-index jumps of the product grid:
// max length of a strictly increasing index chain with consecutive jumps
// >= 1/(2e) on some sigma, over all columns.  Exact on the grid.
long grid_first_index_fluctuation_bound(const DoubleSequence& ds, long e);

}  // namespace qmt

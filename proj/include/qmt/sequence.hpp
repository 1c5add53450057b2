#pragma once

#include <vector>

#include "qmt/measure.hpp"

namespace qmt {

// Sequence of additive functions on a common space, eventually constant:
// nu_n = table.back() for all n >= table.size()-1.  Eventual constancy makes
// every metastable search terminate and every classical limit exist.
class MeasureSequence {
 public:
  MeasureSequence(std::vector<StepMeasure> table, Rat norm_bound);

  const StepMeasure& at(long n) const;
  long table_size() const { return long(table_.size()); }
  const Rat& norm_bound() const { return bound_; }
  const MeasureSpace& space() const { return table_.front().space(); }

  static MeasureSequence constant(StepMeasure nu);

  // A fluctuation bound valid for every (E, m_hat, n, sigma): any window
  // scan stabilizes within table_size()-1 steps.
  long universal_fluctuation_bound() const { return std::max<long>(1, table_size() - 1); }

 private:
  std::vector<StepMeasure> table_;
  Rat bound_;
};

// Two families rho_n, lambda_p on a common space; the product grid
// (rho_n lambda_p) is derived on demand.  Eventually constant in each index.
class DoubleSequence {
 public:
  DoubleSequence(std::vector<StepMeasure> rho_table, std::vector<StepMeasure> lambda_table,
                 Rat norm_bound);

  const StepMeasure& rho(long n) const;
  const StepMeasure& lambda(long p) const;
  StepMeasure grid(long n, long p) const;  // pointwise product

  long rho_size() const { return long(rho_.size()); }
  long lambda_size() const { return long(lambda_.size()); }
  const Rat& norm_bound() const { return bound_; }
  const MeasureSpace& space() const { return rho_.front().space(); }

  MeasureSequence rho_family() const { return MeasureSequence(rho_, bound_); }
  MeasureSequence lambda_family() const { return MeasureSequence(lambda_, bound_); }
  // Row m of the product grid as a sequence in the second index.
  MeasureSequence product_row(long m) const;
  // Column r of the product grid as a sequence in the first index.
  MeasureSequence product_column(long r) const;
  DoubleSequence transposed() const { return DoubleSequence(lambda_, rho_, bound_); }

 private:
  std::vector<StepMeasure> rho_, lambda_;
  Rat bound_;
};

}  // namespace qmt

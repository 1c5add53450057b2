#include "qmt/sequence.hpp"

#include "qmt/products.hpp"

namespace qmt {

MeasureSequence::MeasureSequence(std::vector<StepMeasure> table, Rat norm_bound)
    : table_(std::move(table)), bound_(std::move(norm_bound)) {
  if (table_.empty()) fail(Err::ValidationError, "empty measure sequence");
  for (const StepMeasure& m : table_) {
    if (!(m.space() == table_.front().space()))
      fail(Err::SpaceMismatch, "sequence entries on different spaces");
    if (l1_norm(m) > bound_) fail(Err::BoundViolation, "sequence entry exceeds the L1 bound");
  }
}

const StepMeasure& MeasureSequence::at(long n) const {
  if (n < 0) fail(Err::IndexOutOfRange, "negative sequence index");
  if (n >= long(table_.size())) return table_.back();
  return table_[std::size_t(n)];
}

MeasureSequence MeasureSequence::constant(StepMeasure nu) {
  Rat b = l1_norm(nu);
  return MeasureSequence({std::move(nu)}, b);
}

DoubleSequence::DoubleSequence(std::vector<StepMeasure> rho_table,
                               std::vector<StepMeasure> lambda_table, Rat norm_bound)
    : rho_(std::move(rho_table)), lambda_(std::move(lambda_table)), bound_(std::move(norm_bound)) {
  if (rho_.empty() || lambda_.empty()) fail(Err::ValidationError, "empty double sequence");
  for (const StepMeasure& m : rho_) {
    if (!(m.space() == rho_.front().space())) fail(Err::SpaceMismatch, "rho entries on different spaces");
    if (l1_norm(m) > bound_) fail(Err::BoundViolation, "rho entry exceeds the L1 bound");
  }
  for (const StepMeasure& m : lambda_) {
    if (!(m.space() == rho_.front().space())) fail(Err::SpaceMismatch, "lambda entries on different spaces");
    if (l1_norm(m) > bound_) fail(Err::BoundViolation, "lambda entry exceeds the L1 bound");
  }
}

const StepMeasure& DoubleSequence::rho(long n) const {
  if (n < 0) fail(Err::IndexOutOfRange, "negative rho index");
  return n >= long(rho_.size()) ? rho_.back() : rho_[std::size_t(n)];
}

const StepMeasure& DoubleSequence::lambda(long p) const {
  if (p < 0) fail(Err::IndexOutOfRange, "negative lambda index");
  return p >= long(lambda_.size()) ? lambda_.back() : lambda_[std::size_t(p)];
}

StepMeasure DoubleSequence::grid(long n, long p) const { return pointwise_product(rho(n), lambda(p)); }

MeasureSequence DoubleSequence::product_row(long m) const {
  std::vector<StepMeasure> t;
  Rat b = 0;
  for (long p = 0; p < lambda_size(); ++p) {
    t.push_back(grid(m, p));
    b = std::max(b, l1_norm(t.back()));
  }
  return MeasureSequence(std::move(t), b);
}

MeasureSequence DoubleSequence::product_column(long r) const {
  std::vector<StepMeasure> t;
  Rat b = 0;
  for (long n = 0; n < rho_size(); ++n) {
    t.push_back(grid(n, r));
    b = std::max(b, l1_norm(t.back()));
  }
  return MeasureSequence(std::move(t), b);
}

}  // namespace qmt

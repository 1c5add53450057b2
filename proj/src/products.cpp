#include "qmt/products.hpp"

#include <algorithm>
#include <map>

namespace qmt {

StepMeasure pointwise_product(const StepMeasure& rho, const StepMeasure& lambda) {
  if (!(rho.space() == lambda.space())) fail(Err::SpaceMismatch, "product of measures on different spaces");
  const MeasureSpace& sp = rho.space();
  std::vector<Rat> vals(sp.atom_count());
  for (int a = 0; a < sp.atom_count(); ++a)
    vals[a] = rho.atom_density(a) * lambda.atom_density(a) * sp.weight(a);
  return StepMeasure(sp, std::move(vals));
}

Rat star_product(const StepMeasure& rho, const StepMeasure& lambda, AtomSet sigma) {
  if (!(rho.space() == lambda.space())) fail(Err::SpaceMismatch, "star product on different spaces");
  Rat m = rho.space().mu(sigma);
  if (m == 0) fail(Err::NullCarrier, "star product on a set of measure zero");
  return rho.of_set(sigma) * lambda.of_set(sigma) / m;
}

EConstCertificate is_e_constant(const StepMeasure& rho, const std::vector<AtomSet>& cells, long e) {
  if (e < 1) fail(Err::PreconditionViolated, "E must be >= 1");
  std::uint32_t seen = 0;
  for (const AtomSet& c : cells) {
    if (c.bits & seen) fail(Err::PreconditionViolated, "cells must be pairwise disjoint");
    seen |= c.bits;
    if (rho.space().mu(c) == 0) fail(Err::NullCarrier, "E-constancy cell of measure zero");
  }
  EConstCertificate cert;
  cert.cells = cells;
  cert.e = e;
  cert.valid = true;
  const Rat tol = Rat(1, e);
  for (const AtomSet& c : cells) {
    bool first = true;
    Rat lo = 0, hi = 0;
    for (int a = 0; a < rho.space().atom_count(); ++a) {
      if (!c.contains(a) || rho.space().weight(a) == 0) continue;
      Rat f = rho.atom_density(a);
      if (first) {
        lo = hi = f;
        first = false;
      } else {
        lo = std::min(lo, f);
        hi = std::max(hi, f);
      }
    }
    Rat osc = hi - lo;
    cert.oscillations.push_back(osc);
    if (osc > tol) cert.valid = false;
  }
  return cert;
}

LevelSetRefinement level_set_refinement(const StepMeasure& rho, const Partition& b, long e, long d,
                                        const Rat& bound, const Rat& k_override) {
  if (e < 1 || d < 1) fail(Err::PreconditionViolated, "E and D must be >= 1");
  if (bound < l1_norm(rho)) fail(Err::BoundViolation, "B below the L1 norm of rho");
  const MeasureSpace& sp = rho.space();
  Rat k = bound * d;
  if (k_override > k) k = k_override;
  if (k == 0) k = 1;  // zero measure: one band suffices either way

  struct CellPieces {
    std::map<Int, AtomSet> bands;  // band index -> atoms, bands of width 1/E anchored at -K
    AtomSet high;                  // |f| > K
    AtomSet nulls;                 // zero-weight atoms, reattached below
  };
  std::vector<CellPieces> pieces(b.size());
  for (std::size_t ci = 0; ci < b.size(); ++ci) {
    for (int a = 0; a < sp.atom_count(); ++a) {
      if (!b.cell(ci).contains(a)) continue;
      if (sp.weight(a) == 0) {
        pieces[ci].nulls = pieces[ci].nulls | AtomSet::single(a);
        continue;
      }
      Rat f = rho.atom_density(a);
      if (abs(f) > k) {
        pieces[ci].high = pieces[ci].high | AtomSet::single(a);
        continue;
      }
      // Left-closed right-open bands [-K + i/E, -K + (i+1)/E); the topmost
      // band absorbs f = K so the in-range band count stays at ceil(2KE).
      Rat pos = (f + k) * e;  // >= 0 here
      Int idx = num(pos) / den(pos);
      Int cap = rat_ceil(2 * k * e) - 1;
      if (idx > cap) idx = cap;
      pieces[ci].bands[idx] = pieces[ci].bands[idx] | AtomSet::single(a);
    }
  }

  // Capacity per source cell; overflow bands are merged into the defect
  // piece while the total defect measure stays below 1/D.
  Rat capacity_rat = 2 * bound * d * e;
  Rat defect_mu = 0;
  for (const auto& cp : pieces) defect_mu += sp.mu(cp.high);
  std::vector<AtomSet> refined_cells, defect_cells;
  for (auto& cp : pieces) {
    Rat used = Rat(long(cp.bands.size())) + (cp.high.empty() ? 0 : 1);
    if (used > capacity_rat && !cp.high.empty()) {
      // Merge lightest bands into the defect piece if the budget allows.
      std::vector<Int> order;
      for (const auto& [i, s] : cp.bands) order.push_back(i);
      std::sort(order.begin(), order.end(), [&](const Int& x, const Int& y) {
        Rat mx = sp.mu(cp.bands[x]), my = sp.mu(cp.bands[y]);
        return mx != my ? mx < my : x < y;
      });
      for (const Int& i : order) {
        if (used <= capacity_rat) break;
        Rat m = sp.mu(cp.bands[i]);
        if (defect_mu + m >= Rat(1, d)) break;  // keep the mu(B'') < 1/D clause
        defect_mu += m;
        cp.high = cp.high | cp.bands[i];
        cp.bands.erase(i);
        used -= 1;
      }
    }
    // Null atoms ride with the first band (or high piece) so no zero-measure
    // cell is created; an all-null cell stays whole.
    if (!cp.nulls.empty()) {
      if (!cp.bands.empty())
        cp.bands.begin()->second = cp.bands.begin()->second | cp.nulls;
      else if (!cp.high.empty())
        cp.high = cp.high | cp.nulls;
      else
        refined_cells.push_back(cp.nulls);
    }
    for (const auto& [i, s] : cp.bands) refined_cells.push_back(s);
    if (!cp.high.empty()) {
      refined_cells.push_back(cp.high);
      defect_cells.push_back(cp.high);
    }
  }

  LevelSetRefinement out;
  out.refined = Partition(std::move(refined_cells));
  out.defect = std::move(defect_cells);
  return out;
}

std::vector<AtomSet> density_move_cells(const StepMeasure& lambda, const Partition& coarse,
                                        const Partition& fine, long e) {
  if (!refines(coarse, fine)) fail(Err::NotRefinement, "density_move_cells needs coarse <= fine");
  std::vector<AtomSet> out;
  const Rat tol = Rat(1, e);
  for (const AtomSet& tau : fine.cells()) {
    if (lambda.space().mu(tau) == 0) continue;
    AtomSet parent = parent_cell(tau, coarse);
    if (lambda.space().mu(parent) == 0) continue;
    if (abs(density(lambda, tau) - density(lambda, parent)) >= tol) out.push_back(tau);
  }
  return out;
}

RefinementErrorBound refinement_error_bound(const StepMeasure& rho, const StepMeasure& lambda,
                                            const Partition& b, const Partition& b_prime,
                                            const std::vector<AtomSet>& b_minus, long e,
                                            const Rat& c, const Rat& bound) {
  if (!refines(b, b_prime)) fail(Err::PreconditionViolated, "refinement bound needs b <= b'");
  if (l1_norm(rho) > bound || l1_norm(lambda) > bound)
    fail(Err::PreconditionViolated, "norms exceed the supplied bound");
  std::vector<AtomSet> econst_cells;
  for (const AtomSet& tau : b_prime.cells()) {
    bool excluded = std::find(b_minus.begin(), b_minus.end(), tau) != b_minus.end();
    if (!excluded && rho.space().mu(tau) > 0) econst_cells.push_back(tau);
  }
  if (!is_e_constant(rho, econst_cells, e).valid)
    fail(Err::PreconditionViolated, "rho is not E-constant on b' minus the defect");

  const MeasureSpace& sp = rho.space();
  StepMeasure prod = pointwise_product(rho, lambda);

  Rat lhs = 0;
  for (const AtomSet& sigma : b.cells()) {
    if (sp.mu(sigma) == 0) continue;
    if (abs(density(lambda, sigma)) > c) continue;
    lhs += abs(prod.of_set(sigma) - star_product(rho, lambda, sigma));
  }

  // rhs defect family: density-move cells of lambda within b' plus b_minus.
  std::vector<AtomSet> defect = density_move_cells(lambda, b, b_prime, e);
  for (const AtomSet& s : b_minus) {
    if (std::find(defect.begin(), defect.end(), s) == defect.end()) defect.push_back(s);
  }
  Rat abs_rho = 0, abs_prod = 0;
  for (const AtomSet& s : defect) {
    abs_rho += abs(rho.of_set(s));
    abs_prod += abs(prod.of_set(s));
  }
  RefinementErrorBound out;
  out.lhs = lhs;
  out.rhs = Rat(2) * bound / e + c * abs_rho + abs_prod;
  return out;
}

}  // namespace qmt

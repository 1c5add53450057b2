#pragma once

#include <vector>

#include "qmt/measure.hpp"

namespace qmt {

// Oscillation certificate for approximate constancy of a density on a list
// of cells: valid iff (max f - min f) <= 1/E on every cell, f taken over the
// positive-measure atoms.  This is the reading the level-set construction
// delivers; the literal universally-quantified definition forces exact
// constancy on multi-atom cells (see tests for the separating example).
struct EConstCertificate {
  std::vector<AtomSet> cells;
  long e = 1;
  std::vector<Rat> oscillations;  // per cell
  bool valid = false;
};

// (rho*lambda)(sigma) = integral of f*g over sigma: atom values f(a)g(a)mu(a).
StepMeasure pointwise_product(const StepMeasure& rho, const StepMeasure& lambda);

// (rho * lambda)(sigma) = rho(sigma)lambda(sigma)/mu(sigma); not additive.
Rat star_product(const StepMeasure& rho, const StepMeasure& lambda, AtomSet sigma);

EConstCertificate is_e_constant(const StepMeasure& rho, const std::vector<AtomSet>& cells, long e);

struct LevelSetRefinement {
  Partition refined;            // B'
  std::vector<AtomSet> defect;  // B'' as a sub-list of B' cells
};

// Slices each cell of b into density bands of width 1/E over [-K, K] with
// K = max(B*D, k_override), plus one high-density piece per cell.  Guarantees
// mu(B'') < 1/D and oscillation-E-constancy of rho on B' \ B''; keeps
// |B'| <= 2*B*D*E*|b| whenever the defect budget allows merging overflow
// bands into the defect piece.
LevelSetRefinement level_set_refinement(const StepMeasure& rho, const Partition& b, long e, long d,
                                        const Rat& bound, const Rat& k_override = Rat(0));

struct RefinementErrorBound {
  Rat lhs;  // sum over cells of b with |delta_lambda| <= C of |(rho lambda) - (rho*lambda)|
  Rat rhs;  // 2B/E + C|rho|(D union b_minus) + |rho lambda|(D union b_minus)
};

// Both sides of the refinement error estimate; throws PreconditionViolated
// unless b <= b_prime, rho is E-constant (oscillation sense) on b' \ b_minus
// and both norms are <= bound.
RefinementErrorBound refinement_error_bound(const StepMeasure& rho, const StepMeasure& lambda,
                                            const Partition& b, const Partition& b_prime,
                                            const std::vector<AtomSet>& b_minus, long e,
                                            const Rat& c, const Rat& bound);

// Cells of fine whose lambda-density moved by >= 1/E from their parent in
// coarse (the difference set of the refinement estimate).  Cells or parents
// of measure zero are skipped.
std::vector<AtomSet> density_move_cells(const StepMeasure& lambda, const Partition& coarse,
                                        const Partition& fine, long e);

}  // namespace qmt

#ifndef EMBEVAL_MATCH_H
#define EMBEVAL_MATCH_H

#include <string>
#include <vector>

#include "condition.h"
#include "domain.h"

namespace embeval {

// Precondition or effect comparison of one operator pair, as clause-level
// retrieval counts.  Rates are 1.0 when nothing was predicted or expected.
struct SectionScore {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    // predicted clause index -> ground-truth clause index, -1 when unmatched
    std::vector<int> pairing;
};

struct MatchReport {
    std::string name;
    bool arity_mismatch = false;
    SectionScore precondition;
    SectionScore effect;
    SectionScore combined; // micro-averaged over both sections
};

// Canonical form used by the matcher: parameters renamed positionally (p0,
// p1, ...), quantifier variables by nesting depth (q0, q1, ...), same-kind
// connectives flattened, singleton connectives collapsed.
CondPtr normalize_for_match(const CondPtr &cond,
                            const std::vector<TypedVar> &params);

// Top-level conjuncts of a normalized expression; empty for null or an empty
// conjunction, the whole expression otherwise.
std::vector<CondPtr> flatten_clauses(const CondPtr &cond);

// Structural similarity in [0, 1].  Literals and unary/binary connectives
// match all-or-nothing; And/Or children are paired by maximum bipartite
// matching of perfect child matches and scored matched / min(m, n).
// Variables compare by name, so callers align parameter names first
// (score_operator does this positionally).
double match_expressions(const CondPtr &pred, const CondPtr &gt);

// Clause-level precision/recall/F1 of a predicted operator against its
// ground-truth counterpart.  A clause pair counts as matched only when it
// matches perfectly.  Name or parameter-count disagreement yields an
// arity-mismatch report with zero scores.
MatchReport score_operator(const OperatorSchema &pred,
                           const OperatorSchema &gt);

} // namespace embeval

#endif

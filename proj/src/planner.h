#ifndef EMBEVAL_PLANNER_H
#define EMBEVAL_PLANNER_H

#include <string>
#include <vector>

#include "domain.h"
#include "goals.h"
#include "pddl.h"

namespace embeval {

enum class PlanStatus { found, unreachable, budget_exhausted };

const char *plan_status_name(PlanStatus status);

struct PlanResult {
    PlanStatus status = PlanStatus::unreachable;
    std::vector<GroundAction> actions;
    std::vector<std::string> steps; // visible renderings of `actions`
    int expanded = 0;               // nodes popped from the frontier
    int generated = 0;              // distinct states created, start included
};

inline constexpr int kDefaultNodeBudget = 200000;

// Ground goal literals of a problem: the goal must be a conjunction of ground
// literals (or a single one).  Throws Error(validation_error) on quantifiers,
// disjunction, When, or variables.
std::vector<GoalLiteral> goal_literals(const PlanningProblem &problem);

// Forward uniform-cost search with unit costs, breaking ties toward states
// satisfying more goal literals, FIFO among equals.  Candidate actions are
// enumerated in (schema declaration, argument) order, so results are
// deterministic.  Exhausting the frontier proves unreachability; exceeding
// `node_budget` generated states does not.
PlanResult plan(const Domain &domain, const PlanningProblem &problem,
                int node_budget = kDefaultNodeBudget);

// Copy of `base` with the same-named schema replaced (appended when absent).
// Predicates the replacement mentions but `base` never declared are added so
// the result still validates.
Domain with_operator(const Domain &base, const OperatorSchema &replacement);

} // namespace embeval

#endif

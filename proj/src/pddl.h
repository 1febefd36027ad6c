#ifndef EMBEVAL_PDDL_H
#define EMBEVAL_PDDL_H

#include "domain.h"

namespace embeval {

struct PlanningProblem {
    std::string name;
    std::string domain_name;
    std::shared_ptr<Universe> universe;
    WorldState init;
    CondPtr goal;
};

// Parses a PDDL-subset domain: :predicates, :action blocks with
// :parameters/:precondition/:effect over and/or/not/when/forall/exists.
// Case-insensitive; comments start with ';'.  Free variables in a
// precondition are implicitly existentially quantified (recorded in
// Domain::diagnostics); free variables in effects are errors.
Domain load_domain(const std::string &text);

// Parses (define (problem ...) (:domain ...) (:objects ...) (:init ...)
// (:goal ...)).
PlanningProblem load_problem(const std::string &text, const Domain &domain);

std::string render_domain(const Domain &domain);
std::string render_problem(const PlanningProblem &problem);

// Parses one condition s-expression (used for ingesting predicted operators).
CondPtr parse_condition_text(const std::string &text);

// Parses bare (:action ...) blocks -- or the :action entries of a full
// (define (domain ...)) form -- without requiring predicate declarations.
// Free-precondition-variable wrapping matches load_domain; its notes land in
// `diagnostics` when given.
std::vector<OperatorSchema>
parse_action_blocks(const std::string &text,
                    std::vector<std::string> *diagnostics = nullptr);

} // namespace embeval

#endif

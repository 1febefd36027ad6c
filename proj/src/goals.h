#ifndef EMBEVAL_GOALS_H
#define EMBEVAL_GOALS_H

#include "condition.h"
#include "ltl.h"

namespace embeval {

// Goal-condition tree: literals under and/or/not plus the four goal
// quantifiers.  forpairs pairs two category instance sets bijectively.
enum class GKind { lit, and_, or_, forall, exists, forn, forpairs };

struct GoalNode;
using GoalPtr = std::shared_ptr<const GoalNode>;

struct GoalNode {
    GKind kind = GKind::lit;
    // literal
    std::string pred;
    std::vector<Term> args;
    bool positive = true;
    // quantifiers
    std::string var, type;
    std::string var2, type2; // forpairs only
    int count = 0;           // forn only
    std::vector<GoalPtr> children;

    static GoalPtr lit(std::string pred, std::vector<Term> args,
                       bool positive = true);
    static GoalPtr conj(std::vector<GoalPtr> cs);
    static GoalPtr disj(std::vector<GoalPtr> cs);
    static GoalPtr negate(GoalPtr c); // folds into literals (De Morgan)
    static GoalPtr forall(std::string var, std::string type, GoalPtr body);
    static GoalPtr exists(std::string var, std::string type, GoalPtr body);
    static GoalPtr forn(int count, std::string var, std::string type, GoalPtr body);
    static GoalPtr forpairs(std::string var, std::string type, std::string var2,
                            std::string type2, GoalPtr body);
};

// One action goal: any of the alternative names (split from "LOOKAT|WATCH"),
// with optional required arguments.
struct ActionGoal {
    std::vector<std::string> names;  // lower-case
    std::vector<ObjectRef> args;     // empty = match any arguments

    std::string str() const;
    bool matches(const ActionRef &action) const;
};

struct GoalSpec {
    GoalPtr condition;               // null = no state/relation goals
    std::vector<ActionGoal> actions; // ordered

    bool empty() const { return !condition && actions.empty(); }
};

// A fully ground literal of a goal option.
struct GoalLiteral {
    Proposition prop;
    bool positive = true;

    std::string str() const;
    // "state" for unary literals, "relation" otherwise
    std::string category() const;

    friend bool operator==(const GoalLiteral &a, const GoalLiteral &b) {
        return a.positive == b.positive && a.prop == b.prop;
    }
    friend bool operator<(const GoalLiteral &a, const GoalLiteral &b) {
        if (a.prop != b.prop) return a.prop < b.prop;
        return a.positive < b.positive;
    }
};

struct GoalOption {
    std::vector<GoalLiteral> literals; // sorted, unique
    std::string canonical() const;
};

struct OptionSet {
    std::vector<GoalOption> options; // deterministic order, deduplicated
    bool overflow = false;           // enumeration stopped at the cap
    std::vector<std::string> warnings;
};

inline constexpr int kDefaultOptionCap = 10000;

// Grounds the quantifiers: forall -> conjunction, exists -> one option per
// instance, forn(k) -> all k-subsets, forpairs -> all pairings.  Stops at cap.
OptionSet expand_options(const GoalSpec &spec, const Universe &universe,
                         int cap = kDefaultOptionCap);

// Direct quantified evaluation against one state (used past the option cap,
// and for quantified subgoal segments).  forn means "at least count".
bool eval_goal(const GoalPtr &node, const WorldState &state);

// Closed-world truth of one ground literal with the implicit-unary fallback.
bool goal_literal_holds(const WorldState &state, const GoalLiteral &lit);

struct LiteralResult {
    GoalLiteral literal;
    bool satisfied = false;
};

struct GoalBreakdown {
    int option_index = -1; // best option; -1 when evaluated directly
    std::vector<LiteralResult> literals;
    std::vector<std::pair<std::string, bool>> actions; // goal text, matched
    bool action_sequence_matched = true;
    bool vacuous_quantifier = false;
    bool overflowed = false;

    std::vector<std::string> unsatisfied_node_goals() const;
    std::vector<std::string> unsatisfied_edge_goals() const;
    std::vector<std::string> unsatisfied_action_goals() const;
};

struct SatisfactionResult {
    bool satisfied = false;
    double partial = 0.0; // fraction of subgoal units achieved, best option
    GoalBreakdown breakdown;
};

// Satisfaction against the final state plus action-subsequence matching;
// satisfied <=> partial == 1.0.
SatisfactionResult check_satisfaction(const GoalSpec &spec,
                                      const Trajectory &trajectory,
                                      int cap = kDefaultOptionCap);

double partial_success(const GoalSpec &spec, const Trajectory &trajectory,
                       int cap = kDefaultOptionCap);

// Predicted goals arrive as a flat literal list plus an action list;
// hallucinated entries are dropped upstream and only counted here.
struct PredictedGoals {
    std::vector<GoalLiteral> literals;
    std::vector<ActionGoal> actions;
    int hallucinated = 0;
};

struct CategoryScore {
    int tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    bool present = false; // any element on either side
};

struct InterpretationScore {
    CategoryScore state, relation, action, overall;
    int best_option = -1;
    int hallucinated = 0;
};

// Set-matching F1 against the best goal option; the action sequence counts as
// one element of the set.  Categories follow the literal arity partition.
InterpretationScore interpret_f1(const PredictedGoals &predicted,
                                 const GoalSpec &gt, const Universe &universe,
                                 int cap = kDefaultOptionCap);

// Parses a BDDL-flavoured goal s-expression:
//   (and (inside apple.1 jar.1) (forpairs (?jar - jar) (?apple - apple)
//        (inside ?apple ?jar)))
// WordNet-style category suffixes (".n.01") are stripped from names.
GoalSpec parse_goal_sexpr(const std::string &text);

// Folds a canonical LTL goal ("a1 then a2 then (p and q)") into action goals
// plus a final-state condition.  Leading then-segments must be action atoms
// (or disjunctions of them); the final segment carries the state goals.
GoalSpec goal_spec_from_ltl(const ltl::Formula &formula, const Vocabulary &vocab);

} // namespace embeval

#endif

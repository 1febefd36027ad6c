#ifndef EMBEVAL_LTL_H
#define EMBEVAL_LTL_H

#include <memory>
#include <string>
#include <vector>

#include "world.h"

namespace embeval {

// An executed ground action inside a trajectory.
struct ActionRef {
    std::string name; // canonical lower-case
    std::vector<ObjectRef> args;

    std::string str() const;

    friend bool operator==(const ActionRef &a, const ActionRef &b) {
        return a.name == b.name && a.args == b.args;
    }
};

// States s0..sn plus the incoming action of each step; step 0 has none, so an
// action atom can never hold at step 0.
struct Trajectory {
    std::vector<WorldState> states;
    std::vector<ActionRef> actions; // actions.size() + 1 == states.size()

    size_t steps() const { return states.size(); }
    void check() const;
};

namespace ltl {

enum class FKind { atom, not_, and_, or_, implies, forall, exists, forn, then };

// Atom argument: either a quantified variable or an object constant (possibly
// a bare category name resolved against the universe at evaluation time).
struct ArgPattern {
    bool is_var = false;
    std::string var;
    ObjectRef obj;

    static ArgPattern make_var(std::string name);
    static ArgPattern make_obj(ObjectRef ref);
    std::string str() const;

    friend bool operator==(const ArgPattern &a, const ArgPattern &b) {
        if (a.is_var != b.is_var) return false;
        return a.is_var ? a.var == b.var : a.obj == b.obj;
    }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FKind kind;
    // atom
    std::string name;        // canonical lower-case
    std::string source_name; // as written (case preserved, for lint heuristics)
    std::vector<ArgPattern> args;
    // quantifiers
    std::string var;
    int count = 0; // forn
    // composite nodes
    std::vector<FormulaPtr> children;

    bool contains_then = false; // computed on construction

    static FormulaPtr atom(std::string name, std::vector<ArgPattern> args);
    static FormulaPtr negate(FormulaPtr f);
    static FormulaPtr conj(std::vector<FormulaPtr> fs);
    static FormulaPtr disj(std::vector<FormulaPtr> fs);
    static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
    static FormulaPtr forall(std::string var, FormulaPtr body);
    static FormulaPtr exists(std::string var, FormulaPtr body);
    static FormulaPtr forn(int n, std::string var, FormulaPtr body);
    static FormulaPtr then(std::vector<FormulaPtr> fs);
};

bool equal(const FormulaPtr &a, const FormulaPtr &b);

// Parses the temporal goal dialect.  Precedence from tightest to loosest:
// parentheses and quantifier bodies, not, and, or, then.  Identifiers are
// case-insensitive and canonicalized to lower case.  The n-of quantifier is
// written "forn(<k>) x. (...)" and also accepted as "forn<k> x. (...)".
// Throws Error(parse_error) carrying the byte offset and expected tokens.
FormulaPtr parse(const std::string &text);

// Canonical text form; parse(render(f)) == f structurally for formulas
// expressible in the surface dialect (implies renders as "not _ or _").
std::string render(const FormulaPtr &f);

// Structural checks: every variable bound, no negation over a subtree that
// contains "then".  Throws Error(validation_error).
void validate(const FormulaPtr &f);

// Truth of f over the trajectory.  A then-free formula holds if some single
// step satisfies it pointwise; "a then b" holds if the step range splits into
// consecutive non-empty segments satisfying the parts in order.  Quantifiers
// range over the whole universe; forn(n) counts exactly n witnesses.  Throws
// Error(vocabulary_error) on arity mismatches against `vocab`.
bool evaluate(const FormulaPtr &f, const Trajectory &traj, const Vocabulary &vocab);

// Pointwise truth of a then-free formula at one step: state atoms read
// states[step], action atoms read the incoming action (false at step 0).
bool evaluate_at(const FormulaPtr &f, const Trajectory &traj, size_t step,
                 const Vocabulary &vocab);

struct LintFinding {
    enum class Kind { hallucination, arity, forn_over_then };
    enum class Subject { predicate, action, object };
    Kind kind;
    Subject subject_kind = Subject::predicate;
    std::string subject;
    int expected = -1;
    int got = -1;
    std::string message;
};

// Vocabulary / universe checks; never throws.
std::vector<LintFinding> lint(const FormulaPtr &f, const Vocabulary &vocab,
                              const Universe &universe);

} // namespace ltl
} // namespace embeval

#endif

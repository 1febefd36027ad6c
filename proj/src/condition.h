#ifndef EMBEVAL_CONDITION_H
#define EMBEVAL_CONDITION_H

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "world.h"

namespace embeval {

// Term in a schema condition: schema/quantifier variable or object constant.
// Constants may be bare category names ("sink") resolved against the universe.
struct Term {
    bool is_var = false;
    std::string var;
    ObjectRef obj;

    static Term make_var(std::string name);
    static Term make_obj(ObjectRef ref);
    std::string str() const;

    friend bool operator==(const Term &a, const Term &b) {
        if (a.is_var != b.is_var) return false;
        return a.is_var ? a.var == b.var : a.obj == b.obj;
    }
    friend bool operator<(const Term &a, const Term &b) {
        if (a.is_var != b.is_var) return a.is_var < b.is_var;
        if (a.is_var) return a.var < b.var;
        return a.obj < b.obj;
    }
};

enum class CKind { lit, and_, or_, not_, when, forall, exists };

struct Condition;
using CondPtr = std::shared_ptr<const Condition>;

// Schema condition AST shared by preconditions and effects.  Negated literals
// are stored as a literal with positive=false; the not_ node only wraps
// non-literal subtrees.
struct Condition {
    CKind kind;
    // lit
    std::string pred;
    std::vector<Term> args;
    bool positive = true;
    // quantifiers
    std::string var;
    std::string type; // "object" (or empty) quantifies over everything
    // and_/or_: children; not_: 1 child; when: condition, consequence;
    // forall/exists: body
    std::vector<CondPtr> children;

    static CondPtr lit(std::string pred, std::vector<Term> args, bool positive = true);
    static CondPtr conj(std::vector<CondPtr> cs);
    static CondPtr disj(std::vector<CondPtr> cs);
    static CondPtr negate(CondPtr c); // folds into literals
    static CondPtr when(CondPtr condition, CondPtr consequence);
    static CondPtr forall(std::string var, std::string type, CondPtr body);
    static CondPtr exists(std::string var, std::string type, CondPtr body);
    static CondPtr truth(); // empty conjunction
};

bool cond_equal(const CondPtr &a, const CondPtr &b);

using Binding = std::map<std::string, ObjectRef>;

// Objects a typed quantifier/parameter ranges over: everything for
// "object"/empty, otherwise category or property-tag match.
std::vector<ObjectRef> objects_of_type(const Universe &universe,
                                       const std::string &type);
bool type_matches(const Universe &universe, const ObjectRef &obj,
                  const std::string &type);

// Closed-world truth.  Derived predicates evaluated from universe/state
// structure rather than the fact set: "=", interactable, graspable (size at
// most medium), size_lt (strict ordinal size comparison).
bool eval_condition(const CondPtr &cond, const WorldState &state,
                    const Binding &binding);

// Substitutes bound variables with constants; leaves quantifier-bound
// variables in place.
CondPtr substitute(const CondPtr &cond, const Binding &binding);

// Expands an effect expression against `pre` (When conditions and quantifiers
// are resolved there), producing add/delete lists.  Throws
// Error(binding_error) on unresolved terms.
void collect_effects(const CondPtr &effect, const WorldState &pre,
                     const Binding &binding, std::vector<Proposition> *add,
                     std::vector<Proposition> *del);

// Structural rules for effect expressions: no or_/exists anywhere, not_ only
// as folded literals, when conditions unrestricted.  Throws
// Error(validation_error).
void validate_effect(const CondPtr &effect);

// Unsatisfied ground literals explaining why `cond` fails, following the
// branch of each disjunction with the highest satisfied count.  Empty when
// the condition holds.
std::vector<std::string> diagnose(const CondPtr &cond, const WorldState &state,
                                  const Binding &binding);

// Variables used but never declared (by `declared` or an enclosing
// quantifier).
std::set<std::string> free_variables(const CondPtr &cond,
                                     const std::set<std::string> &declared);

// Predicate names appearing in literals (optionally only inside effect
// assertions, skipping When conditions).
void collect_predicates(const CondPtr &cond, std::set<std::string> *out,
                        bool assertions_only = false);

// s-expression rendering, PDDL style: (and (next_to ?char ?obj) ...).
std::string to_pddl(const CondPtr &cond);

// Rewrites a precondition for the affordance check: literals over dynamic
// predicates become vacuously true, so only static structure (property tags,
// categories, size rules, static facts) can fail.
CondPtr affordance_view(const CondPtr &cond,
                        const std::set<std::string> &static_preds);

} // namespace embeval

#endif

#include "condition.h"

#include <algorithm>
#include <sstream>

namespace embeval {

Term Term::make_var(std::string name) {
    Term t;
    t.is_var = true;
    t.var = std::move(name);
    return t;
}

Term Term::make_obj(ObjectRef ref) {
    Term t;
    t.obj = std::move(ref);
    return t;
}

std::string Term::str() const { return is_var ? "?" + var : obj.str(); }

CondPtr Condition::lit(std::string pred, std::vector<Term> args, bool positive) {
    auto c = std::make_shared<Condition>();
    c->kind = CKind::lit;
    c->pred = std::move(pred);
    c->args = std::move(args);
    c->positive = positive;
    return c;
}

static CondPtr composite(CKind kind, std::vector<CondPtr> cs) {
    auto c = std::make_shared<Condition>();
    c->kind = kind;
    c->children = std::move(cs);
    return c;
}

CondPtr Condition::conj(std::vector<CondPtr> cs) {
    return composite(CKind::and_, std::move(cs));
}
CondPtr Condition::disj(std::vector<CondPtr> cs) {
    return composite(CKind::or_, std::move(cs));
}

CondPtr Condition::negate(CondPtr c) {
    if (c->kind == CKind::lit)
        return lit(c->pred, c->args, !c->positive);
    if (c->kind == CKind::not_) return c->children[0];
    return composite(CKind::not_, {std::move(c)});
}

CondPtr Condition::when(CondPtr condition, CondPtr consequence) {
    return composite(CKind::when, {std::move(condition), std::move(consequence)});
}

static CondPtr quantifier(CKind kind, std::string var, std::string type,
                          CondPtr body) {
    auto c = std::make_shared<Condition>();
    c->kind = kind;
    c->var = std::move(var);
    c->type = std::move(type);
    c->children = {std::move(body)};
    return c;
}

CondPtr Condition::forall(std::string var, std::string type, CondPtr body) {
    return quantifier(CKind::forall, std::move(var), std::move(type), std::move(body));
}
CondPtr Condition::exists(std::string var, std::string type, CondPtr body) {
    return quantifier(CKind::exists, std::move(var), std::move(type), std::move(body));
}

CondPtr Condition::truth() { return conj({}); }

bool cond_equal(const CondPtr &a, const CondPtr &b) {
    if (a->kind != b->kind) return false;
    if (a->kind == CKind::lit)
        return a->pred == b->pred && a->args == b->args && a->positive == b->positive;
    if (a->var != b->var || a->type != b->type) return false;
    if (a->children.size() != b->children.size()) return false;
    for (size_t i = 0; i < a->children.size(); ++i)
        if (!cond_equal(a->children[i], b->children[i])) return false;
    return true;
}

bool type_matches(const Universe &universe, const ObjectRef &obj,
                  const std::string &type) {
    if (type.empty() || type == "object") return true;
    return obj.category == type || universe.has_tag(obj, type);
}

std::vector<ObjectRef> objects_of_type(const Universe &universe,
                                       const std::string &type) {
    std::vector<ObjectRef> out;
    for (const auto &obj : universe.objects())
        if (type_matches(universe, obj, type)) out.push_back(obj);
    return out;
}

namespace {

std::optional<ObjectRef> resolve_term(const Term &term, const Universe &universe,
                                      const Binding &binding) {
    if (term.is_var) {
        auto it = binding.find(term.var);
        if (it == binding.end())
            throw Error(ErrorCode::binding_error, "unbound variable ?" + term.var);
        return it->second;
    }
    return universe.resolve(term.obj);
}

bool eval_literal(const Condition &lit, const WorldState &state,
                  const Binding &binding) {
    const Universe &universe = state.universe();
    std::vector<ObjectRef> args;
    args.reserve(lit.args.size());
    for (const auto &term : lit.args) {
        auto obj = resolve_term(term, universe, binding);
        if (!obj) return !lit.positive; // unknown object: atom is false
        args.push_back(*obj);
    }
    bool truth = false;
    if (lit.pred == "=" && args.size() == 2) {
        truth = args[0] == args[1];
    } else if (lit.pred == "interactable" && args.size() == 1) {
        truth = state.interactable(args[0]);
    } else if (lit.pred == "graspable" && args.size() == 1) {
        truth = universe.size_of(args[0]) <= SizeClass::medium;
    } else if (lit.pred == "size_lt" && args.size() == 2) {
        truth = universe.size_of(args[0]) < universe.size_of(args[1]);
    } else {
        truth = state.satisfies(Proposition(lit.pred, args));
        if (!truth && args.size() == 1)
            truth = universe.implicit_unary_truth(lit.pred, args[0]).value_or(false);
    }
    return lit.positive == truth;
}

} // namespace

bool eval_condition(const CondPtr &cond, const WorldState &state,
                    const Binding &binding) {
    switch (cond->kind) {
    case CKind::lit:
        return eval_literal(*cond, state, binding);
    case CKind::and_:
        for (const auto &c : cond->children)
            if (!eval_condition(c, state, binding)) return false;
        return true;
    case CKind::or_:
        for (const auto &c : cond->children)
            if (eval_condition(c, state, binding)) return true;
        return false;
    case CKind::not_:
        return !eval_condition(cond->children[0], state, binding);
    case CKind::when:
        return !eval_condition(cond->children[0], state, binding) ||
               eval_condition(cond->children[1], state, binding);
    case CKind::forall:
    case CKind::exists: {
        for (const auto &obj : objects_of_type(state.universe(), cond->type)) {
            Binding inner = binding;
            inner[cond->var] = obj;
            bool sat = eval_condition(cond->children[0], state, inner);
            if (cond->kind == CKind::forall && !sat) return false;
            if (cond->kind == CKind::exists && sat) return true;
        }
        return cond->kind == CKind::forall;
    }
    }
    return false;
}

CondPtr substitute(const CondPtr &cond, const Binding &binding) {
    switch (cond->kind) {
    case CKind::lit: {
        std::vector<Term> args;
        args.reserve(cond->args.size());
        for (const auto &term : cond->args) {
            if (term.is_var) {
                auto it = binding.find(term.var);
                if (it != binding.end()) {
                    args.push_back(Term::make_obj(it->second));
                    continue;
                }
            }
            args.push_back(term);
        }
        return Condition::lit(cond->pred, std::move(args), cond->positive);
    }
    case CKind::forall:
    case CKind::exists: {
        Binding inner = binding;
        inner.erase(cond->var); // quantifier shadows outer binding
        auto body = substitute(cond->children[0], inner);
        return cond->kind == CKind::forall
                   ? Condition::forall(cond->var, cond->type, body)
                   : Condition::exists(cond->var, cond->type, body);
    }
    default: {
        std::vector<CondPtr> children;
        children.reserve(cond->children.size());
        for (const auto &c : cond->children) children.push_back(substitute(c, binding));
        auto copy = std::make_shared<Condition>(*cond);
        copy->children = std::move(children);
        return copy;
    }
    }
}

void collect_effects(const CondPtr &effect, const WorldState &pre,
                     const Binding &binding, std::vector<Proposition> *add,
                     std::vector<Proposition> *del) {
    switch (effect->kind) {
    case CKind::lit: {
        const Universe &universe = pre.universe();
        std::vector<ObjectRef> args;
        for (const auto &term : effect->args) {
            auto obj = resolve_term(term, universe, binding);
            if (!obj)
                throw Error(ErrorCode::binding_error,
                            "effect references unknown object " + term.str());
            args.push_back(*obj);
        }
        (effect->positive ? add : del)->push_back(Proposition(effect->pred, args));
        return;
    }
    case CKind::and_:
        for (const auto &c : effect->children)
            collect_effects(c, pre, binding, add, del);
        return;
    case CKind::when:
        if (eval_condition(effect->children[0], pre, binding))
            collect_effects(effect->children[1], pre, binding, add, del);
        return;
    case CKind::forall:
        for (const auto &obj : objects_of_type(pre.universe(), effect->type)) {
            Binding inner = binding;
            inner[effect->var] = obj;
            collect_effects(effect->children[0], pre, inner, add, del);
        }
        return;
    default:
        throw Error(ErrorCode::validation_error,
                    "disallowed connective in effect: " + to_pddl(effect));
    }
}

void validate_effect(const CondPtr &effect) {
    switch (effect->kind) {
    case CKind::lit:
        return;
    case CKind::and_:
        for (const auto &c : effect->children) validate_effect(c);
        return;
    case CKind::when:
        validate_effect(effect->children[1]); // condition side is unrestricted
        return;
    case CKind::forall:
        validate_effect(effect->children[0]);
        return;
    default:
        throw Error(ErrorCode::validation_error,
                    "disallowed connective in effect: " + to_pddl(effect));
    }
}

namespace {

std::string literal_str(const Condition &lit, const Universe &universe,
                        const Binding &binding) {
    std::ostringstream out;
    if (!lit.positive) out << "not ";
    out << lit.pred << "(";
    for (size_t i = 0; i < lit.args.size(); ++i) {
        if (i) out << ", ";
        const Term &term = lit.args[i];
        if (term.is_var) {
            auto it = binding.find(term.var);
            out << (it != binding.end() ? it->second.str() : term.str());
        } else {
            auto resolved = universe.resolve(term.obj);
            out << (resolved ? resolved->str() : term.obj.str());
        }
    }
    out << ")";
    return out.str();
}

// satisfied / total leaf counts, following the best branch of disjunctions
std::pair<int, int> score_condition(const CondPtr &cond, const WorldState &state,
                                    const Binding &binding) {
    switch (cond->kind) {
    case CKind::lit:
        return {eval_literal(*cond, state, binding) ? 1 : 0, 1};
    case CKind::and_: {
        int sat = 0, total = 0;
        for (const auto &c : cond->children) {
            auto [s, t] = score_condition(c, state, binding);
            sat += s;
            total += t;
        }
        return {sat, total};
    }
    case CKind::or_: {
        std::pair<int, int> best{0, 1};
        bool first = true;
        for (const auto &c : cond->children) {
            auto sc = score_condition(c, state, binding);
            if (first || sc.first * best.second > best.first * sc.second ||
                (sc.first * best.second == best.first * sc.second &&
                 sc.first > best.first)) {
                best = sc;
                first = false;
            }
        }
        return best;
    }
    default:
        return {eval_condition(cond, state, binding) ? 1 : 0, 1};
    }
}

void diagnose_rec(const CondPtr &cond, const WorldState &state,
                  const Binding &binding, std::vector<std::string> *out) {
    if (eval_condition(cond, state, binding)) return;
    switch (cond->kind) {
    case CKind::lit:
        out->push_back(literal_str(*cond, state.universe(), binding));
        return;
    case CKind::and_:
        for (const auto &c : cond->children) diagnose_rec(c, state, binding, out);
        return;
    case CKind::or_: {
        const CondPtr *best = nullptr;
        std::pair<int, int> best_score{0, 1};
        for (const auto &c : cond->children) {
            auto sc = score_condition(c, state, binding);
            if (!best || sc.first * best_score.second > best_score.first * sc.second ||
                (sc.first * best_score.second == best_score.first * sc.second &&
                 sc.first > best_score.first)) {
                best = &c;
                best_score = sc;
            }
        }
        if (best) diagnose_rec(*best, state, binding, out);
        return;
    }
    case CKind::not_:
        out->push_back("not (" + to_pddl(cond->children[0]) + ")");
        return;
    case CKind::when:
        diagnose_rec(cond->children[1], state, binding, out);
        return;
    case CKind::forall: {
        int reported = 0;
        for (const auto &obj : objects_of_type(state.universe(), cond->type)) {
            Binding inner = binding;
            inner[cond->var] = obj;
            if (!eval_condition(cond->children[0], state, inner)) {
                diagnose_rec(cond->children[0], state, inner, out);
                if (++reported == 3) return;
            }
        }
        return;
    }
    case CKind::exists: {
        const auto candidates = objects_of_type(state.universe(), cond->type);
        if (candidates.empty()) {
            out->push_back("exists ?" + cond->var + " (" +
                           to_pddl(cond->children[0]) + ")");
            return;
        }
        std::optional<Binding> best;
        std::pair<int, int> best_score{-1, 1};
        for (const auto &obj : candidates) {
            Binding inner = binding;
            inner[cond->var] = obj;
            auto sc = score_condition(cond->children[0], state, inner);
            if (sc.first * best_score.second > best_score.first * sc.second) {
                best = inner;
                best_score = sc;
            }
        }
        if (best) diagnose_rec(cond->children[0], state, *best, out);
        return;
    }
    }
}

} // namespace

std::vector<std::string> diagnose(const CondPtr &cond, const WorldState &state,
                                  const Binding &binding) {
    std::vector<std::string> out;
    diagnose_rec(cond, state, binding, &out);
    return out;
}

std::set<std::string> free_variables(const CondPtr &cond,
                                     const std::set<std::string> &declared) {
    std::set<std::string> out;
    switch (cond->kind) {
    case CKind::lit:
        for (const auto &term : cond->args)
            if (term.is_var && !declared.count(term.var)) out.insert(term.var);
        return out;
    case CKind::forall:
    case CKind::exists: {
        auto inner = declared;
        inner.insert(cond->var);
        return free_variables(cond->children[0], inner);
    }
    default:
        for (const auto &c : cond->children) {
            auto sub = free_variables(c, declared);
            out.insert(sub.begin(), sub.end());
        }
        return out;
    }
}

void collect_predicates(const CondPtr &cond, std::set<std::string> *out,
                        bool assertions_only) {
    switch (cond->kind) {
    case CKind::lit:
        out->insert(cond->pred);
        return;
    case CKind::when:
        if (!assertions_only) collect_predicates(cond->children[0], out, false);
        collect_predicates(cond->children[1], out, assertions_only);
        return;
    default:
        for (const auto &c : cond->children)
            collect_predicates(c, out, assertions_only);
        return;
    }
}

std::string to_pddl(const CondPtr &cond) {
    std::ostringstream out;
    switch (cond->kind) {
    case CKind::lit: {
        std::ostringstream atom;
        atom << "(" << cond->pred;
        for (const auto &term : cond->args) atom << " " << term.str();
        atom << ")";
        if (cond->positive) out << atom.str();
        else out << "(not " << atom.str() << ")";
        break;
    }
    case CKind::and_:
    case CKind::or_: {
        if (cond->children.empty()) {
            out << "(and )";
            break;
        }
        out << (cond->kind == CKind::and_ ? "(and" : "(or");
        for (const auto &c : cond->children) out << " " << to_pddl(c);
        out << ")";
        break;
    }
    case CKind::not_:
        out << "(not " << to_pddl(cond->children[0]) << ")";
        break;
    case CKind::when:
        out << "(when " << to_pddl(cond->children[0]) << " "
            << to_pddl(cond->children[1]) << ")";
        break;
    case CKind::forall:
    case CKind::exists:
        out << (cond->kind == CKind::forall ? "(forall (?" : "(exists (?")
            << cond->var << " - " << (cond->type.empty() ? "object" : cond->type)
            << ") " << to_pddl(cond->children[0]) << ")";
        break;
    }
    return out.str();
}

namespace {

bool static_only(const CondPtr &cond, const std::set<std::string> &static_preds) {
    if (cond->kind == CKind::lit) return static_preds.count(cond->pred) > 0;
    for (const auto &c : cond->children)
        if (!static_only(c, static_preds)) return false;
    return true;
}

} // namespace

CondPtr affordance_view(const CondPtr &cond,
                        const std::set<std::string> &static_preds) {
    switch (cond->kind) {
    case CKind::lit:
        return static_preds.count(cond->pred) ? cond : Condition::truth();
    case CKind::not_:
    case CKind::when:
        return static_only(cond, static_preds) ? cond : Condition::truth();
    case CKind::and_:
    case CKind::or_: {
        std::vector<CondPtr> children;
        for (const auto &c : cond->children)
            children.push_back(affordance_view(c, static_preds));
        return cond->kind == CKind::and_ ? Condition::conj(std::move(children))
                                         : Condition::disj(std::move(children));
    }
    case CKind::forall:
        return Condition::forall(cond->var, cond->type,
                                 affordance_view(cond->children[0], static_preds));
    case CKind::exists:
        return Condition::exists(cond->var, cond->type,
                                 affordance_view(cond->children[0], static_preds));
    }
    return cond;
}

} // namespace embeval

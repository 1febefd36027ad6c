#include "goals.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>

#include "sexpr.h"

namespace embeval {

// ------------------------------------------------------------- GoalNode tree

GoalPtr GoalNode::lit(std::string pred, std::vector<Term> args, bool positive) {
    auto n = std::make_shared<GoalNode>();
    n->kind = GKind::lit;
    n->pred = std::move(pred);
    n->args = std::move(args);
    n->positive = positive;
    return n;
}

GoalPtr GoalNode::conj(std::vector<GoalPtr> cs) {
    auto n = std::make_shared<GoalNode>();
    n->kind = GKind::and_;
    n->children = std::move(cs);
    return n;
}

GoalPtr GoalNode::disj(std::vector<GoalPtr> cs) {
    auto n = std::make_shared<GoalNode>();
    n->kind = GKind::or_;
    n->children = std::move(cs);
    return n;
}

GoalPtr GoalNode::negate(GoalPtr c) {
    switch (c->kind) {
    case GKind::lit:
        return lit(c->pred, c->args, !c->positive);
    case GKind::and_: {
        std::vector<GoalPtr> out;
        for (const auto &child : c->children) out.push_back(negate(child));
        return disj(std::move(out));
    }
    case GKind::or_: {
        std::vector<GoalPtr> out;
        for (const auto &child : c->children) out.push_back(negate(child));
        return conj(std::move(out));
    }
    case GKind::forall:
        return exists(c->var, c->type, negate(c->children[0]));
    case GKind::exists:
        return forall(c->var, c->type, negate(c->children[0]));
    default:
        throw Error(ErrorCode::validation_error,
                    "cannot negate a counted goal quantifier");
    }
}

GoalPtr GoalNode::forall(std::string var, std::string type, GoalPtr body) {
    auto n = std::make_shared<GoalNode>();
    n->kind = GKind::forall;
    n->var = std::move(var);
    n->type = std::move(type);
    n->children = {std::move(body)};
    return n;
}

GoalPtr GoalNode::exists(std::string var, std::string type, GoalPtr body) {
    auto n = std::make_shared<GoalNode>();
    n->kind = GKind::exists;
    n->var = std::move(var);
    n->type = std::move(type);
    n->children = {std::move(body)};
    return n;
}

GoalPtr GoalNode::forn(int count, std::string var, std::string type, GoalPtr body) {
    auto n = std::make_shared<GoalNode>();
    n->kind = GKind::forn;
    n->count = count;
    n->var = std::move(var);
    n->type = std::move(type);
    n->children = {std::move(body)};
    return n;
}

GoalPtr GoalNode::forpairs(std::string var, std::string type, std::string var2,
                           std::string type2, GoalPtr body) {
    auto n = std::make_shared<GoalNode>();
    n->kind = GKind::forpairs;
    n->var = std::move(var);
    n->type = std::move(type);
    n->var2 = std::move(var2);
    n->type2 = std::move(type2);
    n->children = {std::move(body)};
    return n;
}

// ------------------------------------------------------------------ rendering

std::string ActionGoal::str() const {
    std::string out;
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) out += "|";
        std::string upper = names[i];
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        out += upper;
    }
    if (!args.empty()) {
        out += "(";
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) out += ", ";
            out += args[i].str();
        }
        out += ")";
    }
    return out;
}

bool ActionGoal::matches(const ActionRef &action) const {
    bool name_ok = false;
    for (const auto &n : names)
        if (n == action.name) name_ok = true;
    if (!name_ok) return false;
    if (args.empty()) return true;
    return args == action.args;
}

std::string GoalLiteral::str() const {
    return positive ? prop.str() : "not " + prop.str();
}

std::string GoalLiteral::category() const {
    return prop.args.size() == 1 ? "state" : "relation";
}

std::string GoalOption::canonical() const {
    std::string out;
    for (const auto &lit : literals) {
        if (!out.empty()) out += " & ";
        out += lit.str();
    }
    return out;
}

// ------------------------------------------------------------------ expansion

namespace {

using LiteralSet = std::vector<GoalLiteral>; // sorted, unique

LiteralSet merge(const LiteralSet &a, const LiteralSet &b) {
    LiteralSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Expander {
    const Universe &universe;
    size_t cap;
    bool overflow = false;
    std::vector<std::string> *warnings;

    std::vector<LiteralSet> cross(const std::vector<LiteralSet> &a,
                                  const std::vector<LiteralSet> &b) {
        std::vector<LiteralSet> out;
        for (const auto &x : a) {
            for (const auto &y : b) {
                out.push_back(merge(x, y));
                if (out.size() >= cap && !(x == a.back() && y == b.back())) {
                    overflow = true;
                    return out;
                }
            }
        }
        return out;
    }

    std::vector<LiteralSet> concat(std::vector<LiteralSet> a,
                                   const std::vector<LiteralSet> &b) {
        for (const auto &y : b) {
            if (a.size() >= cap) {
                overflow = true;
                break;
            }
            a.push_back(y);
        }
        return a;
    }

    GoalLiteral resolve(const GoalNode &node, const Binding &binding) {
        GoalLiteral lit;
        lit.positive = node.positive;
        lit.prop.predicate = node.pred;
        for (const auto &term : node.args) {
            if (term.is_var) {
                auto it = binding.find(term.var);
                if (it == binding.end())
                    throw Error(ErrorCode::binding_error,
                                "unbound goal variable ?" + term.var);
                lit.prop.args.push_back(it->second);
            } else {
                auto obj = universe.resolve(term.obj);
                if (!obj)
                    throw Error(ErrorCode::unknown_object,
                                term.obj.str() + " in goal literal " + node.pred);
                lit.prop.args.push_back(*obj);
            }
        }
        return lit;
    }

    std::vector<LiteralSet> expand(const GoalPtr &node, Binding &binding) {
        switch (node->kind) {
        case GKind::lit:
            return {{resolve(*node, binding)}};
        case GKind::and_: {
            std::vector<LiteralSet> acc = {{}};
            for (const auto &child : node->children)
                acc = cross(acc, expand(child, binding));
            return acc;
        }
        case GKind::or_: {
            std::vector<LiteralSet> acc;
            for (const auto &child : node->children)
                acc = concat(std::move(acc), expand(child, binding));
            return acc;
        }
        case GKind::forall: {
            auto objs = objects_of_type(universe, node->type);
            if (objs.empty() && warnings)
                warnings->push_back("forall over empty category '" + node->type +
                                    "' is vacuously true");
            std::vector<LiteralSet> acc = {{}};
            for (const auto &obj : objs) {
                binding[node->var] = obj;
                acc = cross(acc, expand(node->children[0], binding));
                binding.erase(node->var);
            }
            return acc;
        }
        case GKind::exists: {
            auto objs = objects_of_type(universe, node->type);
            if (objs.empty() && warnings)
                warnings->push_back("exists over empty category '" + node->type +
                                    "' is unsatisfiable");
            std::vector<LiteralSet> acc;
            for (const auto &obj : objs) {
                binding[node->var] = obj;
                acc = concat(std::move(acc), expand(node->children[0], binding));
                binding.erase(node->var);
            }
            return acc;
        }
        case GKind::forn: {
            if (node->count < 0)
                throw Error(ErrorCode::validation_error,
                            "forn count must be non-negative");
            auto objs = objects_of_type(universe, node->type);
            int m = static_cast<int>(objs.size());
            if (node->count > m) {
                if (warnings)
                    warnings->push_back("forn(" + std::to_string(node->count) +
                                        ") over only " + std::to_string(m) + " '" +
                                        node->type + "' objects is unsatisfiable");
                return {};
            }
            std::vector<LiteralSet> acc;
            std::vector<int> pick(node->count);
            // all k-subsets in lexicographic index order
            std::function<void(int, int)> rec = [&](int start, int depth) {
                if (overflow) return;
                if (depth == node->count) {
                    std::vector<LiteralSet> sub = {{}};
                    for (int idx : pick) {
                        binding[node->var] = objs[idx];
                        sub = cross(sub, expand(node->children[0], binding));
                        binding.erase(node->var);
                    }
                    acc = concat(std::move(acc), sub);
                    return;
                }
                for (int i = start; i < m; ++i) {
                    pick[depth] = i;
                    rec(i + 1, depth + 1);
                }
            };
            rec(0, 0);
            return acc;
        }
        case GKind::forpairs: {
            auto a = objects_of_type(universe, node->type);
            auto b = objects_of_type(universe, node->type2);
            bool swapped = a.size() > b.size();
            const auto &small = swapped ? b : a;
            const auto &large = swapped ? a : b;
            if (small.empty() && warnings)
                warnings->push_back("forpairs over empty category is vacuous");
            std::vector<LiteralSet> acc;
            std::vector<bool> used(large.size(), false);
            std::vector<int> assign(small.size(), -1);
            std::function<void(size_t)> rec = [&](size_t i) {
                if (overflow) return;
                if (i == small.size()) {
                    std::vector<LiteralSet> sub = {{}};
                    for (size_t j = 0; j < small.size(); ++j) {
                        binding[swapped ? node->var2 : node->var] = small[j];
                        binding[swapped ? node->var : node->var2] =
                            large[assign[j]];
                        sub = cross(sub, expand(node->children[0], binding));
                    }
                    binding.erase(node->var);
                    binding.erase(node->var2);
                    acc = concat(std::move(acc), sub);
                    return;
                }
                for (size_t j = 0; j < large.size(); ++j) {
                    if (used[j]) continue;
                    used[j] = true;
                    assign[i] = static_cast<int>(j);
                    rec(i + 1);
                    used[j] = false;
                }
            };
            rec(0);
            return acc;
        }
        }
        throw Error(ErrorCode::internal_error, "unhandled goal node");
    }
};

} // namespace

OptionSet expand_options(const GoalSpec &spec, const Universe &universe, int cap) {
    if (cap < 1)
        throw Error(ErrorCode::validation_error, "option cap must be at least 1");
    OptionSet out;
    if (!spec.condition) {
        out.options.push_back({});
        return out;
    }
    Expander ex{universe, static_cast<size_t>(cap), false, &out.warnings};
    Binding binding;
    auto sets = ex.expand(spec.condition, binding);
    out.overflow = ex.overflow;
    for (auto &s : sets) out.options.push_back(GoalOption{std::move(s)});
    std::sort(out.options.begin(), out.options.end(),
              [](const GoalOption &a, const GoalOption &b) {
                  return a.canonical() < b.canonical();
              });
    out.options.erase(std::unique(out.options.begin(), out.options.end(),
                                  [](const GoalOption &a, const GoalOption &b) {
                                      return a.literals == b.literals;
                                  }),
                      out.options.end());
    if (out.options.size() > static_cast<size_t>(cap)) {
        out.options.resize(cap);
        out.overflow = true;
    }
    return out;
}

// ------------------------------------------------------------- direct eval

namespace {

bool literal_holds(const WorldState &state, const Proposition &prop, bool positive) {
    bool truth = state.satisfies(prop);
    if (!truth && prop.args.size() == 1)
        truth = state.universe()
                    .implicit_unary_truth(prop.predicate, prop.args[0])
                    .value_or(false);
    return truth == positive;
}

bool eval_goal_rec(const GoalPtr &node, const WorldState &state, Binding &binding);

// Perfect matching of the smaller category into the larger one, where a pair
// is admissible when the body holds under it.
bool forpairs_holds(const GoalNode &node, const WorldState &state,
                    Binding &binding) {
    auto a = objects_of_type(state.universe(), node.type);
    auto b = objects_of_type(state.universe(), node.type2);
    bool swapped = a.size() > b.size();
    const auto &small = swapped ? b : a;
    const auto &large = swapped ? a : b;
    std::vector<std::vector<int>> adj(small.size());
    for (size_t i = 0; i < small.size(); ++i) {
        for (size_t j = 0; j < large.size(); ++j) {
            binding[swapped ? node.var2 : node.var] = small[i];
            binding[swapped ? node.var : node.var2] = large[j];
            if (eval_goal_rec(node.children[0], state, binding))
                adj[i].push_back(static_cast<int>(j));
        }
    }
    binding.erase(node.var);
    binding.erase(node.var2);
    std::vector<int> match(large.size(), -1);
    std::function<bool(size_t, std::vector<bool> &)> augment =
        [&](size_t i, std::vector<bool> &seen) {
            for (int j : adj[i]) {
                if (seen[j]) continue;
                seen[j] = true;
                if (match[j] < 0 || augment(match[j], seen)) {
                    match[j] = static_cast<int>(i);
                    return true;
                }
            }
            return false;
        };
    for (size_t i = 0; i < small.size(); ++i) {
        std::vector<bool> seen(large.size(), false);
        if (!augment(i, seen)) return false;
    }
    return true;
}

bool eval_goal_rec(const GoalPtr &node, const WorldState &state, Binding &binding) {
    switch (node->kind) {
    case GKind::lit: {
        Proposition prop;
        prop.predicate = node->pred;
        for (const auto &term : node->args) {
            if (term.is_var) {
                auto it = binding.find(term.var);
                if (it == binding.end())
                    throw Error(ErrorCode::binding_error,
                                "unbound goal variable ?" + term.var);
                prop.args.push_back(it->second);
            } else {
                auto obj = state.universe().resolve(term.obj);
                if (!obj) return !node->positive;
                prop.args.push_back(*obj);
            }
        }
        return literal_holds(state, prop, node->positive);
    }
    case GKind::and_:
        for (const auto &c : node->children)
            if (!eval_goal_rec(c, state, binding)) return false;
        return true;
    case GKind::or_:
        for (const auto &c : node->children)
            if (eval_goal_rec(c, state, binding)) return true;
        return false;
    case GKind::forall: {
        for (const auto &obj : objects_of_type(state.universe(), node->type)) {
            binding[node->var] = obj;
            bool ok = eval_goal_rec(node->children[0], state, binding);
            binding.erase(node->var);
            if (!ok) return false;
        }
        return true;
    }
    case GKind::exists: {
        for (const auto &obj : objects_of_type(state.universe(), node->type)) {
            binding[node->var] = obj;
            bool ok = eval_goal_rec(node->children[0], state, binding);
            binding.erase(node->var);
            if (ok) return true;
        }
        return false;
    }
    case GKind::forn: {
        int hits = 0;
        for (const auto &obj : objects_of_type(state.universe(), node->type)) {
            binding[node->var] = obj;
            bool ok = eval_goal_rec(node->children[0], state, binding);
            binding.erase(node->var);
            if (ok && ++hits >= node->count) return true;
        }
        return node->count <= 0;
    }
    case GKind::forpairs:
        return forpairs_holds(*node, state, binding);
    }
    throw Error(ErrorCode::internal_error, "unhandled goal node");
}

} // namespace

bool eval_goal(const GoalPtr &node, const WorldState &state) {
    if (!node) return true;
    Binding binding;
    return eval_goal_rec(node, state, binding);
}

bool goal_literal_holds(const WorldState &state, const GoalLiteral &lit) {
    return literal_holds(state, lit.prop, lit.positive);
}

// ------------------------------------------------------------------ scoring

namespace {

// Greedy in-order matching of action goals against the executed sequence.
std::vector<bool> match_action_goals(const std::vector<ActionGoal> &goals,
                                     const std::vector<ActionRef> &executed) {
    std::vector<bool> matched(goals.size(), false);
    size_t cursor = 0;
    for (size_t i = 0; i < goals.size(); ++i) {
        while (cursor < executed.size() && !goals[i].matches(executed[cursor]))
            ++cursor;
        if (cursor < executed.size()) {
            matched[i] = true;
            ++cursor;
        }
    }
    return matched;
}

struct OptionScore {
    double score = 0.0;
    int satisfied = 0;
    bool actions_matched = true;
};

OptionScore score_option(const GoalOption &option,
                         const std::vector<ActionGoal> &actions,
                         const WorldState &final_state,
                         const std::vector<ActionRef> &executed) {
    OptionScore s;
    for (const auto &lit : option.literals)
        if (literal_holds(final_state, lit.prop, lit.positive)) ++s.satisfied;
    int units = static_cast<int>(option.literals.size());
    int credit = s.satisfied;
    if (!actions.empty()) {
        auto matched = match_action_goals(actions, executed);
        s.actions_matched =
            std::all_of(matched.begin(), matched.end(), [](bool b) { return b; });
        units += 1;
        credit += s.actions_matched ? 1 : 0;
    }
    s.score = units == 0 ? 1.0 : static_cast<double>(credit) / units;
    return s;
}

// Top-level subgoal units for the direct (past-the-cap) path: the flattened
// children of a top-level conjunction.
std::vector<GoalPtr> top_units(const GoalPtr &node) {
    if (!node) return {};
    if (node->kind != GKind::and_) return {node};
    std::vector<GoalPtr> out;
    for (const auto &c : node->children) {
        auto sub = top_units(c);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

} // namespace

SatisfactionResult check_satisfaction(const GoalSpec &spec,
                                      const Trajectory &trajectory, int cap) {
    if (trajectory.states.empty())
        throw Error(ErrorCode::validation_error, "empty trajectory");
    const WorldState &final_state = trajectory.states.back();
    const auto &executed = trajectory.actions;

    SatisfactionResult result;
    OptionSet options = expand_options(spec, final_state.universe(), cap);
    result.breakdown.vacuous_quantifier = !options.warnings.empty();

    if (options.overflow) {
        // Too many options to enumerate: evaluate the quantified goal
        // directly, one top-level conjunct per subgoal unit.
        result.breakdown.overflowed = true;
        auto units = top_units(spec.condition);
        int satisfied = 0;
        for (const auto &unit : units)
            if (eval_goal(unit, final_state)) ++satisfied;
        int total = static_cast<int>(units.size());
        int credit = satisfied;
        bool actions_ok = true;
        if (!spec.actions.empty()) {
            auto matched = match_action_goals(spec.actions, executed);
            actions_ok = std::all_of(matched.begin(), matched.end(),
                                     [](bool b) { return b; });
            for (size_t i = 0; i < spec.actions.size(); ++i)
                result.breakdown.actions.emplace_back(spec.actions[i].str(),
                                                      matched[i]);
            total += 1;
            credit += actions_ok ? 1 : 0;
        }
        result.breakdown.action_sequence_matched = actions_ok;
        result.partial = total == 0 ? 1.0 : static_cast<double>(credit) / total;
        result.satisfied = result.partial == 1.0;
        return result;
    }

    if (options.options.empty()) {
        // Unsatisfiable quantifier (e.g. exists over an empty category).
        result.partial = 0.0;
        result.satisfied = false;
        return result;
    }

    int best = 0;
    OptionScore best_score;
    for (size_t i = 0; i < options.options.size(); ++i) {
        OptionScore s =
            score_option(options.options[i], spec.actions, final_state, executed);
        if (i == 0 || s.score > best_score.score) {
            best = static_cast<int>(i);
            best_score = s;
        }
    }
    const GoalOption &option = options.options[best];
    result.partial = best_score.score;
    result.satisfied = best_score.score == 1.0;
    result.breakdown.option_index = best;
    for (const auto &lit : option.literals)
        result.breakdown.literals.push_back(
            {lit, literal_holds(final_state, lit.prop, lit.positive)});
    if (!spec.actions.empty()) {
        auto matched = match_action_goals(spec.actions, executed);
        for (size_t i = 0; i < spec.actions.size(); ++i)
            result.breakdown.actions.emplace_back(spec.actions[i].str(), matched[i]);
        result.breakdown.action_sequence_matched = best_score.actions_matched;
    }
    return result;
}

double partial_success(const GoalSpec &spec, const Trajectory &trajectory, int cap) {
    return check_satisfaction(spec, trajectory, cap).partial;
}

std::vector<std::string> GoalBreakdown::unsatisfied_node_goals() const {
    std::vector<std::string> out;
    for (const auto &r : literals)
        if (!r.satisfied && r.literal.category() == "state")
            out.push_back(r.literal.str());
    return out;
}

std::vector<std::string> GoalBreakdown::unsatisfied_edge_goals() const {
    std::vector<std::string> out;
    for (const auto &r : literals)
        if (!r.satisfied && r.literal.category() == "relation")
            out.push_back(r.literal.str());
    return out;
}

std::vector<std::string> GoalBreakdown::unsatisfied_action_goals() const {
    std::vector<std::string> out;
    for (const auto &[text, matched] : actions)
        if (!matched) out.push_back(text);
    return out;
}

// ------------------------------------------------------------------ F1

namespace {

struct CategorySets {
    std::vector<std::string> state, relation;
    bool has_actions = false;
};

CategorySets literal_sets(const std::vector<GoalLiteral> &literals) {
    CategorySets out;
    for (const auto &lit : literals) {
        if (lit.category() == "state")
            out.state.push_back(lit.str());
        else
            out.relation.push_back(lit.str());
    }
    std::sort(out.state.begin(), out.state.end());
    out.state.erase(std::unique(out.state.begin(), out.state.end()),
                    out.state.end());
    std::sort(out.relation.begin(), out.relation.end());
    out.relation.erase(std::unique(out.relation.begin(), out.relation.end()),
                       out.relation.end());
    return out;
}

void fill_rates(CategoryScore *score) {
    int tp = score->tp, fp = score->fp, fn = score->fn;
    score->present = tp + fp + fn > 0;
    score->precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    score->recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
    score->f1 = 2 * tp + fp + fn == 0
                    ? 1.0
                    : 2.0 * tp / (2.0 * tp + fp + fn);
}

CategoryScore set_score(const std::vector<std::string> &predicted,
                        const std::vector<std::string> &gt) {
    CategoryScore s;
    std::vector<std::string> inter;
    std::set_intersection(predicted.begin(), predicted.end(), gt.begin(), gt.end(),
                          std::back_inserter(inter));
    s.tp = static_cast<int>(inter.size());
    s.fp = static_cast<int>(predicted.size()) - s.tp;
    s.fn = static_cast<int>(gt.size()) - s.tp;
    fill_rates(&s);
    return s;
}

// The whole action sequence is a single set element; sequences match when
// they have the same length and each position agrees (alternation allowed on
// the ground-truth side).
bool action_sequences_match(const std::vector<ActionGoal> &predicted,
                            const std::vector<ActionGoal> &gt) {
    if (predicted.size() != gt.size()) return false;
    for (size_t i = 0; i < predicted.size(); ++i) {
        bool any = false;
        for (const auto &p : predicted[i].names)
            for (const auto &g : gt[i].names)
                if (p == g) any = true;
        if (!any) return false;
        if (!gt[i].args.empty() && gt[i].args != predicted[i].args) return false;
    }
    return true;
}

} // namespace

InterpretationScore interpret_f1(const PredictedGoals &predicted,
                                 const GoalSpec &gt, const Universe &universe,
                                 int cap) {
    InterpretationScore best;
    best.hallucinated = predicted.hallucinated;
    OptionSet options = expand_options(gt, universe, cap);
    CategorySets pred_sets = literal_sets(predicted.literals);

    bool first = true;
    for (size_t i = 0; i < options.options.size(); ++i) {
        InterpretationScore cand;
        cand.hallucinated = predicted.hallucinated;
        cand.best_option = static_cast<int>(i);
        CategorySets gt_sets = literal_sets(options.options[i].literals);
        cand.state = set_score(pred_sets.state, gt_sets.state);
        cand.relation = set_score(pred_sets.relation, gt_sets.relation);
        bool pred_has_actions = !predicted.actions.empty();
        bool gt_has_actions = !gt.actions.empty();
        if (pred_has_actions || gt_has_actions) {
            bool match = pred_has_actions && gt_has_actions &&
                         action_sequences_match(predicted.actions, gt.actions);
            cand.action.tp = match ? 1 : 0;
            cand.action.fp = pred_has_actions && !match ? 1 : 0;
            cand.action.fn = gt_has_actions && !match ? 1 : 0;
        }
        fill_rates(&cand.action);
        cand.overall.tp = cand.state.tp + cand.relation.tp + cand.action.tp;
        cand.overall.fp = cand.state.fp + cand.relation.fp + cand.action.fp;
        cand.overall.fn = cand.state.fn + cand.relation.fn + cand.action.fn;
        fill_rates(&cand.overall);
        if (first || cand.overall.f1 > best.overall.f1) {
            best = cand;
            first = false;
        }
    }
    if (first) {
        // no options at all: empty spec against the prediction
        best.state = set_score(pred_sets.state, {});
        best.relation = set_score(pred_sets.relation, {});
        if (!predicted.actions.empty()) best.action.fp = 1;
        fill_rates(&best.action);
        best.overall.tp = 0;
        best.overall.fp = best.state.fp + best.relation.fp + best.action.fp;
        best.overall.fn = 0;
        fill_rates(&best.overall);
    }
    return best;
}

// ------------------------------------------------------------------ parsing

namespace {

// Strips WordNet-style synset suffixes: "jar.n.01" -> "jar".
std::string strip_synset(const std::string &name) {
    size_t last = name.rfind('.');
    if (last == std::string::npos) return name;
    size_t prev = name.rfind('.', last - 1);
    if (prev == std::string::npos) return name;
    std::string pos = name.substr(prev + 1, last - prev - 1);
    std::string sense = name.substr(last + 1);
    if (pos.size() == 1 && std::isalpha(static_cast<unsigned char>(pos[0])) &&
        !sense.empty() &&
        std::all_of(sense.begin(), sense.end(),
                    [](unsigned char c) { return std::isdigit(c); }))
        return name.substr(0, prev);
    return name;
}

Term goal_term(const std::string &raw) {
    if (!raw.empty() && raw[0] == '?')
        return Term::make_var(strip_synset(raw.substr(1)));
    return Term::make_obj(ObjectRef::parse(strip_synset(raw)));
}

// "(?v - type)" or "(?v)"; the type defaults to the variable name.
std::pair<std::string, std::string> parse_goal_var(const Sexp &form) {
    if (form.is_atom) {
        std::string v = strip_synset(
            form.atom.rfind('?', 0) == 0 ? form.atom.substr(1) : form.atom);
        return {v, v};
    }
    std::string var, type;
    for (size_t i = 0; i < form.items.size(); ++i) {
        const std::string &a = form.at(i).atom;
        if (a == "-") {
            type = strip_synset(form.at(++i).atom);
        } else if (var.empty()) {
            var = strip_synset(a.rfind('?', 0) == 0 ? a.substr(1) : a);
        }
    }
    if (type.empty()) type = var;
    return {var, type};
}

GoalPtr parse_goal_form(const Sexp &form) {
    if (form.is_atom)
        throw Error(ErrorCode::parse_error,
                    "expected a goal form near byte " + std::to_string(form.offset));
    if (form.items.empty()) return GoalNode::conj({});
    const std::string &head = form.head();
    if (head == "and" || head == "or") {
        std::vector<GoalPtr> children;
        for (size_t i = 1; i < form.items.size(); ++i)
            children.push_back(parse_goal_form(form.at(i)));
        return head == "and" ? GoalNode::conj(std::move(children))
                             : GoalNode::disj(std::move(children));
    }
    if (head == "not") return GoalNode::negate(parse_goal_form(form.at(1)));
    if (head == "forall" || head == "exists") {
        auto [var, type] = parse_goal_var(form.at(1));
        GoalPtr body = parse_goal_form(form.at(2));
        return head == "forall" ? GoalNode::forall(var, type, body)
                                : GoalNode::exists(var, type, body);
    }
    if (head == "forn") {
        // (forn 2 (?v - t) body) or (forn (2) (?v - t) body)
        const Sexp &count_form = form.at(1);
        const std::string &count_text =
            count_form.is_atom ? count_form.atom : count_form.at(0).atom;
        int count = 0;
        try {
            count = std::stoi(count_text);
        } catch (const std::exception &) {
            throw Error(ErrorCode::parse_error,
                        "forn needs a count, got '" + count_text + "'");
        }
        auto [var, type] = parse_goal_var(form.at(2));
        return GoalNode::forn(count, var, type, parse_goal_form(form.at(3)));
    }
    if (head == "forpairs") {
        // (forpairs (?a - ta) (?b - tb) body) or (forpairs (?a ?b) body)
        if (form.items.size() == 3 && !form.at(1).is_atom &&
            form.at(1).items.size() == 2 && form.at(1).at(0).is_atom &&
            form.at(1).at(1).is_atom) {
            auto [v1, t1] = parse_goal_var(form.at(1).at(0));
            auto [v2, t2] = parse_goal_var(form.at(1).at(1));
            return GoalNode::forpairs(v1, t1, v2, t2, parse_goal_form(form.at(2)));
        }
        auto [v1, t1] = parse_goal_var(form.at(1));
        auto [v2, t2] = parse_goal_var(form.at(2));
        return GoalNode::forpairs(v1, t1, v2, t2, parse_goal_form(form.at(3)));
    }
    // plain literal
    std::vector<Term> args;
    for (size_t i = 1; i < form.items.size(); ++i)
        args.push_back(goal_term(form.at(i).atom));
    return GoalNode::lit(strip_synset(head), std::move(args));
}

} // namespace

GoalSpec parse_goal_sexpr(const std::string &text) {
    SexpReader reader(text);
    Sexp top = reader.read();
    // unwrap an optional (:goal ...) shell
    if (!top.is_atom && !top.items.empty() && top.items[0].is_atom &&
        top.items[0].atom == ":goal")
        top = top.at(1);
    GoalSpec spec;
    spec.condition = parse_goal_form(top);
    return spec;
}

GoalSpec goal_spec_from_ltl(const ltl::Formula &formula, const Vocabulary &vocab) {
    using ltl::FKind;
    std::vector<const ltl::Formula *> segments;
    if (formula.kind == FKind::then) {
        for (const auto &child : formula.children) segments.push_back(child.get());
    } else {
        segments.push_back(&formula);
    }

    auto is_action_name = [&](const std::string &name) {
        // names that are both (household "open") read as state predicates
        if (vocab.predicates.count(name)) return false;
        std::string upper = name;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        return vocab.actions.count(upper) > 0;
    };

    auto atom_to_action = [&](const ltl::Formula &f) -> std::optional<ActionGoal> {
        if (f.kind != FKind::atom || !is_action_name(f.name)) return std::nullopt;
        ActionGoal goal;
        goal.names = {f.name};
        for (const auto &arg : f.args) {
            if (arg.is_var) return std::nullopt; // quantified action: not foldable
            goal.args.push_back(arg.obj);
        }
        return goal;
    };

    // a single action atom, or an alternation of action atoms on the same
    // arguments ("lookat(tv) or watch(tv)")
    auto segment_to_action = [&](const ltl::Formula &f) -> std::optional<ActionGoal> {
        if (auto single = atom_to_action(f)) return single;
        if (f.kind != FKind::or_ || f.children.empty()) return std::nullopt;
        ActionGoal merged;
        for (const auto &child : f.children) {
            auto alt = atom_to_action(*child);
            if (!alt) return std::nullopt;
            if (!merged.names.empty() && alt->args != merged.args)
                return std::nullopt;
            merged.names.push_back(alt->names[0]);
            merged.args = alt->args;
        }
        return merged;
    };

    std::function<GoalPtr(const ltl::Formula &)> to_goal =
        [&](const ltl::Formula &f) -> GoalPtr {
        switch (f.kind) {
        case FKind::atom: {
            if (is_action_name(f.name))
                throw Error(ErrorCode::validation_error,
                            "action atom '" + f.name +
                                "' inside the final-state goal");
            std::vector<Term> args;
            for (const auto &a : f.args)
                args.push_back(a.is_var ? Term::make_var(a.var)
                                        : Term::make_obj(a.obj));
            return GoalNode::lit(f.name, std::move(args));
        }
        case FKind::not_:
            return GoalNode::negate(to_goal(*f.children[0]));
        case FKind::and_: {
            std::vector<GoalPtr> cs;
            for (const auto &c : f.children) cs.push_back(to_goal(*c));
            return GoalNode::conj(std::move(cs));
        }
        case FKind::or_: {
            std::vector<GoalPtr> cs;
            for (const auto &c : f.children) cs.push_back(to_goal(*c));
            return GoalNode::disj(std::move(cs));
        }
        case FKind::implies:
            return GoalNode::disj(
                {GoalNode::negate(to_goal(*f.children[0])), to_goal(*f.children[1])});
        case FKind::forall:
            return GoalNode::forall(f.var, f.var, to_goal(*f.children[0]));
        case FKind::exists:
            return GoalNode::exists(f.var, f.var, to_goal(*f.children[0]));
        case FKind::forn:
            return GoalNode::forn(f.count, f.var, f.var, to_goal(*f.children[0]));
        case FKind::then:
            throw Error(ErrorCode::validation_error,
                        "nested 'then' cannot fold into a final-state goal");
        }
        throw Error(ErrorCode::internal_error, "unhandled formula node");
    };

    GoalSpec spec;
    for (size_t i = 0; i < segments.size(); ++i) {
        const ltl::Formula &seg = *segments[i];
        bool last = i + 1 == segments.size();
        if (auto action = segment_to_action(seg)) {
            spec.actions.push_back(std::move(*action));
            continue;
        }
        // only the final segment may carry the state condition
        if (!last)
            throw Error(ErrorCode::validation_error,
                        "goal segment " + std::to_string(i + 1) +
                            " is not an action atom");
        spec.condition = to_goal(seg);
    }
    return spec;
}

} // namespace embeval

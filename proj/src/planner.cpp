#include "planner.h"

#include <queue>
#include <set>
#include <tuple>

#include "errors.h"

namespace embeval {

namespace {

void collect_lit_arities(const CondPtr &cond,
                         std::map<std::string, int> *arities) {
    if (!cond) return;
    if (cond->kind == CKind::lit) {
        arities->emplace(cond->pred, static_cast<int>(cond->args.size()));
        return;
    }
    for (const auto &child : cond->children) collect_lit_arities(child, arities);
}

std::string visible_str(const OperatorSchema &schema, const GroundAction &action) {
    if (!schema.implicit_agent) return action.str();
    GroundAction visible = action;
    if (!visible.args.empty()) visible.args.erase(visible.args.begin());
    return visible.str();
}

std::vector<GroundAction> enumerate_candidates(const Domain &domain,
                                               const Universe &universe) {
    std::vector<GroundAction> out;
    for (const auto &schema : domain.schemas()) {
        std::vector<std::vector<ObjectRef>> pools;
        pools.reserve(schema.params.size());
        bool empty_pool = false;
        for (const auto &param : schema.params) {
            pools.push_back(objects_of_type(universe, param.type));
            if (pools.back().empty()) empty_pool = true;
        }
        if (empty_pool) continue;
        std::vector<size_t> cursor(pools.size(), 0);
        while (true) {
            GroundAction action;
            action.name = schema.name;
            for (size_t p = 0; p < pools.size(); ++p)
                action.args.push_back(pools[p][cursor[p]]);
            out.push_back(std::move(action));
            bool advanced = false;
            for (size_t p = pools.size(); p-- > 0;) {
                if (++cursor[p] < pools[p].size()) {
                    advanced = true;
                    break;
                }
                cursor[p] = 0;
            }
            if (!advanced) break;
        }
    }
    return out;
}

} // namespace

const char *plan_status_name(PlanStatus status) {
    switch (status) {
    case PlanStatus::found: return "found";
    case PlanStatus::unreachable: return "unreachable";
    case PlanStatus::budget_exhausted: return "budget_exhausted";
    }
    return "unknown";
}

std::vector<GoalLiteral> goal_literals(const PlanningProblem &problem) {
    std::vector<CondPtr> conjuncts;
    if (problem.goal) {
        if (problem.goal->kind == CKind::and_)
            conjuncts = problem.goal->children;
        else
            conjuncts = {problem.goal};
    }
    std::vector<GoalLiteral> out;
    for (const auto &conjunct : conjuncts) {
        if (!conjunct || conjunct->kind != CKind::lit)
            throw Error(ErrorCode::validation_error,
                        "planning goal must be a conjunction of literals");
        GoalLiteral lit;
        lit.positive = conjunct->positive;
        lit.prop.predicate = conjunct->pred;
        for (const auto &term : conjunct->args) {
            if (term.is_var)
                throw Error(ErrorCode::validation_error,
                            "planning goal literal is not ground: " +
                                conjunct->pred);
            lit.prop.args.push_back(term.obj);
        }
        out.push_back(std::move(lit));
    }
    return out;
}

PlanResult plan(const Domain &domain, const PlanningProblem &problem,
                int node_budget) {
    if (node_budget < 1)
        throw Error(ErrorCode::validation_error, "node budget must be positive");
    const std::vector<GoalLiteral> goals = goal_literals(problem);
    const Universe &universe = problem.init.universe();

    auto satisfied_count = [&](const WorldState &state) {
        int satisfied = 0;
        for (const auto &lit : goals)
            if (goal_literal_holds(state, lit)) ++satisfied;
        return satisfied;
    };
    const int goal_total = static_cast<int>(goals.size());

    PlanResult result;
    struct Node {
        WorldState state;
        int parent = -1;
        int action = -1; // index into candidates
        int depth = 0;
    };
    std::vector<Node> nodes;
    nodes.push_back({problem.init, -1, -1, 0});
    result.generated = 1;

    auto reconstruct = [&](int index) {
        std::vector<int> chain;
        for (int at = index; nodes[at].parent >= 0; at = nodes[at].parent)
            chain.push_back(nodes[at].action);
        std::reverse(chain.begin(), chain.end());
        return chain;
    };

    const std::vector<GroundAction> candidates =
        enumerate_candidates(domain, universe);

    auto finish = [&](int index, const std::vector<GroundAction> &pool) {
        result.status = PlanStatus::found;
        for (int action_index : reconstruct(index)) {
            const GroundAction &action = pool[action_index];
            result.actions.push_back(action);
            const OperatorSchema *schema = domain.find(action.name);
            result.steps.push_back(schema ? visible_str(*schema, action)
                                          : action.str());
        }
        return result;
    };

    if (satisfied_count(problem.init) == goal_total)
        return finish(0, candidates);

    std::set<std::string> closed;
    closed.insert(problem.init.canonical());

    // (cost, unsatisfied goal count, insertion sequence, node index)
    using Entry = std::tuple<int, int, long long, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> frontier;
    long long sequence = 0;
    frontier.push({0, goal_total - satisfied_count(problem.init), sequence++, 0});

    while (!frontier.empty()) {
        const int index = std::get<3>(frontier.top());
        frontier.pop();
        ++result.expanded;
        for (size_t c = 0; c < candidates.size(); ++c) {
            const GroundAction &action = candidates[c];
            if (!domain.applicable(nodes[index].state, action)) continue;
            WorldState next = domain.apply(nodes[index].state, action);
            if (!closed.insert(next.canonical()).second) continue;
            if (result.generated >= node_budget) {
                result.status = PlanStatus::budget_exhausted;
                return result;
            }
            ++result.generated;
            nodes.push_back({std::move(next), index, static_cast<int>(c),
                             nodes[index].depth + 1});
            const int child = static_cast<int>(nodes.size()) - 1;
            const int satisfied = satisfied_count(nodes[child].state);
            if (satisfied == goal_total) return finish(child, candidates);
            frontier.push({nodes[child].depth, goal_total - satisfied,
                           sequence++, child});
        }
    }
    result.status = PlanStatus::unreachable;
    return result;
}

Domain with_operator(const Domain &base, const OperatorSchema &replacement) {
    Domain out;
    out.set_name(base.name());
    std::map<std::string, int> arities(base.predicates().begin(),
                                       base.predicates().end());
    collect_lit_arities(replacement.precondition, &arities);
    collect_lit_arities(replacement.effect, &arities);
    for (const auto &[pred, arity] : arities) out.add_predicate(pred, arity);
    for (const auto &tag : base.property_tags()) out.add_property_tag(tag);
    bool replaced = false;
    for (const auto &schema : base.schemas()) {
        if (schema.name == replacement.name) {
            out.add_schema(replacement);
            replaced = true;
        } else {
            out.add_schema(schema);
        }
    }
    if (!replaced) out.add_schema(replacement);
    for (const auto &action : base.unsupported_actions())
        out.add_unsupported(action);
    if (base.auto_navigation()) out.set_auto_navigation(base.nav_schema());
    out.finalize();
    return out;
}

} // namespace embeval

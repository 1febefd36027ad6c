#include "subgoal.h"

#include <algorithm>
#include <deque>

namespace embeval {

// ---------------------------------------------------------------- SubgoalPlan

SubgoalPlan SubgoalPlan::from_text(const std::string &text) {
    SubgoalPlan plan;
    plan.source = text;
    ltl::FormulaPtr f = ltl::parse(text);
    ltl::validate(f);
    if (f->kind == ltl::FKind::then) {
        for (const auto &child : f->children) {
            if (child->contains_then)
                throw Error(ErrorCode::validation_error,
                            "nested 'then' inside a subgoal segment");
            plan.segments.push_back(child);
        }
    } else {
        plan.segments.push_back(f);
    }
    return plan;
}

SubgoalPlan SubgoalPlan::from_segments(const std::vector<std::string> &texts) {
    SubgoalPlan plan;
    for (const auto &text : texts) {
        ltl::FormulaPtr f = ltl::parse(text);
        ltl::validate(f);
        if (f->contains_then)
            throw Error(ErrorCode::validation_error,
                        "'then' inside a subgoal segment list entry");
        plan.segments.push_back(f);
        if (!plan.source.empty()) plan.source += " then ";
        plan.source += ltl::render(f);
    }
    return plan;
}

ltl::FormulaPtr SubgoalPlan::formula() const {
    if (segments.empty())
        throw Error(ErrorCode::validation_error, "empty subgoal plan");
    if (segments.size() == 1) return segments[0];
    return ltl::Formula::then(segments);
}

// ------------------------------------------------------------------- search

namespace {

struct Candidate {
    size_t schema_index;
    GroundAction full;    // as applied to states
    ActionRef visible;    // as recorded on trajectories
};

ActionRef visible_of(const OperatorSchema &schema, const GroundAction &full) {
    ActionRef v;
    v.name = schema.name;
    v.args.assign(full.args.begin() + (schema.implicit_agent ? 1 : 0),
                  full.args.end());
    return v;
}

bool asserts_open(const CondPtr &cond) {
    if (!cond) return false;
    if (cond->kind == CKind::lit)
        return cond->positive && cond->pred == "open";
    for (const auto &child : cond->children)
        if (asserts_open(child)) return true;
    return false;
}

void formula_objects(const ltl::FormulaPtr &f, const Universe &universe,
                     std::set<ObjectRef> *out) {
    if (!f) return;
    if (f->kind == ltl::FKind::atom) {
        for (const auto &arg : f->args) {
            if (arg.is_var) continue;
            if (auto obj = universe.resolve(arg.obj)) out->insert(*obj);
        }
    }
    for (const auto &child : f->children) formula_objects(child, universe, out);
}

void goal_node_objects(const GoalPtr &node, const Universe &universe,
                       std::set<ObjectRef> *out) {
    if (!node) return;
    for (const auto &term : node->args) {
        if (term.is_var) continue;
        if (auto obj = universe.resolve(term.obj)) out->insert(*obj);
    }
    for (const auto &child : node->children)
        goal_node_objects(child, universe, out);
}

std::set<ObjectRef> held_objects(const WorldState &state) {
    std::set<ObjectRef> out;
    const auto agent = state.universe().agent();
    for (const auto &fact : state.facts()) {
        if (fact.predicate.rfind("hold", 0) != 0) continue;
        for (const auto &arg : fact.args)
            if (!agent || arg != *agent) out.insert(arg);
    }
    return out;
}

// Ground actions in expansion order: schema declaration index first, then the
// canonical rendering of the arguments.
std::vector<Candidate> ground_candidates(const Domain &domain,
                                         const Universe &universe,
                                         const std::set<ObjectRef> *relevant) {
    std::vector<Candidate> out;
    const auto &schemas = domain.schemas();
    for (size_t idx = 0; idx < schemas.size(); ++idx) {
        const OperatorSchema &schema = schemas[idx];
        bool opener = asserts_open(schema.effect);
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
            std::vector<ObjectRef> args;
            args.reserve(pools.size());
            for (size_t p = 0; p < pools.size(); ++p)
                args.push_back(pools[p][cursor[p]]);
            bool keep = true;
            if (relevant && !opener) {
                keep = false;
                for (const auto &arg : args)
                    if (relevant->count(arg)) keep = true;
            }
            if (keep) {
                Candidate cand;
                cand.schema_index = idx;
                cand.full = domain.make_ground(schema, args, universe);
                cand.visible = visible_of(schema, cand.full);
                out.push_back(std::move(cand));
            }
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
    std::stable_sort(out.begin(), out.end(),
                     [](const Candidate &a, const Candidate &b) {
                         if (a.schema_index != b.schema_index)
                             return a.schema_index < b.schema_index;
                         return a.visible.str() < b.visible.str();
                     });
    return out;
}

struct SearchNode {
    std::vector<WorldState> states; // [segment start .. here]
    std::vector<ActionRef> visible;
    std::vector<GroundAction> full;
};

struct SegmentSearch {
    std::vector<SearchNode> solutions; // all minimal-length, expansion order
    int visited = 0;
    std::string diagnostic;
};

constexpr size_t kMaxSolutions = 8;

std::vector<ltl::FormulaPtr> conjuncts_of(const ltl::FormulaPtr &f) {
    if (f->kind != ltl::FKind::and_) return {f};
    std::vector<ltl::FormulaPtr> out;
    for (const auto &c : f->children) {
        auto sub = conjuncts_of(c);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

Trajectory node_trajectory(const SearchNode &node) {
    Trajectory t;
    t.states = node.states;
    t.actions = node.visible;
    return t;
}

SegmentSearch bfs_segment(const ltl::FormulaPtr &segment, const WorldState &start,
                          const std::vector<Candidate> &candidates,
                          const Domain &domain, const Vocabulary &vocab,
                          int depth_cap) {
    SegmentSearch result;
    SearchNode root;
    root.states.push_back(start);

    std::deque<SearchNode> queue;
    queue.push_back(root);
    std::set<std::string> seen;
    seen.insert(start.canonical());
    result.visited = 1;

    auto parts = conjuncts_of(segment);
    int best_hits = -1;
    std::vector<std::string> best_missing;
    auto note_partial = [&](const SearchNode &node) {
        Trajectory t = node_trajectory(node);
        size_t step = node.states.size() - 1;
        int hits = 0;
        std::vector<std::string> missing;
        for (const auto &part : parts) {
            if (ltl::evaluate_at(part, t, step, vocab))
                ++hits;
            else
                missing.push_back(ltl::render(part));
        }
        if (hits > best_hits) {
            best_hits = hits;
            best_missing = std::move(missing);
        }
    };
    note_partial(root);

    int solution_depth = -1;
    while (!queue.empty()) {
        SearchNode node = std::move(queue.front());
        queue.pop_front();
        int depth = static_cast<int>(node.full.size());
        if (solution_depth >= 0 && depth >= solution_depth) break;
        if (depth == depth_cap) continue;
        for (const auto &cand : candidates) {
            const WorldState &here = node.states.back();
            if (!domain.applicable(here, cand.full)) continue;
            WorldState next = domain.apply(here, cand.full);
            SearchNode child = node;
            child.states.push_back(std::move(next));
            child.visible.push_back(cand.visible);
            child.full.push_back(cand.full);
            Trajectory t = node_trajectory(child);
            // satisfaction first: an effect-free action (watch, touch) leaves
            // the state unchanged, and deduplication would hide it from an
            // action-atom segment
            if (ltl::evaluate_at(segment, t, child.states.size() - 1, vocab)) {
                if (solution_depth < 0) solution_depth = depth + 1;
                if (depth + 1 == solution_depth &&
                    result.solutions.size() < kMaxSolutions)
                    result.solutions.push_back(std::move(child));
                continue;
            }
            std::string key = child.states.back().canonical();
            if (seen.count(key)) continue;
            seen.insert(key);
            ++result.visited;
            note_partial(child);
            queue.push_back(std::move(child));
        }
    }

    if (result.solutions.empty() && best_hits >= 0) {
        std::string missing;
        for (const auto &m : best_missing) {
            if (!missing.empty()) missing += ", ";
            missing += m;
        }
        result.diagnostic = "best reachable state satisfies " +
                            std::to_string(best_hits) + "/" +
                            std::to_string(parts.size()) +
                            " conjuncts; unsatisfied: " + missing;
    }
    return result;
}

std::set<ObjectRef> relevant_objects(const SubgoalPlan &plan, size_t from,
                                     const GoalSpec *goal,
                                     const WorldState &state) {
    std::set<ObjectRef> out;
    const Universe &u = state.universe();
    for (size_t i = from; i < plan.segments.size(); ++i)
        formula_objects(plan.segments[i], u, &out);
    if (goal) {
        goal_node_objects(goal->condition, u, &out);
        for (const auto &action : goal->actions)
            for (const auto &arg : action.args)
                if (auto obj = u.resolve(arg)) out.insert(*obj);
    }
    for (const auto &held : held_objects(state)) out.insert(held);
    return out;
}

struct LineOutcome {
    MappingResult mapping;
    WorldState final_state;
    // minimal solutions seen per reached segment along this line
    std::vector<int> solution_counts;
};

// Walks the segments once; at `override_segment` the override_choice-th
// minimal solution is taken instead of the first.
LineOutcome run_line(const SubgoalPlan &plan, const WorldState &initial,
                     const Domain &domain, int depth_cap, const GoalSpec *goal,
                     int override_segment, size_t override_choice) {
    LineOutcome line{MappingResult{}, initial, {}};
    const Vocabulary vocab = domain.vocabulary();
    WorldState current = initial;

    for (size_t i = 0; i < plan.segments.size(); ++i) {
        const auto &segment = plan.segments[i];
        SegmentResult record;

        Trajectory here;
        here.states.push_back(current);
        if (ltl::evaluate_at(segment, here, 0, vocab)) {
            record.outcome = SegmentOutcome::already_satisfied;
            record.visited = 1;
            line.mapping.segments.push_back(std::move(record));
            line.solution_counts.push_back(0);
            continue;
        }

        std::set<ObjectRef> relevant =
            relevant_objects(plan, i, goal, current);
        auto filtered =
            ground_candidates(domain, current.universe(), &relevant);
        SegmentSearch search = bfs_segment(segment, current, filtered, domain,
                                           vocab, depth_cap);
        if (search.solutions.empty()) {
            auto full = ground_candidates(domain, current.universe(), nullptr);
            SegmentSearch retry =
                bfs_segment(segment, current, full, domain, vocab, depth_cap);
            retry.visited += search.visited;
            search = std::move(retry);
        }
        record.visited = search.visited;
        if (search.solutions.empty()) {
            record.outcome = SegmentOutcome::unreachable;
            record.diagnostic = search.diagnostic;
            line.mapping.segments.push_back(std::move(record));
            line.mapping.complete = false;
            line.mapping.failed_segment = static_cast<int>(i);
            line.solution_counts.push_back(0);
            break;
        }
        size_t choice = 0;
        if (static_cast<int>(i) == override_segment &&
            override_choice < search.solutions.size())
            choice = override_choice;
        const SearchNode &chosen = search.solutions[choice];
        record.outcome = SegmentOutcome::reached;
        for (const auto &act : chosen.visible)
            record.actions.push_back(act.str());
        line.mapping.plan.insert(line.mapping.plan.end(),
                                 record.actions.begin(), record.actions.end());
        current = chosen.states.back();
        line.solution_counts.push_back(
            static_cast<int>(search.solutions.size()));
        line.mapping.segments.push_back(std::move(record));
    }
    line.final_state = current;
    return line;
}

} // namespace

MappingResult map_subgoals(const SubgoalPlan &plan, const WorldState &initial,
                           const Domain &domain, int depth_cap) {
    if (depth_cap < 1)
        throw Error(ErrorCode::validation_error, "depth cap must be at least 1");
    return run_line(plan, initial, domain, depth_cap, nullptr, -1, 0).mapping;
}

// ---------------------------------------------------------------- evaluation

namespace {

ErrorClass lint_error_class(const ltl::LintFinding &finding) {
    switch (finding.kind) {
    case ltl::LintFinding::Kind::hallucination:
        return finding.subject_kind == ltl::LintFinding::Subject::action
                   ? ErrorClass::hallucination_action
                   : ErrorClass::hallucination_object;
    case ltl::LintFinding::Kind::arity:
        return ErrorClass::arg_number;
    case ltl::LintFinding::Kind::forn_over_then:
        return ErrorClass::parsing;
    }
    return ErrorClass::parsing;
}

} // namespace

SubgoalEval evaluate_subgoal_plan(const SubgoalPlan &plan,
                                  const WorldState &initial, const GoalSpec &goal,
                                  const Domain &domain, int depth_cap,
                                  int option_cap) {
    if (depth_cap < 1)
        throw Error(ErrorCode::validation_error, "depth cap must be at least 1");
    SubgoalEval eval;
    const Vocabulary vocab = domain.vocabulary();

    if (!plan.empty()) {
        eval.lint = ltl::lint(plan.formula(), vocab, initial.universe());
        if (!eval.lint.empty()) {
            eval.error = lint_error_class(eval.lint.front());
            eval.error_message = eval.lint.front().message;
            eval.trace = execute(initial, {}, domain);
            eval.goal = check_satisfaction(goal, eval.trace.trajectory, option_cap);
            eval.task_success = eval.goal.satisfied;
            eval.partial = eval.goal.partial;
            return eval;
        }
    }

    LineOutcome mainline =
        run_line(plan, initial, domain, depth_cap, &goal, -1, 0);

    if (!mainline.mapping.complete) {
        eval.mapping = mainline.mapping;
        eval.trace = execute(initial, eval.mapping.plan, domain);
        if (!eval.trace.completed)
            throw Error(ErrorCode::internal_error,
                        "mapped subgoal prefix failed to replay");
        int failed = eval.mapping.failed_segment;
        const auto &segment = plan.segments[failed];
        bool seen_before = false;
        for (const auto &state : eval.trace.trajectory.states) {
            Trajectory single;
            single.states.push_back(state);
            if (ltl::evaluate_at(segment, single, 0, vocab)) {
                seen_before = true;
                break;
            }
        }
        eval.error =
            seen_before ? ErrorClass::wrong_order : ErrorClass::missing_step;
        eval.error_message =
            "subgoal " + std::to_string(failed + 1) + " unreachable within " +
            std::to_string(depth_cap) + " actions" +
            (eval.mapping.segments[failed].diagnostic.empty()
                 ? ""
                 : " (" + eval.mapping.segments[failed].diagnostic + ")");
        eval.goal = check_satisfaction(goal, eval.trace.trajectory, option_cap);
        eval.task_success = eval.goal.satisfied;
        eval.partial = eval.goal.partial;
        return eval;
    }

    // mainline plus one alternative line per extra minimal solution
    struct Scored {
        LineOutcome line;
        ExecutionTrace trace;
        SatisfactionResult goal;
    };
    auto score = [&](LineOutcome line) {
        Scored s{std::move(line), {}, {}};
        s.trace = execute(initial, s.line.mapping.plan, domain);
        if (!s.trace.completed || !s.line.mapping.complete)
            throw Error(ErrorCode::internal_error,
                        "mapped subgoal plan failed to replay");
        s.goal = check_satisfaction(goal, s.trace.trajectory, option_cap);
        return s;
    };

    Scored best = score(mainline);
    size_t tried = 1;
    for (size_t i = 0; i < best.line.solution_counts.size() && tried < 8; ++i) {
        for (int j = 1; j < best.line.solution_counts[i] &&
                        static_cast<int>(tried) < 8;
             ++j, ++tried) {
            LineOutcome alt = run_line(plan, initial, domain, depth_cap, &goal,
                                       static_cast<int>(i), j);
            if (!alt.mapping.complete) continue;
            Scored cand = score(std::move(alt));
            if (cand.goal.partial > best.goal.partial) best = std::move(cand);
        }
    }

    eval.mapping = best.line.mapping;
    eval.trace = best.trace;
    eval.goal = best.goal;
    eval.execution_success = true;
    eval.task_success = eval.goal.satisfied;
    eval.partial = eval.goal.partial;
    return eval;
}

} // namespace embeval

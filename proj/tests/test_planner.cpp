#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <set>

#include "errors.h"
#include "pddl.h"
#include "planner.h"

using namespace embeval;

namespace {

const char *kTvPredicates = R"((:predicates
    (next_to ?char ?obj) (obj_next_to ?a ?b)
    (has_plug ?obj) (has_switch ?obj)
    (plugged_in ?obj) (plugged_out ?obj)
    (on ?obj) (off ?obj)
    (sitting ?char) (lying ?char)
    (inside ?a ?b))
)";

const char *kGtPlugIn = R"((:action plug_in
  :parameters (?char - character ?obj - object)
  :precondition (or (and (next_to ?char ?obj) (has_plug ?obj)
                (plugged_out ?obj)) (and (next_to ?char ?obj)
                (has_switch ?obj) (plugged_out ?obj)))
  :effect (and (plugged_in ?obj) (not (plugged_out ?obj)))
)
)";

const char *kGtWalkTowards = R"((:action walk_towards
  :parameters (?char - character ?obj - object)
  :precondition (and (not (sitting ?char)) (not (lying ?char))
              (next_to ?char ?obj) (forall (?far_obj - object)
              (when (not (obj_next_to ?far_obj ?obj))
              (not (next_to ?char ?far_obj)))) (forall (?close_obj - object)
              (when (obj_next_to ?close_obj ?obj)
              (next_to ?char ?close_obj))))
  :effect (and (next_to ?char ?obj))
)
)";

const char *kGtSwitchOn = R"((:action switch_on
  :parameters (?char - character ?obj - object)
  :precondition (and (has_switch ?obj) (off ?obj)
              (plugged_in ?obj) (next_to ?char ?obj))
  :effect (and (on ?obj) (not (off ?obj)))
)
)";

const char *kPredPlugIn = R"((:action plug_in
  :parameters (?char - character ?obj - object)
  :precondition (and (has_plug ?obj) (plugged_out ?obj)
              (next_to ?char ?obj))
  :effect (and (plugged_in ?obj) (not (plugged_out ?obj)))
)
)";

const char *kPredWalkTowards = R"((:action walk_towards
  :parameters (?char - character ?obj - object)
  :precondition (and (inside ?char ?room) (inside ?obj ?room))
  :effect (next_to ?char ?obj)
)
)";

const char *kPredSwitchOn = R"((:action switch_on
  :parameters (?char - character ?obj - object)
  :precondition (and (has_switch ?obj) (off ?obj)
              (next_to ?char ?obj))
  :effect (and (on ?obj) (not (off ?obj)))
)
)";

std::string domain_text(const std::string &plug_in, const std::string &walk,
                        const std::string &switch_on) {
    return "(define (domain vh_tv)\n" + std::string(kTvPredicates) + plug_in +
           walk + switch_on + ")\n";
}

Domain gt_domain() {
    return load_domain(domain_text(kGtPlugIn, kGtWalkTowards, kGtSwitchOn));
}
Domain pred_domain() {
    return load_domain(domain_text(kPredPlugIn, kPredWalkTowards, kPredSwitchOn));
}
Domain mixed_domain() {
    return load_domain(domain_text(kPredPlugIn, kGtWalkTowards, kGtSwitchOn));
}

const char *kTvProblem = R"((define (problem tv)
  (:domain vh_tv)
  (:objects character.65 television.410)
  (:init (next_to character.65 television.410) (has_switch television.410)
         (plugged_out television.410) (off television.410))
  (:goal (and (on television.410))))
)";

PlanningProblem tv_problem(const Domain &domain) {
    return load_problem(kTvProblem, domain);
}

// Plain breadth-first reachability over the same candidate space, as an
// independent completeness reference.
bool bfs_solvable(const Domain &domain, const PlanningProblem &problem,
                  int max_depth) {
    auto goals = goal_literals(problem);
    auto holds_all = [&](const WorldState &state) {
        for (const auto &lit : goals)
            if (!goal_literal_holds(state, lit)) return false;
        return true;
    };
    std::vector<GroundAction> candidates;
    for (const auto &schema : domain.schemas()) {
        std::vector<std::vector<ObjectRef>> pools;
        for (const auto &param : schema.params)
            pools.push_back(objects_of_type(*problem.universe, param.type));
        std::vector<size_t> cursor(pools.size(), 0);
        bool empty = false;
        for (const auto &pool : pools) empty = empty || pool.empty();
        if (empty) continue;
        while (true) {
            GroundAction action;
            action.name = schema.name;
            for (size_t p = 0; p < pools.size(); ++p)
                action.args.push_back(pools[p][cursor[p]]);
            candidates.push_back(action);
            bool advanced = false;
            for (size_t p = pools.size(); p-- > 0;) {
                if (++cursor[p] < pools[p].size()) { advanced = true; break; }
                cursor[p] = 0;
            }
            if (!advanced) break;
        }
    }
    std::deque<std::pair<WorldState, int>> queue{{problem.init, 0}};
    std::set<std::string> seen{problem.init.canonical()};
    while (!queue.empty()) {
        auto [state, depth] = queue.front();
        queue.pop_front();
        if (holds_all(state)) return true;
        if (depth == max_depth) continue;
        for (const auto &action : candidates) {
            if (!domain.applicable(state, action)) continue;
            WorldState next = domain.apply(state, action);
            if (seen.insert(next.canonical()).second)
                queue.push_back({next, depth + 1});
        }
    }
    return false;
}

} // namespace

TEST_CASE("reference operators reach the powered-on goal in two steps") {
    Domain domain = gt_domain();
    PlanningProblem problem = tv_problem(domain);
    PlanResult result = plan(domain, problem);
    REQUIRE(result.status == PlanStatus::found);
    REQUIRE(result.steps.size() == 2);
    CHECK(result.steps[0] == "PLUG_IN(television.410)");
    CHECK(result.steps[1] == "SWITCH_ON(television.410)");

    // soundness: the plan replays and reaches every goal literal
    WorldState state = problem.init;
    for (const auto &action : result.actions) state = domain.apply(state, action);
    for (const auto &lit : goal_literals(problem))
        CHECK(goal_literal_holds(state, lit));
}

TEST_CASE("predicted operators switch the device on directly") {
    Domain domain = pred_domain();
    PlanningProblem problem = tv_problem(domain);
    PlanResult result = plan(domain, problem);
    REQUIRE(result.status == PlanStatus::found);
    REQUIRE(result.steps.size() == 1);
    CHECK(result.steps[0] == "SWITCH_ON(television.410)");
}

TEST_CASE("mixing the plug-only plug_in with the reference switch_on dead-ends") {
    Domain domain = mixed_domain();
    PlanningProblem problem = tv_problem(domain);
    PlanResult result = plan(domain, problem);
    CHECK(result.status == PlanStatus::unreachable);
    CHECK(result.expanded == 1);  // nothing was applicable at the start state
    CHECK(result.generated == 1); // the space is proven closed, not cut off
}

TEST_CASE("a trivially satisfied goal yields an empty plan") {
    Domain domain = gt_domain();
    PlanningProblem problem = tv_problem(domain);
    problem.goal = parse_condition_text("(and (off television.410))");
    PlanResult result = plan(domain, problem);
    CHECK(result.status == PlanStatus::found);
    CHECK(result.steps.empty());
}

TEST_CASE("running out of budget is reported as exhaustion, not unreachability") {
    Domain domain = gt_domain();
    PlanningProblem problem = tv_problem(domain);
    CHECK(plan(domain, problem, 2).status == PlanStatus::budget_exhausted);
    CHECK(plan(domain, problem, 3).status == PlanStatus::found);
    CHECK_THROWS_AS(plan(domain, problem, 0), Error);
}

TEST_CASE("quantified or non-ground goals are rejected") {
    Domain domain = gt_domain();
    PlanningProblem problem = tv_problem(domain);
    problem.goal = parse_condition_text("(exists (?x - object) (on ?x))");
    CHECK_THROWS_AS(plan(domain, problem), Error);
    problem.goal = parse_condition_text("(on ?x)");
    CHECK_THROWS_AS(plan(domain, problem), Error);
}

TEST_CASE("search results are deterministic across runs") {
    Domain domain = gt_domain();
    PlanningProblem problem = tv_problem(domain);
    PlanResult a = plan(domain, problem);
    PlanResult b = plan(domain, problem);
    CHECK(a.steps == b.steps);
    CHECK(a.expanded == b.expanded);
    CHECK(a.generated == b.generated);
}

TEST_CASE("the planner agrees with exhaustive breadth-first search") {
    const char *goals[] = {"(and (on television.410))",
                           "(and (plugged_in television.410))",
                           "(and (on television.410) (plugged_in television.410))",
                           "(and (sitting character.65))"};
    for (auto make :
         {+[] { return gt_domain(); }, +[] { return pred_domain(); },
          +[] { return mixed_domain(); }}) {
        Domain domain = make();
        for (const char *goal : goals) {
            PlanningProblem problem = tv_problem(domain);
            problem.goal = parse_condition_text(goal);
            CAPTURE(domain.name());
            CAPTURE(goal);
            bool reference = bfs_solvable(domain, problem, 8);
            PlanResult result = plan(domain, problem);
            CHECK(result.status != PlanStatus::budget_exhausted);
            CHECK((result.status == PlanStatus::found) == reference);
        }
    }
}

TEST_CASE("operator substitution rebuilds a working domain") {
    Domain gt = gt_domain();
    Domain pred = pred_domain();
    const OperatorSchema *pred_switch = pred.find("switch_on");
    REQUIRE(pred_switch != nullptr);

    Domain probed = with_operator(gt, *pred_switch);
    PlanningProblem problem = tv_problem(probed);
    PlanResult result = plan(probed, problem);
    REQUIRE(result.status == PlanStatus::found);
    CHECK(result.steps == std::vector<std::string>{"SWITCH_ON(television.410)"});

    // substituting an operator with itself changes nothing
    const OperatorSchema *gt_switch = gt.find("switch_on");
    Domain same = with_operator(gt, *gt_switch);
    PlanResult baseline = plan(gt, tv_problem(gt));
    PlanResult echoed = plan(same, tv_problem(same));
    CHECK(echoed.steps == baseline.steps);

    // a replacement may mention predicates the base never declared
    OperatorSchema glow;
    glow.name = "switch_on";
    glow.params = {{"char", "character"}, {"obj", "object"}};
    glow.precondition = parse_condition_text("(and (glowing ?obj))");
    glow.effect = parse_condition_text("(and (on ?obj) (not (off ?obj)))");
    glow.implicit_agent = true;
    Domain merged = with_operator(gt, glow);
    CHECK(merged.predicates().count("glowing") == 1);
    CHECK(plan(merged, tv_problem(merged)).status == PlanStatus::unreachable);
}

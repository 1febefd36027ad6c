#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.h"
#include "replan.h"

using namespace embeval;

namespace {

std::shared_ptr<Universe> fridge_universe() {
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("agent", 0));
    u->add_object(ObjectRef("rag", 0), {"small", "cleaning_tool"});
    u->add_object(ObjectRef("sink", 82), {"toggleable", "large"});
    u->add_object(ObjectRef("fridge", 97), {"openable", "large"});
    u->set_agent(ObjectRef("agent", 0));
    return u;
}

WorldState fridge_init(std::shared_ptr<Universe> u) {
    return WorldState(std::move(u),
                      {Proposition::parse("onfloor(rag.0)"),
                       Proposition::parse("closed(fridge.97)"),
                       Proposition::parse("stained(fridge.97)"),
                       Proposition::parse("toggled_off(sink.82)")});
}

const std::vector<std::string> kFridgePlan = {
    "RIGHT_GRASP(rag.0)", "RIGHT_PLACE_NEXTTO(sink.82)", "TOGGLE_ON(sink.82)",
    "SOAK(rag.0)",        "TOGGLE_OFF(sink.82)",         "OPEN(fridge.97)",
    "CLEAN(fridge.97)"};

GoalSpec fridge_goal() { return parse_goal_sexpr("(not (stained fridge.97))"); }

bool same_trace(const ExecutionTrace &a, const ExecutionTrace &b) {
    if (a.completed != b.completed || a.stop_index != b.stop_index ||
        a.error != b.error || a.steps.size() != b.steps.size() ||
        a.trajectory.states.size() != b.trajectory.states.size())
        return false;
    for (size_t i = 0; i < a.steps.size(); ++i) {
        if (a.steps[i].raw != b.steps[i].raw ||
            a.steps[i].applied != b.steps[i].applied)
            return false;
    }
    for (size_t i = 0; i < a.trajectory.states.size(); ++i)
        if (!(a.trajectory.states[i] == b.trajectory.states[i])) return false;
    return true;
}

} // namespace

TEST_CASE("zero failure probability reproduces a plain execution") {
    const Domain &d = builtin_domain("behavior-symbolic");
    WorldState init = fridge_init(fridge_universe());

    StochasticConfig config;
    config.fail_prob = 0.0;
    config.seed = 1234;
    ReplanOutcome outcome =
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "fridge");
    REQUIRE(outcome.attempts.size() == 1);

    ExecutionTrace plain = execute(init, kFridgePlan, d);
    CHECK(same_trace(outcome.attempts[0].trace, plain));
    CHECK(outcome.execution_success);
    CHECK(outcome.task_success);
    CHECK(outcome.goal.satisfied);
    CHECK(outcome.goal.partial == 1.0);
    CHECK(outcome.attempts[0].feedback.empty());

    // a failing plan still gets only one attempt: retrying a deterministic
    // execution cannot help
    config.max_retries = 3;
    ReplanOutcome failing = run_stochastic(init, {"CLEAN(fridge.97)"}, d,
                                           fridge_goal(), config, "fridge");
    CHECK(failing.attempts.size() == 1);
    CHECK(!failing.execution_success);
}

TEST_CASE("a fixed seed gives identical stochastic runs") {
    const Domain &d = builtin_domain("behavior-symbolic");
    WorldState init = fridge_init(fridge_universe());

    StochasticConfig config;
    config.fail_prob = 0.2;
    config.seed = 99;
    ReplanOutcome a =
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "fridge");
    ReplanOutcome b =
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "fridge");
    REQUIRE(a.attempts.size() == b.attempts.size());
    for (size_t i = 0; i < a.attempts.size(); ++i) {
        CHECK(a.attempts[i].injected_step == b.attempts[i].injected_step);
        CHECK(a.attempts[i].feedback == b.attempts[i].feedback);
        CHECK(same_trace(a.attempts[i].trace, b.attempts[i].trace));
    }
    CHECK(a.execution_success == b.execution_success);
    CHECK(a.task_success == b.task_success);
    CHECK(a.decisive == b.decisive);

    // a different task id shifts the stream
    ReplanOutcome c =
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "other");
    CHECK(task_stream_seed(99, "fridge") != task_stream_seed(99, "other"));
    // (outcomes may coincide; the seeds must not)
    CHECK(c.attempts.size() >= 1);
}

TEST_CASE("allowing retries never lowers execution success") {
    const Domain &d = builtin_domain("behavior-symbolic");
    WorldState init = fridge_init(fridge_universe());

    int rescued = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        StochasticConfig no_retries;
        no_retries.fail_prob = 0.2;
        no_retries.seed = seed;
        no_retries.max_retries = 0;
        StochasticConfig with_retries = no_retries;
        with_retries.max_retries = 3;

        ReplanOutcome base = run_stochastic(init, kFridgePlan, d, fridge_goal(),
                                            no_retries, "fridge");
        ReplanOutcome retried = run_stochastic(init, kFridgePlan, d,
                                               fridge_goal(), with_retries,
                                               "fridge");
        CAPTURE(seed);
        if (base.execution_success) CHECK(retried.execution_success);
        if (base.task_success) CHECK(retried.task_success);
        if (!base.execution_success && retried.execution_success) ++rescued;
    }
    // at 0.2 per-step failure over 7 steps, retries must rescue some seeds
    CHECK(rescued > 0);
}

TEST_CASE("an injected failure truncates the attempt without blaming the plan") {
    const Domain &d = builtin_domain("behavior-symbolic");
    WorldState init = fridge_init(fridge_universe());

    StochasticConfig config;
    config.fail_prob = 0.999;
    config.seed = 5;
    ReplanOutcome outcome =
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "fridge");
    REQUIRE(outcome.attempts.size() == 4); // one initial try plus three retries
    for (const auto &attempt : outcome.attempts) {
        REQUIRE(attempt.injected_step == 0);
        const ExecutionTrace &trace = attempt.trace;
        CHECK(!trace.completed);
        CHECK(trace.error == ErrorClass::none);
        CHECK(trace.trajectory.states.size() == 1); // nothing took effect
        REQUIRE(trace.steps.size() == 1);
        CHECK(!trace.steps[0].applied);
        CHECK(trace.steps[0].message ==
              "stochastic failure: RIGHT_GRASP(rag.0) did not take effect");
        CHECK(attempt.feedback.find("did not take effect") != std::string::npos);
    }
    CHECK(!outcome.execution_success);
    CHECK(!outcome.task_success);
    CHECK(outcome.decisive == 3);
}

TEST_CASE("genuine runtime failures keep the verbatim feedback template") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("agent", 0));
    u->add_object(ObjectRef("book", 2), {"small"});
    u->set_agent(ObjectRef("agent", 0));
    WorldState init(u, {});

    StochasticConfig config;
    config.fail_prob = 0.2;
    config.seed = 11;
    config.max_retries = 1;
    GoalSpec goal = parse_goal_sexpr("(and (onfloor book.2))");
    ReplanOutcome outcome = run_stochastic(init, {"RIGHT_RELEASE(book.2)"}, d,
                                           goal, config, "book");
    // the first step never applies, so no stochastic draw can preempt the
    // runtime categorization
    REQUIRE(outcome.attempts.size() == 2);
    CHECK(outcome.attempts[0].injected_step == -1);
    CHECK(outcome.attempts[0].trace.error == ErrorClass::missing_step);
    CHECK(outcome.attempts[0].feedback ==
          "At the 0 retry, LLM predict the action sequence to be "
          "[RIGHT_RELEASE(book.2)]. Action RIGHT_RELEASE(book.2) is not "
          "executable in the action sequence [RIGHT_RELEASE(book.2)]. It "
          "encounters an error: MISSING STEP. Missing step means that action "
          "RIGHT_RELEASE(book.2) needs some other necessary action before its "
          "execution.");
    CHECK(outcome.attempts[1].feedback.rfind("At the 1 retry", 0) == 0);
}

TEST_CASE("stochastic recovery picks the first fully successful attempt") {
    const Domain &d = builtin_domain("behavior-symbolic");
    WorldState init = fridge_init(fridge_universe());

    bool found_recovery = false;
    for (std::uint64_t seed = 0; seed < 60 && !found_recovery; ++seed) {
        StochasticConfig config;
        config.fail_prob = 0.2;
        config.seed = seed;
        ReplanOutcome outcome = run_stochastic(init, kFridgePlan, d,
                                               fridge_goal(), config, "fridge");
        if (outcome.attempts.size() > 1 && outcome.task_success) {
            found_recovery = true;
            CHECK(outcome.decisive ==
                  static_cast<int>(outcome.attempts.size()) - 1);
            CHECK(outcome.attempts[outcome.decisive].trace.completed);
            CHECK(outcome.attempts[outcome.decisive].goal.satisfied);
            for (int i = 0; i < outcome.decisive; ++i)
                CHECK(!outcome.attempts[i].feedback.empty());
        }
    }
    CHECK(found_recovery);
}

TEST_CASE("configuration bounds are validated") {
    const Domain &d = builtin_domain("behavior-symbolic");
    WorldState init = fridge_init(fridge_universe());
    StochasticConfig config;
    config.fail_prob = 1.0;
    CHECK_THROWS_AS(
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "t"),
        Error);
    config.fail_prob = -0.1;
    CHECK_THROWS_AS(
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "t"),
        Error);
    config.fail_prob = 0.5;
    config.max_retries = -1;
    CHECK_THROWS_AS(
        run_stochastic(init, kFridgePlan, d, fridge_goal(), config, "t"),
        Error);
}

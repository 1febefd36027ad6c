#include "replan.h"

#include <random>

#include "errors.h"

namespace embeval {

namespace {

double unit_draw(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

GoalFeedback goal_feedback(const GoalBreakdown &breakdown) {
    GoalFeedback feedback;
    feedback.node_goals = breakdown.unsatisfied_node_goals();
    feedback.edge_goals = breakdown.unsatisfied_edge_goals();
    feedback.action_goals = breakdown.unsatisfied_action_goals();
    return feedback;
}

std::string plan_listing(const ExecutionTrace &trace) {
    std::string out = "[";
    bool first = true;
    for (const auto &step : trace.steps) {
        if (step.inserted) continue;
        if (!first) out += ", ";
        out += step.raw;
        first = false;
    }
    return out + "]";
}

// Cuts a trace just before `position`: the fizzled step is kept as a record
// that never applied, with no error class (the failure is environmental, not
// the plan's).
ExecutionTrace truncate_at(const ExecutionTrace &full, int position) {
    const StepRecord &fizzled = full.steps[position];
    ExecutionTrace trace;
    trace.trajectory.states.assign(full.trajectory.states.begin(),
                                   full.trajectory.states.begin() +
                                       fizzled.pre_state + 1);
    trace.trajectory.actions.assign(full.trajectory.actions.begin(),
                                    full.trajectory.actions.begin() +
                                        fizzled.pre_state);
    trace.steps.assign(full.steps.begin(), full.steps.begin() + position);
    StepRecord record = fizzled;
    record.applied = false;
    record.error = ErrorClass::none;
    record.message = "stochastic failure: " + record.visible.str() +
                     " did not take effect";
    trace.steps.push_back(std::move(record));
    trace.completed = false;
    trace.stop_index = fizzled.plan_index;
    trace.error = ErrorClass::none;
    trace.error_message = trace.steps.back().message;
    return trace;
}

} // namespace

std::uint64_t task_stream_seed(std::uint64_t seed, const std::string &task_id) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char byte : task_id) {
        hash ^= byte;
        hash *= 1099511628211ULL;
    }
    return seed ^ hash;
}

ReplanOutcome run_stochastic(const WorldState &initial,
                             const std::vector<std::string> &plan,
                             const Domain &domain, const GoalSpec &goal,
                             const StochasticConfig &config,
                             const std::string &task_id) {
    if (config.fail_prob < 0.0 || config.fail_prob >= 1.0)
        throw Error(ErrorCode::validation_error,
                    "failure probability must lie in [0, 1)");
    if (config.max_retries < 0)
        throw Error(ErrorCode::validation_error, "retry count must be >= 0");

    std::mt19937_64 rng(task_stream_seed(config.seed, task_id));
    ReplanOutcome outcome;
    for (int attempt_index = 0; attempt_index <= config.max_retries;
         ++attempt_index) {
        Attempt attempt;
        ExecutionTrace full = execute(initial, plan, domain);
        attempt.injected_step = -1;
        if (config.fail_prob > 0.0) {
            for (size_t position = 0; position < full.steps.size(); ++position) {
                if (!full.steps[position].applied) continue;
                if (unit_draw(rng) < config.fail_prob) {
                    attempt.injected_step = static_cast<int>(position);
                    break;
                }
            }
        }
        attempt.trace = attempt.injected_step >= 0
                            ? truncate_at(full, attempt.injected_step)
                            : std::move(full);
        attempt.goal = check_satisfaction(goal, attempt.trace.trajectory);

        const bool succeeded =
            attempt.trace.completed && attempt.goal.satisfied;
        if (succeeded) {
            attempt.feedback.clear();
        } else if (attempt.injected_step >= 0) {
            attempt.feedback =
                "At the " + std::to_string(attempt_index) +
                " retry, LLM predict the action sequence to be " +
                plan_listing(attempt.trace) + ". " +
                attempt.trace.error_message + ". Please retry.";
        } else {
            attempt.feedback = feedback_message(
                attempt.trace, goal_feedback(attempt.goal.breakdown),
                attempt_index);
        }
        outcome.attempts.push_back(std::move(attempt));
        if (succeeded) break;
        // without stochastic failures, retrying the same plan cannot change
        // the outcome
        if (config.fail_prob == 0.0) break;
    }

    outcome.decisive = -1;
    for (size_t i = 0; i < outcome.attempts.size(); ++i) {
        const Attempt &attempt = outcome.attempts[i];
        outcome.execution_success =
            outcome.execution_success || attempt.trace.completed;
        if (attempt.trace.completed && attempt.goal.satisfied &&
            outcome.decisive < 0)
            outcome.decisive = static_cast<int>(i);
    }
    outcome.task_success = outcome.decisive >= 0;
    if (outcome.decisive < 0) {
        // no attempt both completed and satisfied: stand on the last one
        outcome.decisive = static_cast<int>(outcome.attempts.size()) - 1;
    }
    outcome.goal = outcome.attempts[outcome.decisive].goal;
    return outcome;
}

} // namespace embeval

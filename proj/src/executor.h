#ifndef EMBEVAL_EXECUTOR_H
#define EMBEVAL_EXECUTOR_H

#include "domain.h"

namespace embeval {

// Failure taxonomy for predicted plans: grammar classes found by linting,
// runtime classes found by simulated execution.
enum class ErrorClass {
    none,
    parsing,
    hallucination_action,
    hallucination_object,
    arg_number,
    affordance,
    additional_step,
    missing_step,
    wrong_order,
};

// Stable identifier used in reports ("missing_step", ...); both hallucination
// kinds collapse into "hallucination".
std::string error_class_key(ErrorClass c);
// Upper-case display form used in feedback messages ("MISSING STEP", ...).
std::string error_class_display(ErrorClass c);

struct PlanFinding {
    int step = -1; // 0-based index into the raw plan
    ErrorClass error = ErrorClass::none;
    std::string message;
};

struct StepRecord {
    std::string raw;
    int plan_index = -1;  // -1 for steps inserted by auto-navigation
    bool inserted = false;
    bool parsed = false;
    bool applied = false;
    GroundAction action;  // full parameter list (includes any implicit agent)
    GroundAction visible; // surface form recorded in the trajectory
    int pre_state = -1;   // index into trajectory.states
    ErrorClass error = ErrorClass::none;
    std::string message;
};

struct ExecutionTrace {
    Trajectory trajectory; // states chained through the applied prefix
    std::vector<StepRecord> steps;
    bool completed = false;
    int stop_index = -1; // plan index of the failing step
    ErrorClass error = ErrorClass::none;
    std::string error_message;

    const WorldState &final_state() const { return trajectory.states.back(); }
};

// Splits "NAME(arg1, arg2)" into name and argument texts; returns false (with
// a reason) for anything that does not scan.
bool parse_action_text(const std::string &raw, std::string *name,
                       std::vector<std::string> *args, std::string *reason);

// Grammar pass: parse failures, unknown action names, unknown objects,
// argument-count mismatches.  At most one finding per step, first match in
// that order; never executes anything.
std::vector<PlanFinding> lint_plan(const std::vector<std::string> &plan,
                                   const Domain &domain, const Universe &universe);

// Runs the plan from the initial state, stopping at the first grammar or
// runtime failure.  Auto-navigation (when the domain has a navigation schema)
// inserts a move before an action whose only unsatisfied precondition is
// agent adjacency.
ExecutionTrace execute(const WorldState &initial,
                       const std::vector<std::string> &plan, const Domain &domain);

// Decision tree for a step that failed its applicability or redundancy check:
// affordance -> additional step -> missing step / wrong order (the last two
// split on whether the precondition ever held in the visited states).
ErrorClass categorize_failure(const GroundAction &action, const WorldState &current,
                              const std::vector<WorldState> &history,
                              const Domain &domain);

// Unsatisfied goals, already rendered, grouped the way feedback reports them.
struct GoalFeedback {
    std::vector<std::string> node_goals;
    std::vector<std::string> edge_goals;
    std::vector<std::string> action_goals;

    bool all_satisfied() const {
        return node_goals.empty() && edge_goals.empty() && action_goals.empty();
    }
};

// Replanning feedback: empty for a clean success, otherwise the retry header
// plus either the execution-error sentence ("It encounters an error: MISSING
// STEP. ...") or the unsatisfied-goal listing.
std::string feedback_message(const ExecutionTrace &trace, const GoalFeedback &goals,
                             int retry_count);

} // namespace embeval

#endif

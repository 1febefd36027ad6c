#ifndef EMBEVAL_REPORT_H
#define EMBEVAL_REPORT_H

#include <set>

#include "replan.h"
#include "subgoal.h"
#include "tasks.h"
#include "tmodel.h"

namespace embeval {

struct EvalOptions {
    int option_cap = kDefaultOptionCap;
    int depth_cap = kDefaultDepthCap;
    int node_budget = kDefaultNodeBudget;
    double fail_prob = 0.0;
    std::uint64_t seed = 0;
    int max_retries = 3;
    int parallel = 1;
};

// One scored task.  `evaluated` is false when the task cannot be scored by
// this module at all (no scene fixture, or a goal the planner cannot target);
// such rows are excluded from every aggregate.  A missing prediction is a
// scored failure, not an exclusion.
struct TaskResult {
    std::string task_id;
    bool evaluated = true;
    bool missing_prediction = false;
    bool execution_success = false;
    bool task_success = false;
    std::set<std::string> errors; // error_class_key strings
    std::map<std::string, double> metrics;
    std::vector<std::string> diagnostics;
    std::map<std::string, std::string> echo; // unknown task fields, JSON text
};

struct EvalReport {
    ModuleTag module = ModuleTag::goal_interpretation;
    bool pipeline = false;
    std::vector<TaskResult> tasks; // sorted by task id
    int evaluated = 0;
    double task_sr = 0.0;
    double execution_sr = 0.0;
    std::map<std::string, double> error_rates;  // all seven classes, fractions
    std::map<std::string, double> metric_means; // module's fixed metric keys
    std::vector<std::string> diagnostics;
};

// Evaluates one module over a suite.  Predictions must reference known tasks
// (Error(validation_error) otherwise) and carry the module's tag.  Worker
// count never changes the result: rows are slotted by task position and
// aggregated after the join.
EvalReport eval_suite(const TaskSuite &tasks, const PredictionSet &predictions,
                      const Domain &domain, const EvalOptions &options = {});

// Goal interpretation feeding a downstream module: the downstream prediction
// is scored against the ground-truth goal as usual, and additionally against
// the goal assembled from the upstream prediction (vs_predicted_* metrics).
EvalReport pipeline_eval(const TaskSuite &tasks, const PredictionSet &upstream,
                         const PredictionSet &downstream, const Domain &domain,
                         const EvalOptions &options = {});

// Deterministic renderings: JSON with sorted keys and values rounded to four
// decimals; CSV with the paper's column layout, percentages 0-100 at one
// decimal, and the aggregate row recomputed from the printed row values.
std::string report_json(const EvalReport &report);
std::string report_csv(const EvalReport &report);

// Rebuilds the CSV view from an emitted JSON report (the `report` command).
std::string csv_from_json(const std::string &json_text);

// Planner-probing front end: every schema of the substituted operator set
// probed across the suite's planner-usable tasks.
struct SensitivityReport {
    std::vector<SensitivityRow> rows;
    std::vector<std::string> diagnostics;
};

SensitivityReport sensitivity_eval(const TaskSuite &tasks,
                                   const PredictionSet &predictions,
                                   const Domain &domain,
                                   const EvalOptions &options = {});

std::string sensitivity_json(const SensitivityReport &report);
std::string sensitivity_csv(const SensitivityReport &report);

// Shared helpers (used by the CLI and tests).
double round_to(double value, int decimals);
// Planner view of a task: null when it has no scene or no flattenable goal.
// On success fills problem/relevant names from the record.
bool transition_task_for(const TaskRecord &task, const Domain &domain,
                         TransitionTask *out, std::string *why_not);

} // namespace embeval

#endif

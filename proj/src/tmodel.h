#ifndef EMBEVAL_TMODEL_H
#define EMBEVAL_TMODEL_H

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ltl.h"
#include "match.h"
#include "planner.h"

namespace embeval {

// One planning evaluation problem: the parsed problem plus the operator names
// its reference solution uses and the categories assigned for breakdowns.
struct TransitionTask {
    PlanningProblem problem;
    std::vector<std::string> relevant_actions; // canonical lower-case, sorted
    std::vector<std::string> categories;
};

// Distinct canonical action names of a reference trajectory, sorted.
std::vector<std::string> extract_relevant_operators(const Trajectory &trajectory);

struct SuccessRate {
    int total = 0;
    int solved = 0;
    double rate() const { return total ? static_cast<double>(solved) / total : 0.0; }
};

struct SuccessReport {
    SuccessRate overall;
    std::map<std::string, SuccessRate> per_category; // only categories seen
    std::vector<std::pair<std::string, PlanStatus>> per_task;
};

// Fraction of tasks the operator set can solve, overall and per category.
SuccessReport planner_success(const Domain &ops,
                              const std::vector<TransitionTask> &tasks,
                              int node_budget = kDefaultNodeBudget);

// One probed action: predicted(action) substituted into the otherwise
// ground-truth set, planned on every task whose reference solution uses the
// action.  Unused actions are reported but marked not applicable.
struct SensitivityRow {
    std::string action;
    bool applicable = false;
    SuccessRate overall;
    std::map<std::string, SuccessRate> per_category;
    std::vector<std::pair<std::string, PlanStatus>> per_task;
};

std::vector<SensitivityRow> sensitivity(const Domain &gt_ops,
                                        const Domain &pred_ops,
                                        const std::vector<TransitionTask> &tasks,
                                        int node_budget = kDefaultNodeBudget);

// Predicate name -> category name, shipped as data (see fixtures).
struct CategoryTable {
    std::map<std::string, std::string> predicate_to_category;
};

// Predicates a task's relevant operators mention anywhere in their
// definitions within `ops`.
std::set<std::string> task_predicates(const Domain &ops,
                                      const TransitionTask &task);

// Assigns each task the top-k categories by summed inverse document
// frequency of its operator predicates: idf(t) = log(N / df(t)) over the
// task list itself.  Categories scoring zero are never assigned; ties break
// alphabetically.
void categorize_tasks(const Domain &ops, const CategoryTable &table,
                      std::vector<TransitionTask> *tasks, int top_k = 2);

} // namespace embeval

#endif

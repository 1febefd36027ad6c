#include "tmodel.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace embeval {

std::vector<std::string> extract_relevant_operators(const Trajectory &trajectory) {
    std::set<std::string> names;
    for (const auto &action : trajectory.actions) names.insert(action.name);
    return {names.begin(), names.end()};
}

namespace {

void record(SuccessReport *report, const TransitionTask &task, PlanStatus status) {
    const bool solved = status == PlanStatus::found;
    ++report->overall.total;
    report->overall.solved += solved;
    for (const auto &category : task.categories) {
        auto &row = report->per_category[category];
        ++row.total;
        row.solved += solved;
    }
    report->per_task.push_back({task.problem.name, status});
}

} // namespace

SuccessReport planner_success(const Domain &ops,
                              const std::vector<TransitionTask> &tasks,
                              int node_budget) {
    SuccessReport report;
    for (const auto &task : tasks)
        record(&report, task, plan(ops, task.problem, node_budget).status);
    return report;
}

std::vector<SensitivityRow> sensitivity(const Domain &gt_ops,
                                        const Domain &pred_ops,
                                        const std::vector<TransitionTask> &tasks,
                                        int node_budget) {
    std::vector<SensitivityRow> rows;
    for (const auto &schema : pred_ops.schemas()) {
        SensitivityRow row;
        row.action = schema.name;
        for (const auto &task : tasks) {
            if (std::find(task.relevant_actions.begin(),
                          task.relevant_actions.end(),
                          schema.name) == task.relevant_actions.end())
                continue;
            row.applicable = true;
            const Domain probed = with_operator(gt_ops, schema);
            const PlanStatus status =
                plan(probed, task.problem, node_budget).status;
            const bool solved = status == PlanStatus::found;
            ++row.overall.total;
            row.overall.solved += solved;
            for (const auto &category : task.categories) {
                auto &cell = row.per_category[category];
                ++cell.total;
                cell.solved += solved;
            }
            row.per_task.push_back({task.problem.name, status});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::set<std::string> task_predicates(const Domain &ops,
                                      const TransitionTask &task) {
    std::set<std::string> predicates;
    for (const auto &name : task.relevant_actions) {
        const OperatorSchema *schema = ops.find(name);
        if (!schema) continue;
        collect_predicates(schema->precondition, &predicates);
        collect_predicates(schema->effect, &predicates);
    }
    return predicates;
}

void categorize_tasks(const Domain &ops, const CategoryTable &table,
                      std::vector<TransitionTask> *tasks, int top_k) {
    if (top_k < 1)
        throw Error(ErrorCode::validation_error, "top_k must be positive");
    std::vector<std::set<std::string>> term_sets;
    term_sets.reserve(tasks->size());
    std::map<std::string, int> document_frequency;
    for (const auto &task : *tasks) {
        term_sets.push_back(task_predicates(ops, task));
        for (const auto &term : term_sets.back()) ++document_frequency[term];
    }
    const double total = static_cast<double>(tasks->size());
    for (size_t i = 0; i < tasks->size(); ++i) {
        std::map<std::string, double> scores;
        for (const auto &term : term_sets[i]) {
            auto category = table.predicate_to_category.find(term);
            if (category == table.predicate_to_category.end()) continue;
            scores[category->second] +=
                std::log(total / document_frequency.at(term));
        }
        std::vector<std::pair<double, std::string>> ranked;
        for (const auto &[category, score] : scores)
            if (score > 0.0) ranked.push_back({-score, category});
        std::sort(ranked.begin(), ranked.end());
        auto &categories = (*tasks)[i].categories;
        categories.clear();
        for (const auto &[neg_score, category] : ranked) {
            if (static_cast<int>(categories.size()) >= top_k) break;
            categories.push_back(category);
        }
    }
}

} // namespace embeval

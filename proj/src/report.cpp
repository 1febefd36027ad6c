#include "report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace embeval {

namespace {

using nlohmann::json;

// CSV column order mirrors the published tables.
constexpr int kErrorClassCount = 7;
const char *const kErrorKeys[kErrorClassCount] = {
    "parsing",      "hallucination", "predicate_arg_num", "wrong_order",
    "missing_step", "affordance",    "additional_step"};
const char *const kErrorColumns[kErrorClassCount] = {
    "Parsing",      "Hallucination", "Predicate-Arg Num", "Wrong Order",
    "Missing Step", "Affordance",    "Additional Step"};

double round4(double value) { return round_to(value, 4); }

void set_metric(TaskResult *row, const std::string &key, double value) {
    row->metrics[key] = round4(value);
}

std::vector<std::string> metric_keys(ModuleTag module, bool pipeline) {
    std::vector<std::string> keys;
    switch (module) {
    case ModuleTag::goal_interpretation:
        keys = {"precision", "recall",    "f1",          "state_f1",
                "relation_f1", "action_f1", "hallucinated"};
        break;
    case ModuleTag::action_sequencing:
    case ModuleTag::subgoal_decomposition:
        keys = {"partial"};
        if (pipeline) {
            keys.push_back("vs_predicted_task_success");
            keys.push_back("vs_predicted_partial");
        }
        break;
    case ModuleTag::transition_modeling:
        keys = {"precision",       "recall",    "f1",
                "precondition_f1", "effect_f1", "planner_found"};
        if (pipeline) keys.push_back("vs_predicted_planner_found");
        break;
    }
    return keys;
}

void ensure_metric_keys(TaskResult *row, ModuleTag module, bool pipeline) {
    for (const auto &key : metric_keys(module, pipeline))
        row->metrics.emplace(key, 0.0);
}

void add_error(TaskResult *row, ErrorClass cls) {
    if (cls != ErrorClass::none) row->errors.insert(error_class_key(cls));
}

// ------------------------------------------------------ goal interpretation

PredictedGoals build_predicted_goals(const PredictionRecord &pred,
                                     const TaskRecord &task, const Domain &domain,
                                     TaskResult *row) {
    PredictedGoals out;
    const Vocabulary vocab = domain.vocabulary();
    for (const auto &text : pred.literals) {
        GoalLiteral lit;
        std::string reason;
        if (!parse_literal_text(text, &lit, &reason)) {
            row->errors.insert("parsing");
            row->diagnostics.push_back("unparsable predicted literal \"" + text +
                                       "\": " + reason);
            continue;
        }
        auto vit = vocab.predicates.find(lit.prop.predicate);
        if (vit == vocab.predicates.end()) {
            ++out.hallucinated;
            row->diagnostics.push_back("hallucinated predicate: " + text);
            continue;
        }
        if (static_cast<int>(lit.prop.args.size()) != vit->second) {
            row->errors.insert("predicate_arg_num");
            row->diagnostics.push_back("predicate argument count mismatch: " + text);
            continue;
        }
        bool known = true;
        for (const auto &arg : lit.prop.args) {
            if (arg.has_id ? !task.universe->contains(arg)
                           : task.universe->with_category(arg.category).empty()) {
                known = false;
                break;
            }
        }
        if (!known) {
            ++out.hallucinated;
            row->diagnostics.push_back("hallucinated object in: " + text);
            continue;
        }
        out.literals.push_back(std::move(lit));
    }
    for (const auto &text : pred.action_goals) {
        ActionGoal goal;
        std::string current;
        auto flush = [&] {
            size_t a = current.find_first_not_of(" \t");
            if (a == std::string::npos) {
                current.clear();
                return;
            }
            size_t b = current.find_last_not_of(" \t");
            std::string name = current.substr(a, b - a + 1);
            current.clear();
            const OperatorSchema *schema = domain.find(name);
            if (!schema) {
                ++out.hallucinated;
                row->diagnostics.push_back("hallucinated action goal name: " + name);
                return;
            }
            goal.names.push_back(schema->name);
        };
        for (char c : text) {
            if (c == '|')
                flush();
            else
                current += c;
        }
        flush();
        if (!goal.names.empty()) out.actions.push_back(std::move(goal));
    }
    if (out.hallucinated > 0) row->errors.insert("hallucination");
    return out;
}

void eval_goal_interp(const TaskRecord &task, const PredictionRecord &pred,
                      const Domain &domain, const EvalOptions &opts,
                      TaskResult *row) {
    PredictedGoals guess = build_predicted_goals(pred, task, domain, row);
    InterpretationScore score =
        interpret_f1(guess, task.goal, *task.universe, opts.option_cap);
    set_metric(row, "precision", score.overall.precision);
    set_metric(row, "recall", score.overall.recall);
    set_metric(row, "f1", score.overall.f1);
    set_metric(row, "state_f1", score.state.f1);
    set_metric(row, "relation_f1", score.relation.f1);
    set_metric(row, "action_f1", score.action.f1);
    set_metric(row, "hallucinated", score.hallucinated);
    row->task_success = score.overall.f1 == 1.0 && score.hallucinated == 0;
    // No execution stage in this module; the success rates coincide.
    row->execution_success = row->task_success;
}

// -------------------------------------------------------- action sequencing

void score_trace(const ExecutionTrace &trace, const SatisfactionResult &sat,
                 const GoalSpec *pipeline_goal, int option_cap, TaskResult *row) {
    row->execution_success = trace.completed;
    row->task_success = trace.completed && sat.satisfied;
    set_metric(row, "partial", sat.partial);
    add_error(row, trace.error);
    if (!trace.error_message.empty())
        row->diagnostics.push_back(trace.error_message);
    if (pipeline_goal) {
        SatisfactionResult vs =
            check_satisfaction(*pipeline_goal, trace.trajectory, option_cap);
        set_metric(row, "vs_predicted_task_success",
                   trace.completed && vs.satisfied ? 1.0 : 0.0);
        set_metric(row, "vs_predicted_partial", vs.partial);
    }
}

void eval_action_seq(const TaskRecord &task, const PredictionRecord &pred,
                     const Domain &domain, const EvalOptions &opts,
                     const GoalSpec *pipeline_goal, TaskResult *row) {
    if (opts.fail_prob > 0.0) {
        StochasticConfig config;
        config.fail_prob = opts.fail_prob;
        config.seed = opts.seed;
        config.max_retries = opts.max_retries;
        ReplanOutcome outcome = run_stochastic(task.init, pred.trajectory, domain,
                                               task.goal, config, task.id);
        int decisive = outcome.decisive >= 0 ? outcome.decisive : 0;
        const Attempt &attempt = outcome.attempts[decisive];
        score_trace(attempt.trace, attempt.goal, pipeline_goal, opts.option_cap,
                    row);
        row->execution_success = outcome.execution_success;
        row->task_success = outcome.task_success;
        if (outcome.attempts.size() > 1)
            row->diagnostics.push_back(std::to_string(outcome.attempts.size()) +
                                       " attempts under the stochastic harness");
        return;
    }
    ExecutionTrace trace = execute(task.init, pred.trajectory, domain);
    SatisfactionResult sat =
        check_satisfaction(task.goal, trace.trajectory, opts.option_cap);
    score_trace(trace, sat, pipeline_goal, opts.option_cap, row);
}

// ----------------------------------------------------- subgoal decomposition

void eval_subgoal(const TaskRecord &task, const PredictionRecord &pred,
                  const Domain &domain, const EvalOptions &opts,
                  const GoalSpec *pipeline_goal, TaskResult *row) {
    SubgoalPlan plan;
    try {
        plan = pred.subgoals.size() == 1 ? SubgoalPlan::from_text(pred.subgoals[0])
                                         : SubgoalPlan::from_segments(pred.subgoals);
    } catch (const Error &e) {
        row->errors.insert("parsing");
        row->diagnostics.push_back(e.what());
        return;
    }
    SubgoalEval ev = evaluate_subgoal_plan(plan, task.init, task.goal, domain,
                                           opts.depth_cap, opts.option_cap);
    row->execution_success = ev.execution_success;
    row->task_success = ev.task_success;
    set_metric(row, "partial", ev.partial);
    add_error(row, ev.error);
    if (!ev.error_message.empty()) row->diagnostics.push_back(ev.error_message);
    for (const auto &finding : ev.lint) {
        switch (finding.kind) {
        case ltl::LintFinding::Kind::hallucination:
            row->errors.insert("hallucination");
            break;
        case ltl::LintFinding::Kind::arity:
            row->errors.insert("predicate_arg_num");
            break;
        case ltl::LintFinding::Kind::forn_over_then:
            row->errors.insert("parsing");
            break;
        }
        row->diagnostics.push_back(finding.message);
    }
    if (pipeline_goal) {
        SubgoalEval vs = evaluate_subgoal_plan(plan, task.init, *pipeline_goal,
                                               domain, opts.depth_cap,
                                               opts.option_cap);
        set_metric(row, "vs_predicted_task_success", vs.task_success ? 1.0 : 0.0);
        set_metric(row, "vs_predicted_partial", vs.partial);
    }
}

// ------------------------------------------------------- transition modeling

std::string to_lower(std::string s) {
    for (auto &c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

const OperatorSchema *gt_schema_for(const TaskRecord &task, const Domain &domain,
                                    const std::string &name) {
    for (const auto &op : task.gt_operators)
        if (to_lower(op.name) == name) return &op;
    return domain.find(name);
}

struct Micro {
    int tp = 0, fp = 0, fn = 0;

    void add(const SectionScore &s) {
        tp += s.tp;
        fp += s.fp;
        fn += s.fn;
    }
    double precision() const { return tp + fp == 0 ? 1.0 : double(tp) / (tp + fp); }
    double recall() const { return tp + fn == 0 ? 1.0 : double(tp) / (tp + fn); }
    double f1() const {
        return tp + fp + fn == 0 ? 1.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    }
};

void eval_transition(const TaskRecord &task, const PredictionRecord &pred,
                     const Domain &domain, const EvalOptions &opts,
                     const GoalSpec *pipeline_goal, TaskResult *row) {
    TransitionTask tt;
    std::string why_not;
    if (!transition_task_for(task, domain, &tt, &why_not)) {
        row->evaluated = false;
        row->diagnostics.push_back(why_not);
        return;
    }
    if (!pred.parse_errors.empty()) {
        row->errors.insert("parsing");
        for (const auto &e : pred.parse_errors)
            row->diagnostics.push_back("predicted operator block: " + e);
    }
    std::map<std::string, const OperatorSchema *> predicted;
    for (const auto &op : pred.operators) predicted[to_lower(op.name)] = &op;
    for (const auto &[name, op] : predicted)
        if (std::find(tt.relevant_actions.begin(), tt.relevant_actions.end(),
                      name) == tt.relevant_actions.end())
            row->diagnostics.push_back("predicted operator " + name +
                                       " is not used by this task");
    Micro combined, precondition, effect;
    for (const auto &name : tt.relevant_actions) {
        const OperatorSchema *gt = gt_schema_for(task, domain, name);
        if (!gt) {
            row->diagnostics.push_back("no ground-truth operator for " + name);
            continue;
        }
        OperatorSchema missing;
        missing.name = gt->name;
        auto it = predicted.find(name);
        const OperatorSchema &guess = it == predicted.end() ? missing : *it->second;
        if (it == predicted.end())
            row->diagnostics.push_back("no predicted operator for " + name);
        MatchReport match = score_operator(guess, *gt);
        combined.add(match.combined);
        precondition.add(match.precondition);
        effect.add(match.effect);
    }
    set_metric(row, "precision", combined.precision());
    set_metric(row, "recall", combined.recall());
    set_metric(row, "f1", combined.f1());
    set_metric(row, "precondition_f1", precondition.f1());
    set_metric(row, "effect_f1", effect.f1());

    Domain probe = domain;
    for (const auto &op : task.gt_operators)
        if (std::find(tt.relevant_actions.begin(), tt.relevant_actions.end(),
                      to_lower(op.name)) != tt.relevant_actions.end())
            probe = with_operator(probe, op);
    for (const auto &name : tt.relevant_actions) {
        auto it = predicted.find(name);
        if (it != predicted.end()) probe = with_operator(probe, *it->second);
    }
    PlanResult result = plan(probe, tt.problem, opts.node_budget);
    bool found = result.status == PlanStatus::found;
    set_metric(row, "planner_found", found ? 1.0 : 0.0);
    row->task_success = found;
    row->execution_success = found;
    if (!found)
        row->diagnostics.push_back(std::string("planner status: ") +
                                   plan_status_name(result.status));
    if (pipeline_goal) {
        CondPtr vs_goal = goal_condition(*pipeline_goal);
        double vs_found = 0.0;
        if (vs_goal) {
            PlanningProblem problem = tt.problem;
            problem.goal = vs_goal;
            vs_found =
                plan(probe, problem, opts.node_budget).status == PlanStatus::found
                    ? 1.0
                    : 0.0;
        } else {
            row->diagnostics.push_back(
                "predicted goal does not flatten to ground literals");
        }
        set_metric(row, "vs_predicted_planner_found", vs_found);
    }
}

// ------------------------------------------------------------------ driver

TaskResult eval_task(const TaskRecord &task, const PredictionRecord *pred,
                     ModuleTag module, const Domain &domain,
                     const EvalOptions &opts, const GoalSpec *pipeline_goal) {
    TaskResult row;
    row.task_id = task.id;
    row.echo = task.extra;
    row.diagnostics = task.diagnostics;
    if (!task.has_scene) {
        row.evaluated = false;
        row.diagnostics.push_back("no scene fixture; task cannot be evaluated");
        return row;
    }
    if (!pred) {
        row.missing_prediction = true;
        if (module == ModuleTag::transition_modeling) {
            TransitionTask tt;
            std::string why_not;
            if (!transition_task_for(task, domain, &tt, &why_not)) {
                row.evaluated = false;
                row.diagnostics.push_back(why_not);
                return row;
            }
        }
        row.diagnostics.push_back("no prediction for this task");
    } else {
        switch (module) {
        case ModuleTag::goal_interpretation:
            eval_goal_interp(task, *pred, domain, opts, &row);
            break;
        case ModuleTag::action_sequencing:
            eval_action_seq(task, *pred, domain, opts, pipeline_goal, &row);
            break;
        case ModuleTag::subgoal_decomposition:
            eval_subgoal(task, *pred, domain, opts, pipeline_goal, &row);
            break;
        case ModuleTag::transition_modeling:
            eval_transition(task, *pred, domain, opts, pipeline_goal, &row);
            break;
        }
    }
    ensure_metric_keys(&row, module, pipeline_goal != nullptr);
    return row;
}

void run_indexed(size_t count, int workers, const std::function<void(size_t)> &fn) {
    if (workers <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    size_t used = std::min<size_t>(workers, count);
    std::vector<std::exception_ptr> failures(count);
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (size_t w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            for (size_t i = w; i < count; i += used) {
                try {
                    fn(i);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool) t.join();
    for (auto &failure : failures)
        if (failure) std::rethrow_exception(failure);
}

void finalize(EvalReport *report) {
    int evaluated = 0, task_ok = 0, exec_ok = 0;
    std::map<std::string, int> error_counts;
    std::map<std::string, double> sums;
    for (const auto &row : report->tasks) {
        if (!row.evaluated) continue;
        ++evaluated;
        task_ok += row.task_success;
        exec_ok += row.execution_success;
        for (const auto &key : row.errors) ++error_counts[key];
        for (const auto &[key, value] : row.metrics) sums[key] += value;
    }
    report->evaluated = evaluated;
    report->task_sr = evaluated ? round4(double(task_ok) / evaluated) : 0.0;
    report->execution_sr = evaluated ? round4(double(exec_ok) / evaluated) : 0.0;
    for (const auto *key : kErrorKeys)
        report->error_rates[key] =
            evaluated ? round4(double(error_counts[key]) / evaluated) : 0.0;
    for (const auto &key : metric_keys(report->module, report->pipeline))
        report->metric_means[key] = evaluated ? round4(sums[key] / evaluated) : 0.0;
}

const PredictionRecord *lookup(const PredictionSet &set, const std::string &id) {
    auto it = set.by_task.find(id);
    return it == set.by_task.end() ? nullptr : &it->second;
}

void require_known_tasks(const TaskSuite &tasks, const PredictionSet &set) {
    for (const auto &[id, pred] : set.by_task)
        if (!tasks.find(id))
            throw Error(ErrorCode::validation_error,
                        "prediction references unknown task " + id);
}

GoalSpec upstream_goal(const PredictionRecord &pred, const TaskRecord &task,
                       const Domain &domain, TaskResult *row) {
    PredictedGoals guess = build_predicted_goals(pred, task, domain, row);
    GoalSpec spec;
    std::vector<GoalPtr> lits;
    lits.reserve(guess.literals.size());
    for (const auto &lit : guess.literals) {
        std::vector<Term> args;
        for (const auto &ref : lit.prop.args) args.push_back(Term::make_obj(ref));
        lits.push_back(
            GoalNode::lit(lit.prop.predicate, std::move(args), lit.positive));
    }
    if (lits.size() == 1)
        spec.condition = lits[0];
    else if (!lits.empty())
        spec.condition = GoalNode::conj(std::move(lits));
    spec.actions = guess.actions;
    return spec;
}

} // namespace

double round_to(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

bool transition_task_for(const TaskRecord &task, const Domain &domain,
                         TransitionTask *out, std::string *why_not) {
    if (!task.has_scene) {
        if (why_not) *why_not = "no scene fixture; task cannot be evaluated";
        return false;
    }
    CondPtr goal = goal_condition(task.goal);
    if (!goal) {
        if (why_not)
            *why_not = "goal does not flatten to ground literals; "
                       "planner evaluation skipped";
        return false;
    }
    std::set<std::string> names;
    for (const auto &line : task.trajectory) {
        std::string name, reason;
        std::vector<std::string> args;
        if (!parse_action_text(line, &name, &args, &reason)) continue;
        const OperatorSchema *schema = domain.find(name);
        if (schema) names.insert(schema->name);
    }
    if (names.empty()) {
        if (why_not)
            *why_not = "trajectory names no known operators; "
                       "planner evaluation skipped";
        return false;
    }
    out->problem.name = task.id;
    out->problem.domain_name = domain.name();
    out->problem.universe = task.universe;
    out->problem.init = task.init;
    out->problem.goal = goal;
    out->relevant_actions.assign(names.begin(), names.end());
    out->categories.clear();
    return true;
}

EvalReport eval_suite(const TaskSuite &tasks, const PredictionSet &predictions,
                      const Domain &domain, const EvalOptions &options) {
    require_known_tasks(tasks, predictions);
    EvalReport report;
    report.module = predictions.module;
    report.diagnostics = tasks.diagnostics;
    report.diagnostics.insert(report.diagnostics.end(),
                              predictions.diagnostics.begin(),
                              predictions.diagnostics.end());
    report.tasks.resize(tasks.tasks.size());
    run_indexed(tasks.tasks.size(), options.parallel, [&](size_t i) {
        const TaskRecord &task = tasks.tasks[i];
        report.tasks[i] = eval_task(task, lookup(predictions, task.id),
                                    predictions.module, domain, options, nullptr);
    });
    finalize(&report);
    return report;
}

EvalReport pipeline_eval(const TaskSuite &tasks, const PredictionSet &upstream,
                         const PredictionSet &downstream, const Domain &domain,
                         const EvalOptions &options) {
    if (upstream.module != ModuleTag::goal_interpretation)
        throw Error(ErrorCode::validation_error,
                    "pipeline upstream must be goal_interpretation");
    if (downstream.module == ModuleTag::goal_interpretation)
        throw Error(ErrorCode::validation_error,
                    "pipeline downstream must be a later module");
    require_known_tasks(tasks, upstream);
    require_known_tasks(tasks, downstream);
    EvalReport report;
    report.module = downstream.module;
    report.pipeline = true;
    report.diagnostics = tasks.diagnostics;
    for (const auto *set : {&upstream, &downstream})
        report.diagnostics.insert(report.diagnostics.end(),
                                  set->diagnostics.begin(),
                                  set->diagnostics.end());
    report.tasks.resize(tasks.tasks.size());
    run_indexed(tasks.tasks.size(), options.parallel, [&](size_t i) {
        const TaskRecord &task = tasks.tasks[i];
        const PredictionRecord *up = lookup(upstream, task.id);
        const PredictionRecord *down = lookup(downstream, task.id);
        TaskResult row;
        if (task.has_scene && up) {
            TaskResult upstream_row; // collects upstream parse noise
            GoalSpec predicted = upstream_goal(*up, task, domain, &upstream_row);
            row = eval_task(task, down, downstream.module, domain, options,
                            &predicted);
            for (const auto &d : upstream_row.diagnostics)
                row.diagnostics.push_back("upstream: " + d);
            if (upstream_row.errors.count("hallucination"))
                row.diagnostics.push_back(
                    "upstream predicted goal contained hallucinated entries; "
                    "they were excluded before downstream scoring");
        } else {
            row = eval_task(task, down, downstream.module, domain, options,
                            nullptr);
            if (task.has_scene)
                row.diagnostics.push_back(
                    "no upstream goal prediction; vs_predicted metrics are zero");
            ensure_metric_keys(&row, downstream.module, true);
        }
        report.tasks[i] = std::move(row);
    });
    finalize(&report);
    return report;
}

namespace {

json report_to_json(const EvalReport &report) {
    json j;
    j["module"] = module_tag_name(report.module);
    j["pipeline"] = report.pipeline;
    json agg;
    agg["task_sr"] = report.task_sr;
    agg["execution_sr"] = report.execution_sr;
    agg["evaluated"] = report.evaluated;
    agg["total"] = report.tasks.size();
    agg["error_rates"] = report.error_rates;
    agg["metrics"] = report.metric_means;
    j["aggregates"] = std::move(agg);
    json rows = json::array();
    for (const auto &row : report.tasks) {
        json r;
        r["task_id"] = row.task_id;
        r["evaluated"] = row.evaluated;
        r["missing_prediction"] = row.missing_prediction;
        r["task_success"] = row.task_success;
        r["execution_success"] = row.execution_success;
        r["errors"] = row.errors;
        r["metrics"] = row.metrics;
        r["diagnostics"] = row.diagnostics;
        json echo = json::object();
        for (const auto &[key, value] : row.echo)
            echo[key] = json::parse(value, nullptr, false);
        r["echo"] = std::move(echo);
        rows.push_back(std::move(r));
    }
    j["tasks"] = std::move(rows);
    j["diagnostics"] = report.diagnostics;
    return j;
}

std::string format1(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.1f", value);
    return buffer;
}

} // namespace

std::string report_json(const EvalReport &report) {
    return report_to_json(report).dump(2) + "\n";
}

std::string report_csv(const EvalReport &report) {
    std::ostringstream out;
    out << "task_id,Task SR,Execution SR";
    for (const auto *column : kErrorColumns) out << "," << column;
    out << "\n";
    std::vector<double> sums(2 + kErrorClassCount, 0.0);
    int rows = 0;
    for (const auto &row : report.tasks) {
        if (!row.evaluated) continue;
        std::vector<double> values;
        values.push_back(row.task_success ? 100.0 : 0.0);
        values.push_back(row.execution_success ? 100.0 : 0.0);
        for (const auto *key : kErrorKeys)
            values.push_back(row.errors.count(key) ? 100.0 : 0.0);
        out << row.task_id;
        for (size_t i = 0; i < values.size(); ++i) {
            out << "," << format1(values[i]);
            sums[i] += values[i];
        }
        out << "\n";
        ++rows;
    }
    if (rows > 0) {
        out << "ALL";
        for (double sum : sums) out << "," << format1(round_to(sum / rows, 1));
        out << "\n";
    }
    return out.str();
}

std::string csv_from_json(const std::string &json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::parse_error, e.what());
    }
    EvalReport report;
    try {
        report.module = parse_module_tag(j.at("module").get<std::string>());
        report.pipeline = j.value("pipeline", false);
        for (const auto &r : j.at("tasks")) {
            TaskResult row;
            row.task_id = r.at("task_id").get<std::string>();
            row.evaluated = r.value("evaluated", true);
            row.missing_prediction = r.value("missing_prediction", false);
            row.task_success = r.value("task_success", false);
            row.execution_success = r.value("execution_success", false);
            for (const auto &e : r.value("errors", json::array()))
                row.errors.insert(e.get<std::string>());
            report.tasks.push_back(std::move(row));
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::parse_error,
                    std::string("not an evaluation report: ") + e.what());
    }
    finalize(&report);
    return report_csv(report);
}

SensitivityReport sensitivity_eval(const TaskSuite &tasks,
                                   const PredictionSet &predictions,
                                   const Domain &domain,
                                   const EvalOptions &options) {
    if (predictions.module != ModuleTag::transition_modeling)
        throw Error(ErrorCode::validation_error,
                    "sensitivity analysis takes transition-modeling predictions");
    require_known_tasks(tasks, predictions);
    SensitivityReport report;
    std::vector<TransitionTask> probes;
    for (const auto &task : tasks.tasks) {
        TransitionTask tt;
        std::string why_not;
        if (transition_task_for(task, domain, &tt, &why_not))
            probes.push_back(std::move(tt));
        else
            report.diagnostics.push_back("task " + task.id + ": " + why_not);
    }
    std::map<std::string, const OperatorSchema *> merged;
    for (const auto &[id, pred] : predictions.by_task) {
        for (const auto &op : pred.operators) merged[to_lower(op.name)] = &op;
        for (const auto &e : pred.parse_errors)
            report.diagnostics.push_back("task " + id +
                                         ": predicted operator block: " + e);
    }
    Domain pred_ops = domain;
    for (const auto &[name, op] : merged) pred_ops = with_operator(pred_ops, *op);
    report.rows = sensitivity(domain, pred_ops, probes, options.node_budget);
    return report;
}

namespace {

json rate_to_json(const SuccessRate &rate) {
    json j;
    j["total"] = rate.total;
    j["solved"] = rate.solved;
    j["rate"] = round_to(rate.rate(), 4);
    return j;
}

} // namespace

std::string sensitivity_json(const SensitivityReport &report) {
    json j;
    json rows = json::array();
    for (const auto &row : report.rows) {
        json r;
        r["action"] = row.action;
        r["applicable"] = row.applicable;
        r["overall"] = rate_to_json(row.overall);
        json categories = json::object();
        for (const auto &[name, rate] : row.per_category)
            categories[name] = rate_to_json(rate);
        r["per_category"] = std::move(categories);
        json per_task = json::array();
        for (const auto &[task, status] : row.per_task) {
            json t;
            t["task"] = task;
            t["status"] = plan_status_name(status);
            per_task.push_back(std::move(t));
        }
        r["per_task"] = std::move(per_task);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["diagnostics"] = report.diagnostics;
    return j.dump(2) + "\n";
}

std::string sensitivity_csv(const SensitivityReport &report) {
    std::ostringstream out;
    out << "action,applicable,solved,total,rate\n";
    for (const auto &row : report.rows) {
        out << row.action << "," << (row.applicable ? "yes" : "no") << ","
            << row.overall.solved << "," << row.overall.total << ","
            << format1(round_to(row.overall.rate() * 100.0, 1)) << "\n";
    }
    return out.str();
}

} // namespace embeval

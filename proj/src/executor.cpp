#include "executor.h"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace embeval {

namespace {

std::string trim(const std::string &s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_name_text(const std::string &s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

bool is_object_text(const std::string &s) {
    size_t dot = s.rfind('.');
    std::string head = dot == std::string::npos ? s : s.substr(0, dot);
    if (!is_name_text(head)) return false;
    if (dot == std::string::npos) return true;
    std::string digits = s.substr(dot + 1);
    if (digits.empty()) return false;
    return std::all_of(digits.begin(), digits.end(), [](unsigned char c) {
        return std::isdigit(c);
    });
}

std::string join(const std::vector<std::string> &items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

} // namespace

std::string error_class_key(ErrorClass c) {
    switch (c) {
    case ErrorClass::none: return "none";
    case ErrorClass::parsing: return "parsing";
    case ErrorClass::hallucination_action:
    case ErrorClass::hallucination_object: return "hallucination";
    case ErrorClass::arg_number: return "predicate_arg_num";
    case ErrorClass::affordance: return "affordance";
    case ErrorClass::additional_step: return "additional_step";
    case ErrorClass::missing_step: return "missing_step";
    case ErrorClass::wrong_order: return "wrong_order";
    }
    return "none";
}

std::string error_class_display(ErrorClass c) {
    switch (c) {
    case ErrorClass::none: return "NO ERROR";
    case ErrorClass::parsing: return "PARSING";
    case ErrorClass::hallucination_action:
    case ErrorClass::hallucination_object: return "HALLUCINATION";
    case ErrorClass::arg_number: return "PREDICATE ARG NUM";
    case ErrorClass::affordance: return "AFFORDANCE";
    case ErrorClass::additional_step: return "ADDITIONAL STEP";
    case ErrorClass::missing_step: return "MISSING STEP";
    case ErrorClass::wrong_order: return "WRONG ORDER";
    }
    return "NO ERROR";
}

bool parse_action_text(const std::string &raw, std::string *name,
                       std::vector<std::string> *args, std::string *reason) {
    std::string text = trim(raw);
    name->clear();
    args->clear();
    if (text.empty()) {
        *reason = "empty action text";
        return false;
    }
    size_t open = text.find('(');
    if (open == std::string::npos) {
        if (!is_name_text(text)) {
            *reason = "malformed action name '" + text + "'";
            return false;
        }
        *name = text;
        return true;
    }
    if (text.back() != ')') {
        *reason = "missing ')' in '" + text + "'";
        return false;
    }
    *name = trim(text.substr(0, open));
    if (!is_name_text(*name)) {
        *reason = "malformed action name '" + *name + "'";
        return false;
    }
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    if (inner.find('(') != std::string::npos) {
        *reason = "nested '(' in '" + text + "'";
        return false;
    }
    if (!trim(inner).empty()) {
        std::stringstream ss(inner);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            piece = trim(piece);
            if (!is_object_text(piece)) {
                *reason = "malformed argument '" + piece + "' in '" + text + "'";
                return false;
            }
            args->push_back(piece);
        }
        if (!inner.empty() && inner.back() == ',') {
            *reason = "trailing ',' in '" + text + "'";
            return false;
        }
    }
    return true;
}

namespace {

// Grammar check for one step; ErrorClass::none when clean.
PlanFinding lint_step(const std::string &raw, int index, const Domain &domain,
                      const Universe &universe) {
    PlanFinding finding;
    finding.step = index;
    std::string name;
    std::vector<std::string> args;
    std::string reason;
    if (!parse_action_text(raw, &name, &args, &reason)) {
        finding.error = ErrorClass::parsing;
        finding.message = reason;
        return finding;
    }
    const OperatorSchema *schema = domain.find(name);
    if (!schema) {
        finding.error = ErrorClass::hallucination_action;
        std::string low;
        for (char c : name)
            low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        finding.message =
            domain.unsupported_actions().count(low)
                ? "action '" + name + "' is outside the supported vocabulary"
                : "unknown action '" + name + "'";
        return finding;
    }
    for (const auto &a : args) {
        if (!universe.resolve(ObjectRef::parse(a))) {
            finding.error = ErrorClass::hallucination_object;
            finding.message = "unknown object '" + a + "'";
            return finding;
        }
    }
    if (static_cast<int>(args.size()) != schema->visible_arity()) {
        finding.error = ErrorClass::arg_number;
        finding.message = schema->name + " takes " +
                          std::to_string(schema->visible_arity()) +
                          " arguments, got " + std::to_string(args.size());
        return finding;
    }
    return finding;
}

} // namespace

std::vector<PlanFinding> lint_plan(const std::vector<std::string> &plan,
                                   const Domain &domain, const Universe &universe) {
    std::vector<PlanFinding> findings;
    for (size_t i = 0; i < plan.size(); ++i) {
        PlanFinding f = lint_step(plan[i], static_cast<int>(i), domain, universe);
        if (f.error != ErrorClass::none) findings.push_back(std::move(f));
    }
    return findings;
}

ErrorClass categorize_failure(const GroundAction &action, const WorldState &current,
                              const std::vector<WorldState> &history,
                              const Domain &domain) {
    if (!domain.is_affordable(current, action)) return ErrorClass::affordance;
    if (domain.is_effect_redundant(current, action))
        return ErrorClass::additional_step;
    if (domain.applicable(current, action))
        throw Error(ErrorCode::internal_error,
                    "categorize_failure called on an applicable action " +
                        action.str());
    for (const auto &past : history)
        if (domain.applicable(past, action)) return ErrorClass::wrong_order;
    return ErrorClass::missing_step;
}

namespace {

// Positive agent-adjacency facts missing from the best precondition branch;
// empty when anything else is unsatisfied too.
std::vector<ObjectRef> adjacency_only_targets(const Domain &domain,
                                              const WorldState &state,
                                              const GroundAction &action) {
    const auto *agent =
        state.universe().agent() ? &*state.universe().agent() : nullptr;
    if (!agent) return {};
    std::vector<ObjectRef> targets;
    for (const auto &text : domain.failed_preconditions(state, action)) {
        if (text.rfind("not ", 0) == 0) return {};
        Proposition prop;
        try {
            prop = Proposition::parse(text);
        } catch (const Error &) {
            return {};
        }
        if (prop.predicate != "next_to" || prop.args.size() != 2 ||
            prop.args[0] != *agent)
            return {};
        if (std::find(targets.begin(), targets.end(), prop.args[1]) ==
            targets.end())
            targets.push_back(prop.args[1]);
    }
    return targets;
}

GroundAction visible_form(const OperatorSchema &schema, const GroundAction &full) {
    GroundAction v;
    v.name = schema.name;
    v.args.assign(full.args.begin() + (schema.implicit_agent ? 1 : 0),
                  full.args.end());
    return v;
}

} // namespace

ExecutionTrace execute(const WorldState &initial,
                       const std::vector<std::string> &plan, const Domain &domain) {
    ExecutionTrace trace;
    trace.trajectory.states.push_back(initial);
    const Universe &universe = initial.universe();

    auto apply_step = [&](const OperatorSchema &schema, const GroundAction &full,
                          StepRecord record) {
        record.pre_state = static_cast<int>(trace.trajectory.states.size()) - 1;
        record.action = full;
        record.visible = visible_form(schema, full);
        record.parsed = true;
        record.applied = true;
        trace.trajectory.states.push_back(
            domain.apply(trace.trajectory.states.back(), full));
        trace.trajectory.actions.push_back(record.visible);
        trace.steps.push_back(std::move(record));
    };

    for (size_t i = 0; i < plan.size(); ++i) {
        StepRecord record;
        record.raw = plan[i];
        record.plan_index = static_cast<int>(i);
        record.pre_state = static_cast<int>(trace.trajectory.states.size()) - 1;

        PlanFinding grammar =
            lint_step(plan[i], static_cast<int>(i), domain, universe);
        if (grammar.error != ErrorClass::none) {
            record.error = grammar.error;
            record.message = grammar.message;
            trace.steps.push_back(std::move(record));
            trace.stop_index = static_cast<int>(i);
            trace.error = grammar.error;
            trace.error_message = grammar.message;
            return trace;
        }

        std::string name;
        std::vector<std::string> arg_texts;
        std::string reason;
        parse_action_text(plan[i], &name, &arg_texts, &reason);
        const OperatorSchema &schema = *domain.find(name);
        std::vector<ObjectRef> args;
        if (schema.implicit_agent) {
            if (!universe.agent())
                throw Error(ErrorCode::internal_error,
                            "domain expects an agent but the universe has none");
            args.push_back(*universe.agent());
        }
        for (const auto &a : arg_texts) args.push_back(ObjectRef::parse(a));
        GroundAction full;
        try {
            full = domain.make_ground(schema, args, universe);
        } catch (const Error &e) {
            record.error = ErrorClass::parsing;
            record.message = e.what();
            trace.steps.push_back(std::move(record));
            trace.stop_index = static_cast<int>(i);
            trace.error = ErrorClass::parsing;
            trace.error_message = record.message;
            return trace;
        }
        record.parsed = true;
        record.action = full;
        record.visible = visible_form(schema, full);

        const WorldState *current = &trace.trajectory.states.back();
        bool failed = !domain.applicable(*current, full) ||
                      domain.is_effect_redundant(*current, full);
        if (failed && domain.auto_navigation() &&
            domain.is_affordable(*current, full) &&
            !domain.is_effect_redundant(*current, full)) {
            // Only adjacency missing?  Walk there first, then retry the step.
            auto targets = adjacency_only_targets(domain, *current, full);
            if (!targets.empty()) {
                const OperatorSchema *nav = domain.find(domain.nav_schema());
                bool ok = nav != nullptr;
                for (const auto &target : targets) {
                    if (!ok) break;
                    std::vector<ObjectRef> nav_args;
                    if (nav->implicit_agent) nav_args.push_back(*universe.agent());
                    nav_args.push_back(target);
                    GroundAction move;
                    try {
                        move = domain.make_ground(*nav, nav_args, universe);
                    } catch (const Error &) {
                        ok = false;
                        break;
                    }
                    if (!domain.applicable(trace.trajectory.states.back(), move)) {
                        ok = false;
                        break;
                    }
                    StepRecord inserted;
                    inserted.raw = visible_form(*nav, move).str();
                    inserted.inserted = true;
                    apply_step(*nav, move, std::move(inserted));
                }
                current = &trace.trajectory.states.back();
                failed = !domain.applicable(*current, full) ||
                         domain.is_effect_redundant(*current, full);
            }
        }

        if (failed) {
            record.pre_state = static_cast<int>(trace.trajectory.states.size()) - 1;
            ErrorClass cls = categorize_failure(full, *current,
                                                trace.trajectory.states, domain);
            record.error = cls;
            record.message = error_class_display(cls) + " at " + record.visible.str();
            trace.steps.push_back(record);
            trace.stop_index = static_cast<int>(i);
            trace.error = cls;
            trace.error_message = record.message;
            return trace;
        }
        apply_step(schema, full, std::move(record));
    }
    trace.completed = true;
    return trace;
}

std::string feedback_message(const ExecutionTrace &trace, const GoalFeedback &goals,
                             int retry_count) {
    if (trace.completed && goals.all_satisfied()) return "";
    std::vector<std::string> plan_texts;
    for (const auto &step : trace.steps)
        if (!step.inserted) plan_texts.push_back(step.raw);
    std::string actions = "[" + join(plan_texts) + "]";
    std::ostringstream out;
    out << "At the " << retry_count
        << " retry, LLM predict the action sequence to be " << actions << ". ";
    if (!trace.completed) {
        std::string action = trace.stop_index >= 0 &&
                                     !trace.steps.empty() &&
                                     trace.steps.back().parsed
                                 ? trace.steps.back().visible.str()
                                 : trace.steps.back().raw;
        out << "Action " << action << " is not executable in the action sequence "
            << actions << ". It encounters an error: "
            << error_class_display(trace.error) << ".";
        if (trace.error == ErrorClass::missing_step)
            out << " Missing step means that action " << action
                << " needs some other necessary action before its execution.";
    } else {
        out << "Action sequence " << actions
            << " does not satisfy all the goals. Please check the action sequence "
               "and try again. Specifically, the following goals are not "
               "satisfied: Node goals not satisfied: ["
            << join(goals.node_goals) << "] Edge goals not satisfied: ["
            << join(goals.edge_goals) << "] Action goals not satisfied: ["
            << join(goals.action_goals) << "]";
    }
    return out.str();
}

} // namespace embeval

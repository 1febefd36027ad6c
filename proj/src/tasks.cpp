#include "tasks.h"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

namespace embeval {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    for (auto &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool all_digits(const std::string &s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

// "[WALK] <home_office> (319)" -> ("WALK", {("home_office","319")})
bool scan_bracket(const std::string &line, std::string *name,
                  std::vector<std::pair<std::string, std::string>> *pairs) {
    size_t i = 0, n = line.size();
    auto skip_ws = [&] {
        while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    };
    skip_ws();
    if (i >= n || line[i] != '[') return false;
    size_t close = line.find(']', i);
    if (close == std::string::npos) return false;
    *name = trim(line.substr(i + 1, close - i - 1));
    if (name->empty()) return false;
    i = close + 1;
    pairs->clear();
    for (;;) {
        skip_ws();
        if (i >= n) break;
        if (line[i] != '<') return false;
        size_t gt = line.find('>', i);
        if (gt == std::string::npos) return false;
        std::string obj = trim(line.substr(i + 1, gt - i - 1));
        i = gt + 1;
        skip_ws();
        if (i >= n || line[i] != '(') return false;
        size_t rp = line.find(')', i);
        if (rp == std::string::npos) return false;
        std::string id = trim(line.substr(i + 1, rp - i - 1));
        i = rp + 1;
        if (obj.empty() || !all_digits(id)) return false;
        pairs->emplace_back(obj, id);
    }
    return true;
}

// Object ids of structured goal records resolve to categories through, in
// order: the scene fixture, node goals naming both id and class, trajectory
// mentions, then the record's declared alias table.  First source wins.
struct IdResolver {
    std::map<int, std::string> categories;

    void teach(int id, const std::string &category) {
        if (id >= 0 && !category.empty()) categories.emplace(id, category);
    }
    const std::string *find(int id) const {
        auto it = categories.find(id);
        return it == categories.end() ? nullptr : &it->second;
    }
};

void split_literal(const std::string &pred_in, bool *positive, std::string *pred) {
    *pred = pred_in;
    if (pred->rfind("not_", 0) == 0) {
        *positive = !*positive;
        *pred = pred->substr(4);
    }
}

void parse_scene(const json &scene, TaskRecord *task) {
    auto universe = std::make_shared<Universe>();
    for (const auto &obj : scene.value("objects", json::array())) {
        if (!obj.is_object() || !obj.contains("name"))
            throw Error(ErrorCode::parse_error, "scene object without a name");
        std::set<std::string> tags;
        for (const auto &tag : obj.value("tags", json::array()))
            tags.insert(tag.get<std::string>());
        universe->add_object(
            ObjectRef(obj["name"].get<std::string>(), obj.value("id", 0)), tags);
    }
    if (scene.contains("agent")) {
        universe->set_agent(ObjectRef::parse(scene["agent"].get<std::string>()));
    } else {
        std::vector<ObjectRef> candidates;
        for (const auto &ref : universe->objects())
            if (ref.category == "character" || ref.category == "agent")
                candidates.push_back(ref);
        if (candidates.size() == 1)
            universe->set_agent(candidates[0]);
        else
            task->diagnostics.push_back("scene declares no agent");
    }
    std::vector<Proposition> facts;
    for (const auto &lit : scene.value("init", json::array()))
        facts.push_back(Proposition::parse(lit.get<std::string>()));
    task->universe = universe;
    task->init = WorldState(universe, std::move(facts));
    task->has_scene = true;
}

// Structured goal arrays: node entries {id, class_name, state} and relation
// entries {from_id, relation_type, to_id}; entries whose ids cannot be
// resolved are reported in diagnostics and dropped rather than guessed.
GoalSpec build_structured_goal(const json &vg, const IdResolver &ids,
                               TaskRecord *task) {
    GoalSpec spec;
    std::vector<GoalPtr> lits;
    for (const auto &g : vg.value("goal", json::array())) {
        if (g.contains("state")) {
            int id = g.value("id", -1);
            std::string cls = g.value("class_name", "");
            std::string state = lower(g.value("state", ""));
            if (state.empty() || id < 0) {
                task->diagnostics.push_back("malformed node goal entry: " + g.dump());
                continue;
            }
            if (cls.empty()) {
                const std::string *known = ids.find(id);
                if (!known) {
                    task->diagnostics.push_back(
                        "node goal " + state + "(" + std::to_string(id) +
                        "): object id unresolved; literal dropped");
                    continue;
                }
                cls = *known;
            }
            bool positive = true;
            split_literal(state, &positive, &state);
            lits.push_back(GoalNode::lit(
                state, {Term::make_obj(ObjectRef(cls, id))}, positive));
        } else if (g.contains("relation_type")) {
            int from = g.value("from_id", -1), to = g.value("to_id", -1);
            std::string rel =
                normalize_relation_name(g.value("relation_type", ""));
            if (rel.empty() || from < 0 || to < 0) {
                task->diagnostics.push_back("malformed relation goal entry: " +
                                            g.dump());
                continue;
            }
            const std::string *from_cat = ids.find(from);
            const std::string *to_cat = ids.find(to);
            if (!from_cat || !to_cat) {
                int missing = !from_cat ? from : to;
                task->diagnostics.push_back(
                    "goal relation " + rel + "(" + std::to_string(from) + ", " +
                    std::to_string(to) + "): object id " +
                    std::to_string(missing) + " unresolved; literal dropped");
                continue;
            }
            bool positive = true;
            split_literal(rel, &positive, &rel);
            lits.push_back(GoalNode::lit(rel,
                                         {Term::make_obj(ObjectRef(*from_cat, from)),
                                          Term::make_obj(ObjectRef(*to_cat, to))},
                                         positive));
        } else {
            task->diagnostics.push_back("unknown goal entry: " + g.dump());
        }
    }
    if (lits.size() == 1)
        spec.condition = lits[0];
    else if (!lits.empty())
        spec.condition = GoalNode::conj(std::move(lits));
    for (const auto &a : vg.value("actions", json::array())) {
        ActionGoal goal;
        std::string text = lower(a.get<std::string>());
        size_t start = 0;
        while (start <= text.size()) {
            size_t bar = text.find('|', start);
            std::string name = trim(text.substr(
                start, bar == std::string::npos ? std::string::npos : bar - start));
            if (!name.empty()) goal.names.push_back(name);
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        if (!goal.names.empty()) spec.actions.push_back(std::move(goal));
    }
    return spec;
}

GoalSpec parse_goal_text(const std::string &text, const Domain &domain) {
    std::string temporal_reason;
    try {
        ltl::FormulaPtr formula = ltl::parse(text);
        ltl::validate(formula);
        return goal_spec_from_ltl(*formula, domain.vocabulary());
    } catch (const Error &e) {
        temporal_reason = e.what();
    }
    try {
        return parse_goal_sexpr(text);
    } catch (const Error &e) {
        throw Error(ErrorCode::parse_error,
                    "goal parses neither as a temporal goal (" + temporal_reason +
                        ") nor as a goal s-expression (" + e.what() + ")");
    }
}

// One trajectory entry in any accepted shape -> canonical action text.
std::string normalize_step(const json &step, IdResolver *ids,
                           TaskRecord *task) {
    if (step.is_string()) {
        const std::string line = step.get<std::string>();
        std::string name;
        std::vector<std::pair<std::string, std::string>> pairs;
        if (scan_bracket(line, &name, &pairs)) {
            std::string out = name + "(";
            for (size_t i = 0; i < pairs.size(); ++i) {
                if (i) out += ", ";
                out += pairs[i].first + "." + pairs[i].second;
                if (ids) ids->teach(std::stoi(pairs[i].second), pairs[i].first);
            }
            return out + ")";
        }
        if (trim(line).rfind('[', 0) == 0 && task)
            task->diagnostics.push_back("unparsable bracketed step kept verbatim: " +
                                        line);
        return line;
    }
    if (step.is_object()) {
        std::string out = step.value("action", "") + "(";
        bool first = true;
        for (const char *key : {"object", "object2"}) {
            if (!step.contains(key)) continue;
            if (!first) out += ", ";
            out += normalize_object_token(step[key].get<std::string>());
            first = false;
        }
        return out + ")";
    }
    throw Error(ErrorCode::parse_error, "trajectory entry is neither text nor an object");
}

TaskRecord parse_task_record(const std::string &id, const json &rec,
                             const Domain &domain) {
    TaskRecord task;
    task.id = id;
    std::set<std::string> consumed;
    auto take_string = [&](const char *key) -> std::string {
        if (rec.contains(key) && rec[key].is_string()) {
            consumed.insert(key);
            return rec[key].get<std::string>();
        }
        return "";
    };

    task.task_name = take_string("task_name");
    task.description = take_string("natural_language_description");
    if (task.description.empty()) task.description = take_string("natural_description");
    if (task.description.empty()) task.description = take_string("description");

    IdResolver ids;
    if (rec.contains("scene") && rec["scene"].is_object()) {
        consumed.insert("scene");
        parse_scene(rec["scene"], &task);
        for (const auto &ref : task.universe->objects())
            ids.teach(ref.instance_id, ref.category);
    }

    // Node goals teach id -> class pairs before relations are resolved.
    const char *goal_key = rec.contains("vh_goal") ? "vh_goal" : nullptr;
    if (goal_key) {
        consumed.insert(goal_key);
        for (const auto &g : rec[goal_key].value("goal", json::array()))
            if (g.is_object() && g.contains("state"))
                ids.teach(g.value("id", -1), g.value("class_name", ""));
    }

    const char *traj_key = rec.contains("action_trajectory") ? "action_trajectory"
                           : rec.contains("trajectory")      ? "trajectory"
                                                             : nullptr;
    if (traj_key) {
        consumed.insert(traj_key);
        for (const auto &step : rec[traj_key])
            task.trajectory.push_back(normalize_step(step, &ids, &task));
    }

    if (rec.contains("id_aliases") && rec["id_aliases"].is_object()) {
        consumed.insert("id_aliases");
        for (const auto &[key, value] : rec["id_aliases"].items())
            if (all_digits(key) && value.is_string())
                ids.teach(std::stoi(key), value.get<std::string>());
    }

    task.tl_goal = take_string("tl_goal");
    task.raw_goal = take_string("raw_bddl_goal");
    if (goal_key) {
        task.raw_goal = rec[goal_key].dump();
        task.goal = build_structured_goal(rec[goal_key], ids, &task);
    } else if (!task.tl_goal.empty()) {
        task.goal = parse_goal_text(task.tl_goal, domain);
    } else {
        task.diagnostics.push_back("record carries no goal");
    }

    task.transition_model = take_string("transition_model");
    if (!task.transition_model.empty()) {
        try {
            task.gt_operators =
                parse_action_blocks(task.transition_model, &task.diagnostics);
        } catch (const Error &e) {
            task.diagnostics.push_back(std::string("transition model: ") + e.what());
        }
    }

    for (const auto &[key, value] : rec.items())
        if (!consumed.count(key)) task.extra[key] = value.dump();
    return task;
}

json parse_json_text(const std::string &text) {
    try {
        return json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::parse_error, e.what());
    }
}

} // namespace

const TaskRecord *TaskSuite::find(const std::string &id) const {
    auto it = std::lower_bound(
        tasks.begin(), tasks.end(), id,
        [](const TaskRecord &t, const std::string &key) { return t.id < key; });
    return it != tasks.end() && it->id == id ? &*it : nullptr;
}

TaskSuite load_tasks(const std::string &json_text, const Domain &domain) {
    json root = parse_json_text(json_text);
    TaskSuite suite;
    auto add_record = [&](const std::string &id, const json &rec) {
        if (!rec.is_object())
            throw Error(ErrorCode::parse_error, "task " + id + ": record is not an object");
        try {
            suite.tasks.push_back(parse_task_record(id, rec, domain));
        } catch (const Error &e) {
            throw Error(e.code(), "task " + id + ": " + e.what());
        } catch (const std::exception &e) {
            throw Error(ErrorCode::parse_error, "task " + id + ": " + e.what());
        }
    };
    if (root.is_object()) {
        for (const auto &[key, value] : root.items()) add_record(key, value);
    } else if (root.is_array()) {
        for (const auto &rec : root) {
            if (!rec.is_object())
                throw Error(ErrorCode::parse_error, "task array entry is not an object");
            std::string id = rec.value("id", rec.value("task_id", ""));
            if (id.empty())
                throw Error(ErrorCode::validation_error,
                            "task array entry without an id");
            add_record(id, rec);
        }
    } else {
        throw Error(ErrorCode::parse_error, "task file must be a JSON object or array");
    }
    std::sort(suite.tasks.begin(), suite.tasks.end(),
              [](const TaskRecord &a, const TaskRecord &b) { return a.id < b.id; });
    for (size_t i = 1; i < suite.tasks.size(); ++i)
        if (suite.tasks[i].id == suite.tasks[i - 1].id)
            throw Error(ErrorCode::validation_error,
                        "duplicate task id " + suite.tasks[i].id);
    return suite;
}

const char *module_tag_name(ModuleTag tag) {
    switch (tag) {
    case ModuleTag::goal_interpretation: return "goal_interpretation";
    case ModuleTag::action_sequencing: return "action_sequencing";
    case ModuleTag::subgoal_decomposition: return "subgoal_decomposition";
    case ModuleTag::transition_modeling: return "transition_modeling";
    }
    return "?";
}

ModuleTag parse_module_tag(const std::string &text) {
    std::string t = lower(trim(text));
    std::replace(t.begin(), t.end(), '-', '_');
    if (t == "goal_interpretation" || t == "goal_interp" || t == "goal")
        return ModuleTag::goal_interpretation;
    if (t == "action_sequencing" || t == "action_seq" || t == "actions")
        return ModuleTag::action_sequencing;
    if (t == "subgoal_decomposition" || t == "subgoal")
        return ModuleTag::subgoal_decomposition;
    if (t == "transition_modeling" || t == "transition" || t == "tmodel")
        return ModuleTag::transition_modeling;
    throw Error(ErrorCode::validation_error, "unknown module tag: " + text);
}

namespace {

PredictionRecord parse_prediction_record(const std::string &id, const json &rec,
                                         ModuleTag module,
                                         std::vector<std::string> *diagnostics) {
    PredictionRecord p;
    p.task_id = id;
    p.module = module;
    std::set<std::string> consumed{"task_id", "id"};
    if (rec.contains("module")) {
        consumed.insert("module");
        ModuleTag declared = parse_module_tag(rec["module"].get<std::string>());
        if (declared != module)
            throw Error(ErrorCode::validation_error,
                        "prediction for task " + id + " is tagged " +
                            module_tag_name(declared) + ", expected " +
                            module_tag_name(module));
    }
    auto string_list = [&](const char *key, std::vector<std::string> *out) {
        if (!rec.contains(key)) return false;
        consumed.insert(key);
        for (const auto &item : rec[key]) out->push_back(item.get<std::string>());
        return true;
    };
    switch (module) {
    case ModuleTag::goal_interpretation:
        string_list("literals", &p.literals);
        string_list("actions", &p.action_goals);
        break;
    case ModuleTag::action_sequencing: {
        const char *key = rec.contains("trajectory")          ? "trajectory"
                          : rec.contains("action_trajectory") ? "action_trajectory"
                                                              : nullptr;
        if (key) {
            consumed.insert(key);
            for (const auto &step : rec[key])
                p.trajectory.push_back(normalize_step(step, nullptr, nullptr));
        }
        break;
    }
    case ModuleTag::subgoal_decomposition:
        if (!string_list("subgoals", &p.subgoals) && rec.contains("ltl")) {
            consumed.insert("ltl");
            p.subgoals.push_back(rec["ltl"].get<std::string>());
        }
        break;
    case ModuleTag::transition_modeling: {
        std::vector<std::string> blocks;
        if (!string_list("operators", &blocks) && rec.contains("pddl")) {
            consumed.insert("pddl");
            blocks.push_back(rec["pddl"].get<std::string>());
        }
        for (const auto &block : blocks) {
            p.operator_blocks.push_back(block);
            try {
                std::vector<std::string> notes;
                auto parsed = parse_action_blocks(block, &notes);
                p.operators.insert(p.operators.end(), parsed.begin(), parsed.end());
                if (diagnostics)
                    diagnostics->insert(diagnostics->end(), notes.begin(), notes.end());
            } catch (const Error &e) {
                p.parse_errors.push_back(e.what());
            }
        }
        break;
    }
    }
    for (const auto &[key, value] : rec.items())
        if (!consumed.count(key)) p.extra[key] = value.dump();
    return p;
}

} // namespace

PredictionSet load_predictions(const std::string &json_text, ModuleTag module) {
    json root = parse_json_text(json_text);
    PredictionSet set;
    set.module = module;
    auto add = [&](const std::string &id, const json &rec) {
        if (!rec.is_object())
            throw Error(ErrorCode::parse_error,
                        "prediction for task " + id + " is not an object");
        try {
            PredictionRecord p =
                parse_prediction_record(id, rec, module, &set.diagnostics);
            if (set.by_task.count(p.task_id))
                set.diagnostics.push_back("duplicate prediction for task " +
                                          p.task_id + "; the later record wins");
            set.by_task[p.task_id] = std::move(p);
        } catch (const json::exception &e) {
            throw Error(ErrorCode::parse_error,
                        "prediction for task " + id + ": " + e.what());
        }
    };
    if (root.is_object() && root.contains("predictions"))
        root = root["predictions"];
    if (root.is_array()) {
        for (const auto &rec : root) {
            std::string id;
            if (rec.is_object())
                id = rec.value("task_id", rec.value("id", ""));
            if (id.empty())
                throw Error(ErrorCode::validation_error,
                            "prediction record without a task_id");
            add(id, rec);
        }
    } else if (root.is_object()) {
        for (const auto &[key, value] : root.items()) add(key, value);
    } else {
        throw Error(ErrorCode::parse_error,
                    "prediction file must be a JSON array or object");
    }
    return set;
}

bool try_normalize_bracket_step(const std::string &line, std::string *out) {
    std::string name;
    std::vector<std::pair<std::string, std::string>> pairs;
    if (!scan_bracket(line, &name, &pairs)) return false;
    std::string text = name + "(";
    for (size_t i = 0; i < pairs.size(); ++i) {
        if (i) text += ", ";
        text += pairs[i].first + "." + pairs[i].second;
    }
    *out = text + ")";
    return true;
}

std::string normalize_object_token(const std::string &token) {
    std::string t = trim(token);
    // WordNet-style "<cat>.<pos>.<sense>_<instance>"; instances are 1-based.
    for (size_t i = 0; i + 2 < t.size(); ++i) {
        if (t[i] != '.' || !std::isalpha(static_cast<unsigned char>(t[i + 1])) ||
            t[i + 2] != '.')
            continue;
        std::string cat = t.substr(0, i);
        std::string rest = t.substr(i + 3);
        if (cat.empty()) break;
        size_t us = rest.find('_');
        if (us == std::string::npos) {
            if (all_digits(rest)) return cat;
            break;
        }
        std::string sense = rest.substr(0, us), instance = rest.substr(us + 1);
        if (all_digits(sense) && all_digits(instance)) {
            long k = std::stol(instance);
            return cat + "." + std::to_string(k > 0 ? k - 1 : 0);
        }
        break;
    }
    size_t us = t.rfind('_');
    if (us != std::string::npos && us > 0 && us + 1 < t.size()) {
        std::string suffix = t.substr(us + 1);
        if (all_digits(suffix)) return t.substr(0, us) + "." + suffix;
    }
    return t;
}

std::string normalize_relation_name(const std::string &name) {
    std::string t = lower(trim(name));
    if (t == "on") return "ontop";
    if (t == "close") return "next_to";
    return t;
}

bool parse_literal_text(const std::string &text, GoalLiteral *out,
                        std::string *reason) {
    std::string t = trim(text);
    bool positive = true;
    if (lower(t).rfind("not ", 0) == 0) {
        positive = false;
        t = trim(t.substr(4));
    } else if (!t.empty() && t[0] == '!') {
        positive = false;
        t = trim(t.substr(1));
    }
    size_t open = t.find('(');
    if (open == std::string::npos || open == 0 || t.back() != ')') {
        if (reason) *reason = "malformed literal: " + text;
        return false;
    }
    std::string pred = lower(trim(t.substr(0, open)));
    split_literal(pred, &positive, &pred);
    std::vector<ObjectRef> args;
    std::string inner = t.substr(open + 1, t.size() - open - 2);
    std::string current;
    auto flush = [&]() -> bool {
        std::string token = trim(current);
        current.clear();
        if (token.empty()) return true;
        try {
            args.push_back(ObjectRef::parse(normalize_object_token(token)));
        } catch (const Error &e) {
            if (reason) *reason = e.what();
            return false;
        }
        return true;
    };
    for (char c : inner) {
        if (c == ',') {
            if (!flush()) return false;
        } else {
            current += c;
        }
    }
    if (!flush()) return false;
    out->prop = Proposition(pred, std::move(args));
    out->positive = positive;
    return true;
}

namespace {

bool flatten_goal(const GoalPtr &node, std::vector<CondPtr> *out) {
    if (!node) return true;
    switch (node->kind) {
    case GKind::lit: {
        for (const auto &term : node->args)
            if (term.is_var) return false;
        std::vector<Term> args = node->args;
        out->push_back(Condition::lit(node->pred, std::move(args), node->positive));
        return true;
    }
    case GKind::and_:
        for (const auto &child : node->children)
            if (!flatten_goal(child, out)) return false;
        return true;
    default:
        return false;
    }
}

} // namespace

CondPtr goal_condition(const GoalSpec &spec) {
    if (!spec.condition) return nullptr;
    std::vector<CondPtr> lits;
    if (!flatten_goal(spec.condition, &lits) || lits.empty()) return nullptr;
    return Condition::conj(std::move(lits));
}

} // namespace embeval

#ifndef EMBEVAL_TASKS_H
#define EMBEVAL_TASKS_H

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "goals.h"
#include "pddl.h"

namespace embeval {

// One benchmark task normalized from a suite JSON file.  Both record styles
// are accepted: structured goal records with bracketed trajectory lines, and
// BDDL-flavoured records whose trajectory entries are {action, object} pairs.
struct TaskRecord {
    std::string id;
    std::string task_name;
    std::string description;
    std::string tl_goal;  // goal text as found in the record ("" if absent)
    std::string raw_goal; // raw BDDL goal / serialized structured goal
    GoalSpec goal;
    std::vector<std::string> trajectory; // canonical "NAME(cat.id, ...)" lines
    std::string transition_model;        // PDDL text, "" when absent
    std::vector<OperatorSchema> gt_operators; // parsed from transition_model
    bool has_scene = false;
    std::shared_ptr<Universe> universe; // null without a scene fixture
    WorldState init;
    std::vector<std::string> diagnostics;
    std::map<std::string, std::string> extra; // unknown fields -> JSON text
};

struct TaskSuite {
    std::vector<TaskRecord> tasks; // sorted by id
    std::vector<std::string> diagnostics;

    const TaskRecord *find(const std::string &id) const;
};

// Loads a suite from JSON: either an object keyed by task id or an array of
// records carrying an "id"/"task_id" field.  The domain supplies the
// vocabulary used to parse temporal goal texts.  Throws Error(parse_error /
// validation_error) on malformed files; per-record oddities that do not make
// the record unusable land in its diagnostics.
TaskSuite load_tasks(const std::string &json_text, const Domain &domain);

// ----------------------------------------------------------- predictions

enum class ModuleTag {
    goal_interpretation,
    action_sequencing,
    subgoal_decomposition,
    transition_modeling,
};

const char *module_tag_name(ModuleTag tag);
// Accepts canonical names and the CLI spellings (goal-interp, action-seq,
// subgoal, transition); throws Error(validation_error) otherwise.
ModuleTag parse_module_tag(const std::string &text);

// One model output for one task.  Only the fields for the record's module are
// populated.  Malformed payload pieces are kept in text form with the parse
// failure recorded, so they can be scored as model errors rather than
// rejected as input errors.
struct PredictionRecord {
    std::string task_id;
    ModuleTag module = ModuleTag::goal_interpretation;
    // goal interpretation
    std::vector<std::string> literals; // "ontop(a.1, b.2)", "not dusty(x.0)"
    std::vector<std::string> action_goals; // "lookat|watch"
    // action sequencing
    std::vector<std::string> trajectory; // canonical action lines
    // subgoal decomposition
    std::vector<std::string> subgoals; // then-free segment texts
    // transition modeling
    std::vector<std::string> operator_blocks; // raw (:action ...) texts
    std::vector<OperatorSchema> operators;    // successfully parsed blocks
    std::vector<std::string> parse_errors;    // one entry per failed block
    std::map<std::string, std::string> extra;
};

struct PredictionSet {
    ModuleTag module = ModuleTag::goal_interpretation;
    std::map<std::string, PredictionRecord> by_task;
    std::vector<std::string> diagnostics;
};

// Loads a JSON array (or {"predictions": [...]} wrapper) of records for one
// module.  A record naming a different module is an input error; a record
// without a module tag inherits `module`.
PredictionSet load_predictions(const std::string &json_text, ModuleTag module);

// --------------------------------------------------- normalization helpers

// "[WALK] <home_office> (319)" -> "WALK(home_office.319)"; multi-object lines
// append further "<name> (id)" pairs as extra arguments.  Returns false when
// the line does not scan as a bracketed step.
bool try_normalize_bracket_step(const std::string &line, std::string *out);

// "bottom_cabinet_no_top_80" -> "bottom_cabinet_no_top.80";
// "highchair.n.01_1" -> "highchair.0" (synset instances are 1-based);
// already-canonical or bare tokens pass through unchanged.
std::string normalize_object_token(const std::string &token);

// Relation names of structured goal records: ON -> ontop, CLOSE -> next_to,
// anything else lower-cased.
std::string normalize_relation_name(const std::string &name);

// Splits "pred(a.1, b.2)" / "not pred(...)" into a ground goal literal; bare
// argument tokens become id-less references.  Returns false with a reason on
// malformed text.
bool parse_literal_text(const std::string &text, GoalLiteral *out,
                        std::string *reason);

// Flattens a conjunctive ground goal into a planner-usable condition; returns
// null when the goal needs quantifiers, disjunction, or has no state part.
CondPtr goal_condition(const GoalSpec &spec);

} // namespace embeval

#endif

#include "domain.h"

#include <algorithm>
#include <sstream>

namespace embeval {

namespace {

std::string normalize_name(const std::string &name) {
    std::string out;
    for (char c : name)
        if (isalnum(static_cast<unsigned char>(c)))
            out += static_cast<char>(tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

void Domain::add_predicate(const std::string &name, int arity) {
    auto it = predicates_.find(name);
    if (it != predicates_.end() && it->second != arity)
        throw Error(ErrorCode::vocabulary_error,
                    "predicate " + name + " redeclared with different arity");
    predicates_[name] = arity;
}

void Domain::add_schema(OperatorSchema schema) {
    schema.name = to_lower(schema.name);
    std::string key = normalize_name(schema.name);
    if (lookup_.count(key))
        throw Error(ErrorCode::validation_error, "duplicate action " + schema.name);
    validate_effect(schema.effect);
    lookup_[key] = schemas_.size();
    schemas_.push_back(std::move(schema));
    finalized_ = false;
}

void Domain::add_alias(const std::string &alias, const std::string &schema_name) {
    std::string target = normalize_name(schema_name);
    auto it = lookup_.find(target);
    if (it == lookup_.end())
        throw Error(ErrorCode::unknown_action, "alias target " + schema_name);
    lookup_[normalize_name(alias)] = it->second;
}

void Domain::set_auto_navigation(const std::string &nav_schema) {
    nav_schema_ = to_lower(nav_schema);
}

void Domain::finalize() {
    std::set<std::string> dynamic;
    for (const auto &schema : schemas_) {
        std::set<std::string> used;
        collect_predicates(schema.precondition, &used);
        collect_predicates(schema.effect, &used);
        for (const auto &pred : used) {
            if (pred == "=" || pred == "interactable" || pred == "graspable" ||
                pred == "size_lt")
                continue;
            if (!predicates_.count(pred) && !property_tags_.count(pred))
                throw Error(ErrorCode::vocabulary_error,
                            "undeclared predicate " + pred + " in action " +
                                schema.name);
        }
        collect_predicates(schema.effect, &dynamic, /*assertions_only=*/true);
    }
    static_preds_ = {"=", "graspable", "size_lt"};
    for (const auto &[pred, arity] : predicates_) {
        (void)arity;
        if (!dynamic.count(pred) && pred != "interactable")
            static_preds_.insert(pred);
    }
    for (const auto &tag : property_tags_) static_preds_.insert(tag);
    finalized_ = true;
}

const OperatorSchema *Domain::find(const std::string &raw_name) const {
    auto it = lookup_.find(normalize_name(raw_name));
    if (it == lookup_.end()) return nullptr;
    return &schemas_[it->second];
}

const OperatorSchema *Domain::require(const std::string &raw_name) const {
    const OperatorSchema *schema = find(raw_name);
    if (!schema)
        throw Error(ErrorCode::unknown_action, raw_name);
    return schema;
}

Vocabulary Domain::vocabulary() const {
    Vocabulary v;
    v.predicates = predicates_;
    for (const auto &tag : property_tags_) v.predicates.emplace(tag, 1);
    for (const auto &schema : schemas_) {
        std::string upper = schema.name;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        v.actions[upper] = schema.visible_arity();
    }
    return v;
}

GroundAction Domain::make_ground(const OperatorSchema &schema,
                                 const std::vector<ObjectRef> &args,
                                 const Universe &universe) const {
    if (args.size() != schema.params.size())
        throw Error(ErrorCode::binding_error,
                    schema.name + " takes " + std::to_string(schema.params.size()) +
                        " arguments, got " + std::to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i) {
        auto resolved = universe.resolve(args[i]);
        if (!resolved)
            throw Error(ErrorCode::binding_error,
                        args[i].str() + " is not in the universe");
        if (!type_matches(universe, *resolved, schema.params[i].type))
            throw Error(ErrorCode::binding_error,
                        resolved->str() + " does not match type " +
                            schema.params[i].type + " of ?" + schema.params[i].name);
    }
    GroundAction action;
    action.name = schema.name;
    for (const auto &arg : args) action.args.push_back(*universe.resolve(arg));
    return action;
}

Binding Domain::binding_for(const OperatorSchema &schema,
                            const GroundAction &action) const {
    if (action.args.size() != schema.params.size())
        throw Error(ErrorCode::binding_error,
                    action.str() + " does not match the parameter list of " +
                        schema.name);
    Binding binding;
    for (size_t i = 0; i < schema.params.size(); ++i)
        binding[schema.params[i].name] = action.args[i];
    return binding;
}

std::tuple<GroundAction, CondPtr, CondPtr>
Domain::ground(const OperatorSchema &schema, const Binding &binding,
               const Universe &universe) const {
    std::vector<ObjectRef> args;
    for (const auto &param : schema.params) {
        auto it = binding.find(param.name);
        if (it == binding.end())
            throw Error(ErrorCode::binding_error,
                        "binding misses parameter ?" + param.name + " of " +
                            schema.name);
        args.push_back(it->second);
    }
    GroundAction action = make_ground(schema, args, universe);
    return {action, substitute(schema.precondition, binding),
            substitute(schema.effect, binding)};
}

const OperatorSchema &Domain::schema_of(const GroundAction &action) const {
    const OperatorSchema *schema = find(action.name);
    if (!schema) throw Error(ErrorCode::unknown_action, action.name);
    return *schema;
}

bool Domain::applicable(const WorldState &state, const GroundAction &action) const {
    const OperatorSchema &schema = schema_of(action);
    return eval_condition(schema.precondition, state, binding_for(schema, action));
}

std::pair<std::vector<Proposition>, std::vector<Proposition>>
Domain::effect_delta(const WorldState &state, const GroundAction &action) const {
    const OperatorSchema &schema = schema_of(action);
    std::vector<Proposition> add, del;
    collect_effects(schema.effect, state, binding_for(schema, action), &add, &del);
    std::sort(add.begin(), add.end());
    add.erase(std::unique(add.begin(), add.end()), add.end());
    std::sort(del.begin(), del.end());
    del.erase(std::unique(del.begin(), del.end()), del.end());
    // adds win over deletes
    std::vector<Proposition> del_final;
    std::set_difference(del.begin(), del.end(), add.begin(), add.end(),
                        std::back_inserter(del_final));
    return {add, del_final};
}

WorldState Domain::apply(const WorldState &state, const GroundAction &action) const {
    const OperatorSchema &schema = schema_of(action);
    Binding binding = binding_for(schema, action);
    if (!eval_condition(schema.precondition, state, binding)) {
        auto failed = diagnose(schema.precondition, state, binding);
        std::ostringstream msg;
        msg << action.str() << " precondition unsatisfied:";
        for (const auto &f : failed) msg << " " << f << ";";
        throw Error(ErrorCode::precondition_violated, msg.str());
    }
    auto [add, del] = effect_delta(state, action);
    return state.with_delta(add, del);
}

bool Domain::is_affordable(const WorldState &state, const GroundAction &action) const {
    if (!finalized_)
        throw Error(ErrorCode::internal_error, "domain not finalized");
    const OperatorSchema &schema = schema_of(action);
    CondPtr view = affordance_view(schema.precondition, static_preds_);
    return eval_condition(view, state, binding_for(schema, action));
}

bool Domain::is_effect_redundant(const WorldState &state,
                                 const GroundAction &action) const {
    auto [add, del] = effect_delta(state, action);
    if (add.empty() && del.empty()) return false;
    for (const auto &p : add)
        if (!state.satisfies(p)) return false;
    for (const auto &p : del)
        if (state.satisfies(p)) return false;
    return true;
}

std::vector<std::string>
Domain::failed_preconditions(const WorldState &state, const GroundAction &action) const {
    const OperatorSchema &schema = schema_of(action);
    return diagnose(schema.precondition, state, binding_for(schema, action));
}

} // namespace embeval

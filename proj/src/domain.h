#ifndef EMBEVAL_DOMAIN_H
#define EMBEVAL_DOMAIN_H

#include <tuple>

#include "condition.h"
#include "ltl.h"

namespace embeval {

// Ground actions share the runtime representation of trajectory actions.
using GroundAction = ActionRef;

struct TypedVar {
    std::string name; // without the '?'
    std::string type; // "object", "character", a category, or a property tag
};

struct OperatorSchema {
    std::string name; // canonical lower-case
    std::vector<TypedVar> params;
    CondPtr precondition;
    CondPtr effect;
    // First parameter is the agent and is omitted from raw action text
    // ("WALK(television.410)" binds ?char automatically).
    bool implicit_agent = false;

    int visible_arity() const {
        return static_cast<int>(params.size()) - (implicit_agent ? 1 : 0);
    }
};

// Immutable action model: predicate vocabulary, operator schemas, and agent
// conventions.  Built-ins are addressable by name; domains can also be loaded
// from PDDL-subset text (see pddl.h).
class Domain {
public:
    const std::string &name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    void add_predicate(const std::string &name, int arity);
    void add_property_tag(const std::string &tag) { property_tags_.insert(tag); }
    void add_schema(OperatorSchema schema);
    void add_alias(const std::string &alias, const std::string &schema_name);
    void add_unsupported(const std::string &action) { unsupported_.insert(action); }
    void set_auto_navigation(const std::string &nav_schema);
    void add_diagnostic(std::string note) { diagnostics_.push_back(std::move(note)); }

    // Computes static predicates (those no effect asserts); call after the
    // last schema is added.  Validates that schema predicates are declared.
    void finalize();

    const std::vector<OperatorSchema> &schemas() const { return schemas_; }
    const std::map<std::string, int> &predicates() const { return predicates_; }
    const std::set<std::string> &property_tags() const { return property_tags_; }
    const std::set<std::string> &static_predicates() const { return static_preds_; }
    const std::set<std::string> &unsupported_actions() const { return unsupported_; }
    const std::vector<std::string> &diagnostics() const { return diagnostics_; }
    bool auto_navigation() const { return !nav_schema_.empty(); }
    const std::string &nav_schema() const { return nav_schema_; }

    // Case-insensitive, alias-aware lookup; nullptr when unknown.
    const OperatorSchema *find(const std::string &raw_name) const;
    const OperatorSchema *require(const std::string &raw_name) const;

    // Predicate arities plus action names (upper-case) with visible arities.
    Vocabulary vocabulary() const;

    // Instantiation --------------------------------------------------------

    // Checks coverage, arity, and parameter types against the universe.
    GroundAction make_ground(const OperatorSchema &schema,
                             const std::vector<ObjectRef> &args,
                             const Universe &universe) const;

    Binding binding_for(const OperatorSchema &schema, const GroundAction &action) const;

    // Substitutes the binding into the schema, keeping quantifiers for
    // evaluation-time expansion.
    std::tuple<GroundAction, CondPtr, CondPtr>
    ground(const OperatorSchema &schema, const Binding &binding,
           const Universe &universe) const;

    // Simulation -----------------------------------------------------------

    bool applicable(const WorldState &state, const GroundAction &action) const;

    // Next state; throws Error(precondition_violated) with the failed literal
    // set when not applicable.
    WorldState apply(const WorldState &state, const GroundAction &action) const;

    // Precondition with dynamic literals waived: only property/size/static
    // structure can fail.  Drives the Affordance error class.
    bool is_affordable(const WorldState &state, const GroundAction &action) const;

    // True when applying the effect would leave the state unchanged (and the
    // resolved effect is nonempty).  Drives the Additional-Step error class.
    bool is_effect_redundant(const WorldState &state, const GroundAction &action) const;

    // Unsatisfied literals of the best-matching precondition branch.
    std::vector<std::string> failed_preconditions(const WorldState &state,
                                                  const GroundAction &action) const;

    // Resolved effect of an applicable action (adds-win delete resolution).
    std::pair<std::vector<Proposition>, std::vector<Proposition>>
    effect_delta(const WorldState &state, const GroundAction &action) const;

private:
    const OperatorSchema &schema_of(const GroundAction &action) const;

    std::string name_;
    std::map<std::string, int> predicates_;
    std::set<std::string> property_tags_;
    std::vector<OperatorSchema> schemas_;
    std::map<std::string, size_t> lookup_; // normalized name -> schema index
    std::set<std::string> unsupported_;
    std::set<std::string> static_preds_;
    std::string nav_schema_;
    std::vector<std::string> diagnostics_;
    bool finalized_ = false;
};

// Built-in domains: "behavior-symbolic" (household simulator action table) and
// "virtualhome-core" (walk/grab/open/switch/put/plug/sit core).  Throws
// Error(unknown_action) for other names.
const Domain &builtin_domain(const std::string &name);

} // namespace embeval

#endif

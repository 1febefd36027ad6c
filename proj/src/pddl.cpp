#include "pddl.h"

#include <algorithm>
#include <sstream>

#include "sexpr.h"

namespace embeval {

namespace {

// Parses "(?a - t1 ?b ?c - t2)" style typed lists.
std::vector<TypedVar> parse_typed_vars(const Sexp &form) {
    std::vector<TypedVar> out;
    std::vector<std::string> pending;
    for (size_t i = 0; i < form.items.size(); ++i) {
        const Sexp &item = form.items[i];
        if (!item.is_atom)
            throw Error(ErrorCode::parse_error,
                        "expected a variable near byte " + std::to_string(item.offset));
        if (item.atom == "-") {
            if (i + 1 >= form.items.size() || !form.items[i + 1].is_atom)
                throw Error(ErrorCode::parse_error,
                            "missing type after '-' near byte " +
                                std::to_string(item.offset));
            const std::string &type = form.items[++i].atom;
            for (auto &name : pending) out.push_back({name, type});
            pending.clear();
        } else {
            if (item.atom.empty() || item.atom[0] != '?')
                throw Error(ErrorCode::parse_error,
                            "variables start with '?': " + item.atom);
            pending.push_back(item.atom.substr(1));
        }
    }
    for (auto &name : pending) out.push_back({name, "object"});
    return out;
}

Term parse_term(const Sexp &atom) {
    if (!atom.is_atom)
        throw Error(ErrorCode::parse_error,
                    "expected a term near byte " + std::to_string(atom.offset));
    if (!atom.atom.empty() && atom.atom[0] == '?')
        return Term::make_var(atom.atom.substr(1));
    return Term::make_obj(ObjectRef::parse(atom.atom));
}

CondPtr parse_cond(const Sexp &form) {
    if (form.is_atom)
        throw Error(ErrorCode::parse_error,
                    "expected a condition near byte " + std::to_string(form.offset));
    if (form.items.empty()) return Condition::truth();
    const std::string &head = form.head();
    if (head == "and" || head == "or") {
        std::vector<CondPtr> children;
        for (size_t i = 1; i < form.items.size(); ++i)
            children.push_back(parse_cond(form.items[i]));
        return head == "and" ? Condition::conj(std::move(children))
                             : Condition::disj(std::move(children));
    }
    if (head == "not") {
        if (form.items.size() != 2)
            throw Error(ErrorCode::parse_error,
                        "not takes one argument near byte " +
                            std::to_string(form.offset));
        return Condition::negate(parse_cond(form.items[1]));
    }
    if (head == "when") {
        if (form.items.size() != 3)
            throw Error(ErrorCode::parse_error,
                        "when takes two arguments near byte " +
                            std::to_string(form.offset));
        return Condition::when(parse_cond(form.items[1]), parse_cond(form.items[2]));
    }
    if (head == "forall" || head == "exists") {
        if (form.items.size() != 3)
            throw Error(ErrorCode::parse_error,
                        head + " takes a variable list and a body near byte " +
                            std::to_string(form.offset));
        auto vars = parse_typed_vars(form.at(1));
        if (vars.empty())
            throw Error(ErrorCode::parse_error,
                        head + " needs at least one variable near byte " +
                            std::to_string(form.offset));
        CondPtr body = parse_cond(form.items[2]);
        for (auto it = vars.rbegin(); it != vars.rend(); ++it)
            body = head == "forall" ? Condition::forall(it->name, it->type, body)
                                    : Condition::exists(it->name, it->type, body);
        return body;
    }
    // plain literal
    std::vector<Term> args;
    for (size_t i = 1; i < form.items.size(); ++i)
        args.push_back(parse_term(form.items[i]));
    return Condition::lit(head, std::move(args));
}

OperatorSchema parse_action_form(const Sexp &form,
                                 std::vector<std::string> &diagnostics) {
    OperatorSchema schema;
    schema.name = form.at(1).atom;
    schema.precondition = Condition::truth();
    schema.effect = Condition::truth();
    for (size_t j = 2; j + 1 < form.items.size(); j += 2) {
        const std::string &key = form.at(j).atom;
        const Sexp &value = form.at(j + 1);
        if (key == ":parameters") {
            schema.params = parse_typed_vars(value);
        } else if (key == ":precondition") {
            schema.precondition = parse_cond(value);
        } else if (key == ":effect") {
            schema.effect = parse_cond(value);
        } else {
            throw Error(ErrorCode::parse_error, "unknown action section " + key);
        }
    }
    std::set<std::string> declared;
    for (const auto &p : schema.params) declared.insert(p.name);
    auto free_pre = free_variables(schema.precondition, declared);
    for (const auto &var : free_pre) {
        schema.precondition = Condition::exists(var, "object", schema.precondition);
        diagnostics.push_back("action " + schema.name +
                              ": free precondition variable ?" + var +
                              " treated as existentially quantified");
    }
    auto free_eff = free_variables(schema.effect, declared);
    if (!free_eff.empty())
        throw Error(ErrorCode::validation_error,
                    "action " + schema.name + ": free effect variable ?" +
                        *free_eff.begin());
    schema.implicit_agent =
        !schema.params.empty() && schema.params[0].type == "character";
    return schema;
}

} // namespace

CondPtr parse_condition_text(const std::string &text) {
    SexpReader reader(text);
    Sexp form = reader.read();
    if (!reader.done())
        throw Error(ErrorCode::parse_error, "trailing content after condition");
    return parse_cond(form);
}

Domain load_domain(const std::string &text) {
    SexpReader reader(text);
    Sexp top = reader.read();
    if (top.is_atom || top.items.empty() || top.head() != "define")
        throw Error(ErrorCode::parse_error, "expected (define (domain ...) ...)");
    Domain domain;
    for (size_t i = 1; i < top.items.size(); ++i) {
        const Sexp &form = top.items[i];
        if (form.is_atom)
            throw Error(ErrorCode::parse_error,
                        "unexpected atom near byte " + std::to_string(form.offset));
        if (form.items.empty()) continue;
        const std::string &head = form.head();
        if (head == "domain") {
            domain.set_name(form.at(1).atom);
        } else if (head == ":requirements" || head == ":types" ||
                   head == ":constants") {
            continue; // accepted and ignored
        } else if (head == ":predicates") {
            for (size_t j = 1; j < form.items.size(); ++j) {
                const Sexp &p = form.items[j];
                if (p.is_atom || p.items.empty() || !p.items[0].is_atom)
                    throw Error(ErrorCode::parse_error,
                                "malformed predicate near byte " +
                                    std::to_string(p.offset));
                int arity = 0;
                for (size_t k = 1; k < p.items.size(); ++k) {
                    const std::string &a = p.items[k].atom;
                    if (a == "-") {
                        ++k; // skip the type name
                        continue;
                    }
                    ++arity;
                }
                domain.add_predicate(p.items[0].atom, arity);
            }
        } else if (head == ":action") {
            std::vector<std::string> diags;
            domain.add_schema(parse_action_form(form, diags));
            for (const auto &d : diags) domain.add_diagnostic(d);
        } else {
            throw Error(ErrorCode::parse_error, "unknown section " + head);
        }
    }
    domain.finalize();
    return domain;
}

PlanningProblem load_problem(const std::string &text, const Domain &domain) {
    SexpReader reader(text);
    Sexp top = reader.read();
    if (top.is_atom || top.items.empty() || top.head() != "define")
        throw Error(ErrorCode::parse_error, "expected (define (problem ...) ...)");
    PlanningProblem problem;
    std::vector<std::pair<ObjectRef, std::set<std::string>>> objs;
    std::vector<Proposition> raw_init;
    CondPtr goal = Condition::truth();
    for (size_t i = 1; i < top.items.size(); ++i) {
        const Sexp &form = top.items[i];
        if (form.is_atom || form.items.empty()) continue;
        const std::string &head = form.head();
        if (head == "problem") {
            problem.name = form.at(1).atom;
        } else if (head == ":domain") {
            problem.domain_name = form.at(1).atom;
        } else if (head == ":objects") {
            std::vector<std::string> pending;
            auto flush = [&](const std::string &type) {
                for (auto &n : pending) {
                    ObjectRef ref = ObjectRef::parse(n);
                    if (!ref.has_id) ref = ObjectRef(ref.category, 0);
                    std::set<std::string> tags;
                    if (type != "object" && type != ref.category) tags.insert(type);
                    objs.emplace_back(ref, std::move(tags));
                }
                pending.clear();
            };
            for (size_t j = 1; j < form.items.size(); ++j) {
                const std::string &a = form.at(j).atom;
                if (a == "-")
                    flush(form.at(++j).atom);
                else
                    pending.push_back(a);
            }
            flush("object");
        } else if (head == ":init") {
            for (size_t j = 1; j < form.items.size(); ++j) {
                const Sexp &f = form.items[j];
                Proposition prop;
                prop.predicate = f.head();
                for (size_t k = 1; k < f.items.size(); ++k)
                    prop.args.push_back(ObjectRef::parse(f.at(k).atom));
                raw_init.push_back(std::move(prop));
            }
        } else if (head == ":goal") {
            goal = parse_cond(form.at(1));
        }
    }
    // Unary init facts over the domain's property tags describe the objects
    // themselves; fold them into the universe instead of the fact set.
    for (const auto &fact : raw_init) {
        if (fact.args.size() != 1 || !domain.property_tags().count(fact.predicate))
            continue;
        for (auto &[ref, tags] : objs)
            if (ref == fact.args[0] ||
                (!fact.args[0].has_id && ref.category == fact.args[0].category))
                tags.insert(fact.predicate);
    }
    auto universe = std::make_shared<Universe>();
    for (const auto &[ref, tags] : objs) universe->add_object(ref, tags);
    for (const auto &obj : universe->objects()) {
        if (obj.category == "character" || obj.category == "agent" ||
            obj.category == "robot") {
            universe->set_agent(obj);
            break;
        }
    }
    std::vector<Proposition> init;
    for (auto &fact : raw_init) {
        if (fact.args.size() == 1 && domain.property_tags().count(fact.predicate))
            continue;
        for (auto &arg : fact.args) {
            auto resolved = universe->resolve(arg);
            if (!resolved)
                throw Error(ErrorCode::unknown_object,
                            arg.str() + " in init fact " + fact.str());
            arg = *resolved;
        }
        init.push_back(std::move(fact));
    }
    auto free_goal = free_variables(goal, {});
    if (!free_goal.empty())
        throw Error(ErrorCode::validation_error,
                    "free variable ?" + *free_goal.begin() + " in problem goal");
    problem.universe = universe;
    problem.init = WorldState(universe, std::move(init));
    problem.goal = goal;
    if (problem.domain_name.empty()) problem.domain_name = domain.name();
    return problem;
}

std::string render_domain(const Domain &domain) {
    std::ostringstream out;
    out << "(define (domain " << (domain.name().empty() ? "household" : domain.name())
        << ")\n  (:requirements :strips :typing :adl)\n  (:predicates\n";
    for (const auto &[pred, arity] : domain.predicates()) {
        out << "    (" << pred;
        for (int i = 0; i < arity; ++i) out << " ?x" << i;
        out << ")\n";
    }
    for (const auto &tag : domain.property_tags()) out << "    (" << tag << " ?x0)\n";
    out << "  )\n";
    for (const auto &schema : domain.schemas()) {
        out << "  (:action " << schema.name << "\n    :parameters (";
        for (size_t i = 0; i < schema.params.size(); ++i) {
            if (i) out << " ";
            out << "?" << schema.params[i].name << " - " << schema.params[i].type;
        }
        out << ")\n    :precondition " << to_pddl(schema.precondition)
            << "\n    :effect " << to_pddl(schema.effect) << "\n  )\n";
    }
    out << ")\n";
    return out.str();
}

std::string render_problem(const PlanningProblem &problem) {
    std::ostringstream out;
    out << "(define (problem " << (problem.name.empty() ? "task" : problem.name)
        << ")\n  (:domain " << problem.domain_name << ")\n  (:objects\n";
    for (const auto &obj : problem.universe->objects()) {
        out << "    " << obj.str() << " - ";
        if (problem.universe->agent() && obj == *problem.universe->agent() &&
            obj.category == "character")
            out << "character";
        else
            out << "object";
        out << "\n";
    }
    out << "  )\n  (:init\n";
    for (const auto &fact : problem.init.facts()) {
        out << "    (" << fact.predicate;
        for (const auto &arg : fact.args) out << " " << arg.str();
        out << ")\n";
    }
    for (const auto &tag : problem.universe->known_tags())
        for (const auto &obj : problem.universe->with_tag(tag))
            out << "    (" << tag << " " << obj.str() << ")\n";
    out << "  )\n  (:goal " << to_pddl(problem.goal) << ")\n)\n";
    return out.str();
}

std::vector<OperatorSchema>
parse_action_blocks(const std::string &text, std::vector<std::string> *diagnostics) {
    std::vector<OperatorSchema> out;
    std::vector<std::string> diags;
    SexpReader reader(text);
    while (!reader.done()) {
        Sexp form = reader.read();
        if (form.is_atom || form.items.empty())
            throw Error(ErrorCode::parse_error,
                        "expected (:action ...) near byte " +
                            std::to_string(form.offset));
        const std::string &head = form.head();
        if (head == ":action") {
            out.push_back(parse_action_form(form, diags));
        } else if (head == "define") {
            for (size_t i = 1; i < form.items.size(); ++i) {
                const Sexp &item = form.items[i];
                if (!item.is_atom && !item.items.empty() && item.head() == ":action")
                    out.push_back(parse_action_form(item, diags));
            }
        } else {
            throw Error(ErrorCode::parse_error, "expected (:action ...), got " + head);
        }
    }
    if (diagnostics)
        diagnostics->insert(diagnostics->end(), diags.begin(), diags.end());
    return out;
}

} // namespace embeval

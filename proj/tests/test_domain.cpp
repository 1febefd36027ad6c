#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "domain.h"
#include "pddl.h"

using namespace embeval;

namespace {

std::shared_ptr<Universe> fridge_universe() {
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("agent", 0));
    u->add_object(ObjectRef("rag", 0), {"small", "cleaning_tool"});
    u->add_object(ObjectRef("sink", 82), {"toggleable", "large"});
    u->add_object(ObjectRef("fridge", 97), {"openable", "large"});
    u->set_agent(ObjectRef("agent", 0));
    return u;
}

WorldState fridge_init(std::shared_ptr<Universe> u) {
    return WorldState(u, {Proposition::parse("onfloor(rag.0)"),
                          Proposition::parse("toggled_off(sink.82)"),
                          Proposition::parse("closed(fridge.97)"),
                          Proposition::parse("stained(fridge.97)")});
}

std::shared_ptr<Universe> shelf_universe() {
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("agent", 0));
    u->add_object(ObjectRef("box", 3), {"openable", "medium"});
    u->add_object(ObjectRef("shelf", 12), {"large"});
    u->add_object(ObjectRef("light", 4), {"toggleable"});
    u->add_object(ObjectRef("book", 2), {"small"});
    u->add_object(ObjectRef("table", 5), {"large"});
    u->set_agent(ObjectRef("agent", 0));
    return u;
}

WorldState shelf_init(std::shared_ptr<Universe> u) {
    return WorldState(u, {Proposition::parse("closed(box.3)"),
                          Proposition::parse("toggled_on(light.4)"),
                          Proposition::parse("ontop(book.2, table.5)")});
}

GroundAction ga(const Domain &d, const std::string &name,
                const std::vector<std::string> &args, const Universe &u) {
    const OperatorSchema *schema = d.require(name);
    std::vector<ObjectRef> refs;
    for (const auto &a : args) refs.push_back(ObjectRef::parse(a));
    return d.make_ground(*schema, refs, u);
}

} // namespace

TEST_CASE("household action table is complete and ordered") {
    const Domain &d = builtin_domain("behavior-symbolic");
    CHECK(d.schemas().size() == 30);
    CHECK(d.schemas()[0].name == "navigate_to");
    CHECK(d.schemas()[1].name == "right_grasp");
    CHECK(d.schemas()[2].name == "left_grasp");
    CHECK(d.schemas()[29].name == "cook");
    CHECK(d.find("OPEN") != nullptr);
    CHECK(d.find("open")->name == "open");
    CHECK(d.find("RIGHT_PLACE_NEXTTO_ONTOP")->visible_arity() == 2);
    CHECK(d.find("TOGGLE_ON")->visible_arity() == 1);
    CHECK(d.find("no_such_action") == nullptr);
    Vocabulary v = d.vocabulary();
    CHECK(v.actions.at("RIGHT_GRASP") == 1);
    CHECK(v.predicates.at("next_to") == 2);
    CHECK(v.predicates.at("openable") == 1); // property tags act as predicates
}

TEST_CASE("static analysis separates properties from fluents") {
    const Domain &d = builtin_domain("behavior-symbolic");
    CHECK(d.static_predicates().count("openable"));
    CHECK(d.static_predicates().count("toggleable"));
    CHECK(d.static_predicates().count("graspable"));
    CHECK(d.static_predicates().count("size_lt"));
    CHECK(d.static_predicates().count("="));
    CHECK(!d.static_predicates().count("next_to"));
    CHECK(!d.static_predicates().count("toggled_on"));
    CHECK(!d.static_predicates().count("interactable"));
}

TEST_CASE("grounding validates arity, membership, and bare names") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = fridge_universe();
    CHECK_THROWS_AS(ga(d, "OPEN", {"fridge.97", "sink.82"}, *u), Error);
    try {
        ga(d, "OPEN", {"fridge.97", "sink.82"}, *u);
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::binding_error);
    }
    CHECK_THROWS_AS(ga(d, "OPEN", {"cabinet.99"}, *u), Error);
    GroundAction a = ga(d, "RIGHT_GRASP", {"rag"}, *u);
    CHECK(a.args[0] == ObjectRef("rag", 0));
    CHECK(a.str() == "RIGHT_GRASP(rag.0)");
}

TEST_CASE("opening the fridge flips exactly one pair of facts") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = fridge_universe();
    WorldState s0 = fridge_init(u);
    GroundAction open = ga(d, "OPEN", {"fridge.97"}, *u);
    REQUIRE(d.applicable(s0, open));
    WorldState s1 = d.apply(s0, open);
    auto [add, del] = s0.diff(s1);
    REQUIRE(add.size() == 1);
    REQUIRE(del.size() == 1);
    CHECK(add[0].str() == "open(fridge.97)");
    CHECK(del[0].str() == "closed(fridge.97)");
}

TEST_CASE("soaking needs a running sink next to the item") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = fridge_universe();
    WorldState s = fridge_init(u);
    GroundAction soak = ga(d, "SOAK", {"rag.0"}, *u);
    CHECK(!d.applicable(s, soak));

    s = d.apply(s, ga(d, "RIGHT_GRASP", {"rag.0"}, *u));
    CHECK(s.satisfies(Proposition::parse("holding_right(rag.0)")));
    CHECK(!s.satisfies(Proposition::parse("onfloor(rag.0)")));
    s = d.apply(s, ga(d, "RIGHT_PLACE_NEXTTO", {"sink.82"}, *u));
    CHECK(s.satisfies(Proposition::parse("next_to(rag.0, sink.82)")));
    CHECK(!s.satisfies(Proposition::parse("holding_right(rag.0)")));
    CHECK(!d.applicable(s, soak)); // sink still off
    s = d.apply(s, ga(d, "TOGGLE_ON", {"sink.82"}, *u));
    REQUIRE(d.applicable(s, soak));
    s = d.apply(s, soak);
    CHECK(s.satisfies(Proposition::parse("soaked(rag.0)")));
}

TEST_CASE("full fridge-cleaning plan runs through the simulator") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = fridge_universe();
    WorldState s = fridge_init(u);
    const std::vector<std::pair<std::string, std::vector<std::string>>> plan = {
        {"RIGHT_GRASP", {"rag.0"}},  {"RIGHT_PLACE_NEXTTO", {"sink.82"}},
        {"TOGGLE_ON", {"sink.82"}},  {"SOAK", {"rag.0"}},
        {"TOGGLE_OFF", {"sink.82"}}, {"OPEN", {"fridge.97"}},
        {"CLEAN", {"fridge.97"}},
    };
    for (const auto &[name, args] : plan) {
        GroundAction a = ga(d, name, args, *u);
        REQUIRE_MESSAGE(d.applicable(s, a), a.str());
        CHECK(!d.is_effect_redundant(s, a));
        s = d.apply(s, a);
    }
    CHECK(!s.satisfies(Proposition::parse("stained(fridge.97)")));
    CHECK(s.satisfies(Proposition::parse("soaked(rag.0)")));
    CHECK(s.satisfies(Proposition::parse("next_to(rag.0, sink.82)")));
    CHECK(s.satisfies(Proposition::parse("open(fridge.97)")));
    CHECK(s.satisfies(Proposition::parse("toggled_off(sink.82)")));
}

TEST_CASE("cleaning a dry stain leaves it in place") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = fridge_universe();
    // rag accessible but never soaked
    WorldState s(u, {Proposition::parse("onfloor(rag.0)"),
                     Proposition::parse("stained(fridge.97)"),
                     Proposition::parse("dusty(fridge.97)")});
    GroundAction clean = ga(d, "CLEAN", {"fridge.97"}, *u);
    REQUIRE(d.applicable(s, clean));
    WorldState s1 = d.apply(s, clean);
    CHECK(!s1.satisfies(Proposition::parse("dusty(fridge.97)")));
    CHECK(s1.satisfies(Proposition::parse("stained(fridge.97)")));
    // a second pass changes nothing: dust is gone, the stain needs a wet tool
    CHECK(d.is_effect_redundant(s1, clean));
}

TEST_CASE("affordance ignores fluents but keeps object properties") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = shelf_universe();
    WorldState s = shelf_init(u);
    CHECK(!d.is_affordable(s, ga(d, "OPEN", {"shelf.12"}, *u)));
    CHECK(d.is_affordable(s, ga(d, "OPEN", {"box.3"}, *u)));
    CHECK(!d.is_affordable(s, ga(d, "TOGGLE_ON", {"box.3"}, *u)));
    // already-on light: affordable (toggleable), just not applicable
    GroundAction toggle = ga(d, "TOGGLE_ON", {"light.4"}, *u);
    CHECK(d.is_affordable(s, toggle));
    CHECK(!d.applicable(s, toggle));
    CHECK(d.is_effect_redundant(s, toggle));
    // a large shelf cannot be grasped
    CHECK(!d.is_affordable(s, ga(d, "RIGHT_GRASP", {"shelf.12"}, *u)));
}

TEST_CASE("redundancy is judged against the current state") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = shelf_universe();
    WorldState s = shelf_init(u);
    GroundAction open_box = ga(d, "OPEN", {"box.3"}, *u);
    CHECK(!d.is_effect_redundant(s, open_box));
    WorldState s1 = d.apply(s, open_box);
    CHECK(d.is_effect_redundant(s1, open_box));
    // releasing an object that already sits somewhere adds onfloor: not redundant
    GroundAction release = ga(d, "RIGHT_RELEASE", {"book.2"}, *u);
    CHECK(!d.is_effect_redundant(s, release));
}

TEST_CASE("precondition diagnostics name the missing facts") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = fridge_universe();
    WorldState s = fridge_init(u);
    WorldState on = d.apply(s, ga(d, "TOGGLE_ON", {"sink.82"}, *u));
    GroundAction again = ga(d, "TOGGLE_ON", {"sink.82"}, *u);
    CHECK_THROWS_AS(d.apply(on, again), Error);
    auto missing = d.failed_preconditions(on, again);
    REQUIRE(!missing.empty());
    bool found = false;
    for (const auto &m : missing)
        if (m.find("toggled_off(sink.82)") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("containment respects size classes") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = shelf_universe();
    WorldState s(u, {Proposition::parse("holding_right(book.2)"),
                     Proposition::parse("closed(box.3)")});
    // small book fits in the medium box, but the box must be open first
    GroundAction put_in = ga(d, "RIGHT_PLACE_INSIDE", {"box.3"}, *u);
    CHECK(!d.applicable(s, put_in));
    WorldState opened = d.apply(s, ga(d, "OPEN", {"box.3"}, *u));
    REQUIRE(d.applicable(opened, put_in));
    WorldState placed = d.apply(opened, put_in);
    CHECK(placed.satisfies(Proposition::parse("inside(book.2, box.3)")));
    CHECK(!placed.satisfies(Proposition::parse("holding_right(book.2)")));

    // nothing fits inside a container of its own size class
    WorldState hold_box(u, {Proposition::parse("holding_right(box.3)"),
                            Proposition::parse("open(box.3)")});
    CHECK(!d.applicable(hold_box, ga(d, "RIGHT_PLACE_INSIDE", {"box.3"}, *u)));
}

TEST_CASE("grasping clears placements and stays one per hand") {
    const Domain &d = builtin_domain("behavior-symbolic");
    auto u = shelf_universe();
    WorldState s = shelf_init(u);
    GroundAction grasp = ga(d, "RIGHT_GRASP", {"book.2"}, *u);
    REQUIRE(d.applicable(s, grasp));
    WorldState held = d.apply(s, grasp);
    CHECK(held.satisfies(Proposition::parse("holding_right(book.2)")));
    CHECK(!held.satisfies(Proposition::parse("ontop(book.2, table.5)")));
    // right hand is now full; box must go to the left hand
    CHECK(!d.applicable(held, ga(d, "RIGHT_GRASP", {"box.3"}, *u)));
    CHECK(d.applicable(held, ga(d, "LEFT_GRASP", {"box.3"}, *u)));
}

TEST_CASE("virtualhome core resolves aliases and implicit agents") {
    const Domain &d = builtin_domain("virtualhome-core");
    CHECK(d.find("WALK")->name == "walk_towards");
    CHECK(d.find("find")->name == "walk_towards");
    CHECK(d.find("SwitchOn")->name == "switch_on");
    CHECK(d.find("put_back")->name == "put_ontop");
    CHECK(d.find("putin")->name == "put_inside");
    CHECK(d.find("walk_towards")->implicit_agent);
    CHECK(d.find("walk_towards")->visible_arity() == 1);
    CHECK(d.find("put_ontop")->visible_arity() == 2);
    CHECK(d.find("standup")->visible_arity() == 0);
    CHECK(d.unsupported_actions().count("pour"));
    CHECK(d.vocabulary().actions.at("WALK_TOWARDS") == 1);
}

TEST_CASE("switching on the television needs power first") {
    const Domain &d = builtin_domain("virtualhome-core");
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("character", 65));
    u->add_object(ObjectRef("television", 410));
    u->set_agent(ObjectRef("character", 65));
    WorldState s(u, {Proposition::parse("next_to(character.65, television.410)"),
                     Proposition::parse("off(television.410)"),
                     Proposition::parse("plugged_out(television.410)"),
                     Proposition::parse("has_switch(television.410)")});
    GroundAction switch_on =
        ga(d, "SWITCH_ON", {"character.65", "television.410"}, *u);
    GroundAction plug_in = ga(d, "PLUG_IN", {"character.65", "television.410"}, *u);
    CHECK(!d.applicable(s, switch_on));
    // the television has no separate plug, but the switch branch still applies
    REQUIRE(d.applicable(s, plug_in));
    WorldState powered = d.apply(s, plug_in);
    CHECK(powered.satisfies(Proposition::parse("plugged_in(television.410)")));
    REQUIRE(d.applicable(powered, switch_on));
    WorldState on = d.apply(powered, switch_on);
    CHECK(on.satisfies(Proposition::parse("on(television.410)")));
    CHECK(!on.satisfies(Proposition::parse("off(television.410)")));
}

TEST_CASE("walking rewrites agent adjacency") {
    const Domain &d = builtin_domain("virtualhome-core");
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("character", 65));
    u->add_object(ObjectRef("television", 410));
    u->add_object(ObjectRef("sofa", 368));
    u->add_object(ObjectRef("door", 1));
    u->set_agent(ObjectRef("character", 65));
    WorldState s(u, {Proposition::parse("next_to(character.65, door.1)"),
                     Proposition::parse("obj_next_to(sofa.368, television.410)")});
    GroundAction walk = ga(d, "WALK", {"character.65", "television.410"}, *u);
    WorldState s1 = d.apply(s, walk);
    CHECK(s1.satisfies(Proposition::parse("next_to(character.65, television.410)")));
    CHECK(s1.satisfies(Proposition::parse("next_to(character.65, sofa.368)")));
    CHECK(!s1.satisfies(Proposition::parse("next_to(character.65, door.1)")));
}

TEST_CASE("grab and put round-trip through the right hand") {
    const Domain &d = builtin_domain("virtualhome-core");
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("character", 65));
    u->add_object(ObjectRef("remote", 10), {"grabbable"});
    u->add_object(ObjectRef("table", 33));
    u->set_agent(ObjectRef("character", 65));
    WorldState s(u, {Proposition::parse("next_to(character.65, remote.10)"),
                     Proposition::parse("next_to(character.65, table.33)"),
                     Proposition::parse("ontop(remote.10, table.33)")});
    WorldState held = d.apply(s, ga(d, "GRAB", {"character.65", "remote.10"}, *u));
    CHECK(held.satisfies(Proposition::parse("holds_rh(character.65, remote.10)")));
    CHECK(!held.satisfies(Proposition::parse("ontop(remote.10, table.33)")));
    // a full right hand blocks a second grab
    CHECK(!d.applicable(held, ga(d, "GRAB", {"character.65", "table.33"}, *u)));
    WorldState placed = d.apply(
        held, ga(d, "PUT_BACK", {"character.65", "remote.10", "table.33"}, *u));
    CHECK(placed.satisfies(Proposition::parse("ontop(remote.10, table.33)")));
    CHECK(!placed.satisfies(Proposition::parse("holds_rh(character.65, remote.10)")));
}

TEST_CASE("domain text loads with branch preconditions intact") {
    const Domain &d = load_domain(R"((define (domain mini)
      (:predicates (next_to ?a ?b) (has_plug ?a) (has_switch ?a)
                   (plugged_in ?a) (plugged_out ?a) (sitting ?a))
      (:action plug_in
        :parameters (?char - character ?obj - object)
        :precondition (or (and (next_to ?char ?obj) (has_plug ?obj)
                               (plugged_out ?obj))
                          (and (next_to ?char ?obj) (has_switch ?obj)
                               (plugged_out ?obj)))
        :effect (and (plugged_in ?obj) (not (plugged_out ?obj))))
    ))");
    const OperatorSchema *schema = d.find("plug_in");
    REQUIRE(schema != nullptr);
    CHECK(schema->params.size() == 2);
    CHECK(schema->implicit_agent);
    CHECK(schema->precondition->kind == CKind::or_);
    CHECK(schema->precondition->children.size() == 2);
    CHECK(d.predicates().at("next_to") == 2);
}

TEST_CASE("free precondition variables become existentials") {
    const Domain &d = load_domain(R"((define (domain pred)
      (:predicates (next_to ?a ?b) (inside_room ?a ?r) (sitting ?a))
      (:action walk_towards
        :parameters (?char - character ?obj - object)
        :precondition (and (not (sitting ?char)) (inside_room ?obj ?room))
        :effect (next_to ?char ?obj))
    ))");
    REQUIRE(d.diagnostics().size() == 1);
    CHECK(d.diagnostics()[0].find("?room") != std::string::npos);

    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("character", 65));
    u->add_object(ObjectRef("television", 410));
    u->add_object(ObjectRef("livingroom", 336));
    u->set_agent(ObjectRef("character", 65));
    WorldState s(u,
                 {Proposition::parse("inside_room(television.410, livingroom.336)")});
    GroundAction walk = ga(d, "walk_towards", {"character.65", "television.410"}, *u);
    CHECK(d.applicable(s, walk));
    WorldState empty(u, {});
    CHECK(!d.applicable(empty, walk));
}

TEST_CASE("free effect variables are rejected") {
    CHECK_THROWS_AS(load_domain(R"((define (domain bad)
      (:predicates (next_to ?a ?b))
      (:action slide
        :parameters (?x - object)
        :precondition (and)
        :effect (next_to ?x ?y))
    ))"),
                    Error);
}

TEST_CASE("rendered domains and problems reload faithfully") {
    const Domain &d = builtin_domain("behavior-symbolic");
    std::string text = render_domain(d);
    Domain re = load_domain(text);
    CHECK(re.schemas().size() == d.schemas().size());
    for (size_t i = 0; i < d.schemas().size(); ++i)
        CHECK(re.schemas()[i].name == d.schemas()[i].name);
    for (const auto &[pred, arity] : d.predicates())
        CHECK(re.predicates().at(pred) == arity);

    PlanningProblem p;
    p.name = "clean_fridge";
    p.domain_name = "behavior-symbolic";
    p.universe = fridge_universe();
    p.init = fridge_init(p.universe);
    p.goal = Condition::lit("soaked", {Term::make_obj(ObjectRef("rag", 0))});
    PlanningProblem back = load_problem(render_problem(p), d);
    CHECK(back.init == p.init);
    CHECK(*back.universe == *p.universe);
    CHECK(cond_equal(back.goal, p.goal));
    // tags still live in the universe, not the fact set
    CHECK(back.universe->has_tag(ObjectRef("rag", 0), "cleaning_tool"));
    CHECK(back.universe->size_of(ObjectRef("rag", 0)) == SizeClass::small);
}

TEST_CASE("problem text with bare names resolves against the universe") {
    const Domain &d = builtin_domain("behavior-symbolic");
    PlanningProblem p = load_problem(R"((define (problem tiny)
      (:domain behavior-symbolic)
      (:objects agent.0 - agent rag.0 fridge.97 - object)
      (:init (onfloor rag) (closed fridge.97) (cleaning_tool rag.0)
             (small rag.0) (openable fridge.97))
      (:goal (open fridge.97))
    ))",
                                     d);
    CHECK(p.init.satisfies(Proposition::parse("onfloor(rag.0)")));
    CHECK(p.universe->has_tag(ObjectRef("fridge", 97), "openable"));
    CHECK(p.universe->agent().has_value());
    CHECK(!eval_condition(p.goal, p.init, {}));
}

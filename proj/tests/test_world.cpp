#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "world.h"

using namespace embeval;

static std::shared_ptr<Universe> kitchen_universe() {
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("agent", 0));
    u->add_object(ObjectRef("rag", 0), {"small", "cleaning_tool"});
    u->add_object(ObjectRef("sink", 82), {"toggleable"});
    u->add_object(ObjectRef("fridge", 97), {"openable", "large"});
    u->set_agent(ObjectRef("agent", 0));
    return u;
}

TEST_CASE("object references render and parse round-trip") {
    ObjectRef fridge("fridge", 97);
    CHECK(fridge.str() == "fridge.97");
    CHECK(ObjectRef::parse("fridge.97") == fridge);
    CHECK(ObjectRef::parse("character").has_id == false);
    CHECK(ObjectRef::parse("character").category == "character");
    CHECK_THROWS_AS(ObjectRef::parse(""), Error);
}

TEST_CASE("bare references resolve to the unique category instance") {
    auto u = kitchen_universe();
    auto hit = u->resolve(ObjectRef::bare("sink"));
    REQUIRE(hit.has_value());
    CHECK(*hit == ObjectRef("sink", 82));
    CHECK_FALSE(u->resolve(ObjectRef::bare("knife")).has_value());
    CHECK_FALSE(u->resolve(ObjectRef("sink", 7)).has_value());
}

TEST_CASE("property tags and categories act as implicit unary predicates") {
    auto u = kitchen_universe();
    CHECK(*u->implicit_unary_truth("cleaning_tool", ObjectRef("rag", 0)));
    CHECK_FALSE(*u->implicit_unary_truth("cleaning_tool", ObjectRef("sink", 82)));
    CHECK(*u->implicit_unary_truth("fridge", ObjectRef("fridge", 97)));
    CHECK_FALSE(u->implicit_unary_truth("holding", ObjectRef("rag", 0)).has_value());
    CHECK(u->size_of(ObjectRef("rag", 0)) == SizeClass::small);
    CHECK(u->size_of(ObjectRef("sink", 82)) == SizeClass::medium);
    CHECK(u->size_of(ObjectRef("fridge", 97)) == SizeClass::large);
}

TEST_CASE("propositions render with comma-space argument separators") {
    Proposition p("next_to", {ObjectRef("rag", 0), ObjectRef("sink", 82)});
    CHECK(p.str() == "next_to(rag.0, sink.82)");
    CHECK(Proposition::parse("next_to(rag.0, sink.82)") == p);
    CHECK(Proposition::parse("next_to(rag.0,sink.82)") == p);
    CHECK_THROWS_AS(Proposition::parse("open(fridge.97"), Error);
}

TEST_CASE("closed-world satisfaction") {
    auto u = kitchen_universe();
    WorldState state(u, {Proposition::parse("stained(fridge.97)"),
                         Proposition::parse("closed(fridge.97)")});
    CHECK(state.satisfies(Proposition::parse("stained(fridge.97)")));
    CHECK_FALSE(state.satisfies(Proposition::parse("open(fridge.97)")));
    CHECK_FALSE(state.satisfies(Proposition::parse("soaked(rag.0)")));
}

TEST_CASE("state after a cleaning delta no longer satisfies the stain") {
    auto u = kitchen_universe();
    WorldState state(u, {Proposition::parse("stained(fridge.97)"),
                         Proposition::parse("open(fridge.97)")});
    auto next = state.with_delta({}, {Proposition::parse("stained(fridge.97)")});
    CHECK_FALSE(next.satisfies(Proposition::parse("stained(fridge.97)")));
    CHECK(next.satisfies(Proposition::parse("open(fridge.97)")));
}

TEST_CASE("delta application is immutable and conflict-checked") {
    auto u = kitchen_universe();
    WorldState state(u, {Proposition::parse("closed(fridge.97)")});
    auto open = state.with_delta({Proposition::parse("open(fridge.97)")},
                                 {Proposition::parse("closed(fridge.97)")});
    CHECK(state.satisfies(Proposition::parse("closed(fridge.97)")));
    CHECK(open.satisfies(Proposition::parse("open(fridge.97)")));
    CHECK_THROWS_AS(state.with_delta({Proposition::parse("open(fridge.97)")},
                                     {Proposition::parse("open(fridge.97)")}),
                    Error);
}

TEST_CASE("diff reports the opened fridge delta exactly") {
    auto u = kitchen_universe();
    WorldState before(u, {Proposition::parse("closed(fridge.97)"),
                          Proposition::parse("stained(fridge.97)")});
    WorldState after(u, {Proposition::parse("open(fridge.97)"),
                         Proposition::parse("stained(fridge.97)")});
    auto [added, removed] = before.diff(after);
    REQUIRE(added.size() == 1);
    REQUIRE(removed.size() == 1);
    CHECK(added[0].str() == "open(fridge.97)");
    CHECK(removed[0].str() == "closed(fridge.97)");
}

TEST_CASE("diff across different universes is rejected") {
    auto a = kitchen_universe();
    auto b = std::make_shared<Universe>();
    b->add_object(ObjectRef("lamp", 7));
    WorldState sa(a, {});
    WorldState sb(b, {});
    CHECK_THROWS_AS(sa.diff(sb), Error);
}

TEST_CASE("facts mentioning unknown objects are rejected") {
    auto u = kitchen_universe();
    CHECK_THROWS_AS(WorldState(u, {Proposition::parse("open(cabinet.99)")}), Error);
}

TEST_CASE("canonical form is order-independent and hashes stably") {
    auto u = kitchen_universe();
    WorldState a(u, {Proposition::parse("open(fridge.97)"),
                     Proposition::parse("soaked(rag.0)")});
    WorldState b(u, {Proposition::parse("soaked(rag.0)"),
                     Proposition::parse("open(fridge.97)")});
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a == b);
}

TEST_CASE("objects shut inside a closed container are not interactable") {
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("apple", 1));
    u->add_object(ObjectRef("box", 3), {"openable"});
    WorldState closed(u, {Proposition::parse("inside(apple.1, box.3)"),
                          Proposition::parse("closed(box.3)")});
    CHECK_FALSE(closed.interactable(ObjectRef("apple", 1)));
    CHECK(closed.interactable(ObjectRef("box", 3)));
    WorldState open(u, {Proposition::parse("inside(apple.1, box.3)"),
                        Proposition::parse("open(box.3)")});
    CHECK(open.interactable(ObjectRef("apple", 1)));
}

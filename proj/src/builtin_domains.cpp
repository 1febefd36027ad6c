#include "domain.h"

#include <cctype>

namespace embeval {

namespace {

Term T(const std::string &text) {
    if (!text.empty() && text[0] == '?') return Term::make_var(text.substr(1));
    return Term::make_obj(ObjectRef::parse(text));
}

CondPtr L(const std::string &pred, const std::vector<std::string> &args) {
    std::vector<Term> terms;
    terms.reserve(args.size());
    for (const auto &a : args) terms.push_back(T(a));
    return Condition::lit(pred, std::move(terms));
}

CondPtr NL(const std::string &pred, const std::vector<std::string> &args) {
    std::vector<Term> terms;
    terms.reserve(args.size());
    for (const auto &a : args) terms.push_back(T(a));
    return Condition::lit(pred, std::move(terms), false);
}

CondPtr AND(std::vector<CondPtr> cs) { return Condition::conj(std::move(cs)); }
CondPtr OR(std::vector<CondPtr> cs) { return Condition::disj(std::move(cs)); }
CondPtr NOT(CondPtr c) { return Condition::negate(std::move(c)); }
CondPtr WHEN(CondPtr c, CondPtr e) {
    return Condition::when(std::move(c), std::move(e));
}
CondPtr ALL(const std::string &var, const std::string &type, CondPtr body) {
    return Condition::forall(var, type, std::move(body));
}
CondPtr ANY(const std::string &var, const std::string &type, CondPtr body) {
    return Condition::exists(var, type, std::move(body));
}

// ------------------------------------------------------------------ household

CondPtr right_hand_empty() {
    return NOT(ANY("held", "object", L("holding_right", {"?held"})));
}
CondPtr left_hand_empty() {
    return NOT(ANY("held", "object", L("holding_left", {"?held"})));
}
CondPtr one_hand_empty() { return OR({right_hand_empty(), left_hand_empty()}); }

// "closed if it can be opened at all"
CondPtr closed_if_openable(const std::string &t) {
    return OR({NL("openable", {t}), L("closed", {t})});
}

// "open if it can be opened at all" — containers must be open to take contents
CondPtr open_if_openable(const std::string &t) {
    return OR({NL("openable", {t}), L("open", {t})});
}

// Effect template: whatever the given hand holds ends up related to the
// target(s) and the hand is emptied.
CondPtr place_effect(const std::string &hand, CondPtr relations) {
    return ALL("held", "object",
               WHEN(L(hand, {"?held"}),
                    AND({std::move(relations), NL(hand, {"?held"})})));
}

void add_grasp(Domain &d, const std::string &side) {
    std::string hand = "holding_" + side;
    OperatorSchema s;
    s.name = side == "right" ? "right_grasp" : "left_grasp";
    s.params = {{"obj", "object"}};
    s.precondition = AND({L("interactable", {"?obj"}),
                          side == "right" ? right_hand_empty() : left_hand_empty(),
                          L("graspable", {"?obj"})});
    s.effect = AND({L(hand, {"?obj"}), NL("onfloor", {"?obj"}),
                    ALL("x", "object",
                        AND({NL("inside", {"?obj", "?x"}), NL("ontop", {"?obj", "?x"}),
                             NL("under", {"?obj", "?x"}), NL("next_to", {"?obj", "?x"}),
                             NL("next_to", {"?x", "?obj"})}))});
    d.add_schema(std::move(s));
}

void add_release(Domain &d, const std::string &side) {
    std::string hand = "holding_" + side;
    OperatorSchema s;
    s.name = side == "right" ? "right_release" : "left_release";
    s.params = {{"obj", "object"}};
    s.precondition = AND({L("interactable", {"?obj"}), L(hand, {"?obj"})});
    s.effect = AND({NL(hand, {"?obj"}), L("onfloor", {"?obj"})});
    d.add_schema(std::move(s));
}

void add_place(Domain &d, const std::string &side, const std::string &what,
               CondPtr extra_pre, CondPtr relations) {
    std::string hand = "holding_" + side;
    OperatorSchema s;
    s.name = side + "_place_" + what;
    s.params = {{"tar", "object"}};
    std::vector<CondPtr> pre{L("interactable", {"?tar"}),
                             ANY("held", "object", L(hand, {"?held"}))};
    if (extra_pre) pre.push_back(std::move(extra_pre));
    s.precondition = AND(std::move(pre));
    s.effect = place_effect(hand, std::move(relations));
    d.add_schema(std::move(s));
}

void add_transfer(Domain &d, const std::string &side, const std::string &where) {
    std::string hand = "holding_" + side;
    OperatorSchema s;
    s.name = side + "_transfer_contents_" + where;
    s.params = {{"tar", "object"}};
    std::vector<CondPtr> pre{L("interactable", {"?tar"}),
                             ANY("held", "object", L(hand, {"?held"}))};
    if (where == "inside") pre.push_back(open_if_openable("?tar"));
    s.precondition = AND(std::move(pre));
    std::string rel = where == "inside" ? "inside" : "ontop";
    // contents move; the container stays in hand
    s.effect = ALL("held", "object",
                   WHEN(L(hand, {"?held"}),
                        ALL("c", "object",
                            WHEN(L("inside", {"?c", "?held"}),
                                 AND({L(rel, {"?c", "?tar"}),
                                      NL("inside", {"?c", "?held"})})))));
    d.add_schema(std::move(s));
}

void add_place_nextto_ontop(Domain &d, const std::string &side) {
    std::string hand = "holding_" + side;
    OperatorSchema s;
    s.name = side + "_place_nextto_ontop";
    s.params = {{"tar1", "object"}, {"tar2", "object"}};
    s.precondition = AND({L("interactable", {"?tar1"}), L("interactable", {"?tar2"}),
                          ANY("held", "object", L(hand, {"?held"}))});
    s.effect = place_effect(
        hand, AND({L("next_to", {"?held", "?tar1"}), L("next_to", {"?tar1", "?held"}),
                   L("ontop", {"?held", "?tar2"})}));
    d.add_schema(std::move(s));
}

Domain build_household() {
    Domain d;
    d.set_name("behavior-symbolic");
    for (const char *p : {"inside", "ontop", "under", "next_to"}) d.add_predicate(p, 2);
    for (const char *p :
         {"onfloor", "holding_left", "holding_right", "open", "closed", "toggled_on",
          "toggled_off", "dusty", "stained", "soaked", "sliced", "frozen", "cooked",
          "interactable"})
        d.add_predicate(p, 1);
    for (const char *tag : {"openable", "toggleable", "cleaning_tool", "slicer",
                            "small", "medium", "large", "sittable", "lieable"})
        d.add_property_tag(tag);

    {
        OperatorSchema s;
        s.name = "navigate_to";
        s.params = {{"tar", "object"}};
        s.precondition = L("interactable", {"?tar"});
        s.effect = AND({L("next_to", {"agent", "?tar"}), L("next_to", {"?tar", "agent"})});
        d.add_schema(std::move(s));
    }
    add_grasp(d, "right");
    add_grasp(d, "left");
    add_release(d, "right");
    add_release(d, "left");
    for (const char *side : {"right", "left"})
        add_place(d, side, "ontop", nullptr, L("ontop", {"?held", "?tar"}));
    for (const char *side : {"right", "left"}) {
        std::string hand = std::string("holding_") + side;
        add_place(d, side, "inside",
                  AND({ANY("held", "object",
                           AND({L(hand, {"?held"}), L("size_lt", {"?held", "?tar"})})),
                       open_if_openable("?tar")}),
                  L("inside", {"?held", "?tar"}));
    }
    for (const char *side : {"right", "left"})
        add_place(d, side, "nextto", nullptr,
                  AND({L("next_to", {"?held", "?tar"}), L("next_to", {"?tar", "?held"})}));
    for (const char *side : {"right", "left"})
        add_place(d, side, "under", nullptr, L("under", {"?held", "?tar"}));
    for (const char *side : {"right", "left"}) add_transfer(d, side, "inside");
    for (const char *side : {"right", "left"}) add_transfer(d, side, "ontop");
    add_place_nextto_ontop(d, "right");
    add_place_nextto_ontop(d, "left");
    {
        OperatorSchema s;
        s.name = "toggle_on";
        s.params = {{"tar", "object"}};
        s.precondition =
            AND({L("interactable", {"?tar"}), L("toggleable", {"?tar"}),
                 one_hand_empty(), L("toggled_off", {"?tar"}),
                 closed_if_openable("?tar")});
        s.effect = AND({L("toggled_on", {"?tar"}), NL("toggled_off", {"?tar"})});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "toggle_off";
        s.params = {{"tar", "object"}};
        s.precondition = AND({L("interactable", {"?tar"}), L("toggleable", {"?tar"}),
                              one_hand_empty(), L("toggled_on", {"?tar"})});
        s.effect = AND({L("toggled_off", {"?tar"}), NL("toggled_on", {"?tar"})});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "close";
        s.params = {{"tar", "object"}};
        s.precondition = AND({L("interactable", {"?tar"}), L("openable", {"?tar"}),
                              one_hand_empty(), L("open", {"?tar"})});
        s.effect = AND({L("closed", {"?tar"}), NL("open", {"?tar"})});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "open";
        s.params = {{"tar", "object"}};
        s.precondition =
            AND({L("interactable", {"?tar"}), L("openable", {"?tar"}),
                 one_hand_empty(), L("closed", {"?tar"}), NL("toggled_on", {"?tar"})});
        s.effect = AND({L("open", {"?tar"}), NL("closed", {"?tar"})});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "clean";
        s.params = {{"tar", "object"}};
        s.precondition =
            AND({L("interactable", {"?tar"}),
                 OR({L("dusty", {"?tar"}), L("stained", {"?tar"})}),
                 ANY("tool", "cleaning_tool", L("interactable", {"?tool"}))});
        // dust comes off with any available tool; stains need the tool soaked
        s.effect = AND({NL("dusty", {"?tar"}),
                        WHEN(ANY("tool", "cleaning_tool",
                                 AND({L("interactable", {"?tool"}),
                                      L("soaked", {"?tool"})})),
                             NL("stained", {"?tar"}))});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "dry";
        s.params = {{"tar", "object"}};
        s.precondition = AND({L("interactable", {"?tar"}), L("soaked", {"?tar"})});
        s.effect = NL("soaked", {"?tar"});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "slice";
        s.params = {{"tar", "object"}};
        s.precondition = AND({L("interactable", {"?tar"}), NL("sliced", {"?tar"}),
                              ANY("k", "slicer",
                                  OR({L("holding_left", {"?k"}),
                                      L("holding_right", {"?k"})}))});
        s.effect = L("sliced", {"?tar"});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "soak";
        s.params = {{"tar", "object"}};
        s.precondition =
            AND({L("interactable", {"?tar"}), one_hand_empty(), NL("soaked", {"?tar"}),
                 OR({ANY("s", "sink",
                         AND({L("toggled_on", {"?s"}),
                              OR({L("inside", {"?tar", "?s"}),
                                  L("next_to", {"?tar", "?s"})})})),
                     ANY("p", "pot", L("inside", {"?tar", "?p"}))})});
        s.effect = L("soaked", {"?tar"});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "freeze";
        s.params = {{"tar", "object"}};
        s.precondition = AND({L("interactable", {"?tar"}), one_hand_empty(),
                              NL("frozen", {"?tar"}),
                              ANY("f", "fridge", L("inside", {"?tar", "?f"}))});
        s.effect = L("frozen", {"?tar"});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "unfreeze";
        s.params = {{"tar", "object"}};
        s.precondition = AND({L("interactable", {"?tar"}), L("frozen", {"?tar"})});
        s.effect = NL("frozen", {"?tar"});
        d.add_schema(std::move(s));
    }
    {
        OperatorSchema s;
        s.name = "cook";
        s.params = {{"tar", "object"}};
        s.precondition = AND({L("interactable", {"?tar"}), one_hand_empty(),
                              NL("cooked", {"?tar"}),
                              ANY("p", "pan",
                                  OR({L("ontop", {"?tar", "?p"}),
                                      L("inside", {"?tar", "?p"})}))});
        s.effect = L("cooked", {"?tar"});
        d.add_schema(std::move(s));
    }
    d.set_auto_navigation("navigate_to");
    d.finalize();
    return d;
}

// ---------------------------------------------------------------- virtualhome

void vh_schema(Domain &d, const std::string &name, std::vector<TypedVar> params,
               CondPtr pre, CondPtr eff) {
    OperatorSchema s;
    s.name = name;
    s.params = std::move(params);
    s.precondition = std::move(pre);
    s.effect = std::move(eff);
    s.implicit_agent = true;
    d.add_schema(std::move(s));
}

std::vector<TypedVar> char_obj() {
    return {{"char", "character"}, {"obj", "object"}};
}

Domain build_virtualhome() {
    Domain d;
    d.set_name("virtualhome-core");
    for (const char *p :
         {"next_to", "obj_next_to", "inside", "ontop", "facing", "holds_rh", "holds_lh"})
        d.add_predicate(p, 2);
    for (const char *p : {"on", "off", "open", "closed", "plugged_in", "plugged_out",
                          "sitting", "lying", "dirty", "clean", "has_plug",
                          "has_switch"})
        d.add_predicate(p, 1);
    for (const char *tag : {"openable", "grabbable", "sittable", "lieable"})
        d.add_property_tag(tag);

    vh_schema(d, "walk_towards", char_obj(),
              AND({NL("sitting", {"?char"}), NL("lying", {"?char"})}),
              AND({L("next_to", {"?char", "?obj"}),
                   ALL("o", "object",
                       WHEN(L("obj_next_to", {"?o", "?obj"}),
                            L("next_to", {"?char", "?o"}))),
                   ALL("o", "object",
                       WHEN(AND({NL("obj_next_to", {"?o", "?obj"}),
                                 Condition::lit("=", {T("?o"), T("?obj")}, false)}),
                            NL("next_to", {"?char", "?o"})))}));
    d.add_alias("walk", "walk_towards");
    d.add_alias("run", "walk_towards");
    d.add_alias("find", "walk_towards");

    vh_schema(d, "grab", char_obj(),
              AND({L("next_to", {"?char", "?obj"}), L("grabbable", {"?obj"}),
                   NOT(ANY("x", "object", L("holds_rh", {"?char", "?x"})))}),
              AND({L("holds_rh", {"?char", "?obj"}),
                   ALL("x", "object", AND({NL("ontop", {"?obj", "?x"}),
                                           NL("inside", {"?obj", "?x"})}))}));

    vh_schema(d, "open", char_obj(),
              AND({L("next_to", {"?char", "?obj"}), L("openable", {"?obj"}),
                   L("closed", {"?obj"})}),
              AND({L("open", {"?obj"}), NL("closed", {"?obj"})}));
    vh_schema(d, "close", char_obj(),
              AND({L("next_to", {"?char", "?obj"}), L("openable", {"?obj"}),
                   L("open", {"?obj"})}),
              AND({L("closed", {"?obj"}), NL("open", {"?obj"})}));

    vh_schema(d, "switch_on", char_obj(),
              AND({L("has_switch", {"?obj"}), L("off", {"?obj"}),
                   L("plugged_in", {"?obj"}), L("next_to", {"?char", "?obj"})}),
              AND({L("on", {"?obj"}), NL("off", {"?obj"})}));
    d.add_alias("switchon", "switch_on");
    vh_schema(d, "switch_off", char_obj(),
              AND({L("has_switch", {"?obj"}), L("on", {"?obj"}),
                   L("next_to", {"?char", "?obj"})}),
              AND({L("off", {"?obj"}), NL("on", {"?obj"})}));
    d.add_alias("switchoff", "switch_off");

    vh_schema(d, "plug_in", char_obj(),
              OR({AND({L("next_to", {"?char", "?obj"}), L("has_plug", {"?obj"}),
                       L("plugged_out", {"?obj"})}),
                  AND({L("next_to", {"?char", "?obj"}), L("has_switch", {"?obj"}),
                       L("plugged_out", {"?obj"})})}),
              AND({L("plugged_in", {"?obj"}), NL("plugged_out", {"?obj"})}));
    d.add_alias("plugin", "plug_in");
    vh_schema(d, "plug_out", char_obj(),
              AND({L("next_to", {"?char", "?obj"}), L("plugged_in", {"?obj"})}),
              AND({L("plugged_out", {"?obj"}), NL("plugged_in", {"?obj"})}));
    d.add_alias("plugout", "plug_out");

    vh_schema(d, "put_ontop",
              {{"char", "character"}, {"obj", "object"}, {"tar", "object"}},
              AND({L("holds_rh", {"?char", "?obj"}), L("next_to", {"?char", "?tar"})}),
              AND({L("ontop", {"?obj", "?tar"}), NL("holds_rh", {"?char", "?obj"})}));
    for (const char *alias : {"put_back", "putback", "put_on", "puton", "put"})
        d.add_alias(alias, "put_ontop");
    vh_schema(d, "put_inside",
              {{"char", "character"}, {"obj", "object"}, {"tar", "object"}},
              AND({L("holds_rh", {"?char", "?obj"}), L("next_to", {"?char", "?tar"}),
                   OR({NL("openable", {"?tar"}), L("open", {"?tar"})})}),
              AND({L("inside", {"?obj", "?tar"}), NL("holds_rh", {"?char", "?obj"})}));
    for (const char *alias : {"put_in", "putin"}) d.add_alias(alias, "put_inside");

    vh_schema(d, "sit", char_obj(),
              AND({L("next_to", {"?char", "?obj"}), L("sittable", {"?obj"}),
                   NL("sitting", {"?char"})}),
              L("sitting", {"?char"}));
    vh_schema(d, "standup", {{"char", "character"}}, L("sitting", {"?char"}),
              NL("sitting", {"?char"}));
    d.add_alias("stand_up", "standup");
    vh_schema(d, "lie", char_obj(),
              AND({L("next_to", {"?char", "?obj"}), L("lieable", {"?obj"}),
                   NL("lying", {"?char"})}),
              L("lying", {"?char"}));

    vh_schema(d, "turn_to", char_obj(), L("next_to", {"?char", "?obj"}),
              L("facing", {"?char", "?obj"}));
    d.add_alias("turnto", "turn_to");
    vh_schema(d, "lookat", char_obj(), L("facing", {"?char", "?obj"}),
              Condition::truth());
    for (const char *alias : {"lookat_short", "lookat_long", "look_at"})
        d.add_alias(alias, "lookat");
    vh_schema(d, "watch", char_obj(), L("facing", {"?char", "?obj"}),
              Condition::truth());
    vh_schema(d, "drink", char_obj(), L("holds_rh", {"?char", "?obj"}),
              Condition::truth());
    vh_schema(d, "touch", char_obj(), L("next_to", {"?char", "?obj"}),
              Condition::truth());
    vh_schema(d, "wash", char_obj(), L("next_to", {"?char", "?obj"}),
              AND({L("clean", {"?obj"}), NL("dirty", {"?obj"})}));
    vh_schema(d, "rinse", char_obj(), L("next_to", {"?char", "?obj"}),
              AND({L("clean", {"?obj"}), NL("dirty", {"?obj"})}));
    vh_schema(d, "release", char_obj(), L("holds_rh", {"?char", "?obj"}),
              NL("holds_rh", {"?char", "?obj"}));
    d.add_alias("drop", "release");

    for (const char *name : {"sleep", "wakeup", "type", "push", "pull", "squeeze",
                             "eat", "cut", "read", "point_at", "move", "scrub",
                             "pour"})
        d.add_unsupported(name);

    d.set_auto_navigation("walk_towards");
    d.finalize();
    return d;
}

} // namespace

const Domain &builtin_domain(const std::string &name) {
    static const Domain household = build_household();
    static const Domain virtualhome = build_virtualhome();
    std::string low;
    for (char c : name)
        low += static_cast<char>(tolower(static_cast<unsigned char>(c)));
    if (low == "behavior-symbolic" || low == "behavior" || low == "household")
        return household;
    if (low == "virtualhome-core" || low == "virtualhome" || low == "vh")
        return virtualhome;
    throw Error(ErrorCode::unknown_action, "no built-in domain named " + name);
}

} // namespace embeval

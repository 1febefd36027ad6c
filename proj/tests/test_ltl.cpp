#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "ltl.h"

using namespace embeval;
using namespace embeval::ltl;

namespace {

Vocabulary test_vocab() {
    Vocabulary v;
    v.predicates = {{"a", 1},        {"b", 1},         {"p", 1},
                    {"q", 1},        {"r", 2},         {"ontop", 2},
                    {"holds_rh", 2}, {"holds_lh", 2},  {"facing", 2},
                    {"next_to", 2},  {"toggled_on", 1}, {"toggled_off", 1},
                    {"soaked", 1},   {"open", 1},      {"closed", 1},
                    {"stained", 1},  {"on", 1},        {"plugged_in", 1},
                    {"nextto", 2}};
    v.actions = {{"LOOKAT", 1}, {"WATCH", 1}, {"GRAB", 1}, {"TOUCH", 2}};
    return v;
}

std::shared_ptr<Universe> small_universe(int objects) {
    auto u = std::make_shared<Universe>();
    for (int i = 0; i < objects; ++i)
        u->add_object(ObjectRef(i % 2 == 0 ? "obj" : "box", i));
    return u;
}

WorldState state_of(std::shared_ptr<const Universe> u,
                    const std::vector<std::string> &facts) {
    std::vector<Proposition> props;
    for (const auto &f : facts) props.push_back(Proposition::parse(f));
    return WorldState(std::move(u), std::move(props));
}

Trajectory traj_of(std::shared_ptr<const Universe> u,
                   const std::vector<std::vector<std::string>> &states,
                   const std::vector<std::string> &actions = {}) {
    Trajectory t;
    for (const auto &facts : states) t.states.push_back(state_of(u, facts));
    for (const auto &a : actions) {
        Proposition p = Proposition::parse(a);
        ActionRef ref;
        for (char c : p.predicate)
            ref.name += static_cast<char>(tolower(static_cast<unsigned char>(c)));
        ref.args = p.args;
        t.actions.push_back(ref);
    }
    while (t.actions.size() + 1 < t.states.size())
        t.actions.push_back({"noop", {}});
    return t;
}

// ---------------------------------------------------------------------------
// Brute-force reference evaluator: directly enumerates every segmentation and
// quantifier assignment.  Deliberately shares no code with the production
// evaluator beyond the AST type.

struct Oracle {
    const Trajectory &traj;
    const Vocabulary &vocab;

    bool free_of_then(const Formula &f) const {
        if (f.kind == FKind::then) return false;
        for (const auto &c : f.children)
            if (!free_of_then(*c)) return false;
        return true;
    }

    bool atom(const Formula &f, const std::map<std::string, ObjectRef> &env,
              int step) const {
        const Universe &u = traj.states[0].universe();
        std::vector<ObjectRef> args;
        for (const auto &a : f.args) {
            if (a.is_var) {
                args.push_back(env.at(a.var));
            } else {
                auto r = u.resolve(a.obj);
                if (!r) return false;
                args.push_back(*r);
            }
        }
        bool is_action = false;
        for (const auto &[name, arity] : vocab.actions) {
            std::string low;
            for (char c : name)
                low += static_cast<char>(tolower(static_cast<unsigned char>(c)));
            if (low == f.name && vocab.predicates.find(f.name) == vocab.predicates.end())
                is_action = true;
        }
        if (is_action) {
            if (step == 0) return false;
            const ActionRef &a = traj.actions[step - 1];
            return a.name == f.name && a.args == args;
        }
        if (traj.states[step].satisfies(Proposition(f.name, args))) return true;
        if (args.size() == 1)
            return u.implicit_unary_truth(f.name, args[0]).value_or(false);
        return false;
    }

    bool pointwise(const Formula &f, const std::map<std::string, ObjectRef> &env,
                   int step) const {
        switch (f.kind) {
        case FKind::atom: return atom(f, env, step);
        case FKind::not_: return !pointwise(*f.children[0], env, step);
        case FKind::and_: {
            for (const auto &c : f.children)
                if (!pointwise(*c, env, step)) return false;
            return true;
        }
        case FKind::or_: {
            for (const auto &c : f.children)
                if (pointwise(*c, env, step)) return true;
            return false;
        }
        case FKind::implies:
            return !pointwise(*f.children[0], env, step) ||
                   pointwise(*f.children[1], env, step);
        case FKind::forall:
        case FKind::exists:
        case FKind::forn: {
            int n = 0, total = 0;
            for (const auto &obj : traj.states[0].universe().objects()) {
                auto e = env;
                e[f.var] = obj;
                ++total;
                if (pointwise(*f.children[0], e, step)) ++n;
            }
            if (f.kind == FKind::forall) return n == total;
            if (f.kind == FKind::exists) return n > 0;
            return n == f.count;
        }
        case FKind::then: break;
        }
        return false;
    }

    bool range(const Formula &f, const std::map<std::string, ObjectRef> &env,
               int lo, int hi) const {
        if (free_of_then(f)) {
            for (int i = lo; i <= hi; ++i)
                if (pointwise(f, env, i)) return true;
            return false;
        }
        switch (f.kind) {
        case FKind::then: {
            // enumerate every choice of m-1 ascending cut points
            int m = static_cast<int>(f.children.size());
            if (hi - lo + 1 < m) return false;
            std::vector<int> cuts(m - 1);
            for (int i = 0; i < m - 1; ++i) cuts[i] = lo + i;
            while (true) {
                bool ok = true;
                int start = lo;
                for (int i = 0; i < m && ok; ++i) {
                    int end = i == m - 1 ? hi : cuts[i];
                    if (!range(*f.children[i], env, start, end)) ok = false;
                    start = end + 1;
                }
                if (ok) return true;
                // advance the cut vector
                int k = m - 2;
                while (k >= 0 && cuts[k] == hi - 1 - (m - 2 - k)) --k;
                if (k < 0) break;
                ++cuts[k];
                for (int i = k + 1; i < m - 1; ++i) cuts[i] = cuts[i - 1] + 1;
            }
            return false;
        }
        case FKind::and_: {
            for (const auto &c : f.children)
                if (!range(*c, env, lo, hi)) return false;
            return true;
        }
        case FKind::or_: {
            for (const auto &c : f.children)
                if (range(*c, env, lo, hi)) return true;
            return false;
        }
        case FKind::implies: {
            for (int i = lo; i <= hi; ++i)
                if (!pointwise(*f.children[0], env, i)) return true;
            return range(*f.children[1], env, lo, hi);
        }
        case FKind::forall:
        case FKind::exists:
        case FKind::forn: {
            int n = 0, total = 0;
            for (const auto &obj : traj.states[0].universe().objects()) {
                auto e = env;
                e[f.var] = obj;
                ++total;
                if (range(*f.children[0], e, lo, hi)) ++n;
            }
            if (f.kind == FKind::forall) return n == total;
            if (f.kind == FKind::exists) return n > 0;
            return n == f.count;
        }
        default:
            return false;
        }
    }

    bool run(const FormulaPtr &f) const {
        return range(*f, {}, 0, static_cast<int>(traj.states.size()) - 1);
    }
};

// -------------------------------------------------- random case generation

struct CaseGen {
    std::mt19937 rng;
    std::vector<std::string> unary{"p", "q"};
    std::vector<std::string> binary{"r"};
    std::vector<std::string> acts{"grab", "touch"};
    int then_budget = 4;
    std::vector<std::string> scope;

    explicit CaseGen(unsigned seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    ArgPattern arg(int objects) {
        if (!scope.empty() && pick(3) == 0)
            return ArgPattern::make_var(scope[pick(static_cast<int>(scope.size()))]);
        int i = pick(objects);
        return ArgPattern::make_obj(ObjectRef(i % 2 == 0 ? "obj" : "box", i));
    }

    FormulaPtr atom(int objects) {
        int c = pick(4);
        if (c == 0) {
            std::string name = acts[pick(2)];
            std::vector<ArgPattern> args{arg(objects)};
            if (name == "touch") args.push_back(arg(objects));
            return Formula::atom(name, std::move(args));
        }
        if (c == 1) return Formula::atom(binary[0], {arg(objects), arg(objects)});
        return Formula::atom(unary[pick(2)], {arg(objects)});
    }

    FormulaPtr gen(int depth, int objects, bool allow_then) {
        if (depth <= 0) return atom(objects);
        switch (pick(7)) {
        case 0: { // not (then-free child)
            return Formula::negate(gen(depth - 1, objects, false));
        }
        case 1: {
            std::vector<FormulaPtr> cs;
            int n = 2 + pick(2);
            for (int i = 0; i < n; ++i) cs.push_back(gen(depth - 1, objects, allow_then));
            return Formula::conj(std::move(cs));
        }
        case 2: {
            std::vector<FormulaPtr> cs;
            int n = 2 + pick(2);
            for (int i = 0; i < n; ++i) cs.push_back(gen(depth - 1, objects, allow_then));
            return Formula::disj(std::move(cs));
        }
        case 3: {
            std::string var = "x" + std::to_string(scope.size());
            scope.push_back(var);
            FormulaPtr body = gen(depth - 1, objects, allow_then);
            scope.pop_back();
            int q = pick(3);
            if (q == 0) return Formula::forall(var, body);
            if (q == 1) return Formula::exists(var, body);
            return Formula::forn(pick(3), var, body);
        }
        case 4:
        case 5: {
            if (!allow_then || then_budget <= 0) return atom(objects);
            int n = std::min(2 + pick(3), then_budget);
            then_budget -= 1;
            std::vector<FormulaPtr> cs;
            for (int i = 0; i < n; ++i) cs.push_back(gen(depth - 1, objects, allow_then));
            return Formula::then(std::move(cs));
        }
        default:
            return atom(objects);
        }
    }

    Trajectory trajectory(std::shared_ptr<const Universe> u, int objects) {
        Trajectory t;
        int steps = 1 + pick(6);
        for (int s = 0; s < steps; ++s) {
            std::vector<Proposition> facts;
            for (int i = 0; i < objects; ++i) {
                ObjectRef oi(i % 2 == 0 ? "obj" : "box", i);
                if (pick(2)) facts.push_back(Proposition("p", {oi}));
                if (pick(2)) facts.push_back(Proposition("q", {oi}));
                for (int j = 0; j < objects; ++j)
                    if (pick(4) == 0)
                        facts.push_back(Proposition(
                            "r", {oi, ObjectRef(j % 2 == 0 ? "obj" : "box", j)}));
            }
            t.states.push_back(WorldState(u, std::move(facts)));
        }
        for (int s = 1; s < steps; ++s) {
            ActionRef a;
            a.name = acts[pick(2)];
            a.args.push_back(ObjectRef(pick(objects) % 2 == 0 ? "obj" : "box",
                                       pick(objects)));
            if (a.name == "touch")
                a.args.push_back(ObjectRef(pick(objects) % 2 == 0 ? "obj" : "box",
                                           pick(objects)));
            // keep args consistent with the alternating category scheme
            for (auto &argref : a.args)
                argref.category = argref.instance_id % 2 == 0 ? "obj" : "box";
            t.actions.push_back(a);
        }
        return t;
    }
};

} // namespace

TEST_CASE("precedence: and binds tighter than or") {
    auto f = parse("a(x.0) and b(x.0) or p(x.0)");
    REQUIRE(f->kind == FKind::or_);
    REQUIRE(f->children.size() == 2);
    CHECK(f->children[0]->kind == FKind::and_);
    CHECK(f->children[1]->kind == FKind::atom);
}

TEST_CASE("then chains flatten into one node") {
    auto f = parse("a(x.0) then b(x.0) then p(x.0)");
    REQUIRE(f->kind == FKind::then);
    CHECK(f->children.size() == 3);
}

TEST_CASE("desk setup goal parses to then over state formulas") {
    auto f = parse("ontop(character, chair) then holds_rh(character, mouse) and "
                   "holds_lh(character, keyboard) then facing(character, computer)");
    REQUIRE(f->kind == FKind::then);
    REQUIRE(f->children.size() == 3);
    CHECK(f->children[0]->kind == FKind::atom);
    CHECK(f->children[1]->kind == FKind::and_);
    CHECK(f->children[1]->children.size() == 2);
    CHECK(f->children[2]->kind == FKind::atom);
}

TEST_CASE("television goal parses with scoped quantifier then conjunction") {
    auto f = parse("(exists x0. ((LOOKAT(x0) or WATCH(x0))) then (ON(television.410) "
                   "and PLUGGED_IN(television.410) and FACING(character.65, "
                   "television.410)))");
    REQUIRE(f->kind == FKind::then);
    REQUIRE(f->children.size() == 2);
    CHECK(f->children[0]->kind == FKind::exists);
    CHECK(f->children[0]->children[0]->kind == FKind::or_);
    CHECK(f->children[1]->kind == FKind::and_);
    CHECK(f->children[1]->children.size() == 3);
}

TEST_CASE("parse errors carry byte offsets") {
    try {
        parse("open(fridge.97");
        FAIL("expected parse error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::parse_error);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("then a(x.0)"), Error);
    CHECK_THROWS_AS(parse("a(x.0) b(x.0)"), Error);
}

TEST_CASE("forn accepts both count dialects") {
    auto f = parse("forn(2) x. (p(x))");
    REQUIRE(f->kind == FKind::forn);
    CHECK(f->count == 2);
    auto g = parse("forn2 x. (p(x))");
    REQUIRE(g->kind == FKind::forn);
    CHECK(g->count == 2);
    CHECK(equal(f, g));
}

TEST_CASE("validator rejects negation over then and free variables") {
    CHECK_THROWS_AS(validate(parse("not (a(x.0) then b(x.0))")), Error);
    CHECK_NOTHROW(validate(parse("not (a(x.0) and b(x.0))")));
    auto free_var = Formula::atom("p", {ArgPattern::make_var("z")});
    CHECK_THROWS_AS(validate(free_var), Error);
}

TEST_CASE("quantifier scope ends with its parenthesized body") {
    // x0 is only bound inside the exists body; a later occurrence is a
    // bare constant, not a variable.
    auto f = parse("exists x0. (p(x0)) then q(x0)");
    REQUIRE(f->kind == FKind::then);
    CHECK(f->children[0]->children[0]->args[0].is_var);
    CHECK_FALSE(f->children[1]->args[0].is_var);
}

TEST_CASE("render round-trips through parse") {
    for (const std::string text : {
             "a(x.0) and b(x.0) or p(x.0)",
             "a(x.0) then b(x.0) then p(x.0)",
             "not (a(x.0) and b(x.0))",
             "forall x. (p(x) or q(x))",
             "forn(2) x. (p(x))",
             "exists x0. (lookat(x0) or watch(x0)) then on(television.410)",
             "(a(x.0) then b(x.0)) then p(x.0)",
         }) {
        auto f = parse(text);
        auto g = parse(render(f));
        CHECK(equal(f, g));
    }
}

TEST_CASE("state formulas hold eventually, at a single step") {
    auto u = small_universe(2);
    auto vocab = test_vocab();
    // p and q are never true at the same step: the conjunction fails even
    // though each conjunct is separately reachable.
    auto t = traj_of(u, {{"p(obj.0)"}, {"q(obj.0)"}});
    CHECK(evaluate(parse("p(obj.0)"), t, vocab));
    CHECK(evaluate(parse("q(obj.0)"), t, vocab));
    CHECK_FALSE(evaluate(parse("p(obj.0) and q(obj.0)"), t, vocab));
    auto t2 = traj_of(u, {{}, {"p(obj.0)", "q(obj.0)"}});
    CHECK(evaluate(parse("p(obj.0) and q(obj.0)"), t2, vocab));
}

TEST_CASE("then requires the right temporal order") {
    auto u = small_universe(2);
    auto vocab = test_vocab();
    // four steps; a only at step 2, b only at step 1: wrong order
    auto wrong = traj_of(u, {{}, {"q(obj.0)"}, {"p(obj.0)"}, {}});
    CHECK_FALSE(evaluate(parse("p(obj.0) then q(obj.0)"), wrong, vocab));
    // a at step 1, b at step 3: correct order
    auto right = traj_of(u, {{}, {"p(obj.0)"}, {}, {"q(obj.0)"}});
    CHECK(evaluate(parse("p(obj.0) then q(obj.0)"), right, vocab));
}

TEST_CASE("then segments need at least one step each") {
    auto u = small_universe(2);
    auto vocab = test_vocab();
    // both parts only true at the single step: no way to split
    auto t = traj_of(u, {{"p(obj.0)", "q(obj.0)"}});
    CHECK_FALSE(evaluate(parse("p(obj.0) then q(obj.0)"), t, vocab));
}

TEST_CASE("nested then evaluates like the flattened chain") {
    auto u = small_universe(2);
    auto vocab = test_vocab();
    auto flat = parse("p(obj.0) then q(obj.0) then p(box.1)");
    auto nested = Formula::then({parse("p(obj.0) then q(obj.0)"), parse("p(box.1)")});
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<std::vector<std::string>> states;
        for (int s = 0; s < 4; ++s) {
            std::vector<std::string> facts;
            if (mask & (1 << s)) facts.push_back("p(obj.0)");
            if (s % 2) facts.push_back("q(obj.0)");
            if (s == 3) facts.push_back("p(box.1)");
            states.push_back(facts);
        }
        auto t = traj_of(u, states);
        CHECK(evaluate(flat, t, vocab) == evaluate(nested, t, vocab));
    }
}

TEST_CASE("action atoms never hold at step 0") {
    auto u = small_universe(2);
    auto vocab = test_vocab();
    Trajectory t = traj_of(u, {{}, {}}, {"GRAB(obj.0)"});
    CHECK(evaluate(parse("GRAB(obj.0)"), t, vocab));
    Trajectory single = traj_of(u, {{}});
    CHECK_FALSE(evaluate(parse("GRAB(obj.0)"), single, vocab));
}

TEST_CASE("quantifiers range over the whole universe") {
    auto u = small_universe(3); // obj.0, box.1, obj.2
    auto vocab = test_vocab();
    auto all = traj_of(u, {{"p(obj.0)", "p(box.1)", "p(obj.2)"}});
    CHECK(evaluate(parse("forall x. (p(x))"), all, vocab));
    auto two = traj_of(u, {{"p(obj.0)", "p(obj.2)"}});
    CHECK_FALSE(evaluate(parse("forall x. (p(x))"), two, vocab));
    CHECK(evaluate(parse("exists x. (p(x))"), two, vocab));
    CHECK(evaluate(parse("forn(2) x. (p(x))"), two, vocab));
    CHECK_FALSE(evaluate(parse("forn(1) x. (p(x))"), two, vocab));
    CHECK_FALSE(evaluate(parse("forn(3) x. (p(x))"), two, vocab));
}

TEST_CASE("category names restrict quantified variables inside formulas") {
    auto u = small_universe(3);
    auto vocab = test_vocab();
    auto t = traj_of(u, {{"p(obj.0)", "p(obj.2)"}});
    CHECK(evaluate(parse("forall x. (not obj(x) or p(x))"), t, vocab));
    CHECK_FALSE(evaluate(parse("forall x. (not box(x) or p(x))"), t, vocab));
}

TEST_CASE("de morgan over a single-step trajectory") {
    auto u = small_universe(2);
    auto vocab = test_vocab();
    for (const auto &facts : std::vector<std::vector<std::string>>{
             {}, {"a(obj.0)"}, {"b(obj.0)"}, {"a(obj.0)", "b(obj.0)"}}) {
        auto t = traj_of(u, {facts});
        bool lhs = evaluate(parse("not (a(obj.0) and b(obj.0))"), t, vocab);
        bool rhs = evaluate(parse("not a(obj.0) or not b(obj.0)"), t, vocab);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("arity mismatches raise vocabulary errors at evaluation") {
    auto u = small_universe(2);
    auto vocab = test_vocab();
    auto t = traj_of(u, {{}});
    CHECK_THROWS_AS(evaluate(parse("r(obj.0)"), t, vocab), Error);
}

TEST_CASE("lint flags hallucinated objects, names, and arity errors") {
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("a", 0));
    u->add_object(ObjectRef("b", 1));
    u->add_object(ObjectRef("c", 2));
    auto vocab = test_vocab();

    auto findings = lint(parse("open(kitchen.1)"), vocab, *u);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == LintFinding::Kind::hallucination);
    CHECK(findings[0].subject_kind == LintFinding::Subject::object);
    CHECK(findings[0].subject == "kitchen.1");

    findings = lint(parse("nextto(a.0, b.1, c.2)"), vocab, *u);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == LintFinding::Kind::arity);
    CHECK(findings[0].subject == "nextto");
    CHECK(findings[0].expected == 2);
    CHECK(findings[0].got == 3);

    findings = lint(parse("nextto(a.0, b.1)"), vocab, *u);
    CHECK(findings.empty());

    findings = lint(parse("POUR(a.0)"), vocab, *u);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == LintFinding::Kind::hallucination);
    CHECK(findings[0].subject_kind == LintFinding::Subject::action);
}

TEST_CASE("bare category constants resolve against unique instances") {
    auto u = std::make_shared<Universe>();
    u->add_object(ObjectRef("character", 65));
    u->add_object(ObjectRef("chair", 11));
    auto vocab = test_vocab();
    auto t = traj_of(u, {{"ontop(character.65, chair.11)"}});
    CHECK(evaluate(parse("ontop(character, chair)"), t, vocab));
}

TEST_CASE("production evaluator agrees with the brute-force oracle") {
    auto vocab = test_vocab();
    CaseGen gen(20240817u);
    int cases = 0;
    while (cases < 1200) {
        int objects = 1 + gen.pick(4);
        auto u = small_universe(objects);
        gen.then_budget = 4;
        FormulaPtr f = gen.gen(1 + gen.pick(3), objects, true);
        Trajectory t = gen.trajectory(u, objects);
        try {
            validate(f);
        } catch (const Error &) {
            continue; // generator occasionally emits rejected shapes; skip
        }
        bool fast = evaluate(f, t, vocab);
        bool slow = Oracle{t, vocab}.run(f);
        CHECK(fast == slow);
        if (fast != slow) {
            MESSAGE("formula: " << render(f));
            break;
        }
        ++cases;
    }
    CHECK(cases == 1200);
}

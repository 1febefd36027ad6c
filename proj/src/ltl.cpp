#include "ltl.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <tuple>

namespace embeval {

static std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

static std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

std::string ActionRef::str() const {
    std::ostringstream out;
    out << upper(name) << "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out << ", ";
        out << args[i].str();
    }
    out << ")";
    return out.str();
}

void Trajectory::check() const {
    if (states.empty())
        throw Error(ErrorCode::validation_error, "trajectory has no states");
    if (states.size() != actions.size() + 1)
        throw Error(ErrorCode::validation_error,
                    "trajectory has " + std::to_string(states.size()) +
                        " states and " + std::to_string(actions.size()) +
                        " actions");
}

namespace ltl {

ArgPattern ArgPattern::make_var(std::string name) {
    ArgPattern p;
    p.is_var = true;
    p.var = std::move(name);
    return p;
}

ArgPattern ArgPattern::make_obj(ObjectRef ref) {
    ArgPattern p;
    p.obj = std::move(ref);
    return p;
}

std::string ArgPattern::str() const { return is_var ? var : obj.str(); }

static bool any_then(const std::vector<FormulaPtr> &fs) {
    for (const auto &f : fs)
        if (f->contains_then) return true;
    return false;
}

FormulaPtr Formula::atom(std::string name, std::vector<ArgPattern> args) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::atom;
    f->source_name = name;
    f->name = lower(std::move(name));
    f->args = std::move(args);
    return f;
}

FormulaPtr Formula::negate(FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::not_;
    f->contains_then = child->contains_then;
    f->children = {std::move(child)};
    return f;
}

static FormulaPtr composite(FKind kind, std::vector<FormulaPtr> fs) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->contains_then = kind == FKind::then || any_then(fs);
    f->children = std::move(fs);
    return f;
}

FormulaPtr Formula::conj(std::vector<FormulaPtr> fs) {
    return composite(FKind::and_, std::move(fs));
}
FormulaPtr Formula::disj(std::vector<FormulaPtr> fs) {
    return composite(FKind::or_, std::move(fs));
}
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
    return composite(FKind::implies, {std::move(a), std::move(b)});
}
FormulaPtr Formula::then(std::vector<FormulaPtr> fs) {
    return composite(FKind::then, std::move(fs));
}

static FormulaPtr quantifier(FKind kind, std::string var, FormulaPtr body, int n) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->var = lower(std::move(var));
    f->count = n;
    f->contains_then = body->contains_then;
    f->children = {std::move(body)};
    return f;
}

FormulaPtr Formula::forall(std::string var, FormulaPtr body) {
    return quantifier(FKind::forall, std::move(var), std::move(body), 0);
}
FormulaPtr Formula::exists(std::string var, FormulaPtr body) {
    return quantifier(FKind::exists, std::move(var), std::move(body), 0);
}
FormulaPtr Formula::forn(int n, std::string var, FormulaPtr body) {
    return quantifier(FKind::forn, std::move(var), std::move(body), n);
}

bool equal(const FormulaPtr &a, const FormulaPtr &b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case FKind::atom:
        return a->name == b->name && a->args == b->args;
    case FKind::forall:
    case FKind::exists:
    case FKind::forn:
        if (a->var != b->var || a->count != b->count) return false;
        break;
    default:
        break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (size_t i = 0; i < a->children.size(); ++i)
        if (!equal(a->children[i], b->children[i])) return false;
    return true;
}

// ---------------------------------------------------------------- tokenizer

namespace {

enum class TokKind { ident, integer, lparen, rparen, dot, comma, end };

struct Token {
    TokKind kind;
    std::string text;
    size_t offset;
};

struct Lexer {
    const std::string &src;
    size_t pos = 0;
    std::vector<Token> tokens;

    explicit Lexer(const std::string &s) : src(s) { run(); }

    void run() {
        while (pos < src.size()) {
            char c = src[pos];
            if (isspace(static_cast<unsigned char>(c))) {
                ++pos;
                continue;
            }
            size_t start = pos;
            if (c == '(') {
                tokens.push_back({TokKind::lparen, "(", start});
                ++pos;
            } else if (c == ')') {
                tokens.push_back({TokKind::rparen, ")", start});
                ++pos;
            } else if (c == ',') {
                tokens.push_back({TokKind::comma, ",", start});
                ++pos;
            } else if (c == '.') {
                tokens.push_back({TokKind::dot, ".", start});
                ++pos;
            } else if (isdigit(static_cast<unsigned char>(c))) {
                while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos])))
                    ++pos;
                tokens.push_back({TokKind::integer, src.substr(start, pos - start), start});
            } else if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
                while (pos < src.size() &&
                       (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                    ++pos;
                // attach ".<digits>" object-id suffixes to the identifier
                if (pos + 1 < src.size() && src[pos] == '.' &&
                    isdigit(static_cast<unsigned char>(src[pos + 1]))) {
                    ++pos;
                    while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos])))
                        ++pos;
                }
                tokens.push_back({TokKind::ident, src.substr(start, pos - start), start});
            } else {
                throw Error(ErrorCode::parse_error,
                            "at byte " + std::to_string(start) +
                                ": unexpected character '" + std::string(1, c) + "'");
            }
        }
        tokens.push_back({TokKind::end, "", src.size()});
    }
};

bool is_keyword(const std::string &lowered) {
    return lowered == "then" || lowered == "or" || lowered == "and" ||
           lowered == "not" || lowered == "forall" || lowered == "exists" ||
           lowered == "forn";
}

// "forn3" style: returns the count, or -1 when the token is not of that shape.
int forn_suffix(const std::string &lowered) {
    if (lowered.size() <= 4 || lowered.compare(0, 4, "forn") != 0) return -1;
    int n = 0;
    for (size_t i = 4; i < lowered.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(lowered[i]))) return -1;
        n = n * 10 + (lowered[i] - '0');
    }
    return n;
}

struct Parser {
    const std::vector<Token> &toks;
    size_t at = 0;
    std::vector<std::string> scope;

    explicit Parser(const std::vector<Token> &t) : toks(t) {}

    const Token &peek() const { return toks[at]; }

    [[noreturn]] void fail(const std::string &expected) const {
        const Token &t = peek();
        std::string got = t.kind == TokKind::end ? "end of input" : "'" + t.text + "'";
        throw Error(ErrorCode::parse_error, "at byte " + std::to_string(t.offset) +
                                                ": expected " + expected + ", got " + got);
    }

    Token take(TokKind kind, const std::string &expected) {
        if (peek().kind != kind) fail(expected);
        return toks[at++];
    }

    bool keyword(const std::string &kw) {
        if (peek().kind == TokKind::ident && lower(peek().text) == kw) {
            ++at;
            return true;
        }
        return false;
    }

    bool in_scope(const std::string &name) const {
        return std::find(scope.begin(), scope.end(), name) != scope.end();
    }

    FormulaPtr parse_then() {
        std::vector<FormulaPtr> parts{parse_or()};
        while (keyword("then")) parts.push_back(parse_or());
        if (parts.size() == 1) return parts[0];
        return Formula::then(std::move(parts));
    }

    FormulaPtr parse_or() {
        std::vector<FormulaPtr> parts{parse_and()};
        while (keyword("or")) parts.push_back(parse_and());
        if (parts.size() == 1) return parts[0];
        return Formula::disj(std::move(parts));
    }

    FormulaPtr parse_and() {
        std::vector<FormulaPtr> parts{parse_primitive()};
        while (keyword("and")) parts.push_back(parse_primitive());
        if (parts.size() == 1) return parts[0];
        return Formula::conj(std::move(parts));
    }

    FormulaPtr parse_quantifier_tail(FKind kind, int count) {
        Token var = take(TokKind::ident, "quantifier variable");
        std::string name = lower(var.text);
        if (is_keyword(name) || name.find('.') != std::string::npos)
            fail("quantifier variable");
        take(TokKind::dot, "'.'");
        take(TokKind::lparen, "'('");
        scope.push_back(name);
        FormulaPtr body = parse_then();
        scope.pop_back();
        take(TokKind::rparen, "')'");
        switch (kind) {
        case FKind::forall: return Formula::forall(name, body);
        case FKind::exists: return Formula::exists(name, body);
        default: return Formula::forn(count, name, body);
        }
    }

    FormulaPtr parse_primitive() {
        const Token &t = peek();
        if (t.kind == TokKind::lparen) {
            ++at;
            FormulaPtr inner = parse_then();
            take(TokKind::rparen, "')'");
            return inner;
        }
        if (t.kind != TokKind::ident) fail("a formula");
        std::string low = lower(t.text);
        if (low == "not") {
            ++at;
            return Formula::negate(parse_primitive());
        }
        if (low == "forall") {
            ++at;
            return parse_quantifier_tail(FKind::forall, 0);
        }
        if (low == "exists") {
            ++at;
            return parse_quantifier_tail(FKind::exists, 0);
        }
        if (low == "forn") {
            ++at;
            take(TokKind::lparen, "'(' before the forn count");
            Token n = take(TokKind::integer, "forn count");
            take(TokKind::rparen, "')'");
            return parse_quantifier_tail(FKind::forn, std::stoi(n.text));
        }
        if (int n = forn_suffix(low); n >= 0) {
            ++at;
            return parse_quantifier_tail(FKind::forn, n);
        }
        if (is_keyword(low)) fail("a formula");
        return parse_atom();
    }

    FormulaPtr parse_atom() {
        Token name = take(TokKind::ident, "predicate or action name");
        take(TokKind::lparen, "'(' after " + name.text);
        std::vector<ArgPattern> args;
        if (peek().kind != TokKind::rparen) {
            args.push_back(parse_arg());
            while (peek().kind == TokKind::comma) {
                ++at;
                args.push_back(parse_arg());
            }
        }
        take(TokKind::rparen, "')'");
        auto f = Formula::atom(name.text, std::move(args));
        const_cast<Formula &>(*f).source_name = name.text;
        return f;
    }

    ArgPattern parse_arg() {
        Token t = take(TokKind::ident, "argument");
        std::string low = lower(t.text);
        if (low.find('.') == std::string::npos && in_scope(low))
            return ArgPattern::make_var(low);
        return ArgPattern::make_obj(ObjectRef::parse(low));
    }
};

} // namespace

FormulaPtr parse(const std::string &text) {
    Lexer lexer(text);
    Parser parser(lexer.tokens);
    FormulaPtr f = parser.parse_then();
    if (parser.peek().kind != TokKind::end) parser.fail("end of input");
    return f;
}

// ------------------------------------------------------------------ render

namespace {

// precedence levels: then=0 < or=1 < and=2 < not=3 < primary=4
int level_of(const Formula &f) {
    switch (f.kind) {
    case FKind::then: return 0;
    case FKind::or_:
    case FKind::implies: return 1;
    case FKind::and_: return 2;
    case FKind::not_: return 3;
    default: return 4;
    }
}

void render_into(const FormulaPtr &f, int min_level, std::ostream &out) {
    bool parens = level_of(*f) < min_level;
    if (parens) out << "(";
    switch (f->kind) {
    case FKind::atom: {
        out << f->name << "(";
        for (size_t i = 0; i < f->args.size(); ++i) {
            if (i) out << ", ";
            out << f->args[i].str();
        }
        out << ")";
        break;
    }
    case FKind::not_:
        out << "not ";
        render_into(f->children[0], 3, out);
        break;
    case FKind::and_:
        for (size_t i = 0; i < f->children.size(); ++i) {
            if (i) out << " and ";
            render_into(f->children[i], 3, out);
        }
        break;
    case FKind::or_:
        for (size_t i = 0; i < f->children.size(); ++i) {
            if (i) out << " or ";
            render_into(f->children[i], 2, out);
        }
        break;
    case FKind::implies:
        out << "not ";
        render_into(f->children[0], 3, out);
        out << " or ";
        render_into(f->children[1], 2, out);
        break;
    case FKind::then:
        for (size_t i = 0; i < f->children.size(); ++i) {
            if (i) out << " then ";
            render_into(f->children[i], 1, out);
        }
        break;
    case FKind::forall:
    case FKind::exists:
    case FKind::forn:
        if (f->kind == FKind::forall) out << "forall ";
        else if (f->kind == FKind::exists) out << "exists ";
        else out << "forn(" << f->count << ") ";
        out << f->var << ". (";
        render_into(f->children[0], 0, out);
        out << ")";
        break;
    }
    if (parens) out << ")";
}

} // namespace

std::string render(const FormulaPtr &f) {
    std::ostringstream out;
    render_into(f, 0, out);
    return out.str();
}

// ---------------------------------------------------------------- validate

namespace {

void validate_rec(const FormulaPtr &f, std::vector<std::string> &scope) {
    switch (f->kind) {
    case FKind::atom:
        for (const auto &arg : f->args)
            if (arg.is_var &&
                std::find(scope.begin(), scope.end(), arg.var) == scope.end())
                throw Error(ErrorCode::validation_error,
                            "free variable " + arg.var + " in " + f->name);
        return;
    case FKind::not_:
        if (f->children[0]->contains_then)
            throw Error(ErrorCode::validation_error,
                        "negation over a temporal ('then') subformula");
        break;
    case FKind::implies:
        if (f->children[0]->contains_then)
            throw Error(ErrorCode::validation_error,
                        "temporal ('then') subformula as implication antecedent");
        break;
    case FKind::forall:
    case FKind::exists:
    case FKind::forn:
        if (f->kind == FKind::forn && f->count < 0)
            throw Error(ErrorCode::validation_error, "negative forn count");
        scope.push_back(f->var);
        validate_rec(f->children[0], scope);
        scope.pop_back();
        return;
    default:
        break;
    }
    for (const auto &child : f->children) validate_rec(child, scope);
}

} // namespace

void validate(const FormulaPtr &f) {
    std::vector<std::string> scope;
    validate_rec(f, scope);
}

// ---------------------------------------------------------------- evaluate

namespace {

struct EvalContext {
    const Trajectory &traj;
    const Vocabulary &vocab;
    const Universe &universe;
    std::map<std::string, ObjectRef> binding;
    // memo over (then-node, child index, segment start, segment end); only
    // consulted while no quantifier binding is live.
    std::map<std::tuple<const Formula *, int, int, int>, bool> memo;

    bool action_lookup(const std::string &name, int *arity) const {
        for (const auto &[act, n] : vocab.actions) {
            if (lower(act) == name) {
                *arity = n;
                return true;
            }
        }
        return false;
    }

    std::optional<ObjectRef> resolve_arg(const ArgPattern &arg) const {
        if (arg.is_var) {
            auto it = binding.find(arg.var);
            if (it == binding.end())
                throw Error(ErrorCode::validation_error, "unbound variable " + arg.var);
            return it->second;
        }
        return universe.resolve(arg.obj);
    }

    bool atom_at(const Formula &f, size_t step) {
        std::vector<ObjectRef> resolved;
        resolved.reserve(f.args.size());
        for (const auto &arg : f.args) {
            auto obj = resolve_arg(arg);
            if (!obj) return false; // unknown object: closed world, lint reports it
            resolved.push_back(*obj);
        }
        auto pred = vocab.predicates.find(f.name);
        if (pred != vocab.predicates.end()) {
            if (static_cast<int>(resolved.size()) != pred->second)
                throw Error(ErrorCode::vocabulary_error,
                            f.name + " expects " + std::to_string(pred->second) +
                                " arguments, got " + std::to_string(resolved.size()));
            const WorldState &state = traj.states[step];
            Proposition prop(f.name, resolved);
            if (state.satisfies(prop)) return true;
            if (resolved.size() == 1)
                return universe.implicit_unary_truth(f.name, resolved[0]).value_or(false);
            return false;
        }
        int action_arity = 0;
        if (action_lookup(f.name, &action_arity)) {
            if (static_cast<int>(resolved.size()) != action_arity)
                throw Error(ErrorCode::vocabulary_error,
                            f.name + " expects " + std::to_string(action_arity) +
                                " arguments, got " + std::to_string(resolved.size()));
            if (step == 0) return false; // no incoming action at step 0
            const ActionRef &act = traj.actions[step - 1];
            return act.name == f.name && act.args == resolved;
        }
        if (resolved.size() == 1) {
            auto implicit = universe.implicit_unary_truth(f.name, resolved[0]);
            if (implicit) return *implicit;
        }
        return false; // unknown vocabulary: lint reports it, evaluation is false
    }

    bool holds_at(const Formula &f, size_t step) {
        switch (f.kind) {
        case FKind::atom:
            return atom_at(f, step);
        case FKind::not_:
            return !holds_at(*f.children[0], step);
        case FKind::and_:
            for (const auto &c : f.children)
                if (!holds_at(*c, step)) return false;
            return true;
        case FKind::or_:
            for (const auto &c : f.children)
                if (holds_at(*c, step)) return true;
            return false;
        case FKind::implies:
            return !holds_at(*f.children[0], step) || holds_at(*f.children[1], step);
        case FKind::forall:
        case FKind::exists:
        case FKind::forn: {
            int hits = 0;
            for (const auto &obj : universe.objects()) {
                auto saved = binding;
                binding[f.var] = obj;
                bool sat = holds_at(*f.children[0], step);
                binding = saved;
                if (f.kind == FKind::forall && !sat) return false;
                if (f.kind == FKind::exists && sat) return true;
                if (sat) ++hits;
            }
            if (f.kind == FKind::forall) return true;
            if (f.kind == FKind::exists) return false;
            return hits == f.count;
        }
        case FKind::then:
            throw Error(ErrorCode::internal_error, "pointwise 'then'");
        }
        return false;
    }

    // f over the inclusive step range [lo, hi].
    bool eval_range(const Formula &f, int lo, int hi) {
        if (!f.contains_then) {
            for (int i = lo; i <= hi; ++i)
                if (holds_at(f, static_cast<size_t>(i))) return true;
            return false;
        }
        switch (f.kind) {
        case FKind::then:
            return then_split(f, 0, lo, hi);
        case FKind::and_:
            for (const auto &c : f.children)
                if (!eval_range(*c, lo, hi)) return false;
            return true;
        case FKind::or_:
            for (const auto &c : f.children)
                if (eval_range(*c, lo, hi)) return true;
            return false;
        case FKind::implies: {
            for (int i = lo; i <= hi; ++i)
                if (!holds_at(*f.children[0], static_cast<size_t>(i))) return true;
            return eval_range(*f.children[1], lo, hi);
        }
        case FKind::forall:
        case FKind::exists:
        case FKind::forn: {
            int hits = 0;
            for (const auto &obj : universe.objects()) {
                auto saved = binding;
                binding[f.var] = obj;
                bool sat = eval_range(*f.children[0], lo, hi);
                binding = saved;
                if (f.kind == FKind::forall && !sat) return false;
                if (f.kind == FKind::exists && sat) return true;
                if (sat) ++hits;
            }
            if (f.kind == FKind::forall) return true;
            if (f.kind == FKind::exists) return false;
            return hits == f.count;
        }
        default:
            throw Error(ErrorCode::internal_error, "temporal structure under negation");
        }
    }

    // Children j..m-1 of the then-node cover [start, hi], each with >= 1 step.
    bool then_split(const Formula &f, int j, int start, int hi) {
        int m = static_cast<int>(f.children.size());
        int remaining = m - 1 - j;
        if (hi - start + 1 < remaining + 1) return false;
        bool memoable = binding.empty();
        auto key = std::make_tuple(&f, j, start, hi);
        if (memoable) {
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
        }
        bool result = false;
        if (j == m - 1) {
            result = eval_range(*f.children[j], start, hi);
        } else {
            for (int end = start; end <= hi - remaining; ++end) {
                if (eval_range(*f.children[j], start, end) &&
                    then_split(f, j + 1, end + 1, hi)) {
                    result = true;
                    break;
                }
            }
        }
        if (memoable) memo[key] = result;
        return result;
    }
};

} // namespace

bool evaluate(const FormulaPtr &f, const Trajectory &traj, const Vocabulary &vocab) {
    traj.check();
    validate(f);
    EvalContext ctx{traj, vocab, traj.states[0].universe(), {}, {}};
    return ctx.eval_range(*f, 0, static_cast<int>(traj.states.size()) - 1);
}

bool evaluate_at(const FormulaPtr &f, const Trajectory &traj, size_t step,
                 const Vocabulary &vocab) {
    traj.check();
    validate(f);
    if (f->contains_then)
        throw Error(ErrorCode::validation_error,
                    "'then' has no pointwise truth value");
    if (step >= traj.states.size())
        throw Error(ErrorCode::validation_error, "step out of range");
    EvalContext ctx{traj, vocab, traj.states[0].universe(), {}, {}};
    return ctx.holds_at(*f, step);
}

// -------------------------------------------------------------------- lint

namespace {

bool looks_like_action(const std::string &source) {
    bool has_alpha = false;
    for (char c : source) {
        if (isalpha(static_cast<unsigned char>(c))) {
            has_alpha = true;
            if (islower(static_cast<unsigned char>(c))) return false;
        }
    }
    return has_alpha;
}

void lint_rec(const FormulaPtr &f, const Vocabulary &vocab, const Universe &universe,
              std::vector<ltl::LintFinding> &out) {
    using Kind = LintFinding::Kind;
    using Subject = LintFinding::Subject;
    if (f->kind == FKind::atom) {
        for (const auto &arg : f->args) {
            if (arg.is_var) continue;
            if (!universe.resolve(arg.obj))
                out.push_back({Kind::hallucination, Subject::object, arg.obj.str(), -1,
                               -1, "object " + arg.obj.str() + " does not exist"});
        }
        int got = static_cast<int>(f->args.size());
        auto pred = vocab.predicates.find(f->name);
        if (pred != vocab.predicates.end()) {
            if (got != pred->second)
                out.push_back({Kind::arity, Subject::predicate, f->name, pred->second,
                               got,
                               f->name + " expects " + std::to_string(pred->second) +
                                   " arguments, got " + std::to_string(got)});
            return;
        }
        for (const auto &[act, arity] : vocab.actions) {
            if (lower(act) == f->name) {
                if (got != arity)
                    out.push_back({Kind::arity, Subject::action, f->name, arity, got,
                                   f->name + " expects " + std::to_string(arity) +
                                       " arguments, got " + std::to_string(got)});
                return;
            }
        }
        if (got == 1 &&
            (universe.is_known_tag(f->name) || universe.is_category(f->name)))
            return;
        Subject subject =
            looks_like_action(f->source_name) ? Subject::action : Subject::predicate;
        out.push_back({Kind::hallucination, subject, f->name, -1, -1,
                       (subject == Subject::action ? "action " : "predicate ") +
                           f->name + " is not in the vocabulary"});
        return;
    }
    if (f->kind == FKind::forn && f->children[0]->contains_then)
        out.push_back({Kind::forn_over_then, Subject::predicate, f->var, -1, -1,
                       "forn body spans temporal segments"});
    for (const auto &child : f->children) lint_rec(child, vocab, universe, out);
}

} // namespace

std::vector<LintFinding> lint(const FormulaPtr &f, const Vocabulary &vocab,
                              const Universe &universe) {
    std::vector<LintFinding> out;
    lint_rec(f, vocab, universe, out);
    return out;
}

} // namespace ltl
} // namespace embeval

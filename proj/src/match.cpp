#include "match.h"

#include <algorithm>
#include <functional>
#include <map>

namespace embeval {

namespace {

struct Renamer {
    std::map<std::string, std::string> scope;
    int quantifier_depth = 0;
};

Term rename_term(const Term &term, const Renamer &renamer) {
    if (!term.is_var) return term;
    auto it = renamer.scope.find(term.var);
    if (it == renamer.scope.end()) return term;
    return Term::make_var(it->second);
}

CondPtr normalize_rec(const CondPtr &cond, Renamer &renamer) {
    if (!cond) return nullptr;
    switch (cond->kind) {
    case CKind::lit: {
        std::vector<Term> args;
        args.reserve(cond->args.size());
        for (const auto &term : cond->args) args.push_back(rename_term(term, renamer));
        return Condition::lit(cond->pred, std::move(args), cond->positive);
    }
    case CKind::and_:
    case CKind::or_: {
        std::vector<CondPtr> children;
        for (const auto &child : cond->children) {
            CondPtr norm = normalize_rec(child, renamer);
            if (norm && norm->kind == cond->kind) {
                for (const auto &grand : norm->children) children.push_back(grand);
            } else {
                children.push_back(norm);
            }
        }
        if (children.size() == 1) return children.front();
        return cond->kind == CKind::and_ ? Condition::conj(std::move(children))
                                         : Condition::disj(std::move(children));
    }
    case CKind::not_:
        return Condition::negate(normalize_rec(cond->children.at(0), renamer));
    case CKind::when:
        return Condition::when(normalize_rec(cond->children.at(0), renamer),
                               normalize_rec(cond->children.at(1), renamer));
    case CKind::forall:
    case CKind::exists: {
        std::string fresh = "q" + std::to_string(renamer.quantifier_depth);
        auto saved = renamer.scope.find(cond->var);
        std::string saved_value;
        bool had = saved != renamer.scope.end();
        if (had) saved_value = saved->second;
        renamer.scope[cond->var] = fresh;
        ++renamer.quantifier_depth;
        CondPtr body = normalize_rec(cond->children.at(0), renamer);
        --renamer.quantifier_depth;
        if (had)
            renamer.scope[cond->var] = saved_value;
        else
            renamer.scope.erase(cond->var);
        return cond->kind == CKind::forall
                   ? Condition::forall(fresh, cond->type, std::move(body))
                   : Condition::exists(fresh, cond->type, std::move(body));
    }
    }
    return cond;
}

// Maximum bipartite matching (Kuhn) over a 0/1 adjacency; returns the size
// and optionally the row matched to each column.
int max_matching(const std::vector<std::vector<int>> &adjacency, int cols,
                 std::vector<int> *row_of_col) {
    std::vector<int> owner(cols, -1);
    std::vector<char> visited;
    std::function<bool(int)> augment = [&](int row) {
        for (int col : adjacency[row]) {
            if (visited[col]) continue;
            visited[col] = 1;
            if (owner[col] < 0 || augment(owner[col])) {
                owner[col] = row;
                return true;
            }
        }
        return false;
    };
    int matched = 0;
    for (size_t row = 0; row < adjacency.size(); ++row) {
        visited.assign(cols, 0);
        if (augment(static_cast<int>(row))) ++matched;
    }
    if (row_of_col) *row_of_col = owner;
    return matched;
}

double match_rec(const CondPtr &a, const CondPtr &b) {
    if (!a || !b) return (!a && !b) ? 1.0 : 0.0;
    if (a->kind != b->kind) return 0.0;
    switch (a->kind) {
    case CKind::lit:
        return (a->pred == b->pred && a->positive == b->positive &&
                a->args == b->args)
                   ? 1.0
                   : 0.0;
    case CKind::not_:
    case CKind::when: {
        if (a->children.size() != b->children.size()) return 0.0;
        for (size_t i = 0; i < a->children.size(); ++i)
            if (match_rec(a->children[i], b->children[i]) != 1.0) return 0.0;
        return 1.0;
    }
    case CKind::forall:
    case CKind::exists:
        if (a->var != b->var || a->type != b->type) return 0.0;
        return match_rec(a->children.at(0), b->children.at(0)) == 1.0 ? 1.0 : 0.0;
    case CKind::and_:
    case CKind::or_: {
        size_t m = a->children.size(), n = b->children.size();
        if (m == 0 || n == 0) return (m == 0 && n == 0) ? 1.0 : 0.0;
        std::vector<std::vector<int>> adjacency(m);
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < n; ++j)
                if (match_rec(a->children[i], b->children[j]) == 1.0)
                    adjacency[i].push_back(static_cast<int>(j));
        int matched = max_matching(adjacency, static_cast<int>(n), nullptr);
        return static_cast<double>(matched) / static_cast<double>(std::min(m, n));
    }
    }
    return 0.0;
}

void fill_rates(SectionScore *section) {
    int tp = section->tp, fp = section->fp, fn = section->fn;
    section->precision = (tp + fp == 0) ? 1.0 : static_cast<double>(tp) / (tp + fp);
    section->recall = (tp + fn == 0) ? 1.0 : static_cast<double>(tp) / (tp + fn);
    section->f1 = (tp + fp + fn == 0)
                      ? 1.0
                      : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

SectionScore score_section(const std::vector<CondPtr> &pred,
                           const std::vector<CondPtr> &gt) {
    SectionScore section;
    std::vector<std::vector<int>> adjacency(pred.size());
    for (size_t i = 0; i < pred.size(); ++i)
        for (size_t j = 0; j < gt.size(); ++j)
            if (match_rec(pred[i], gt[j]) == 1.0)
                adjacency[i].push_back(static_cast<int>(j));
    std::vector<int> row_of_col;
    section.tp = max_matching(adjacency, static_cast<int>(gt.size()), &row_of_col);
    section.fp = static_cast<int>(pred.size()) - section.tp;
    section.fn = static_cast<int>(gt.size()) - section.tp;
    section.pairing.assign(pred.size(), -1);
    for (size_t col = 0; col < row_of_col.size(); ++col)
        if (row_of_col[col] >= 0) section.pairing[row_of_col[col]] = static_cast<int>(col);
    fill_rates(&section);
    return section;
}

} // namespace

CondPtr normalize_for_match(const CondPtr &cond,
                            const std::vector<TypedVar> &params) {
    Renamer renamer;
    for (size_t i = 0; i < params.size(); ++i)
        renamer.scope[params[i].name] = "p" + std::to_string(i);
    return normalize_rec(cond, renamer);
}

std::vector<CondPtr> flatten_clauses(const CondPtr &cond) {
    if (!cond) return {};
    if (cond->kind == CKind::and_) return cond->children;
    return {cond};
}

double match_expressions(const CondPtr &pred, const CondPtr &gt) {
    return match_rec(normalize_for_match(pred, {}), normalize_for_match(gt, {}));
}

MatchReport score_operator(const OperatorSchema &pred,
                           const OperatorSchema &gt) {
    MatchReport report;
    report.name = gt.name;
    if (pred.name != gt.name || pred.params.size() != gt.params.size()) {
        report.arity_mismatch = true;
        for (SectionScore *section :
             {&report.precondition, &report.effect, &report.combined}) {
            section->precision = 0.0;
            section->recall = 0.0;
            section->f1 = 0.0;
        }
        report.precondition.fp = static_cast<int>(
            flatten_clauses(normalize_for_match(pred.precondition, pred.params)).size());
        report.precondition.fn = static_cast<int>(
            flatten_clauses(normalize_for_match(gt.precondition, gt.params)).size());
        report.effect.fp = static_cast<int>(
            flatten_clauses(normalize_for_match(pred.effect, pred.params)).size());
        report.effect.fn = static_cast<int>(
            flatten_clauses(normalize_for_match(gt.effect, gt.params)).size());
        report.combined.fp = report.precondition.fp + report.effect.fp;
        report.combined.fn = report.precondition.fn + report.effect.fn;
        return report;
    }
    report.precondition =
        score_section(flatten_clauses(normalize_for_match(pred.precondition, pred.params)),
                      flatten_clauses(normalize_for_match(gt.precondition, gt.params)));
    report.effect =
        score_section(flatten_clauses(normalize_for_match(pred.effect, pred.params)),
                      flatten_clauses(normalize_for_match(gt.effect, gt.params)));
    report.combined.tp = report.precondition.tp + report.effect.tp;
    report.combined.fp = report.precondition.fp + report.effect.fp;
    report.combined.fn = report.precondition.fn + report.effect.fn;
    fill_rates(&report.combined);
    return report;
}

} // namespace embeval

#ifndef EMBEVAL_SEXPR_H
#define EMBEVAL_SEXPR_H

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "errors.h"

namespace embeval {

// Minimal s-expression reader shared by the PDDL loader and the goal parsers.
// Atoms are lower-cased on read; ';' starts a line comment.
struct Sexp {
    bool is_atom = false;
    std::string atom;
    std::vector<Sexp> items;
    size_t offset = 0;

    const Sexp &at(size_t i) const {
        if (is_atom || i >= items.size())
            throw Error(ErrorCode::parse_error,
                        "malformed form near byte " + std::to_string(offset));
        return items[i];
    }
    const std::string &head() const {
        if (is_atom || items.empty() || !items[0].is_atom)
            throw Error(ErrorCode::parse_error,
                        "expected a tagged form near byte " + std::to_string(offset));
        return items[0].atom;
    }
};

struct SexpReader {
    const std::string &src;
    size_t pos = 0;

    explicit SexpReader(const std::string &s) : src(s) {}

    void skip_ws() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == ';') {
                while (pos < src.size() && src[pos] != '\n') ++pos;
            } else if (isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool done() {
        skip_ws();
        return pos >= src.size();
    }

    Sexp read() {
        skip_ws();
        if (pos >= src.size())
            throw Error(ErrorCode::parse_error, "unexpected end of input");
        Sexp out;
        out.offset = pos;
        if (src[pos] == '(') {
            ++pos;
            while (true) {
                skip_ws();
                if (pos >= src.size())
                    throw Error(ErrorCode::parse_error,
                                "unclosed '(' at byte " + std::to_string(out.offset));
                if (src[pos] == ')') {
                    ++pos;
                    return out;
                }
                out.items.push_back(read());
            }
        }
        if (src[pos] == ')')
            throw Error(ErrorCode::parse_error,
                        "unexpected ')' at byte " + std::to_string(pos));
        out.is_atom = true;
        size_t start = pos;
        while (pos < src.size() && !isspace(static_cast<unsigned char>(src[pos])) &&
               src[pos] != '(' && src[pos] != ')' && src[pos] != ';')
            ++pos;
        out.atom = src.substr(start, pos - start);
        std::transform(out.atom.begin(), out.atom.end(), out.atom.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return out;
    }
};

} // namespace embeval

#endif

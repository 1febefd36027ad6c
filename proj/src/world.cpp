#include "world.h"

#include <algorithm>
#include <sstream>

namespace embeval {

const char *error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::vocabulary_error: return "vocabulary error";
    case ErrorCode::unknown_object: return "unknown object";
    case ErrorCode::unknown_predicate: return "unknown predicate";
    case ErrorCode::unknown_action: return "unknown action";
    case ErrorCode::arity_error: return "arity error";
    case ErrorCode::binding_error: return "binding error";
    case ErrorCode::validation_error: return "validation error";
    case ErrorCode::conflicting_delta: return "conflicting delta";
    case ErrorCode::universe_mismatch: return "universe mismatch";
    case ErrorCode::precondition_violated: return "precondition violated";
    case ErrorCode::io_error: return "io error";
    case ErrorCode::internal_error: return "internal error";
    }
    return "error";
}

ObjectRef ObjectRef::parse(const std::string &text) {
    if (text.empty())
        throw Error(ErrorCode::parse_error, "empty object reference");
    auto dot = text.rfind('.');
    if (dot != std::string::npos && dot + 1 < text.size()) {
        bool digits = true;
        for (size_t i = dot + 1; i < text.size(); ++i)
            if (!isdigit(static_cast<unsigned char>(text[i]))) digits = false;
        if (digits && dot > 0)
            return ObjectRef(text.substr(0, dot), std::stoi(text.substr(dot + 1)));
    }
    return ObjectRef::bare(text);
}

std::string ObjectRef::str() const {
    if (!has_id) return category;
    return category + "." + std::to_string(instance_id);
}

void Universe::add_object(const ObjectRef &ref, const std::set<std::string> &tags) {
    if (!ref.has_id)
        throw Error(ErrorCode::validation_error,
                    "universe objects need an instance id: " + ref.str());
    if (contains(ref))
        throw Error(ErrorCode::validation_error, "duplicate object " + ref.str());
    objects_.push_back(ref);
    std::sort(objects_.begin(), objects_.end());
    tags_[ref] = tags;
    for (const auto &tag : tags) known_tags_.insert(tag);
}

void Universe::set_agent(const ObjectRef &ref) {
    if (!contains(ref))
        throw Error(ErrorCode::unknown_object, "agent " + ref.str() + " not in universe");
    agent_ = ref;
}

bool Universe::contains(const ObjectRef &ref) const {
    return std::binary_search(objects_.begin(), objects_.end(), ref);
}

std::optional<ObjectRef> Universe::resolve(const ObjectRef &ref) const {
    if (ref.has_id) {
        if (contains(ref)) return ref;
        return std::nullopt;
    }
    std::optional<ObjectRef> found;
    for (const auto &obj : objects_) {
        if (obj.category == ref.category) {
            if (found) return std::nullopt; // ambiguous
            found = obj;
        }
    }
    return found;
}

bool Universe::has_tag(const ObjectRef &ref, const std::string &tag) const {
    auto it = tags_.find(ref);
    return it != tags_.end() && it->second.count(tag) > 0;
}

bool Universe::is_known_tag(const std::string &tag) const {
    return known_tags_.count(tag) > 0;
}

bool Universe::is_category(const std::string &name) const {
    for (const auto &obj : objects_)
        if (obj.category == name) return true;
    return false;
}

SizeClass Universe::size_of(const ObjectRef &ref) const {
    if (has_tag(ref, "small")) return SizeClass::small;
    if (has_tag(ref, "large")) return SizeClass::large;
    return SizeClass::medium;
}

std::vector<ObjectRef> Universe::with_category(const std::string &category) const {
    std::vector<ObjectRef> out;
    for (const auto &obj : objects_)
        if (obj.category == category) out.push_back(obj);
    return out;
}

std::vector<ObjectRef> Universe::with_tag(const std::string &tag) const {
    std::vector<ObjectRef> out;
    for (const auto &obj : objects_)
        if (has_tag(obj, tag)) out.push_back(obj);
    return out;
}

std::optional<bool> Universe::implicit_unary_truth(const std::string &predicate,
                                                   const ObjectRef &ref) const {
    if (is_known_tag(predicate)) return has_tag(ref, predicate);
    if (is_category(predicate)) return ref.category == predicate;
    return std::nullopt;
}

std::string Universe::canonical() const {
    std::ostringstream out;
    for (const auto &obj : objects_) {
        out << obj.str();
        auto it = tags_.find(obj);
        if (it != tags_.end() && !it->second.empty()) {
            out << "[";
            bool first = true;
            for (const auto &tag : it->second) {
                if (!first) out << ",";
                out << tag;
                first = false;
            }
            out << "]";
        }
        out << ";";
    }
    if (agent_) out << "agent=" << agent_->str();
    return out.str();
}

std::string Proposition::str() const {
    std::ostringstream out;
    out << predicate << "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out << ", ";
        out << args[i].str();
    }
    out << ")";
    return out.str();
}

Proposition Proposition::parse(const std::string &text) {
    auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw Error(ErrorCode::parse_error, "malformed proposition: " + text);
    Proposition prop;
    prop.predicate = text.substr(0, open);
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    std::string current;
    auto flush = [&]() {
        size_t a = current.find_first_not_of(" \t");
        size_t b = current.find_last_not_of(" \t");
        if (a == std::string::npos) return;
        prop.args.push_back(ObjectRef::parse(current.substr(a, b - a + 1)));
    };
    for (char c : inner) {
        if (c == ',') {
            flush();
            current.clear();
        } else {
            current += c;
        }
    }
    flush();
    if (prop.predicate.empty())
        throw Error(ErrorCode::parse_error, "missing predicate name: " + text);
    return prop;
}

WorldState::WorldState(std::shared_ptr<const Universe> universe,
                       std::vector<Proposition> facts)
    : universe_(std::move(universe)), facts_(std::move(facts)) {
    if (!universe_)
        throw Error(ErrorCode::internal_error, "world state without universe");
    for (const auto &fact : facts_)
        for (const auto &arg : fact.args)
            if (!universe_->contains(arg))
                throw Error(ErrorCode::unknown_object,
                            arg.str() + " in fact " + fact.str());
    std::sort(facts_.begin(), facts_.end());
    facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
}

bool WorldState::satisfies(const Proposition &prop) const {
    return std::binary_search(facts_.begin(), facts_.end(), prop);
}

WorldState WorldState::with_delta(const std::vector<Proposition> &add,
                                  const std::vector<Proposition> &del) const {
    for (const auto &a : add)
        for (const auto &d : del)
            if (a == d)
                throw Error(ErrorCode::conflicting_delta,
                            a.str() + " both added and removed");
    std::vector<Proposition> next;
    next.reserve(facts_.size() + add.size());
    for (const auto &fact : facts_) {
        bool removed = false;
        for (const auto &d : del)
            if (fact == d) removed = true;
        if (!removed) next.push_back(fact);
    }
    next.insert(next.end(), add.begin(), add.end());
    return WorldState(universe_, std::move(next));
}

std::pair<std::vector<Proposition>, std::vector<Proposition>>
WorldState::diff(const WorldState &other) const {
    if (!(*universe_ == *other.universe_))
        throw Error(ErrorCode::universe_mismatch, "diff across universes");
    std::vector<Proposition> added, removed;
    std::set_difference(other.facts_.begin(), other.facts_.end(),
                        facts_.begin(), facts_.end(), std::back_inserter(added));
    std::set_difference(facts_.begin(), facts_.end(),
                        other.facts_.begin(), other.facts_.end(),
                        std::back_inserter(removed));
    return {added, removed};
}

bool WorldState::interactable(const ObjectRef &ref) const {
    for (const auto &fact : facts_) {
        if (fact.predicate == "inside" && fact.args.size() == 2 &&
            fact.args[0] == ref) {
            if (satisfies(Proposition("closed", {fact.args[1]})))
                return false;
        }
    }
    return true;
}

std::string WorldState::canonical() const {
    std::ostringstream out;
    for (const auto &fact : facts_) out << fact.str() << "\n";
    return out.str();
}

std::uint64_t fnv1a(const std::string &text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t WorldState::hash() const { return fnv1a(canonical()); }

} // namespace embeval

#ifndef EMBEVAL_WORLD_H
#define EMBEVAL_WORLD_H

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.h"

namespace embeval {

// A concrete simulator entity: category plus numeric instance id, rendered as
// "category.id" (e.g. "fridge.97").  References without an id ("character")
// are legal and resolve against the unique instance of that category.
struct ObjectRef {
    std::string category;
    int instance_id = -1;
    bool has_id = false;

    ObjectRef() = default;
    ObjectRef(std::string cat, int id)
        : category(std::move(cat)), instance_id(id), has_id(true) {}
    static ObjectRef bare(std::string cat) {
        ObjectRef ref;
        ref.category = std::move(cat);
        return ref;
    }
    // Parses "fridge.97" or "character"; throws Error(parse_error) on empty /
    // malformed input.
    static ObjectRef parse(const std::string &text);

    std::string str() const;

    friend bool operator==(const ObjectRef &a, const ObjectRef &b) {
        return a.category == b.category && a.has_id == b.has_id &&
               (!a.has_id || a.instance_id == b.instance_id);
    }
    friend bool operator!=(const ObjectRef &a, const ObjectRef &b) { return !(a == b); }
    friend bool operator<(const ObjectRef &a, const ObjectRef &b) {
        if (a.category != b.category) return a.category < b.category;
        if (a.has_id != b.has_id) return a.has_id < b.has_id;
        return a.instance_id < b.instance_id;
    }
};

// Object sizes used by grasp/containment rules; unsized objects count as medium.
enum class SizeClass { small = 0, medium = 1, large = 2 };

// The set of entities in a scene plus their static property tags
// ("openable", "toggleable", "cleaning_tool", size classes, ...).
class Universe {
public:
    void add_object(const ObjectRef &ref,
                    const std::set<std::string> &tags = {});
    void set_agent(const ObjectRef &ref);

    const std::vector<ObjectRef> &objects() const { return objects_; }
    const std::optional<ObjectRef> &agent() const { return agent_; }

    bool contains(const ObjectRef &ref) const;
    // Resolves a bare reference to the unique object of that category; returns
    // the input unchanged when it already carries an id.  nullopt when there is
    // no (unique) match.
    std::optional<ObjectRef> resolve(const ObjectRef &ref) const;

    bool has_tag(const ObjectRef &ref, const std::string &tag) const;
    bool is_known_tag(const std::string &tag) const;
    const std::set<std::string> &known_tags() const { return known_tags_; }
    bool is_category(const std::string &name) const;
    SizeClass size_of(const ObjectRef &ref) const;

    std::vector<ObjectRef> with_category(const std::string &category) const;
    std::vector<ObjectRef> with_tag(const std::string &tag) const;

    // True for unary predicates backed by the universe itself rather than the
    // fact set: property tags and category-membership tests.
    std::optional<bool> implicit_unary_truth(const std::string &predicate,
                                             const ObjectRef &ref) const;

    std::string canonical() const;

    friend bool operator==(const Universe &a, const Universe &b) {
        return a.objects_ == b.objects_ && a.tags_ == b.tags_ && a.agent_ == b.agent_;
    }

private:
    std::vector<ObjectRef> objects_;
    std::map<ObjectRef, std::set<std::string>> tags_;
    std::set<std::string> known_tags_;
    std::optional<ObjectRef> agent_;
};

// Predicate and action names with their arities; used for vocabulary linting.
struct Vocabulary {
    std::map<std::string, int> predicates; // name -> arity
    std::map<std::string, int> actions;    // name -> visible argument count
};

// A ground fact: predicate applied to objects, e.g. open(fridge.97).
struct Proposition {
    std::string predicate;
    std::vector<ObjectRef> args;

    Proposition() = default;
    Proposition(std::string pred, std::vector<ObjectRef> a)
        : predicate(std::move(pred)), args(std::move(a)) {}

    std::string str() const;
    static Proposition parse(const std::string &text);

    friend bool operator==(const Proposition &a, const Proposition &b) {
        return a.predicate == b.predicate && a.args == b.args;
    }
    friend bool operator!=(const Proposition &a, const Proposition &b) { return !(a == b); }
    friend bool operator<(const Proposition &a, const Proposition &b) {
        if (a.predicate != b.predicate) return a.predicate < b.predicate;
        return a.args < b.args;
    }
};

// Immutable closed-world state: the facts hold, everything else is false.
class WorldState {
public:
    WorldState() = default;
    WorldState(std::shared_ptr<const Universe> universe,
               std::vector<Proposition> facts);

    const Universe &universe() const { return *universe_; }
    std::shared_ptr<const Universe> universe_ptr() const { return universe_; }
    const std::vector<Proposition> &facts() const { return facts_; }

    bool satisfies(const Proposition &prop) const;

    // Returns a new state with `del` removed and `add` inserted; throws
    // Error(conflicting_delta) when the two sets overlap.
    WorldState with_delta(const std::vector<Proposition> &add,
                          const std::vector<Proposition> &del) const;

    // Facts to add / remove to turn *this into `other`; throws
    // Error(universe_mismatch) when the universes differ.
    std::pair<std::vector<Proposition>, std::vector<Proposition>>
    diff(const WorldState &other) const;

    // Objects are interactable unless shut inside a closed container.
    bool interactable(const ObjectRef &ref) const;

    std::string canonical() const;
    std::uint64_t hash() const;

    friend bool operator==(const WorldState &a, const WorldState &b) {
        return a.facts_ == b.facts_ && *a.universe_ == *b.universe_;
    }

private:
    std::shared_ptr<const Universe> universe_;
    std::vector<Proposition> facts_; // sorted, unique
};

std::uint64_t fnv1a(const std::string &text);

} // namespace embeval

#endif

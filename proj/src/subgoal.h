#ifndef EMBEVAL_SUBGOAL_H
#define EMBEVAL_SUBGOAL_H

#include "executor.h"
#include "goals.h"

namespace embeval {

// Ordered then-free segments of a "s1 then s2 then ..." subgoal sequence.
struct SubgoalPlan {
    std::vector<ltl::FormulaPtr> segments;
    std::string source;

    static SubgoalPlan from_text(const std::string &text);
    static SubgoalPlan from_segments(const std::vector<std::string> &texts);

    // The whole plan as one formula (segments joined by then).
    ltl::FormulaPtr formula() const;
    bool empty() const { return segments.empty(); }
};

enum class SegmentOutcome { reached, already_satisfied, unreachable };

struct SegmentResult {
    SegmentOutcome outcome = SegmentOutcome::unreachable;
    std::vector<std::string> actions; // visible texts contributed by this segment
    int visited = 0;                  // distinct states generated by the search
    std::string diagnostic;           // best frontier info when unreachable
};

struct MappingResult {
    std::vector<SegmentResult> segments;
    std::vector<std::string> plan; // concatenated visible action texts
    bool complete = true;
    int failed_segment = -1; // first unreachable segment, -1 when complete
};

inline constexpr int kDefaultDepthCap = 4;

// Per segment, breadth-first search over ground actions from the current
// state; the shortest action sub-sequence whose resulting step satisfies the
// segment advances the walk.  Already-true segments consume zero actions.
MappingResult map_subgoals(const SubgoalPlan &plan, const WorldState &initial,
                           const Domain &domain, int depth_cap = kDefaultDepthCap);

struct SubgoalEval {
    std::vector<ltl::LintFinding> lint; // plan-level vocabulary findings
    MappingResult mapping;
    ExecutionTrace trace; // replay of the concatenated plan
    SatisfactionResult goal;
    bool execution_success = false;
    bool task_success = false;
    double partial = 0.0;
    ErrorClass error = ErrorClass::none;
    std::string error_message;
};

// Maps, replays, and scores a subgoal plan against a goal spec.  When several
// minimal mappings exist for a segment, each alternative is remapped to the
// end and the best goal score is kept.
SubgoalEval evaluate_subgoal_plan(const SubgoalPlan &plan,
                                  const WorldState &initial, const GoalSpec &goal,
                                  const Domain &domain,
                                  int depth_cap = kDefaultDepthCap,
                                  int option_cap = kDefaultOptionCap);

} // namespace embeval

#endif

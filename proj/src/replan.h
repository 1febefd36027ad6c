#ifndef EMBEVAL_REPLAN_H
#define EMBEVAL_REPLAN_H

#include <cstdint>
#include <string>
#include <vector>

#include "executor.h"
#include "goals.h"

namespace embeval {

// Stochastic-execution harness: each applied step fizzles (leaves the state
// unchanged and ends the attempt) with probability fail_prob, and the same
// plan is retried with the random stream carried forward.  fail_prob 0 makes
// the harness behave exactly like a single plain execution.
struct StochasticConfig {
    double fail_prob = 0.0;
    std::uint64_t seed = 0;
    int max_retries = 3; // attempts beyond the first
};

struct Attempt {
    ExecutionTrace trace;
    // position in trace.steps of the step that fizzled, -1 when none did
    int injected_step = -1;
    // message carried into the next attempt; empty ends the retry loop
    std::string feedback;
    SatisfactionResult goal;
};

struct ReplanOutcome {
    std::vector<Attempt> attempts;
    int decisive = -1; // attempt whose trace/goal stand as the task outcome
    bool execution_success = false; // some attempt ran the whole plan
    bool task_success = false;      // ... and satisfied the goal
    SatisfactionResult goal;        // evaluation of the decisive attempt
};

// Mixes the shared seed with a task identifier (FNV-1a) so per-task streams
// are independent yet reproducible.
std::uint64_t task_stream_seed(std::uint64_t seed, const std::string &task_id);

ReplanOutcome run_stochastic(const WorldState &initial,
                             const std::vector<std::string> &plan,
                             const Domain &domain, const GoalSpec &goal,
                             const StochasticConfig &config,
                             const std::string &task_id);

} // namespace embeval

#endif

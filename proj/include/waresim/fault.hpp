#pragma once

#include "waresim/tasks.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace waresim {

struct FaultParams {
    double f_m = 0.0;  // per-robot per-tick motion delay probability
    double f_c = 0.0;  // per-failed-robot per-tick recovery probability;
                       // 0 disables the communication-failure process
    uint64_t seed = 0;
    bool exact_motion_count = false; // draw exactly round(f_m * n) robots
};

// (f_m, f_c) presets for uncertainty levels 1..5.
FaultParams uncertainty_preset(int level);

// Deterministic sub-seed for sweep runs: mix(seed, value, trial).
uint64_t derive_subseed(uint64_t seed, uint64_t value, uint64_t trial);

// Owns the only mutable random stream of a run. Draw order per tick is
// fixed: motion delays first (robots in id order), then recoveries (failed
// robots in id order), then the new failure choice.
class FaultInjector {
public:
    explicit FaultInjector(const FaultParams& params)
        : params_(params), rng_(params.seed)
    {
    }

    const FaultParams& params() const { return params_; }

    // Robots eligible for motion delay (active, i.e. executing motion),
    // in id order. Returns the delayed subset.
    std::vector<RobotId> sample_motion_delays(const std::vector<RobotId>& active);

    struct CommStep {
        std::optional<RobotId> newly_failed;
        std::vector<RobotId> recovered;
    };

    // `normal` and `failed` in id order. Each failed robot recovers with
    // probability f_c; then exactly one robot among the still-normal ones
    // fails (when any exists). A robot never fails and recovers in the same
    // tick. No-op when f_c == 0.
    CommStep step_comm_failures(const std::vector<RobotId>& normal,
                                const std::vector<RobotId>& failed);

private:
    double next_unit();

    FaultParams params_;
    std::mt19937_64 rng_;
};

} // namespace waresim

#include "waresim/fault.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace waresim {

FaultParams uncertainty_preset(int level)
{
    FaultParams p;
    switch (level) {
    case 1: p.f_m = 0.01; p.f_c = 0.30; break;
    case 2: p.f_m = 0.05; p.f_c = 0.25; break;
    case 3: p.f_m = 0.02; p.f_c = 0.20; break;
    case 4: p.f_m = 0.025; p.f_c = 0.15; break;
    case 5: p.f_m = 0.03; p.f_c = 0.10; break;
    default:
        throw std::invalid_argument("uncertainty level must be 1..5, got " +
                                    std::to_string(level));
    }
    return p;
}

uint64_t derive_subseed(uint64_t seed, uint64_t value, uint64_t trial)
{
    // splitmix64 finalizer over the three words
    uint64_t x = seed;
    for (uint64_t w : {value, trial}) {
        x += 0x9e3779b97f4a7c15ULL + w;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        x = x ^ (x >> 31);
    }
    return x;
}

double FaultInjector::next_unit()
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
}

std::vector<RobotId>
FaultInjector::sample_motion_delays(const std::vector<RobotId>& active)
{
    std::vector<RobotId> delayed;
    if (params_.f_m <= 0.0 || active.empty())
        return delayed;

    if (params_.exact_motion_count) {
        size_t count = static_cast<size_t>(
            std::llround(params_.f_m * static_cast<double>(active.size())));
        count = std::min(count, active.size());
        // Partial Fisher-Yates over a copy keeps the draw order id-based.
        std::vector<RobotId> pool = active;
        for (size_t i = 0; i < count; ++i) {
            size_t j = i + static_cast<size_t>(next_unit() * (pool.size() - i));
            j = std::min(j, pool.size() - 1);
            std::swap(pool[i], pool[j]);
            delayed.push_back(pool[i]);
        }
        std::sort(delayed.begin(), delayed.end());
        return delayed;
    }

    for (RobotId id : active)
        if (next_unit() < params_.f_m)
            delayed.push_back(id);
    return delayed;
}

FaultInjector::CommStep
FaultInjector::step_comm_failures(const std::vector<RobotId>& normal,
                                  const std::vector<RobotId>& failed)
{
    CommStep step;
    if (params_.f_c <= 0.0)
        return step;

    for (RobotId id : failed)
        if (next_unit() < params_.f_c)
            step.recovered.push_back(id);

    // One new failure among robots that were normal coming into this tick;
    // robots recovered above are not candidates.
    if (!normal.empty()) {
        size_t pick = static_cast<size_t>(next_unit() * normal.size());
        pick = std::min(pick, normal.size() - 1);
        step.newly_failed = normal[pick];
    }
    return step;
}

} // namespace waresim

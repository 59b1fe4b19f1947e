#pragma once

#include "waresim/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace waresim {

using TaskId = int64_t;
using RobotId = int32_t;
using Tick = int64_t;

constexpr Tick kNoTick = -1;
constexpr RobotId kNoRobot = -1;

enum class TaskStatus : uint8_t { Waiting, Queued, Assigned, PickedUp, Done };

const char* task_status_name(TaskStatus s);

struct Task {
    TaskId id = 0;
    Tick publish_tick = 0;            // T_O
    Coord pickup;                     // T_T
    Coord working;                    // T_W
    std::optional<int64_t> priority;  // overrides publish tick when present
    RobotId assigned_robot = kNoRobot; // T_R
    Tick assign_tick = kNoTick;       // T_A
    Tick pickup_tick = kNoTick;       // T_B
    Tick finish_tick = kNoTick;       // T_F
    TaskStatus status = TaskStatus::Queued;

    // Ordering key: (priority or publish tick, then id).
    std::pair<int64_t, TaskId> priority_key() const
    {
        return {priority.value_or(publish_tick), id};
    }

    bool active() const
    {
        return status == TaskStatus::Queued || status == TaskStatus::Assigned ||
               status == TaskStatus::PickedUp;
    }
};

// A task is in conflict with another when they share the pickup station or
// share the working station.
inline bool tasks_conflict(const Task& a, const Task& b)
{
    return a.pickup == b.pickup || a.working == b.working;
}

struct WaitingEntry {
    TaskId task = 0;
    TaskId blocked_by = 0;
};

// Priority-ordered unassigned list plus the waiting list of tasks whose
// stations collide with a live task.
class TaskQueues {
public:
    // Inserts a new task: Queued in priority order when station-compatible
    // with every active task, otherwise Waiting behind the blocking task.
    // Throws std::invalid_argument on duplicate id.
    void enqueue_task(Task task);

    // `completed` has just finished: re-screens its waiters in priority
    // order. Waiters with no remaining conflict become Queued; others stay
    // Waiting with an updated blocker.
    void release_waiting(const Task& completed);

    void mark_assigned(TaskId id, RobotId robot, Tick tick);
    void mark_picked_up(TaskId id, Tick tick);
    void mark_done(TaskId id, Tick tick);

    const Task& task(TaskId id) const;
    Task& task(TaskId id);
    bool has_task(TaskId id) const;

    const std::vector<TaskId>& queued() const { return queued_; }
    const std::vector<WaitingEntry>& waiting() const { return waiting_; }
    const std::vector<Task>& all_tasks() const { return tasks_; }

    size_t unfinished_count() const { return unfinished_; }

    // Checks the no-shared-station rule over {Queued, Assigned, PickedUp}.
    bool stations_exclusive() const;

private:
    std::optional<TaskId> find_conflict(const Task& task) const;
    void insert_queued(TaskId id);
    size_t slot(TaskId id) const;

    std::vector<Task> tasks_; // insertion order
    std::unordered_map<TaskId, size_t> index_;
    std::vector<TaskId> queued_;
    std::vector<WaitingEntry> waiting_;
    size_t unfinished_ = 0;
};

} // namespace waresim

#include "waresim/tasks.hpp"

#include <algorithm>
#include <stdexcept>

namespace waresim {

const char* task_status_name(TaskStatus s)
{
    switch (s) {
    case TaskStatus::Waiting: return "waiting";
    case TaskStatus::Queued: return "queued";
    case TaskStatus::Assigned: return "assigned";
    case TaskStatus::PickedUp: return "picked_up";
    case TaskStatus::Done: return "done";
    }
    return "?";
}

size_t TaskQueues::slot(TaskId id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw std::out_of_range("unknown task id " + std::to_string(id));
    return it->second;
}

std::optional<TaskId> TaskQueues::find_conflict(const Task& task) const
{
    // Scan in insertion order so the blocker choice is reproducible.
    for (const Task& other : tasks_) {
        if (other.id == task.id || !other.active())
            continue;
        if (tasks_conflict(task, other))
            return other.id;
    }
    return std::nullopt;
}

void TaskQueues::insert_queued(TaskId id)
{
    auto key = task(id).priority_key();
    auto it = std::lower_bound(queued_.begin(), queued_.end(), key,
                               [&](TaskId lhs, const auto& rhs) {
                                   return task(lhs).priority_key() < rhs;
                               });
    queued_.insert(it, id);
}

void TaskQueues::enqueue_task(Task new_task)
{
    if (index_.count(new_task.id))
        throw std::invalid_argument("duplicate task id " +
                                    std::to_string(new_task.id));
    auto blocker = find_conflict(new_task);
    new_task.status = blocker ? TaskStatus::Waiting : TaskStatus::Queued;
    index_[new_task.id] = tasks_.size();
    tasks_.push_back(new_task);
    ++unfinished_;
    if (blocker)
        waiting_.push_back({new_task.id, *blocker});
    else
        insert_queued(new_task.id);
}

void TaskQueues::release_waiting(const Task& completed)
{
    if (completed.status != TaskStatus::Done)
        throw std::logic_error("release_waiting requires a Done task");

    // Re-screen this task's waiters in priority order so that the first
    // promoted waiter immediately blocks later ones that collide with it.
    std::vector<size_t> affected;
    for (size_t i = 0; i < waiting_.size(); ++i)
        if (waiting_[i].blocked_by == completed.id)
            affected.push_back(i);
    std::sort(affected.begin(), affected.end(), [&](size_t a, size_t b) {
        return task(waiting_[a].task).priority_key() <
               task(waiting_[b].task).priority_key();
    });

    std::vector<size_t> to_remove;
    for (size_t i : affected) {
        Task& waiter = task(waiting_[i].task);
        auto blocker = find_conflict(waiter);
        if (blocker) {
            waiting_[i].blocked_by = *blocker;
        } else {
            waiter.status = TaskStatus::Queued;
            insert_queued(waiter.id);
            to_remove.push_back(i);
        }
    }
    std::sort(to_remove.begin(), to_remove.end(), std::greater<>());
    for (size_t i : to_remove)
        waiting_.erase(waiting_.begin() + static_cast<ptrdiff_t>(i));
}

void TaskQueues::mark_assigned(TaskId id, RobotId robot, Tick tick)
{
    Task& t = task(id);
    if (t.status != TaskStatus::Queued)
        throw std::logic_error("assigning a task that is not queued");
    t.status = TaskStatus::Assigned;
    t.assigned_robot = robot;
    t.assign_tick = tick;
    queued_.erase(std::remove(queued_.begin(), queued_.end(), id), queued_.end());
}

void TaskQueues::mark_picked_up(TaskId id, Tick tick)
{
    Task& t = task(id);
    if (t.status != TaskStatus::Assigned)
        throw std::logic_error("picking up a task that is not assigned");
    t.status = TaskStatus::PickedUp;
    t.pickup_tick = tick;
}

void TaskQueues::mark_done(TaskId id, Tick tick)
{
    Task& t = task(id);
    if (t.status != TaskStatus::PickedUp)
        throw std::logic_error("finishing a task that is not picked up");
    t.status = TaskStatus::Done;
    t.finish_tick = tick;
    --unfinished_;
    release_waiting(t);
}

const Task& TaskQueues::task(TaskId id) const
{
    return tasks_[slot(id)];
}

Task& TaskQueues::task(TaskId id)
{
    return tasks_[slot(id)];
}

bool TaskQueues::has_task(TaskId id) const
{
    return index_.count(id) != 0;
}

bool TaskQueues::stations_exclusive() const
{
    for (size_t i = 0; i < tasks_.size(); ++i) {
        if (!tasks_[i].active())
            continue;
        for (size_t j = i + 1; j < tasks_.size(); ++j) {
            if (!tasks_[j].active())
                continue;
            if (tasks_conflict(tasks_[i], tasks_[j]))
                return false;
        }
    }
    return true;
}

} // namespace waresim

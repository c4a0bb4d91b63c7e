#include "rbmflow/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbmflow {

ReflectedPath::ReflectedPath(const Domain& dom, Vec start, double dt,
                             std::optional<NoiseRef> noise)
    : dim_(dom.dim()), dt_(dt), noise_(noise) {
    positions_.assign(start.data(), start.data() + dim_);
    local_time_.push_back(0.0);
    contact_.push_back(0);
}

Vec ReflectedPath::position(std::size_t k) const {
    return Eigen::Map<const Eigen::VectorXd>(positions_.data() + k * static_cast<std::size_t>(dim_),
                                             dim_);
}

void ReflectedPath::append(const Vec& position, double local_time_increment) {
    positions_.insert(positions_.end(), position.data(), position.data() + dim_);
    local_time_.push_back(local_time_.back() + local_time_increment);
    contact_.push_back(local_time_increment > 0.0 ? 1 : 0);
}

StepResult step_reflect(const Domain& dom, const Vec& x, const Vec& db) {
    Vec proposal = x + db;
    if (dom.phi(proposal) <= 0.0) return {std::move(proposal), 0.0};
    Vec projected = boundary_project(dom, proposal);
    const double pushed = (proposal - projected).norm();
    if (!(pushed < dom.reach()))
        throw StepSizeError("step_reflect: proposal exited the domain by more than the reach; "
                            "halve dt");
    return {std::move(projected), pushed};
}

namespace {

std::size_t fixed_step_count(const Horizon& horizon, double dt, std::size_t max_steps) {
    std::size_t target = 0;
    if (horizon.kind == Horizon::Kind::Steps) {
        target = horizon.count;
    } else {
        if (!(horizon.value >= 0.0))
            throw std::invalid_argument("simulate: time horizon must be nonnegative");
        target = static_cast<std::size_t>(std::llround(horizon.value / dt));
    }
    if (target > max_steps)
        throw BudgetError("simulate: requested horizon exceeds the step budget");
    return target;
}

void check_start(const Domain& dom, const Vec& start) {
    if (start.size() != dom.dim())
        throw std::invalid_argument("simulate: start dimension mismatch");
    if (!dom.in_closure(start))
        throw std::invalid_argument("simulate: start point outside closure(D)");
}

}  // namespace

ReflectedPath simulate_path(const Domain& dom, const Vec& start, IncrementStream& noise,
                            const Horizon& horizon, std::size_t max_steps) {
    auto flow = simulate_flow(dom, {start}, noise, horizon, max_steps);
    return std::move(flow.front());
}

std::vector<ReflectedPath> simulate_flow(const Domain& dom, const std::vector<Vec>& starts,
                                         IncrementStream& noise, const Horizon& horizon,
                                         std::size_t max_steps) {
    if (starts.empty()) throw std::invalid_argument("simulate_flow: no start points");
    if (noise.dim() != dom.dim())
        throw std::invalid_argument("simulate_flow: noise dimension mismatch");
    for (const Vec& s : starts) check_start(dom, s);

    std::vector<ReflectedPath> paths;
    paths.reserve(starts.size());
    std::vector<Vec> state = starts;
    for (const Vec& s : starts) paths.emplace_back(dom, s, noise.dt(), noise.ref());

    const bool by_local_time = horizon.kind == Horizon::Kind::LocalTime;
    std::size_t target = 0;
    if (by_local_time) {
        if (!(horizon.value >= 0.0))
            throw std::invalid_argument("simulate_flow: target local time must be nonnegative");
        if (paths.front().final_local_time() >= horizon.value) return paths;
    } else {
        target = fixed_step_count(horizon, noise.dt(), max_steps);
    }

    Vec db(dom.dim());
    for (std::size_t k = 0; by_local_time || k < target; ++k) {
        if (by_local_time && k >= max_steps)
            throw BudgetError("simulate_flow: step budget exhausted before local time target");
        noise.next(db);
        for (std::size_t i = 0; i < paths.size(); ++i) {
            StepResult step = step_reflect(dom, state[i], db);
            paths[i].append(step.position, step.local_time_increment);
            state[i] = std::move(step.position);
        }
        // sigma_r comes from the first path: stop every path at the same step.
        if (by_local_time && paths.front().final_local_time() >= horizon.value) break;
    }
    return paths;
}

std::size_t inverse_local_time(const ReflectedPath& path, double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("inverse_local_time: r must be nonnegative");
    const auto& ls = path.local_times();
    auto it = std::lower_bound(ls.begin(), ls.end(), r);
    if (it == ls.end())
        throw InsufficientPathError("inverse_local_time: local time never reaches r");
    return static_cast<std::size_t>(it - ls.begin());
}

}  // namespace rbmflow

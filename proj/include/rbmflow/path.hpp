// Discretized Skorokhod equation: Euler proposals with nearest-point
// projection, boundary local time as accumulated pushed distance.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rbmflow/geometry.hpp"
#include "rbmflow/noise.hpp"

namespace rbmflow {

/// One discretized reflected trajectory. Invariants:
///   - every stored position satisfies phi <= tol_bdry,
///   - L_0 = 0, L is nondecreasing and increases only at contact steps,
///   - contact(k) holds iff the projection was applied at step k.
class ReflectedPath {
public:
    ReflectedPath(const Domain& dom, Vec start, double dt,
                  std::optional<NoiseRef> noise = std::nullopt);

    int dim() const { return dim_; }
    double dt() const { return dt_; }

    /// Number of stored states (steps consumed + 1).
    std::size_t size() const { return local_time_.size(); }
    std::size_t steps() const { return size() - 1; }

    double time(std::size_t k) const { return static_cast<double>(k) * dt_; }
    Vec position(std::size_t k) const;
    double local_time(std::size_t k) const { return local_time_[k]; }
    const std::vector<double>& local_times() const { return local_time_; }
    bool contact(std::size_t k) const { return contact_[k] != 0; }
    double final_local_time() const { return local_time_.back(); }
    const std::optional<NoiseRef>& noise() const { return noise_; }

    void append(const Vec& position, double local_time_increment);

private:
    int dim_;
    double dt_;
    std::vector<double> positions_;  // flat, stride dim_
    std::vector<double> local_time_;
    std::vector<std::uint8_t> contact_;
    std::optional<NoiseRef> noise_;
};

struct StepResult {
    Vec position;
    double local_time_increment = 0.0;  // pushed distance; > 0 iff projected
    bool contact() const { return local_time_increment > 0.0; }
};

/// One Euler step: propose y = x + db; keep it if phi(y) <= 0, otherwise
/// return (Pi(y), |y - Pi(y)|). Throws StepSizeError if the proposal exits
/// the domain by more than the reach (halve dt).
StepResult step_reflect(const Domain& dom, const Vec& x, const Vec& db);

/// Simulation horizon: fixed physical time, target boundary local time
/// (stops at sigma_r, the first step with L >= r), or an explicit step count.
class Horizon {
public:
    enum class Kind { Time, LocalTime, Steps };

    static Horizon time(double t) { return {Kind::Time, t, 0}; }
    static Horizon local_time(double r) { return {Kind::LocalTime, r, 0}; }
    static Horizon steps(std::size_t n) { return {Kind::Steps, 0.0, n}; }

    Kind kind;
    double value;
    std::size_t count;
};

ReflectedPath simulate_path(const Domain& dom, const Vec& start, IncrementStream& noise,
                            const Horizon& horizon, std::size_t max_steps);

/// Synchronous coupling: every path consumes the identical increment
/// sequence. A local-time horizon is read off the FIRST path (the base
/// point); all paths are stopped at that same step.
std::vector<ReflectedPath> simulate_flow(const Domain& dom, const std::vector<Vec>& starts,
                                         IncrementStream& noise, const Horizon& horizon,
                                         std::size_t max_steps);

/// sigma_r as a step index: smallest k with L_k >= r.
/// Throws InsufficientPathError if r exceeds the final local time.
std::size_t inverse_local_time(const ReflectedPath& path, double r);

}  // namespace rbmflow

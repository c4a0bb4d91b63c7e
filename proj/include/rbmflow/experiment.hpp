// Seeded, parallel Monte Carlo experiment runners. Replica i uses seed
// base_seed + i; cells are merged by index, so identical configs produce
// byte-identical CSV outputs.
#pragma once

#include <string>
#include <vector>

#include "rbmflow/config.hpp"
#include "rbmflow/derivative.hpp"

namespace rbmflow {

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double std_error = 0.0;
    int count = 0;

    static SummaryStats of(std::vector<double> values);
};

/// Direction set K: `count` unit vectors evenly distributed on the sphere
/// (16 in 2D, 64 in 3D when count == 0), plus the inward normal and a
/// tangent at the boundary projection of z0.
std::vector<Vec> direction_set(const Domain& dom, const Vec& z0, int count);

struct FlowDerivativeOutcome {
    std::vector<double> eps;
    std::vector<SummaryStats> sup_err;  // per eps, over surviving replicas
    int cells = 0;
    int failed_cells = 0;  // budget-errored (eps, replica) cells

    bool medians_strictly_decreasing() const;
    bool smallest_eps_below_half_of_largest() const;
    bool within_error_budget() const;  // failed cells <= 10%
    bool pass() const;
};

/// Theorem-3.1-style experiment: per (eps, replica), simulate the coupled
/// flow to sigma_r, assemble A_r^eps with eps_star = c0 * eps, and record the
/// sup over directions of |finite difference - A v|.
/// Writes flow_derivative.csv and flow_derivative_summary.csv.
FlowDerivativeOutcome run_flow_derivative(const ExperimentConfig& config);

struct CalibrationOutcome {
    double mean_l1 = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double dt = 0.0;
    int replicas = 0;

    double rel_error() const { return std::abs(mean_l1 - target) / target; }
    bool pass() const { return rel_error() <= 0.05; }
};

/// Revuz calibration: uniform starts, horizon time_horizon, mean final local
/// time against surface(dD) / (2 volume(D)). Writes localtime.csv.
CalibrationOutcome run_localtime_calibration(const ExperimentConfig& config);

struct TailSlopeOutcome {
    TailCounts counts;
    double slope = 0.0;             // least-squares log count vs log b
    double slope_first_half = 0.0;  // split-sample consistency
    double slope_second_half = 0.0;

    bool pass() const { return slope >= -1.25 && slope <= -0.75; }
};

/// Excursion-size tail: counts of size >= b excursions per unit local time
/// across replicas. Writes excursion_tail.csv.
TailSlopeOutcome run_excursion_stats(const ExperimentConfig& config);

struct ContractionOutcome {
    double max_ratio = 0.0;
    bool monotone = true;

    // <= 1 up to double-precision representation noise
    bool pass() const { return monotone && max_ratio <= 1.0 + 1e-12; }
};

/// Synchronous-coupling contraction in a convex domain: |X-Y| must never
/// exceed |X_0 - Y_0|. Writes contraction.csv.
ContractionOutcome run_contraction_check(const ExperimentConfig& config);

struct Identity2dOutcome {
    double max_rel_gap = 0.0;

    bool pass() const { return max_rel_gap <= 1e-8; }
};

/// 2D identity between |A v| and the curvature product, over replicas and
/// directions. Writes identity2d.csv.
Identity2dOutcome run_identity_2d(const ExperimentConfig& config);

}  // namespace rbmflow

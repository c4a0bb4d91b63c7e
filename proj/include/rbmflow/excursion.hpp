// Excursion decomposition of reflected paths and the (ell_k, x_k) ladder
// feeding the multiplicative functional.
#pragma once

#include <cstddef>
#include <vector>

#include "rbmflow/path.hpp"

namespace rbmflow {

/// One boundary excursion. The excursion occupies the open index interval
/// (start_idx, end_idx): contact holds at both endpoints and fails strictly
/// between, and the local time is flat across the interior.
struct ExcursionRecord {
    std::size_t start_idx = 0;
    std::size_t end_idx = 0;
    Vec left_endpoint;   // e(0), position at start_idx
    Vec right_endpoint;  // x_k = e(zeta-), position at end_idx
    double ell = 0.0;    // local time at the excursion start
    double size = 0.0;   // |e(0) - x_k|
};

/// All completed excursions of a path, in path order. A trailing run of
/// non-contact steps with no closing contact is discarded.
/// Throws NoBoundaryHitError if the path never touched the boundary.
std::vector<ExcursionRecord> decompose(const ReflectedPath& path);

/// The thresholded excursion skeleton over local time [0, r]: the first hit
/// x_0, the kept records (size >= eps_star, start local time < r), and the
/// local-time gaps dells with ell_0 = 0 and ell_{m+1} = r.
struct ExcursionLadder {
    Vec first_hit;                        // x_0
    std::vector<ExcursionRecord> records; // sorted by start_idx
    double r = 0.0;
    std::vector<double> dells;            // size records.size() + 1, sums to r

    std::size_t excursion_count() const { return records.size(); }

    /// Ladder point x_k: first_hit for k = 0, then right endpoints.
    const Vec& point(std::size_t k) const {
        return k == 0 ? first_hit : records[k - 1].right_endpoint;
    }
};

/// Builds the ladder from a decomposition of the same path.
/// Throws InsufficientPathError if the path's final local time is below r.
ExcursionLadder build_ladder(const ReflectedPath& path,
                             const std::vector<ExcursionRecord>& records, double eps_star,
                             double r);

/// Mean number of excursions of size >= b per unit of local time, with a
/// normal-approximation standard error, per threshold b. Requires at least
/// 30 replica ladders.
struct TailCounts {
    std::vector<double> thresholds;
    std::vector<double> mean_counts;   // per unit local time
    std::vector<double> std_errors;
    int replicas = 0;
};

TailCounts excursion_size_counts(const std::vector<ExcursionLadder>& ladders,
                                 const std::vector<double>& thresholds);

}  // namespace rbmflow

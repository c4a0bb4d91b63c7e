#include "rbmflow/excursion.hpp"

#include <algorithm>
#include <cmath>

namespace rbmflow {

std::vector<ExcursionRecord> decompose(const ReflectedPath& path) {
    const std::size_t n = path.size();
    std::size_t first_contact = n;
    for (std::size_t k = 0; k < n; ++k)
        if (path.contact(k)) {
            first_contact = k;
            break;
        }
    if (first_contact == n)
        throw NoBoundaryHitError("decompose: path has no contact steps");

    std::vector<ExcursionRecord> records;
    std::size_t last_contact = first_contact;
    for (std::size_t k = first_contact + 1; k < n; ++k) {
        if (!path.contact(k)) continue;
        if (k > last_contact + 1) {
            ExcursionRecord rec;
            rec.start_idx = last_contact;
            rec.end_idx = k;
            rec.left_endpoint = path.position(last_contact);
            rec.right_endpoint = path.position(k);
            rec.ell = path.local_time(last_contact);
            rec.size = (rec.left_endpoint - rec.right_endpoint).norm();
            records.push_back(std::move(rec));
        }
        last_contact = k;
    }
    return records;
}

ExcursionLadder build_ladder(const ReflectedPath& path,
                             const std::vector<ExcursionRecord>& records, double eps_star,
                             double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("build_ladder: r must be nonnegative");
    if (path.final_local_time() < r)
        throw InsufficientPathError("build_ladder: path local time below r");

    ExcursionLadder ladder;
    ladder.r = r;

    bool have_first = false;
    for (std::size_t k = 0; k < path.size(); ++k)
        if (path.contact(k)) {
            ladder.first_hit = path.position(k);
            have_first = true;
            break;
        }
    if (!have_first) throw NoBoundaryHitError("build_ladder: path has no contact steps");

    for (const ExcursionRecord& rec : records)
        if (rec.size >= eps_star && rec.ell < r) ladder.records.push_back(rec);

    // dells telescope: ell_0 = 0, ell_{m+1} = r.
    ladder.dells.reserve(ladder.records.size() + 1);
    double prev = 0.0;
    for (const ExcursionRecord& rec : ladder.records) {
        ladder.dells.push_back(rec.ell - prev);
        prev = rec.ell;
    }
    ladder.dells.push_back(r - prev);
    return ladder;
}

TailCounts excursion_size_counts(const std::vector<ExcursionLadder>& ladders,
                                 const std::vector<double>& thresholds) {
    const int replicas = static_cast<int>(ladders.size());
    if (replicas < 30)
        throw ConfigError("excursion_size_counts: at least 30 replicas required");

    TailCounts out;
    out.thresholds = thresholds;
    out.replicas = replicas;
    for (double b : thresholds) {
        double sum = 0.0, sum_sq = 0.0;
        for (const ExcursionLadder& ladder : ladders) {
            std::size_t count = 0;
            for (const ExcursionRecord& rec : ladder.records)
                if (rec.size >= b) ++count;
            const double per_unit = static_cast<double>(count) / ladder.r;
            sum += per_unit;
            sum_sq += per_unit * per_unit;
        }
        const double mean = sum / replicas;
        const double var = std::max(0.0, (sum_sq - replicas * mean * mean) / (replicas - 1));
        out.mean_counts.push_back(mean);
        out.std_errors.push_back(std::sqrt(var / replicas));
    }
    return out;
}

}  // namespace rbmflow

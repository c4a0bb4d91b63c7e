#include "rbmflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "rbmflow/csv.hpp"

namespace rbmflow {

namespace {

// Auxiliary RNG streams (start sampling, displacement directions) must not
// alias the driving-noise stream of the same replica.
constexpr std::uint64_t kAuxSeedSalt = 0x9e3779b97f4a7c15ULL;

template <class Fn>
void parallel_cells(std::size_t n, int threads, Fn&& fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        std::size_t i;
        while ((i = next.fetch_add(1)) < n) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::filesystem::path ensure_out_dir(const ExperimentConfig& config) {
    std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

SummaryStats SummaryStats::of(std::vector<double> values) {
    if (values.empty()) throw Error("SummaryStats: empty sample");
    SummaryStats s;
    s.count = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.count;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = s.count > 1 ? std::sqrt(ss / (s.count - 1) / s.count) : 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return s;
}

std::vector<Vec> direction_set(const Domain& dom, const Vec& z0, int count) {
    const int n = dom.dim();
    if (count == 0) count = n == 2 ? 16 : 64;

    std::vector<Vec> dirs;
    dirs.reserve(static_cast<std::size_t>(count) + 2);
    if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double angle = 2.0 * M_PI * i / count;
            dirs.push_back(make_vec({std::cos(angle), std::sin(angle)}));
        }
    } else {
        // Fibonacci sphere
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double angle = golden * i;
            dirs.push_back(make_vec({rho * std::cos(angle), rho * std::sin(angle), z}));
        }
    }

    const Vec pi_z0 = boundary_project(dom, z0);
    const Vec normal = inward_normal(dom, pi_z0);
    dirs.push_back(normal);
    for (int axis = 0; axis < n; ++axis) {
        Vec e = Vec::Zero(n);
        e(axis) = 1.0;
        Vec tangent = tangent_project(normal, e);
        if (tangent.norm() > 0.1) {
            dirs.push_back(tangent / tangent.norm());
            break;
        }
    }
    return dirs;
}

bool FlowDerivativeOutcome::medians_strictly_decreasing() const {
    for (std::size_t i = 1; i < sup_err.size(); ++i)
        if (!(sup_err[i].median < sup_err[i - 1].median)) return false;
    return true;
}

bool FlowDerivativeOutcome::smallest_eps_below_half_of_largest() const {
    if (sup_err.size() < 2) return true;
    return sup_err.back().median < 0.5 * sup_err.front().median;
}

bool FlowDerivativeOutcome::within_error_budget() const {
    return failed_cells * 10 <= cells;
}

bool FlowDerivativeOutcome::pass() const {
    return within_error_budget() && medians_strictly_decreasing() &&
           smallest_eps_below_half_of_largest();
}

FlowDerivativeOutcome run_flow_derivative(const ExperimentConfig& config) {
    config.validate();
    const Domain dom = Domain::parse(config.domain);
    const Vec z0 = config.start_point(dom);
    const std::vector<Vec> directions = direction_set(dom, z0, config.directions);

    for (double eps : config.eps)
        for (const Vec& v : directions)
            if (!dom.in_closure(z0 + eps * v))
                throw ConfigError("flow-derivative: displaced start z0 + eps v leaves the domain");

    struct Row {
        double eps = 0.0, eps_star = 0.0, sup_err = 0.0;
        double norm_a = 0.0, sv_min = 0.0, sv_next = 0.0;
        std::uint64_t seed = 0;
        bool failed = false;
    };
    const std::size_t n_eps = config.eps.size();
    const std::size_t cells = n_eps * static_cast<std::size_t>(config.replicas);
    std::vector<Row> rows(cells);

    parallel_cells(cells, config.threads, [&](std::size_t cell) {
        const std::size_t eps_idx = cell / static_cast<std::size_t>(config.replicas);
        const std::size_t replica = cell % static_cast<std::size_t>(config.replicas);
        const double eps = config.eps[eps_idx];
        const double eps_star = config.c0 * eps;
        Row& row = rows[cell];
        row.eps = eps;
        row.eps_star = eps_star;
        row.seed = config.base_seed + replica;

        GaussianStream noise(row.seed, config.dt, dom.dim());
        std::vector<Vec> starts;
        starts.reserve(directions.size() + 1);
        starts.push_back(z0);
        for (const Vec& v : directions) starts.push_back(z0 + eps * v);

        std::vector<ReflectedPath> paths;
        try {
            paths = simulate_flow(dom, starts, noise, Horizon::local_time(config.r),
                                  config.budget);
        } catch (const BudgetError&) {
            row.failed = true;
            return;
        }

        const std::size_t sigma = inverse_local_time(paths[0], config.r);
        const ExcursionLadder ladder =
            build_ladder(paths[0], decompose(paths[0]), eps_star, config.r);
        const LinearMap a = multiplicative_functional(dom, ladder);

        double sup_err = 0.0;
        const Vec base = paths[0].position(sigma);
        for (std::size_t d = 0; d < directions.size(); ++d) {
            const Vec fd = (paths[d + 1].position(sigma) - base) / eps;
            sup_err = std::max(sup_err, (fd - a * directions[d]).norm());
        }
        row.sup_err = sup_err;

        const Vec sv = rank_profile(a);
        row.norm_a = sv(0);
        row.sv_min = sv(sv.size() - 1);
        row.sv_next = sv.size() > 1 ? sv(sv.size() - 2) : sv(0);
    });

    const auto dir = ensure_out_dir(config);
    CsvSink csv((dir / "flow_derivative.csv").string(), false);
    csv.line("eps,eps_star,dt,seed,r,sup_err,norm_A,sv_min,sv_next");
    for (const Row& row : rows) {
        if (row.failed) continue;
        csv.line(fmt_double(row.eps) + "," + fmt_double(row.eps_star) + "," +
                 fmt_double(config.dt) + "," + std::to_string(row.seed) + "," +
                 fmt_double(config.r) + "," + fmt_double(row.sup_err) + "," +
                 fmt_double(row.norm_a) + "," + fmt_double(row.sv_min) + "," +
                 fmt_double(row.sv_next));
    }

    FlowDerivativeOutcome outcome;
    outcome.eps.assign(config.eps.begin(), config.eps.end());
    outcome.cells = static_cast<int>(cells);
    CsvSink summary((dir / "flow_derivative_summary.csv").string(), false);
    summary.line("eps,median_sup_err,mean_sup_err,std_error,replicas_ok,replicas_failed");
    for (std::size_t e = 0; e < n_eps; ++e) {
        std::vector<double> errs;
        int failed = 0;
        for (int rep = 0; rep < config.replicas; ++rep) {
            const Row& row = rows[e * static_cast<std::size_t>(config.replicas) +
                                  static_cast<std::size_t>(rep)];
            if (row.failed) {
                ++failed;
                continue;
            }
            errs.push_back(row.sup_err);
        }
        outcome.failed_cells += failed;
        if (errs.empty()) throw Error("flow-derivative: every replica failed for one eps");
        const SummaryStats stats = SummaryStats::of(std::move(errs));
        outcome.sup_err.push_back(stats);
        summary.line(fmt_double(config.eps[e]) + "," + fmt_double(stats.median) + "," +
                     fmt_double(stats.mean) + "," + fmt_double(stats.std_error) + "," +
                     std::to_string(stats.count) + "," + std::to_string(failed));
    }
    return outcome;
}

CalibrationOutcome run_localtime_calibration(const ExperimentConfig& config) {
    config.validate();
    const Domain dom = Domain::parse(config.domain);
    if (!dom.bounded())
        throw ConfigError("calibrate-localtime: requires a bounded domain");

    std::vector<double> l1(static_cast<std::size_t>(config.replicas));
    parallel_cells(l1.size(), config.threads, [&](std::size_t i) {
        const std::uint64_t seed = config.base_seed + i;
        std::mt19937_64 aux(seed ^ kAuxSeedSalt);
        const Vec start = dom.sample_interior(aux);
        GaussianStream noise(seed, config.dt, dom.dim());
        const ReflectedPath path =
            simulate_path(dom, start, noise, Horizon::time(config.time_horizon), config.budget);
        l1[i] = path.final_local_time();
    });

    const auto dir = ensure_out_dir(config);
    CsvSink csv((dir / "localtime.csv").string(), false);
    csv.line("replica,seed,L1");
    for (std::size_t i = 0; i < l1.size(); ++i)
        csv.line(std::to_string(i) + "," + std::to_string(config.base_seed + i) + "," +
                 fmt_double(l1[i]));

    const SummaryStats stats = SummaryStats::of(l1);
    CalibrationOutcome outcome;
    outcome.mean_l1 = stats.mean;
    outcome.std_error = stats.std_error;
    outcome.target = dom.surface_area() / (2.0 * dom.volume());
    outcome.dt = config.dt;
    outcome.replicas = config.replicas;
    return outcome;
}

TailSlopeOutcome run_excursion_stats(const ExperimentConfig& config) {
    config.validate();
    const Domain dom = Domain::parse(config.domain);
    const Vec z0 = config.start_point(dom);
    if (dom.bounded())
        for (double b : config.thresholds)
            if (!(b < dom.diameter()))
                throw ConfigError("excursion-stats: thresholds must lie in (0, diam(D))");

    std::vector<ExcursionLadder> ladders(static_cast<std::size_t>(config.replicas));
    parallel_cells(ladders.size(), config.threads, [&](std::size_t i) {
        GaussianStream noise(config.base_seed + i, config.dt, dom.dim());
        const ReflectedPath path =
            simulate_path(dom, z0, noise, Horizon::local_time(config.r), config.budget);
        // eps_star = 0: keep every completed excursion.
        ladders[i] = build_ladder(path, decompose(path), 0.0, config.r);
    });

    TailSlopeOutcome outcome;
    outcome.counts = excursion_size_counts(ladders, config.thresholds);

    auto slope_of = [&](const std::vector<ExcursionLadder>& subset) {
        const TailCounts counts = excursion_size_counts(subset, config.thresholds);
        std::vector<double> log_b, log_c;
        for (std::size_t i = 0; i < counts.thresholds.size(); ++i) {
            if (counts.mean_counts[i] <= 0.0) continue;
            log_b.push_back(std::log(counts.thresholds[i]));
            log_c.push_back(std::log(counts.mean_counts[i]));
        }
        if (log_b.size() < 2)
            throw Error("excursion-stats: too few nonzero tail counts to fit a slope");
        return least_squares_slope(log_b, log_c);
    };
    outcome.slope = slope_of(ladders);
    const std::size_t half = ladders.size() / 2;
    outcome.slope_first_half = slope_of({ladders.begin(), ladders.begin() + half});
    outcome.slope_second_half = slope_of({ladders.begin() + half, ladders.end()});

    const auto dir = ensure_out_dir(config);
    CsvSink csv((dir / "excursion_tail.csv").string(), false);
    csv.line("b,mean_count_per_unit_L,std_error,replicas");
    for (std::size_t i = 0; i < outcome.counts.thresholds.size(); ++i)
        csv.line(fmt_double(outcome.counts.thresholds[i]) + "," +
                 fmt_double(outcome.counts.mean_counts[i]) + "," +
                 fmt_double(outcome.counts.std_errors[i]) + "," +
                 std::to_string(outcome.counts.replicas));
    CsvSink summary((dir / "excursion_tail_summary.csv").string(), false);
    summary.line("slope,slope_first_half,slope_second_half");
    summary.line(fmt_double(outcome.slope) + "," + fmt_double(outcome.slope_first_half) + "," +
                 fmt_double(outcome.slope_second_half));
    return outcome;
}

ContractionOutcome run_contraction_check(const ExperimentConfig& config) {
    config.validate();
    const Domain dom = Domain::parse(config.domain);
    if (!dom.bounded())
        throw ConfigError("contraction: requires a convex bounded domain (ball/ellipsoid)");
    const Vec z0 = config.start_point(dom);

    ContractionOutcome outcome;
    if (config.displacement == 0.0) {
        outcome.max_ratio = 1.0;  // degenerate input, by convention
        return outcome;
    }

    std::vector<double> ratios(static_cast<std::size_t>(config.replicas));
    std::vector<std::uint8_t> monotone(static_cast<std::size_t>(config.replicas), 1);
    parallel_cells(ratios.size(), config.threads, [&](std::size_t i) {
        const std::uint64_t seed = config.base_seed + i;
        std::mt19937_64 aux(seed ^ kAuxSeedSalt);
        Vec u;
        do {
            u = dom.sample_boundary(aux);  // random direction via boundary sample
        } while (u.norm() < 1e-12);
        u /= u.norm();
        Vec y0 = z0 + config.displacement * u;
        if (!dom.in_closure(y0)) y0 = z0 - config.displacement * u;
        if (!dom.in_closure(y0))
            throw ConfigError("contraction: displaced start leaves the domain; reduce it");

        GaussianStream noise(seed, config.dt, dom.dim());
        const auto paths = simulate_flow(dom, {z0, y0}, noise, Horizon::steps(config.steps),
                                         std::max(config.budget, config.steps));
        const double d0 = (paths[0].position(0) - paths[1].position(0)).norm();
        double max_ratio = 0.0;
        double prev = d0;
        bool mono = true;
        for (std::size_t k = 1; k < paths[0].size(); ++k) {
            const double d = (paths[0].position(k) - paths[1].position(k)).norm();
            max_ratio = std::max(max_ratio, d / d0);
            if (d > prev * (1.0 + 1e-12)) mono = false;
            prev = d;
        }
        ratios[i] = max_ratio;
        monotone[i] = mono ? 1 : 0;
    });

    const auto dir = ensure_out_dir(config);
    CsvSink csv((dir / "contraction.csv").string(), false);
    csv.line("replica,seed,max_ratio,monotone");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        csv.line(std::to_string(i) + "," + std::to_string(config.base_seed + i) + "," +
                 fmt_double(ratios[i]) + "," + std::to_string(int(monotone[i])));
        outcome.max_ratio = std::max(outcome.max_ratio, ratios[i]);
        outcome.monotone = outcome.monotone && monotone[i];
    }
    return outcome;
}

Identity2dOutcome run_identity_2d(const ExperimentConfig& config) {
    config.validate();
    const Domain dom = Domain::parse(config.domain);
    if (dom.dim() != 2) throw ConfigError("identity-2d: requires a 2D domain");
    const Vec z0 = config.start_point(dom);
    const std::vector<Vec> directions = direction_set(dom, z0, config.directions);
    constexpr double kFloor = 1e-14;

    std::vector<double> gaps(static_cast<std::size_t>(config.replicas));
    parallel_cells(gaps.size(), config.threads, [&](std::size_t i) {
        GaussianStream noise(config.base_seed + i, config.dt, dom.dim());
        const ReflectedPath path =
            simulate_path(dom, z0, noise, Horizon::local_time(config.r), config.budget);
        const ExcursionLadder ladder =
            build_ladder(path, decompose(path), config.eps_star, config.r);
        const LinearMap a = multiplicative_functional(dom, ladder);
        double max_gap = 0.0;
        for (const Vec& v : directions) {
            const double matrix_route = (a * v).norm();
            const double product_route = curvature_product_2d(dom, ladder, v);
            max_gap = std::max(max_gap, std::abs(matrix_route - product_route) /
                                            std::max(matrix_route, kFloor));
        }
        gaps[i] = max_gap;
    });

    const auto dir = ensure_out_dir(config);
    CsvSink csv((dir / "identity2d.csv").string(), false);
    csv.line("replica,seed,max_rel_gap");
    Identity2dOutcome outcome;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        csv.line(std::to_string(i) + "," + std::to_string(config.base_seed + i) + "," +
                 fmt_double(gaps[i]));
        outcome.max_rel_gap = std::max(outcome.max_rel_gap, gaps[i]);
    }
    return outcome;
}

}  // namespace rbmflow

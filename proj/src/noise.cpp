#include "rbmflow/noise.hpp"

#include <cmath>

namespace rbmflow {

GaussianStream::GaussianStream(std::uint64_t seed, double dt, int dim)
    : rng_(seed), seed_(seed), dt_(dt), sqrt_dt_(std::sqrt(dt)), dim_(dim) {
    if (!(dt > 0.0)) throw ConfigError("GaussianStream: dt must be positive");
    if (dim < 1) throw ConfigError("GaussianStream: dimension must be positive");
}

double GaussianStream::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // 53-bit uniforms in (0, 1]; u1 > 0 keeps the log finite.
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

void GaussianStream::next(Vec& db) {
    db.resize(dim_);
    for (int i = 0; i < dim_; ++i) db(i) = sqrt_dt_ * next_normal();
}

FixedStream::FixedStream(std::vector<Vec> increments, double dt)
    : increments_(std::move(increments)), dt_(dt) {
    if (increments_.empty()) throw ConfigError("FixedStream: empty increment list");
    dim_ = static_cast<int>(increments_.front().size());
}

void FixedStream::next(Vec& db) {
    if (pos_ >= increments_.size())
        throw BudgetError("FixedStream: increment list exhausted");
    db = increments_[pos_++];
}

}  // namespace rbmflow

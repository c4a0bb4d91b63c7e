// Driving-noise streams. Every path of a synchronous coupling consumes the
// same increment sequence, so a stream is the unit of sharing.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rbmflow/errors.hpp"
#include "rbmflow/linalg.hpp"

namespace rbmflow {

struct NoiseRef {
    std::uint64_t seed = 0;
    double dt = 0.0;
};

class IncrementStream {
public:
    virtual ~IncrementStream() = default;

    /// Fills db with the next per-step driving increment.
    virtual void next(Vec& db) = 0;

    virtual int dim() const = 0;
    virtual double dt() const = 0;

    /// (seed, dt) when the stream is regenerable from one.
    virtual std::optional<NoiseRef> ref() const { return std::nullopt; }
};

/// i.i.d. N(0, dt I) increments, fully determined by (seed, dt, dim):
/// regenerating with the same triple yields bit-identical increments.
/// Box-Muller on top of mt19937_64 keeps the draw sequence independent of
/// standard-library distribution internals.
class GaussianStream final : public IncrementStream {
public:
    GaussianStream(std::uint64_t seed, double dt, int dim);

    void next(Vec& db) override;
    int dim() const override { return dim_; }
    double dt() const override { return dt_; }
    std::optional<NoiseRef> ref() const override { return NoiseRef{seed_, dt_}; }
    std::uint64_t seed() const { return seed_; }

private:
    double next_normal();

    std::mt19937_64 rng_;
    std::uint64_t seed_;
    double dt_;
    double sqrt_dt_;
    int dim_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Replays an explicit increment list; oracle and example tests drive the
/// simulator through this.
class FixedStream final : public IncrementStream {
public:
    FixedStream(std::vector<Vec> increments, double dt);

    void next(Vec& db) override;
    int dim() const override { return dim_; }
    double dt() const override { return dt_; }
    std::size_t remaining() const { return increments_.size() - pos_; }

private:
    std::vector<Vec> increments_;
    std::size_t pos_ = 0;
    double dt_;
    int dim_;
};

}  // namespace rbmflow

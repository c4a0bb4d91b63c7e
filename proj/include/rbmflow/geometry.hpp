// Differential geometry of C^2 implicit domains: normals, nearest-point
// projection, tangent projectors, shape operators and their exponentials.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rbmflow/errors.hpp"
#include "rbmflow/linalg.hpp"

namespace rbmflow {

enum class DomainKind { Ball, Ellipsoid, Halfspace };

/// An implicit C^2 domain D = { phi < 0 } with analytic gradient and Hessian.
/// Immutable after construction; safe to share across worker threads.
///
/// Shipped kinds: ball(R) and axis-aligned ellipse/ellipsoid (bounded, C^2),
/// plus an unbounded halfspace { x_n > 0 } for tests with a flat boundary.
class Domain {
public:
    static Domain ball(int dim, double radius);
    static Domain ellipsoid(std::vector<double> semi_axes);
    static Domain halfspace(int dim);

    /// Parses a spec string: `ball:r=1.0`, `ball:r=1.0,d=3`,
    /// `ellipse:a=2.0,b=1.0`, `ellipsoid:a=..,b=..,c=..`, `halfspace`,
    /// `halfspace:d=3`. Grammar: `kind(:key=float(,key=float)*)?`.
    static Domain parse(const std::string& spec);
    std::string spec_string() const;

    int dim() const { return dim_; }
    DomainKind kind() const { return kind_; }
    bool bounded() const { return kind_ != DomainKind::Halfspace; }

    double phi(const Vec& x) const;
    Vec grad_phi(const Vec& x) const;
    Mat hess_phi(const Vec& x) const;

    /// Reach lower bound delta_0: below this distance from the boundary the
    /// nearest boundary point is unique. Ball: R; ellipsoid: min a_i^2 / max a_i;
    /// halfspace: +infinity.
    double reach() const { return reach_; }

    /// Fixed fallback point z_* returned by boundary_project for points at
    /// distance >= delta_0 from the boundary.
    const Vec& reference_point() const { return z_star_; }

    /// Diameter for bounded domains; the halfspace reports a unit scale of 2
    /// so tolerance formulas stay finite.
    double diameter() const { return diameter_; }

    /// Absolute tolerance for "x lies on the boundary": 1e-9 * diam(D),
    /// measured as |phi| / |grad phi|.
    double boundary_tol() const { return 1e-9 * diameter_; }

    /// Largest principal curvature magnitude over the boundary.
    double max_curvature() const { return max_curvature_; }

    double volume() const;        // bounded domains only
    double surface_area() const;  // bounded domains only

    bool contains(const Vec& x) const { return phi(x) <= 0.0; }
    bool in_closure(const Vec& x) const;
    bool on_boundary(const Vec& x) const;

    /// Distance of x to the zero level set of phi, first-order estimate
    /// |phi| / |grad phi|. Exact for the halfspace, accurate near the boundary.
    double boundary_distance_estimate(const Vec& x) const;

    Vec sample_boundary(std::mt19937_64& rng) const;
    Vec sample_interior(std::mt19937_64& rng) const;
    Vec center() const;

private:
    Domain() = default;

    DomainKind kind_ = DomainKind::Ball;
    int dim_ = 2;
    std::vector<double> axes_;  // semi-axes; ball stores dim copies of R
    double reach_ = 0.0;
    double diameter_ = 0.0;
    double max_curvature_ = 0.0;
    Vec z_star_;
};

/// Unit inward normal n(x) = -grad phi / |grad phi| at a boundary point.
/// Throws BoundaryViolation if x is farther than tol_bdry from the boundary.
Vec inward_normal(const Domain& dom, const Vec& x);

/// The normal field extended off the boundary (no boundary check); used by
/// finite-difference diagnostics.
Vec normal_field(const Domain& dom, const Vec& x);

/// pi_x z = z - <z, n> n, the orthogonal projection onto the tangent space.
Vec tangent_project(const Vec& n, const Vec& z);

/// pi_x as a matrix, I - n n^T. Symmetric, idempotent, rank n-1.
Mat tangent_projector(const Vec& n);

/// Shape operator S(x) = pi (H phi / |grad phi|) pi, symmetrized, extended by
/// S n = 0. Its tangent-space eigenvalues are the principal curvatures; the
/// sign convention (inward normal, D = {phi < 0}) gives +1/R on a ball.
Mat shape_operator(const Domain& dom, const Vec& x);

/// Nearest boundary point via Newton iteration on the projection conditions.
/// Points at distance >= reach() get the fixed reference point z_*.
/// Throws NumericalFailure if Newton does not converge within 50 iterations.
Vec boundary_project(const Domain& dom, const Vec& x);

/// e^{l S} for a symmetric shape operator with S n = 0, l >= 0; fixes n and
/// is symmetric. Scaling-and-squaring with a truncated-series core.
Mat exp_shape(double l, const Mat& S, const Vec& n);

/// Sampled second-order boundary regularity diagnostics: the smallest nu for
/// which the chord/normal inequalities hold over the sample, plus the
/// per-inequality worst-case ratios.
struct NuDiagnostics {
    double nu = 0.0;                  // max of the ratios below
    double normal_alignment = 0.0;    // (1 - <n(x),n(y)>) / |x-y|^2
    double chord_normal = 0.0;        // |<x-y, n(x)>| / |x-y|^2
    double closure_chord = 0.0;       // <x-z, n(x)>^+ / |x-z|^2, z in closure
    double cross_chord = 0.0;         // <x-z, n(y)>^+ / (|x-y| |x-z|)
    double projected_normal = 0.0;    // |pi_y n(x)| / |x-y|
    int samples = 0;
};

NuDiagnostics nu_diagnostics(const Domain& dom, int samples, std::uint64_t seed);

}  // namespace rbmflow

// The excursion-driven multiplicative functional A_r^eps, its 2D
// curvature-product form, and finite-difference flow derivatives.
#pragma once

#include <cstddef>
#include <vector>

#include "rbmflow/excursion.hpp"
#include "rbmflow/geometry.hpp"

namespace rbmflow {

/// Ordered product exp(dl_m S(x_m)) pi_{x_m} ... exp(dl_0 S(x_0)) pi_{x_0}
/// over the ladder. Rank <= n-1 structurally (each pi drops the normal).
LinearMap multiplicative_functional(const Domain& dom, const ExcursionLadder& ladder);

/// 2D only: |A v_0| as exp(sum_k dl_k mu(x_k)) |<n(x_0), v0_hat>|
/// prod_k |<n(x_{k-1}), n(x_k)>| with mu the tangent curvature and
/// v_hat = (-v_2, v_1). Agrees with |multiplicative_functional * v0| exactly
/// up to roundoff.
double curvature_product_2d(const Domain& dom, const ExcursionLadder& ladder, const Vec& v0);

/// (X^{z0 + eps v}_{sigma_r} - X^{z0}_{sigma_r}) / eps under synchronous
/// coupling, both paths read at sigma_r of the z0 path.
Vec finite_difference_derivative(const Domain& dom, const Vec& z0, const Vec& v, double eps,
                                 IncrementStream& noise, double r, std::size_t max_steps);

/// Singular values of A, sorted descending.
Vec rank_profile(const LinearMap& a);

/// One replica of the Theorem-style comparison between finite-difference
/// quotients and the multiplicative functional.
struct FlowDerivativeReport {
    double eps = 0.0;
    double eps_star = 0.0;
    std::vector<Vec> directions;
    std::vector<Vec> fd;  // finite-difference quotients
    std::vector<Vec> mf;  // A_r^eps * v
    double sup_err = 0.0;
    double sigma_r_time = 0.0;
};

}  // namespace rbmflow

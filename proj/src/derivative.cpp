#include "rbmflow/derivative.hpp"

#include <cmath>

namespace rbmflow {

LinearMap multiplicative_functional(const Domain& dom, const ExcursionLadder& ladder) {
    const int n = dom.dim();
    LinearMap result = LinearMap::Identity(n, n);
    for (std::size_t k = 0; k <= ladder.excursion_count(); ++k) {
        const Vec& x = ladder.point(k);
        const Vec normal = inward_normal(dom, x);
        const Mat shape = shape_operator(dom, x);
        result = exp_shape(ladder.dells[k], shape, normal) * tangent_projector(normal) * result;
    }
    return result;
}

double curvature_product_2d(const Domain& dom, const ExcursionLadder& ladder, const Vec& v0) {
    if (dom.dim() != 2)
        throw DimensionError("curvature_product_2d: domain must be 2-dimensional");

    double log_stretch = 0.0;
    double cosine_product = 1.0;
    Vec prev_normal;
    for (std::size_t k = 0; k <= ladder.excursion_count(); ++k) {
        const Vec& x = ladder.point(k);
        const Vec normal = inward_normal(dom, x);
        // S n = 0, so the trace is the single tangent eigenvalue mu(x).
        log_stretch += ladder.dells[k] * shape_operator(dom, x).trace();
        if (k > 0) cosine_product *= std::abs(prev_normal.dot(normal));
        prev_normal = normal;
    }

    const Vec n0 = inward_normal(dom, ladder.point(0));
    const Vec v0_hat = make_vec({-v0(1), v0(0)});
    return std::exp(log_stretch) * std::abs(n0.dot(v0_hat)) * cosine_product;
}

Vec finite_difference_derivative(const Domain& dom, const Vec& z0, const Vec& v, double eps,
                                 IncrementStream& noise, double r, std::size_t max_steps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("finite_difference_derivative: eps must be positive");
    const Vec displaced = z0 + eps * v;
    auto paths = simulate_flow(dom, {z0, displaced}, noise, Horizon::local_time(r), max_steps);
    const std::size_t sigma = inverse_local_time(paths[0], r);
    return (paths[1].position(sigma) - paths[0].position(sigma)) / eps;
}

Vec rank_profile(const LinearMap& a) {
    return a.jacobiSvd().singularValues();
}

}  // namespace rbmflow

// Small dense linear algebra aliases shared by all modules.
#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <initializer_list>

namespace rbmflow {

// Shipped domains live in R^2 or R^3. Bounded-dynamic Eigen types keep the
// dimension a runtime value while staying allocation-free in the step loop.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

// pi_x, S(x), e^{lS} and their ordered products are all plain dense n x n maps.
using LinearMap = Mat;

inline Vec make_vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline double operator_norm(const Mat& a) {
    return a.jacobiSvd().singularValues()(0);
}

}  // namespace rbmflow

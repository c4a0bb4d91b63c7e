#include "rbmflow/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rbmflow {

namespace {

constexpr int kProjectMaxIter = 50;
constexpr double kProjectTol = 1e-12;

// KKT system of the nearest-point problem has n+1 unknowns.
using KktMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;
using KktVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

double inf_norm(const Mat& a) {
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

Domain Domain::ball(int dim, double radius) {
    if (dim < 2 || dim > 3) throw ConfigError("ball: dimension must be 2 or 3");
    if (!(radius > 0.0)) throw ConfigError("ball: radius must be positive");
    Domain d;
    d.kind_ = DomainKind::Ball;
    d.dim_ = dim;
    d.axes_.assign(static_cast<std::size_t>(dim), radius);
    d.reach_ = radius;
    d.diameter_ = 2.0 * radius;
    d.max_curvature_ = 1.0 / radius;
    d.z_star_ = Vec::Zero(dim);
    d.z_star_(0) = radius;
    return d;
}

Domain Domain::ellipsoid(std::vector<double> semi_axes) {
    const int dim = static_cast<int>(semi_axes.size());
    if (dim < 2 || dim > 3) throw ConfigError("ellipsoid: need 2 or 3 semi-axes");
    for (double a : semi_axes)
        if (!(a > 0.0)) throw ConfigError("ellipsoid: semi-axes must be positive");
    const double a_min = *std::min_element(semi_axes.begin(), semi_axes.end());
    const double a_max = *std::max_element(semi_axes.begin(), semi_axes.end());
    Domain d;
    d.kind_ = DomainKind::Ellipsoid;
    d.dim_ = dim;
    d.axes_ = std::move(semi_axes);
    d.reach_ = a_min * a_min / a_max;  // reach lower bound
    d.diameter_ = 2.0 * a_max;
    d.max_curvature_ = a_max / (a_min * a_min);
    d.z_star_ = Vec::Zero(dim);
    d.z_star_(0) = d.axes_[0];
    return d;
}

Domain Domain::halfspace(int dim) {
    if (dim < 2 || dim > 3) throw ConfigError("halfspace: dimension must be 2 or 3");
    Domain d;
    d.kind_ = DomainKind::Halfspace;
    d.dim_ = dim;
    d.axes_.assign(static_cast<std::size_t>(dim), 1.0);
    d.reach_ = std::numeric_limits<double>::infinity();
    d.diameter_ = 2.0;  // nominal unit scale for tolerance formulas
    d.max_curvature_ = 0.0;
    d.z_star_ = Vec::Zero(dim);
    return d;
}

Domain Domain::parse(const std::string& spec) {
    std::string kind = spec;
    std::string rest;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        kind = spec.substr(0, colon);
        rest = spec.substr(colon + 1);
    }

    std::vector<std::pair<std::string, double>> kv;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("domain spec: expected key=value, got '" + item + "'");
        std::size_t pos = 0;
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1), &pos);
        } catch (const std::exception&) {
            throw ConfigError("domain spec: bad float in '" + item + "'");
        }
        if (pos != item.size() - eq - 1)
            throw ConfigError("domain spec: bad float in '" + item + "'");
        kv.emplace_back(item.substr(0, eq), value);
    }

    auto take = [&kv](const std::string& key, double fallback) {
        for (auto& [k, v] : kv)
            if (k == key) {
                double x = v;
                k.clear();  // mark consumed
                return x;
            }
        return fallback;
    };
    auto check_consumed = [&kv, &spec] {
        for (const auto& [k, v] : kv)
            if (!k.empty())
                throw ConfigError("domain spec '" + spec + "': unknown key '" + k + "'");
    };
    auto as_dim = [](double d) {
        int dim = static_cast<int>(d);
        if (static_cast<double>(dim) != d) throw ConfigError("domain spec: d must be integer");
        return dim;
    };

    if (kind == "ball") {
        const double r = take("r", 1.0);
        const int dim = as_dim(take("d", 2.0));
        check_consumed();
        return ball(dim, r);
    }
    if (kind == "ellipse") {
        const double a = take("a", 2.0);
        const double b = take("b", 1.0);
        check_consumed();
        return ellipsoid({a, b});
    }
    if (kind == "ellipsoid") {
        const double a = take("a", 2.0);
        const double b = take("b", 1.0);
        const double c = take("c", 1.0);
        check_consumed();
        return ellipsoid({a, b, c});
    }
    if (kind == "halfspace") {
        const int dim = as_dim(take("d", 2.0));
        check_consumed();
        return halfspace(dim);
    }
    throw ConfigError("domain spec: unknown kind '" + kind + "'");
}

std::string Domain::spec_string() const {
    char buf[160];
    switch (kind_) {
        case DomainKind::Ball:
            std::snprintf(buf, sizeof buf, "ball:r=%.17g,d=%d", axes_[0], dim_);
            return buf;
        case DomainKind::Ellipsoid:
            if (dim_ == 2) {
                std::snprintf(buf, sizeof buf, "ellipse:a=%.17g,b=%.17g", axes_[0], axes_[1]);
            } else {
                std::snprintf(buf, sizeof buf, "ellipsoid:a=%.17g,b=%.17g,c=%.17g", axes_[0],
                              axes_[1], axes_[2]);
            }
            return buf;
        case DomainKind::Halfspace:
            std::snprintf(buf, sizeof buf, "halfspace:d=%d", dim_);
            return buf;
    }
    return {};
}

double Domain::phi(const Vec& x) const {
    if (kind_ == DomainKind::Halfspace) return -x(dim_ - 1);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        const double t = x(i) / axes_[static_cast<std::size_t>(i)];
        s += t * t;
    }
    return s - 1.0;
}

Vec Domain::grad_phi(const Vec& x) const {
    Vec g = Vec::Zero(dim_);
    if (kind_ == DomainKind::Halfspace) {
        g(dim_ - 1) = -1.0;
        return g;
    }
    for (int i = 0; i < dim_; ++i) {
        const double a = axes_[static_cast<std::size_t>(i)];
        g(i) = 2.0 * x(i) / (a * a);
    }
    return g;
}

Mat Domain::hess_phi(const Vec& x) const {
    (void)x;
    Mat h = Mat::Zero(dim_, dim_);
    if (kind_ == DomainKind::Halfspace) return h;
    for (int i = 0; i < dim_; ++i) {
        const double a = axes_[static_cast<std::size_t>(i)];
        h(i, i) = 2.0 / (a * a);
    }
    return h;
}

double Domain::volume() const {
    if (!bounded()) throw ConfigError("volume: domain is unbounded");
    const double pi = M_PI;
    if (dim_ == 2) return pi * axes_[0] * axes_[1];
    return 4.0 / 3.0 * pi * axes_[0] * axes_[1] * axes_[2];
}

double Domain::surface_area() const {
    if (!bounded()) throw ConfigError("surface_area: domain is unbounded");
    const double pi = M_PI;
    if (dim_ == 2) {
        const double a = std::max(axes_[0], axes_[1]);
        const double b = std::min(axes_[0], axes_[1]);
        if (a == b) return 2.0 * pi * a;
        const double ecc = std::sqrt(1.0 - (b * b) / (a * a));
        return 4.0 * a * std::comp_ellint_2(ecc);
    }
    const double a = axes_[0], b = axes_[1], c = axes_[2];
    if (a == b && b == c) return 4.0 * pi * a * a;
    // Composite-Simpson quadrature of the parametric area element.
    const int nt = 512, np = 512;
    const double ht = pi / nt, hp = 2.0 * pi / np;
    auto element = [&](double theta, double phi_ang) {
        const double st = std::sin(theta), ct = std::cos(theta);
        const double sp = std::sin(phi_ang), cp = std::cos(phi_ang);
        const double gx = b * c * st * cp, gy = a * c * st * sp, gz = a * b * ct;
        return st * std::sqrt(gx * gx + gy * gy + gz * gz);
    };
    double total = 0.0;
    for (int i = 0; i <= nt; ++i) {
        const double wt = (i == 0 || i == nt) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        double row = 0.0;
        for (int j = 0; j <= np; ++j) {
            const double wp = (j == 0 || j == np) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            row += wp * element(i * ht, j * hp);
        }
        total += wt * row;
    }
    return total * ht * hp / 9.0;
}

double Domain::boundary_distance_estimate(const Vec& x) const {
    const double p = phi(x);
    const double g = grad_phi(x).norm();
    if (g < 1e-300) return std::numeric_limits<double>::infinity();
    return std::abs(p) / g;
}

bool Domain::in_closure(const Vec& x) const {
    return phi(x) <= 0.0 || boundary_distance_estimate(x) <= boundary_tol();
}

bool Domain::on_boundary(const Vec& x) const {
    return boundary_distance_estimate(x) <= boundary_tol();
}

Vec Domain::sample_boundary(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (kind_ == DomainKind::Halfspace) {
        std::uniform_real_distribution<double> box(-5.0, 5.0);
        Vec x(dim_);
        for (int i = 0; i + 1 < dim_; ++i) x(i) = box(rng);
        x(dim_ - 1) = 0.0;
        return x;
    }
    Vec u(dim_);
    double nrm = 0.0;
    do {
        for (int i = 0; i < dim_; ++i) u(i) = gauss(rng);
        nrm = u.norm();
    } while (nrm < 1e-12);
    Vec x(dim_);
    for (int i = 0; i < dim_; ++i) x(i) = axes_[static_cast<std::size_t>(i)] * u(i) / nrm;
    return x;
}

Vec Domain::sample_interior(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec x(dim_);
    if (kind_ == DomainKind::Halfspace) {
        for (int i = 0; i + 1 < dim_; ++i) x(i) = -5.0 + 10.0 * unit(rng);
        x(dim_ - 1) = 5.0 * unit(rng);
        return x;
    }
    // Rejection sampling in the bounding box; acceptance >= pi/4 for shipped domains.
    for (;;) {
        for (int i = 0; i < dim_; ++i)
            x(i) = axes_[static_cast<std::size_t>(i)] * (2.0 * unit(rng) - 1.0);
        if (phi(x) < 0.0) return x;
    }
}

Vec Domain::center() const { return Vec::Zero(dim_); }

Vec normal_field(const Domain& dom, const Vec& x) {
    const Vec g = dom.grad_phi(x);
    const double nrm = g.norm();
    if (nrm < 1e-300) throw NumericalFailure("normal_field: vanishing gradient");
    return -g / nrm;
}

Vec inward_normal(const Domain& dom, const Vec& x) {
    if (!dom.on_boundary(x))
        throw BoundaryViolation("inward_normal: point is not on the boundary");
    return normal_field(dom, x);
}

Vec tangent_project(const Vec& n, const Vec& z) { return z - z.dot(n) * n; }

Mat tangent_projector(const Vec& n) {
    const auto d = n.size();
    return Mat::Identity(d, d) - n * n.transpose();
}

Mat shape_operator(const Domain& dom, const Vec& x) {
    if (!dom.on_boundary(x))
        throw BoundaryViolation("shape_operator: point is not on the boundary");
    const Vec g = dom.grad_phi(x);
    const Vec n = -g / g.norm();
    const Mat p = tangent_projector(n);
    // With n = -grad/|grad| the Weingarten map S v = -d_v n restricted to the
    // tangent space is pi (H phi / |grad phi|) pi; a ball of radius R gets +1/R.
    const Mat a = p * (dom.hess_phi(x) / g.norm()) * p;
    return 0.5 * (a + a.transpose());
}

namespace {

struct NewtonResult {
    Vec point;
    bool converged = false;
};

NewtonResult newton_project(const Domain& dom, const Vec& x, const Vec& guess) {
    const int n = dom.dim();
    Vec y = guess;
    Vec g = dom.grad_phi(y);
    double lambda = g.squaredNorm() > 0.0 ? (y - x).dot(g) / g.squaredNorm() : 0.0;

    KktMat jac(n + 1, n + 1);
    KktVec rhs(n + 1);
    for (int iter = 0; iter < kProjectMaxIter; ++iter) {
        g = dom.grad_phi(y);
        const Mat h = dom.hess_phi(y);

        rhs.head(n) = -(y - x - lambda * g);
        rhs(n) = -dom.phi(y);

        jac.topLeftCorner(n, n) = Mat::Identity(n, n) - lambda * h;
        jac.topRightCorner(n, 1) = -g;
        jac.bottomLeftCorner(1, n) = g.transpose();
        jac(n, n) = 0.0;

        const KktVec delta = jac.fullPivLu().solve(rhs);
        if (!delta.allFinite()) return {y, false};
        y += delta.head(n);
        lambda += delta(n);
        if (delta.head(n).norm() + std::abs(delta(n)) * g.norm() <=
            kProjectTol * (1.0 + y.norm()))
            return {y, true};
    }
    return {y, false};
}

// Radial scaling onto the boundary: good initial guess for star-shaped domains.
Vec radial_guess(const Domain& dom, const Vec& x) {
    if (dom.kind() == DomainKind::Halfspace) {
        Vec y = x;
        y(dom.dim() - 1) = 0.0;
        return y;
    }
    const double t = 1.0 / std::sqrt(dom.phi(x) + 1.0);
    return t * x;
}

}  // namespace

Vec boundary_project(const Domain& dom, const Vec& x) {
    if (dom.bounded() && x.norm() < 1e-14) {
        // Center: distance min a_i >= reach, so the degenerate fallback applies.
        return dom.reference_point();
    }
    const auto res = newton_project(dom, x, radial_guess(dom, x));
    if (!res.converged)
        throw NumericalFailure("boundary_project: Newton did not converge");
    if (dom.bounded() && (x - res.point).norm() >= dom.reach())
        return dom.reference_point();
    return res.point;
}

Mat exp_shape(double l, const Mat& S, const Vec& n) {
    if (l < 0.0) throw std::invalid_argument("exp_shape: l must be nonnegative");
    assert((S * n).norm() <= 1e-10 * (1.0 + inf_norm(S)));
    (void)n;

    const auto d = S.rows();
    Mat a = l * S;
    const double nrm = inf_norm(a);
    int squarings = 0;
    if (nrm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
        a *= std::ldexp(1.0, -squarings);
    }

    Mat result = Mat::Identity(d, d);
    Mat term = Mat::Identity(d, d);
    for (int k = 1; k <= 40; ++k) {
        term = term * a / static_cast<double>(k);
        result += term;
        if (inf_norm(term) <= std::numeric_limits<double>::epsilon() * inf_norm(result)) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

NuDiagnostics nu_diagnostics(const Domain& dom, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    NuDiagnostics out;
    out.samples = samples;
    constexpr double kMinSep = 1e-12;
    for (int i = 0; i < samples; ++i) {
        const Vec x = dom.sample_boundary(rng);
        const Vec y = dom.sample_boundary(rng);
        const Vec z = dom.sample_interior(rng);
        const Vec nx = inward_normal(dom, x);
        const Vec ny = inward_normal(dom, y);

        const double dxy2 = (x - y).squaredNorm();
        const double dxz2 = (x - z).squaredNorm();
        if (dxy2 > kMinSep) {
            out.normal_alignment = std::max(out.normal_alignment, (1.0 - nx.dot(ny)) / dxy2);
            out.chord_normal = std::max(out.chord_normal, std::abs((x - y).dot(nx)) / dxy2);
            out.projected_normal =
                std::max(out.projected_normal, tangent_project(ny, nx).norm() / std::sqrt(dxy2));
        }
        if (dxz2 > kMinSep) {
            out.closure_chord =
                std::max(out.closure_chord, std::max(0.0, (x - z).dot(nx)) / dxz2);
            if (dxy2 > kMinSep)
                out.cross_chord = std::max(
                    out.cross_chord,
                    std::max(0.0, (x - z).dot(ny)) / std::sqrt(dxy2 * dxz2));
        }
    }
    out.nu = std::max({out.normal_alignment, out.chord_normal, out.closure_chord,
                       out.cross_chord, out.projected_normal});
    return out;
}

}  // namespace rbmflow

#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "nlc/errors.hpp"
#include "nlc/linalg.hpp"

namespace nlc {

/// Scalar field on ambient space. Gradient/Hessian closures are optional;
/// central differences with step `fd_step` fill in when absent.
struct ScalarField {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;  // may be null
    std::function<Mat3(const Vec3&)> hessian;   // may be null
    double fd_step = 1e-6;

    double operator()(const Vec3& x) const { return value(x); }

    bool has_gradient() const { return bool(gradient); }

    Vec3 grad(const Vec3& x) const {
        if (gradient) return gradient(x);
        Vec3 g;
        for (int i = 0; i < 3; ++i) {
            Vec3 e{};
            e[i] = fd_step;
            const double fp = value(x + e), fm = value(x - e);
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw NumericError("field gradient stencil failed at step " +
                                   std::to_string(fd_step) + " direction " + std::to_string(i));
            g[i] = (fp - fm) / (2 * fd_step);
        }
        return g;
    }

    Mat3 hess(const Vec3& x) const {
        if (hessian) return hessian(x);
        Mat3 h;
        const double t = std::sqrt(fd_step);
        for (int i = 0; i < 3; ++i) {
            Vec3 e{};
            e[i] = t;
            const Vec3 gp = grad(x + e), gm = grad(x - e);
            for (int j = 0; j < 3; ++j) h(i, j) = (gp[j] - gm[j]) / (2 * t);
        }
        // symmetrize the stencil noise away
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double s = 0.5 * (h(i, j) + h(j, i));
                h(i, j) = h(j, i) = s;
            }
        return h;
    }
};

inline ScalarField constant_field(double c) {
    ScalarField f;
    f.value = [c](const Vec3&) { return c; };
    f.gradient = [](const Vec3&) { return Vec3{}; };
    f.hessian = [](const Vec3&) { return Mat3::zero(); };
    return f;
}

inline ScalarField coordinate_field(int i) {
    ScalarField f;
    f.value = [i](const Vec3& x) { return x[i]; };
    f.gradient = [i](const Vec3&) {
        Vec3 g{};
        g[i] = 1;
        return g;
    };
    f.hessian = [](const Vec3&) { return Mat3::zero(); };
    return f;
}

/// a . x + b
inline ScalarField linear_field(const Vec3& a, double b = 0) {
    ScalarField f;
    f.value = [a, b](const Vec3& x) { return dot(a, x) + b; };
    f.gradient = [a](const Vec3&) { return a; };
    f.hessian = [](const Vec3&) { return Mat3::zero(); };
    return f;
}

/// C-infinity bump supported in the ball |x-c| < radius:
/// exp(1 - 1/(1 - s^2)), s = |x-c|/radius; value 1 at the center.
inline ScalarField bump_field(const Vec3& c, double radius) {
    if (radius <= 0) throw ParameterError("bump_field: radius must be positive");
    auto phi = [](double s2) -> double { // in s^2
        if (s2 >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - s2));
    };
    auto dphi = [phi](double s2) -> double { // d/d(s^2)
        if (s2 >= 1.0) return 0.0;
        const double d = 1.0 - s2;
        return -phi(s2) / (d * d);
    };
    auto d2phi = [phi, dphi](double s2) -> double {
        if (s2 >= 1.0) return 0.0;
        const double d = 1.0 - s2;
        return phi(s2) * (1.0 / (d * d * d * d) - 2.0 / (d * d * d));
    };
    const double r2inv = 1.0 / (radius * radius);
    ScalarField f;
    f.value = [c, r2inv, phi](const Vec3& x) { return phi(norm2(x - c) * r2inv); };
    f.gradient = [c, r2inv, dphi](const Vec3& x) {
        const Vec3 d = x - c;
        return d * (2.0 * r2inv * dphi(norm2(d) * r2inv));
    };
    f.hessian = [c, r2inv, dphi, d2phi](const Vec3& x) {
        const Vec3 d = x - c;
        const double s2 = norm2(d) * r2inv;
        Mat3 h = outer(d, d) * (4.0 * r2inv * r2inv * d2phi(s2));
        const double diag = 2.0 * r2inv * dphi(s2);
        for (int i = 0; i < 3; ++i) h(i, i) += diag;
        return h;
    };
    return f;
}

inline ScalarField product(const ScalarField& a, const ScalarField& b) {
    ScalarField f;
    f.value = [a, b](const Vec3& x) { return a.value(x) * b.value(x); };
    if (a.has_gradient() && b.has_gradient()) {
        f.gradient = [a, b](const Vec3& x) {
            return a.grad(x) * b.value(x) + b.grad(x) * a.value(x);
        };
        if (a.hessian && b.hessian) {
            f.hessian = [a, b](const Vec3& x) {
                const Vec3 ga = a.grad(x), gb = b.grad(x);
                return a.hess(x) * b.value(x) + b.hess(x) * a.value(x) + outer(ga, gb) +
                       outer(gb, ga);
            };
        }
    }
    return f;
}

inline ScalarField sum(const ScalarField& a, const ScalarField& b) {
    ScalarField f;
    f.value = [a, b](const Vec3& x) { return a.value(x) + b.value(x); };
    if (a.has_gradient() && b.has_gradient())
        f.gradient = [a, b](const Vec3& x) { return a.grad(x) + b.grad(x); };
    if (a.hessian && b.hessian)
        f.hessian = [a, b](const Vec3& x) { return a.hess(x) + b.hess(x); };
    return f;
}

inline ScalarField scaled(const ScalarField& a, double s) {
    ScalarField f;
    f.value = [a, s](const Vec3& x) { return s * a.value(x); };
    if (a.has_gradient()) f.gradient = [a, s](const Vec3& x) { return a.grad(x) * s; };
    if (a.hessian) f.hessian = [a, s](const Vec3& x) { return a.hess(x) * s; };
    return f;
}

/// Pull a field back through a rigid motion: result(y) = f(m(y)).
inline ScalarField pullback(const ScalarField& f, const RigidMotion& m) {
    ScalarField g;
    g.value = [f, m](const Vec3& y) { return f.value(m.apply(y)); };
    if (f.has_gradient())
        g.gradient = [f, m](const Vec3& y) { return mul(transpose(m.Q), f.grad(m.apply(y))); };
    if (f.hessian)
        g.hessian = [f, m](const Vec3& y) {
            return mul(transpose(m.Q), mul(f.hess(m.apply(y)), m.Q));
        };
    g.fd_step = f.fd_step;
    return g;
}

} // namespace nlc

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "nlc/errors.hpp"

namespace nlc {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson on [a,b] with absolute tolerance `tol`.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on P_n.
inline const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
    static thread_local std::vector<std::vector<std::pair<double, double>>> cache;
    if (n < 1) throw ParameterError("gauss_legendre: order must be >= 1");
    if (cache.size() <= std::size_t(n)) cache.resize(std::size_t(n) + 1);
    auto& rule = cache[std::size_t(n)];
    if (!rule.empty()) return rule;
    rule.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1);
        rule.emplace_back(x, 2.0 / ((1 - x * x) * dp * dp));
    }
    return rule;
}

/// Fixed-order Gauss-Legendre on [a,b].
template <class F>
double integrate_gl(const F& f, double a, double b, int order = 16) {
    if (!(b > a)) return 0.0;
    const auto& gl = gauss_legendre(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (const auto& [x, w] : gl) s += w * f(c + h * x);
    return s * h;
}

} // namespace nlc

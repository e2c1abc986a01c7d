#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nlc/errors.hpp"

namespace nlc {

/// H^{n-1}(S^{n-1}) = 2 pi^{n/2} / Gamma(n/2). Valid for n >= 1 (|S^0| = 2).
inline double sphere_area(int n) {
    if (n < 1) throw ParameterError("sphere_area: n >= 1 required");
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Q = int_{B_1} x_1^4 dx = 3 |S^{n-1}| / (n(n+2)(n+4)).
inline double ball_moment_x1_4(int n) {
    if (n < 2) throw ParameterError("ball_moment_x1_4: n >= 2 required");
    return 3.0 * sphere_area(n) / (double(n) * (n + 2) * (n + 4));
}

/// int_{S^{n-1}} theta_1^4 dH = 3 |S^{n-1}| / (n(n+2)); equals (n+4) Q.
inline double sphere_moment_theta1_4(int n) {
    if (n < 2) throw ParameterError("sphere_moment_theta1_4: n >= 2 required");
    return 3.0 * sphere_area(n) / (double(n) * (n + 2));
}

/// D = int_{B_1} x_1^2 x_2^2 dx = Q/3.
inline double ball_moment_x1sq_x2sq(int n) {
    if (n < 2) throw ParameterError("ball_moment_x1sq_x2sq: n >= 2 required");
    return ball_moment_x1_4(n) / 3.0;
}

/// varpi = H^{n-2}(S^{n-2}) / (n-1); the constant scaling the classical limits.
inline double varpi(int n) {
    if (n < 2) throw ParameterError("varpi: n >= 2 required");
    return sphere_area(n - 1) / double(n - 1);
}

/// C_star = 3 varpi / (n+1) = sphere_moment_theta1_4(n-1) for n >= 3.
inline double cstar(int n) {
    if (n < 2) throw ParameterError("cstar: n >= 2 required");
    return 3.0 * varpi(n) / double(n + 1);
}

/// Monte-Carlo estimate with standard error.
struct McEstimate {
    double value = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
};

/// Fixed seed for every Monte-Carlo cross-check in the project.
inline constexpr std::uint64_t kMcSeed = 20240613ULL;

/// MC estimate of int_{B_1} f(x) dx in R^n by rejection from [-1,1]^n.
/// `samples` counts draws from the cube; accepted points are weighted by 2^n.
template <class F>
McEstimate mc_ball_integral(int n, std::uint64_t samples, const F& f,
                            std::uint64_t seed = kMcSeed) {
    if (n < 1 || n > 16) throw ParameterError("mc_ball_integral: 1 <= n <= 16");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double cube = std::pow(2.0, n);
    double sum = 0, sumsq = 0;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (std::uint64_t i = 0; i < samples; ++i) {
        double r2 = 0;
        for (int d = 0; d < n; ++d) {
            x[std::size_t(d)] = u(rng);
            r2 += x[std::size_t(d)] * x[std::size_t(d)];
        }
        const double v = (r2 <= 1.0) ? cube * f(x) : 0.0;
        sum += v;
        sumsq += v * v;
    }
    McEstimate e;
    e.samples = samples;
    e.value = sum / double(samples);
    const double var = (sumsq / double(samples) - e.value * e.value) / double(samples);
    e.std_error = std::sqrt(std::max(0.0, var));
    return e;
}

/// MC estimate of Q = int_{B_1} x_1^4 dx.
inline McEstimate mc_ball_moment_x1_4(int n, std::uint64_t samples, std::uint64_t seed = kMcSeed) {
    return mc_ball_integral(n, samples, [](const std::vector<double>& x) {
        const double t = x[0] * x[0];
        return t * t;
    }, seed);
}

/// MC check of the rotation-by-45-degrees identity: E[4 X1^2 X2^2] = 2Q - 2D.
inline McEstimate mc_rotation_identity_lhs(int n, std::uint64_t samples,
                                           std::uint64_t seed = kMcSeed) {
    return mc_ball_integral(n, samples, [](const std::vector<double>& x) {
        return 4.0 * x[0] * x[0] * x[1] * x[1];
    }, seed);
}

} // namespace nlc

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "nlc/errors.hpp"
#include "nlc/linalg.hpp"
#include "nlc/moments.hpp"
#include "nlc/quad1d.hpp"

namespace nlc {

enum class KernelFamily { fractional, simons_limit, mollifier, smooth_integrable };

/// Radial profile for the mollifier family: rho on [0,1), zero outside.
struct MollifierProfile {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// The standard bump exp(-1/(1-t^2)) on [0,1).
inline MollifierProfile standard_bump() {
    auto val = [](double t) -> double {
        if (t >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - t * t));
    };
    auto der = [val](double t) -> double {
        if (t >= 1.0) return 0.0;
        const double d = 1.0 - t * t;
        return val(t) * (-2.0 * t / (d * d));
    };
    return {"bump", val, der};
}

namespace detail {
/// Even-polynomial near-field cap a + b r^2 + c r^4 + d r^6 replacing a
/// singular kernel inside r_s. Matched C^2 at r_s and moment-matched:
/// int_0^{r_s} cap(r) r^n dr equals the kernel's own partial moment, which is
/// what the identity integrands (vanishing to second order at the base point)
/// actually weight. Without the moment condition an O(r_s^eps) fraction of the
/// concentrating mass is lost and the eps->0 limits drift.
struct SmoothingCap {
    double r_s = 0;
    std::array<double, 4> coef{}; // a, b, c, d

    double value(double r) const {
        const double r2 = r * r;
        return coef[0] + r2 * (coef[1] + r2 * (coef[2] + r2 * coef[3]));
    }
    double derivative(double r) const {
        const double r2 = r * r;
        return r * (2 * coef[1] + r2 * (4 * coef[2] + 6 * r2 * coef[3]));
    }
    /// Antiderivative of cap(r) r^2 (for ray quadrature).
    double primitive_rsq(double r) const {
        const double r3 = r * r * r;
        const double r2 = r * r;
        return r3 * (coef[0] / 3 + r2 * (coef[1] / 5 + r2 * (coef[2] / 7 + r2 * coef[3] / 9)));
    }
};

inline std::array<double, 4> solve4(std::array<std::array<double, 5>, 4> m) {
    for (int c = 0; c < 4; ++c) {
        int p = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(m[std::size_t(r)][std::size_t(c)]) > std::abs(m[std::size_t(p)][std::size_t(c)])) p = r;
        std::swap(m[std::size_t(c)], m[std::size_t(p)]);
        for (int r = c + 1; r < 4; ++r) {
            const double f = m[std::size_t(r)][std::size_t(c)] / m[std::size_t(c)][std::size_t(c)];
            for (int k = c; k < 5; ++k) m[std::size_t(r)][std::size_t(k)] -= f * m[std::size_t(c)][std::size_t(k)];
        }
    }
    std::array<double, 4> x{};
    for (int r = 3; r >= 0; --r) {
        double s = m[std::size_t(r)][4];
        for (int k = r + 1; k < 4; ++k) s -= m[std::size_t(r)][std::size_t(k)] * x[std::size_t(k)];
        x[std::size_t(r)] = s / m[std::size_t(r)][std::size_t(r)];
    }
    return x;
}
} // namespace detail

/// Radially symmetric kernel family with derivatives, integrability metadata
/// and mass constant. Immutable; all evaluations are pure.
class Kernel {
public:
    static Kernel fractional(int n, double s, double C) {
        if (n < 1 || s <= 0 || s >= 1 || C <= 0)
            throw ParameterError("fractional kernel needs n>=1, s in (0,1), C>0");
        Kernel k;
        k.dim_ = n;
        k.family_ = KernelFamily::fractional;
        k.s_ = s;
        k.c_ = C;
        k.sing_ = n + s;
        k.decay_ = n + s;
        return k;
    }

    static Kernel simons_limit(int n, double eps) {
        if (n < 1 || eps <= 0 || eps >= 1)
            throw ParameterError("simons_limit kernel needs eps in (0,1)");
        Kernel k;
        k.dim_ = n;
        k.family_ = KernelFamily::simons_limit;
        k.eps_ = eps;
        k.sing_ = n + 1 - eps;
        k.decay_ = n + 1 - eps;
        return k;
    }

    static Kernel mollifier(int n, double eps) { return mollifier(n, eps, standard_bump()); }

    static Kernel mollifier(int n, double eps, MollifierProfile rho) {
        if (n < 1 || eps <= 0) throw ParameterError("mollifier kernel needs eps > 0");
        Kernel k;
        k.dim_ = n;
        k.family_ = KernelFamily::mollifier;
        k.eps_ = eps;
        k.profile_ = std::move(rho);
        k.sing_ = 0;
        k.decay_ = std::numeric_limits<double>::infinity();
        k.support_ = eps;
        k.mass_ = k.compute_mass();
        return k;
    }

    static Kernel gaussian(int n) {
        if (n < 1) throw ParameterError("gaussian kernel needs n >= 1");
        Kernel k;
        k.dim_ = n;
        k.family_ = KernelFamily::smooth_integrable;
        k.sing_ = 0;
        k.decay_ = std::numeric_limits<double>::infinity();
        // C_K = 1/2 int exp(-|y|^2) dy = pi^{n/2} / 2, kept numeric via compute_mass
        k.mass_ = k.compute_mass();
        return k;
    }

    int dimension() const { return dim_; }
    KernelFamily family() const { return family_; }
    double singularity_order() const { return sing_; }
    double decay_order() const { return decay_; }
    bool singular() const { return sing_ > 0 && !cap_; }
    bool integrable() const {
        return family_ == KernelFamily::mollifier || family_ == KernelFamily::smooth_integrable;
    }
    double support_radius() const { return support_; }
    bool compactly_supported() const { return std::isfinite(support_); }
    double eps() const { return eps_; }
    double fractional_s() const { return s_; }
    double bound_constant() const { return c_; }

    /// C_K = (1/2) int_{R^n} K(y) dy for integrable families.
    std::optional<double> mass_constant() const { return mass_; }

    double value(double r) const {
        if (r < 0) throw DomainError("kernel radius must be nonnegative");
        if (cap_ && r < cap_->r_s) return cap_->value(r);
        switch (family_) {
            case KernelFamily::fractional:
                if (r == 0) throw DomainError("fractional kernel evaluated at the singularity");
                return c_ * std::pow(r, -(dim_ + s_));
            case KernelFamily::simons_limit:
                if (r == 0) throw DomainError("simons_limit kernel evaluated at the singularity");
                return eps_ * std::pow(r, -(dim_ + 1 - eps_));
            case KernelFamily::mollifier: {
                const double t = r / eps_;
                if (t >= 1.0) return 0.0;
                return std::pow(eps_, -(dim_ + 2)) * profile_.value(t);
            }
            case KernelFamily::smooth_integrable:
                return std::exp(-r * r);
        }
        return 0;
    }

    double radial_derivative(double r) const {
        if (r < 0) throw DomainError("kernel radius must be nonnegative");
        if (cap_ && r < cap_->r_s) return cap_->derivative(r);
        switch (family_) {
            case KernelFamily::fractional:
                if (r == 0) throw DomainError("fractional kernel derivative at the singularity");
                return -(dim_ + s_) * c_ * std::pow(r, -(dim_ + s_ + 1));
            case KernelFamily::simons_limit:
                if (r == 0) throw DomainError("simons_limit kernel derivative at the singularity");
                return -(dim_ + 1 - eps_) * eps_ * std::pow(r, -(dim_ + 2 - eps_));
            case KernelFamily::mollifier: {
                const double t = r / eps_;
                if (t >= 1.0) return 0.0;
                return std::pow(eps_, -(dim_ + 3)) * profile_.derivative(t);
            }
            case KernelFamily::smooth_integrable:
                return -2 * r * std::exp(-r * r);
        }
        return 0;
    }

    double value_at(const Vec3& x) const {
        const double r = norm(x);
        if (r == 0 && singular()) throw DomainError("kernel evaluated at x = 0");
        return value(r);
    }

    /// grad K(x) = K'(|x|) x/|x|; antisymmetric under x -> -x.
    Vec3 gradient_at(const Vec3& x) const {
        const double r = norm(x);
        if (r == 0) {
            if (singular()) throw DomainError("kernel gradient at x = 0");
            return {0, 0, 0}; // radial smooth kernels have vanishing gradient at 0
        }
        return x * (radial_derivative(r) / r);
    }

    /// Upper bound for |K| on [r, infinity); monotone nonincreasing in r.
    double decay_bound(double r) const {
        if (r >= support_) return 0.0;
        switch (family_) {
            case KernelFamily::fractional: return c_ * std::pow(r, -(dim_ + s_));
            case KernelFamily::simons_limit: return eps_ * std::pow(r, -(dim_ + 1 - eps_));
            default: return value(r); // profiles are nonincreasing
        }
    }

    /// Upper bound for |grad K| on [r, infinity).
    double gradient_decay_bound(double r) const {
        if (r >= support_) return 0.0;
        switch (family_) {
            case KernelFamily::fractional: return (dim_ + s_) * c_ * std::pow(r, -(dim_ + s_ + 1));
            case KernelFamily::simons_limit:
                return (dim_ + 1 - eps_) * eps_ * std::pow(r, -(dim_ + 2 - eps_));
            default: return std::abs(radial_derivative(r));
        }
    }

    /// Partial moment int_0^r K(t) t^n dt (closed form for the power families).
    double partial_moment_n(double r) const {
        switch (family_) {
            case KernelFamily::fractional: return c_ * std::pow(r, 1 - s_) / (1 - s_);
            case KernelFamily::simons_limit: return std::pow(r, eps_);
            default:
                return adaptive_simpson([this](double t) { return value(t) * std::pow(t, dim_); },
                                        0.0, std::min(r, support_), 1e-13);
        }
    }

    /// Replace the kernel inside r_s by the moment-matched C^2 cap.
    Kernel smoothed(double r_s) const {
        if (!singular()) throw UnsupportedError("smoothing applies to singular kernels only");
        if (r_s <= 0) throw ParameterError("smoothing radius must be positive");
        Kernel k = *this;
        const double K0 = value(r_s);
        const double d1 = r_s * radial_derivative(r_s) / K0;
        const double d2 = r_s * r_s * second_derivative(r_s) / K0;
        const double mh = partial_moment_n(r_s) / (K0 * std::pow(r_s, dim_ + 1));
        // q(t) = alpha + beta t^2 + gamma t^4 + delta t^6 on t = r/r_s in [0,1]
        std::array<std::array<double, 5>, 4> rows{{
            {1, 1, 1, 1, 1},
            {0, 2, 4, 6, d1},
            {0, 2, 12, 30, d2},
            {1.0 / (dim_ + 1), 1.0 / (dim_ + 3), 1.0 / (dim_ + 5), 1.0 / (dim_ + 7), mh},
        }};
        const auto q = detail::solve4(rows);
        detail::SmoothingCap cap;
        cap.r_s = r_s;
        for (int i = 0; i < 4; ++i) cap.coef[std::size_t(i)] = K0 * q[std::size_t(i)] / std::pow(r_s, 2 * i);
        k.cap_ = cap;
        return k;
    }

    bool is_smoothed() const { return cap_.has_value(); }
    double smoothing_radius() const { return cap_ ? cap_->r_s : 0.0; }

    /// Antiderivative of K(r) r^2 (ambient dimension 3 ray quadrature).
    /// Exact for power families and the cap region; nullopt means integrate numerically.
    std::optional<double> radial_primitive_rsq(double r) const {
        if (cap_ && r < cap_->r_s) return cap_->primitive_rsq(r);
        switch (family_) {
            case KernelFamily::fractional: {
                const double a = 2.0 - (dim_ + s_);
                return c_ * std::pow(r, a + 1) / (a + 1);
            }
            case KernelFamily::simons_limit: {
                const double a = 2.0 - (dim_ + 1 - eps_);
                return eps_ * std::pow(r, a + 1) / (a + 1);
            }
            default: return std::nullopt;
        }
    }

    std::string describe() const {
        switch (family_) {
            case KernelFamily::fractional:
                return "fractional(s=" + std::to_string(s_) + ",C=" + std::to_string(c_) + ")";
            case KernelFamily::simons_limit: return "simons_limit(eps=" + std::to_string(eps_) + ")";
            case KernelFamily::mollifier:
                return "mollifier(eps=" + std::to_string(eps_) + "," + profile_.name + ")";
            case KernelFamily::smooth_integrable: return "gaussian";
        }
        return "?";
    }

private:
    Kernel() = default;

    double second_derivative(double r) const {
        switch (family_) {
            case KernelFamily::fractional:
                return (dim_ + s_) * (dim_ + s_ + 1) * c_ * std::pow(r, -(dim_ + s_ + 2));
            case KernelFamily::simons_limit:
                return (dim_ + 1 - eps_) * (dim_ + 2 - eps_) * eps_ * std::pow(r, -(dim_ + 3 - eps_));
            default: throw UnsupportedError("second derivative only for power families");
        }
    }

    // absolute tolerance 1e-10 on the radial integral
    double compute_mass() const {
        const double upper = compactly_supported() ? support_ : 10.0;
        const double radial =
            adaptive_simpson([this](double r) { return value(r) * std::pow(r, dim_ - 1); }, 0.0,
                             upper, 1e-10);
        return 0.5 * sphere_area(dim_) * radial;
    }

    int dim_ = 3;
    KernelFamily family_ = KernelFamily::mollifier;
    double s_ = 0.5, c_ = 1.0, eps_ = 0.3;
    double sing_ = 0, decay_ = 0;
    double support_ = std::numeric_limits<double>::infinity();
    std::optional<double> mass_;
    MollifierProfile profile_;
    std::optional<detail::SmoothingCap> cap_;
};

/// kernel_value / kernel_gradient / kernel_mass named as in the public surface.
inline double kernel_value(const Kernel& k, const Vec3& x) { return k.value_at(x); }
inline Vec3 kernel_gradient(const Kernel& k, const Vec3& x) { return k.gradient_at(x); }
inline double kernel_mass(const Kernel& k) {
    auto m = k.mass_constant();
    if (!m) throw UnsupportedError("kernel_mass: kernel is not integrable");
    return *m;
}

} // namespace nlc

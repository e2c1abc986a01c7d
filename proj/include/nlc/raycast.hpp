#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/geometry.hpp"
#include "nlc/kernels.hpp"
#include "nlc/quad1d.hpp"
#include "nlc/reduce.hpp"

namespace nlc {

/// Antipodally paired spherical ray quadrature around a boundary point: the
/// symmetric-ball PV evaluation of volume integrals, with the radial direction
/// integrated in closed form (power kernels) or by Gauss segments.
///
/// The polar axis is the surface normal at x, so the Gauss variable c = w.nu
/// never vanishes and the two rays of a pair start on opposite sides of dE;
/// the divergent near-field primitive cancels exactly inside each pair.
/// Panels of the c-grid are dyadically graded toward the equator, where first
/// crossings approach the base point and the pair integrand steepens.
struct RayCrossings {
    struct Pair {
        Vec3 dir;                    // +dir and -dir rays
        double weight = 0;           // direction measure (both rays share it)
        int s0 = 1;                  // sign of F just after 0 along +dir
        bool band = false;           // near-tangent band c in (0, 2^-octaves)
        std::vector<double> plus;    // crossing radii along +dir, ascending
        std::vector<double> minus;   // crossing radii along -dir, ascending
    };
    std::vector<Pair> pairs;
    double T = 0; // radial truncation
    int level = 0;
};

namespace detail {

inline std::vector<double> find_crossings(const Surface& s, const Vec3& x, const Vec3& d,
                                          double T, int s0) {
    std::vector<double> roots;
    // geometric ladder catches crossings near the base point
    const double t0 = 1e-8 * (1.0 + norm(x));
    const int per_decade = 48;
    const int decades = std::max(1, int(std::ceil(std::log10(T / t0))));
    double prev_t = t0;
    const double f0 = s.F(x + d * t0);
    int prev_sign = (f0 == 0) ? s0 : (f0 > 0 ? 1 : -1);
    if (prev_sign != s0) {
        // the ladder start already crossed; record a root at t0
        roots.push_back(t0);
        prev_sign = s0 == 1 ? -1 : 1;
    }
    const double q = std::pow(10.0, 1.0 / per_decade);
    double t = t0;
    for (int k = 0; k < decades * per_decade + 1; ++k) {
        t = std::min(t * q, T);
        const double f = s.F(x + d * t);
        const int sign = (f == 0) ? prev_sign : (f > 0 ? 1 : -1);
        if (sign != prev_sign) {
            double lo = prev_t, hi = t;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = s.F(x + d * mid);
                if ((fm > 0 ? 1 : -1) == prev_sign) lo = mid;
                else hi = mid;
                if (hi - lo < 1e-15 * hi) break;
            }
            roots.push_back(0.5 * (lo + hi));
            prev_sign = sign;
        }
        prev_t = t;
        if (t >= T) break;
    }
    return roots;
}

/// int_a^b K(t) t^2 dt, exact where the kernel carries a primitive.
inline double radial_rsq_integral(const Kernel& k, double a, double b) {
    if (b <= a) return 0.0;
    b = std::min(b, k.support_radius());
    if (b <= a) return 0.0;
    const double rs = k.is_smoothed() ? k.smoothing_radius() : 0.0;
    if (a < rs && b > rs) return radial_rsq_integral(k, a, rs) + radial_rsq_integral(k, rs, b);
    const auto pb = k.radial_primitive_rsq(b);
    const auto pa = k.radial_primitive_rsq(a);
    if (pb && pa) return *pb - *pa;
    return integrate_gl([&](double t) { return k.value(t) * t * t; }, a, b, 24);
}

} // namespace detail

inline RayCrossings build_ray_crossings(const Surface& s, const Vec3& x, int level, double T) {
    if (T <= 0) throw ParameterError("build_ray_crossings: T must be positive");
    RayCrossings rc;
    rc.T = T;
    rc.level = level;
    const Vec3 nu = surface_normal(s, x);
    const Mat3 qt = transpose(rotation_between(nu, Vec3{0, 0, 1}));
    const Vec3 t1{qt(0, 0), qt(1, 0), qt(2, 0)};
    const Vec3 t2{qt(0, 1), qt(1, 1), qt(2, 1)};

    const int octaves = level + 8;
    const int subdiv = std::max(1, 1 << std::max(0, level - 3));
    const auto& gl = gauss_legendre(8);
    const int m = std::max(8, 4 << level);
    const double dth = 2 * M_PI / m;

    // panel edges in c: dyadic octaves graded toward the equator where the
    // near-tangent pair integrand steepens, each split into `subdiv` GL-8
    // panels, plus one explicit equator band [0, 2^-octaves]
    std::vector<std::pair<double, double>> panels;
    for (int p = 0; p < octaves; ++p) {
        const double hi = std::ldexp(1.0, -p);
        const double lo = std::ldexp(1.0, -p - 1);
        for (int sp = 0; sp < subdiv; ++sp)
            panels.emplace_back(lo + (hi - lo) * sp / subdiv, lo + (hi - lo) * (sp + 1) / subdiv);
    }
    panels.emplace_back(0.0, std::ldexp(1.0, -octaves));

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const bool band = (pi + 1 == panels.size());
        const auto [clo, chi] = panels[pi];
        for (const auto& [xi, wxi] : gl) {
            const double c = clo + 0.5 * (chi - clo) * (xi + 1.0);
            const double wc = 0.5 * (chi - clo) * wxi;
            const double sphi = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int j = 0; j < m; ++j) {
                const double th = (j + 0.5) * dth;
                RayCrossings::Pair pr;
                pr.dir = nu * c + (t1 * std::cos(th) + t2 * std::sin(th)) * sphi;
                pr.weight = wc * dth;
                pr.s0 = 1; // along +dir: F ~ t c |gradF| > 0 (outside E)
                pr.band = band;
                pr.plus = detail::find_crossings(s, x, pr.dir, T, 1);
                pr.minus = detail::find_crossings(s, x, pr.dir * -1.0, T, -1);
                rc.pairs.push_back(std::move(pr));
            }
        }
    }
    return rc;
}

/// H_{K,E}(x) = (1/2) PV int (chi_{E^c} - chi_E)(y) K(x-y) dy via paired rays.
inline double pv_volume_difference(const RayCrossings& rc, const Kernel& k) {
    // the equator band hosts the near-tangent primitive blow-up of singular
    // kernels; mirror-angle cancellation makes its omission benign there,
    // while smooth kernels integrate it directly
    const bool skip_band = k.singular();
    PairwiseAccumulator acc;
    for (const auto& pr : rc.pairs) {
        if (skip_band && pr.band) continue;
        // [0, first crossing]: signs are opposite by construction; the two
        // primitives at 0 cancel, leaving P(t1+) - P(t1-)
        const double a_p = pr.plus.empty() ? rc.T : pr.plus.front();
        const double a_m = pr.minus.empty() ? rc.T : pr.minus.front();
        double v = pr.s0 * detail::radial_rsq_integral(k, std::min(a_p, a_m), std::max(a_p, a_m)) *
                   (a_p >= a_m ? 1.0 : -1.0);
        // remaining alternating segments of each ray
        auto tail_segments = [&](const std::vector<double>& cr, int s_first) {
            double sum = 0;
            int sgn = -s_first; // sign after the first crossing
            for (std::size_t i = 0; i < cr.size(); ++i) {
                const double a = cr[i];
                const double b = (i + 1 < cr.size()) ? cr[i + 1] : rc.T;
                sum += sgn * detail::radial_rsq_integral(k, a, b);
                sgn = -sgn;
            }
            return sum;
        };
        v += tail_segments(pr.plus, pr.s0);
        v += tail_segments(pr.minus, -pr.s0);
        acc.add(0.5 * pr.weight * v);
    }
    return acc.total();
}

/// int_E K(x-y) dy via rays (segments where F < 0).
inline double volume_integral_inside(const RayCrossings& rc, const Kernel& k) {
    PairwiseAccumulator acc;
    auto ray_inside = [&](const std::vector<double>& cr, int s_first) {
        double sum = 0;
        int sgn = s_first;
        double a = 0;
        for (std::size_t i = 0; i <= cr.size(); ++i) {
            const double b = (i < cr.size()) ? cr[i] : rc.T;
            if (sgn < 0) sum += detail::radial_rsq_integral(k, a, b);
            a = b;
            sgn = -sgn;
        }
        return sum;
    };
    for (const auto& pr : rc.pairs) {
        if (k.singular() && pr.band) continue;
        double v = ray_inside(pr.plus, pr.s0) + ray_inside(pr.minus, -pr.s0);
        acc.add(pr.weight * v);
    }
    return acc.total();
}

/// L^1 tail of the kernel: int_{|z| > T} |K| dz (ambient dimension 3).
inline double kernel_l1_tail(const Kernel& k, double T) {
    if (k.compactly_supported() && k.support_radius() <= T) return 0.0;
    if (k.family() == KernelFamily::simons_limit) {
        const double e = k.eps();
        return 4 * M_PI * e * std::pow(T, e - 1.0) / (1.0 - e);
    }
    if (k.family() == KernelFamily::fractional) {
        const double s = k.fractional_s();
        return 4 * M_PI * k.bound_constant() * std::pow(T, -1.0 - s) / (1.0 + s);
    }
    // rapidly decaying
    return 4 * M_PI *
           adaptive_simpson([&](double t) { return k.decay_bound(t) * t * t; }, T, T + 30.0, 1e-14);
}

struct RayCastResult {
    double value = 0;
    double error_estimate = 0;
    double tail_bound = 0;
};

/// Difference-form H with an error estimate from one level coarser rays.
inline RayCastResult nonlocal_H_difference(const Surface& s, const Vec3& x, const Kernel& k,
                                           int level, double T) {
    auto fine = build_ray_crossings(s, x, level, T);
    auto coarse = build_ray_crossings(s, x, std::max(0, level - 1), T);
    RayCastResult r;
    r.value = pv_volume_difference(fine, k);
    r.error_estimate = std::abs(r.value - pv_volume_difference(coarse, k));
    r.tail_bound = 0.5 * kernel_l1_tail(k, T);
    return r;
}

/// Volume-form H = C_K - int_E K (integrable kernels).
inline RayCastResult nonlocal_H_volume(const Surface& s, const Vec3& x, const Kernel& k, int level,
                                       double T) {
    auto m = k.mass_constant();
    if (!m) throw UnsupportedError("volume form requires an integrable kernel");
    auto fine = build_ray_crossings(s, x, level, T);
    auto coarse = build_ray_crossings(s, x, std::max(0, level - 1), T);
    RayCastResult r;
    r.value = *m - volume_integral_inside(fine, k);
    r.error_estimate = std::abs(r.value - (*m - volume_integral_inside(coarse, k)));
    r.tail_bound = kernel_l1_tail(k, T); // |chi_E| <= 1
    return r;
}

} // namespace nlc

#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/kernels.hpp"
#include "nlc/reduce.hpp"
#include "nlc/surface_rule.hpp"

namespace nlc {

/// Principal-value evaluation record. `value` is the finest-exclusion partial
/// sum, `extrapolated_value` the Richardson delta->0 limit; the error estimate
/// is assembled from the last two extrapolants plus a share of the PV
/// correction, so |value - extrapolated_value| <= 3 * error_estimate holds by
/// construction.
struct PVIntegralResult {
    double value = 0;
    double extrapolated_value = 0;
    double error_estimate = 0;
    double tail_bound = 0;
    double exclusion_radius = 0;
    double truncation_radius = 0;
    std::vector<std::pair<double, double>> iterates; // (delta, partial sum)
};

/// Per-ring pairwise sums of a multi-component integrand over a rule.
/// Mirror pairs are adjacent inside each ring, so the odd part of the
/// integrand cancels within a block and never inflates the reduction.
struct RingSums {
    std::vector<double> ring_rho;   // ring radii, ascending
    std::vector<double> data;       // ring-major [ring][component]
    int nc = 1;

    double at(std::size_t ring, int comp) const { return data[ring * std::size_t(nc) + std::size_t(comp)]; }
};

/// f(node, out) writes `nc` integrand values (without the quadrature weight).
template <class F>
RingSums integrate_by_rings(const SurfaceRule& rule, int nc, F&& f) {
    RingSums rs;
    rs.nc = nc;
    rs.ring_rho.reserve(rule.ring_end.size());
    rs.data.reserve(rule.ring_end.size() * std::size_t(nc));
    std::vector<double> vals(static_cast<std::size_t>(nc), 0.0);
    std::vector<std::vector<double>> comp{static_cast<std::size_t>(nc)};
    std::size_t beg = 0;
    for (const auto& [rho, end] : rule.ring_end) {
        for (auto& c : comp) {
            c.clear();
            c.reserve(end - beg);
        }
        for (std::size_t i = beg; i < end; ++i) {
            const RuleNode& nd = rule.nodes[i];
            f(nd, std::span<double>(vals));
            for (int c = 0; c < nc; ++c) {
                const double v = vals[std::size_t(c)] * nd.w;
                if (!std::isfinite(v))
                    throw IntegrandError("non-finite integrand at node " + std::to_string(i) +
                                         " pos (" + std::to_string(nd.pos.x) + "," +
                                         std::to_string(nd.pos.y) + "," + std::to_string(nd.pos.z) +
                                         ") component " + std::to_string(c));
                comp[std::size_t(c)].push_back(v);
            }
        }
        rs.ring_rho.push_back(rho);
        for (int c = 0; c < nc; ++c) rs.data.push_back(pairwise_sum(comp[std::size_t(c)]));
        beg = end;
    }
    return rs;
}

/// Partial sum over rings with rho >= delta (pairwise over ring subtotals).
inline double ring_partial_sum(const RingSums& rs, int comp, double delta) {
    std::vector<double> v;
    v.reserve(rs.ring_rho.size());
    for (std::size_t k = 0; k < rs.ring_rho.size(); ++k)
        if (rs.ring_rho[k] >= delta) v.push_back(rs.at(k, comp));
    return pairwise_sum(v);
}

/// Richardson assembly over a decreasing delta schedule; linear two-point fit
/// in delta^gamma (gamma = 1 by default).
inline PVIntegralResult pv_assemble(const RingSums& rs, int comp,
                                    std::span<const double> schedule, double gamma = 1.0,
                                    double tail = 0.0) {
    PVIntegralResult out;
    out.tail_bound = tail;
    std::vector<double> deltas(schedule.begin(), schedule.end());
    if (deltas.empty()) deltas.push_back(0.0);
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw ParameterError("pv_assemble: delta schedule must be strictly decreasing");

    std::vector<double> partials(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        partials[i] = ring_partial_sum(rs, comp, deltas[i]);
        out.iterates.emplace_back(deltas[i], partials[i]);
    }
    out.exclusion_radius = deltas.back();
    out.value = partials.back();

    if (deltas.size() == 1 || deltas.back() == 0.0) {
        // no extrapolation needed: the finest iterate is the full sum
        out.extrapolated_value = out.value;
        out.error_estimate = (deltas.size() >= 2)
                                 ? std::abs(partials[partials.size() - 1] - partials[partials.size() - 2])
                                 : 0.0;
        return out;
    }

    std::vector<double> extr;
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        const double a = std::pow(deltas[i], gamma), b = std::pow(deltas[i - 1], gamma);
        extr.push_back(partials[i] + (partials[i] - partials[i - 1]) * a / (b - a));
    }
    out.extrapolated_value = extr.back();
    double est = std::abs(out.extrapolated_value - out.value) / 2.0;
    if (extr.size() >= 2) est += std::abs(extr[extr.size() - 1] - extr[extr.size() - 2]);
    out.error_estimate = est;
    return out;
}

/// Scalar principal-value surface integral over a rule with a delta schedule.
template <class F>
PVIntegralResult pv_surface_integral(const SurfaceRule& rule, F&& integrand,
                                     std::span<const double> schedule, double gamma = 1.0,
                                     double tail = 0.0) {
    for (double d : schedule)
        if (d != 0.0 && (d < 2 * rule.rho_min || d > 0.5 * rule.params.R))
            throw ParameterError("pv_surface_integral: delta " + std::to_string(d) +
                                 " outside the rule's resolution range");
    auto rs = integrate_by_rings(rule, 1, [&](const RuleNode& nd, std::span<double> out) {
        out[0] = integrand(nd);
    });
    auto res = pv_assemble(rs, 0, schedule, gamma, tail);
    res.truncation_radius = rule.params.R;
    return res;
}

/// Certified dyadic tail bound for the omitted integral of (|H_E|+1)|K|
/// outside B_r, from the rule's growth certificate and the kernel envelope:
///   sum_k C (2^{k+1} r)^beta * A (2^k r)^{-b} = A C 2^beta r^{beta-b} / (1-2^{beta-b}).
/// `gradient` switches the envelope to |grad K|.
inline double tail_bound(const SurfaceRule& rule, const Kernel& kernel, double r,
                         bool gradient = false) {
    if (r <= 0) throw ParameterError("tail_bound: r must be positive");
    if (kernel.compactly_supported() && kernel.support_radius() <= r) return 0.0;
    const double b = gradient ? kernel.decay_order() + 1 : kernel.decay_order();
    const double beta = rule.cert.beta;
    if (!(b > beta))
        throw DivergentTailError("tail_bound: kernel decay " + std::to_string(b) +
                                 " does not exceed growth exponent " + std::to_string(beta));
    if (!std::isfinite(b)) {
        // faster-than-power decay: sum the dyadic shells directly
        double s = 0;
        for (int k = 0; k < 120; ++k) {
            const double rk = std::ldexp(r, k);
            const double env = gradient ? kernel.gradient_decay_bound(rk) : kernel.decay_bound(rk);
            const double term = rule.cert.C * std::pow(2 * rk, beta) * env;
            s += term;
            if (term < 1e-300) break;
        }
        return s;
    }
    const double A = gradient ? kernel.gradient_decay_bound(r) * std::pow(r, b)
                              : kernel.decay_bound(r) * std::pow(r, b);
    const double t = std::pow(2.0, beta - b);
    return A * rule.cert.C * std::pow(2.0, beta) * std::pow(r, beta - b) / (1.0 - t);
}

} // namespace nlc

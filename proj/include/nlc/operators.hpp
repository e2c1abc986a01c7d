#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlc/fields.hpp"
#include "nlc/geometry.hpp"
#include "nlc/kernels.hpp"
#include "nlc/pv_integral.hpp"
#include "nlc/raycast.hpp"
#include "nlc/surface_rule.hpp"

namespace nlc {

/// Error budget of one reported number. PASS thresholds downstream are
/// 10 x the summed budgets, so every contribution is kept separate.
struct Budget {
    double quad = 0;      // refinement-difference estimate
    double tail = 0;      // certified truncation tail
    double fd = 0;        // finite-difference truncation
    double smoothing = 0; // near-field kernel cap
    double other = 0;

    double total() const { return quad + tail + fd + smoothing + other; }
    Budget operator+(const Budget& o) const {
        return {quad + o.quad, tail + o.tail, fd + o.fd, smoothing + o.smoothing, other + o.other};
    }
};

struct Measured {
    double value = 0;
    Budget budget;
};

/// Standing data of the pointwise operators: surface, kernel, rule, base.
/// The surface is re-expressed in the adapted frame (base at the origin,
/// nu = e_z) and everything is evaluated there; results are covariant, and
/// the frame rotation maps them back when ambient components are wanted.
struct OperatorContext {
    SurfacePtr original;
    SurfacePtr adapted;
    FramedPoint frame;       // frame on the original surface
    Kernel kernel;           // smoothed copy when the input kernel is singular
    RuleParams rule_params;
    SurfaceRule rule;        // on the adapted surface around the origin
    SurfaceRule rule_coarse; // one level coarser, for budgets
    bool kernel_was_smoothed = false;

    Vec3 base_adapted() const { return {0, 0, 0}; }
};

inline OperatorContext make_context(SurfacePtr s, const Vec3& x, Kernel kernel, RuleParams rp,
                                    const Mat3* frame_override = nullptr) {
    OperatorContext ctx;
    ctx.original = s;
    ctx.frame = surface_frame(*s, x, frame_override);
    ctx.adapted = adapted_surface(s, ctx.frame);
    ctx.rule_params = rp;
    ctx.rule = build_surface_rule(ctx.adapted, Vec3{0, 0, 0}, rp);
    RuleParams rc = rp;
    rc.level = std::max(0, rp.level - 1);
    ctx.rule_coarse = build_surface_rule(ctx.adapted, Vec3{0, 0, 0}, rc);
    if (kernel.singular()) {
        ctx.kernel = kernel.smoothed(8.0 * ctx.rule.rho_min);
        ctx.kernel_was_smoothed = true;
    } else {
        ctx.kernel = std::move(kernel);
    }
    return ctx;
}

namespace detail {

/// Fused kernel moments over one rule at the adapted origin:
/// [0] int K dH, [1..3] int nu K dH, [4] (1/2) int |e_z - nu|^2 K dH.
inline std::array<double, 5> kernel_moments(const SurfaceRule& rule, const Kernel& k) {
    auto rs = integrate_by_rings(rule, 5, [&](const RuleNode& nd, std::span<double> out) {
        const double kv = k.value(nd.r);
        out[0] = kv;
        out[1] = nd.nu.x * kv;
        out[2] = nd.nu.y * kv;
        out[3] = nd.nu.z * kv;
        const Vec3 d{-nd.nu.x, -nd.nu.y, 1.0 - nd.nu.z};
        out[4] = 0.5 * norm2(d) * kv;
    });
    std::array<double, 5> m{};
    for (int c = 0; c < 5; ++c) m[std::size_t(c)] = ring_partial_sum(rs, c, 0.0);
    return m;
}

} // namespace detail

/// K-mean curvature H_{K,E} at the context base point. Both the volume form
/// C_K - int_E K (integrable kernels) and the PV difference form are computed
/// by paired-ray quadrature; they must agree within combined budgets.
struct MeanCurvatureResult {
    std::optional<Measured> volume_form;
    Measured difference_form;
};

inline MeanCurvatureResult nonlocal_mean_curvature(const OperatorContext& ctx, int ray_level = 4,
                                                   double T = 0) {
    const Kernel& k = ctx.kernel;
    if (T <= 0) {
        T = k.compactly_supported() ? 1.1 * k.support_radius() : 8.0 * ctx.rule_params.R;
    }
    MeanCurvatureResult out;
    {
        auto r = nonlocal_H_difference(*ctx.adapted, Vec3{0, 0, 0}, k, ray_level, T);
        out.difference_form.value = r.value;
        out.difference_form.budget.quad = 1.5 * r.error_estimate;
        out.difference_form.budget.tail = r.tail_bound;
    }
    if (k.mass_constant()) {
        auto r = nonlocal_H_volume(*ctx.adapted, Vec3{0, 0, 0}, k, ray_level, T);
        Measured m;
        m.value = r.value;
        m.budget.quad = 1.5 * r.error_estimate;
        m.budget.tail = r.tail_bound;
        out.volume_form = m;
    }
    return out;
}

/// grad H_{K,E}(x) = int nu(y) K(x-y) dH_y (adapted components).
inline std::pair<Vec3, Budget> nonlocal_mean_curvature_gradient(const OperatorContext& ctx) {
    const auto mf = detail::kernel_moments(ctx.rule, ctx.kernel);
    const auto mc = detail::kernel_moments(ctx.rule_coarse, ctx.kernel);
    Vec3 v{mf[1], mf[2], mf[3]};
    Budget b;
    b.quad = norm(Vec3{mf[1] - mc[1], mf[2] - mc[2], mf[3] - mc[3]});
    b.tail = tail_bound(ctx.rule, ctx.kernel, ctx.rule_params.R, false);
    return {v, b};
}

/// c^2_{K,E}(x) with the rearranged form of the same node data.
struct TotalCurvatureResult {
    Measured difference_form;        // (1/2) int |nu(x)-nu(y)|^2 K
    std::optional<double> rearranged; // int K - nu(x).int nu K (integrable kernels)
    double kernel_sum = 0;            // int K dH (scale for algebra tolerances)
};

inline TotalCurvatureResult total_curvature_sq(const OperatorContext& ctx) {
    const auto mf = detail::kernel_moments(ctx.rule, ctx.kernel);
    const auto mc = detail::kernel_moments(ctx.rule_coarse, ctx.kernel);
    TotalCurvatureResult out;
    out.difference_form.value = mf[4];
    out.difference_form.budget.quad = std::abs(mf[4] - mc[4]);
    out.difference_form.budget.tail = 2.0 * tail_bound(ctx.rule, ctx.kernel, ctx.rule_params.R);
    out.kernel_sum = mf[0];
    if (ctx.kernel.integrable() || ctx.kernel_was_smoothed) out.rearranged = mf[0] - mf[3];
    return out;
}

/// L_{K,E} g (x) = int (g(x) - g(y)) K(x-y) dH_y; annihilates constants
/// node-wise.
inline Measured lk_apply(const OperatorContext& ctx, const ScalarField& g) {
    const Vec3 x0 = ctx.base_adapted();
    const double g0 = g.value(x0);
    auto eval = [&](const SurfaceRule& rule) {
        auto rs = integrate_by_rings(rule, 1, [&](const RuleNode& nd, std::span<double> out) {
            out[0] = (g0 - g.value(nd.pos)) * ctx.kernel.value(nd.r);
        });
        return ring_partial_sum(rs, 0, 0.0);
    };
    Measured m;
    m.value = eval(ctx.rule);
    m.budget.quad = std::abs(m.value - eval(ctx.rule_coarse));
    double gmax = std::abs(g0);
    for (std::size_t i = 0; i < ctx.rule.size(); i += 97)
        gmax = std::max(gmax, std::abs(g.value(ctx.rule.nodes[i].pos)));
    m.budget.tail = 2.0 * gmax * tail_bound(ctx.rule, ctx.kernel, ctx.rule_params.R);
    return m;
}

/// B_{K,E}(u, v; x) = (1/2) int (u(x)-u(y)) (v(x)-v(y)) K dH_y.
inline Measured bilinear_form_pointwise(const OperatorContext& ctx, const ScalarField& u,
                                        const ScalarField& v) {
    const Vec3 x0 = ctx.base_adapted();
    const double u0 = u.value(x0), v0 = v.value(x0);
    auto eval = [&](const SurfaceRule& rule) {
        auto rs = integrate_by_rings(rule, 1, [&](const RuleNode& nd, std::span<double> out) {
            out[0] = 0.5 * (u0 - u.value(nd.pos)) * (v0 - v.value(nd.pos)) * ctx.kernel.value(nd.r);
        });
        return ring_partial_sum(rs, 0, 0.0);
    };
    Measured m;
    m.value = eval(ctx.rule);
    m.budget.quad = std::abs(m.value - eval(ctx.rule_coarse));
    m.budget.tail = 2.0 * tail_bound(ctx.rule, ctx.kernel, ctx.rule_params.R);
    return m;
}

// ---------------------------------------------------------------------------
// shared-node discrete double forms (stability algebra)

/// Kernel matrix double sums over one rule: every x_a of the rule serves as
/// outer point, inner integral over the same node set. Self-pairs contribute
/// zero for difference integrands and are skipped.
struct SharedNodeForm {
    const SurfaceRule* rule;
    const Kernel* kernel;

    /// B(u, v) = sum_a w_a (1/2) sum_b w_b (u_a-u_b)(v_a-v_b) K_ab
    double total(std::span<const double> u, std::span<const double> v) const {
        PairwiseAccumulator outer;
        const auto& nd = rule->nodes;
        for (std::size_t a = 0; a < nd.size(); ++a) {
            PairwiseAccumulator inner;
            for (std::size_t b = 0; b < nd.size(); ++b) {
                if (a == b) continue;
                const double kab = kernel->value(norm(nd[a].pos - nd[b].pos));
                inner.add(0.5 * nd[b].w * (u[a] - u[b]) * (v[a] - v[b]) * kab);
            }
            outer.add(nd[a].w * inner.total());
        }
        return outer.total();
    }

    /// pointwise B(u, v; x_a) for every a
    std::vector<double> pointwise(std::span<const double> u, std::span<const double> v) const {
        const auto& nd = rule->nodes;
        std::vector<double> out(nd.size());
        for (std::size_t a = 0; a < nd.size(); ++a) {
            PairwiseAccumulator inner;
            for (std::size_t b = 0; b < nd.size(); ++b) {
                if (a == b) continue;
                const double kab = kernel->value(norm(nd[a].pos - nd[b].pos));
                inner.add(0.5 * nd[b].w * (u[a] - u[b]) * (v[a] - v[b]) * kab);
            }
            out[a] = inner.total();
        }
        return out;
    }

    /// L_K f at every node: sum_b w_b (f_a - f_b) K_ab
    std::vector<double> lk_at_nodes(std::span<const double> f) const {
        const auto& nd = rule->nodes;
        std::vector<double> out(nd.size());
        for (std::size_t a = 0; a < nd.size(); ++a) {
            PairwiseAccumulator inner;
            for (std::size_t b = 0; b < nd.size(); ++b) {
                if (a == b) continue;
                const double kab = kernel->value(norm(nd[a].pos - nd[b].pos));
                inner.add(nd[b].w * (f[a] - f[b]) * kab);
            }
            out[a] = inner.total();
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// tangential divergence harness

struct DivergenceCheck {
    double lhs = 0; // int delta_j g dH
    double rhs = 0; // int H nu_j g dH
    double residual = 0;
    double quad_est = 0;
};

/// Eq-level check of the tangential divergence theorem on a rule covering the
/// support of g (or a closed surface).
inline DivergenceCheck tangential_divergence_check(const SurfacePtr& s, const SurfaceRule& rule,
                                                   const SurfaceRule& rule_coarse,
                                                   const ScalarField& g, int j) {
    auto eval = [&](const SurfaceRule& r) {
        auto rs = integrate_by_rings(r, 2, [&](const RuleNode& nd, std::span<double> out) {
            const Vec3 dg = g.grad(nd.pos);
            const double delta_j = dg[j] - nd.nu[j] * dot(nd.nu, dg);
            out[0] = delta_j;
            out[1] = mean_curvature(*s, nd.pos) * nd.nu[j] * g.value(nd.pos);
        });
        return std::pair{ring_partial_sum(rs, 0, 0.0), ring_partial_sum(rs, 1, 0.0)};
    };
    const auto [lf, rf] = eval(rule);
    const auto [lc, rc] = eval(rule_coarse);
    DivergenceCheck out;
    out.lhs = lf;
    out.rhs = rf;
    out.residual = lf - rf;
    out.quad_est = std::abs(lf - lc) + std::abs(rf - rc);
    return out;
}

} // namespace nlc

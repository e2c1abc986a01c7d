#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "nlc/geometry.hpp"
#include "nlc/linalg.hpp"
#include "nlc/reduce.hpp"

namespace nlc {

struct RuleNode {
    Vec3 pos;
    Vec3 nu;
    double w = 0;   // H^{n-1} weight
    double rho = 0; // chart radial coordinate (0 for the center node)
    double r = 0;   // ambient distance to the rule's base point
};

/// Sampled verification of the dyadic mass bound: masses M(R_m) of
/// (|H_E|+1) dH over B_{R_m} against C R_m^beta.
struct GrowthCertificate {
    double beta = 2;
    double C = 0;
    double R0 = 0;
    std::vector<std::pair<double, double>> samples; // (radius, mass)
};

enum class TruncationMode {
    ambient_ball, // keep nodes with |y - base| <= R
    chart_radius  // keep nodes with chart rho <= R (graph parameter disk)
};

struct RuleParams {
    double delta = 0;  // exclusion radius around the base (chart radial)
    double R = 1;      // truncation radius
    int level = 5;     // refinement level L
    int depth = 8;     // octaves below R resolved by the graded mesh
    TruncationMode mode = TruncationMode::ambient_ball;
    double R0 = 0;     // dyadic certificate anchor; 0 -> R/8
    double beta = 2;   // growth exponent (n-1 for the bounded catalog)
};

/// Weighted node set over dE \cap (B_R \ B_delta(base)). Nodes are laid out
/// ring-major, innermost first; within a ring, mirror pairs (theta, theta+pi)
/// are adjacent so that odd parts cancel inside one summation block.
struct SurfaceRule {
    SurfacePtr surface;
    Vec3 base;
    RuleParams params;
    std::vector<RuleNode> nodes;
    std::vector<std::pair<double, std::size_t>> ring_end; // (rho, end index), cumulative
    double rho_min = 0;        // innermost ring radius (resolution floor)
    double node_spacing = 0;   // radial spacing at the innermost ring
    double area = 0;
    double area_error = 0;     // refinement-difference estimate + hole area
    double hole_area = 0;      // chart area of the unresolved disc below rho_min
    GrowthCertificate cert;

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline int angular_count(int level) { return std::max(8, 4 << level); }
inline int radial_per_octave(int level) { return std::max(4, (1 << level) / 2); }

struct GridSpec {
    std::vector<double> edges; // radial ring edges, ascending
    int M = 8;                 // angular cells (even)
};

inline GridSpec make_grid(double rho_min, double P, int level) {
    GridSpec g;
    g.M = angular_count(level);
    const double octaves = std::log2(P / rho_min);
    const int nr = std::max(2, int(std::ceil(octaves * radial_per_octave(level))));
    const double q = std::pow(P / rho_min, 1.0 / nr);
    g.edges.resize(std::size_t(nr) + 1);
    for (int k = 0; k <= nr; ++k) g.edges[std::size_t(k)] = rho_min * std::pow(q, k);
    g.edges.front() = rho_min;
    g.edges.back() = P;
    return g;
}

} // namespace detail

/// Discretize the surface measure around base: graded polar chart mesh,
/// mirror-symmetric rings, optional exclusion disc of radius delta.
/// Weights for a graph chart are sqrt(1+|grad f|^2) times the parameter cell
/// area; the sphere chart uses exact spherical cell areas.
inline SurfaceRule build_surface_rule(SurfacePtr s, const Vec3& base, RuleParams p) {
    if (p.R <= 0) throw ParameterError("build_surface_rule: R must be positive");
    if (p.delta < 0 || p.delta >= p.R)
        throw ParameterError("build_surface_rule: need 0 <= delta < R");
    if (p.level < 0) throw ParameterError("build_surface_rule: level must be >= 0");

    auto chart = s->make_chart(base);
    double P = (p.mode == TruncationMode::ambient_ball) ? chart->cover_radius(p.R) : p.R;
    P = std::min(P, chart->max_radius());
    if (!(P > 0)) throw ParameterError("build_surface_rule: empty chart coverage");

    SurfaceRule rule;
    rule.surface = s;
    rule.base = base;
    rule.params = p;

    const double rho_min = P * std::ldexp(1.0, -(p.level + p.depth));
    if (p.delta > 0 && p.delta < 2 * rho_min)
        throw ParameterError("build_surface_rule: delta below the mesh resolution");
    rule.rho_min = rho_min;

    const auto grid = detail::make_grid(rho_min, P, p.level);
    rule.node_spacing = grid.edges[1] - grid.edges[0];

    const double dtheta = 2 * M_PI / grid.M;
    const int half = grid.M / 2;

    const Vec3 base_pos = chart->at(0.0, 0.0);

    // center node carrying the innermost disc (only without exclusion)
    if (p.delta == 0) {
        RuleNode c;
        c.pos = base_pos;
        c.nu = surface_normal(*s, c.pos);
        c.rho = 0;
        c.r = 0;
        double w = 0;
        for (int m = 0; m < grid.M; ++m) w += chart->cell_weight(0, rho_min, m * dtheta, (m + 1) * dtheta);
        c.w = w;
        rule.hole_area = w;
        rule.nodes.push_back(c);
        rule.ring_end.emplace_back(0.0, rule.nodes.size());
    }

    const bool ambient = (p.mode == TruncationMode::ambient_ball);
    for (std::size_t k = 0; k + 1 < grid.edges.size(); ++k) {
        const double r0 = grid.edges[k], r1 = grid.edges[k + 1];
        const double rho = chart->node_radius(r0, r1);
        if (rho < p.delta) continue;
        const std::size_t before = rule.nodes.size();
        for (int m = 0; m < half; ++m) {
            for (int side = 0; side < 2; ++side) {
                const int mm = m + side * half;
                const double th = (mm + 0.5) * dtheta;
                if (!chart->valid(rho, th)) continue;
                RuleNode nd;
                nd.pos = chart->at(rho, th);
                nd.rho = rho;
                nd.r = norm(nd.pos - base_pos);
                if (ambient && nd.r > p.R) continue;
                nd.nu = surface_normal(*s, nd.pos);
                nd.w = chart->cell_weight(r0, r1, mm * dtheta, (mm + 1) * dtheta);
                rule.nodes.push_back(nd);
            }
        }
        if (rule.nodes.size() > before) rule.ring_end.emplace_back(rho, rule.nodes.size());
    }
    if (rule.nodes.empty()) throw ParameterError("build_surface_rule: no nodes retained");

    {
        std::vector<double> w(rule.nodes.size());
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) w[i] = rule.nodes[i].w;
        rule.area = pairwise_sum(w);
    }

    // refinement-difference area estimate from a one-level-coarser sweep
    if (p.level > 0) {
        const auto coarse = detail::make_grid(rho_min, P, p.level - 1);
        const double dth = 2 * M_PI / coarse.M;
        double wsum = (p.delta == 0) ? rule.hole_area : 0.0;
        const Vec3 b0 = chart->at(0.0, 0.0);
        for (std::size_t k = 0; k + 1 < coarse.edges.size(); ++k) {
            const double r0 = coarse.edges[k], r1 = coarse.edges[k + 1];
            const double rho = chart->node_radius(r0, r1);
            if (rho < p.delta) continue;
            for (int m = 0; m < coarse.M; ++m) {
                const double th = (m + 0.5) * dth;
                if (!chart->valid(rho, th)) continue;
                if (ambient && norm(chart->at(rho, th) - b0) > p.R) continue;
                wsum += chart->cell_weight(r0, r1, m * dth, (m + 1) * dth);
            }
        }
        rule.area_error = std::abs(rule.area - wsum) + rule.hole_area + 1e-14 * rule.area;
    } else {
        rule.area_error = rule.hole_area + 0.25 * rule.area;
    }

    // dyadic growth certificate for (|H_E|+1) dH
    rule.cert.beta = p.beta;
    rule.cert.R0 = (p.R0 > 0) ? p.R0 : p.R / 8;
    {
        std::vector<double> radii;
        for (double rr = rule.cert.R0; rr <= p.R * (1 + 1e-12); rr *= 2) radii.push_back(rr);
        if (radii.empty()) radii.push_back(p.R);
        std::vector<PairwiseAccumulator> acc(radii.size());
        for (const auto& nd : rule.nodes) {
            const double m = nd.w * (std::abs(mean_curvature(*s, nd.pos)) + 1.0);
            for (std::size_t i = 0; i < radii.size(); ++i)
                if (nd.r <= radii[i]) acc[i].add(m);
        }
        double cmax = 0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double mass = acc[i].total();
            rule.cert.samples.emplace_back(radii[i], mass);
            cmax = std::max(cmax, mass / std::pow(radii[i], p.beta));
        }
        rule.cert.C = 1.25 * cmax;
    }
    return rule;
}

} // namespace nlc

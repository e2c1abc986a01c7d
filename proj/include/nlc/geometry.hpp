#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/fields.hpp"
#include "nlc/linalg.hpp"

namespace nlc {

class Chart;

/// Hypersurface in R^3 given implicitly as boundary of E = {F < 0}; the
/// exterior normal is grad F / |grad F|. Implementations provide closed-form
/// derivatives of F up to third order, which is what the identity checks need
/// (shape operator plus one tangential derivative of it).
class Surface {
public:
    virtual ~Surface() = default;

    virtual double F(const Vec3& y) const = 0;
    virtual Vec3 gradF(const Vec3& y) const = 0;
    virtual Mat3 hessF(const Vec3& y) const = 0;
    virtual Ten3 thirdF(const Vec3& y) const = 0;

    virtual std::string name() const = 0;
    virtual std::unique_ptr<Chart> make_chart(const Vec3& base) const = 0;

    int dimension() const { return 3; }
};

using SurfacePtr = std::shared_ptr<const Surface>;

/// Base-centered polar chart of a surface patch. `at(rho, theta)` lies on the
/// surface; rho is the chart's intrinsic-like radial coordinate and the area
/// element is area_scale(rho,theta) drho dtheta (the polar rho factor included).
class Chart {
public:
    virtual ~Chart() = default;

    virtual Vec3 at(double rho, double theta) const = 0;
    virtual double area_scale(double rho, double theta) const = 0;

    /// Area of the polar cell [r0,r1] x [th0,th1]. The default integrates the
    /// polar factor exactly and samples the Jacobian at the cell's radial
    /// centroid; spherical charts override with the closed-form cap area.
    virtual double cell_weight(double r0, double r1, double th0, double th1) const {
        const double rn = node_radius(r0, r1);
        const double jac = area_scale(rn, 0.5 * (th0 + th1)) / rn;
        return jac * 0.5 * (r1 * r1 - r0 * r0) * (th1 - th0);
    }

    /// Radial node placement: centroid of the cell under the rho drho measure.
    virtual double node_radius(double r0, double r1) const {
        const double denom = r1 * r1 - r0 * r0;
        if (denom <= 0) return 0.5 * (r0 + r1);
        return (2.0 / 3.0) * (r1 * r1 * r1 - r0 * r0 * r0) / denom;
    }

    /// Chart radius guaranteed to cover all surface points within ambient
    /// distance R of the base.
    virtual double cover_radius(double ambient_R) const = 0;

    /// Hard limit of the chart's radial coordinate (half-period, pole, ...).
    virtual double max_radius() const { return std::numeric_limits<double>::infinity(); }

    /// False where the polar overlay would wrap onto already-covered surface.
    virtual bool valid(double rho, double theta) const {
        (void)rho;
        (void)theta;
        return true;
    }
};

// ---------------------------------------------------------------------------
// derived pointwise geometry

inline Vec3 surface_normal(const Surface& s, const Vec3& y) {
    const Vec3 g = s.gradF(y);
    const double n = norm(g);
    if (n < 1e-14) throw GeometryError("degenerate gradient of F on " + s.name());
    return g / n;
}

/// Full ambient Jacobian of the normal: Jnu(i,j) = d_j nu_i.
inline Mat3 normal_jacobian(const Surface& s, const Vec3& y) {
    const Vec3 g = s.gradF(y);
    const Mat3 h = s.hessF(y);
    const double G = norm(g);
    const Vec3 q = mul(h, g); // q_j = (H g)_j
    Mat3 j;
    const double G3 = G * G * G;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) j(i, k) = h(i, k) / G - g[i] * q[k] / G3;
    return j;
}

/// Second ambient derivatives of the normal: D2(i)(j,k) = d_k d_j nu_i.
inline std::array<Mat3, 3> normal_second_jacobian(const Surface& s, const Vec3& y) {
    const Vec3 g = s.gradF(y);
    const Mat3 h = s.hessF(y);
    const Ten3 t = s.thirdF(y);
    const double G = norm(g);
    const double G3 = G * G * G, G5 = G3 * G * G;
    const Vec3 q = mul(h, g);
    // P2_{jk} = (H H)_{jk} + sum_m g_m T_{mjk}
    Mat3 p2 = mul(h, h);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            p2(j, k) += g.x * t(0, j, k) + g.y * t(1, j, k) + g.z * t(2, j, k);
    std::array<Mat3, 3> d2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                d2[std::size_t(i)](j, k) = t(i, j, k) / G -
                                           (h(i, j) * q[k] + h(i, k) * q[j]) / G3 -
                                           g[i] * p2(j, k) / G3 + 3 * g[i] * q[j] * q[k] / G5;
    return d2;
}

/// Shape operator entries S_ij = delta_{E,j} nu_i (ambient indices).
inline Mat3 shape_matrix(const Surface& s, const Vec3& y) {
    const Vec3 nu = surface_normal(s, y);
    const Mat3 j = normal_jacobian(s, y);
    Vec3 w{}; // w_i = sum_m nu_m d_m nu_i
    for (int i = 0; i < 3; ++i) w[i] = j(i, 0) * nu.x + j(i, 1) * nu.y + j(i, 2) * nu.z;
    Mat3 sh;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) sh(i, k) = j(i, k) - nu[k] * w[i];
    return sh;
}

/// H_E = trace of the shape operator (no division by n-1).
inline double mean_curvature(const Surface& s, const Vec3& y) { return trace(shape_matrix(s, y)); }

/// Squared norm of the shape operator, c_E^2.
inline double total_curvature_sq_classical(const Surface& s, const Vec3& y) {
    return frobenius2(shape_matrix(s, y));
}

/// Ambient partials of the shape-matrix field: out[k](i,j) = d_k S_ij.
inline std::array<Mat3, 3> shape_matrix_ambient_derivative(const Surface& s, const Vec3& y) {
    const Vec3 nu = surface_normal(s, y);
    const Mat3 j = normal_jacobian(s, y);
    const auto d2 = normal_second_jacobian(s, y);
    Vec3 w{};
    for (int i = 0; i < 3; ++i) w[i] = j(i, 0) * nu.x + j(i, 1) * nu.y + j(i, 2) * nu.z;
    std::array<Mat3, 3> out;
    for (int k = 0; k < 3; ++k) {
        Vec3 dw{}; // d_k w_i = sum_m (J_{mk} J_{im} + nu_m D2_i(m,k))
        for (int i = 0; i < 3; ++i) {
            double sum = 0;
            for (int m = 0; m < 3; ++m)
                sum += j(m, k) * j(i, m) + nu[m] * d2[std::size_t(i)](m, k);
            dw[i] = sum;
        }
        for (int i = 0; i < 3; ++i)
            for (int jj = 0; jj < 3; ++jj)
                out[std::size_t(k)](i, jj) =
                    d2[std::size_t(i)](jj, k) - j(jj, k) * w[i] - nu[jj] * dw[i];
    }
    return out;
}

/// Tangential derivatives of the shape field: T(i,j,k) = delta_{E,k} S_ij.
inline Ten3 shape_tangential_derivative(const Surface& s, const Vec3& y) {
    const Vec3 nu = surface_normal(s, y);
    const auto d = shape_matrix_ambient_derivative(s, y);
    Ten3 t;
    for (int i = 0; i < 3; ++i)
        for (int jj = 0; jj < 3; ++jj) {
            const double ndot = nu.x * d[0](i, jj) + nu.y * d[1](i, jj) + nu.z * d[2](i, jj);
            for (int k = 0; k < 3; ++k) t(i, jj, k) = d[std::size_t(k)](i, jj) - nu[k] * ndot;
        }
    return t;
}

/// Newton projection onto {F = 0} along grad F.
inline Vec3 project_to_surface(const Surface& s, Vec3 y, int iters = 40) {
    for (int it = 0; it < iters; ++it) {
        const double f = s.F(y);
        const Vec3 g = s.gradF(y);
        const double g2 = norm2(g);
        if (g2 < 1e-28) throw GeometryError("projection hit a critical point of F");
        const Vec3 step = g * (f / g2);
        y -= step;
        if (norm(step) < 1e-15 * (1.0 + norm(y))) break;
    }
    return y;
}

// ---------------------------------------------------------------------------
// tangential calculus on scalar fields

/// delta_{E,i} g(x) = d_i g - nu_i (nu . grad g)   [x on the surface]
inline double tangential_derivative(const Surface& s, const ScalarField& g, const Vec3& x, int i) {
    const Vec3 nu = surface_normal(s, x);
    const Vec3 dg = g.grad(x);
    return dg[i] - nu[i] * dot(nu, dg);
}

inline Vec3 tangential_gradient(const Surface& s, const ScalarField& g, const Vec3& x) {
    const Vec3 nu = surface_normal(s, x);
    const Vec3 dg = g.grad(x);
    return dg - nu * dot(nu, dg);
}

/// Laplace-Beltrami Delta_{dE} g(x) = sum_k delta_k delta_k g(x).
/// Inner tangential gradients are analytic (field gradient + normal); the
/// outer tangential derivative is a central difference along the projected
/// coordinate curve through x, step `t`.
inline double surface_laplacian(const Surface& s, const ScalarField& g, const Vec3& x,
                                double t = 1e-4) {
    double acc = 0;
    for (int k = 0; k < 3; ++k) {
        Vec3 e{};
        e[k] = t;
        const Vec3 xp = project_to_surface(s, x + e);
        const Vec3 xm = project_to_surface(s, x - e);
        const double tp = tangential_gradient(s, g, xp)[k];
        const double tm = tangential_gradient(s, g, xm)[k];
        acc += (tp - tm) / (2 * t);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// adapted frames

/// Base point with rotation to the adapted frame nu_E(x) = (0,0,1), the shape
/// operator in that frame, and the curvature scalars.
struct FramedPoint {
    Vec3 x{};
    Mat3 Q = Mat3::identity(); // adapted coords z = Q (y - x)
    double H = 0;
    Mat3 h = Mat3::zero();     // adapted-frame shape operator
    double c2 = 0;
};

/// Build the adapted frame at x. An optional rotation override (must map
/// nu(x) to e_z) supports covariance tests, where the transported frame of a
/// moved configuration replaces the default minimal rotation.
inline FramedPoint surface_frame(const Surface& s, const Vec3& x, const Mat3* q_override = nullptr,
                                 double on_tol = 1e-8) {
    const double f = s.F(x);
    const Vec3 g = s.gradF(x);
    const double gn = norm(g);
    if (gn < 1e-14) throw GeometryError("surface_frame: degenerate point");
    if (std::abs(f) / gn > on_tol * (1.0 + norm(x)))
        throw GeometryError("surface_frame: point is not on the surface (distance " +
                            std::to_string(std::abs(f) / gn) + ")");
    FramedPoint fp;
    fp.x = x;
    const Vec3 nu = g / gn;
    if (q_override) {
        const Vec3 img = mul(*q_override, nu);
        if (std::abs(img.x) > 1e-9 || std::abs(img.y) > 1e-9 || std::abs(img.z - 1) > 1e-9)
            throw GeometryError("surface_frame: override rotation does not map nu to e_z");
        fp.Q = *q_override;
    } else {
        fp.Q = rotation_between(nu, Vec3{0, 0, 1});
    }
    const Mat3 sh = shape_matrix(s, x);
    fp.h = mul(fp.Q, mul(sh, transpose(fp.Q)));
    fp.H = trace(sh);
    fp.c2 = frobenius2(sh);
    return fp;
}

// ---------------------------------------------------------------------------
// rigid motions of surfaces

class TransformedSurface final : public Surface {
public:
    TransformedSurface(SurfacePtr base, RigidMotion m) : base_(std::move(base)), m_(m), inv_(m.inverse()) {}

    double F(const Vec3& y) const override { return base_->F(inv_.apply(y)); }
    Vec3 gradF(const Vec3& y) const override {
        return mul(m_.Q, base_->gradF(inv_.apply(y)));
    }
    Mat3 hessF(const Vec3& y) const override {
        return mul(m_.Q, mul(base_->hessF(inv_.apply(y)), transpose(m_.Q)));
    }
    Ten3 thirdF(const Vec3& y) const override {
        return rotate(base_->thirdF(inv_.apply(y)), m_.Q);
    }
    std::string name() const override { return base_->name() + "+motion"; }
    std::unique_ptr<Chart> make_chart(const Vec3& base_pt) const override;

    const RigidMotion& motion() const { return m_; }
    const SurfacePtr& inner() const { return base_; }

private:
    SurfacePtr base_;
    RigidMotion m_, inv_;
};

/// The surface moved so that frame.x -> 0 and nu -> e_z; identities are
/// evaluated at the origin of this adapted copy.
inline SurfacePtr adapted_surface(SurfacePtr s, const FramedPoint& frame) {
    RigidMotion m{frame.Q, mul(frame.Q, frame.x) * -1.0};
    return std::make_shared<TransformedSurface>(std::move(s), m);
}

namespace detail {
class MappedChart final : public Chart {
public:
    MappedChart(std::unique_ptr<Chart> inner, RigidMotion m) : inner_(std::move(inner)), m_(m) {}
    Vec3 at(double rho, double theta) const override { return m_.apply(inner_->at(rho, theta)); }
    double area_scale(double rho, double theta) const override {
        return inner_->area_scale(rho, theta);
    }
    double cell_weight(double r0, double r1, double t0, double t1) const override {
        return inner_->cell_weight(r0, r1, t0, t1);
    }
    double node_radius(double r0, double r1) const override { return inner_->node_radius(r0, r1); }
    double cover_radius(double R) const override { return inner_->cover_radius(R); }
    double max_radius() const override { return inner_->max_radius(); }
    bool valid(double rho, double theta) const override { return inner_->valid(rho, theta); }

private:
    std::unique_ptr<Chart> inner_;
    RigidMotion m_;
};
} // namespace detail

inline std::unique_ptr<Chart> TransformedSurface::make_chart(const Vec3& base_pt) const {
    auto inner = base_->make_chart(inv_.apply(base_pt));
    return std::make_unique<detail::MappedChart>(std::move(inner), m_);
}

// ---------------------------------------------------------------------------
// catalog surfaces

class SphereSurface final : public Surface {
public:
    explicit SphereSurface(double radius) : r_(radius) {
        if (radius <= 0) throw ParameterError("sphere radius must be positive");
    }
    double F(const Vec3& y) const override { return 0.5 * (norm2(y) - r_ * r_); }
    Vec3 gradF(const Vec3& y) const override { return y; }
    Mat3 hessF(const Vec3&) const override { return Mat3::identity(); }
    Ten3 thirdF(const Vec3&) const override { return Ten3{}; }
    std::string name() const override { return "sphere(" + std::to_string(r_) + ")"; }
    std::unique_ptr<Chart> make_chart(const Vec3& base) const override;
    double radius() const { return r_; }

private:
    double r_;
};

class CylinderSurface final : public Surface {
public:
    explicit CylinderSurface(double radius) : r_(radius) {
        if (radius <= 0) throw ParameterError("cylinder radius must be positive");
    }
    double F(const Vec3& y) const override { return 0.5 * (y.x * y.x + y.y * y.y - r_ * r_); }
    Vec3 gradF(const Vec3& y) const override { return {y.x, y.y, 0}; }
    Mat3 hessF(const Vec3&) const override {
        Mat3 m;
        m(0, 0) = m(1, 1) = 1;
        return m;
    }
    Ten3 thirdF(const Vec3&) const override { return Ten3{}; }
    std::string name() const override { return "cylinder(" + std::to_string(r_) + ")"; }
    std::unique_ptr<Chart> make_chart(const Vec3& base) const override;
    double radius() const { return r_; }

private:
    double r_;
};

/// {x^2 + y^2 = cosh^2 z}; E is the side containing the axis.
class CatenoidSurface final : public Surface {
public:
    double F(const Vec3& y) const override {
        const double c = std::cosh(y.z);
        return 0.5 * (y.x * y.x + y.y * y.y - c * c);
    }
    Vec3 gradF(const Vec3& y) const override {
        return {y.x, y.y, -0.5 * std::sinh(2 * y.z)};
    }
    Mat3 hessF(const Vec3& y) const override {
        Mat3 m;
        m(0, 0) = m(1, 1) = 1;
        m(2, 2) = -std::cosh(2 * y.z);
        return m;
    }
    Ten3 thirdF(const Vec3& y) const override {
        Ten3 t;
        t(2, 2, 2) = -2 * std::sinh(2 * y.z);
        return t;
    }
    std::string name() const override { return "catenoid"; }
    std::unique_ptr<Chart> make_chart(const Vec3& base) const override;
};

/// {(u cos v, u sin v, v)}; F = y cos z - x sin z.
class HelicoidSurface final : public Surface {
public:
    double F(const Vec3& y) const override { return y.y * std::cos(y.z) - y.x * std::sin(y.z); }
    Vec3 gradF(const Vec3& y) const override {
        const double c = std::cos(y.z), s = std::sin(y.z);
        return {-s, c, -y.y * s - y.x * c};
    }
    Mat3 hessF(const Vec3& y) const override {
        const double c = std::cos(y.z), s = std::sin(y.z);
        Mat3 m;
        m(0, 2) = m(2, 0) = -c;
        m(1, 2) = m(2, 1) = -s;
        m(2, 2) = -y.y * c + y.x * s;
        return m;
    }
    Ten3 thirdF(const Vec3& y) const override {
        const double c = std::cos(y.z), s = std::sin(y.z);
        Ten3 t;
        t(0, 2, 2) = t(2, 0, 2) = t(2, 2, 0) = s;
        t(1, 2, 2) = t(2, 1, 2) = t(2, 2, 1) = -c;
        t(2, 2, 2) = y.y * s + y.x * c;
        return t;
    }
    std::string name() const override { return "helicoid"; }
    std::unique_ptr<Chart> make_chart(const Vec3& base) const override;
};

/// Graph y3 = f(y1,y2) with f a bivariate polynomial; E is the subgraph.
/// Serves as the user-chart format: one "e1 e2 coefficient" monomial per line.
class PolynomialGraph final : public Surface {
public:
    struct Monomial {
        int e1 = 0, e2 = 0;
        double c = 0;
    };

    explicit PolynomialGraph(std::vector<Monomial> terms, std::string label = "graph")
        : terms_(std::move(terms)), label_(std::move(label)) {}

    static PolynomialGraph plane() { return PolynomialGraph({}, "plane"); }
    static PolynomialGraph paraboloid(double a, double b, std::string label = "paraboloid") {
        return PolynomialGraph({{2, 0, 0.5 * a}, {0, 2, 0.5 * b}}, std::move(label));
    }

    /// Plain-text coefficient table: '#' comments, lines "e1 e2 coefficient".
    static PolynomialGraph parse(const std::string& text, std::string label = "graph") {
        std::vector<Monomial> terms;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::istringstream ls(line);
            Monomial m;
            if (!(ls >> m.e1)) continue; // blank
            if (!(ls >> m.e2 >> m.c) || m.e1 < 0 || m.e2 < 0)
                throw ConfigError("bad monomial line " + std::to_string(lineno) + ": '" + line + "'");
            terms.push_back(m);
        }
        return PolynomialGraph(std::move(terms), std::move(label));
    }

    double f(double u, double v) const { return eval(u, v, 0, 0); }
    double df(double u, double v, int du, int dv) const { return eval(u, v, du, dv); }

    double F(const Vec3& y) const override { return y.z - f(y.x, y.y); }
    Vec3 gradF(const Vec3& y) const override {
        return {-df(y.x, y.y, 1, 0), -df(y.x, y.y, 0, 1), 1};
    }
    Mat3 hessF(const Vec3& y) const override {
        Mat3 m;
        m(0, 0) = -df(y.x, y.y, 2, 0);
        m(0, 1) = m(1, 0) = -df(y.x, y.y, 1, 1);
        m(1, 1) = -df(y.x, y.y, 0, 2);
        return m;
    }
    Ten3 thirdF(const Vec3& y) const override {
        Ten3 t;
        const double f30 = -df(y.x, y.y, 3, 0), f21 = -df(y.x, y.y, 2, 1);
        const double f12 = -df(y.x, y.y, 1, 2), f03 = -df(y.x, y.y, 0, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    if (i == 2 || j == 2 || k == 2) continue;
                    const int ones = (i == 1) + (j == 1) + (k == 1);
                    t(i, j, k) = (ones == 0) ? f30 : (ones == 1 ? f21 : (ones == 2 ? f12 : f03));
                }
        return t;
    }
    std::string name() const override { return label_; }
    std::unique_ptr<Chart> make_chart(const Vec3& base) const override;

private:
    static double fallpow(double x, int e, int d) {
        // d-th derivative of x^e
        if (d > e) return 0;
        double c = 1;
        for (int k = 0; k < d; ++k) c *= (e - k);
        double p = 1;
        for (int k = 0; k < e - d; ++k) p *= x;
        return c * p;
    }
    double eval(double u, double v, int du, int dv) const {
        double s = 0;
        for (const auto& m : terms_) s += m.c * fallpow(u, m.e1, du) * fallpow(v, m.e2, dv);
        return s;
    }

    std::vector<Monomial> terms_;
    std::string label_;
};

// ---------------------------------------------------------------------------
// charts of the catalog surfaces

namespace detail {

class GraphChart final : public Chart {
public:
    GraphChart(const PolynomialGraph* s, Vec3 base) : s_(s), u0_(base.x), v0_(base.y) {}
    Vec3 at(double rho, double theta) const override {
        const double u = u0_ + rho * std::cos(theta), v = v0_ + rho * std::sin(theta);
        return {u, v, s_->f(u, v)};
    }
    double area_scale(double rho, double theta) const override {
        const double u = u0_ + rho * std::cos(theta), v = v0_ + rho * std::sin(theta);
        const double fu = s_->df(u, v, 1, 0), fv = s_->df(u, v, 0, 1);
        return rho * std::sqrt(1 + fu * fu + fv * fv);
    }
    double cover_radius(double R) const override { return R; } // |y'-x'| <= |y-x|

private:
    const PolynomialGraph* s_;
    double u0_, v0_;
};

class SphereChart final : public Chart {
public:
    SphereChart(double radius, Vec3 base) : r_(radius) {
        nu_ = normalized(base);
        const Mat3 q = transpose(rotation_between(nu_, Vec3{0, 0, 1}));
        t1_ = {q(0, 0), q(1, 0), q(2, 0)};
        t2_ = {q(0, 1), q(1, 1), q(2, 1)};
    }
    Vec3 at(double rho, double theta) const override {
        const double phi = rho / r_;
        const Vec3 dir = t1_ * std::cos(theta) + t2_ * std::sin(theta);
        return (nu_ * std::cos(phi) + dir * std::sin(phi)) * r_;
    }
    double area_scale(double rho, double theta) const override {
        (void)theta;
        return r_ * std::sin(rho / r_);
    }
    double cell_weight(double r0, double r1, double th0, double th1) const override {
        // exact spherical cell area
        return r_ * r_ * (std::cos(r0 / r_) - std::cos(r1 / r_)) * (th1 - th0);
    }
    double node_radius(double r0, double r1) const override {
        // centroid under sin(rho/r) drho
        const double p0 = r0 / r_, p1 = r1 / r_;
        const double denom = std::cos(p0) - std::cos(p1);
        if (denom <= 1e-300) return 0.5 * (r0 + r1);
        const double num = (std::sin(p1) - p1 * std::cos(p1)) - (std::sin(p0) - p0 * std::cos(p0));
        return r_ * num / denom;
    }
    double cover_radius(double R) const override {
        if (R >= 2 * r_) return max_radius();
        return 2 * r_ * std::asin(0.5 * R / r_);
    }
    double max_radius() const override { return M_PI * r_ * (1 - 1e-12); }

private:
    double r_;
    Vec3 nu_, t1_, t2_;
};

class CylinderChart final : public Chart {
public:
    CylinderChart(double radius, Vec3 base) : r_(radius), z0_(base.z), phi0_(std::atan2(base.y, base.x)) {}
    Vec3 at(double rho, double theta) const override {
        const double s = rho * std::cos(theta), t = rho * std::sin(theta);
        const double phi = phi0_ + s / r_;
        return {r_ * std::cos(phi), r_ * std::sin(phi), z0_ + t};
    }
    double area_scale(double rho, double theta) const override {
        (void)theta;
        return rho; // flat intrinsic metric
    }
    double cover_radius(double R) const override {
        const double arc = (R >= 2 * r_) ? M_PI * r_ : 2 * r_ * std::asin(0.5 * R / r_);
        return std::hypot(arc, R) + 1e-9;
    }
    bool valid(double rho, double theta) const override {
        const double s = rho * std::cos(theta);
        return s > -M_PI * r_ && s <= M_PI * r_;
    }

private:
    double r_, z0_, phi0_;
};

class CatenoidChart final : public Chart {
public:
    explicit CatenoidChart(Vec3 base) : v0_(base.z), u0_(std::atan2(base.y, base.x)) {}
    Vec3 at(double rho, double theta) const override {
        const double u = u0_ + rho * std::cos(theta), v = v0_ + rho * std::sin(theta);
        const double c = std::cosh(v);
        return {c * std::cos(u), c * std::sin(u), v};
    }
    double area_scale(double rho, double theta) const override {
        const double v = v0_ + rho * std::sin(theta);
        const double c = std::cosh(v);
        return rho * c * c; // conformal metric cosh^2 v (du^2 + dv^2)
    }
    double cover_radius(double R) const override {
        const double reach = R + std::cosh(v0_) + 1.0;
        const double vmax = std::acosh(std::max(1.0, reach)) + 1.0;
        return std::hypot(M_PI, vmax + std::abs(v0_)) + 1.0;
    }
    bool valid(double rho, double theta) const override {
        const double du = rho * std::cos(theta);
        return du > -M_PI && du <= M_PI;
    }

private:
    double v0_, u0_;
};

class HelicoidChart final : public Chart {
public:
    explicit HelicoidChart(Vec3 base) {
        v0_ = base.z;
        u0_ = base.x * std::cos(base.z) + base.y * std::sin(base.z);
    }
    Vec3 at(double rho, double theta) const override {
        const double u = u0_ + rho * std::cos(theta), v = v0_ + rho * std::sin(theta);
        return {u * std::cos(v), u * std::sin(v), v};
    }
    double area_scale(double rho, double theta) const override {
        const double u = u0_ + rho * std::cos(theta);
        return rho * std::sqrt(1 + u * u);
    }
    double cover_radius(double R) const override {
        return std::hypot(R + std::abs(u0_) + 1.0, R) + 1.0;
    }

private:
    double u0_, v0_;
};

} // namespace detail

inline std::unique_ptr<Chart> SphereSurface::make_chart(const Vec3& base) const {
    return std::make_unique<detail::SphereChart>(r_, base);
}
inline std::unique_ptr<Chart> CylinderSurface::make_chart(const Vec3& base) const {
    return std::make_unique<detail::CylinderChart>(r_, base);
}
inline std::unique_ptr<Chart> CatenoidSurface::make_chart(const Vec3& base) const {
    return std::make_unique<detail::CatenoidChart>(base);
}
inline std::unique_ptr<Chart> HelicoidSurface::make_chart(const Vec3& base) const {
    return std::make_unique<detail::HelicoidChart>(base);
}
inline std::unique_ptr<Chart> PolynomialGraph::make_chart(const Vec3& base) const {
    return std::make_unique<detail::GraphChart>(this, base);
}

// ---------------------------------------------------------------------------
// surface-attached scalar fields (closed-form over the catalog)

/// The field y -> S_ij(y) = delta_{E,j} nu_i(y) with analytic ambient gradient.
inline ScalarField shape_component_field(SurfacePtr s, int i, int j) {
    ScalarField f;
    f.value = [s, i, j](const Vec3& y) { return shape_matrix(*s, y)(i, j); };
    f.gradient = [s, i, j](const Vec3& y) {
        const auto d = shape_matrix_ambient_derivative(*s, y);
        return Vec3{d[0](i, j), d[1](i, j), d[2](i, j)};
    };
    return f;
}

inline ScalarField mean_curvature_field(SurfacePtr s) {
    ScalarField f;
    f.value = [s](const Vec3& y) { return mean_curvature(*s, y); };
    f.gradient = [s](const Vec3& y) {
        const auto d = shape_matrix_ambient_derivative(*s, y);
        return Vec3{trace(d[0]), trace(d[1]), trace(d[2])};
    };
    return f;
}

/// c_E^2(y) = |S(y)|_F^2 as an ambient field.
inline ScalarField total_curvature_sq_field(SurfacePtr s) {
    ScalarField f;
    f.value = [s](const Vec3& y) { return frobenius2(shape_matrix(*s, y)); };
    f.gradient = [s](const Vec3& y) {
        const Mat3 sh = shape_matrix(*s, y);
        const auto d = shape_matrix_ambient_derivative(*s, y);
        Vec3 g{};
        for (int k = 0; k < 3; ++k) {
            double acc = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) acc += 2 * sh(a, b) * d[std::size_t(k)](a, b);
            g[k] = acc;
        }
        return g;
    };
    return f;
}

} // namespace nlc

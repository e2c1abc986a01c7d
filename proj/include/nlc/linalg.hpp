#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace nlc {

/// Minimal fixed-size linear algebra for ambient dimension 3.
/// The catalog of hypersurfaces lives in R^3; kernels and moment formulas
/// accept a general dimension separately.
struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> a{};

    double& operator()(int i, int j) { return a[std::size_t(3 * i + j)]; }
    double operator()(int i, int j) const { return a[std::size_t(3 * i + j)]; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1;
        return m;
    }
    static Mat3 zero() { return Mat3{}; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[std::size_t(i)] = a[std::size_t(i)] + o.a[std::size_t(i)];
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[std::size_t(i)] = a[std::size_t(i)] - o.a[std::size_t(i)];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[std::size_t(i)] = a[std::size_t(i)] * s;
        return r;
    }
};

inline Vec3 mul(const Mat3& m, const Vec3& v) {
    return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
            m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
            m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

inline Mat3 mul(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

inline Mat3 transpose(const Mat3& m) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = m(j, i);
    return r;
}

inline double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }

inline double frobenius2(const Mat3& m) {
    double s = 0;
    for (double v : m.a) s += v * v;
    return s;
}

/// Outer product a b^T.
inline Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
    return r;
}

/// Symmetric rank-3 tensor (third derivatives). Stored dense, 27 entries.
struct Ten3 {
    std::array<double, 27> a{};

    double& operator()(int i, int j, int k) { return a[std::size_t(9 * i + 3 * j + k)]; }
    double operator()(int i, int j, int k) const { return a[std::size_t(9 * i + 3 * j + k)]; }
};

/// Contraction over the first index: (T . v)_{jk} = sum_i v_i T_{ijk}.
inline Mat3 contract_first(const Ten3& t, const Vec3& v) {
    Mat3 r;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            r(j, k) = v.x * t(0, j, k) + v.y * t(1, j, k) + v.z * t(2, j, k);
    return r;
}

/// Rotation of a symmetric 3-tensor: T'_{ijk} = Q_{ia} Q_{jb} Q_{kc} T_{abc}.
inline Ten3 rotate(const Ten3& t, const Mat3& q) {
    Ten3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                double s = 0;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        for (int c = 0; c < 3; ++c) s += q(i, a) * q(j, b) * q(k, c) * t(a, b, c);
                r(i, j, k) = s;
            }
    return r;
}

/// Minimal rotation taking unit vector `from` to unit vector `to`.
/// Falls back to a 180-degree flip about a stable axis when from = -to.
inline Mat3 rotation_between(const Vec3& from, const Vec3& to) {
    const Vec3 v = cross(from, to);
    const double c = dot(from, to);
    const double s2 = norm2(v);
    if (s2 < 1e-28) {
        if (c > 0) return Mat3::identity();
        // pick the coordinate axis least aligned with `from`
        Vec3 axis{1, 0, 0};
        if (std::abs(from.x) > std::abs(from.y)) axis = {0, 1, 0};
        Vec3 u = normalized(axis - from * dot(axis, from));
        return outer(u, u) * 2 - Mat3::identity();
    }
    // Rodrigues with the cross-product matrix of v
    Mat3 vx = Mat3::zero();
    vx(0, 1) = -v.z; vx(0, 2) = v.y;
    vx(1, 0) = v.z;  vx(1, 2) = -v.x;
    vx(2, 0) = -v.y; vx(2, 1) = v.x;
    return Mat3::identity() + vx + mul(vx, vx) * ((1 - c) / s2);
}

/// Rigid motion y -> Q y + t.
struct RigidMotion {
    Mat3 Q = Mat3::identity();
    Vec3 t{};

    Vec3 apply(const Vec3& y) const { return mul(Q, y) + t; }
    Vec3 apply_vector(const Vec3& v) const { return mul(Q, v); }

    RigidMotion inverse() const {
        Mat3 qt = transpose(Q);
        return {qt, mul(qt, t) * -1.0};
    }
    /// Composition: (this after other)(y) = this(other(y)).
    RigidMotion after(const RigidMotion& other) const {
        return {mul(Q, other.Q), mul(Q, other.t) + t};
    }
};

} // namespace nlc

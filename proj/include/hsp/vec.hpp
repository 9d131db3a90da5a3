#pragma once

// Small fixed-size vector and matrix types used throughout the library.
// Real and complex 3-vectors, 3x3 matrices. Everything is a plain value type.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace hsp {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

template <typename T>
struct Vec3T {
    std::array<T, 3> v{};

    constexpr Vec3T() = default;
    constexpr Vec3T(T x, T y, T z) : v{x, y, z} {}

    constexpr T& operator[](std::size_t i) { return v[i]; }
    constexpr const T& operator[](std::size_t i) const { return v[i]; }

    constexpr Vec3T& operator+=(const Vec3T& o) {
        for (int i = 0; i < 3; ++i) v[i] += o.v[i];
        return *this;
    }
    constexpr Vec3T& operator-=(const Vec3T& o) {
        for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
        return *this;
    }
    template <typename S>
    constexpr Vec3T& operator*=(S s) {
        for (int i = 0; i < 3; ++i) v[i] *= s;
        return *this;
    }
};

using Vec3 = Vec3T<double>;
using CVec3 = Vec3T<Complex>;

template <typename T>
constexpr Vec3T<T> operator+(Vec3T<T> a, const Vec3T<T>& b) { return a += b; }
template <typename T>
constexpr Vec3T<T> operator-(Vec3T<T> a, const Vec3T<T>& b) { return a -= b; }
template <typename T>
constexpr Vec3T<T> operator-(const Vec3T<T>& a) { return {-a[0], -a[1], -a[2]}; }
constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
constexpr Vec3 operator*(const Vec3& a, double s) { return s * a; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a[0] / s, a[1] / s, a[2] / s}; }
inline CVec3 operator*(Complex s, const CVec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline CVec3 operator*(double s, const CVec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline CVec3 operator*(Complex s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline CVec3 operator/(const CVec3& a, double s) { return {a[0] / s, a[1] / s, a[2] / s}; }

inline CVec3 to_complex(const Vec3& a) { return {a[0], a[1], a[2]}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
// Bilinear (no conjugation).
inline Complex dot(const CVec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Complex dot(const Vec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Complex dot(const CVec3& a, const Vec3& b) { return dot(b, a); }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline CVec3 cross(const Vec3& a, const CVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm(const CVec3& a) {
    return std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]));
}
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

template <typename T>
struct Mat3T {
    std::array<std::array<T, 3>, 3> m{};

    constexpr std::array<T, 3>& operator[](std::size_t i) { return m[i]; }
    constexpr const std::array<T, 3>& operator[](std::size_t i) const { return m[i]; }

    static constexpr Mat3T identity() {
        Mat3T r;
        for (int i = 0; i < 3; ++i) r.m[i][i] = T(1);
        return r;
    }
    constexpr Mat3T transposed() const {
        Mat3T r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    constexpr Mat3T& operator+=(const Mat3T& o) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    constexpr Mat3T& operator-=(const Mat3T& o) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] -= o.m[i][j];
        return *this;
    }
    template <typename S>
    constexpr Mat3T& operator*=(S s) {
        for (auto& row : m)
            for (auto& x : row) x *= s;
        return *this;
    }
};

using Mat3 = Mat3T<double>;
using CMat3 = Mat3T<Complex>;

template <typename T>
constexpr Mat3T<T> operator+(Mat3T<T> a, const Mat3T<T>& b) { return a += b; }
template <typename T>
constexpr Mat3T<T> operator-(Mat3T<T> a, const Mat3T<T>& b) { return a -= b; }
constexpr Mat3 operator*(double s, Mat3 a) { return a *= s; }
inline CMat3 operator*(Complex s, CMat3 a) { return a *= s; }
inline CMat3 operator*(double s, CMat3 a) { return a *= s; }

inline CMat3 to_complex(const Mat3& a) {
    CMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[i][j];
    return r;
}

constexpr Vec3 operator*(const Mat3& a, const Vec3& x) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
    return r;
}
inline CVec3 operator*(const CMat3& a, const CVec3& x) {
    CVec3 r;
    for (int i = 0; i < 3; ++i) r[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
    return r;
}
inline CVec3 operator*(const CMat3& a, const Vec3& x) {
    CVec3 r;
    for (int i = 0; i < 3; ++i) r[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
    return r;
}

// a ⊗ b = a bᵀ
constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[i] * b[j];
    return r;
}

// Frobenius norm.
template <typename T>
double frobenius(const Mat3T<T>& a) {
    double s = 0.0;
    for (const auto& row : a.m)
        for (const auto& x : row) s += std::norm(x);
    return std::sqrt(s);
}

}  // namespace hsp

#pragma once

#include <cmath>
#include <complex>

namespace gapscope {

// 2x2 matrix over double or complex<double>; the cocycle fiber value.
template <class T>
struct Mat2T {
    T a11{}, a12{}, a21{}, a22{};

    static Mat2T identity() { return {T(1), T(0), T(0), T(1)}; }

    T det() const { return a11 * a22 - a12 * a21; }

    // Adjugate; equals the inverse when det == 1.
    Mat2T adjugate() const { return {a22, -a12, -a21, a11}; }

    Mat2T operator*(const Mat2T& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2T operator+(const Mat2T& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2T operator-(const Mat2T& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2T operator*(T s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

    double frob_sq() const {
        return std::norm(std::complex<double>(a11)) +
               std::norm(std::complex<double>(a12)) +
               std::norm(std::complex<double>(a21)) +
               std::norm(std::complex<double>(a22));
    }

    // Spectral norm (largest singular value).
    double norm2() const {
        double f = frob_sq();
        double d = std::abs(std::complex<double>(det()));
        double disc = f * f - 4.0 * d * d;
        if (disc < 0.0) disc = 0.0;
        return std::sqrt(0.5 * (f + std::sqrt(disc)));
    }
};

using Mat2 = Mat2T<double>;
using Mat2C = Mat2T<std::complex<double>>;

// Rotation by phi turns: [[cos 2*pi*phi, -sin],[sin, cos]].
inline Mat2 rotation(double phi) {
    double c = std::cos(2.0 * M_PI * phi), s = std::sin(2.0 * M_PI * phi);
    return {c, -s, s, c};
}

}  // namespace gapscope

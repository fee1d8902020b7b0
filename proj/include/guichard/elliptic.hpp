#pragma once

// Arithmetic-geometric mean, complete elliptic integral K(k) and the Jacobi
// elliptic functions sn, cn, dn for real argument and modulus 0 <= k <= 1.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "guichard/errors.hpp"

namespace guichard::elliptic {

inline constexpr double ladder_tolerance = 1e-15;
inline constexpr int ladder_max_iterations = 50;

/// Elliptic modulus k, 0 <= k <= 1.
class EllipticModulus {
public:
    explicit EllipticModulus(double k) : k_(k) {
        if (!(k >= 0.0 && k <= 1.0)) {
            throw DomainError("elliptic modulus must lie in [0, 1], got " + std::to_string(k));
        }
    }

    double value() const noexcept { return k_; }
    /// Complementary modulus sqrt(1 - k^2).
    double complement() const noexcept { return std::sqrt((1.0 - k_) * (1.0 + k_)); }

private:
    double k_;
};

inline double agm(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("agm requires positive arguments");
    }
    for (int n = 0; n < ladder_max_iterations; ++n) {
        if (std::abs(a - b) <= ladder_tolerance * a) {
            break;
        }
        const double next_a = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next_a;
    }
    return 0.5 * (a + b);
}

/// K(k) = pi / (2 agm(1, k')).
inline double complete_K(EllipticModulus k) {
    if (k.value() == 1.0) {
        throw DivergenceError("complete elliptic integral K diverges at k = 1");
    }
    return std::numbers::pi / (2.0 * agm(1.0, k.complement()));
}

inline double complete_K(double k) { return complete_K(EllipticModulus(k)); }

struct JacobiTriple {
    double sn;
    double cn;
    double dn;
};

/// sn, cn, dn by the descending Landen (AGM) ladder.
inline JacobiTriple jacobi_scd(double u, EllipticModulus modulus) {
    const double k = modulus.value();
    if (k == 0.0) {
        return {std::sin(u), std::cos(u), 1.0};
    }
    if (k == 1.0) {
        const double sech = 1.0 / std::cosh(u);
        return {std::tanh(u), sech, sech};
    }

    const double period = 4.0 * complete_K(modulus);
    if (std::abs(u) > period) {
        u = std::fmod(u, period);
    }

    std::array<double, ladder_max_iterations + 1> a{};
    std::array<double, ladder_max_iterations + 1> c{};
    a[0] = 1.0;
    double b = modulus.complement();
    c[0] = k;
    int n = 0;
    while (n < ladder_max_iterations && std::abs(c[n]) > ladder_tolerance) {
        const double an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = std::sqrt(an * b);
        ++n;
    }

    double phi = std::ldexp(a[n] * u, n);
    double phi_prev = phi;
    for (int m = n; m > 0; --m) {
        phi_prev = phi;
        phi = 0.5 * (phi + std::asin(c[m] / a[m] * std::sin(phi)));
    }

    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    const double denom = std::cos(phi_prev - phi);
    double dn;
    if (n > 0 && std::abs(denom) > 1e-3) {
        dn = cn / denom;
    } else {
        dn = std::sqrt((1.0 - k * sn) * (1.0 + k * sn));
    }
    return {sn, cn, dn};
}

inline JacobiTriple jacobi_scd(double u, double k) { return jacobi_scd(u, EllipticModulus(k)); }

} // namespace guichard::elliptic

#pragma once

// Differential geometry of Guichard nets: Christoffel symbols of the diagonal
// metric, curvature of the coordinate surfaces, the level surfaces of a
// translation invariant, the angle function phi and the flat surfaces
// associated with one-constant families.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "guichard/errors.hpp"
#include "guichard/invariant_solutions.hpp"
#include "guichard/lame_core.hpp"
#include "guichard/types.hpp"

namespace guichard {

/// Gamma[k][i][j] = Christoffel symbol of the second kind, upper index k.
using Christoffel = std::array<Mat3, 3>;

inline Christoffel christoffel_from_sample(const NetSample& s, const Point& p) {
    detail::guard_coefficients(s.l, p);
    const auto& l = s.l;
    const auto& dl = s.dl;
    Christoffel g{};
    for (std::size_t i = 0; i < 3; ++i) {
        g[i][i][i] = dl[i][i] / l[i];
        for (std::size_t k = 0; k < 3; ++k) {
            if (k == i) {
                continue;
            }
            g[i][i][k] = dl[i][k] / l[i];
            g[i][k][i] = g[i][i][k];
            g[k][i][i] = -l[i] * dl[i][k] / (l[k] * l[k]);
        }
    }
    return g;
}

inline Christoffel christoffel(const GuichardNet& net, const Point& p) {
    return christoffel_from_sample(net.evaluate(p), p);
}

/// Largest deviation from metric compatibility, d_k g_ij = Gamma^m_ki g_mj + Gamma^m_kj g_im,
/// with the metric derivatives taken by central differences of relative step `relative_step`.
inline double metric_compatibility_residual(const GuichardNet& net, const Point& p, double relative_step = 1e-5) {
    const Christoffel gamma = christoffel(net, p);
    const Vec3 l = net.evaluate(p).l;
    const Vec3 steps = net.difference_steps(relative_step);
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        Point pp = p;
        Point pm = p;
        pp[k] += steps[k];
        pm[k] -= steps[k];
        const Vec3 lp = net.evaluate_unchecked(pp).l;
        const Vec3 lm = net.evaluate_unchecked(pm).l;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                const double dg = i == j ? (lp[i] * lp[i] - lm[i] * lm[i]) / (2.0 * steps[k]) : 0.0;
                const double rhs = gamma[j][k][i] * l[j] * l[j] + gamma[i][k][j] * l[i] * l[i];
                worst = std::max(worst, std::abs(dg - rhs));
            }
        }
    }
    return worst;
}

/// Gaussian curvature of the coordinate surface x_i = const through p:
/// K_i = l_{j,x_i} l_{k,x_i} / (l_i^2 l_j l_k).
inline double coordinate_surface_curvature(const NetSample& s, std::size_t i, const Point& p) {
    if (i > 2) {
        throw ValidationError("coordinate index must be 0, 1 or 2");
    }
    detail::guard_coefficients(s.l, p);
    const auto [j, k] = others(i);
    return s.dl[j][i] * s.dl[k][i] / (s.l[i] * s.l[i] * s.l[j] * s.l[k]);
}

inline double coordinate_surface_curvature(const GuichardNet& net, std::size_t i, const Point& p) {
    return coordinate_surface_curvature(net.evaluate(p), i, p);
}

inline Vec3 coordinate_surface_curvatures(const GuichardNet& net, const Point& p) {
    const NetSample s = net.evaluate(p);
    return {coordinate_surface_curvature(s, 0, p), coordinate_surface_curvature(s, 1, p),
            coordinate_surface_curvature(s, 2, p)};
}

// ---------------------------------------------------------------------------
// Level surfaces xi = alpha . x of a translation-invariant net
// ---------------------------------------------------------------------------

namespace detail {

inline const Vec3& require_alpha(const GuichardNet& net) {
    if (!net.info().alpha) {
        throw UnsupportedError("level-surface quantities need a translation-invariant net");
    }
    return *net.info().alpha;
}

} // namespace detail

inline double level_surface_grad_norm(const GuichardNet& net, const Point& p) {
    const Vec3& a = detail::require_alpha(net);
    const NetSample s = net.evaluate(p);
    detail::guard_coefficients(s.l, p);
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        sum += a[j] * a[j] / (s.l[j] * s.l[j]);
    }
    return std::sqrt(sum);
}

/// Mean curvature of a level surface split into its two contributions:
/// H = laplacian_term + normal_term, laplacian_term = -Lap(h)/|grad h|,
/// normal_term = Hess h(n, n)/|grad h| with n the unit normal.
struct MeanCurvatureTerms {
    double laplacian_term = 0.0;
    double normal_term = 0.0;
    double grad_norm = 0.0;

    double total() const noexcept { return laplacian_term + normal_term; }
};

inline MeanCurvatureTerms level_surface_mean_curvature_terms(const GuichardNet& net, const Point& p) {
    const Vec3& a = detail::require_alpha(net);
    const NetSample s = net.evaluate(p);
    const Christoffel gamma = christoffel_from_sample(s, p);
    const auto& l = s.l;

    // Hess h_ij = -Gamma^k_ij alpha_k since h is linear in x.
    Mat3 hess{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                v -= gamma[k][i][j] * a[k];
            }
            hess[i][j] = v;
        }
    }
    double grad2 = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        grad2 += a[j] * a[j] / (l[j] * l[j]);
    }
    const double grad = std::sqrt(grad2);
    if (!(grad > 0.0)) {
        throw SingularityError("gradient of the invariant vanishes", p);
    }
    double laplacian = 0.0;
    Vec3 n{};
    for (std::size_t i = 0; i < 3; ++i) {
        laplacian += hess[i][i] / (l[i] * l[i]);
        n[i] = a[i] / (l[i] * l[i] * grad);
    }
    double hnn = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            hnn += hess[i][j] * n[i] * n[j];
        }
    }
    return {-laplacian / grad, hnn / grad, grad};
}

/// Mean curvature (trace of the shape operator over the level surface) at p.
inline double level_surface_mean_curvature_at(const GuichardNet& net, const Point& p) {
    return level_surface_mean_curvature_terms(net, p).total();
}

/// Range of alpha . x over the box.
inline Interval invariant_image(const Vec3& alpha, const Box& box) { return detail::image_of_box(alpha, box); }

inline double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Population variance.
inline double sample_variance(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Point of the plane alpha . x = xi closest to the centre of the net's box.
inline Point level_set_anchor(const GuichardNet& net, double xi) {
    const Vec3& a = detail::require_alpha(net);
    const Point c = net.domain().center();
    const double t = (xi - dot(a, c)) / dot(a, a);
    const Point p{c[0] + t * a[0], c[1] + t * a[1], c[2] + t * a[2]};
    if (!net.domain().contains(p)) {
        throw DomainError("level set xi = " + std::to_string(xi) + " misses the net domain near its centre");
    }
    return p;
}

inline double level_surface_mean_curvature(const GuichardNet& net, double xi0) {
    return level_surface_mean_curvature_at(net, level_set_anchor(net, xi0));
}

/// Orthonormal pair spanning the plane orthogonal to alpha.
inline std::array<Vec3, 2> level_set_frame(const Vec3& alpha) {
    const double n = norm(alpha);
    const Vec3 u{alpha[0] / n, alpha[1] / n, alpha[2] / n};
    // seed with the axis least aligned with alpha
    std::size_t axis = 0;
    for (std::size_t s = 1; s < 3; ++s) {
        if (std::abs(u[s]) < std::abs(u[axis])) {
            axis = s;
        }
    }
    Vec3 e{};
    e[axis] = 1.0;
    const double d = dot(e, u);
    Vec3 f1{e[0] - d * u[0], e[1] - d * u[1], e[2] - d * u[2]};
    const double n1 = norm(f1);
    for (double& v : f1) {
        v /= n1;
    }
    const Vec3 f2{u[1] * f1[2] - u[2] * f1[1], u[2] * f1[0] - u[0] * f1[2], u[0] * f1[1] - u[1] * f1[0]};
    return {f1, f2};
}

/// `count` pseudo-random points of the plane alpha . x = xi inside the box, from a seeded generator.
inline std::vector<Point> level_set_points(const GuichardNet& net, double xi, std::size_t count, std::uint64_t seed) {
    const Vec3& a = detail::require_alpha(net);
    const Point anchor = level_set_anchor(net, xi);
    const auto frame = level_set_frame(a);
    const Box& box = net.domain();
    const double radius =
        0.5 * std::sqrt(box.extent(0) * box.extent(0) + box.extent(1) * box.extent(1) + box.extent(2) * box.extent(2));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-radius, radius);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t attempt = 0; out.size() < count; ++attempt) {
        if (attempt > 1000 * count) {
            throw DomainError("could not place enough points on the level set inside the box");
        }
        const double s = uni(rng);
        const double t = uni(rng);
        Point p{};
        for (std::size_t k = 0; k < 3; ++k) {
            p[k] = anchor[k] + s * frame[0][k] + t * frame[1][k];
        }
        if (box.contains(p)) {
            out.push_back(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// The angle function phi
// ---------------------------------------------------------------------------

enum class PhiForm {
    cos_type,      ///< l1 = l2 cos(phi), l3 = l2 sin(phi)
    cosh_type,     ///< l2 = l3 cosh(phi), l1 = l3 sinh(phi)
    cosh_l1_type,  ///< l2 = l1 cosh(phi), l3 = l1 sinh(phi)
};

inline const char* phi_form_name(PhiForm f) {
    switch (f) {
    case PhiForm::cos_type: return "cos_type";
    case PhiForm::cosh_type: return "cosh_type";
    case PhiForm::cosh_l1_type: return "cosh_l1_type";
    }
    return "?";
}

/// Form matching the net's constant coefficient (cos_type when none is constant).
inline PhiForm default_phi_form(const GuichardNet& net) {
    if (const auto ci = net.info().constant_index) {
        if (*ci == 0) {
            return PhiForm::cosh_l1_type;
        }
        if (*ci == 2) {
            return PhiForm::cosh_type;
        }
    }
    return PhiForm::cos_type;
}

/// phi from the coefficients. With positive coefficients the cos_type angle stays in (0, pi/2),
/// so atan2 needs no unwrapping.
inline double phi_from_coefficients(const Vec3& l, PhiForm form, const Point& p) {
    switch (form) {
    case PhiForm::cos_type:
        return std::atan2(l[2], l[0]);
    case PhiForm::cosh_type: {
        const double r = l[0] / l[1];
        if (!(std::abs(r) < 1.0)) {
            throw DomainError("|l1/l2| >= 1 at " + detail::format_point(p) + "; cosh_type angle undefined");
        }
        return std::atanh(r);
    }
    case PhiForm::cosh_l1_type: {
        const double r = l[2] / l[1];
        if (!(std::abs(r) < 1.0)) {
            throw DomainError("|l3/l2| >= 1 at " + detail::format_point(p) + "; cosh_l1_type angle undefined");
        }
        return std::atanh(r);
    }
    }
    return 0.0;
}

inline double phi_recover(const GuichardNet& net, const Point& p, PhiForm form) {
    return phi_from_coefficients(net.evaluate(p).l, form, p);
}

/// Gradient of phi from the exact (or net-supplied) coefficient derivatives.
inline Vec3 phi_gradient(const NetSample& s, PhiForm form) {
    const auto& l = s.l;
    const auto& dl = s.dl;
    Vec3 g{};
    for (std::size_t i = 0; i < 3; ++i) {
        switch (form) {
        case PhiForm::cos_type:
            g[i] = (l[0] * dl[2][i] - l[2] * dl[0][i]) / (l[0] * l[0] + l[2] * l[2]);
            break;
        case PhiForm::cosh_type:
            g[i] = (l[1] * dl[0][i] - l[0] * dl[1][i]) / (l[1] * l[1] - l[0] * l[0]);
            break;
        case PhiForm::cosh_l1_type:
            g[i] = (l[1] * dl[2][i] - l[2] * dl[1][i]) / (l[1] * l[1] - l[2] * l[2]);
            break;
        }
    }
    return g;
}

/// phi and its xi-derivatives at one point of a translation elliptic net.
struct PhiSample {
    double xi = 0.0;
    double phi = 0.0;
    double phi_xi = 0.0;
    double phi_xixi = 0.0;
    double l2 = 0.0;
};

inline constexpr double phi_second_derivative_step = 1e-3;

namespace detail {

inline double phi_xi_at(const GuichardNet& net, double xi) {
    const Vec3& a = require_alpha(net);
    const Point p = level_set_anchor(net, xi);
    const NetSample s = net.evaluate(p);
    const Vec3 g = phi_gradient(s, PhiForm::cos_type);
    // grad phi = phi_xi alpha
    return dot(g, a) / dot(a, a);
}

} // namespace detail

/// phi (cos_type) along the xi-axis; phi_xixi by a fourth-order central stencil on the exact phi_xi.
inline std::vector<PhiSample> phi_trajectory(const GuichardNet& net, const std::vector<double>& xi_samples) {
    detail::require_alpha(net);
    std::vector<PhiSample> out;
    out.reserve(xi_samples.size());
    const double h = phi_second_derivative_step;
    for (double xi : xi_samples) {
        const Point p = level_set_anchor(net, xi);
        const Vec3 l = net.evaluate(p).l;
        PhiSample s;
        s.xi = xi;
        s.phi = phi_from_coefficients(l, PhiForm::cos_type, p);
        s.phi_xi = detail::phi_xi_at(net, xi);
        s.phi_xixi = (8.0 * (detail::phi_xi_at(net, xi + h) - detail::phi_xi_at(net, xi - h)) -
                      (detail::phi_xi_at(net, xi + 2.0 * h) - detail::phi_xi_at(net, xi - 2.0 * h))) /
                     (12.0 * h);
        s.l2 = l[1];
        out.push_back(s);
    }
    return out;
}

/// Residuals of the phi equations along a translation elliptic net:
///   phi_l2      : phi_xi l2 - c, c the mean of phi_xi l2 over the samples;
///   phi_square  : phi_xi^2 - c (c2 cos^2 phi - c1);
///   phi_second  : phi_xixi + (c c2 / 2) sin 2 phi.
inline ResidualReport phi_ode_residuals(const GuichardNet& net, const std::vector<double>& xi_samples,
                                        double tol = 1e-7) {
    if (!net.info().translation_c) {
        throw UnsupportedError("phi equations apply to the translation family without constant coefficients");
    }
    if (xi_samples.empty()) {
        throw ValidationError("no xi samples");
    }
    const Vec3& cc = *net.info().translation_c;
    const auto traj = phi_trajectory(net, xi_samples);
    double c = 0.0;
    for (const auto& s : traj) {
        c += s.phi_xi * s.l2;
    }
    c /= static_cast<double>(traj.size());
    if (std::abs(c) < 1e-12) {
        throw ValidationError("phi is constant along xi (phi_xi l2 = 0); the phi equations need a nonconstant phi");
    }
    detail::Accumulator first;
    detail::Accumulator square;
    detail::Accumulator second;
    for (const auto& s : traj) {
        const Point at{s.xi, 0.0, 0.0};
        const double cs = std::cos(s.phi);
        first.add(s.phi_xi * s.l2 - c, at);
        square.add(s.phi_xi * s.phi_xi - c * (cc[1] * cs * cs - cc[0]), at);
        second.add(s.phi_xixi + 0.5 * c * cc[1] * std::sin(2.0 * s.phi), at);
    }
    return detail::assemble(
        {first.finish("phi_l2", tol), square.finish("phi_square", tol), second.finish("phi_second", tol)}, tol);
}

// ---------------------------------------------------------------------------
// Cyclicity
// ---------------------------------------------------------------------------

inline constexpr double cyclicity_threshold = 1e-9;
inline constexpr double cyclicity_relative_step = 1e-5;

enum class CyclicityVerdict { non_cyclic, cyclic_compatible, indeterminate };

inline const char* verdict_name(CyclicityVerdict v) {
    switch (v) {
    case CyclicityVerdict::non_cyclic: return "non_cyclic";
    case CyclicityVerdict::cyclic_compatible: return "cyclic_compatible";
    case CyclicityVerdict::indeterminate: return "indeterminate";
    }
    return "?";
}

struct MixedPartial {
    std::size_t i = 0;
    std::size_t j = 0;
    double max_abs = 0.0;
    double min_abs = 0.0;
    bool vanishes = false;
    bool relevant = false;
};

struct CyclicityReport {
    PhiForm form = PhiForm::cos_type;
    std::array<MixedPartial, 3> pairs{};
    CyclicityVerdict verdict = CyclicityVerdict::indeterminate;
};

/// Pairs whose mixed partials characterize cyclic nets for the given form: the pairs
/// containing the index of the coefficient playing the role of the hypotenuse.
inline std::array<std::array<std::size_t, 2>, 2> relevant_pairs(PhiForm form) {
    switch (form) {
    case PhiForm::cos_type: return {{{0, 1}, {1, 2}}};
    case PhiForm::cosh_type: return {{{0, 2}, {1, 2}}};
    case PhiForm::cosh_l1_type: return {{{0, 1}, {0, 2}}};
    }
    return {{{0, 1}, {1, 2}}};
}

inline CyclicityReport cyclicity_check(const GuichardNet& net, const std::vector<Point>& grid,
                                       std::optional<PhiForm> form_override = std::nullopt) {
    if (grid.empty()) {
        throw ValidationError("cyclicity grid is empty");
    }
    CyclicityReport rep;
    rep.form = form_override.value_or(default_phi_form(net));
    const Vec3 steps = net.difference_steps(cyclicity_relative_step);
    constexpr std::array<std::array<std::size_t, 2>, 3> all{{{0, 1}, {0, 2}, {1, 2}}};
    const auto rel = relevant_pairs(rep.form);
    for (std::size_t q = 0; q < 3; ++q) {
        rep.pairs[q].i = all[q][0];
        rep.pairs[q].j = all[q][1];
        rep.pairs[q].min_abs = std::numeric_limits<double>::infinity();
        rep.pairs[q].relevant = (all[q] == rel[0] || all[q] == rel[1]);
    }
    for (const Point& p : grid) {
        for (std::size_t q = 0; q < 3; ++q) {
            const std::size_t i = all[q][0];
            const std::size_t j = all[q][1];
            Point pp = p;
            Point pm = p;
            pp[j] += steps[j];
            pm[j] -= steps[j];
            const double gp = phi_gradient(net.evaluate_unchecked(pp), rep.form)[i];
            const double gm = phi_gradient(net.evaluate_unchecked(pm), rep.form)[i];
            const double v = std::abs((gp - gm) / (2.0 * steps[j]));
            rep.pairs[q].max_abs = std::max(rep.pairs[q].max_abs, v);
            rep.pairs[q].min_abs = std::min(rep.pairs[q].min_abs, v);
        }
    }
    bool all_vanish = true;
    bool all_nonzero = true;
    for (auto& mp : rep.pairs) {
        mp.vanishes = mp.max_abs < cyclicity_threshold;
        if (mp.relevant) {
            all_vanish = all_vanish && mp.vanishes;
            all_nonzero = all_nonzero && mp.min_abs >= cyclicity_threshold;
        }
    }
    rep.verdict = all_vanish ? CyclicityVerdict::cyclic_compatible
                             : (all_nonzero ? CyclicityVerdict::non_cyclic : CyclicityVerdict::indeterminate);
    return rep;
}

// ---------------------------------------------------------------------------
// Hypersurface metric and flat surfaces
// ---------------------------------------------------------------------------

using ConformalFactor = std::function<double(const Point&)>;

/// Diagonal entries e^{2P} l_i^2 of the induced hypersurface metric.
inline Vec3 hypersurface_metric(const GuichardNet& net, const ConformalFactor& P, const Point& p) {
    const Vec3 l = net.evaluate(p).l;
    const double w = P ? std::exp(2.0 * P(p)) : 1.0;
    Vec3 g{w * l[0] * l[0], w * l[1] * l[1], w * l[2] * l[2]};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(g[i] > 0.0) || !std::isfinite(g[i])) {
            throw DomainError("hypersurface metric not positive definite at " + detail::format_point(p));
        }
    }
    return g;
}

enum class Ambient { H3, S3 };

using Mat2 = std::array<std::array<double, 2>, 2>;

struct FundamentalFormsPair {
    Mat2 first{};
    Mat2 second{};
    Ambient ambient = Ambient::H3;

    double det_first() const noexcept { return first[0][0] * first[1][1] - first[0][1] * first[1][0]; }
    double det_second() const noexcept { return second[0][0] * second[1][1] - second[0][1] * second[1][0]; }
    /// det(II)/det(I).
    double extrinsic_curvature() const noexcept { return det_second() / det_first(); }
    /// Gauss equation: ambient sectional curvature plus the extrinsic term.
    double intrinsic_curvature() const noexcept {
        return (ambient == Ambient::H3 ? -1.0 : 1.0) + extrinsic_curvature();
    }
};

inline double one_constant_phi(const OneConstantFamily& f, double xi) {
    if (f.kind == OneConstantCase::b2) {
        return f.phi(xi);
    }
    return f.b * xi + f.xi0;
}

/// Fundamental forms of the flat surface attached to a case-c (H3) or case-b (S3) family,
/// at q = coordinates of the active pair.
inline FundamentalFormsPair flat_surface_forms(const OneConstantFamily& f, const std::array<double, 2>& q) {
    validate(f);
    const double xi = f.alpha[0] * q[0] + f.alpha[1] * q[1];
    const double psi = one_constant_phi(f, xi);
    FundamentalFormsPair out;
    switch (f.kind) {
    case OneConstantCase::c: {
        const double s = std::sinh(psi);
        const double c = std::cosh(psi);
        out.ambient = Ambient::H3;
        out.first = {{{s * s, 0.0}, {0.0, c * c}}};
        out.second = {{{s * c, 0.0}, {0.0, s * c}}};
        break;
    }
    case OneConstantCase::b1:
    case OneConstantCase::b2: {
        const double s = std::sin(psi);
        const double c = std::cos(psi);
        out.ambient = Ambient::S3;
        out.first = {{{s * s, 0.0}, {0.0, c * c}}};
        out.second = {{{s * c, 0.0}, {0.0, -s * c}}};
        break;
    }
    case OneConstantCase::a:
        throw UnsupportedError("flat surface forms exist for cases b (S3) and c (H3) only");
    }
    if (!(out.det_first() > 0.0)) {
        throw DomainError("first fundamental form degenerate at xi = " + std::to_string(xi));
    }
    return out;
}

/// Laplacian of (u, v) -> phi(alpha . (u, v)) by a five-point stencil of step h.
inline double flat_surface_phi_laplacian(const OneConstantFamily& f, const std::array<double, 2>& q,
                                         double h = 1e-3) {
    const auto at = [&](double u, double v) { return one_constant_phi(f, f.alpha[0] * u + f.alpha[1] * v); };
    const double c = at(q[0], q[1]);
    return (at(q[0] + h, q[1]) + at(q[0] - h, q[1]) + at(q[0], q[1] + h) + at(q[0], q[1] - h) - 4.0 * c) / (h * h);
}

} // namespace guichard

#pragma once

// Guichard nets and the residuals of Lamé's system (second-order form and the
// equivalent first-order system in the auxiliary functions h_ij).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "guichard/errors.hpp"
#include "guichard/types.hpp"

namespace guichard {

/// Metric coefficients and their first partials at a point; dl[i][j] = d l_i / d x_j.
struct NetSample {
    Vec3 l{};
    Mat3 dl{};
};

enum class DerivativeKind { exact, finite_difference };

struct DerivativeMode {
    DerivativeKind kind = DerivativeKind::exact;
    /// Absolute central-difference step per axis (finite_difference mode only).
    Vec3 step{};
};

inline constexpr double default_relative_step = 1e-5;
inline constexpr double default_second_order_relative_step = 1e-4;
inline constexpr double singularity_threshold = 1e-9;

/// Optional structure a net may carry beyond its evaluator.
struct NetInfo {
    std::string label;
    /// Direction alpha of a translation-invariant net, l = l(alpha . x).
    std::optional<Vec3> alpha;
    /// Basic invariant (xi or eta) as a function of the point.
    std::function<double(const Point&)> invariant;
    /// Index of the coefficient that is constant, if any.
    std::optional<std::size_t> constant_index;
    /// Constants c of l_i' = c_i l_j l_k for the translation family without constant coefficients.
    std::optional<Vec3> translation_c;
};

class GuichardNet {
public:
    using Evaluator = std::function<NetSample(const Point&)>;
    using CoefficientFunction = std::function<Vec3(const Point&)>;

    /// Net with closed-form derivatives.
    static GuichardNet exact(Box domain, Evaluator eval, NetInfo info = {}) {
        GuichardNet net;
        net.domain_ = domain;
        net.eval_ = std::move(eval);
        net.info_ = std::move(info);
        net.mode_.kind = DerivativeKind::exact;
        return net;
    }

    /// Net whose derivatives are central differences of the coefficients.
    /// A non-positive step selects the default 1e-5 * axis extent.
    static GuichardNet finite_difference(Box domain, CoefficientFunction coefficients, double step = 0.0,
                                         NetInfo info = {}) {
        GuichardNet net;
        net.domain_ = domain;
        net.info_ = std::move(info);
        net.mode_.kind = DerivativeKind::finite_difference;
        for (std::size_t a = 0; a < 3; ++a) {
            net.mode_.step[a] = step > 0.0 ? step : default_relative_step * domain.extent(a);
        }
        const Vec3 steps = net.mode_.step;
        net.eval_ = [coefficients = std::move(coefficients), steps](const Point& p) {
            NetSample s;
            s.l = coefficients(p);
            for (std::size_t j = 0; j < 3; ++j) {
                Point plus = p;
                Point minus = p;
                plus[j] += steps[j];
                minus[j] -= steps[j];
                const Vec3 lp = coefficients(plus);
                const Vec3 lm = coefficients(minus);
                for (std::size_t i = 0; i < 3; ++i) {
                    s.dl[i][j] = (lp[i] - lm[i]) / (2.0 * steps[j]);
                }
            }
            return s;
        };
        return net;
    }

    const Box& domain() const noexcept { return domain_; }
    const DerivativeMode& mode() const noexcept { return mode_; }
    const NetInfo& info() const noexcept { return info_; }

    NetSample evaluate(const Point& p) const {
        if (!domain_.contains(p)) {
            throw DomainError("point " + detail::format_point(p) + " outside the net domain");
        }
        return eval_(p);
    }

    /// Evaluation without the domain check, for difference stencils near the boundary.
    NetSample evaluate_unchecked(const Point& p) const { return eval_(p); }

    /// Same net on a different box (no validation of the new box).
    GuichardNet with_domain(Box domain) const {
        GuichardNet copy = *this;
        copy.domain_ = domain;
        return copy;
    }

    GuichardNet with_info(NetInfo info) const {
        GuichardNet copy = *this;
        copy.info_ = std::move(info);
        return copy;
    }

    /// Step used when differencing derived quantities along each axis.
    Vec3 difference_steps(double relative = default_relative_step) const {
        return {relative * domain_.extent(0), relative * domain_.extent(1), relative * domain_.extent(2)};
    }

private:
    GuichardNet() = default;

    Box domain_{};
    Evaluator eval_;
    DerivativeMode mode_{};
    NetInfo info_{};
};

/// h[i][j] = (d l_i / d x_j) / l_j for i != j; the diagonal is unused and set to 0.
struct HMatrix {
    Mat3 h{};
};

enum class FirstOrderFamily { A, B, C, D, E, F };
enum class SecondOrderFamily { lame1, lame2 };

inline const char* family_name(FirstOrderFamily f) {
    switch (f) {
    case FirstOrderFamily::A: return "A";
    case FirstOrderFamily::B: return "B";
    case FirstOrderFamily::C: return "C";
    case FirstOrderFamily::D: return "D";
    case FirstOrderFamily::E: return "E";
    case FirstOrderFamily::F: return "F";
    }
    return "?";
}

inline const char* family_name(SecondOrderFamily f) {
    return f == SecondOrderFamily::lame1 ? "lame1" : "lame2";
}

struct ResidualEntry {
    std::string family;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    Point worst_point{};
    bool pass = true;
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;
    double tolerance = 0.0;
    bool pass = true;

    const ResidualEntry* find(const std::string& family) const {
        for (const auto& e : entries) {
            if (e.family == family) {
                return &e;
            }
        }
        return nullptr;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& e : entries) {
            m = std::max(m, e.max_abs);
        }
        return m;
    }
};

/// All ordered triples (i, j, k) of distinct 0-based indices.
inline constexpr std::array<std::array<std::size_t, 3>, 6> distinct_triples{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

namespace detail {

inline void guard_coefficients(const Vec3& l, const Point& p) {
    for (std::size_t j = 0; j < 3; ++j) {
        if (!(std::abs(l[j]) >= singularity_threshold)) {
            throw SingularityError("metric coefficient l" + std::to_string(j + 1) + " = " + std::to_string(l[j]) +
                                       " vanishes at " + format_point(p),
                                   p);
        }
    }
}

inline HMatrix h_from_sample(const NetSample& s, const Point& p) {
    guard_coefficients(s.l, p);
    HMatrix m;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i != j) {
                m.h[i][j] = s.dl[i][j] / s.l[j];
            }
        }
    }
    return m;
}

/// Accumulates max/mean over grid points in evaluation order.
class Accumulator {
public:
    void add(double value, const Point& p) {
        const double a = std::abs(value);
        if (std::isnan(a)) {
            nan_ = true;
        }
        if (a > max_ || count_ == 0) {
            max_ = a;
            worst_ = p;
        }
        sum_ += a;
        ++count_;
    }

    ResidualEntry finish(std::string family, double tolerance) const {
        ResidualEntry e;
        e.family = std::move(family);
        e.max_abs = nan_ ? std::numeric_limits<double>::quiet_NaN() : max_;
        e.mean_abs = count_ ? sum_ / static_cast<double>(count_) : 0.0;
        e.worst_point = worst_;
        e.pass = !nan_ && max_ <= tolerance;
        return e;
    }

private:
    double max_ = 0.0;
    double sum_ = 0.0;
    std::size_t count_ = 0;
    Point worst_{};
    bool nan_ = false;
};

inline ResidualReport assemble(std::vector<ResidualEntry> entries, double tolerance) {
    ResidualReport r;
    r.tolerance = tolerance;
    r.pass = true;
    for (const auto& e : entries) {
        r.pass = r.pass && e.pass;
    }
    r.entries = std::move(entries);
    return r;
}

} // namespace detail

/// l1^2 - l2^2 + l3^2 at p.
inline double guichard_residual(const GuichardNet& net, const Point& p) {
    const Vec3 l = net.evaluate(p).l;
    return l[0] * l[0] - l[1] * l[1] + l[2] * l[2];
}

inline HMatrix h_from_l(const GuichardNet& net, const Point& p) {
    return detail::h_from_sample(net.evaluate(p), p);
}

/// First-order jet at a point: l, dl, h and dh[i][j][k] = d h_ij / d x_k.
struct FirstOrderJet {
    Vec3 l{};
    Mat3 dl{};
    Mat3 h{};
    std::array<Mat3, 3> dh{};
};

/// h derivatives by central differences with the given per-axis steps.
inline FirstOrderJet first_order_jet(const GuichardNet& net, const Point& p, const Vec3& steps) {
    FirstOrderJet jet;
    const NetSample s = net.evaluate_unchecked(p);
    jet.l = s.l;
    jet.dl = s.dl;
    jet.h = detail::h_from_sample(s, p).h;
    for (std::size_t k = 0; k < 3; ++k) {
        Point plus = p;
        Point minus = p;
        plus[k] += steps[k];
        minus[k] -= steps[k];
        const Mat3 hp = detail::h_from_sample(net.evaluate_unchecked(plus), plus).h;
        const Mat3 hm = detail::h_from_sample(net.evaluate_unchecked(minus), minus).h;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                jet.dh[i][j][k] = (hp[i][j] - hm[i][j]) / (2.0 * steps[k]);
            }
        }
    }
    return jet;
}

/// One equation of the first-order system for the index triple (i, j, k).
/// Families A and C ignore the order of (j, k); B uses (i, j).
inline double first_order_equation(const FirstOrderJet& q, FirstOrderFamily family, std::size_t i, std::size_t j,
                                   std::size_t k) {
    const auto& l = q.l;
    const auto& h = q.h;
    const auto dh = [&](std::size_t a, std::size_t b, std::size_t c) { return q.dh[a][b][c]; };
    const double ei = epsilon(i);
    const double ej = epsilon(j);
    const double ek = epsilon(k);
    switch (family) {
    case FirstOrderFamily::A:
        return ei * l[i] * l[i] + ej * l[j] * l[j] + ek * l[k] * l[k];
    case FirstOrderFamily::B:
        return q.dl[i][j] - h[i][j] * l[j];
    case FirstOrderFamily::C:
        return ei * q.dl[i][i] + ej * h[j][i] * l[j] + ek * h[k][i] * l[k];
    case FirstOrderFamily::D:
        return dh(i, j, k) - h[i][k] * h[k][j];
    case FirstOrderFamily::E:
        return dh(i, j, j) + dh(j, i, i) + h[i][k] * h[j][k];
    case FirstOrderFamily::F:
        return ei * dh(i, j, i) + ej * dh(j, i, j) + ek * h[k][i] * h[k][j];
    }
    return 0.0;
}

/// Uniform grid with a fractional inset from each face of the box.
inline std::vector<Point> sample_grid(const Box& box, std::array<std::size_t, 3> counts = {9, 9, 9},
                                      double inset = 0.05) {
    std::array<std::vector<double>, 3> axes;
    for (std::size_t a = 0; a < 3; ++a) {
        const double lo = box.axes[a].lo + inset * box.extent(a);
        const double hi = box.axes[a].hi - inset * box.extent(a);
        const std::size_t n = counts[a];
        for (std::size_t t = 0; t < n; ++t) {
            axes[a].push_back(n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(t) / (n - 1.0));
        }
    }
    std::vector<Point> grid;
    grid.reserve(counts[0] * counts[1] * counts[2]);
    for (double x1 : axes[0]) {
        for (double x2 : axes[1]) {
            for (double x3 : axes[2]) {
                grid.push_back({x1, x2, x3});
            }
        }
    }
    return grid;
}

/// Residuals of the first-order system (A)-(F) over every ordered triple of distinct indices.
/// `relative_step` scales the h-differencing step by each axis extent.
inline ResidualReport first_order_residuals(const GuichardNet& net, const std::vector<Point>& grid, double tol,
                                            double relative_step = default_relative_step) {
    if (grid.empty()) {
        throw ValidationError("residual grid is empty");
    }
    const Vec3 steps = net.difference_steps(relative_step);
    constexpr std::array<FirstOrderFamily, 6> families{FirstOrderFamily::A, FirstOrderFamily::B,
                                                       FirstOrderFamily::C, FirstOrderFamily::D,
                                                       FirstOrderFamily::E, FirstOrderFamily::F};
    std::array<detail::Accumulator, 6> acc;
    for (const Point& p : grid) {
        if (!net.domain().contains(p)) {
            throw DomainError("grid point " + detail::format_point(p) + " outside the net domain");
        }
        const FirstOrderJet jet = first_order_jet(net, p, steps);
        for (std::size_t f = 0; f < families.size(); ++f) {
            for (const auto& t : distinct_triples) {
                acc[f].add(first_order_equation(jet, families[f], t[0], t[1], t[2]), p);
            }
        }
    }
    std::vector<ResidualEntry> entries;
    for (std::size_t f = 0; f < families.size(); ++f) {
        entries.push_back(acc[f].finish(family_name(families[f]), tol));
    }
    return detail::assemble(std::move(entries), tol);
}

/// Residuals of the original second-order Lamé equations. Second derivatives are central
/// differences of the net's first derivatives with step `relative_step` * axis extent.
inline ResidualReport second_order_residuals(const GuichardNet& net, const std::vector<Point>& grid, double tol,
                                             double relative_step = default_second_order_relative_step) {
    if (grid.empty()) {
        throw ValidationError("residual grid is empty");
    }
    const Vec3 steps = net.difference_steps(relative_step);
    detail::Accumulator lame1;
    detail::Accumulator lame2;
    for (const Point& p : grid) {
        if (!net.domain().contains(p)) {
            throw DomainError("grid point " + detail::format_point(p) + " outside the net domain");
        }
        const NetSample s = net.evaluate_unchecked(p);
        detail::guard_coefficients(s.l, p);
        std::array<NetSample, 3> plus;
        std::array<NetSample, 3> minus;
        for (std::size_t a = 0; a < 3; ++a) {
            Point pp = p;
            Point pm = p;
            pp[a] += steps[a];
            pm[a] -= steps[a];
            plus[a] = net.evaluate_unchecked(pp);
            minus[a] = net.evaluate_unchecked(pm);
            detail::guard_coefficients(plus[a].l, pp);
            detail::guard_coefficients(minus[a].l, pm);
        }
        const auto& l = s.l;
        const auto& dl = s.dl;
        for (const auto& t : distinct_triples) {
            const std::size_t i = t[0];
            const std::size_t j = t[1];
            const std::size_t k = t[2];
            // l_{i,x_j x_k}
            const double lijk = (plus[k].dl[i][j] - minus[k].dl[i][j]) / (2.0 * steps[k]);
            lame1.add(lijk - dl[i][j] * dl[j][k] / l[j] - dl[i][k] * dl[k][j] / l[k], p);

            // (l_{i,x_j}/l_j)_{,x_j} + (l_{j,x_i}/l_i)_{,x_i} + l_{i,x_k} l_{j,x_k} / l_k^2
            const double qj = (plus[j].dl[i][j] / plus[j].l[j] - minus[j].dl[i][j] / minus[j].l[j]) / (2.0 * steps[j]);
            const double qi = (plus[i].dl[j][i] / plus[i].l[i] - minus[i].dl[j][i] / minus[i].l[i]) / (2.0 * steps[i]);
            lame2.add(qj + qi + dl[i][k] * dl[j][k] / (l[k] * l[k]), p);
        }
    }
    return detail::assemble({lame1.finish(family_name(SecondOrderFamily::lame1), tol),
                             lame2.finish(family_name(SecondOrderFamily::lame2), tol)},
                            tol);
}

/// Net with constant coefficients (the trivial solution when they satisfy the Guichard condition).
inline GuichardNet constant_net(const Vec3& l, const Box& domain) {
    NetInfo info;
    info.label = "constant";
    return GuichardNet::exact(
        domain,
        [l](const Point&) {
            NetSample s;
            s.l = l;
            return s;
        },
        std::move(info));
}

} // namespace guichard

#pragma once

// Group-invariant solutions of Lamé's system with the Guichard condition:
//  - translation-invariant l(xi), xi = alpha . x, with no constant coefficient
//    (coupled system l_i' = c_i l_j l_k, Jacobi elliptic in closed form);
//  - translation-invariant families with exactly one constant coefficient;
//  - translation-dilation invariant families l(eta), eta = (a . x) / (b . x).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "guichard/elliptic.hpp"
#include "guichard/errors.hpp"
#include "guichard/lame_core.hpp"
#include "guichard/types.hpp"

namespace guichard {

// ---------------------------------------------------------------------------
// Translation-invariant family with no constant coefficient
// ---------------------------------------------------------------------------

struct TranslationConstants {
    Vec3 alpha{};
    Vec3 c{};
    double lambda = 0.0;
    double l1_0 = 1.0;
    /// Sign of l1'(0); under the positive branch it must equal sign(c1).
    std::optional<int> sign_l1prime;
};

inline constexpr double translation_step = 1e-4;
inline constexpr double admissible_l_squared = 1e-12;

namespace detail {

inline double relation_scale(std::initializer_list<double> terms) {
    double s = 0.0;
    for (double t : terms) {
        s += std::abs(t);
    }
    return std::max(s, 1.0);
}

/// l2(0)^2 and l3(0)^2 from l1(0) and the conserved quantity lambda.
inline std::array<double, 2> initial_squares(const TranslationConstants& tc) {
    const double c1 = tc.c[0];
    const double c2 = tc.c[1];
    const double y0 = tc.l1_0 * tc.l1_0;
    const double l2sq = (c2 / c1) * (y0 - tc.lambda / c2);
    const double l3sq = ((c2 - c1) / c1) * (y0 - tc.lambda / (c2 - c1));
    return {l2sq, l3sq};
}

} // namespace detail

/// Throws ValidationError naming every violated relation. With `require_alpha` false only the
/// relations of the ODE in xi are checked (alpha plays no role there).
inline void validate(const TranslationConstants& tc, bool require_alpha = true) {
    std::vector<std::string> problems;
    const auto& c = tc.c;
    const auto& a = tc.alpha;
    if (c[0] == 0.0 || c[1] == 0.0 || c[2] == 0.0) {
        problems.emplace_back("all c_i must be nonzero");
    }
    if (require_alpha && a[0] == 0.0 && a[1] == 0.0 && a[2] == 0.0) {
        problems.emplace_back("alpha must be nonzero");
    }
    const double r1 = c[0] - c[1] + c[2];
    if (std::abs(r1) > 1e-12 * detail::relation_scale({c[0], c[1], c[2]})) {
        problems.emplace_back("c1 - c2 + c3 = 0 violated (value " + std::to_string(r1) + ")");
    }
    const double t1 = a[0] * a[0] * c[1] * c[2];
    const double t2 = a[1] * a[1] * c[0] * c[2];
    const double t3 = a[2] * a[2] * c[0] * c[1];
    if (require_alpha && std::abs(t1 + t2 + t3) > 1e-12 * detail::relation_scale({t1, t2, t3})) {
        problems.emplace_back("alpha1^2 c2 c3 + alpha2^2 c1 c3 + alpha3^2 c1 c2 = 0 violated (value " +
                              std::to_string(t1 + t2 + t3) + ")");
    }
    if (!(tc.l1_0 > 0.0)) {
        problems.emplace_back("l1(0) must be positive");
    }
    if (problems.empty()) {
        const auto sq = detail::initial_squares(tc);
        if (!(sq[0] > 0.0)) {
            problems.emplace_back("l2(0)^2 = (c2/c1)(l1(0)^2 - lambda/c2) must be positive (value " +
                                  std::to_string(sq[0]) + ")");
        }
        if (!(sq[1] > 0.0)) {
            problems.emplace_back("l3(0)^2 = ((c2-c1)/c1)(l1(0)^2 - lambda/(c2-c1)) must be positive (value " +
                                  std::to_string(sq[1]) + ")");
        }
        if (tc.sign_l1prime) {
            const int s = *tc.sign_l1prime;
            if (s != 1 && s != -1) {
                problems.emplace_back("sign_l1prime must be +1 or -1");
            } else if ((c[0] > 0.0) != (s > 0)) {
                problems.emplace_back("sign_l1prime must equal sign(c1), since l1'(0) = c1 l2(0) l3(0) with "
                                      "positive l2, l3");
            }
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid translation constants:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ValidationError(msg);
    }
}

/// Right-hand side of l_i' = c_i l_j l_k.
inline Vec3 translation_rhs(const Vec3& c, const Vec3& l) noexcept {
    return {c[0] * l[1] * l[2], c[1] * l[0] * l[2], c[2] * l[0] * l[1]};
}

namespace detail {

inline Vec3 rk4_step(const Vec3& c, const Vec3& l, double h) noexcept {
    const auto add = [](const Vec3& x, const Vec3& d, double s) {
        return Vec3{x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]};
    };
    const Vec3 k1 = translation_rhs(c, l);
    const Vec3 k2 = translation_rhs(c, add(l, k1, 0.5 * h));
    const Vec3 k3 = translation_rhs(c, add(l, k2, 0.5 * h));
    const Vec3 k4 = translation_rhs(c, add(l, k3, h));
    Vec3 out;
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = l[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

inline bool admissible(const Vec3& l) noexcept {
    for (double v : l) {
        if (!(v > 0.0) || v * v < admissible_l_squared) {
            return false;
        }
    }
    return true;
}

/// Integrates from xi = 0 in direction `dir` (+1/-1) for at most `max_steps` steps.
/// Stops before the first inadmissible node. Returns nodes excluding xi = 0.
inline std::vector<Vec3> integrate_branch(const Vec3& c, const Vec3& l0, double h, int dir, std::size_t max_steps) {
    std::vector<Vec3> nodes;
    nodes.reserve(max_steps);
    Vec3 l = l0;
    for (std::size_t n = 0; n < max_steps; ++n) {
        const Vec3 next = rk4_step(c, l, dir * h);
        if (!admissible(next)) {
            break;
        }
        nodes.push_back(next);
        l = next;
    }
    return nodes;
}

} // namespace detail

enum class ShrinkPolicy {
    /// Throw DomainShrunkError if the requested xi-range leaves the positive-metric region.
    error,
    /// Clip the range to the admissible interval.
    clip,
};

/// Dense RK4 table of l(xi) with cubic Hermite interpolation; immutable after construction.
class TranslationProfile {
public:
    TranslationProfile(const TranslationConstants& tc, Interval xi_range, ShrinkPolicy policy,
                       double step = translation_step)
        : tc_(tc), step_(step) {
        validate(tc);
        if (!(xi_range.lo <= 0.0 && xi_range.hi >= 0.0 && xi_range.lo < xi_range.hi)) {
            throw ValidationError("xi_range must contain 0 and have positive length");
        }
        const auto sq = detail::initial_squares(tc);
        const Vec3 l0{tc.l1_0, std::sqrt(sq[0]), std::sqrt(sq[1])};

        const auto steps_for = [&](double len) { return static_cast<std::size_t>(std::ceil(len / step_ - 1e-9)); };
        const std::size_t n_back = steps_for(-xi_range.lo);
        const std::size_t n_fwd = steps_for(xi_range.hi);
        auto back = detail::integrate_branch(tc.c, l0, step_, -1, n_back);
        auto fwd = detail::integrate_branch(tc.c, l0, step_, +1, n_fwd);

        first_index_ = -static_cast<long>(back.size());
        nodes_.reserve(back.size() + fwd.size() + 1);
        for (auto it = back.rbegin(); it != back.rend(); ++it) {
            nodes_.push_back(*it);
        }
        nodes_.push_back(l0);
        for (const auto& v : fwd) {
            nodes_.push_back(v);
        }

        const Interval table{first_index_ * step_, (first_index_ + static_cast<long>(nodes_.size()) - 1) * step_};
        const bool short_back = back.size() < n_back && table.lo > xi_range.lo;
        const bool short_fwd = fwd.size() < n_fwd && table.hi < xi_range.hi;
        if ((short_back || short_fwd) && policy == ShrinkPolicy::error) {
            std::ostringstream os;
            os.precision(17);
            os << "metric coefficients leave the positive region inside the requested xi-range [" << xi_range.lo
               << ", " << xi_range.hi << "]; admissible sub-interval is [" << table.lo << ", " << table.hi << "]";
            throw DomainShrunkError(os.str(), table.lo, table.hi);
        }
        interval_ = {std::max(xi_range.lo, table.lo), std::min(xi_range.hi, table.hi)};
        table_interval_ = table;

        check_nondegenerate();
        richardson_error_ = richardson_estimate(l0);
    }

    const TranslationConstants& constants() const noexcept { return tc_; }
    /// Interval over which the family is defined (requested range, possibly clipped).
    Interval xi_interval() const noexcept { return interval_; }
    /// Interval covered by admissible integration nodes.
    Interval table_interval() const noexcept { return table_interval_; }
    double step() const noexcept { return step_; }
    double richardson_error() const noexcept { return richardson_error_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    double node_xi(std::size_t n) const noexcept { return (first_index_ + static_cast<long>(n)) * step_; }
    const Vec3& node(std::size_t n) const noexcept { return nodes_[n]; }

    /// l(xi) by cubic Hermite interpolation; nodal derivatives come from the ODE itself.
    Vec3 l(double xi) const {
        if (nodes_.size() == 1) {
            return nodes_.front();
        }
        const double s = xi / step_ - static_cast<double>(first_index_);
        long n = static_cast<long>(std::floor(s));
        n = std::clamp(n, 0L, static_cast<long>(nodes_.size()) - 2);
        const double t = s - static_cast<double>(n);
        const Vec3& y0 = nodes_[static_cast<std::size_t>(n)];
        const Vec3& y1 = nodes_[static_cast<std::size_t>(n) + 1];
        const Vec3 d0 = translation_rhs(tc_.c, y0);
        const Vec3 d1 = translation_rhs(tc_.c, y1);
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        Vec3 out;
        for (std::size_t i = 0; i < 3; ++i) {
            out[i] = h00 * y0[i] + h10 * step_ * d0[i] + h01 * y1[i] + h11 * step_ * d1[i];
        }
        return out;
    }

    /// dl/dxi = c_i l_j l_k at the interpolated l.
    Vec3 dl_dxi(double xi) const { return translation_rhs(tc_.c, l(xi)); }

private:
    void check_nondegenerate() const {
        for (std::size_t i = 0; i < 3; ++i) {
            bool moving = false;
            for (const auto& v : nodes_) {
                if (std::abs(translation_rhs(tc_.c, v)[i]) >= 1e-12) {
                    moving = true;
                    break;
                }
            }
            if (!moving) {
                throw ValidationError("l" + std::to_string(i + 1) +
                                      " is constant on the whole range; use a one-constant family");
            }
        }
    }

    /// Max difference between step h and step h/2 at the shared nodes, scaled by 16/15.
    double richardson_estimate(const Vec3& l0) const {
        double err = 0.0;
        const double half = 0.5 * step_;
        for (int dir : {-1, 1}) {
            Vec3 coarse = l0;
            Vec3 fine = l0;
            const long count = dir > 0 ? static_cast<long>(nodes_.size()) - 1 + first_index_ : -first_index_;
            for (long n = 0; n < count; ++n) {
                fine = detail::rk4_step(tc_.c, detail::rk4_step(tc_.c, fine, dir * half), dir * half);
                coarse = nodes_[static_cast<std::size_t>(-first_index_ + dir * (n + 1))];
                for (std::size_t i = 0; i < 3; ++i) {
                    err = std::max(err, std::abs(coarse[i] - fine[i]));
                }
            }
        }
        return err * 16.0 / 15.0;
    }

    TranslationConstants tc_;
    double step_;
    long first_index_ = 0;
    std::vector<Vec3> nodes_;
    Interval interval_{};
    Interval table_interval_{};
    double richardson_error_ = 0.0;
};

class TranslationFamily {
public:
    explicit TranslationFamily(std::shared_ptr<const TranslationProfile> profile) : profile_(std::move(profile)) {}

    const TranslationProfile& profile() const noexcept { return *profile_; }
    const TranslationConstants& constants() const noexcept { return profile_->constants(); }
    Interval xi_interval() const noexcept { return profile_->xi_interval(); }

    /// Box whose image under xi = alpha . x lies inside the family's xi-interval.
    Box default_box() const {
        const Vec3& a = constants().alpha;
        const Interval iv = xi_interval();
        const double a2 = dot(a, a);
        const double l1 = std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]);
        const double w = 0.999 * 0.5 * iv.length() / l1;
        Box box;
        for (std::size_t s = 0; s < 3; ++s) {
            const double centre = iv.mid() * a[s] / a2;
            box.axes[s] = {centre - w, centre + w};
        }
        return box;
    }

    GuichardNet net() const { return net(default_box()); }

    /// Net on a user box; every corner must map into the xi-interval.
    GuichardNet net(const Box& box) const {
        const Vec3 alpha = constants().alpha;
        const Interval iv = xi_interval();
        for (unsigned m = 0; m < 8; ++m) {
            const double xi = dot(alpha, box.corner(m));
            if (xi < iv.lo - 1e-12 || xi > iv.hi + 1e-12) {
                throw DomainError("box corner " + detail::format_point(box.corner(m)) + " maps to xi = " +
                                  std::to_string(xi) + " outside the family's xi-interval");
            }
        }
        NetInfo info;
        info.label = "translation";
        info.alpha = alpha;
        info.translation_c = constants().c;
        info.invariant = [alpha](const Point& p) { return dot(alpha, p); };
        auto profile = profile_;
        return GuichardNet::exact(
            box,
            [profile, alpha](const Point& p) {
                const double xi = dot(alpha, p);
                NetSample s;
                s.l = profile->l(xi);
                const Vec3 d = translation_rhs(profile->constants().c, s.l);
                for (std::size_t i = 0; i < 3; ++i) {
                    for (std::size_t j = 0; j < 3; ++j) {
                        s.dl[i][j] = alpha[j] * d[i];
                    }
                }
                return s;
            },
            std::move(info));
    }

private:
    std::shared_ptr<const TranslationProfile> profile_;
};

inline TranslationFamily build_translation_family(const TranslationConstants& tc, Interval xi_range,
                                                  ShrinkPolicy policy = ShrinkPolicy::error) {
    return TranslationFamily(std::make_shared<const TranslationProfile>(tc, xi_range, policy));
}

/// I12 = c2 l1^2 - c1 l2^2, I13 = c3 l1^2 - c1 l3^2, I23 = c3 l2^2 - c2 l3^2 at xi.
inline std::array<double, 3> conserved_quantities(const TranslationFamily& family, double xi) {
    const Vec3& c = family.constants().c;
    const Vec3 l = family.profile().l(xi);
    const double s1 = l[0] * l[0];
    const double s2 = l[1] * l[1];
    const double s3 = l[2] * l[2];
    return {c[1] * s1 - c[0] * s2, c[2] * s1 - c[0] * s3, c[2] * s2 - c[1] * s3};
}

/// c2 (c2 - c1) (l1^2 - lambda/c2) (l1^2 - lambda/(c2 - c1)).
inline double quartic_rhs(const TranslationConstants& tc, double l1) {
    const double c1 = tc.c[0];
    const double c2 = tc.c[1];
    const double y = l1 * l1;
    return c2 * (c2 - c1) * (y - tc.lambda / c2) * (y - tc.lambda / (c2 - c1));
}

// ---------------------------------------------------------------------------
// Closed form of l1 through Jacobi sn
// ---------------------------------------------------------------------------
//
// With y = l1^2 the quartic becomes y'^2 = 4 kappa y (y - A)(y - B),
// kappa = c2 (c2 - c1), A = lambda / c2, B = lambda / (c2 - c1). Sorting the
// roots {0, A, B} as r1 < r2 < r3:
//   kappa > 0, y in [r1, r2]:  y = r1 + (r2 - r1) sn^2(mu xi + u0, k),
//                              k^2 = (r2 - r1)/(r3 - r1), mu^2 = kappa (r3 - r1);
//   kappa < 0, y in [r2, r3]:  y = r3 - (r3 - r2) sn^2(mu xi + u0, k),
//                              k^2 = (r3 - r2)/(r3 - r1), mu^2 = -kappa (r3 - r1).
// The remaining bands are unbounded and not reduced. For lambda = 0 the ODE is
// separable: l1 = l1(0) / (1 - s sqrt(kappa) l1(0) xi), s = sign l1'(0).

enum class EllipticRegime {
    lower_band,    ///< kappa > 0, l1^2 oscillates in [r1, r2]
    upper_band,    ///< kappa < 0, l1^2 oscillates in [r2, r3]
    separable,     ///< lambda = 0
    unbounded,     ///< l1^2 outside both bounded bands
};

struct EllipticReduction {
    EllipticRegime regime = EllipticRegime::unbounded;
    double modulus = 0.0;
    double mu = 0.0;
    double phase = 0.0;
    std::array<double, 3> roots{};
};

namespace detail {

/// u in [0, K] with sn(u, k) = s, for 0 <= s <= 1.
inline double inverse_sn(double s, double k) {
    const double K = elliptic::complete_K(k);
    double lo = 0.0;
    double hi = K;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * K; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (elliptic::jacobi_scd(mid, k).sn < s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

inline EllipticReduction elliptic_reduction(const TranslationConstants& tc) {
    validate(tc, false);
    EllipticReduction r;
    const double c1 = tc.c[0];
    const double c2 = tc.c[1];
    const double kappa = c2 * (c2 - c1);
    const double y0 = tc.l1_0 * tc.l1_0;
    const int sign = tc.sign_l1prime.value_or(c1 > 0.0 ? 1 : -1);
    if (tc.lambda == 0.0) {
        r.regime = EllipticRegime::separable;
        r.mu = std::sqrt(std::abs(kappa));
        return r;
    }
    std::array<double, 3> roots{0.0, tc.lambda / c2, tc.lambda / (c2 - c1)};
    std::sort(roots.begin(), roots.end());
    r.roots = roots;
    const double r1 = roots[0];
    const double r2 = roots[1];
    const double r3 = roots[2];
    if (kappa > 0.0 && y0 >= r1 && y0 <= r2) {
        r.regime = EllipticRegime::lower_band;
        r.modulus = std::sqrt((r2 - r1) / (r3 - r1));
        r.mu = std::sqrt(kappa * (r3 - r1));
        const double s0 = std::sqrt(std::clamp((y0 - r1) / (r2 - r1), 0.0, 1.0));
        r.phase = sign * detail::inverse_sn(s0, r.modulus);
    } else if (kappa < 0.0 && y0 >= r2 && y0 <= r3) {
        r.regime = EllipticRegime::upper_band;
        r.modulus = std::sqrt((r3 - r2) / (r3 - r1));
        r.mu = std::sqrt(-kappa * (r3 - r1));
        const double s0 = std::sqrt(std::clamp((r3 - y0) / (r3 - r2), 0.0, 1.0));
        r.phase = -sign * detail::inverse_sn(s0, r.modulus);
    } else {
        r.regime = EllipticRegime::unbounded;
    }
    return r;
}

inline double closed_form_l1(const TranslationConstants& tc, double xi) {
    const EllipticReduction r = elliptic_reduction(tc);
    const int sign = tc.sign_l1prime.value_or(tc.c[0] > 0.0 ? 1 : -1);
    switch (r.regime) {
    case EllipticRegime::separable: {
        const double kappa = tc.c[1] * (tc.c[1] - tc.c[0]);
        if (!(kappa > 0.0)) {
            throw UnsupportedError("lambda = 0 requires c2 (c2 - c1) > 0");
        }
        const double denom = 1.0 - sign * r.mu * tc.l1_0 * xi;
        if (!(denom > 0.0)) {
            throw DomainError("separable closed form blows up before xi = " + std::to_string(xi));
        }
        return tc.l1_0 / denom;
    }
    case EllipticRegime::lower_band: {
        const double sn = elliptic::jacobi_scd(r.mu * xi + r.phase, r.modulus).sn;
        return std::sqrt(std::max(0.0, r.roots[0] + (r.roots[1] - r.roots[0]) * sn * sn));
    }
    case EllipticRegime::upper_band: {
        const double sn = elliptic::jacobi_scd(r.mu * xi + r.phase, r.modulus).sn;
        return std::sqrt(std::max(0.0, r.roots[2] - (r.roots[2] - r.roots[1]) * sn * sn));
    }
    case EllipticRegime::unbounded:
        break;
    }
    throw UnsupportedError("l1(0)^2 lies outside the bounded bands of the quartic; use the integrator");
}

// ---------------------------------------------------------------------------
// Translation-invariant families with one constant coefficient
// ---------------------------------------------------------------------------

enum class OneConstantCase {
    a,   ///< l1 = lambda, l2 = lambda cosh(phi), l3 = lambda sinh(phi), xi = a2 x2 + a3 x3
    b1,  ///< l2 = lambda, l1 = lambda cos(phi), l3 = lambda sin(phi), phi linear, a1^2 != a3^2
    b2,  ///< as b1 with a1^2 = a3^2 and arbitrary phi
    c,   ///< l3 = lambda, l2 = lambda cosh(phi), l1 = lambda sinh(phi), xi = a1 x1 + a2 x2
};

struct OneConstantFamily {
    OneConstantCase kind = OneConstantCase::a;
    double lambda = 1.0;
    double b = 1.0;
    double xi0 = 0.0;
    /// The two active components of alpha, in ascending axis order.
    std::array<double, 2> alpha{1.0, 1.0};
    /// Case b2 only: phi(xi) and its derivative.
    std::function<double(double)> phi;
    std::function<double(double)> phi_prime;
};

/// Axes carrying the active alpha pair, and the index of the constant coefficient.
inline std::array<std::size_t, 2> active_axes(OneConstantCase kind) {
    switch (kind) {
    case OneConstantCase::a: return {1, 2};
    case OneConstantCase::b1:
    case OneConstantCase::b2: return {0, 2};
    case OneConstantCase::c: return {0, 1};
    }
    return {0, 1};
}

inline std::size_t constant_index(OneConstantCase kind) {
    switch (kind) {
    case OneConstantCase::a: return 0;
    case OneConstantCase::b1:
    case OneConstantCase::b2: return 1;
    case OneConstantCase::c: return 2;
    }
    return 0;
}

inline Vec3 full_alpha(const OneConstantFamily& f) {
    Vec3 a{};
    const auto axes = active_axes(f.kind);
    a[axes[0]] = f.alpha[0];
    a[axes[1]] = f.alpha[1];
    return a;
}

/// l and dl/dphi as functions of the angle for each one-constant shape.
struct AngleShape {
    Vec3 l;
    Vec3 dl_dphi;
};

inline AngleShape hyperbolic_shape_l1_constant(double lambda, double phi) {
    return {{lambda, lambda * std::cosh(phi), lambda * std::sinh(phi)},
            {0.0, lambda * std::sinh(phi), lambda * std::cosh(phi)}};
}

inline AngleShape circular_shape_l2_constant(double lambda, double phi) {
    return {{lambda * std::cos(phi), lambda, lambda * std::sin(phi)},
            {-lambda * std::sin(phi), 0.0, lambda * std::cos(phi)}};
}

inline AngleShape hyperbolic_shape_l3_constant(double lambda, double phi) {
    return {{lambda * std::sinh(phi), lambda * std::cosh(phi), lambda},
            {lambda * std::cosh(phi), lambda * std::sinh(phi), 0.0}};
}

inline AngleShape angle_shape(std::size_t constant, double lambda, double phi) {
    switch (constant) {
    case 0: return hyperbolic_shape_l1_constant(lambda, phi);
    case 1: return circular_shape_l2_constant(lambda, phi);
    default: return hyperbolic_shape_l3_constant(lambda, phi);
    }
}

inline void validate(const OneConstantFamily& f) {
    if (f.lambda == 0.0) {
        throw ValidationError("lambda must be nonzero");
    }
    if (f.alpha[0] == 0.0 && f.alpha[1] == 0.0) {
        throw ValidationError("the active alpha pair must not vanish");
    }
    const double d = f.alpha[0] * f.alpha[0] - f.alpha[1] * f.alpha[1];
    const double tol = 1e-12 * (f.alpha[0] * f.alpha[0] + f.alpha[1] * f.alpha[1]);
    if (f.kind == OneConstantCase::b1 && std::abs(d) <= tol) {
        throw ValidationError("case b1 requires alpha1^2 != alpha3^2; use case b2 for alpha1^2 = alpha3^2");
    }
    if (f.kind == OneConstantCase::b2) {
        if (std::abs(d) > tol) {
            throw ValidationError("case b2 requires alpha1^2 = alpha3^2");
        }
        if (!f.phi || !f.phi_prime) {
            throw ValidationError("case b2 requires a user phi and its derivative");
        }
    }
}

namespace detail {

inline Interval image_of_box(const Vec3& alpha, const Box& box) {
    Interval iv{dot(alpha, box.corner(0)), dot(alpha, box.corner(0))};
    for (unsigned m = 1; m < 8; ++m) {
        const double v = dot(alpha, box.corner(m));
        iv.lo = std::min(iv.lo, v);
        iv.hi = std::max(iv.hi, v);
    }
    return iv;
}

} // namespace detail

inline GuichardNet build_one_constant_family(const OneConstantFamily& f, const Box& domain) {
    validate(f);
    const Vec3 alpha = full_alpha(f);
    const std::size_t fixed = constant_index(f.kind);
    std::function<double(double)> phi = f.phi;
    std::function<double(double)> dphi = f.phi_prime;
    if (f.kind != OneConstantCase::b2) {
        phi = [b = f.b, xi0 = f.xi0](double xi) { return b * xi + xi0; };
        dphi = [b = f.b](double) { return b; };
    }

    // positivity over the image of the box (xi is linear, sampled densely)
    const Interval iv = detail::image_of_box(alpha, domain);
    constexpr int samples = 2001;
    for (int n = 0; n < samples; ++n) {
        const double xi = iv.lo + iv.length() * n / (samples - 1.0);
        const Vec3 l = angle_shape(fixed, f.lambda, phi(xi)).l;
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(l[i] > 0.0)) {
                std::ostringstream os;
                os.precision(17);
                os << "l" << (i + 1) << " = " << l[i] << " is not positive at xi = " << xi
                   << " (xi ranges over [" << iv.lo << ", " << iv.hi << "] on the domain)";
                throw DomainError(os.str());
            }
        }
    }

    NetInfo info;
    info.label = "one_constant";
    info.alpha = alpha;
    info.invariant = [alpha](const Point& p) { return dot(alpha, p); };
    info.constant_index = fixed;
    const double lambda = f.lambda;
    return GuichardNet::exact(
        domain,
        [alpha, fixed, lambda, phi, dphi](const Point& p) {
            const double xi = dot(alpha, p);
            const AngleShape s = angle_shape(fixed, lambda, phi(xi));
            const double dp = dphi(xi);
            NetSample out;
            out.l = s.l;
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) {
                    out.dl[i][j] = s.dl_dphi[i] * dp * alpha[j];
                }
            }
            return out;
        },
        std::move(info));
}

// ---------------------------------------------------------------------------
// Translation-dilation invariant families, eta = (a . x) / (b . x)
// ---------------------------------------------------------------------------

enum class DilationCase {
    a,   ///< (a1, b1) = (0, 0): l = lambda (1, cosh phi, sinh phi), arctan profile
    b1,  ///< (a2, b2) = (0, 0), b1 = b3: l = lambda (cos phi, 1, sin phi), log profile
    b2,  ///< (a2, b2) = (0, 0), b1 != b3: log of a ratio
    c,   ///< (a3, b3) = (0, 0): l = lambda (sinh phi, cosh phi, 1), arctan profile
};

struct DilationConstants {
    DilationCase kind = DilationCase::a;
    Vec3 a{};
    Vec3 b{};
    double lambda = 1.0;
    /// Amplitude and offset of phi: (C0, C1), (D0, D1), (D2, D3) or (E0, E1) by case.
    double amplitude = 1.0;
    double offset = 0.0;
};

inline std::size_t constant_index(DilationCase kind) {
    switch (kind) {
    case DilationCase::a: return 0;
    case DilationCase::b1:
    case DilationCase::b2: return 1;
    case DilationCase::c: return 2;
    }
    return 0;
}

inline void validate(const DilationConstants& d) {
    const Vec3& a = d.a;
    const Vec3& b = d.b;
    const Vec3 cross{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    if (norm(cross) <= 1e-12 * std::max(1.0, norm(a) * norm(b))) {
        throw ValidationError("a and b must be linearly independent");
    }
    if (d.lambda == 0.0) {
        throw ValidationError("lambda must be nonzero");
    }
    const std::size_t zero = constant_index(d.kind);
    if (a[zero] != 0.0 || b[zero] != 0.0) {
        throw ValidationError("this case requires (a" + std::to_string(zero + 1) + ", b" + std::to_string(zero + 1) +
                              ") = (0, 0)");
    }
    if (d.kind == DilationCase::b1 && b[0] != b[2]) {
        throw ValidationError("case b1 requires b1 = b3");
    }
    if (d.kind == DilationCase::b2 && b[0] == b[2]) {
        throw ValidationError("case b2 requires b1 != b3");
    }
}

/// phi(eta) of a dilation family with its first derivative.
class DilationProfile {
public:
    explicit DilationProfile(const DilationConstants& d) : d_(d) { validate(d); }

    const DilationConstants& constants() const noexcept { return d_; }

    double beta(const Point& x) const noexcept { return dot(d_.b, x); }
    double eta(const Point& x) const noexcept { return dot(d_.a, x) / dot(d_.b, x); }
    /// N_i = a_i - b_i eta, so that d eta / d x_i = N_i / beta.
    double n(std::size_t i, double eta) const noexcept { return d_.a[i] - d_.b[i] * eta; }

    double phi(double eta) const {
        const auto& a = d_.a;
        const auto& b = d_.b;
        switch (d_.kind) {
        case DilationCase::a: {
            const double det = a[1] * b[2] - a[2] * b[1];
            const double s = b[1] * b[1] + b[2] * b[2];
            const double m = (a[1] * b[1] + a[2] * b[2]) / s;
            return d_.amplitude / det * std::atan(s / (a[2] * b[1] - a[1] * b[2]) * (eta - m)) + d_.offset;
        }
        case DilationCase::c: {
            const double det = a[1] * b[0] - a[0] * b[1];
            const double s = b[0] * b[0] + b[1] * b[1];
            const double m = (a[1] * b[1] + a[0] * b[0]) / s;
            return d_.amplitude / det * std::atan(s / det * (eta - m)) + d_.offset;
        }
        case DilationCase::b1: {
            const double bb = b[0];
            return d_.amplitude / (2.0 * bb * (a[2] - a[0])) * std::log(2.0 * bb * eta - a[0] - a[2]) + d_.offset;
        }
        case DilationCase::b2: {
            const double num = (b[2] + b[0]) * eta - (a[2] + a[0]);
            const double den = (b[2] - b[0]) * eta - (a[2] - a[0]);
            return d_.amplitude / (2.0 * (a[0] * b[2] - a[2] * b[0])) * std::log(num / den) + d_.offset;
        }
        }
        return 0.0;
    }

    double dphi(double eta) const {
        const auto& a = d_.a;
        const auto& b = d_.b;
        switch (d_.kind) {
        case DilationCase::a: {
            const double det = a[1] * b[2] - a[2] * b[1];
            const double s = b[1] * b[1] + b[2] * b[2];
            const double m = (a[1] * b[1] + a[2] * b[2]) / s;
            const double g = s / (a[2] * b[1] - a[1] * b[2]);
            const double t = g * (eta - m);
            return d_.amplitude / det * g / (1.0 + t * t);
        }
        case DilationCase::c: {
            const double det = a[1] * b[0] - a[0] * b[1];
            const double s = b[0] * b[0] + b[1] * b[1];
            const double m = (a[1] * b[1] + a[0] * b[0]) / s;
            const double g = s / det;
            const double t = g * (eta - m);
            return d_.amplitude / det * g / (1.0 + t * t);
        }
        case DilationCase::b1: {
            const double bb = b[0];
            return d_.amplitude / (2.0 * bb * (a[2] - a[0])) * (2.0 * bb) / (2.0 * bb * eta - a[0] - a[2]);
        }
        case DilationCase::b2: {
            const double num = (b[2] + b[0]) * eta - (a[2] + a[0]);
            const double den = (b[2] - b[0]) * eta - (a[2] - a[0]);
            return d_.amplitude / (2.0 * (a[0] * b[2] - a[2] * b[0])) * ((b[2] + b[0]) / num - (b[2] - b[0]) / den);
        }
        }
        return 0.0;
    }

    /// True when every formula is defined and every coefficient positive at x.
    bool admissible_at(const Point& x) const {
        const double bx = beta(x);
        if (!(std::abs(bx) > 1e-12)) {
            return false;
        }
        const double e = eta(x);
        const auto& a = d_.a;
        const auto& b = d_.b;
        if (d_.kind == DilationCase::b1 && !(2.0 * b[0] * e - a[0] - a[2] > 0.0)) {
            return false;
        }
        if (d_.kind == DilationCase::b2) {
            const double num = (b[2] + b[0]) * e - (a[2] + a[0]);
            const double den = (b[2] - b[0]) * e - (a[2] - a[0]);
            if (!(num / den > 0.0) || !std::isfinite(num / den)) {
                return false;
            }
        }
        const Vec3 l = angle_shape(constant_index(d_.kind), d_.lambda, phi(e)).l;
        return l[0] > 0.0 && l[1] > 0.0 && l[2] > 0.0 && std::isfinite(l[0] + l[1] + l[2]);
    }

private:
    DilationConstants d_;
};

namespace detail {

/// Linear forms whose sign must stay constant on the box for the case's formulas to be defined.
inline std::vector<Vec3> dilation_linear_forms(const DilationConstants& d) {
    std::vector<Vec3> forms{d.b};
    const auto combo = [&](double sa, double sb) {
        return Vec3{sa * d.a[0] - sb * d.b[0], sa * d.a[1] - sb * d.b[1], sa * d.a[2] - sb * d.b[2]};
    };
    if (d.kind == DilationCase::b1) {
        forms.push_back(combo(2.0 * d.b[0], d.a[0] + d.a[2]));
    } else if (d.kind == DilationCase::b2) {
        forms.push_back(combo(d.b[2] + d.b[0], d.a[2] + d.a[0]));
        forms.push_back(combo(d.b[2] - d.b[0], d.a[2] - d.a[0]));
    }
    return forms;
}

inline bool dilation_box_valid(const DilationProfile& profile, const Box& box) {
    for (const Vec3& form : dilation_linear_forms(profile.constants())) {
        int sign = 0;
        for (unsigned m = 0; m < 8; ++m) {
            const double v = dot(form, box.corner(m));
            const int s = v > 1e-12 ? 1 : (v < -1e-12 ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign)) {
                return false;
            }
            sign = s;
        }
    }
    for (const Point& p : sample_grid(box, {9, 9, 9}, 0.0)) {
        if (!profile.admissible_at(p)) {
            return false;
        }
    }
    return true;
}

inline Box scaled_about_centre(const Box& box, double scale) {
    Box out;
    for (std::size_t a = 0; a < 3; ++a) {
        const double c = box.axes[a].mid();
        const double h = 0.5 * scale * box.extent(a);
        out.axes[a] = {c - h, c + h};
    }
    return out;
}

} // namespace detail

/// Largest box concentric with `box` (scaled uniformly) on which the family is defined.
inline std::optional<Box> dilation_admissible_sub_box(const DilationConstants& d, const Box& box) {
    const DilationProfile profile(d);
    if (detail::dilation_box_valid(profile, box)) {
        return box;
    }
    if (!profile.admissible_at(box.center())) {
        return std::nullopt;
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::dilation_box_valid(profile, detail::scaled_about_centre(box, mid))) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (lo <= 0.0) {
        return std::nullopt;
    }
    return detail::scaled_about_centre(box, lo);
}

inline GuichardNet build_dilation_family(const DilationConstants& d, const Box& domain) {
    auto profile = std::make_shared<const DilationProfile>(d);
    if (!detail::dilation_box_valid(*profile, domain)) {
        std::ostringstream os;
        os.precision(17);
        os << "dilation family undefined on the box (beta, log argument or coefficient sign changes)";
        if (const auto sub = dilation_admissible_sub_box(d, domain)) {
            os << "; largest concentric admissible sub-box: [" << sub->axes[0].lo << ", " << sub->axes[0].hi
               << "] x [" << sub->axes[1].lo << ", " << sub->axes[1].hi << "] x [" << sub->axes[2].lo << ", "
               << sub->axes[2].hi << "]";
        }
        throw DomainError(os.str());
    }
    const std::size_t fixed = constant_index(d.kind);
    NetInfo info;
    info.label = "dilation";
    info.invariant = [profile](const Point& p) { return profile->eta(p); };
    info.constant_index = fixed;
    return GuichardNet::exact(
        domain,
        [profile, fixed](const Point& p) {
            const double beta = profile->beta(p);
            const double eta = profile->eta(p);
            const AngleShape s = angle_shape(fixed, profile->constants().lambda, profile->phi(eta));
            const double dp = profile->dphi(eta);
            NetSample out;
            out.l = s.l;
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) {
                    out.dl[i][j] = s.dl_dphi[i] * dp * profile->n(j, eta) / beta;
                }
            }
            return out;
        },
        std::move(info));
}

} // namespace guichard

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "guichard/geometry.hpp"

using namespace guichard;

namespace {

const double sqrt3 = std::sqrt(3.0);

TranslationConstants example_constants() { return {{sqrt3, 1.0, 2.0}, {1.0, -1.0, -2.0}, -4.0, 1.0, std::nullopt}; }

const TranslationFamily& example_family() {
    static const TranslationFamily fam = build_translation_family(example_constants(), {-0.29, 0.36});
    return fam;
}

GuichardNet example_net() { return example_family().net(); }

/// xi values whose level sets cross the default box near its centre.
std::vector<double> inner_xis(int n = 25) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) {
        xs.push_back(-0.2 + 0.48 * i / (n - 1));
    }
    return xs;
}

/// Fourth-order central difference of f along axis k at p.
template <class F>
double d4(const F& f, Point p, std::size_t k, double h) {
    const auto at = [&](double s) {
        Point q = p;
        q[k] += s;
        return f(q);
    };
    return (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
}

/// Gaussian curvature of x_i = const from the intrinsic metric only:
/// K = -(1/(l_j l_k)) [ d_j(d_j l_k / l_j) + d_k(d_k l_j / l_k) ].
double intrinsic_curvature_fd(const GuichardNet& net, std::size_t i, const Point& p) {
    const auto [j, k] = others(i);
    const double h = 1e-3;
    const auto l = [&](const Point& q) { return net.evaluate_unchecked(q).l; };
    const auto inner_j = [&](const Point& q) {
        return d4([&](const Point& r) { return l(r)[k]; }, q, j, h) / l(q)[j];
    };
    const auto inner_k = [&](const Point& q) {
        return d4([&](const Point& r) { return l(r)[j]; }, q, k, h) / l(q)[k];
    };
    const Vec3 lp = l(p);
    return -(d4(inner_j, p, j, h) + d4(inner_k, p, k, h)) / (lp[j] * lp[k]);
}

/// Minus the divergence of the unit normal of the level sets of alpha . x.
double minus_div_normal_fd(const GuichardNet& net, const Point& p) {
    const Vec3 a = *net.info().alpha;
    const auto flux = [&](std::size_t k) {
        return [&net, a, k](const Point& q) {
            const Vec3 l = net.evaluate_unchecked(q).l;
            double g2 = 0.0;
            for (std::size_t s = 0; s < 3; ++s) {
                g2 += a[s] * a[s] / (l[s] * l[s]);
            }
            return l[0] * l[1] * l[2] * a[k] / (l[k] * l[k] * std::sqrt(g2));
        };
    };
    const double h = 1e-3;
    double div = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        div += d4(flux(k), p, k, h);
    }
    const Vec3 l = net.evaluate(p).l;
    return -div / (l[0] * l[1] * l[2]);
}

OneConstantFamily family_of(OneConstantCase kind, double b, std::array<double, 2> alpha, double xi0 = 0.0) {
    OneConstantFamily f;
    f.kind = kind;
    f.lambda = 1.0;
    f.b = b;
    f.xi0 = xi0;
    f.alpha = alpha;
    return f;
}

} // namespace

// ---------------------------------------------------------------------------
// Christoffel symbols and coordinate surfaces
// ---------------------------------------------------------------------------

TEST(Christoffel, SymmetricInLowerIndices) {
    const auto net = example_net();
    const auto g = christoffel(net, net.domain().center());
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                EXPECT_DOUBLE_EQ(g[k][i][j], g[k][j][i]);
            }
        }
    }
}

TEST(Christoffel, MetricCompatible) {
    const auto net = example_net();
    for (const Point& p : sample_grid(net.domain(), {3, 3, 3})) {
        EXPECT_LT(metric_compatibility_residual(net, p), 1e-6);
    }
}

TEST(Christoffel, VanishOnConstantNet) {
    const Box box{{Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}}};
    const auto g = christoffel(constant_net({1.0, std::sqrt(2.0), 1.0}, box), {0.5, 0.5, 0.5});
    for (const auto& m : g) {
        for (const auto& row : m) {
            for (double v : row) {
                EXPECT_EQ(v, 0.0);
            }
        }
    }
}

TEST(CoordinateSurfaces, ExampleCurvaturesAreConstant) {
    const auto net = example_net();
    for (const Point& p : sample_grid(net.domain(), {4, 4, 4})) {
        const Vec3 K = coordinate_surface_curvatures(net, p);
        EXPECT_NEAR(K[0], 6.0, 1e-9);
        EXPECT_NEAR(K[1], -2.0, 1e-9);
        EXPECT_NEAR(K[2], -4.0, 1e-9);
        EXPECT_LT(std::abs(K[0] + K[1] + K[2]), 1e-10);
    }
}

TEST(CoordinateSurfaces, AgreeWithIntrinsicCurvature) {
    const auto net = example_net();
    const Point p = level_set_anchor(net, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(coordinate_surface_curvature(net, i, p), intrinsic_curvature_fd(net, i, p), 1e-6) << i;
    }
}

TEST(CoordinateSurfaces, AgreeWithIntrinsicCurvatureOnDilationNet) {
    const DilationConstants d{DilationCase::b1, {0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}, 1.0, 1.0, 0.9};
    const Box box{{Interval{0.1, 0.5}, Interval{-1.0, 1.0}, Interval{1.0, 2.0}}};
    const auto net = build_dilation_family(d, box);
    const Vec3 K = coordinate_surface_curvatures(net, box.center());
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(K[i], intrinsic_curvature_fd(net, i, box.center()), 1e-6) << i;
    }
    EXPECT_LT(std::abs(K[0] + K[1] + K[2]), 1e-10);
}

TEST(CoordinateSurfaces, ZeroOnConstantNet) {
    const Box box{{Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}}};
    const Vec3 K = coordinate_surface_curvatures(constant_net({1.0, std::sqrt(2.0), 1.0}, box), {0.2, 0.3, 0.4});
    EXPECT_EQ(K[0], 0.0);
    EXPECT_EQ(K[1], 0.0);
    EXPECT_EQ(K[2], 0.0);
}

TEST(CoordinateSurfaces, FiniteDifferenceNetAgrees) {
    const auto& fam = example_family();
    const auto exact = fam.net();
    const Vec3 a = example_constants().alpha;
    const auto fd = GuichardNet::finite_difference(exact.domain(),
                                                   [&fam, a](const Point& p) { return fam.profile().l(dot(a, p)); });
    const Point p = exact.domain().center();
    const Vec3 Ke = coordinate_surface_curvatures(exact, p);
    const Vec3 Kf = coordinate_surface_curvatures(fd, p);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(Ke[i], Kf[i], 1e-6);
    }
}

TEST(CoordinateSurfaces, BadIndexRejected) {
    const auto net = example_net();
    EXPECT_THROW(coordinate_surface_curvature(net, 3, net.domain().center()), ValidationError);
}

// ---------------------------------------------------------------------------
// Level surfaces
// ---------------------------------------------------------------------------

TEST(LevelSurface, GradientNormAtOrigin) {
    const auto net = example_net();
    EXPECT_NEAR(level_surface_grad_norm(net, level_set_anchor(net, 0.0)), std::sqrt(16.0 / 3.0), 1e-13);
}

TEST(LevelSurface, MeanCurvatureMatchesDivergenceOracle) {
    const auto net = example_net();
    for (double xi : {-0.15, 0.0, 0.2}) {
        const Point p = level_set_anchor(net, xi);
        EXPECT_NEAR(level_surface_mean_curvature_at(net, p), minus_div_normal_fd(net, p), 1e-6) << xi;
    }
}

TEST(LevelSurface, MeanCurvatureAtOrigin) {
    const auto net = example_net();
    const auto t = level_surface_mean_curvature_terms(net, level_set_anchor(net, 0.0));
    const double r2 = std::sqrt(2.0);
    EXPECT_NEAR(t.total(), 2.0 * r2, 1e-12);
    EXPECT_NEAR(t.laplacian_term, 8.0 * r2 / 3.0, 1e-12);
    EXPECT_NEAR(t.normal_term, -2.0 * r2 / 3.0, 1e-12);
    EXPECT_NEAR(level_surface_mean_curvature(net, 0.0), 2.0 * r2, 1e-12);
}

TEST(LevelSurface, MeanCurvatureConstantOnLevelSet) {
    const auto net = example_net();
    for (double xi : {-0.1, 0.0, 0.15}) {
        std::vector<double> H;
        for (const Point& p : level_set_points(net, xi, 50, 7)) {
            EXPECT_NEAR(dot(*net.info().alpha, p), xi, 1e-12);
            H.push_back(level_surface_mean_curvature_at(net, p));
        }
        EXPECT_LT(sample_variance(H), 1e-18) << xi;
    }
}

TEST(LevelSurface, PointsAreDeterministic) {
    const auto net = example_net();
    const auto a = level_set_points(net, 0.05, 10, 42);
    const auto b = level_set_points(net, 0.05, 10, 42);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, level_set_points(net, 0.05, 10, 43));
}

TEST(LevelSurface, FrameIsOrthonormal) {
    const Vec3 a = example_constants().alpha;
    const auto f = level_set_frame(a);
    EXPECT_NEAR(dot(f[0], f[0]), 1.0, 1e-15);
    EXPECT_NEAR(dot(f[1], f[1]), 1.0, 1e-15);
    EXPECT_NEAR(dot(f[0], f[1]), 0.0, 1e-15);
    EXPECT_NEAR(dot(f[0], a), 0.0, 1e-15);
    EXPECT_NEAR(dot(f[1], a), 0.0, 1e-15);
}

TEST(LevelSurface, NeedsTranslationNet) {
    const Box box{{Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}}};
    EXPECT_THROW(level_surface_grad_norm(constant_net({1.0, std::sqrt(2.0), 1.0}, box), {0.5, 0.5, 0.5}),
                 UnsupportedError);
}

TEST(LevelSurface, LevelOutsideBoxRejected) {
    EXPECT_THROW(level_set_anchor(example_net(), 5.0), DomainError);
}

TEST(Statistics, PopulationVariance) {
    EXPECT_DOUBLE_EQ(sample_mean({1.0, 2.0, 3.0}), 2.0);
    EXPECT_DOUBLE_EQ(sample_variance({1.0, 2.0, 3.0}), 2.0 / 3.0);
}

// ---------------------------------------------------------------------------
// The angle function
// ---------------------------------------------------------------------------

TEST(Phi, RecoveredOnCaseB) {
    const auto f = family_of(OneConstantCase::b1, 1.5, {1.0, 0.5}, 0.1);
    const Box box{{Interval{0.3, 0.5}, Interval{-1.0, 1.0}, Interval{0.3, 0.5}}};
    const auto net = build_one_constant_family(f, box);
    EXPECT_EQ(default_phi_form(net), PhiForm::cos_type);
    for (const Point& p : sample_grid(box, {3, 3, 3})) {
        const double xi = p[0] + 0.5 * p[2];
        EXPECT_NEAR(phi_recover(net, p, PhiForm::cos_type), 1.5 * xi + 0.1, 1e-14);
    }
}

TEST(Phi, RecoveredOnCasesAAndC) {
    const Box box_a{{Interval{-1.0, 1.0}, Interval{0.1, 0.6}, Interval{0.1, 0.6}}};
    const auto na = build_one_constant_family(family_of(OneConstantCase::a, 2.0, {1.0, 1.0}), box_a);
    EXPECT_EQ(default_phi_form(na), PhiForm::cosh_l1_type);
    const Point pa{0.0, 0.3, 0.2};
    EXPECT_NEAR(phi_recover(na, pa, PhiForm::cosh_l1_type), 1.0, 1e-13);

    const Box box_c{{Interval{0.1, 0.6}, Interval{0.1, 0.6}, Interval{-1.0, 1.0}}};
    const auto nc = build_one_constant_family(family_of(OneConstantCase::c, 2.0, {1.0, 0.5}), box_c);
    EXPECT_EQ(default_phi_form(nc), PhiForm::cosh_type);
    const Point pc{0.2, 0.4, 0.0};
    EXPECT_NEAR(phi_recover(nc, pc, PhiForm::cosh_type), 0.8, 1e-13);
}

TEST(Phi, HyperbolicFormOutsideRangeRejected) {
    EXPECT_THROW(phi_from_coefficients({2.0, 1.0, 1.0}, PhiForm::cosh_type, {0.0, 0.0, 0.0}), DomainError);
    EXPECT_THROW(phi_from_coefficients({1.0, 1.0, 2.0}, PhiForm::cosh_l1_type, {0.0, 0.0, 0.0}), DomainError);
}

TEST(Phi, GradientMatchesFiniteDifference) {
    const auto net = example_net();
    const Point p = net.domain().center();
    const Vec3 g = phi_gradient(net.evaluate(p), PhiForm::cos_type);
    for (std::size_t k = 0; k < 3; ++k) {
        const double fd = d4([&](const Point& q) { return phi_recover(net, q, PhiForm::cos_type); }, p, k, 1e-3);
        EXPECT_NEAR(g[k], fd, 1e-9);
    }
}

TEST(Phi, TranslationNetSatisfiesAngleEquations) {
    const auto rep = phi_ode_residuals(example_net(), inner_xis());
    EXPECT_TRUE(rep.pass) << rep.max_abs();
    EXPECT_LT(rep.find("phi_l2")->max_abs, 1e-7);
    EXPECT_LT(rep.find("phi_square")->max_abs, 1e-7);
    EXPECT_LT(rep.find("phi_second")->max_abs, 1e-7);
}

TEST(Phi, ProductWithL2IsLambda) {
    for (const auto& s : phi_trajectory(example_net(), inner_xis(9))) {
        EXPECT_NEAR(s.phi_xi * s.l2, -4.0, 1e-9) << s.xi;
    }
}

TEST(Phi, LeastSquaresRecoversC) {
    // phi_xi^2 / lambda = a cos^2 phi - b should give a = c2, b = c1.
    const auto traj = phi_trajectory(example_net(), inner_xis(40));
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& s : traj) {
        const double x = std::cos(s.phi) * std::cos(s.phi);
        const double y = s.phi_xi * s.phi_xi / -4.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(traj.size());
    const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double b = -(sy - a * sx) / n;
    EXPECT_NEAR(a, -1.0, 1e-6);
    EXPECT_NEAR(b, 1.0, 1e-6);
}

TEST(Phi, EquationsNeedTranslationConstants) {
    const Box box{{Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}}};
    EXPECT_THROW(phi_ode_residuals(constant_net({1.0, std::sqrt(2.0), 1.0}, box), {0.0}), UnsupportedError);
}

// ---------------------------------------------------------------------------
// Cyclicity
// ---------------------------------------------------------------------------

TEST(Cyclicity, TranslationNetIsNotCyclic) {
    const auto net = example_net();
    const auto rep = cyclicity_check(net, sample_grid(net.domain(), {4, 4, 4}));
    EXPECT_EQ(rep.form, PhiForm::cos_type);
    EXPECT_EQ(rep.verdict, CyclicityVerdict::non_cyclic);
    EXPECT_TRUE(rep.pairs[0].relevant);
    EXPECT_FALSE(rep.pairs[1].relevant);
    EXPECT_TRUE(rep.pairs[2].relevant);
}

TEST(Cyclicity, LinearPhiIsCompatible) {
    const Box box{{Interval{-1.0, 1.0}, Interval{0.1, 0.6}, Interval{0.1, 0.6}}};
    const auto net = build_one_constant_family(family_of(OneConstantCase::a, 2.0, {1.0, 1.0}), box);
    const auto rep = cyclicity_check(net, sample_grid(box, {4, 4, 4}));
    EXPECT_EQ(rep.form, PhiForm::cosh_l1_type);
    EXPECT_EQ(rep.verdict, CyclicityVerdict::cyclic_compatible);
}

TEST(Cyclicity, MixedPairsGiveIndeterminate) {
    const DilationConstants d{DilationCase::a, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, 1.0, 1.0, 0.0};
    const Box box{{Interval{-1.0, 1.0}, Interval{-2.0, -0.5}, Interval{1.0, 2.0}}};
    const auto net = build_dilation_family(d, box);
    const auto rep = cyclicity_check(net, sample_grid(box, {4, 4, 4}), PhiForm::cos_type);
    EXPECT_TRUE(rep.pairs[0].vanishes);
    EXPECT_FALSE(rep.pairs[2].vanishes);
    EXPECT_EQ(rep.verdict, CyclicityVerdict::indeterminate);
}

TEST(Cyclicity, VerdictNames) {
    EXPECT_STREQ(verdict_name(CyclicityVerdict::non_cyclic), "non_cyclic");
    EXPECT_STREQ(verdict_name(CyclicityVerdict::cyclic_compatible), "cyclic_compatible");
    EXPECT_STREQ(verdict_name(CyclicityVerdict::indeterminate), "indeterminate");
}

// ---------------------------------------------------------------------------
// Hypersurface metric and flat surfaces
// ---------------------------------------------------------------------------

TEST(Hypersurface, ConformalScaling) {
    const auto net = example_net();
    const Point p = level_set_anchor(net, 0.0);
    const Vec3 g0 = hypersurface_metric(net, nullptr, p);
    const Vec3 g1 = hypersurface_metric(net, [](const Point&) { return 0.5; }, p);
    EXPECT_NEAR(g0[0], 1.0, 1e-14);
    EXPECT_NEAR(g0[1], 3.0, 1e-14);
    EXPECT_NEAR(g0[2], 2.0, 1e-14);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(g1[i], std::exp(1.0) * g0[i], 1e-13);
    }
}

TEST(FlatSurface, HyperbolicCase) {
    const auto f = family_of(OneConstantCase::c, 1.0, {1.0, 0.0});
    const auto forms = flat_surface_forms(f, {1.0, 0.7});
    EXPECT_EQ(forms.ambient, Ambient::H3);
    EXPECT_NEAR(forms.first[0][0], std::sinh(1.0) * std::sinh(1.0), 1e-15);
    EXPECT_NEAR(forms.first[1][1], std::cosh(1.0) * std::cosh(1.0), 1e-15);
    EXPECT_NEAR(forms.extrinsic_curvature(), 1.0, 1e-12);
    EXPECT_NEAR(forms.intrinsic_curvature(), 0.0, 1e-10);
}

TEST(FlatSurface, SphericalCase) {
    const auto f = family_of(OneConstantCase::b1, 1.5, {1.0, 0.5}, 0.1);
    const auto forms = flat_surface_forms(f, {0.4, 0.3});
    EXPECT_EQ(forms.ambient, Ambient::S3);
    EXPECT_NEAR(forms.extrinsic_curvature(), -1.0, 1e-12);
    EXPECT_NEAR(forms.intrinsic_curvature(), 0.0, 1e-10);
}

TEST(FlatSurface, IntrinsicallyFlatAlongFamily) {
    const auto f = family_of(OneConstantCase::c, 2.0, {1.0, 0.5});
    for (double u : {0.1, 0.3, 0.6}) {
        for (double v : {0.2, 0.5}) {
            EXPECT_NEAR(flat_surface_forms(f, {u, v}).intrinsic_curvature(), 0.0, 1e-10);
        }
    }
}

TEST(FlatSurface, CaseAUnsupported) {
    EXPECT_THROW(flat_surface_forms(family_of(OneConstantCase::a, 1.0, {1.0, 1.0}), {0.1, 0.1}), UnsupportedError);
}

TEST(FlatSurface, PhiLaplacian) {
    EXPECT_NEAR(flat_surface_phi_laplacian(family_of(OneConstantCase::c, 2.0, {1.0, 0.5}), {0.3, 0.4}), 0.0, 1e-6);
    OneConstantFamily f = family_of(OneConstantCase::b2, 0.0, {1.0, 1.0});
    f.phi = [](double x) { return x * x; };
    f.phi_prime = [](double x) { return 2.0 * x; };
    EXPECT_NEAR(flat_surface_phi_laplacian(f, {0.3, 0.4}), 4.0, 1e-6);
}

#pragma once

// Transforming a net by the point symmetries: translations and dilations of
// the independent variables, dilation of the dependent variables.

#include <variant>

#include "guichard/errors.hpp"
#include "guichard/lame_core.hpp"
#include "guichard/types.hpp"

namespace guichard::sym {

struct Translate {
    Vec3 v{};
};

struct DilateX {
    double lambda = 1.0;
};

struct DilateL {
    double rho = 1.0;
};

using GroupAction = std::variant<Translate, DilateX, DilateL>;

/// The image net: l~(x) = l(x - v), l~(x) = l(x / lambda) or l~ = rho l.
inline GuichardNet transform_net(const GuichardNet& net, const GroupAction& action) {
    const Box src = net.domain();
    if (const auto* t = std::get_if<Translate>(&action)) {
        Box dst;
        for (std::size_t a = 0; a < 3; ++a) {
            dst.axes[a] = {src.axes[a].lo + t->v[a], src.axes[a].hi + t->v[a]};
        }
        const Vec3 v = t->v;
        NetInfo info = net.info();
        info.label += "+translate";
        if (info.invariant) {
            info.invariant = [inv = info.invariant, v](const Point& p) {
                return inv({p[0] - v[0], p[1] - v[1], p[2] - v[2]});
            };
        }
        return GuichardNet::exact(
            dst, [net, v](const Point& p) { return net.evaluate_unchecked({p[0] - v[0], p[1] - v[1], p[2] - v[2]}); },
            std::move(info));
    }
    if (const auto* d = std::get_if<DilateX>(&action)) {
        const double lam = d->lambda;
        if (lam == 0.0) {
            throw ValidationError("dilation factor must be nonzero");
        }
        Box dst;
        for (std::size_t a = 0; a < 3; ++a) {
            const double x0 = lam * src.axes[a].lo;
            const double x1 = lam * src.axes[a].hi;
            dst.axes[a] = {std::min(x0, x1), std::max(x0, x1)};
        }
        NetInfo info = net.info();
        info.label += "+dilate_x";
        if (info.alpha) {
            for (double& a : *info.alpha) {
                a /= lam;
            }
        }
        if (info.invariant) {
            info.invariant = [inv = info.invariant, lam](const Point& p) {
                return inv({p[0] / lam, p[1] / lam, p[2] / lam});
            };
        }
        return GuichardNet::exact(
            dst,
            [net, lam](const Point& p) {
                NetSample s = net.evaluate_unchecked({p[0] / lam, p[1] / lam, p[2] / lam});
                for (auto& row : s.dl) {
                    for (double& v : row) {
                        v /= lam;
                    }
                }
                return s;
            },
            std::move(info));
    }
    const double rho = std::get<DilateL>(action).rho;
    if (rho == 0.0) {
        throw ValidationError("dilation factor must be nonzero");
    }
    NetInfo info = net.info();
    info.label += "+dilate_l";
    return GuichardNet::exact(
        src,
        [net, rho](const Point& p) {
            NetSample s = net.evaluate_unchecked(p);
            for (std::size_t i = 0; i < 3; ++i) {
                s.l[i] *= rho;
                for (double& v : s.dl[i]) {
                    v *= rho;
                }
            }
            return s;
        },
        std::move(info));
}

/// First-order residuals of the transformed net on a grid over its (transformed) box.
inline ResidualReport group_action_test(const GuichardNet& net, const GroupAction& action, double tol = 1e-8,
                                        std::array<std::size_t, 3> counts = {9, 9, 9}) {
    const GuichardNet image = transform_net(net, action);
    return first_order_residuals(image, sample_grid(image.domain(), counts), tol);
}

} // namespace guichard::sym

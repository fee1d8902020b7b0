#pragma once

// Formal and total derivatives, point-symmetry vector fields on (x, l, h)
// space and their first prolongation.

#include <array>
#include <cstddef>

#include "guichard/errors.hpp"
#include "guichard/symmetry/expression.hpp"

namespace guichard::sym {

inline Poly differentiate(const Poly& p, AtomId atom) { return p.partial(atom); }

inline Expression differentiate(const Expression& e, AtomId atom) {
    return from_poly(to_poly(e).partial(atom));
}

/// D_i = d/dx_i + sum_j l_{j,x_i} d/dl_j + sum_{j != m} h_{jm,x_i} d/dh_jm, on functions of (x, l, h, params).
inline Poly total_derivative(const Poly& p, std::size_t i) {
    if (i > 2) {
        throw ValidationError("total derivative index must be 0, 1 or 2");
    }
    if (p.contains_jet()) {
        throw UnsupportedError("total derivative of an expression containing jet atoms needs second-order jets");
    }
    Poly out = p.partial(x_atom(i));
    for (std::size_t j = 0; j < 3; ++j) {
        const Poly d = p.partial(l_atom(j));
        if (!d.is_zero()) {
            out += d * Poly::atom(l_jet(j, i));
        }
    }
    for (const auto& pr : h_pairs) {
        const Poly d = p.partial(h_atom(pr[0], pr[1]));
        if (!d.is_zero()) {
            out += d * Poly::atom(h_jet(pr[0], pr[1], i));
        }
    }
    return out;
}

inline Expression total_derivative(const Expression& e, std::size_t i) {
    return from_poly(total_derivative(to_poly(e), i));
}

/// V = sum xi^i d/dx_i + sum eta^i d/dl_i + sum phi^{ij} d/dh_ij.
struct VectorField {
    std::array<Poly, 3> xi{};
    std::array<Poly, 3> eta{};
    /// phi[i][j] for i != j; the diagonal is unused.
    std::array<std::array<Poly, 3>, 3> phi{};
};

/// xi^i = a x_i + a_i, eta^i = c l_i, phi^{ij} = -a h_ij with symbolic a, c, a_i.
inline VectorField theorem_field() {
    VectorField v;
    for (std::size_t i = 0; i < 3; ++i) {
        v.xi[i] = Poly::atom(param_a) * Poly::atom(x_atom(i)) + Poly::atom(param_ai(i));
        v.eta[i] = Poly::atom(param_c) * Poly::atom(l_atom(i));
    }
    for (const auto& pr : h_pairs) {
        v.phi[pr[0]][pr[1]] = -(Poly::atom(param_a) * Poly::atom(h_atom(pr[0], pr[1])));
    }
    return v;
}

/// First prolongation: the field's coefficients on every atom, jets included.
struct ProlongedField {
    std::array<Poly, atom_count> coefficient{};
};

inline ProlongedField prolong_first(const VectorField& v) {
    ProlongedField pr;
    std::array<std::array<Poly, 3>, 3> dxi;  // dxi[r][k] = D_k xi^r
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t k = 0; k < 3; ++k) {
            dxi[r][k] = total_derivative(v.xi[r], k);
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        pr.coefficient[x_atom(i)] = v.xi[i];
        pr.coefficient[l_atom(i)] = v.eta[i];
        for (std::size_t k = 0; k < 3; ++k) {
            Poly c = total_derivative(v.eta[i], k);
            for (std::size_t r = 0; r < 3; ++r) {
                if (!dxi[r][k].is_zero()) {
                    c -= dxi[r][k] * Poly::atom(l_jet(i, r));
                }
            }
            pr.coefficient[l_jet(i, k)] = std::move(c);
        }
    }
    for (const auto& p : h_pairs) {
        const std::size_t i = p[0];
        const std::size_t j = p[1];
        pr.coefficient[h_atom(i, j)] = v.phi[i][j];
        for (std::size_t k = 0; k < 3; ++k) {
            Poly c = total_derivative(v.phi[i][j], k);
            for (std::size_t r = 0; r < 3; ++r) {
                if (!dxi[r][k].is_zero()) {
                    c -= dxi[r][k] * Poly::atom(h_jet(i, j, r));
                }
            }
            pr.coefficient[h_jet(i, j, k)] = std::move(c);
        }
    }
    return pr;
}

/// pr V applied to an expression in (x, l, h, jets).
inline Poly apply(const ProlongedField& pr, const Poly& e) {
    Poly out;
    for (AtomId id = 0; id < param_a; ++id) {
        if (pr.coefficient[id].is_zero()) {
            continue;
        }
        const Poly d = e.partial(id);
        if (!d.is_zero()) {
            out += pr.coefficient[id] * d;
        }
    }
    return out;
}

} // namespace guichard::sym

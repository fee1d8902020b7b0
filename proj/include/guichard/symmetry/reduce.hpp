#pragma once

// On-shell reduction: eliminate the jets fixed by the first-order system,
// leaving only the free jets h_{ji,x_i}, h_{ji,x_j} (i < j), then rewrite
// l3^2 -> l2^2 - l1^2 in the numerator.

#include <array>
#include <cstddef>
#include <optional>

#include "guichard/errors.hpp"
#include "guichard/symmetry/expression.hpp"
#include "guichard/types.hpp"

namespace guichard::sym {

inline constexpr int reduction_pass_limit = 100;

/// Right-hand side replacing a jet atom, or nullopt for the free jets.
inline std::optional<Poly> jet_substitution(AtomId id) {
    const auto L = [](std::size_t i) { return Poly::atom(l_atom(i)); };
    const auto H = [](std::size_t i, std::size_t j) { return Poly::atom(h_atom(i, j)); };
    const auto eps = [](std::size_t i, std::size_t j) { return Rational(epsilon(i) * epsilon(j)); };
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (id != l_jet(i, k)) {
                continue;
            }
            if (i != k) {
                return H(i, k) * L(k);
            }
            const auto [j, m] = others(i);
            return -(H(j, i) * L(j)).scaled(eps(i, j)) - (H(m, i) * L(m)).scaled(eps(i, m));
        }
    }
    for (const auto& p : h_pairs) {
        const std::size_t i = p[0];
        const std::size_t j = p[1];
        const std::size_t k = third(i, j);
        if (id == h_jet(i, j, k)) {
            return H(i, k) * H(k, j);
        }
        if (i < j && id == h_jet(i, j, j)) {
            return -Poly::atom(h_jet(j, i, i)) - H(i, k) * H(j, k);
        }
        if (i < j && id == h_jet(i, j, i)) {
            return -Poly::atom(h_jet(j, i, j)).scaled(eps(i, j)) - (H(k, i) * H(k, j)).scaled(eps(i, k));
        }
    }
    return std::nullopt;
}

/// One substitution pass over every non-free jet.
inline Poly substitute_jets_once(const Poly& p, bool& changed) {
    static const auto rules = [] {
        std::array<std::optional<Poly>, atom_count> r;
        for (AtomId id = 12; id < 39; ++id) {
            r[id] = jet_substitution(id);
        }
        return r;
    }();
    changed = false;
    Poly out;
    for (const auto& [m, coef] : p.terms()) {
        bool hit = false;
        for (AtomId id = 12; id < 39; ++id) {
            if (m[id] != 0 && rules[id]) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            out += Poly::term(m, coef);
            continue;
        }
        changed = true;
        Monomial rest = m;
        Poly factor = Poly::constant(coef);
        for (AtomId id = 12; id < 39; ++id) {
            if (m[id] != 0 && rules[id]) {
                factor *= rules[id]->pow(m[id]);
                rest[id] = 0;
            }
        }
        out += Poly::term(rest, Rational(1)) * factor;
    }
    return out;
}

/// Rewrites l3^2 -> l2^2 - l1^2 in the numerator (over the canonical l-denominator).
inline Poly apply_guichard(const Poly& p) {
    const Monomial den = p.denominator();
    Poly numerator;
    for (const auto& [m, coef] : p.terms()) {
        Monomial nm = m;
        for (std::size_t i = 3; i < 6; ++i) {
            nm[i] = static_cast<std::int16_t>(nm[i] + den[i]);
        }
        numerator += Poly::term(nm, coef);
    }
    const Poly rewrite = Poly::atom(l_atom(1), 2) - Poly::atom(l_atom(0), 2);
    Poly reduced;
    for (const auto& [m, coef] : numerator.terms()) {
        const int e3 = m[l_atom(2)];
        Monomial base = m;
        base[l_atom(2)] = static_cast<std::int16_t>(e3 % 2);
        reduced += Poly::term(base, coef) * rewrite.pow(e3 / 2);
    }
    Monomial inv{};
    for (std::size_t i = 3; i < 6; ++i) {
        inv[i] = static_cast<std::int16_t>(-den[i]);
    }
    return reduced * Poly::term(inv, Rational(1));
}

inline Poly on_shell_reduce(const Poly& p) {
    Poly cur = p;
    for (int pass = 0; pass < reduction_pass_limit; ++pass) {
        bool changed = false;
        cur = substitute_jets_once(cur, changed);
        if (!changed) {
            return apply_guichard(cur);
        }
    }
    throw InternalError("on-shell reduction did not reach a fixpoint in " + std::to_string(reduction_pass_limit) +
                        " passes");
}

inline Expression on_shell_reduce(const Expression& e) { return from_poly(on_shell_reduce(to_poly(e))); }

} // namespace guichard::sym

#pragma once

// Infinitesimal invariance check of the first-order Lamé system under a
// candidate point-symmetry generator.

#include <array>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "guichard/errors.hpp"
#include "guichard/lame_core.hpp"
#include "guichard/symmetry/expression.hpp"
#include "guichard/symmetry/prolongation.hpp"
#include "guichard/symmetry/reduce.hpp"
#include "guichard/types.hpp"

namespace guichard::sym {

/// Equation (A)-(F) for the index triple (i, j, k), as an expression in x, l, h and jets.
inline Poly first_order_equation(FirstOrderFamily family, std::size_t i, std::size_t j, std::size_t k) {
    const auto L = [](std::size_t s) { return Poly::atom(l_atom(s)); };
    const auto H = [](std::size_t s, std::size_t t) { return Poly::atom(h_atom(s, t)); };
    const auto HJ = [](std::size_t s, std::size_t t, std::size_t r) { return Poly::atom(h_jet(s, t, r)); };
    const auto e = [](std::size_t s) { return Rational(epsilon(s)); };
    switch (family) {
    case FirstOrderFamily::A:
        return L(i).pow(2).scaled(e(i)) + L(j).pow(2).scaled(e(j)) + L(k).pow(2).scaled(e(k));
    case FirstOrderFamily::B:
        return Poly::atom(l_jet(i, j)) - H(i, j) * L(j);
    case FirstOrderFamily::C:
        return Poly::atom(l_jet(i, i)).scaled(e(i)) + (H(j, i) * L(j)).scaled(e(j)) + (H(k, i) * L(k)).scaled(e(k));
    case FirstOrderFamily::D:
        return HJ(i, j, k) - H(i, k) * H(k, j);
    case FirstOrderFamily::E:
        return HJ(i, j, j) + HJ(j, i, i) + H(i, k) * H(j, k);
    case FirstOrderFamily::F:
        return HJ(i, j, i).scaled(e(i)) + HJ(j, i, j).scaled(e(j)) + (H(k, i) * H(k, j)).scaled(e(k));
    }
    throw InternalError("unknown equation family");
}

struct EquationCheck {
    FirstOrderFamily family = FirstOrderFamily::A;
    std::array<std::size_t, 3> indices{};  ///< 0-based
    Poly reduced;
    bool zero = false;
};

struct GeneratorReport {
    std::vector<EquationCheck> checks;
    bool pass = true;

    /// True when every instance of the family reduced to zero.
    bool family_zero(FirstOrderFamily f) const {
        for (const auto& c : checks) {
            if (c.family == f && !c.zero) {
                return false;
            }
        }
        return true;
    }
};

inline constexpr std::array<FirstOrderFamily, 6> all_families{FirstOrderFamily::A, FirstOrderFamily::B,
                                                              FirstOrderFamily::C, FirstOrderFamily::D,
                                                              FirstOrderFamily::E, FirstOrderFamily::F};

inline GeneratorReport verify_generator(const VectorField& v) {
    const ProlongedField pr = prolong_first(v);
    GeneratorReport rep;
    for (FirstOrderFamily f : all_families) {
        for (const auto& t : distinct_triples) {
            EquationCheck c;
            c.family = f;
            c.indices = t;
            c.reduced = on_shell_reduce(apply(pr, first_order_equation(f, t[0], t[1], t[2])));
            c.zero = c.reduced.is_zero();
            rep.pass = rep.pass && c.zero;
            rep.checks.push_back(std::move(c));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ansatz files
// ---------------------------------------------------------------------------
//
// One assignment per line, '#' starts a comment:
//   base = theorem | zero      (starting field, default theorem)
//   xi1 = ..., eta2 = ..., phi13 = ...
// Assignments override the corresponding coefficient of the base field.

inline VectorField parse_ansatz(const std::string& text) {
    struct Assignment {
        std::string name;
        std::string rhs;
        std::size_t line;
    };
    std::vector<Assignment> assignments;
    bool zero_base = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw SyntaxError("ansatz line " + std::to_string(line_no) + ": expected 'name = expression'", first);
        }
        std::string name = line.substr(0, eq);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t\r") + 1);
        std::string rhs = line.substr(eq + 1);
        if (name == "base") {
            rhs.erase(0, rhs.find_first_not_of(" \t"));
            rhs.erase(rhs.find_last_not_of(" \t\r") + 1);
            if (rhs == "zero") {
                zero_base = true;
            } else if (rhs == "theorem") {
                zero_base = false;
            } else {
                throw ValidationError("ansatz line " + std::to_string(line_no) + ": base must be 'theorem' or 'zero'");
            }
            continue;
        }
        assignments.push_back({name, rhs, line_no});
    }
    VectorField v = zero_base ? VectorField{} : theorem_field();
    for (const auto& a : assignments) {
        Poly value;
        try {
            value = parse_poly(a.rhs);
        } catch (const SyntaxError& e) {
            throw SyntaxError("ansatz line " + std::to_string(a.line) + ": " + e.what(), e.offset());
        }
        if (value.contains_jet()) {
            throw ValidationError("ansatz line " + std::to_string(a.line) + ": coefficients may not contain jets");
        }
        const std::string& n = a.name;
        const auto digit = [&](std::size_t pos) -> std::size_t {
            if (pos >= n.size() || n[pos] < '1' || n[pos] > '3') {
                throw ValidationError("ansatz line " + std::to_string(a.line) + ": unknown coefficient '" + n + "'");
            }
            return static_cast<std::size_t>(n[pos] - '1');
        };
        if (n.size() == 3 && n.rfind("xi", 0) == 0) {
            v.xi[digit(2)] = value;
        } else if (n.size() == 4 && n.rfind("eta", 0) == 0) {
            v.eta[digit(3)] = value;
        } else if (n.size() == 5 && n.rfind("phi", 0) == 0 && digit(3) != digit(4)) {
            v.phi[digit(3)][digit(4)] = value;
        } else {
            throw ValidationError("ansatz line " + std::to_string(a.line) + ": unknown coefficient '" + n + "'");
        }
    }
    return v;
}

inline VectorField load_ansatz(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ValidationError("cannot open ansatz file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_ansatz(ss.str());
}

} // namespace guichard::sym

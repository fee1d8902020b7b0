#pragma once

// Exact symbolic expressions over the variables of the first-order Lamé
// system: x_i, l_i, h_ij, the first jets l_{i,x_k} and h_{ij,x_k}, and the
// generator parameters a, c, a_1..a_3.
//
// The canonical form is a Laurent polynomial with rational coefficients in
// which only l_1, l_2, l_3 may carry negative exponents, i.e. an expanded
// polynomial numerator over a monomial in the l_i.

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "guichard/errors.hpp"

namespace guichard::sym {

using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

inline constexpr std::size_t atom_count = 44;
using AtomId = std::size_t;

/// Ordered pairs (i, j), i != j, in the order used for h-atoms.
inline constexpr std::array<std::array<std::size_t, 2>, 6> h_pairs{{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};

inline constexpr std::size_t pair_index(std::size_t i, std::size_t j) noexcept {
    return i * 2 + (j > i ? j - 1 : j);
}

inline constexpr AtomId x_atom(std::size_t i) noexcept { return i; }
inline constexpr AtomId l_atom(std::size_t i) noexcept { return 3 + i; }
inline constexpr AtomId h_atom(std::size_t i, std::size_t j) noexcept { return 6 + pair_index(i, j); }
inline constexpr AtomId l_jet(std::size_t i, std::size_t k) noexcept { return 12 + 3 * i + k; }
inline constexpr AtomId h_jet(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return 21 + 3 * pair_index(i, j) + k;
}
inline constexpr AtomId param_a = 39;
inline constexpr AtomId param_c = 40;
inline constexpr AtomId param_ai(std::size_t i) noexcept { return 41 + i; }

inline constexpr bool is_l_atom(AtomId id) noexcept { return id >= 3 && id < 6; }
inline constexpr bool is_jet_atom(AtomId id) noexcept { return id >= 12 && id < 39; }

inline const std::array<std::string, atom_count>& atom_names() {
    static const std::array<std::string, atom_count> names = [] {
        std::array<std::string, atom_count> n;
        const auto d = [](std::size_t i) { return std::to_string(i + 1); };
        for (std::size_t i = 0; i < 3; ++i) {
            n[x_atom(i)] = "x" + d(i);
            n[l_atom(i)] = "l" + d(i);
            n[param_ai(i)] = "a" + d(i);
            for (std::size_t k = 0; k < 3; ++k) {
                n[l_jet(i, k)] = "l" + d(i) + "_x" + d(k);
            }
        }
        for (const auto& p : h_pairs) {
            n[h_atom(p[0], p[1])] = "h" + d(p[0]) + d(p[1]);
            for (std::size_t k = 0; k < 3; ++k) {
                n[h_jet(p[0], p[1], k)] = "h" + d(p[0]) + d(p[1]) + "_x" + d(k);
            }
        }
        n[param_a] = "a";
        n[param_c] = "c";
        return n;
    }();
    return names;
}

inline std::optional<AtomId> find_atom(std::string_view name) {
    static const std::map<std::string, AtomId, std::less<>> table = [] {
        std::map<std::string, AtomId, std::less<>> t;
        const auto& n = atom_names();
        for (AtomId id = 0; id < atom_count; ++id) {
            t.emplace(n[id], id);
        }
        return t;
    }();
    const auto it = table.find(name);
    if (it == table.end()) {
        return std::nullopt;
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Laurent polynomials
// ---------------------------------------------------------------------------

using Monomial = std::array<std::int16_t, atom_count>;

inline int total_degree(const Monomial& m) noexcept {
    int d = 0;
    for (auto e : m) {
        d += e;
    }
    return d;
}

/// Fixed total order: higher total degree first, then lexicographically larger exponents
/// in atom order first.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const noexcept {
        const int da = total_degree(a);
        const int db = total_degree(b);
        if (da != db) {
            return da > db;
        }
        for (std::size_t i = 0; i < atom_count; ++i) {
            if (a[i] != b[i]) {
                return a[i] > b[i];
            }
        }
        return false;
    }
};

class Poly {
public:
    using Terms = std::map<Monomial, Rational, MonomialOrder>;

    Poly() = default;

    static Poly constant(const Rational& r) {
        Poly p;
        if (r != 0) {
            p.terms_.emplace(Monomial{}, r);
        }
        return p;
    }

    static Poly atom(AtomId id, int exponent = 1) {
        Monomial m{};
        m[id] = static_cast<std::int16_t>(exponent);
        Poly p;
        p.terms_.emplace(m, Rational(1));
        return p;
    }

    static Poly term(const Monomial& m, const Rational& r) {
        Poly p;
        if (r != 0) {
            p.terms_.emplace(m, r);
        }
        return p;
    }

    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    bool contains_atom(AtomId id) const noexcept {
        for (const auto& [m, r] : terms_) {
            if (m[id] != 0) {
                return true;
            }
        }
        return false;
    }

    bool contains_jet() const noexcept {
        for (AtomId id = 12; id < 39; ++id) {
            if (contains_atom(id)) {
                return true;
            }
        }
        return false;
    }

    Poly& operator+=(const Poly& o) {
        for (const auto& [m, r] : o.terms_) {
            add_term(m, r);
        }
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        for (const auto& [m, r] : o.terms_) {
            add_term(m, -r);
        }
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator-(const Poly& a) {
        Poly out;
        for (const auto& [m, r] : a.terms_) {
            out.terms_.emplace(m, -r);
        }
        return out;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly out;
        for (const auto& [ma, ra] : a.terms_) {
            for (const auto& [mb, rb] : b.terms_) {
                Monomial m;
                for (std::size_t i = 0; i < atom_count; ++i) {
                    m[i] = static_cast<std::int16_t>(ma[i] + mb[i]);
                }
                out.add_term(m, ra * rb);
            }
        }
        return out;
    }

    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly scaled(const Rational& r) const {
        Poly out;
        if (r == 0) {
            return out;
        }
        for (const auto& [m, c] : terms_) {
            out.terms_.emplace(m, c * r);
        }
        return out;
    }

    /// Multiplicative inverse; defined for a single term whose monomial involves only l-atoms.
    Poly inverse() const {
        if (terms_.size() != 1) {
            throw ValidationError("division is only defined by a nonzero constant or a monomial in l1, l2, l3");
        }
        const auto& [m, r] = *terms_.begin();
        Monomial inv{};
        for (std::size_t i = 0; i < atom_count; ++i) {
            if (m[i] != 0 && !is_l_atom(i)) {
                throw ValidationError("division is only defined by a nonzero constant or a monomial in l1, l2, l3");
            }
            inv[i] = static_cast<std::int16_t>(-m[i]);
        }
        return term(inv, Rational(1) / r);
    }

    Poly pow(int n) const {
        if (n < 0) {
            return inverse().pow(-n);
        }
        Poly result = constant(1);
        Poly base = *this;
        while (n > 0) {
            if (n & 1) {
                result *= base;
            }
            n >>= 1;
            if (n > 0) {
                base *= base;
            }
        }
        return result;
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

    /// Formal partial derivative treating every atom as independent.
    Poly partial(AtomId id) const {
        Poly out;
        for (const auto& [m, r] : terms_) {
            if (m[id] == 0) {
                continue;
            }
            Monomial d = m;
            d[id] = static_cast<std::int16_t>(d[id] - 1);
            out.add_term(d, r * m[id]);
        }
        return out;
    }

    /// Monomial in the l-atoms clearing every negative exponent (the canonical denominator).
    Monomial denominator() const noexcept {
        Monomial d{};
        for (const auto& [m, r] : terms_) {
            for (std::size_t i = 3; i < 6; ++i) {
                if (m[i] < 0 && -m[i] > d[i]) {
                    d[i] = static_cast<std::int16_t>(-m[i]);
                }
            }
        }
        return d;
    }

    double evaluate(const std::array<double, atom_count>& values) const {
        double sum = 0.0;
        for (const auto& [m, r] : terms_) {
            double t = static_cast<double>(r);
            for (std::size_t i = 0; i < atom_count; ++i) {
                for (int e = 0; e < std::abs(m[i]); ++e) {
                    t = m[i] > 0 ? t * values[i] : t / values[i];
                }
            }
            sum += t;
        }
        return sum;
    }

private:
    void add_term(const Monomial& m, const Rational& r) {
        if (r == 0) {
            return;
        }
        auto [it, inserted] = terms_.emplace(m, r);
        if (!inserted) {
            it->second += r;
            if (it->second == 0) {
                terms_.erase(it);
            }
        }
    }

    Terms terms_;
};

// ---------------------------------------------------------------------------
// Expression trees
// ---------------------------------------------------------------------------

enum class NodeKind { constant, atom, sum, product, power };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind = NodeKind::constant;
    Rational value;               ///< constant
    AtomId atom = 0;              ///< atom
    std::vector<NodePtr> children;  ///< sum, product; power has one child
    int exponent = 1;             ///< power
};

/// Immutable expression tree; arithmetic builds unnormalized trees.
class Expression {
public:
    Expression() : node_(make_constant(0)) {}
    explicit Expression(NodePtr n) : node_(std::move(n)) {}

    static Expression constant(const Rational& r) { return Expression(make_constant(r)); }
    static Expression atom(AtomId id) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::atom;
        n->atom = id;
        return Expression(std::move(n));
    }

    const Node& node() const noexcept { return *node_; }
    const NodePtr& ptr() const noexcept { return node_; }

    friend Expression operator+(const Expression& a, const Expression& b) { return nary(NodeKind::sum, a, b); }
    friend Expression operator*(const Expression& a, const Expression& b) { return nary(NodeKind::product, a, b); }
    friend Expression operator-(const Expression& a) { return constant(-1) * a; }
    friend Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }
    friend Expression operator/(const Expression& a, const Expression& b) { return a * b.pow(-1); }

    Expression pow(int e) const {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::power;
        n->children = {node_};
        n->exponent = e;
        return Expression(std::move(n));
    }

private:
    static NodePtr make_constant(const Rational& r) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::constant;
        n->value = r;
        return n;
    }

    static Expression nary(NodeKind kind, const Expression& a, const Expression& b) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->children = {a.node_, b.node_};
        return Expression(std::move(n));
    }

    NodePtr node_;
};

inline Poly to_poly(const Node& n) {
    switch (n.kind) {
    case NodeKind::constant: return Poly::constant(n.value);
    case NodeKind::atom: return Poly::atom(n.atom);
    case NodeKind::sum: {
        Poly p;
        for (const auto& c : n.children) {
            p += to_poly(*c);
        }
        return p;
    }
    case NodeKind::product: {
        Poly p = Poly::constant(1);
        for (const auto& c : n.children) {
            p *= to_poly(*c);
        }
        return p;
    }
    case NodeKind::power: return to_poly(*n.children.front()).pow(n.exponent);
    }
    throw InternalError("unknown node kind");
}

inline Poly to_poly(const Expression& e) { return to_poly(e.node()); }

namespace detail {

inline NodePtr monomial_node(const Monomial& m, const Rational& coefficient, bool positive_part) {
    auto prod = std::make_shared<Node>();
    prod->kind = NodeKind::product;
    if (coefficient != 1) {
        auto c = std::make_shared<Node>();
        c->kind = NodeKind::constant;
        c->value = coefficient;
        prod->children.push_back(std::move(c));
    }
    for (AtomId id = 0; id < atom_count; ++id) {
        const int e = positive_part ? m[id] : -m[id];
        if (e <= 0) {
            continue;
        }
        auto a = std::make_shared<Node>();
        a->kind = NodeKind::atom;
        a->atom = id;
        if (e == 1) {
            prod->children.push_back(std::move(a));
        } else {
            auto p = std::make_shared<Node>();
            p->kind = NodeKind::power;
            p->children = {std::move(a)};
            p->exponent = e;
            prod->children.push_back(std::move(p));
        }
    }
    if (prod->children.size() == 1) {
        return prod->children.front();
    }
    if (prod->children.empty()) {
        auto c = std::make_shared<Node>();
        c->kind = NodeKind::constant;
        c->value = coefficient;
        return c;
    }
    return prod;
}

} // namespace detail

/// Canonical tree: Sum of monomial Products (the numerator), multiplied, when needed, by
/// Power(l-monomial, -1).
inline Expression from_poly(const Poly& p) {
    if (p.is_zero()) {
        return Expression::constant(0);
    }
    const Monomial den = p.denominator();
    std::vector<NodePtr> terms;
    for (const auto& [m, r] : p.terms()) {
        Monomial num = m;
        for (std::size_t i = 3; i < 6; ++i) {
            num[i] = static_cast<std::int16_t>(num[i] + den[i]);
        }
        terms.push_back(detail::monomial_node(num, r, true));
    }
    NodePtr numerator;
    if (terms.size() == 1) {
        numerator = terms.front();
    } else {
        auto s = std::make_shared<Node>();
        s->kind = NodeKind::sum;
        s->children = std::move(terms);
        numerator = std::move(s);
    }
    if (total_degree(den) == 0) {
        return Expression(numerator);
    }
    auto inv = std::make_shared<Node>();
    inv->kind = NodeKind::power;
    inv->children = {detail::monomial_node(den, Rational(1), true)};
    inv->exponent = -1;
    auto prod = std::make_shared<Node>();
    prod->kind = NodeKind::product;
    prod->children = {std::move(numerator), std::move(inv)};
    return Expression(std::move(prod));
}

inline Expression normalize(const Expression& e) { return from_poly(to_poly(e)); }

inline bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.atom != b.atom || a.exponent != b.exponent || a.value != b.value ||
        a.children.size() != b.children.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!structurally_equal(*a.children[i], *b.children[i])) {
            return false;
        }
    }
    return true;
}

inline bool structurally_equal(const Expression& a, const Expression& b) {
    return structurally_equal(a.node(), b.node());
}

inline bool is_zero(const Expression& e) {
    return e.node().kind == NodeKind::constant && e.node().value == 0;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) {
        return numerator(r).str();
    }
    return numerator(r).str() + "/" + denominator(r).str();
}

namespace detail {

inline std::string monomial_text(const Monomial& m) {
    std::string out;
    for (AtomId id = 0; id < atom_count; ++id) {
        if (m[id] <= 0) {
            continue;
        }
        if (!out.empty()) {
            out += "*";
        }
        out += atom_names()[id];
        if (m[id] > 1) {
            out += "^" + std::to_string(m[id]);
        }
    }
    return out;
}

} // namespace detail

/// Canonical text: "numerator" or "(numerator)/(l-monomial)"; re-parses to the same polynomial.
inline std::string to_string(const Poly& p) {
    if (p.is_zero()) {
        return "0";
    }
    const Monomial den = p.denominator();
    std::string num;
    bool first = true;
    for (const auto& [m, r] : p.terms()) {
        Monomial nm = m;
        for (std::size_t i = 3; i < 6; ++i) {
            nm[i] = static_cast<std::int16_t>(nm[i] + den[i]);
        }
        const bool negative = r < 0;
        const Rational mag = negative ? Rational(-r) : r;
        if (first) {
            num += negative ? "-" : "";
        } else {
            num += negative ? " - " : " + ";
        }
        first = false;
        const std::string mono = detail::monomial_text(nm);
        if (mono.empty()) {
            num += to_string(mag);
        } else if (mag == 1) {
            num += mono;
        } else {
            num += to_string(mag) + "*" + mono;
        }
    }
    if (total_degree(den) == 0) {
        return num;
    }
    return "(" + num + ")/(" + detail::monomial_text(den) + ")";
}

inline std::string to_string(const Expression& e) { return to_string(to_poly(e)); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' ['+' | '-'] integer)?
//   primary := number | identifier | '(' expr ')'
//   number  := digits ['.' digits]        (decimal literals are exact rationals)

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expression parse() {
        Expression e = expr();
        skip_space();
        if (pos_ < src_.size()) {
            throw SyntaxError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        }
        return e;
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression expr() {
        Expression e = term();
        for (;;) {
            if (accept('+')) {
                e = e + term();
            } else if (accept('-')) {
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expression term() {
        Expression e = unary();
        for (;;) {
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                e = e / unary();
            } else {
                return e;
            }
        }
    }

    Expression unary() {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    Expression power() {
        Expression base = primary();
        if (accept('^')) {
            int sign = 1;
            if (accept('-')) {
                sign = -1;
            } else {
                accept('+');
            }
            skip_space();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
            if (pos_ == start) {
                throw SyntaxError("expected integer exponent", pos_);
            }
            const std::string digits(src_.substr(start, pos_ - start));
            if (digits.size() > 4) {
                throw SyntaxError("exponent too large", start);
            }
            base = base.pow(sign * std::stoi(digits));
        }
        return base;
    }

    Expression primary() {
        skip_space();
        if (pos_ >= src_.size()) {
            throw SyntaxError("unexpected end of input", pos_);
        }
        const char ch = src_[pos_];
        if (ch == '(') {
            ++pos_;
            Expression e = expr();
            if (!accept(')')) {
                throw SyntaxError("expected ')'", pos_);
            }
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = src_.substr(start, pos_ - start);
            const auto id = find_atom(name);
            if (!id) {
                throw UnknownAtomError(std::string(name), start);
            }
            return Expression::atom(*id);
        }
        throw SyntaxError("unexpected '" + std::string(1, ch) + "'", pos_);
    }

    Expression number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
        std::string digits(src_.substr(start, pos_ - start));
        std::string frac;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            const std::size_t fs = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
            if (pos_ == fs) {
                throw SyntaxError("expected digits after '.'", pos_);
            }
            frac = std::string(src_.substr(fs, pos_ - fs));
        }
        using boost::multiprecision::cpp_int;
        // a leading zero would make the string constructor read octal
        std::string all = digits + frac;
        all.erase(0, std::min(all.find_first_not_of('0'), all.size() - 1));
        cpp_int num(all);
        cpp_int den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) {
            den *= 10;
        }
        return Expression::constant(Rational(num, den));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Expression parse(std::string_view src) { return detail::Parser(src).parse(); }

inline Poly parse_poly(std::string_view src) { return to_poly(parse(src)); }

} // namespace guichard::sym

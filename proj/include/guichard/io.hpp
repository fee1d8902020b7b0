#pragma once

// Family specifications (JSON), report emission with 17 significant digits,
// and sampled-grid export.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "guichard/errors.hpp"
#include "guichard/invariant_solutions.hpp"
#include "guichard/lame_core.hpp"
#include "guichard/types.hpp"

namespace guichard::io {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    if (!std::isfinite(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void write_string(std::ostream& os, const std::string& s) {
    os << Json(s).dump();
}

inline void emit(std::ostream& os, const Json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                os << ",\n";
            }
            first = false;
            os << pad;
            write_string(os, it.key());
            os << ": ";
            emit(os, it.value(), indent, depth + 1);
        }
        os << "\n" << close_pad << "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        bool scalars = true;
        for (const auto& e : j) {
            scalars = scalars && !e.is_structured();
        }
        if (scalars) {
            os << "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) {
                    os << ", ";
                }
                emit(os, j[i], indent, depth + 1);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) {
                os << ",\n";
            }
            os << pad;
            emit(os, j[i], indent, depth + 1);
        }
        os << "\n" << close_pad << "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        os << (std::isfinite(v) ? format_double(v) : "null");
        return;
    }
    default:
        os << j.dump();
    }
}

} // namespace detail

/// JSON text with every float printed with %.17g; non-finite floats become null.
inline std::string dump(const Json& j, int indent = 2) {
    std::ostringstream os;
    detail::emit(os, j, indent, 0);
    os << "\n";
    return os.str();
}

inline Json to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

inline Json to_json(const ResidualReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries) {
        entries.push_back(Json{{"family", e.family},
                               {"max_abs", e.max_abs},
                               {"mean_abs", e.mean_abs},
                               {"worst_point", to_json(e.worst_point)},
                               {"pass", e.pass}});
    }
    return Json{{"pass", r.pass}, {"tolerance", r.tolerance}, {"entries", entries}};
}

// ---------------------------------------------------------------------------
// Family specifications
// ---------------------------------------------------------------------------

/// A constructed family with whatever structure its type carries.
struct LoadedFamily {
    std::string type;
    std::optional<GuichardNet> net;
    std::optional<TranslationFamily> translation;
    std::optional<OneConstantFamily> one_constant;
    std::optional<DilationConstants> dilation;
};

namespace detail {

inline double number(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ValidationError(std::string("family spec: '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

inline double number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

template <std::size_t N>
std::array<double, N> numbers(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != N) {
        throw ValidationError(std::string("family spec: '") + key + "' must be an array of " + std::to_string(N) +
                              " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!j.at(key)[i].is_number()) {
            throw ValidationError(std::string("family spec: '") + key + "' must contain numbers");
        }
        out[i] = j.at(key)[i].get<double>();
    }
    return out;
}

inline Box box_from(const Json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw ValidationError("family spec: 'box' must be [[lo, hi], [lo, hi], [lo, hi]]");
    }
    Box b;
    for (std::size_t a = 0; a < 3; ++a) {
        const Json& ax = j[a];
        if (!ax.is_array() || ax.size() != 2 || !ax[0].is_number() || !ax[1].is_number()) {
            throw ValidationError("family spec: 'box' must be [[lo, hi], [lo, hi], [lo, hi]]");
        }
        b.axes[a] = {ax[0].get<double>(), ax[1].get<double>()};
        if (!(b.axes[a].lo < b.axes[a].hi)) {
            throw ValidationError("family spec: box axis " + std::to_string(a + 1) + " must have lo < hi");
        }
    }
    return b;
}

inline Box required_box(const Json& j) {
    if (!j.contains("box")) {
        throw ValidationError("family spec: 'box' is required for this family type");
    }
    return box_from(j.at("box"));
}

inline std::string case_of(const Json& j) {
    if (!j.contains("case") || !j.at("case").is_string()) {
        throw ValidationError("family spec: 'case' must be one of \"a\", \"b1\", \"b2\", \"c\"");
    }
    return j.at("case").get<std::string>();
}

} // namespace detail

inline LoadedFamily load_family(const Json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw ValidationError("family spec: missing string field 'type'");
    }
    LoadedFamily out;
    out.type = j.at("type").get<std::string>();
    if (out.type == "translation") {
        TranslationConstants tc;
        tc.alpha = detail::numbers<3>(j, "alpha");
        tc.c = detail::numbers<3>(j, "c");
        tc.lambda = detail::number(j, "lambda");
        tc.l1_0 = detail::number(j, "l1_0");
        if (j.contains("sign_l1prime")) {
            tc.sign_l1prime = static_cast<int>(detail::number(j, "sign_l1prime"));
        }
        const auto range = detail::numbers<2>(j, "xi_range");
        ShrinkPolicy policy = ShrinkPolicy::error;
        if (j.contains("on_shrink")) {
            const std::string p = j.at("on_shrink").get<std::string>();
            if (p == "clip") {
                policy = ShrinkPolicy::clip;
            } else if (p != "error") {
                throw ValidationError("family spec: 'on_shrink' must be \"error\" or \"clip\"");
            }
        }
        out.translation = build_translation_family(tc, {range[0], range[1]}, policy);
        out.net = j.contains("box") ? out.translation->net(detail::box_from(j.at("box"))) : out.translation->net();
    } else if (out.type == "one_constant") {
        OneConstantFamily f;
        const std::string c = detail::case_of(j);
        if (c == "a") {
            f.kind = OneConstantCase::a;
        } else if (c == "b1") {
            f.kind = OneConstantCase::b1;
        } else if (c == "b2") {
            f.kind = OneConstantCase::b2;
        } else if (c == "c") {
            f.kind = OneConstantCase::c;
        } else {
            throw ValidationError("family spec: unknown one_constant case '" + c + "'");
        }
        f.lambda = detail::number(j, "lambda");
        f.b = detail::number_or(j, "b", 0.0);
        f.xi0 = detail::number_or(j, "xi0", 0.0);
        f.alpha = detail::numbers<2>(j, "alpha");
        if (j.contains("phi")) {
            const Json& phi = j.at("phi");
            if (!phi.is_object() || !phi.contains("polynomial") || !phi.at("polynomial").is_array()) {
                throw ValidationError("family spec: 'phi' must be {\"polynomial\": [c0, c1, ...]}");
            }
            std::vector<double> coef;
            for (const auto& v : phi.at("polynomial")) {
                coef.push_back(v.get<double>());
            }
            f.phi = [coef](double x) {
                double s = 0.0;
                for (auto it = coef.rbegin(); it != coef.rend(); ++it) {
                    s = s * x + *it;
                }
                return s;
            };
            f.phi_prime = [coef](double x) {
                double s = 0.0;
                for (std::size_t n = coef.size(); n-- > 1;) {
                    s = s * x + static_cast<double>(n) * coef[n];
                }
                return s;
            };
        }
        out.one_constant = f;
        out.net = build_one_constant_family(f, detail::required_box(j));
    } else if (out.type == "dilation") {
        DilationConstants d;
        const std::string c = detail::case_of(j);
        std::array<const char*, 2> keys{};
        if (c == "a") {
            d.kind = DilationCase::a;
            keys = {"C0", "C1"};
        } else if (c == "b1") {
            d.kind = DilationCase::b1;
            keys = {"D0", "D1"};
        } else if (c == "b2") {
            d.kind = DilationCase::b2;
            keys = {"D2", "D3"};
        } else if (c == "c") {
            d.kind = DilationCase::c;
            keys = {"E0", "E1"};
        } else {
            throw ValidationError("family spec: unknown dilation case '" + c + "'");
        }
        d.a = detail::numbers<3>(j, "a");
        d.b = detail::numbers<3>(j, "b");
        d.lambda = detail::number(j, "lambda");
        d.amplitude = detail::number(j, keys[0]);
        d.offset = detail::number_or(j, keys[1], 0.0);
        out.dilation = d;
        out.net = build_dilation_family(d, detail::required_box(j));
    } else if (out.type == "constant") {
        out.net = constant_net(detail::numbers<3>(j, "l"), detail::required_box(j));
    } else {
        throw ValidationError("family spec: unknown type '" + out.type +
                              "' (expected translation, one_constant, dilation or constant)");
    }
    return out;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ValidationError("cannot open '" + path + "'");
    }
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("invalid JSON in '" + path + "': " + e.what());
    }
}

inline LoadedFamily load_family_file(const std::string& path) { return load_family(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Grid export
// ---------------------------------------------------------------------------

inline void write_grid_csv(std::ostream& os, const GuichardNet& net, const std::vector<Point>& grid) {
    os << "x1,x2,x3,l1,l2,l3\n";
    for (const Point& p : grid) {
        const Vec3 l = net.evaluate(p).l;
        os << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(p[2]) << ','
           << format_double(l[0]) << ',' << format_double(l[1]) << ',' << format_double(l[2]) << '\n';
    }
}

} // namespace guichard::io

#pragma once

// Scene descriptions read from versioned JSON.

#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "stokeslab/cousin.hpp"
#include "stokeslab/counterexample.hpp"

namespace stokeslab {

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

struct Scene {
  Current current;
  /// Set for the counterexample surface.
  std::shared_ptr<const SurfaceModel> model;
  std::optional<FormField<3>> form;
  ExceptionalSet<3> singular;
  nlohmann::json raw;
};

namespace config {

using nlohmann::json;

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  return j.at(key);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <int N>
Point<N> point(const json& j) {
  if (!j.is_array() || j.size() != N) throw ConfigError("expected an array of " + std::to_string(N) + " numbers");
  Point<N> p{};
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw ConfigError("coordinates must be numbers");
    p[i] = j[i].get<double>();
  }
  return p;
}

inline ExceptionalSet<3> singular_set(const json& j) {
  ExceptionalSet<3> e;
  if (j.is_null()) return e;
  if (!j.is_array()) throw ConfigError("singular_set must be an array");
  for (const auto& c : j) {
    if (c.contains("point")) {
      e.add_point(point<3>(c["point"]));
    } else if (c.contains("segment")) {
      const auto& s = c["segment"];
      if (!s.is_array() || s.size() != 2) throw ConfigError("segment needs two endpoints");
      e.add_segment(point<3>(s[0]), point<3>(s[1]));
    } else if (c.contains("box")) {
      const auto& b = c["box"];
      if (!b.is_array() || b.size() != 2) throw ConfigError("box needs lo and hi");
      e.add_box(point<3>(b[0]), point<3>(b[1]));
    } else {
      throw ConfigError("singular_set entries are point, segment or box");
    }
  }
  return e;
}

inline SurfaceParams surface_params(const json& j) {
  SurfaceParams p;
  p.a = get_or(j, "a", p.a);
  p.h = get_or(j, "h", p.h);
  p.inv_lambda = get_or(j, "lambda_inverse", p.inv_lambda);
  p.k_max = get_or(j, "k_max", p.k_max);
  return p;
}

inline RootBox<2> root(const json& j) {
  RootBox<2> r = RootBox<2>::unit();
  if (j.is_null()) return r;
  r.corner = point<2>(need(j, "corner"));
  r.side = point<2>(need(j, "side"));
  if (!(r.side[0] > 0.0 && r.side[1] > 0.0)) throw ConfigError("root sides must be positive");
  return r;
}

inline CubeSet<2> cube_set(const json& j) {
  const RootBox<2> r = root(j.value("root", json()));
  if (j.contains("cubes")) {
    std::vector<DyadicCube<2>> cubes;
    for (const auto& c : j["cubes"]) {
      if (!c.is_array() || c.size() != 3) throw ConfigError("cubes are [generation, i, j]");
      cubes.push_back(make_cube<2>(c[0].get<int>(), {c[1].get<std::int64_t>(), c[2].get<std::int64_t>()}, r));
    }
    return CubeSet<2>(r, std::move(cubes));
  }
  return CubeSet<2>::uniform(r, get_or(j, "generation", 0));
}

inline std::shared_ptr<const HeightField> height(const json& j) {
  const std::string kind = get_or<std::string>(j, "kind", "flat");
  if (kind == "flat") return std::make_shared<FlatHeight>();
  if (kind == "quadratic") {
    const auto& c = need(j, "coefficients");
    if (!c.is_array() || c.size() != 6) throw ConfigError("quadratic height takes 6 coefficients");
    return std::make_shared<QuadraticHeight>(c[0].get<double>(), c[1].get<double>(), c[2].get<double>(),
                                             c[3].get<double>(), c[4].get<double>(), c[5].get<double>());
  }
  throw ConfigError("unknown height kind '" + kind + "'");
}

inline std::vector<Monomial> polynomial(const json& j) {
  std::vector<Monomial> out;
  if (!j.is_array()) throw ConfigError("a polynomial is an array of {c, p} terms");
  for (const auto& t : j) {
    Monomial m;
    m.coefficient = need(t, "c").get<double>();
    const auto& p = need(t, "p");
    if (!p.is_array() || p.size() != 3) throw ConfigError("powers are [px, py, pz]");
    for (int i = 0; i < 3; ++i) {
      m.powers[i] = p[i].get<int>();
      if (m.powers[i] < 0) throw ConfigError("powers must be nonnegative");
    }
    out.push_back(m);
  }
  return out;
}

/// f(x) = sum of monomials, evaluated in R^3.
inline std::function<double(const Point3&)> scalar(const json& j) {
  auto terms = polynomial(j);
  return [terms](const Point3& x) { return detail::eval_poly<3>(terms, x); };
}

inline FormField<3> form(const json& j, const Scene& s) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "x_dy") return x_dy<3>();
  if (kind == "polynomial") {
    const auto& c = need(j, "components");
    if (!c.is_array() || c.size() != 3) throw ConfigError("a 1-form in R^3 has 3 components");
    return polynomial_one_form<3>({polynomial(c[0]), polynomial(c[1]), polynomial(c[2])});
  }
  if (kind == "counterexample") {
    if (!s.model) throw ConfigError("the counterexample form needs the counterexample current");
    return omega_field(s.model);
  }
  throw ConfigError("unknown form kind '" + kind + "'");
}

inline Gauge gauge(const json& j, const ExceptionalSet<3>& z) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "constant") return Gauge::constant(need(j, "value").get<double>());
  if (kind == "distance_plus") {
    return Gauge::distance_plus(point<3>(need(j, "point")), need(j, "offset").get<double>(),
                                get_or(j, "scale", 1.0));
  }
  if (kind == "distance_to") return Gauge::distance_to(z, get_or(j, "scale", 1.0), get_or(j, "cap", kInf));
  throw ConfigError("unknown gauge kind '" + kind + "'");
}

inline RegularityFn regularity(const json& j) {
  if (j.is_null()) return RegularityFn::fraction(0.5);
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "fraction") return RegularityFn::fraction(need(j, "value").get<double>());
  if (kind == "constant") return RegularityFn::constant(need(j, "value").get<double>());
  throw ConfigError("unknown regularity kind '" + kind + "'");
}

inline SubadditiveFn subadditive(const json& j, const Scene& s) {
  const std::string kind = j.is_null() ? "mass" : j.get<std::string>();
  if (kind == "mass") return SubadditiveFn::mass();
  if (kind == "circulation" || kind == "max") {
    if (!s.form) throw ConfigError("'" + kind + "' needs a form");
    auto c = SubadditiveFn::abs_circulation(*s.form);
    return kind == "max" ? SubadditiveFn::max_of({SubadditiveFn::mass(), c}) : c;
  }
  throw ConfigError("unknown subadditive function '" + kind + "'");
}

}  // namespace config

/// Builds the scene; schema mismatches and malformed fields raise ConfigError.
inline Scene load_scene(const nlohmann::json& j) {
  using namespace config;
  if (!j.is_object()) throw ConfigError("top level must be an object");
  const std::string schema = get_or<std::string>(j, "schema", "");
  if (schema != "stokeslab/v1") throw ConfigError("schema must be \"stokeslab/v1\", got \"" + schema + "\"");
  const auto& c = need(j, "current");
  const std::string kind = need(c, "kind").get<std::string>();
  const int mult = get_or(c, "multiplicity", 1);
  std::optional<Current> cur;
  std::shared_ptr<const SurfaceModel> model;
  if (kind == "cube") {
    cur = cube_current(cube_set(c), mult);
  } else if (kind == "graph") {
    const auto& r = need(c, "rect");
    if (!r.is_array() || r.size() != 4) throw ConfigError("rect is [x0, x1, y0, y1]");
    const Rect rect{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
    if (!(rect.x1 > rect.x0 && rect.y1 > rect.y0)) throw ConfigError("rect must have positive sides");
    cur = surface_current(rect, height(c.value("height", nlohmann::json::object())), mult);
  } else if (kind == "counterexample") {
    model = std::make_shared<const SurfaceModel>(surface_params(c));
    cur = surface_of(model);
  } else {
    throw ConfigError("unknown current kind '" + kind + "'");
  }
  Scene s{*cur, model, std::nullopt, {}, j};
  s.singular = j.contains("singular_set") ? singular_set(j["singular_set"])
                                          : (model ? model->singular_set() : ExceptionalSet<3>{});
  if (j.contains("form")) {
    s.form = form(j["form"], s);
  } else if (model) {
    s.form = omega_field(model);
  }
  return s;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
}

}  // namespace stokeslab

#pragma once

// JSON and CSV views of the reports.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "stokeslab/certify.hpp"
#include "stokeslab/counterexample.hpp"
#include "stokeslab/cylindrical.hpp"
#include "stokeslab/integration.hpp"
#include "stokeslab/minkowski.hpp"

namespace stokeslab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "stokeslab/v1";

inline Json to_json(const Certified& c) { return {{"value", c.value}, {"error", c.error}}; }

template <std::size_t N>
Json to_json(const std::array<double, N>& p) {
  Json a = Json::array();
  for (double v : p) a.push_back(v);
  return a;
}

inline Json to_json(const ContentProfile& p) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    rows.push_back({{"r", p.radii[i]}, {"measure", to_json(p.measure[i])}, {"content", p.values[i]}});
  }
  return {{"trend", to_string(p.trend)}, {"sup", p.sup},          {"exponent", p.exponent},
          {"partial", p.partial},        {"note", p.note},         {"profile", rows}};
}

inline Json to_json(const CertificateReport& r) {
  return {{"ok", r.ok()},
          {"pieces", r.pieces},
          {"tag_failures", r.tag_failures},
          {"fineness_failures", r.fineness_failures},
          {"regularity_failures", r.regularity_failures},
          {"overlaps", r.overlaps},
          {"tiles", r.tiles},
          {"full", r.full},
          {"remainder_mass", r.remainder_mass},
          {"remainder_g", r.remainder_g},
          {"min_regularity", r.min_regularity},
          {"max_diameter", r.max_diameter},
          {"problems", r.problems}};
}

inline Json summary_json(const TaggedFamily& f) {
  return {{"pieces", f.pieces.size()},
          {"charts", f.charts.size()},
          {"epsilon", f.epsilon},
          {"excision_radius", f.radius},
          {"remainder_mass", f.remainder_mass},
          {"remainder_g", f.remainder_g},
          {"g", f.g_name},
          {"body_mass", f.body_mass()},
          {"max_diameter", f.max_diameter()},
          {"min_regularity", f.pieces.empty() ? 0.0 : f.min_regularity()},
          {"chart_eta", f.chart_eta},
          {"evidence", f.evidence}};
}

/// One row per piece: tag, id, diameter, masses, regularity, gauge, eta.
inline void write_family_csv(std::ostream& os, const TaggedFamily& f) {
  os << "piece,chart,tag_x,tag_y,tag_z,diam,mass,boundary_mass,reg,delta_tag,eta_tag\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < f.pieces.size(); ++i) {
    const auto& p = f.pieces[i];
    os << i << ',' << p.chart << ',' << p.tag[0] << ',' << p.tag[1] << ',' << p.tag[2] << ',' << p.diameter << ','
       << p.mass << ',' << p.boundary_mass << ',' << p.regularity << ',' << p.gauge << ',' << p.eta << '\n';
  }
}

/// Piece geometry: parameter rectangles with their tags.
inline Json geometry_json(const TaggedFamily& f) {
  Json a = Json::array();
  for (const auto& p : f.pieces) {
    const Rect r = carrier_rects(p.piece).front();
    a.push_back({{"chart", p.chart}, {"rect", {r.x0, r.x1, r.y0, r.y1}}, {"tag", to_json(p.param_tag)}});
  }
  return a;
}

inline Json to_json(const StokesReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.riemann) {
    rows.push_back({{"gauge", row.gauge},
                    {"pieces", row.pieces},
                    {"max_diameter", row.max_diameter},
                    {"min_regularity", row.min_regularity},
                    {"remainder_g", row.remainder_g},
                    {"riemann_sum", row.riemann_sum},
                    {"gap_to_rhs", row.gap_to_rhs}});
  }
  return {{"verdict", to_string(r.verdict)},
          {"lhs", to_json(r.lhs)},
          {"rhs", to_json(r.rhs)},
          {"gap", r.gap},
          {"tol", r.tol},
          {"analytic_differential", r.analytic_differential},
          {"riemann", rows},
          {"note", r.note}};
}

inline void write_riemann_csv(std::ostream& os, const StokesReport& r) {
  os << std::setprecision(17) << "gauge,pieces,max_diam,riemann_sum,rhs,gap\n";
  for (const auto& row : r.riemann) {
    os << row.gauge << ',' << row.pieces << ',' << row.max_diameter << ',' << row.riemann_sum << ',' << r.rhs.value
       << ',' << row.gap_to_rhs << '\n';
  }
}

inline Json to_json(const SaksHenstockReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"j", row.j},
                    {"max_diam", row.max_diameter},
                    {"riemann_sum", row.riemann_sum},
                    {"oracle", row.oracle},
                    {"abs_err", row.abs_error},
                    {"pieces", row.pieces}});
  }
  Json j{{"oracle", to_json(r.oracle)}, {"tau", r.tau}, {"rows", rows}, {"note", r.note}};
  j["first_j"] = r.first_j ? Json(*r.first_j) : Json(nullptr);
  return j;
}

/// Error curve: refinement j, max_diam, riemann_sum, oracle, abs_err.
inline void write_error_curve_csv(std::ostream& os, const SaksHenstockReport& r) {
  os << std::setprecision(17) << "j,max_diam,riemann_sum,oracle,abs_err\n";
  for (const auto& row : r.rows) {
    os << row.j << ',' << row.max_diameter << ',' << row.riemann_sum << ',' << row.oracle << ',' << row.abs_error
       << '\n';
  }
}

inline Json to_json(const SurfaceParams& p) {
  return {{"a", p.a},
          {"h", p.h},
          {"lambda_inverse", p.inv_lambda},
          {"k_max", p.truncation()},
          {"flags", {{"area", p.area_flag()}, {"length", p.length_flag()}, {"continuity", p.continuity_flag()}}}};
}

inline Json to_json(const FailureReport& r) {
  Json sup = Json::array();
  for (const auto& row : r.sup_table) {
    sup.push_back({{"k", row.k}, {"y", row.y}, {"sup", row.sup}, {"envelope", row.envelope}});
  }
  Json mass = Json::array();
  for (const auto& row : r.mass_table) {
    mass.push_back({{"k", row.k},
                    {"area", row.area},
                    {"error", row.error},
                    {"bound", row.bound},
                    {"partial_sum", row.partial_sum}});
  }
  return {{"params", to_json(r.params)},
          {"violations", r.violations},
          {"refused", r.refused},
          {"failure_shown", r.failure_shown},
          {"circulation", to_json(r.circulation)},
          {"tangential", {{"samples", r.tangential_samples}, {"max", r.tangential_max}, {"mean", r.tangential_mean}}},
          {"sup_table", sup},
          {"sup_decreasing", r.sup_decreasing},
          {"envelope_constant", r.envelope_constant},
          {"within_envelope", r.within_envelope},
          {"content", to_json(r.content)},
          {"mass_table", mass},
          {"tail_bound", r.tail_bound},
          {"mass", to_json(r.mass)},
          {"boundary_mass", to_json(r.boundary_mass)},
          {"expected_boundary_mass", r.expected_boundary_mass}};
}

/// Per strip: k, A_k, bound, L(y_k), sup |omega| on the section, content.
inline void write_strips_csv(std::ostream& os, const FailureReport& r, const SurfaceModel& m) {
  os << std::setprecision(17) << "k,area,bound,length,sup_omega,content\n";
  for (const auto& row : r.mass_table) {
    const double len = row.k < m.strips() ? m.section_length(0.0, std::numbers::pi, m.y_k(row.k), {}).value : 0.0;
    std::string sup, content;
    for (const auto& s : r.sup_table) {
      if (s.k == row.k) sup = [&] {
        std::ostringstream o;
        o << std::setprecision(17) << s.sup;
        return o.str();
      }();
    }
    if (static_cast<std::size_t>(row.k) < r.content.values.size()) {
      std::ostringstream o;
      o << std::setprecision(17) << r.content.values[row.k];
      content = o.str();
    }
    os << row.k << ',' << row.area << ',' << row.bound << ',' << len << ',' << sup << ',' << content << '\n';
  }
}

inline Json to_json(const CylindricalReport& r) {
  Json rings = Json::array();
  for (const auto& row : r.rings) {
    rings.push_back({{"k", row.k},
                     {"radius", row.radius},
                     {"length", row.length},
                     {"length_floor", row.length_floor},
                     {"area", row.area},
                     {"area_error", row.area_error},
                     {"bound", row.bound},
                     {"sup", row.sup}});
  }
  return {{"experimental", r.experimental},
          {"params", to_json(r.params)},
          {"violations", r.violations},
          {"refused", r.refused},
          {"failure_shown", r.failure_shown},
          {"circulation", to_json(r.circulation)},
          {"tangential", {{"samples", r.tangential_samples}, {"max", r.tangential_max}}},
          {"sup_decreasing", r.sup_decreasing},
          {"area_sum", r.area_sum},
          {"tail_bound", r.tail_bound},
          {"rings", rings}};
}

inline void write_content_csv(std::ostream& os, const ContentProfile& p, const std::string& grid) {
  os << std::setprecision(17);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    os << grid << ',' << i << ',' << p.radii[i] << ',' << p.measure[i].value << ',' << p.values[i] << '\n';
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw StructuralError("cannot write " + path);
  f << text;
}

}  // namespace stokeslab

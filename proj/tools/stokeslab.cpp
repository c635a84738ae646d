// Command-line front end.  Exit codes: 0 claim verified, 1 claim fails,
// 2 refusal or undecided, 3 certificate/depth/budget exhausted, 64 usage.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "stokeslab/stokeslab.hpp"

namespace {

using namespace stokeslab;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFails = 1;
constexpr int kRefused = 2;
constexpr int kExhausted = 3;
constexpr int kUsage = 64;

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

class Output {
 public:
  Output(const std::string& dir, const std::string& command) : dir_(dir) {
    fs::create_directories(dir_);
    report_["schema"] = kSchema;
    report_["command"] = command;
  }
  Json& report() { return report_; }
  void csv(const std::string& name, const std::string& text) {
    write_text((dir_ / name).string(), text);
    report_["files"].push_back(name);
  }
  void finish(int code) {
    report_["exit_code"] = code;
    write_text((dir_ / "report.json").string(), report_.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  Json report_;
};

template <class F>
std::string csv_text(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

Json input_echo(const Scene& s) { return s.raw; }

int run_cousin(const Common& c) {
  const Scene s = load_scene(read_json_file(c.config));
  const auto& j = s.raw;
  const Gauge delta = config::gauge(config::need(j, "gauge"), s.singular);
  const RegularityFn eta = config::regularity(j.value("regularity", Json()));
  const SubadditiveFn g = config::subadditive(j.value("subadditive", Json()), s);
  const double eps = config::get_or(j, "epsilon", 1e-3);
  HowardCousinOptions opt;
  opt.max_generation = config::get_or(j, "max_generation", opt.max_generation);
  Output out(c.out, "cousin");
  out.report()["input"] = input_echo(s);
  const TaggedFamily fam = howard_cousin(s.current, s.singular, delta, eta, g, eps, opt);
  const CertificateReport cert = check_certificates(fam, delta, eta, g);
  out.report()["family"] = summary_json(fam);
  out.report()["certificate"] = to_json(cert);
  if (config::get_or(j, "geometry", false)) out.report()["geometry"] = geometry_json(fam);
  out.csv("family.csv", csv_text([&](std::ostream& os) { write_family_csv(os, fam); }));
  const int code = cert.ok() ? kOk : kFails;
  out.finish(code);
  std::cout << "pieces " << fam.pieces.size() << ", remainder " << fam.remainder_g << ", certificates "
            << (cert.ok() ? "OK" : "FAILED") << "\n";
  return code;
}

int run_stokes(const Common& c) {
  const Scene s = load_scene(read_json_file(c.config));
  if (!s.form) throw ConfigError("stokes needs a form");
  const auto& j = s.raw;
  StokesOptions opt;
  if (c.tol) opt.tol = *c.tol;
  else opt.tol = config::get_or(j, "tol", opt.tol);
  opt.eps = config::get_or(j, "epsilon", opt.eps);
  opt.schedule = config::get_or(j, "schedule", opt.schedule);
  opt.riemann = config::get_or(j, "riemann", opt.riemann);
  if (s.model) {
    // the tensor quadrature cannot follow the strip oscillations
    const int strips = config::get_or(j, "lhs_strips", 4);
    const std::uint64_t seed = c.seed.value_or(config::get_or<std::uint64_t>(j, "seed", 7));
    opt.lhs_oracle = [&s, strips, seed] {
      const auto t = tangential_integral(*s.model, *s.form, strips, 64, seed);
      return t.total();
    };
  }
  Output out(c.out, "stokes");
  out.report()["input"] = input_echo(s);
  const StokesReport rep = stokes_check(s.current, *s.form, s.singular, opt);
  out.report()["stokes"] = to_json(rep);
  out.csv("riemann.csv", csv_text([&](std::ostream& os) { write_riemann_csv(os, rep); }));
  const int code = rep.verdict == Verdict::Holds ? kOk : rep.verdict == Verdict::Fails ? kFails : kRefused;
  out.finish(code);
  std::cout << "lhs " << rep.lhs.value << ", rhs " << rep.rhs.value << ", gap " << rep.gap << ": "
            << to_string(rep.verdict) << "\n";
  return code;
}

int run_counterexample(const Common& c, bool cylindrical) {
  const auto j = read_json_file(c.config);
  const Scene s = load_scene(j);
  if (!s.model) throw ConfigError("counterexample needs current.kind = \"counterexample\"");
  const auto& cj = j.value("counterexample", Json::object());
  const std::uint64_t seed = c.seed.value_or(config::get_or<std::uint64_t>(cj, "seed", 1));
  Output out(c.out, cylindrical ? "counterexample --cylindrical" : "counterexample");
  out.report()["input"] = j;
  int code = kFails;
  if (cylindrical) {
    CylindricalModel m(s.model->params());
    const auto rep = verify_cylindrical(m, config::get_or(cj, "samples", 200), seed);
    out.report()["cylindrical"] = to_json(rep);
    code = rep.refused ? kRefused : rep.failure_shown ? kOk : kFails;
    std::cout << "[experimental] cylindrical circulation " << rep.circulation.value << ", failure "
              << (rep.failure_shown ? "shown" : "not shown") << "\n";
  } else {
    FailureConfig cfg;
    cfg.samples = config::get_or(cj, "samples", cfg.samples);
    cfg.seed = seed;
    cfg.sample_strips = config::get_or(cj, "sample_strips", cfg.sample_strips);
    const auto rep = verify_failure(s.model, cfg);
    out.report()["failure"] = to_json(rep);
    out.csv("strips.csv", csv_text([&](std::ostream& os) { write_strips_csv(os, rep, *s.model); }));
    code = rep.refused ? kRefused : rep.failure_shown ? kOk : kFails;
    std::cout << "circulation " << rep.circulation.value << ", tangential max " << rep.tangential_max
              << ", content " << to_string(rep.content.trend) << ", failure "
              << (rep.failure_shown ? "shown" : rep.refused ? "refused" : "not shown") << "\n";
  }
  out.finish(code);
  return code;
}

int run_minkowski(const Common& c) {
  const Scene s = load_scene(read_json_file(c.config));
  const auto& mj = s.raw.value("minkowski", Json::object());
  const double r0 = config::get_or(mj, "r0", 0.4);
  const auto qs = config::get_or(mj, "q", std::vector<double>{1.0 / 3.0, 0.2});
  if (qs.empty()) throw ConfigError("minkowski.q needs at least one ratio");
  // one step count for every grid, or one per grid
  std::vector<int> steps(qs.size(), 12);
  if (mj.contains("steps")) {
    if (mj["steps"].is_array()) steps = mj["steps"].get<std::vector<int>>();
    else steps.assign(qs.size(), mj["steps"].get<int>());
  }
  if (steps.size() != qs.size()) throw ConfigError("minkowski.steps must match minkowski.q");
  Output out(c.out, "minkowski");
  out.report()["input"] = s.raw;
  std::ostringstream csv;
  csv << "grid,j,r,measure,content\n";
  Json grids = Json::array();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double q = qs[i];
    const auto p = intrinsic_content(s.current, s.singular, r0, q, steps[i]);
    Json g = to_json(p);
    g["q"] = q;
    grids.push_back(g);
    std::ostringstream name;
    name << q;
    write_content_csv(csv, p, name.str());
  }
  out.report()["grids"] = grids;
  ContentBudget budget{r0, qs.front(), steps.front()};
  const auto ev = disposability_evidence(s.current, s.singular, budget);
  out.report()["disposable"] = {{"certified", ev.certified}, {"constant", ev.constant}, {"reason", ev.reason}};
  out.csv("content.csv", csv.str());
  const int code = ev.certified ? kOk : kRefused;
  out.finish(code);
  std::cout << ev.reason << (ev.certified ? ", disposable" : ", not certified disposable") << "\n";
  return code;
}

int run_slice(const Common& c) {
  const Scene s = load_scene(read_json_file(c.config));
  if (s.singular.empty()) throw ConfigError("slice needs a nonempty singular_set");
  const auto& sj = s.raw.value("slice", Json::object());
  auto radii = config::get_or(sj, "radii", std::vector<double>{});
  if (radii.empty()) {
    const double r1 = config::get_or(sj, "r_max", 0.25);
    const int n = config::get_or(sj, "count", 33);
    for (int i = 1; i <= n; ++i) radii.push_back(r1 * i / n);
  }
  Output out(c.out, "slice");
  out.report()["input"] = s.raw;
  std::ostringstream csv;
  csv << std::setprecision(17) << "requested,radius,pieces,mass,error\n";
  Json rows = Json::array();
  for (double r : radii) {
    const auto sl = slice(s.current, s.singular, r);
    csv << sl.requested << ',' << sl.radius << ',' << sl.pieces.size() << ',' << sl.mass.value << ','
        << sl.mass.error << '\n';
    rows.push_back({{"requested", sl.requested}, {"radius", sl.radius}, {"mass", to_json(sl.mass)}});
  }
  const auto co = coarea_slice_check(s.current, s.singular, radii);
  out.report()["slices"] = rows;
  out.report()["coarea"] = {{"integral", co.integral}, {"mass", to_json(co.mass)}, {"holds", co.holds}};
  out.csv("slices.csv", csv.str());
  const int code = co.holds ? kOk : kFails;
  out.finish(code);
  std::cout << "slice integral " << co.integral << " vs mass " << co.mass.value << (co.holds ? ": ok" : ": VIOLATED")
            << "\n";
  return code;
}

int run_saks_henstock(const Common& c) {
  const Scene s = load_scene(read_json_file(c.config));
  const auto& hj = config::need(s.raw, "saks_henstock");
  const ScalarField f = config::scalar(config::need(hj, "integrand"));
  const double eps1 = config::get_or(hj, "eps1", 1e-4);
  const int max_j = config::get_or(hj, "max_j", 8);
  const std::string tags = config::get_or<std::string>(hj, "tags", "center");
  if (tags != "center" && tags != "corner") throw ConfigError("tags are \"center\" or \"corner\"");
  Output out(c.out, "saks-henstock");
  out.report()["input"] = s.raw;
  const auto rep = saks_henstock_test(f, s.current, eps1, max_j, tags == "center" ? TagRule::Center : TagRule::LowerCorner);
  out.report()["saks_henstock"] = to_json(rep);
  out.csv("error_curve.csv", csv_text([&](std::ostream& os) { write_error_curve_csv(os, rep); }));
  const int code = rep.first_j ? kOk : kFails;
  out.finish(code);
  std::cout << "oracle " << rep.oracle.value << ", "
            << (rep.first_j ? "below eps1 from j = " + std::to_string(*rep.first_j) : "never below eps1") << "\n";
  return code;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kUsage;
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefused;
  } catch (const CertificateError& e) {
    std::cerr << "certificate: " << e.what() << "\n";
    return kExhausted;
  } catch (const DepthError& e) {
    std::cerr << "depth: " << e.what() << "\n";
    return kExhausted;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExhausted;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExhausted;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stokeslab: Stokes' theorem on currents with exceptional sets"};
  app.require_subcommand(1);
  Common common;
  bool cylindrical = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON scene (schema stokeslab/v1)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory for report.json and CSV files");
    sub->add_option("--seed", common.seed, "seed for sampled checks (overrides the config)");
    sub->add_option("--tol", common.tol, "tolerance on |lhs - rhs| (overrides the config)");
  };

  auto* cousin = app.add_subcommand(
      "cousin",
      "Howard-Cousin lemma: build a full, delta-fine, eta-regular tagged family away from the exceptional set "
      "and verify every certificate independently");
  auto* stokes = app.add_subcommand(
      "stokes", "Stokes identity: compare the integral of d omega over T with the circulation of omega on the "
                "boundary, directly and by Riemann sums over tagged families");
  auto* counter = app.add_subcommand(
      "counterexample",
      "Sharpness of the content hypothesis: on the oscillating surface omega is closed on T, yet its boundary "
      "circulation is 1 and the exceptional set has divergent content");
  counter->add_flag("--cylindrical", cylindrical, "experimental: radial variant with ring oscillations");
  auto* mink = app.add_subcommand(
      "minkowski", "Disposability: intrinsic content of the exceptional set on geometric radius grids");
  auto* slc = app.add_subcommand("slice", "Slicing by distance to the exceptional set and the coarea inequality");
  auto* sh = app.add_subcommand(
      "saks-henstock", "Riemann sums of a continuous integrand against ||T|| converge under fine gauges");
  for (auto* s : {cousin, stokes, counter, mink, slc, sh}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*cousin) return guarded([&] { return run_cousin(common); });
  if (*stokes) return guarded([&] { return run_stokes(common); });
  if (*counter) return guarded([&] { return run_counterexample(common, cylindrical); });
  if (*mink) return guarded([&] { return run_minkowski(common); });
  if (*slc) return guarded([&] { return run_slice(common); });
  if (*sh) return guarded([&] { return run_saks_henstock(common); });
  return kUsage;
}

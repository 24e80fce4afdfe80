#include "norden/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "norden/connection.hpp"
#include "norden/errors.hpp"

namespace norden {

using nlohmann::json;

namespace {

constexpr double kCheckTolAnalytic = 1e-9;
constexpr double kCheckTolTable = 1e-6;

double member_tol(const RunConfig& cfg, const CoefficientFamily& fam) {
  if (cfg.tol_member > 0.0) return cfg.tol_member;
  return fam.analytic ? 1e-6 : 1e-4;
}

std::vector<TangentPoint> sample_for(const RunConfig& cfg, const CoefficientFamily& fam) {
  SamplingConfig sc = cfg.sampling;
  sc.t_hi = std::min(sc.t_hi, 0.9 * fam.t_max);
  sc.t_lo = std::min(sc.t_lo, sc.t_hi);
  return sample_points(cfg.base, sc);
}

std::vector<double> t_grid(const CoefficientFamily& fam, double hi, int count = 17) {
  hi = std::min(hi, 0.9 * fam.t_max);
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) ts.push_back(hi * i / (count - 1));
  return ts;
}

json residuals_json(const ResidualSet& rs) {
  return json{{"F=0", rs.ak},     {"eq4.1", rs.w1},       {"eq5.1", rs.w1w2},
              {"eq6.1", rs.w3},   {"Phi=0", rs.w2w3},     {"eq9.1", rs.w1w3},
              {"norden", rs.norden}, {"nijenhuis", rs.nijenhuis}};
}

json classes_json(const ClassReport& rep) {
  json out = json::object();
  for (const auto& e : rep.entries)
    out[class_name(e.cls)] = {{"residual", e.residual}, {"verdict", verdict_name(e.verdict)}};
  return out;
}

std::string classification_label(const ClassReport& rep) {
  if (rep.inconsistency) return "inconsistent";
  if (rep.member(NordenClass::AK)) return "anti-Kahler";
  static const NordenClass kBasic[] = {NordenClass::W1, NordenClass::W2, NordenClass::W3};
  for (NordenClass c : kBasic)
    if (rep.member(c)) return std::string("strictly ") + class_name(c);
  static const NordenClass kSums[] = {NordenClass::W1W2, NordenClass::W1W3,
                                      NordenClass::W2W3};
  for (NordenClass c : kSums)
    if (rep.member(c)) return std::string("strictly ") + class_name(c);
  if (rep.member(NordenClass::W1W2W3)) return "generic Norden (w1+w2+w3 only)";
  return "not a Norden structure at tolerance";
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

json report_skeleton(const char* command, const RunConfig& cfg) {
  return json{{"schema", 1}, {"command", command}, {"config", config_to_json(cfg)}};
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  try {
    if (j.contains("schema")) {
      cfg.schema = j.at("schema").get<int>();
      if (cfg.schema != 1) throw ConfigError("unsupported config schema");
    }
    if (j.contains("base")) {
      const auto& b = j.at("base");
      cfg.base.n = b.value("n", 2);
      cfg.base.c = b.value("c", 1.0);
      if (cfg.base.n < 2) throw ConfigError("base dimension must be >= 2");
    }
    if (j.contains("family")) {
      const auto& f = j.at("family");
      FamilySpec& fs = cfg.family;
      fs.kind = f.value("kind", fs.kind);
      fs.A = f.value("A", fs.A);
      fs.B = f.value("B", fs.B);
      fs.a1 = f.value("a1", fs.a1);
      fs.a3 = f.value("a3", fs.a3);
      fs.b1 = f.value("b1", fs.b1);
      fs.b3 = f.value("b3", fs.b3);
      fs.c1 = f.value("c1", fs.c1);
      fs.c3 = f.value("c3", fs.c3);
      fs.d1 = f.value("d1", fs.d1);
      fs.d3 = f.value("d3", fs.d3);
      fs.a1_0 = f.value("a1_0", fs.a1_0);
      fs.a3_0 = f.value("a3_0", fs.a3_0);
      fs.c1_0 = f.value("c1_0", fs.c1_0);
      fs.c3_0 = f.value("c3_0", fs.c3_0);
      fs.d1_0 = f.value("d1_0", fs.d1_0);
      fs.d3_0 = f.value("d3_0", fs.d3_0);
      fs.t_max = f.value("t_max", fs.t_max);
      fs.step = f.value("step", fs.step);
      fs.b_curvature = f.value("b_curvature", fs.b_curvature);
      if (f.contains("coeffs"))
        for (const auto& [k, v] : f.at("coeffs").items())
          fs.coeffs[k] = v.get<std::string>();
      if (f.contains("perturb"))
        for (const auto& p : f.at("perturb")) {
          FamilySpec::Perturbation pp;
          pp.key = p.at("key").get<std::string>();
          pp.add = p.value("add", 0.0);
          pp.scale = p.value("scale", 1.0);
          pp.recomplete = p.value("recomplete", false);
          fs.perturb.push_back(std::move(pp));
        }
    }
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      cfg.sampling.num_points = s.value("num_points", cfg.sampling.num_points);
      cfg.sampling.seed = s.value("seed", cfg.sampling.seed);
      cfg.sampling.x_radius = s.value("x_radius", cfg.sampling.x_radius);
      // a fiber radius bounds the energy density window: t = |y|^2/2
      if (s.contains("y_radius")) {
        double yr = s.at("y_radius").get<double>();
        cfg.sampling.t_hi = 0.5 * yr * yr;
      }
      cfg.sampling.t_lo = s.value("t_min", cfg.sampling.t_lo);
      cfg.sampling.t_hi = s.value("t_max", cfg.sampling.t_hi);
    }
    if (j.contains("tolerances")) {
      cfg.tol_member = j.at("tolerances").value("member", cfg.tol_member);
      cfg.tol_reject = j.at("tolerances").value("reject", cfg.tol_reject);
    }
    cfg.output = j.value("output", cfg.output);
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  const FamilySpec& fs = cfg.family;
  json fam{{"kind", fs.kind}, {"A", fs.A},       {"B", fs.B},       {"a1", fs.a1},
           {"a3", fs.a3},     {"b1", fs.b1},     {"b3", fs.b3},     {"c1", fs.c1},
           {"c3", fs.c3},     {"d1", fs.d1},     {"d3", fs.d3},     {"a1_0", fs.a1_0},
           {"a3_0", fs.a3_0}, {"c1_0", fs.c1_0}, {"c3_0", fs.c3_0}, {"d1_0", fs.d1_0},
           {"d3_0", fs.d3_0}, {"t_max", fs.t_max}, {"step", fs.step}};
  if (!std::isnan(fs.b_curvature)) fam["b_curvature"] = fs.b_curvature;
  if (!fs.coeffs.empty()) fam["coeffs"] = fs.coeffs;
  if (!fs.perturb.empty()) {
    json ps = json::array();
    for (const auto& p : fs.perturb)
      ps.push_back({{"key", p.key}, {"add", p.add}, {"scale", p.scale},
                    {"recomplete", p.recomplete}});
    fam["perturb"] = ps;
  }
  return json{{"schema", cfg.schema},
              {"base", {{"n", cfg.base.n}, {"c", cfg.base.c}}},
              {"family", fam},
              {"sampling",
               {{"num_points", cfg.sampling.num_points},
                {"seed", cfg.sampling.seed},
                {"x_radius", cfg.sampling.x_radius},
                {"t_min", cfg.sampling.t_lo},
                {"t_max", cfg.sampling.t_hi}}},
              {"tolerances", {{"member", cfg.tol_member}, {"reject", cfg.tol_reject}}},
              {"threads", cfg.threads}};
}

RunResult run_check(const RunConfig& cfg) {
  Timer timer;
  CoefficientFamily fam = build_family(cfg.family, cfg.base);
  std::vector<double> ts = t_grid(fam, cfg.sampling.t_hi);
  ConstraintReport rep = check_family(fam, ts);

  std::vector<TangentPoint> pts = sample_for(cfg, fam);
  FrameResiduals fr = frame_residuals(fam, cfg.base, pts);

  const double tol = fam.analytic ? kCheckTolAnalytic : kCheckTolTable;
  json constraints = json::object();
  for (const auto& e : rep.entries) constraints[e.name] = e.max_residual;
  constraints["nondegeneracy-min"] = rep.min_nondegeneracy;

  bool pass = rep.pass(tol) && fr.j_squared < 1e-10 && fr.norden < 1e-10;
  std::string failed;
  for (const auto& e : rep.entries)
    if (e.max_residual >= tol) failed += (failed.empty() ? "" : ", ") + e.name;

  json rj = report_skeleton("check", cfg);
  rj["family"] = fam.name;
  rj["constraints"] = constraints;
  rj["residuals"] = {{"J2+I", fr.j_squared}, {"JtGJ+G", fr.norden}};
  rj["tolerance"] = tol;
  if (!failed.empty()) rj["failed_constraints"] = failed;
  rj["verdict"] = pass ? "pass" : "fail";
  rj["timing"] = {{"seconds", timer.seconds()}};
  return RunResult{std::move(rj), pass ? 0 : 1};
}

RunResult run_classify(const RunConfig& cfg) {
  Timer timer;
  CoefficientFamily fam = build_family(cfg.family, cfg.base);
  std::vector<TangentPoint> pts = sample_for(cfg, fam);
  ClassReport rep =
      classify(fam, cfg.base, pts, member_tol(cfg, fam), cfg.tol_reject, cfg.threads);
  ResidualSet rs = residual_set(fam, cfg.base, pts, cfg.threads);

  json rj = report_skeleton("classify", cfg);
  rj["family"] = fam.name;
  rj["residuals"] = residuals_json(rs);
  rj["classes"] = classes_json(rep);
  rj["classification"] = classification_label(rep);
  rj["sample_count"] = rep.sample_count;
  rj["tolerance"] = {{"member", rep.tol_member}, {"reject", rep.tol_reject}};

  int code = 0;
  if (rep.inconsistency) {
    rj["error"] = *rep.inconsistency;
    code = 1;
  } else {
    bool any_inconclusive = false;
    for (const auto& e : rep.entries)
      if (e.verdict == Verdict::Inconclusive) any_inconclusive = true;
    code = any_inconclusive ? 2 : 0;
  }
  rj["verdict"] = code == 0 ? "pass" : (code == 2 ? "inconclusive" : "fail");
  rj["timing"] = {{"seconds", timer.seconds()}};
  return RunResult{std::move(rj), code};
}

FamilySpec verify_default_family(const std::string& id) {
  FamilySpec fs;
  if (id == "2.2" || id == "2.4" || id == "3.2") {
    fs.kind = "diagonal-ak";
  } else if (id == "2.3" || id == "5.1") {
    fs.kind = "integrable";
    fs.a1 = "1+t";
    fs.a3 = "t/2";
    fs.c1 = "2+t";
    fs.c3 = "0.1*t";
    fs.d1 = "0.05";
    fs.d3 = "0";
    fs.t_max = 0.55;
  } else if (id == "3.1" || id == "7.1" || id == "8.1" || id == "9.1") {
    fs.kind = "general-ak";
    fs.a1 = "1+t";
    fs.a3 = "t/2";
    fs.c1_0 = 2.0;
    fs.c3_0 = 0.1;
    fs.t_max = 0.55;
    fs.step = 1e-3;
  } else if (id == "4.1") {
    fs.kind = "conformal-ak";
    fs.a1 = "1+t";
    fs.a3 = "t/2";
    fs.c1 = "2+t";
    fs.c3 = "0";
    fs.t_max = 0.55;
  } else if (id == "6.1") {
    fs.kind = "quasi-ak";
    fs.b1 = "0.1";
    fs.b3 = "0.05";
    fs.c1_0 = 1.5;
    fs.c3_0 = 0.1;
    fs.d1_0 = 0.1;
    fs.t_max = 0.5;
    fs.step = 5e-3;
  } else {
    throw ConfigError("unknown verify id '" + id + "'");
  }
  return fs;
}

RunResult run_verify(const std::string& id, const RunConfig& cfg_in, const json& user_family) {
  Timer timer;
  RunConfig cfg = cfg_in;
  {
    // the check's canonical family kind, with any explicitly-set user
    // parameter fields merged on top ("kind" itself is not overridable)
    RunConfig defaults = cfg_in;
    defaults.family = verify_default_family(id);
    FamilySpec fs = defaults.family;
    if (user_family.is_object()) {
      json tmp = config_to_json(defaults);
      for (const auto& [k, v] : user_family.items())
        if (k != "kind") tmp["family"][k] = v;
      fs = parse_config(tmp).family;
    }
    cfg.family = fs;
  }

  CoefficientFamily fam = build_family(cfg.family, cfg.base);
  std::vector<TangentPoint> pts = sample_for(cfg, fam);
  const double tol = member_tol(cfg, fam);
  const double reject = cfg.tol_reject;

  json rj = report_skeleton("verify", cfg);
  rj["theorem"] = id;
  rj["family"] = fam.name;
  json res = json::object(), wit = json::object();
  bool pass = true;
  bool inconclusive = false;

  auto note = [&](const char* key, double value, double bound, bool below) {
    res[key] = value;
    bool ok = below ? value < bound : value > bound;
    if (!ok) pass = false;
  };

  if (id == "2.2") {
    FrameResiduals fr = frame_residuals(fam, cfg.base, pts);
    note("J2+I", fr.j_squared, 1e-10, true);
    FrameResiduals w = frame_residuals(fam.perturbed("a2", 0.1), cfg.base, pts);
    wit["J2+I"] = w.j_squared;
    if (w.j_squared <= reject) pass = false;
  } else if (id == "2.4") {
    FrameResiduals fr = frame_residuals(fam, cfg.base, pts);
    note("JtGJ+G", fr.norden, 1e-10, true);
    ConstraintReport cr = check_family(fam.scaled("c2", -1.0), t_grid(fam, cfg.sampling.t_hi));
    wit["eq2.8"] = cr.entries[2].max_residual;
    if (cr.entries[2].max_residual <= reject) pass = false;
  } else if (id == "2.3") {
    ResidualSet rs = residual_set(fam, cfg.base, pts, cfg.threads);
    note("nijenhuis", rs.nijenhuis, tol, true);
    ResidualSet ws = residual_set(perturb_seed(fam, "b1", 0.1), cfg.base, pts, cfg.threads);
    wit["nijenhuis"] = ws.nijenhuis;
    if (ws.nijenhuis <= 1e-2) pass = false;
  } else if (id == "3.1" || id == "3.2") {
    ResidualSet rs = residual_set(fam, cfg.base, pts, cfg.threads);
    note("F=0", rs.ak, id == "3.1" ? 1e-5 : 1e-6, true);
    ResidualSet ws =
        residual_set(perturb_seed(fam, "d1", 0.05), cfg.base, pts, cfg.threads);
    wit["F=0"] = ws.ak;
    if (ws.ak <= reject) pass = false;
  } else if (id == "4.1") {
    ResidualSet rs = residual_set(fam, cfg.base, pts, cfg.threads);
    note("eq4.1", rs.w1, 1e-5, true);
    note("F=0 (strictness)", rs.ak, reject, false);
    note("Phi=0 (strictness)", rs.w2w3, reject, false);
    ResidualSet ws =
        residual_set(perturb_seed(fam, "d1", 0.05), cfg.base, pts, cfg.threads);
    wit["eq4.1"] = ws.w1;
    if (ws.w1 <= reject) pass = false;
  } else if (id == "5.1") {
    ResidualSet rs = residual_set(fam, cfg.base, pts, cfg.threads);
    note("eq5.1", rs.w1w2, 1e-5, true);
    note("nijenhuis", rs.nijenhuis, 1e-6, true);
    ResidualSet ws = residual_set(perturb_seed(fam, "b1", 0.1), cfg.base, pts, cfg.threads);
    wit["eq5.1"] = ws.w1w2;
    wit["nijenhuis"] = ws.nijenhuis;
    if (ws.w1w2 <= 1e-2 || ws.nijenhuis <= 1e-2) pass = false;
  } else if (id == "6.1") {
    QuasiSeed seed;
    seed.b1 = parse_expr(cfg.family.b1);
    seed.b3 = parse_expr(cfg.family.b3);
    seed.a1_0 = cfg.family.a1_0;
    seed.a3_0 = cfg.family.a3_0;
    seed.c1_0 = cfg.family.c1_0;
    seed.c3_0 = cfg.family.c3_0;
    seed.d1_0 = cfg.family.d1_0;
    seed.d3_0 = cfg.family.d3_0;
    QuasiResult qr = quasi_ak_family(seed, cfg.base, cfg.family.t_max, cfg.family.step);
    res["eq6.1"] = qr.omega3_residual;
    if (qr.omega3_residual >= 1e-4) inconclusive = true;  // achieved, not guaranteed
    ResidualSet ws =
        residual_set(perturb_seed(qr.family, "d1", 0.05), cfg.base, pts, cfg.threads);
    wit["eq6.1"] = ws.w3;
    if (ws.w3 <= reject) pass = false;
  } else if (id == "7.1" || id == "8.1" || id == "9.1") {
    std::vector<double> ts = t_grid(fam, cfg.sampling.t_hi);
    // the family is parallel (F = 0), so every class's necessary law
    // must reproduce the actual coefficient derivatives on it
    auto run = [&](NecessaryId nid, const char* key, double bound) {
      NecessaryReport nr = check_necessary(nid, fam, cfg.base, ts);
      note(key, nr.max_residual, bound, true);
      res[std::string(key) + ".samples_excluded"] = nr.samples_excluded;
    };
    if (id == "7.1") {
      run(NecessaryId::SemiC3, "prop7.1:c3'", 1e-5);
      ResidualSet rs = residual_set(fam, cfg.base, pts, cfg.threads);
      note("Phi=0", rs.w2w3, tol, true);
      // strict-w1 witness: the semi condition must fail there
      RunConfig wcfg = cfg;
      wcfg.family = verify_default_family("4.1");
      CoefficientFamily wfam = build_family(wcfg.family, cfg.base);
      NecessaryReport wr =
          check_necessary(NecessaryId::SemiC3, wfam, cfg.base, t_grid(wfam, cfg.sampling.t_hi));
      wit["prop7.1:c3'"] = wr.max_residual;
      if (wr.max_residual <= reject) pass = false;
    } else if (id == "8.1") {
      run(NecessaryId::SpecialC1, "prop8.1:c1'", 1e-5);
    } else {
      run(NecessaryId::W1W3A1, "prop9.1:a1'", 1e-5);
      run(NecessaryId::W1W3A3, "prop9.1:a3'", 1e-5);
    }
  } else {
    throw ConfigError("unknown verify id '" + id + "'");
  }

  rj["residuals"] = res;
  if (!wit.empty()) rj["witness_residuals"] = wit;
  int code = pass ? (inconclusive ? 2 : 0) : 1;
  rj["verdict"] = code == 0 ? "pass" : (code == 2 ? "inconclusive" : "fail");
  rj["timing"] = {{"seconds", timer.seconds()}};
  return RunResult{std::move(rj), code};
}

RunResult run_dump(const RunConfig& cfg, const std::string& out_dir) {
  Timer timer;
  namespace fs = std::filesystem;
  CoefficientFamily fam = build_family(cfg.family, cfg.base);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory '" + out_dir + "': " + ec.message());

  auto open = [&](const std::string& name) {
    std::ofstream os(fs::path(out_dir) / name);
    if (!os) throw Error("cannot write '" + (fs::path(out_dir) / name).string() + "'");
    return os;
  };

  {
    std::ofstream os = open("coefficients.csv");
    if (auto table = fam.c1.table()) {
      write_table_csv(os, *table);
    } else {
      std::vector<std::pair<std::string, ScalarFn>> fns;
      const char* keys[] = {"a1", "a2", "a3", "b1", "b2", "b3",
                            "c1", "c2", "c3", "d1", "d2", "d3"};
      for (const char* k : keys) fns.emplace_back(k, fam.coefficient(k));
      write_functions_csv(os, fns, std::min(cfg.sampling.t_hi, 0.9 * fam.t_max), 101);
    }
  }

  {
    std::ofstream os = open("f_components.csv");
    os << "point,t,a,b,c,F\n";
    SamplingConfig sc = cfg.sampling;
    sc.num_points = std::min(sc.num_points, 5);
    sc.t_hi = std::min(sc.t_hi, 0.9 * fam.t_max);
    std::vector<TangentPoint> pts = sample_points(cfg.base, sc);
    char buf[40];
    for (std::size_t k = 0; k < pts.size(); ++k) {
      PointTensors pt = point_tensors(fam, cfg.base, pts[k]);
      const int m2 = 2 * pt.n;
      for (int a = 0; a < m2; ++a)
        for (int b = 0; b < m2; ++b)
          for (int c = 0; c < m2; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", pt.F.F(a, b, c));
            os << k << "," << pts[k].t << "," << a << "," << b << "," << c << "," << buf
               << "\n";
          }
    }
  }

  {
    std::ofstream os = open("config.json");
    os << config_to_json(cfg).dump(2) << "\n";
  }

  json rj = report_skeleton("dump", cfg);
  rj["output_dir"] = out_dir;
  rj["files"] = {"coefficients.csv", "f_components.csv", "config.json"};
  rj["verdict"] = "pass";
  rj["timing"] = {{"seconds", timer.seconds()}};
  return RunResult{std::move(rj), 0};
}

std::string report_to_string(const json& report) { return report.dump(2) + "\n"; }

}  // namespace norden

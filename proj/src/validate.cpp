#include "lacuna/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lacuna/errors.hpp"
#include "lacuna/experiments.hpp"
#include "lacuna/schema.hpp"
#include "lacuna/serialize.hpp"

namespace lacuna {
namespace {

bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

void merge(ValidationResult& r, const Verification& v) {
  for (const auto& f : v.failures) r.issues.push_back(f);
  r.pass = r.pass && v.pass;
  for (const auto& [k, x] : v.recomputed.items()) r.recomputed[k] = x;
}

void expect(ValidationResult& r, bool ok, const std::string& what) {
  if (!ok) {
    r.pass = false;
    r.issues.push_back(what);
  }
}

Window window_for(const json& doc, const json* supplied) {
  if (supplied) return window_from_json(*supplied);
  if (doc.contains("window")) return window_from_json(doc["window"]);
  fail(ErrorCode::DanglingReference, "certificate references a window that was not supplied",
       {{"window_id", doc.value("window_id", std::string())}});
}

void check_window_doc(ValidationResult& r, const json& doc) {
  Window w = window_from_json(doc);
  std::string id = window_id(w);
  r.recomputed["id"] = id;
  expect(r, doc.value("id", std::string()) == id, "window id does not match its content");
}

void check_config(ValidationResult& r, const json& doc) {
  ExperimentConfig c = ExperimentConfig::from_json(doc.at("config"));
  r.recomputed["config_hash"] = c.hash();
  expect(r, doc.at("config_hash") == c.hash(), "config_hash does not match the stored config");
}

void check_lset(ValidationResult& r, const json& doc) {
  check_config(r, doc);
  ExperimentConfig cfg = ExperimentConfig::from_json(doc.at("config"));
  FiniteSet lambda = set_from_json(doc.at("set"));
  Schedule sched = Schedule::parse(doc.at("schedule").get<std::string>());
  const json& steps = doc.at("steps");
  expect(r, steps.size() == sched.steps(), "step count differs from the schedule");
  std::vector<double> sizes, d, c;
  for (std::size_t k = 0; k < steps.size() && k < sched.steps(); ++k) {
    const json& st = steps[k];
    auto [e, f] = sched.window(lambda.group(), k, cfg.limits);
    Window w = relation_window(lambda, e, f, cfg.limits);
    std::string tag = "step " + std::to_string(sched.parameter(k)) + ": ";
    expect(r, st.at("window_id") == window_id(w), tag + "window id differs from the rebuilt window");
    DensityCertificate dc = density_from_json(st.at("density"));
    PartitionCertificate pc = partition_from_json(st.at("partition"));
    SplitCertificate sc = split_from_json(st.at("split"));
    for (const auto& v : {verify_certificate(dc, w), verify_certificate(pc, w), verify_certificate(sc, w)}) {
      for (const auto& fmsg : v.failures) expect(r, false, tag + fmsg);
    }
    double slack = cfg.bridge_slack * std::max(1.0, dc.d);
    expect(r, dc.d <= pc.c1 * pc.c1 + pc.c2 * pc.c2 + slack, tag + "bridge inequality fails for the partition");
    expect(r, dc.d <= 2 * (sc.r1 * sc.r1 + sc.r2 * sc.r2) + slack, tag + "bridge inequality fails for the split");
    const json& ratio = st.at("ratio");
    expect(r, close(ratio.at("ratio").get<double>(), ratio.at("truncated_norm").get<double>() / ratio.at("rhs").get<double>()),
           tag + "ratio is not truncated_norm / rhs");
    sizes.push_back(static_cast<double>(e.size()));
    d.push_back(dc.d);
    c.push_back(pc.c);
  }
  VerdictAnalysis a = classify(sizes, d, c, cfg.plateau_slope, cfg.growth_slope);
  r.recomputed["verdict"] = verdict_name(a.verdict);
  r.recomputed["mean_d_slope"] = a.mean_d_slope;
  expect(r, doc.at("verdict") == verdict_name(a.verdict), "verdict differs from the recomputed one");
  expect(r, doc.at("series").at("d") == json(d), "density series differs from the step certificates");
  expect(r, doc.at("series").at("c") == json(c), "partition series differs from the step certificates");
}

void check_sign_average(ValidationResult& r, const json& doc) {
  if (!doc.contains("values")) return;
  std::vector<double> v;
  std::size_t failures = 0;
  for (const auto& x : doc["values"]) {
    if (x.is_null()) ++failures;
    else v.push_back(x.get<double>());
  }
  expect(r, doc["values"].size() == doc.at("trials").get<std::size_t>(), "value count differs from trials");
  expect(r, failures == doc.at("failures").get<std::size_t>(), "failure count differs from the values");
  if (v.empty()) return;
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  r.recomputed["mean"] = mean;
  expect(r, close(mean, doc.at("mean").get<double>()), "mean differs from the values");
}

void check_roundtrip(ValidationResult& r, const json& doc) {
  check_config(r, doc);
  double slack = doc.at("slack").get<double>(), c_hat = doc.at("c_hat").get<double>();
  double bound = 2 * c_hat * (1 + slack);
  r.recomputed["bound"] = bound;
  expect(r, close(bound, doc.at("bound").get<double>()), "bound is not 2 * c_hat * (1 + slack)");
  bool holds = doc.at("split_value").get<double>() <= bound;
  expect(r, holds == doc.at("holds").get<bool>(), "holds flag differs from the recomputed comparison");
  expect(r, holds, "split value exceeds the bound");
  expect(r, close(c_hat, doc.at("sign_average").at("mean").get<double>()), "c_hat differs from the sign average");
  Window w = build_window(weights_from_json(doc.at("phi")), ProductKind::parse(doc.at("product").get<std::string>()),
                          set_from_json(doc.at("rows")), set_from_json(doc.at("cols")));
  expect(r, doc.at("window_id") == window_id(w), "window id differs from the rebuilt window");
  merge(r, verify_certificate(split_from_json(doc.at("split")), w));
}

void check_lpp(ValidationResult& r, const json& doc) {
  check_config(r, doc);
  const json& lhs = doc.at("lhs");
  const json& rhs = doc.at("rhs");
  expect(r, lhs.size() == rhs.size() && lhs.size() == doc.at("trials").get<std::size_t>(), "series lengths differ");
  double slack = doc.at("mc_slack").get<double>();
  std::size_t failures = 0;
  double worst = 0;
  for (std::size_t i = 0; i < lhs.size() && i < rhs.size(); ++i) {
    double a = lhs[i].get<double>(), b = rhs[i].get<double>();
    if (a > b * (1 + slack)) ++failures;
    if (b > 0) worst = std::max(worst, a / b);
  }
  r.recomputed["failures"] = failures;
  r.recomputed["worst_margin"] = worst;
  expect(r, failures == doc.at("failures").get<std::size_t>(), "failure count differs");
  expect(r, close(worst, doc.at("worst_margin").get<double>()), "worst margin differs");
  expect(r, doc.at("pass").get<bool>() == (failures == 0), "pass flag differs");
  expect(r, failures == 0, "inequality violated on some instance");
}

void check_repnorm(ValidationResult& r, const json& doc) {
  bool monotone = true;
  double prev_norm = -1;
  int prev_r = -1;
  for (const auto& row : doc.at("rows")) {
    double n = row.at("truncated_norm").get<double>();
    int rad = row.at("radius").get<int>();
    expect(r, close(row.at("ratio").get<double>(), n / row.at("rhs").get<double>()), "ratio is not truncated_norm / rhs");
    if (prev_norm >= 0 && rad > prev_r && n < prev_norm * (1 - 1e-6)) monotone = false;
    prev_norm = n;
    prev_r = rad;
  }
  r.recomputed["monotone"] = monotone;
  expect(r, monotone == doc.at("monotone").get<bool>(), "monotone flag differs");
}

void check_freeness(ValidationResult& r, const json& doc) {
  FiniteSet s = set_from_json(doc.at("set"));
  int depth = doc.at("depth").get<int>();
  bool holds;
  if (doc.at("check") == "free") {
    FreenessResult f = is_free_set(s, depth);
    holds = f.holds;
    if (!doc.at("holds").get<bool>()) {
      Element prod = identity(s.group());
      for (const auto& x : doc.at("witness")) {
        Element e = s[x.at(0).get<std::size_t>()];
        prod = mul(s.group(), prod, x.at(1).get<int>() < 0 ? inv(s.group(), e) : e);
      }
      expect(r, is_identity(s.group(), prod) && !doc.at("witness").empty(), "witness product is not the identity");
    }
  } else {
    holds = leinert_check(s, depth).holds;
    if (!doc.at("holds").get<bool>()) {
      GroupSpec g = s.group().kind == GroupKind::Natural ? GroupSpec::integers() : s.group();
      Element prod = identity(g);
      const json& w = doc.at("witness");
      for (std::size_t i = 0; i < w.size(); ++i) {
        Element e = s[w[i].get<std::size_t>()];
        prod = mul(g, prod, i % 2 == 0 ? inv(g, e) : e);
      }
      expect(r, is_identity(g, prod) && !w.empty(), "witness product is not the identity");
    }
  }
  r.recomputed["holds"] = holds;
  expect(r, holds == doc.at("holds").get<bool>(), "holds flag differs from a rerun of the check");
}

}  // namespace

json ValidationResult::to_json() const {
  return {{"pass", pass}, {"schema", schema}, {"issues", issues}, {"recomputed", recomputed}};
}

ValidationResult validate_document(const json& doc, const json* window) {
  ValidationResult r;
  if (!doc.is_object()) fail(ErrorCode::InvalidInput, "document is not a JSON object");
  r.schema = schema_name_of(doc);
  json supported = json::array();
  for (int v : kSupportedVersions) supported.push_back(v);
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      std::find(std::begin(kSupportedVersions), std::end(kSupportedVersions), doc["version"].get<int>()) ==
          std::end(kSupportedVersions)) {
    r.pass = false;
    r.issues.push_back("unsupported schema version " + (doc.contains("version") ? doc["version"].dump() : "(missing)") +
                       "; supported versions: " + supported.dump());
    r.recomputed["supported_versions"] = supported;
    return r;
  }
  if (r.schema.empty()) {
    r.pass = false;
    r.issues.push_back("missing or unknown schema tag");
    return r;
  }
  auto names = schema_names();
  if (std::find(names.begin(), names.end(), r.schema) == names.end()) {
    r.pass = false;
    r.issues.push_back("unknown schema '" + r.schema + "'");
    return r;
  }
  for (auto& issue : check_schema(doc, schema_for(r.schema))) expect(r, false, issue);
  if (!r.pass) return r;
  try {
    const std::string& s = r.schema;
    if (s == "set") {
      r.recomputed["size"] = set_from_json(doc).size();
    } else if (s == "window") {
      check_window_doc(r, doc);
    } else if (s == "partition_certificate") {
      merge(r, verify_certificate(partition_from_json(doc), window_for(doc, window)));
    } else if (s == "split_certificate") {
      merge(r, verify_certificate(split_from_json(doc), window_for(doc, window)));
    } else if (s == "density_certificate") {
      merge(r, verify_certificate(density_from_json(doc), window_for(doc, window)));
    } else if (s == "gamma2_certificate") {
      merge(r, verify_certificate(gamma2_from_json(doc)));
    } else if (s == "sign_average") {
      check_sign_average(r, doc);
    } else if (s == "lset_report") {
      check_lset(r, doc);
    } else if (s == "roundtrip_report") {
      check_roundtrip(r, doc);
    } else if (s == "lpp_report") {
      check_lpp(r, doc);
    } else if (s == "repnorm_report") {
      check_repnorm(r, doc);
    } else if (s == "freeness_report") {
      check_freeness(r, doc);
    }
  } catch (const Error& e) {
    r.pass = false;
    r.issues.push_back(std::string(error_code_name(e.code())) + ": " + e.what());
  } catch (const json::exception& e) {
    r.pass = false;
    r.issues.push_back(std::string("malformed field: ") + e.what());
  }
  return r;
}

ValidationResult validate_file(const std::filesystem::path& file, const std::optional<std::filesystem::path>& window) {
  json doc = read_json_file(file);
  if (window) {
    json w = read_json_file(*window);
    return validate_document(doc, &w);
  }
  return validate_document(doc);
}

}  // namespace lacuna

#include "lacuna/serialize.hpp"

#include "lacuna/errors.hpp"

namespace lacuna {
namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("field '") + key + "' has the wrong type", {{"parser", e.what()}});
  }
}

json header(const char* schema) { return {{"schema", schema}, {"version", kSchemaVersion}}; }

json complex_matrix(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd complex_matrix_from(const json& j, Eigen::Index cols_if_empty = 0) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, "matrix must be an array of rows");
  Eigen::Index r = static_cast<Eigen::Index>(j.size());
  Eigen::Index c = r ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  Eigen::MatrixXcd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      fail(ErrorCode::InvalidInput, "matrix rows must have equal length");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

json complex_list(const std::vector<cplx>& v) {
  json a = json::array();
  for (auto z : v) a.push_back(complex_to_json(z));
  return a;
}

std::vector<cplx> complex_list_from(const json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, "expected an array of complex numbers");
  std::vector<cplx> v;
  for (const auto& z : j) v.push_back(complex_from_json(z));
  return v;
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorCode::InvalidInput, "complex numbers are [re, im] pairs or plain numbers");
}

json set_to_json(const FiniteSet& s) {
  json el = json::array();
  for (const auto& e : s.elements()) el.push_back(format_element(s.group(), e));
  return {{"group", s.group().name()}, {"elements", el}};
}

FiniteSet set_from_json(const json& j) {
  GroupSpec g = GroupSpec::parse(get<std::string>(j, "group"));
  const json& el = field(j, "elements");
  if (!el.is_array()) fail(ErrorCode::InvalidInput, "set elements must be an array");
  std::vector<Element> v;
  for (const auto& x : el) {
    if (x.is_string())
      v.push_back(parse_element(g, x.get<std::string>()));
    else if (x.is_number_integer() && g.is_numeric())
      v.push_back(parse_element(g, std::to_string(x.get<std::int64_t>())));
    else
      fail(ErrorCode::InvalidInput, "set elements must be strings");
  }
  return FiniteSet(g, std::move(v));
}

json weights_to_json(const WeightFunction& f) {
  json vals = json::array();
  for (const auto& [x, w] : f.values) vals.push_back({format_element(f.group, x), w.real(), w.imag()});
  return {{"group", f.group.name()}, {"values", vals}, {"description", f.description}};
}

WeightFunction weights_from_json(const json& j) {
  WeightFunction f;
  f.group = GroupSpec::parse(get<std::string>(j, "group"));
  f.description = j.value("description", std::string("weights"));
  for (const auto& v : field(j, "values")) {
    if (!v.is_array() || v.size() < 2 || !v[0].is_string())
      fail(ErrorCode::InvalidInput, "weight values are [element, re, im] triples");
    double re = v[1].get<double>(), im = v.size() > 2 ? v[2].get<double>() : 0.0;
    f.values.emplace_back(parse_element(f.group, v[0].get<std::string>()), cplx(re, im));
  }
  return f;
}

json window_to_json(const Window& w) {
  json j = header("lacuna.window");
  j["rows"] = set_to_json(w.rows);
  j["cols"] = set_to_json(w.cols);
  json entries = json::array();
  for (const auto& e : w.entries) entries.push_back({e.row, e.col, e.weight.real(), e.weight.imag()});
  j["entries"] = entries;
  j["provenance"] = {{"product", w.provenance.product}, {"phi", w.provenance.phi}};
  j["id"] = content_hash(j);
  return j;
}

Window window_from_json(const json& j) {
  FiniteSet rows = set_from_json(field(j, "rows"));
  FiniteSet cols = set_from_json(field(j, "cols"));
  std::vector<WindowEntry> entries;
  for (const auto& e : field(j, "entries")) {
    if (!e.is_array() || e.size() != 4) fail(ErrorCode::InvalidInput, "window entries are [i, j, re, im]");
    if (!e[0].is_number_unsigned() || !e[1].is_number_unsigned())
      fail(ErrorCode::InvalidInput, "window entry indices must be nonnegative integers");
    entries.push_back({e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>(), {e[2].get<double>(), e[3].get<double>()}});
  }
  Provenance p;
  if (j.contains("provenance")) {
    p.product = j["provenance"].value("product", std::string());
    p.phi = j["provenance"].value("phi", std::string());
  }
  return make_window(std::move(rows), std::move(cols), std::move(entries), std::move(p));
}

std::string window_id(const Window& w) { return window_to_json(w).at("id").get<std::string>(); }

json matrix_to_json(const Eigen::MatrixXcd& m) { return complex_matrix(m); }

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (j.is_object()) {
    if (j.contains("entries")) return window_from_json(j).dense();
    if (j.contains("matrix")) return matrix_from_json(j.at("matrix"));
    fail(ErrorCode::InvalidInput, "expected a dense matrix array or a window document");
  }
  return complex_matrix_from(j);
}

std::string matrix_id(const Eigen::MatrixXcd& m) {
  return content_hash({{"rows", m.rows()}, {"cols", m.cols()}, {"matrix", complex_matrix(m)}});
}

json to_json(const PartitionCertificate& c, const Window* embed) {
  json j = header("lacuna.partition-certificate");
  j["window_id"] = c.window_id;
  j["assignment"] = c.assignment;
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["c"] = c.c;
  j["optimality"] = optimality_name(c.optimality);
  j["method"] = c.method;
  if (c.count) j["count"] = *c.count;
  j["seed"] = c.seed;
  j["parameters"] = c.parameters;
  if (embed) j["window"] = window_to_json(*embed);
  return j;
}

PartitionCertificate partition_from_json(const json& j) {
  PartitionCertificate c;
  c.window_id = get<std::string>(j, "window_id");
  c.assignment = get<std::vector<std::uint8_t>>(j, "assignment");
  c.c1 = get<double>(j, "c1");
  c.c2 = get<double>(j, "c2");
  c.c = get<double>(j, "c");
  c.optimality = parse_optimality(get<std::string>(j, "optimality"));
  c.method = get<std::string>(j, "method");
  if (j.contains("count")) c.count = get<std::int64_t>(j, "count");
  c.seed = j.value("seed", std::uint64_t{0});
  c.parameters = j.value("parameters", json::object());
  return c;
}

json to_json(const SplitCertificate& c, const Window* embed) {
  json j = header("lacuna.split-certificate");
  j["window_id"] = c.window_id;
  j["psi1"] = complex_list(c.psi1);
  j["psi2"] = complex_list(c.psi2);
  j["r1"] = c.r1;
  j["r2"] = c.r2;
  j["value"] = c.value;
  j["residual"] = c.residual;
  j["lower_bound"] = c.lower_bound;
  j["iterations"] = c.iterations;
  j["parameters"] = c.parameters;
  if (embed) j["window"] = window_to_json(*embed);
  return j;
}

SplitCertificate split_from_json(const json& j) {
  SplitCertificate c;
  c.window_id = get<std::string>(j, "window_id");
  c.psi1 = complex_list_from(field(j, "psi1"));
  c.psi2 = complex_list_from(field(j, "psi2"));
  c.r1 = get<double>(j, "r1");
  c.r2 = get<double>(j, "r2");
  c.value = get<double>(j, "value");
  c.residual = get<double>(j, "residual");
  c.lower_bound = get<double>(j, "lower_bound");
  c.iterations = get<int>(j, "iterations");
  c.parameters = j.value("parameters", json::object());
  return c;
}

json to_json(const DensityCertificate& c, const Window* embed) {
  json j = header("lacuna.density-certificate");
  j["window_id"] = c.window_id;
  j["d"] = c.d;
  j["n_star"] = c.n_star;
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  j["mode"] = density_mode_name(c.mode);
  j["method"] = c.method;
  if (c.upper_bound) j["upper_bound"] = *c.upper_bound;
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  if (embed) j["window"] = window_to_json(*embed);
  return j;
}

DensityCertificate density_from_json(const json& j) {
  DensityCertificate c;
  c.window_id = get<std::string>(j, "window_id");
  c.d = get<double>(j, "d");
  c.n_star = get<std::size_t>(j, "n_star");
  c.rows = get<std::vector<std::size_t>>(j, "rows");
  c.cols = get<std::vector<std::size_t>>(j, "cols");
  std::string mode = get<std::string>(j, "mode");
  if (mode != "exact" && mode != "heuristic") fail(ErrorCode::InvalidInput, "unknown density mode '" + mode + "'");
  c.mode = mode == "exact" ? DensityMode::Exact : DensityMode::Heuristic;
  c.method = get<std::string>(j, "method");
  if (j.contains("upper_bound")) c.upper_bound = get<double>(j, "upper_bound");
  c.restarts = j.value("restarts", std::size_t{0});
  c.seed = j.value("seed", std::uint64_t{0});
  return c;
}

json to_json(const Gamma2Certificate& c) {
  json j = header("lacuna.gamma2-certificate");
  j["matrix_id"] = c.matrix_id;
  j["matrix"] = complex_matrix(c.matrix);
  j["value"] = c.value;
  j["x"] = complex_matrix(c.x);
  j["y"] = complex_matrix(c.y);
  j["max_row_norm"] = c.max_row_norm;
  j["max_col_norm"] = c.max_col_norm;
  j["residuals"] = {{"primal", c.residuals.primal},
                    {"dual", c.residuals.dual},
                    {"gap", c.residuals.gap},
                    {"psd_min_eig", c.residuals.psd_min_eig},
                    {"diag_slack", c.residuals.diag_slack},
                    {"reconstruction", c.residuals.reconstruction}};
  j["lower_bound"] = c.lower_bound;
  j["gap"] = c.gap;
  j["dual_bound"] = c.dual_bound;
  j["iterations"] = c.iterations;
  j["components"] = c.components;
  j["settings"] = {{"tolerance", c.settings.tolerance},
                   {"max_iterations", c.settings.max_iterations},
                   {"step_fraction", c.settings.step_fraction},
                   {"max_dim", c.settings.max_dim},
                   {"decompose", c.settings.decompose},
                   {"lower_bound_restarts", c.settings.lower_bound_restarts},
                   {"lower_bound_seed", c.settings.lower_bound_seed}};
  j["projective_norm_relation"] = "gamma2 <= projective <= K_G * gamma2, K_G symbolic";
  return j;
}

Gamma2Certificate gamma2_from_json(const json& j) {
  Gamma2Certificate c;
  c.matrix_id = get<std::string>(j, "matrix_id");
  c.matrix = complex_matrix_from(field(j, "matrix"));
  c.value = get<double>(j, "value");
  c.x = complex_matrix_from(field(j, "x"), 1);
  c.y = complex_matrix_from(field(j, "y"), 1);
  c.max_row_norm = get<double>(j, "max_row_norm");
  c.max_col_norm = get<double>(j, "max_col_norm");
  const json& r = field(j, "residuals");
  c.residuals = {get<double>(r, "primal"),      get<double>(r, "dual"),       get<double>(r, "gap"),
                 get<double>(r, "psd_min_eig"), get<double>(r, "diag_slack"), get<double>(r, "reconstruction")};
  c.lower_bound = get<double>(j, "lower_bound");
  c.gap = get<double>(j, "gap");
  c.dual_bound = get<double>(j, "dual_bound");
  c.iterations = get<int>(j, "iterations");
  c.components = get<std::size_t>(j, "components");
  const json& s = field(j, "settings");
  c.settings.tolerance = get<double>(s, "tolerance");
  c.settings.max_iterations = get<int>(s, "max_iterations");
  c.settings.step_fraction = get<double>(s, "step_fraction");
  c.settings.max_dim = get<Eigen::Index>(s, "max_dim");
  c.settings.decompose = get<bool>(s, "decompose");
  c.settings.lower_bound_restarts = get<int>(s, "lower_bound_restarts");
  c.settings.lower_bound_seed = get<std::uint64_t>(s, "lower_bound_seed");
  return c;
}

json to_json(const SignAverage& a, bool with_values) {
  json j = header("lacuna.sign-average");
  j["mean"] = a.mean;
  j["stderr"] = a.stderr_;
  j["trials"] = a.trials;
  j["failures"] = a.failures;
  j["kind"] = sign_kind_name(a.kind);
  j["seed"] = a.seed;
  j["grouping"] = a.grouping;
  if (with_values) {
    json v = json::array();
    for (const auto& x : a.values) v.push_back(x ? json(*x) : json(nullptr));
    j["values"] = v;
  }
  return j;
}

}  // namespace lacuna

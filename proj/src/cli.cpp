#include "lacuna/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "lacuna/density.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/experiments.hpp"
#include "lacuna/gamma2.hpp"
#include "lacuna/partition.hpp"
#include "lacuna/regular_rep.hpp"
#include "lacuna/serialize.hpp"
#include "lacuna/store.hpp"
#include "lacuna/validate.hpp"

namespace lacuna {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_args(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

long long to_int(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) fail(ErrorCode::InvalidInput, "expected an integer, got '" + s + "'");
  return v;
}

struct Common {
  std::string out_path;
  std::string store_dir;
  unsigned threads = 1;
};

struct Emitter {
  const Common& common;
  std::ostream& out;
  std::ostream& err;

  void emit(const json& doc, const json* window = nullptr) const {
    std::string text = dump_json(doc);
    if (common.out_path.empty())
      out << text;
    else
      write_text_file(common.out_path, text);
    if (!common.store_dir.empty()) {
      CertificateStore store(common.store_dir);
      err << "stored " << store.put(doc, window) << "\n";
    }
  }
};

json read_doc(const std::string& path) { return read_json_file(path); }

}  // namespace

FiniteSet parse_set_expression(const std::string& raw, const Limits& limits) {
  std::string text = trim(raw);
  auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')') {
    if (std::filesystem::exists(text)) return set_from_json(read_json_file(text));
    fail(ErrorCode::InvalidInput, "unrecognized set expression '" + raw + "'");
  }
  std::string name = trim(text.substr(0, open));
  std::string body = text.substr(open + 1, text.size() - open - 2);
  if (name == "elements") {
    auto colon = body.find(':');
    if (colon == std::string::npos) fail(ErrorCode::InvalidInput, "elements(G: x, y, ...) needs a group");
    GroupSpec g = GroupSpec::parse(trim(body.substr(0, colon)));
    std::vector<Element> el;
    std::string rest = trim(body.substr(colon + 1));
    if (!rest.empty())
      for (const auto& x : split_args(rest, ',')) el.push_back(parse_element(g, x));
    return FiniteSet(g, std::move(el));
  }
  auto args = split_args(body, ',');
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      fail(ErrorCode::InvalidInput, name + " takes " + std::to_string(n) + " argument(s)", {{"expression", raw}});
  };
  if (name == "gens") {
    want(1);
    return generators(GroupSpec::parse(args[0]));
  }
  if (name == "ball" || name == "sphere") {
    want(2);
    GroupSpec g = GroupSpec::parse(args[0]);
    int r = static_cast<int>(to_int(args[1]));
    return name == "ball" ? ball(g, r, limits) : sphere(g, r, limits);
  }
  if (name == "interval") {
    want(3);
    return interval(GroupSpec::parse(args[0]), to_int(args[1]), to_int(args[2]), limits);
  }
  if (name == "powers2") {
    want(1);
    long long k = to_int(args[0]);
    if (k < 0 || k > 62) fail(ErrorCode::InvalidInput, "powers2 exponent must lie in 0..62");
    std::vector<Element> el;
    for (long long i = 0; i <= k; ++i) el.push_back(Element::integer(std::int64_t{1} << i));
    return FiniteSet(GroupSpec::naturals(), std::move(el));
  }
  fail(ErrorCode::InvalidInput, "unknown set constructor '" + name + "'",
       {{"known", {"gens", "ball", "sphere", "interval", "powers2", "elements"}}});
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lacunary sets, Schur multipliers and factorization norms"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out", common.out_path, "Write the result to a file instead of stdout");
  app.add_option("--store", common.store_dir, "Also store the result in a certificate store");
  app.add_option("--threads", common.threads, "Worker thread cap")->check(CLI::Range(1u, 1024u));
  Emitter em{common, out, err};
  int status = 0;

  // gen-set
  auto* gen = app.add_subcommand("gen-set", "Enumerate a finite set");
  std::string gen_expr;
  gen->add_option("--set", gen_expr, "Set expression")->required();
  gen->callback([&] {
    json doc = set_to_json(parse_set_expression(gen_expr));
    doc["schema"] = "lacuna.set";
    doc["version"] = kSchemaVersion;
    em.emit(doc);
  });

  // window
  auto* win = app.add_subcommand("window", "Build a window psi(s,t) = phi(p(s,t))");
  std::string w_set, w_phi, w_rows, w_cols, w_product = "st";
  double w_scale = 1.0;
  win->add_option("--set", w_set, "Support of an indicator weight");
  win->add_option("--phi", w_phi, "Weight function JSON");
  win->add_option("--rows", w_rows, "Row set expression")->required();
  win->add_option("--cols", w_cols, "Column set expression")->required();
  win->add_option("--product", w_product, "st, st^-1 or s^-1t");
  win->add_option("--scale", w_scale, "Multiply the weights");
  win->callback([&] {
    if (w_set.empty() == w_phi.empty()) fail(ErrorCode::InvalidInput, "give exactly one of --set and --phi");
    WeightFunction phi = w_phi.empty() ? WeightFunction::indicator(parse_set_expression(w_set), w_set)
                                       : weights_from_json(read_doc(w_phi));
    if (w_scale != 1.0) phi = phi.scaled(w_scale);
    em.emit(window_to_json(build_window(phi, ProductKind::parse(w_product), parse_set_expression(w_rows),
                                        parse_set_expression(w_cols))));
  });

  // density
  auto* den = app.add_subcommand("density", "Maximal square density of a window");
  std::string d_window, d_mode = "auto";
  DensityOptions d_opt;
  den->add_option("--window", d_window, "Window JSON")->required();
  den->add_option("--mode", d_mode, "auto, exact or heuristic")->check(CLI::IsMember({"auto", "exact", "heuristic"}));
  den->add_option("--restarts", d_opt.restarts, "Heuristic random restarts");
  den->add_option("--seed", d_opt.seed, "Heuristic seed");
  den->add_option("--side-limit", d_opt.exact_side_limit, "Largest side enumerated exactly");
  den->callback([&] {
    json wj = read_doc(d_window);
    Window w = window_from_json(wj);
    DensityCertificate c = d_mode == "exact"       ? exact_density(w, d_opt.exact_side_limit)
                           : d_mode == "heuristic" ? heuristic_density(w, d_opt.restarts, d_opt.seed)
                                                   : density(w, d_opt);
    em.emit(to_json(c, &w), &wj);
  });

  // decompose
  auto* dec = app.add_subcommand("decompose", "Split a window into row-bounded and column-bounded parts");
  std::string dc_window, dc_mode = "auto";
  WeightedOptions dc_opt;
  SplitSettings dc_split;
  dec->add_option("--window", dc_window, "Window JSON")->required();
  dec->add_option("--mode", dc_mode, "auto, 01, weighted, heuristic or split")
      ->check(CLI::IsMember({"auto", "01", "weighted", "heuristic", "split"}));
  dec->add_option("--exact-limit", dc_opt.exact_entry_limit, "Entry count solved exactly in weighted mode");
  dec->add_option("--tol", dc_split.tolerance, "Split duality gap tolerance");
  dec->callback([&] {
    json wj = read_doc(dc_window);
    Window w = window_from_json(wj);
    if (dc_mode == "split") {
      em.emit(to_json(min_split(w, dc_split), &w), &wj);
      return;
    }
    PartitionCertificate c = dc_mode == "01"          ? min_partition_01(w)
                             : dc_mode == "weighted"  ? min_partition_weighted(w, dc_opt)
                             : dc_mode == "heuristic" ? min_partition_weighted_heuristic(w)
                             : w.is_01()              ? min_partition_01(w)
                                                      : min_partition_weighted(w, dc_opt);
    em.emit(to_json(c, &w), &wj);
  });

  // gamma2
  auto* g2 = app.add_subcommand("gamma2", "Factorization norm certificate of a matrix");
  std::string g_matrix;
  SdpSettings g_set;
  bool g_no_decompose = false;
  g2->add_option("--matrix", g_matrix, "Dense matrix JSON or window JSON")->required();
  g2->add_option("--tol", g_set.tolerance, "Relative residual tolerance");
  g2->add_option("--max-iter", g_set.max_iterations, "Interior point iteration cap");
  g2->add_option("--max-dim", g_set.max_dim, "Row and column cap");
  g2->add_option("--lower-restarts", g_set.lower_bound_restarts, "Restarts of the lower bound search");
  g2->add_flag("--no-decompose", g_no_decompose, "Solve the whole matrix as one block");
  g2->callback([&] {
    g_set.decompose = !g_no_decompose;
    em.emit(to_json(gamma2(matrix_from_json(read_doc(g_matrix)), g_set)));
  });

  // repnorm
  auto* rep = app.add_subcommand("repnorm", "Truncated regular representation norms");
  std::string r_set, r_radii = "2,4,6,8";
  std::optional<double> r_coef;
  RatioSettings r_set_opts;
  rep->add_option("--set", r_set, "Set expression")->required();
  rep->add_option("--radii", r_radii, "Comma separated truncation radii");
  rep->add_option("--coef", r_coef, "Scalar coefficient, default 1/sqrt(|set|)");
  rep->add_option("--tol", r_set_opts.norm.tolerance, "Power iteration tolerance");
  rep->add_option("--max-iter", r_set_opts.norm.max_iterations, "Power iteration cap");
  rep->add_option("--seed", r_set_opts.norm.seed, "Start vector seed");
  rep->add_flag("--no-orbit", [&](std::int64_t) { r_set_opts.allow_orbit = false; }, "Always build the explicit operator");
  rep->callback([&] {
    FiniteSet s = parse_set_expression(r_set);
    if (s.empty()) fail(ErrorCode::InvalidInput, "the set is empty");
    std::vector<int> radii;
    for (const auto& x : split_args(r_radii, ',')) radii.push_back(static_cast<int>(to_int(x)));
    double c = r_coef.value_or(1.0 / std::sqrt(static_cast<double>(s.size())));
    em.emit(repnorm_schedule(s, c, radii, r_set_opts).to_json());
  });

  // signs
  auto* sig = app.add_subcommand("signs", "Average gamma2 over random signs of a window");
  std::string s_window, s_kind = "signs", s_group = "entrywise";
  std::size_t s_trials = 100;
  std::uint64_t s_seed = 0;
  SdpSettings s_sdp;
  sig->add_option("--window", s_window, "Window JSON")->required();
  sig->add_option("--trials", s_trials, "Number of sign draws");
  sig->add_option("--seed", s_seed, "Master seed");
  sig->add_option("--kind", s_kind, "signs or phases")->check(CLI::IsMember({"signs", "phases"}));
  sig->add_option("--grouping", s_group, "entrywise or element")->check(CLI::IsMember({"entrywise", "element"}));
  sig->add_option("--tol", s_sdp.tolerance, "SDP tolerance");
  sig->callback([&] {
    Window w = window_from_json(read_doc(s_window));
    MatrixFamily fam = s_group == "element" ? MatrixFamily::by_group_element(w) : MatrixFamily::entrywise(w);
    em.emit(to_json(sign_average_gamma2(fam, s_trials, s_seed, parse_sign_kind(s_kind), s_sdp, common.threads)));
  });

  // roundtrip
  auto* rt = app.add_subcommand("roundtrip", "Compare the split value with twice the sign-averaged gamma2");
  std::string rt_set, rt_phi, rt_rows, rt_cols, rt_product = "st", rt_kind = "signs", rt_group = "entrywise";
  double rt_scale = 1.0;
  ExperimentConfig rt_cfg;
  rt_cfg.trials = 500;
  rt->add_option("--set", rt_set, "Support of an indicator weight");
  rt->add_option("--phi", rt_phi, "Weight function JSON");
  rt->add_option("--rows", rt_rows, "Row set expression")->required();
  rt->add_option("--cols", rt_cols, "Column set expression")->required();
  rt->add_option("--product", rt_product, "st, st^-1 or s^-1t");
  rt->add_option("--scale", rt_scale, "Multiply the weights");
  rt->add_option("--trials", rt_cfg.trials, "Sign draws");
  rt->add_option("--seed", rt_cfg.seed, "Master seed");
  rt->add_option("--slack", rt_cfg.roundtrip_slack, "Relative slack on 2 C_hat");
  rt->add_option("--kind", rt_kind, "signs or phases")->check(CLI::IsMember({"signs", "phases"}));
  rt->add_option("--grouping", rt_group, "entrywise or element")->check(CLI::IsMember({"entrywise", "element"}));
  rt->callback([&] {
    if (rt_set.empty() == rt_phi.empty()) fail(ErrorCode::InvalidInput, "give exactly one of --set and --phi");
    WeightFunction phi = rt_phi.empty() ? WeightFunction::indicator(parse_set_expression(rt_set), rt_set)
                                        : weights_from_json(read_doc(rt_phi));
    if (rt_scale != 1.0) phi = phi.scaled(rt_scale);
    RoundtripReport r = sign_average_roundtrip(phi, ProductKind::parse(rt_product), parse_set_expression(rt_rows),
                                        parse_set_expression(rt_cols), rt_cfg, parse_sign_kind(rt_kind),
                                        rt_group == "element", common.threads);
    em.emit(r.to_json());
    if (!r.holds) status = exit_status(ErrorCode::VerificationFailed);
  });

  // lpp
  auto* lpp = app.add_subcommand("lpp", "Monte Carlo check of the Khintchine-type predual inequality");
  std::size_t l_d = 3, l_n = 4;
  ExperimentConfig l_cfg;
  l_cfg.trials = 1000;
  lpp->add_option("--d", l_d, "Matrix dimension");
  lpp->add_option("--n", l_n, "Number of terms");
  lpp->add_option("--trials", l_cfg.trials, "Random instances");
  lpp->add_option("--mc-samples", l_cfg.mc_samples, "Phase samples per instance");
  lpp->add_option("--mc-slack", l_cfg.mc_slack, "Relative slack for Monte Carlo error");
  lpp->add_option("--seed", l_cfg.seed, "Master seed");
  lpp->callback([&] {
    LppReport r = lpp_inequality_test(l_d, l_n, l_cfg, common.threads);
    em.emit(r.to_json());
    if (!r.pass) status = exit_status(ErrorCode::VerificationFailed);
  });

  // certify
  auto* cert = app.add_subcommand("certify", "Run the L-set pipeline over a window schedule");
  std::string c_set, c_schedule, c_config, c_csv;
  std::optional<std::uint64_t> c_seed;
  std::optional<std::size_t> c_sign_trials;
  cert->add_option("--set", c_set, "Set expression")->required();
  cert->add_option("--schedule", c_schedule, "balls:a..b or intervals:a..b");
  cert->add_option("--config", c_config, "Experiment config JSON");
  cert->add_option("--seed", c_seed, "Master seed");
  cert->add_option("--sign-trials", c_sign_trials, "Sign-average gamma2 draws per window");
  cert->add_option("--csv", c_csv, "Write the schedule table as CSV");
  cert->callback([&] {
    ExperimentConfig cfg = c_config.empty() ? ExperimentConfig{} : ExperimentConfig::from_json(read_doc(c_config));
    if (!c_schedule.empty()) cfg.schedule = Schedule::parse(c_schedule);
    if (c_seed) cfg.seed = *c_seed;
    if (c_sign_trials) cfg.sign_trials = *c_sign_trials;
    LSetReport r = certify_lset(parse_set_expression(c_set, cfg.limits), cfg, common.threads);
    em.emit(r.to_json());
    if (!c_csv.empty()) write_text_file(c_csv, r.csv());
  });

  // leinert
  auto* lei = app.add_subcommand("leinert", "Bounded-depth Leinert or freeness check");
  std::string le_set, le_check = "leinert";
  int le_depth = 3;
  lei->add_option("--set", le_set, "Set expression")->required();
  lei->add_option("--depth", le_depth, "Search depth");
  lei->add_option("--check", le_check, "leinert or free")->check(CLI::IsMember({"leinert", "free"}));
  lei->callback([&] {
    FiniteSet s = parse_set_expression(le_set);
    em.emit(le_check == "free" ? freeness_to_json(s, is_free_set(s, le_depth)) : leinert_to_json(s, leinert_check(s, le_depth)));
  });

  // validate
  auto* val = app.add_subcommand("validate", "Schema check and recomputation of a certificate");
  std::string v_file, v_window;
  val->add_option("file", v_file, "Certificate JSON")->required();
  val->add_option("--window", v_window, "Window the certificate refers to");
  val->callback([&] {
    ValidationResult r = v_window.empty() ? validate_file(v_file) : validate_file(v_file, v_window);
    out << dump_json(r.to_json());
    if (!r.pass) status = exit_status(ErrorCode::VerificationFailed);
  });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << dump_json({{"error", "invalid-input"}, {"message", e.what()}, {"detail", json::object()}});
    return 1;
  } catch (const Error& e) {
    err << dump_json(e.to_json());
    return exit_status(e.code());
  } catch (const json::exception& e) {
    err << dump_json({{"error", "invalid-input"}, {"message", e.what()}, {"detail", json::object()}});
    return 1;
  }
  return status;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace lacuna

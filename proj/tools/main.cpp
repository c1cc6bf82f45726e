// hpax command-line front end. Parses a JSON config, dispatches one analysis
// through the C API, prints a JSON report to stdout, and (when an output
// directory is given) writes the same report plus CSV series files.
//
// Exit codes: 0 ok, 2 config error, 3 guard violation, 4 numeric failure.
// Blow-up during simulation is reported as data, not a failure.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hpax.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- output

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Serializer with a fixed float policy: %.17g, non-finite values as strings.
// Object keys come out sorted (nlohmann's default map), so output is
// deterministic for a given document.
void dump_json(const json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<size_t>(depth + 1), ' ');
  switch (j.type()) {
  case json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, val] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad_in;
      out += json(key).dump();
      out += ": ";
      dump_json(val, out, depth + 1);
    }
    out += "\n" + pad + "}";
    return;
  }
  case json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    bool first = true;
    for (const auto& val : j) {
      if (!first) out += ",\n";
      first = false;
      out += pad_in;
      dump_json(val, out, depth + 1);
    }
    out += "\n" + pad + "]";
    return;
  }
  case json::value_t::number_float: {
    const double v = j.get<double>();
    if (std::isnan(v))
      out += "\"nan\"";
    else if (std::isinf(v))
      out += v > 0 ? "\"inf\"" : "\"-inf\"";
    else
      out += fmt17(v);
    return;
  }
  default:
    out += j.dump();
    return;
  }
}

std::string dump_json(const json& j) {
  std::string out;
  dump_json(j, out, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------- errors

[[noreturn]] void die(int code, const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(code);
}

int exit_code_for(hpax_status s) {
  switch (s) {
  case HPAX_OK: return 0;
  case HPAX_EINVAL:
  case HPAX_EDOMAIN:
  case HPAX_EUNSUPPORTED:
  case HPAX_EINFEASIBLE: return 2;
  case HPAX_EGUARD: return 3;
  default: return 4;
  }
}

void check(hpax_status s, const std::string& what) {
  if (s == HPAX_OK) return;
  char buf[512];
  hpax_last_error(buf, sizeof buf);
  die(exit_code_for(s), what + ": " + buf);
}

// ---------------------------------------------------------------- handles

template <typename T, void (*F)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { F(p); }
};
using hist_ptr = std::unique_ptr<hpax_history, HandleDeleter<hpax_history, hpax_history_free>>;
using traj_ptr = std::unique_ptr<hpax_trajectory, HandleDeleter<hpax_trajectory, hpax_trajectory_free>>;
using case_ptr = std::unique_ptr<hpax_case_report, HandleDeleter<hpax_case_report, hpax_case_report_free>>;
using qc_ptr = std::unique_ptr<hpax_qc, HandleDeleter<hpax_qc, hpax_qc_free>>;
using sched_ptr = std::unique_ptr<hpax_schedule, HandleDeleter<hpax_schedule, hpax_schedule_free>>;
using setup_ptr = std::unique_ptr<hpax_setup, HandleDeleter<hpax_setup, hpax_setup_free>>;

// ---------------------------------------------------------------- config

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(2, "cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    die(2, std::string("config parse failure: ") + e.what());
  }
  if (!cfg.is_object()) die(2, "config root must be a JSON object");
  return cfg;
}

double need_num(const json& obj, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_number())
    die(2, "config key missing or not a number: " + key);
  return obj[key].get<double>();
}

double opt_num(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) die(2, "config key not a number: " + key);
  return obj[key].get<double>();
}

hpax_params params_from(const json& cfg) {
  hpax_params p{};
  p.A = need_num(cfg, "A");
  p.p2 = need_num(cfg, "p2");
  p.p3 = need_num(cfg, "p3");
  p.p4 = need_num(cfg, "p4");
  p.p5 = need_num(cfg, "p5");
  p.p6 = need_num(cfg, "p6");
  p.tau = opt_num(cfg, "tau", 0.0);
  check(hpax_validate_params(&p), "params");
  return p;
}

std::vector<double> num_array(const json& v, const std::string& what) {
  if (!v.is_array()) die(2, what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) die(2, what + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const char* kHistoryKinds[] = {"constant", "quadexp", "hermite"};

hist_ptr history_from(const json& cfg) {
  if (!cfg.contains("history")) die(2, "config key missing: history");
  const json& h = cfg["history"];
  if (!h.is_object() || !h.contains("kind"))
    die(2, "history must be an object with a `kind`");
  const double r0 = need_num(cfg, "r0");
  const double o0 = need_num(cfg, "o0");
  const std::string kind = h["kind"].get<std::string>();
  const json params = h.contains("params") ? h["params"] : json::object();
  hpax_history* out = nullptr;
  if (kind == "constant") {
    check(hpax_history_constant(need_num(params, "a0"), r0, o0, &out), "history");
  } else if (kind == "quadexp") {
    check(hpax_history_quadexp(need_num(params, "a0"), need_num(params, "lambda"),
                               r0, o0, &out),
          "history");
  } else if (kind == "hermite") {
    const auto t = num_array(params.contains("t") ? params["t"] : json(), "history.params.t");
    const auto v = num_array(params.contains("v") ? params["v"] : json(), "history.params.v");
    const auto d = num_array(params.contains("d") ? params["d"] : json(), "history.params.d");
    if (t.size() != v.size() || t.size() != d.size())
      die(2, "history.params t/v/d must have equal lengths");
    check(hpax_history_hermite(t.data(), v.data(), d.data(),
                               static_cast<int>(t.size()), r0, o0, &out),
          "history");
  } else {
    die(2, "unknown history kind: " + kind);
  }
  return hist_ptr(out);
}

// ---------------------------------------------------------------- reports

json eq_json(const hpax_equilibrium& eq) {
  return {{"a", eq.a},   {"r", eq.r},   {"o", eq.o},  {"K1", eq.K1},
          {"K2", eq.K2}, {"K3", eq.K3}, {"K4", eq.K4}};
}

json cubic_json(const hpax_char_cubic& c) {
  json roots = json::array();
  for (int i = 0; i < 3; ++i)
    roots.push_back({{"re", c.root_re[i]}, {"im", c.root_im[i]}});
  return {{"alpha1", c.alpha1},
          {"alpha2", c.alpha2},
          {"alpha3", c.alpha3},
          {"delta", c.delta},
          {"roots", roots}};
}

const char* kVerdictNames[] = {"asymptotically_stable", "unstable",
                               "inconclusive_non_hyperbolic"};

json verdict_json(const hpax_stability_verdict& v) {
  return {{"kind", kVerdictNames[v.kind]},
          {"alpha1_pos", v.alpha1_pos != 0},
          {"alpha3_pos", v.alpha3_pos != 0},
          {"product", v.product != 0},
          {"max_real_part", v.max_real_part}};
}

json chains_json(const hpax_chain_report& ch) {
  return {{"chain1", ch.chain1 != 0},
          {"chain2", ch.chain2 != 0},
          {"chain3", ch.chain3 != 0},
          {"all_hold", ch.all_hold != 0},
          {"agrees_with_verdict", ch.agrees_with_verdict != 0}};
}

json flags_json(const hpax_trajectory* tr) {
  int hn = 0, hb = 0, hx = 0, fit = 0;
  double tn = 0, tb = 0, tx = 0;
  check(hpax_trajectory_flags(tr, &hn, &tn, &hb, &tb, &hx, &tx, &fit), "flags");
  json out;
  out["nonneg_violation"] = hn ? json(tn) : json(nullptr);
  out["bounds_entry_time"] = hb ? json(tb) : json(nullptr);
  out["blow_up_time"] = hx ? json(tx) : json(nullptr);
  out["fitting_ok"] = fit != 0;
  return out;
}

json state_json(const hpax_state& y) {
  return {{"a", y.a}, {"r", y.r}, {"o", y.o}};
}

// ---------------------------------------------------------------- files

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die(2, "cannot open output file: " + path.string());
  out << content;
  if (!out) die(2, "write failure: " + path.string());
}

// One CSV per channel named <stem>.<channel>.csv with header t,<channel>;
// trajectory flags lead the file as # comment rows.
void write_series(const fs::path& dir, const std::string& rel_prefix,
                  const std::string& stem, const hpax_trajectory* tr,
                  std::vector<std::string>& files) {
  int n = 0;
  check(hpax_trajectory_size(tr, &n), "trajectory");
  int hn = 0, hb = 0, hx = 0, fit = 0;
  double tn = 0, tb = 0, tx = 0;
  check(hpax_trajectory_flags(tr, &hn, &tn, &hb, &tb, &hx, &tx, &fit), "flags");
  std::string head;
  if (hn) head += "# nonneg_violation,t=" + fmt17(tn) + "\n";
  if (hb) head += "# bounds_entry,t=" + fmt17(tb) + "\n";
  if (hx) head += "# blow_up,t=" + fmt17(tx) + "\n";
  head += std::string("# fitting_ok,") + (fit ? "1" : "0") + "\n";

  const char* channels[3] = {"a", "r", "o"};
  for (int c = 0; c < 3; ++c) {
    std::string body = head;
    body += std::string("t,") + channels[c] + "\n";
    for (int i = 0; i < n; ++i) {
      double t = 0;
      hpax_state y{}, dy{};
      check(hpax_trajectory_node(tr, i, &t, &y, &dy), "trajectory node");
      const double v = c == 0 ? y.a : c == 1 ? y.r : y.o;
      body += fmt17(t);
      body += ',';
      body += fmt17(v);
      body += '\n';
    }
    const std::string name = stem + "." + channels[c] + ".csv";
    write_text(dir / name, body);
    files.push_back(rel_prefix + name);
  }
}

// ---------------------------------------------------------------- qc source

qc_ptr make_qc(const json& cfg, json& body) {
  int variant = HPAX_QC_K3_IN_BOTH;
  std::string variant_name = "k3_in_both";
  if (cfg.contains("variant")) {
    variant_name = cfg["variant"].get<std::string>();
    if (variant_name == "k3_delayed_only")
      variant = HPAX_QC_K3_DELAYED_ONLY;
    else if (variant_name != "k3_in_both")
      die(2, "unknown variant: " + variant_name);
  }
  body["variant"] = variant_name;
  hpax_qc* q = nullptr;
  if (cfg.contains("inject")) {
    const json& in = cfg["inject"];
    check(hpax_qc_inject(need_num(in, "p3"), need_num(in, "p6"),
                         need_num(in, "K2"), need_num(in, "K3"), variant, &q),
          "quasi-characteristic");
    body["source"] = "injected";
  } else {
    const hpax_params p = params_from(cfg);
    hpax_equilibrium eq{};
    check(hpax_solve_equilibrium(&p, &eq), "equilibrium");
    check(hpax_qc_build(&p, &eq, variant, &q), "quasi-characteristic");
    body["source"] = "equilibrium";
    body["equilibrium"] = eq_json(eq);
  }
  return qc_ptr(q);
}

json qc_json(const hpax_qc* q) {
  double P[4], Q[2], b[3], delta0 = 0;
  check(hpax_qc_coeffs(q, P, Q, b, &delta0), "qc coefficients");
  return {{"P", {P[0], P[1], P[2], P[3]}},
          {"Q", {Q[0], Q[1]}},
          {"b", {b[0], b[1], b[2]}},
          {"delta0", delta0}};
}

// ---------------------------------------------------------------- commands

json run_equilibrium(const json& cfg) {
  const hpax_params p = params_from(cfg);
  hpax_equilibrium eq{};
  check(hpax_solve_equilibrium(&p, &eq), "equilibrium");
  json body;
  body["equilibrium"] = eq_json(eq);

  double rq[8];
  int nq = 0;
  check(hpax_equilibrium_quartic(&p, rq, 8, &nq), "quartic route");
  json quartic = json::array();
  for (int i = 0; i < nq && i < 8; ++i) quartic.push_back(rq[i]);
  body["quartic_r"] = quartic;

  double J[9];
  check(hpax_jacobian(&p, &eq, J), "jacobian");
  body["jacobian"] = {{J[0], J[1], J[2]}, {J[3], J[4], J[5]}, {J[6], J[7], J[8]}};

  hpax_char_cubic cubic{};
  check(hpax_char_cubic_at(&p, &eq, &cubic), "characteristic cubic");
  body["char_cubic"] = cubic_json(cubic);

  hpax_stability_verdict verdict{};
  check(hpax_routh_hurwitz(&cubic, &verdict), "stability verdict");
  body["verdict"] = verdict_json(verdict);

  if (p.p2 > 0.0) {
    hpax_chain_report ch{};
    check(hpax_rh_chains(&p, &eq, &ch), "inequality chains");
    body["chains"] = chains_json(ch);
  }
  return body;
}

json run_stability(const json& cfg) {
  json body;
  hpax_char_cubic cubic{};
  if (cfg.contains("inject")) {
    const json& in = cfg["inject"];
    check(hpax_char_cubic_from_k(need_num(in, "p3"), need_num(in, "p6"),
                                 need_num(in, "K2"), need_num(in, "K3"), &cubic),
          "characteristic cubic");
    body["source"] = "injected";
  } else {
    const hpax_params p = params_from(cfg);
    hpax_equilibrium eq{};
    check(hpax_solve_equilibrium(&p, &eq), "equilibrium");
    check(hpax_char_cubic_at(&p, &eq, &cubic), "characteristic cubic");
    body["source"] = "equilibrium";
    body["equilibrium"] = eq_json(eq);
    if (p.p2 > 0.0) {
      hpax_chain_report ch{};
      check(hpax_rh_chains(&p, &eq, &ch), "inequality chains");
      body["chains"] = chains_json(ch);
    }
  }
  body["char_cubic"] = cubic_json(cubic);
  hpax_stability_verdict verdict{};
  check(hpax_routh_hurwitz(&cubic, &verdict), "stability verdict");
  body["verdict"] = verdict_json(verdict);
  return body;
}

const char* kCaseNames[] = {"generic",    "A_zero",  "p2_zero", "p3_zero",
                            "p4_zero",    "p2_p4_zero", "p5_zero",
                            "p6_p5_zero", "p6_zero"};
const char* kClassNames[] = {"stable_node", "saddle", "non_hyperbolic",
                             "blow_up", "explicit_solution"};

json run_cases(const json& cfg) {
  const hpax_params p = params_from(cfg);
  hpax_case_report* raw = nullptr;
  double r0 = 0;
  const double* r0p = nullptr;
  if (cfg.contains("r0")) {
    r0 = need_num(cfg, "r0");
    r0p = &r0;
  }
  check(hpax_classify_case(&p, r0p, &raw), "case classification");
  case_ptr rep(raw);

  json body;
  int id = 0;
  check(hpax_case_id(rep.get(), &id), "case id");
  body["case"] = kCaseNames[id];

  int npts = 0;
  check(hpax_case_n_points(rep.get(), &npts), "case points");
  json pts = json::array();
  for (int i = 0; i < npts; ++i) {
    hpax_state pt{};
    int cls = 0;
    check(hpax_case_point(rep.get(), i, &pt, &cls), "case point");
    json entry = state_json(pt);
    entry["class"] = kClassNames[cls];
    pts.push_back(entry);
  }
  body["fixed_points"] = pts;

  int count = 0, unbounded = 0, has_overall = 0, overall = 0, has_bt = 0;
  double bt = 0;
  check(hpax_case_root_count(rep.get(), &count), "root count");
  check(hpax_case_unbounded(rep.get(), &unbounded), "unbounded flag");
  check(hpax_case_overall(rep.get(), &has_overall, &overall), "overall class");
  check(hpax_case_blow_up_time(rep.get(), &has_bt, &bt), "blow-up time");
  body["root_count"] = count;
  body["unbounded_equilibrium"] = unbounded != 0;
  body["overall"] = has_overall ? json(kClassNames[overall]) : json(nullptr);
  body["blow_up_time"] = has_bt ? json(bt) : json(nullptr);
  return body;
}

json lyap_json(const hpax_lyapunov_report& r) {
  json out;
  out["hypotheses_ok"] = r.hypotheses_ok != 0;
  out["min_at_p6"] = r.min_at_p6 != 0;
  out["condition_ok"] = r.condition_ok != 0;
  out["applicable"] = r.applicable != 0;
  out["minv"] = r.minv;
  out["alpha"] = r.alpha;
  out["beta"] = r.beta;
  out["gamma"] = r.gamma;
  out["basin"] = r.basin;
  out["B"] = r.B;
  out["branch"] = r.large_p4_branch ? "large_p4" : "small_p4";
  out["A0"] = r.has_A0 ? json(r.A0) : json(nullptr);
  if (r.has_A_window) {
    out["A_min"] = r.A_min;
    out["F_min"] = r.F_min;
    out["A1"] = r.A1;
    out["A2"] = r.A2;
  } else {
    out["A_min"] = nullptr;
    out["F_min"] = nullptr;
    out["A1"] = nullptr;
    out["A2"] = nullptr;
  }
  out["gamma_cap_corrected"] = r.gamma_cap_corrected;
  out["gamma_cap_printed"] = r.gamma_cap_printed;
  return out;
}

json run_lyapunov(const json& cfg) {
  const hpax_params p = params_from(cfg);
  hpax_equilibrium eq{};
  if (hpax_solve_equilibrium(&p, &eq) != HPAX_OK) {
    // degenerate parameter set: fall back to the case classifier's point
    hpax_case_report* raw = nullptr;
    check(hpax_classify_case(&p, nullptr, &raw), "case classification");
    case_ptr rep(raw);
    int npts = 0;
    check(hpax_case_n_points(rep.get(), &npts), "case points");
    if (npts == 0) die(2, "no finite equilibrium for these parameters");
    hpax_state pt{};
    int cls = 0;
    check(hpax_case_point(rep.get(), 0, &pt, &cls), "case point");
    eq = hpax_equilibrium{pt.a, pt.r, pt.o, 0, 0, 0, 0};
  }
  json body;
  body["equilibrium"] = eq_json(eq);

  hpax_lyapunov_report rep{};
  check(hpax_lyapunov_constants(&p, &eq, &rep), "energy constants");
  body["lyapunov"] = lyap_json(rep);

  if (cfg.contains("initial")) {
    const auto y0v = num_array(cfg["initial"], "initial");
    if (y0v.size() != 3) die(2, "initial must be [a, r, o]");
    const hpax_state y0{y0v[0], y0v[1], y0v[2]};
    const double t_end = opt_num(cfg, "t_end", 30.0);
    const double dt = opt_num(cfg, "dt", 0.01);
    hpax_decay_report dec{};
    check(hpax_verify_decay(&p, &eq, &y0, t_end, dt, &dec), "decay audit");
    body["decay"] = {{"w0", dec.w0},
                     {"w_final", dec.w_final},
                     {"converged", dec.converged != 0},
                     {"monotone", dec.monotone != 0},
                     {"inequality_ok", dec.inequality_ok != 0},
                     {"max_inequality_gap", dec.max_inequality_gap},
                     {"t_end", t_end},
                     {"dt", dt}};
  }
  return body;
}

const char* kDelayVerdicts[] = {"stable_all_tau", "switches",
                                "unstable_all_tau_beyond_tc"};
const char* kDirNames[] = {"left_to_right", "right_to_left"};

json run_delay_switches(const json& cfg) {
  json body;
  qc_ptr q = make_qc(cfg, body);
  body["qc"] = qc_json(q.get());

  int tflags[6] = {};
  check(hpax_theorem_checks(q.get(), tflags), "structural checks");
  body["theorem_checks"] = {{"no_common_imag_zero", tflags[0] != 0},
                            {"real_symmetry", tflags[1] != 0},
                            {"nonzero_at_origin", tflags[2] != 0},
                            {"finite_rhp_roots", tflags[3] != 0},
                            {"finitely_many_crossings", tflags[4] != 0},
                            {"all_ok", tflags[5] != 0}};

  const int n_max = static_cast<int>(opt_num(cfg, "n_max", 3));
  if (n_max < 1) die(2, "n_max must be >= 1");
  hpax_schedule* raw = nullptr;
  check(hpax_switch_schedule(q.get(), n_max, &raw), "switch schedule");
  sched_ptr sch(raw);

  int nroots = 0;
  check(hpax_schedule_n_roots(sch.get(), &nroots), "schedule roots");
  json roots = json::array();
  for (int i = 0; i < nroots; ++i) {
    hpax_crossing cr{};
    check(hpax_schedule_root(sch.get(), i, &cr), "schedule root");
    json taus = json::array();
    for (int n = 0; n < cr.n_taus; ++n) {
      double tau = 0;
      check(hpax_schedule_tau(sch.get(), i, n, &tau), "schedule tau");
      taus.push_back(tau);
    }
    roots.push_back({{"x", cr.x},
                     {"v", cr.v},
                     {"sin_vtau", cr.sin_vtau},
                     {"cos_vtau", cr.cos_vtau},
                     {"theta", cr.theta},
                     {"fprime", cr.fprime},
                     {"direction", kDirNames[cr.direction]},
                     {"proviso_ok", cr.proviso_ok != 0},
                     {"taus", taus},
                     {"max_residual", cr.max_residual}});
  }
  body["crossings"] = roots;
  body["n_max"] = n_max;

  double re3[3], im3[3];
  check(hpax_schedule_tau0_roots(sch.get(), re3, im3), "tau0 roots");
  json tau0 = json::array();
  for (int i = 0; i < 3; ++i) tau0.push_back({{"re", re3[i]}, {"im", im3[i]}});
  body["tau0_roots"] = tau0;

  int verdict = 0, has_fs = 0, has_tc = 0, multi = 0, proviso = 0;
  double fs = 0, tc = 0;
  check(hpax_schedule_verdict(sch.get(), &verdict), "verdict");
  check(hpax_schedule_first_switch(sch.get(), &has_fs, &fs), "first switch");
  check(hpax_schedule_tau_critical(sch.get(), &has_tc, &tc), "tau critical");
  check(hpax_schedule_flags(sch.get(), &multi, &proviso), "schedule flags");
  body["verdict"] = kDelayVerdicts[verdict];
  body["first_switch_tau"] = has_fs ? json(fs) : json(nullptr);
  body["tau_critical"] = has_tc ? json(tc) : json(nullptr);
  body["has_multiple_root"] = multi != 0;
  body["proviso_violation"] = proviso != 0;
  return body;
}

json run_roots(const json& cfg, const fs::path& outdir,
               std::vector<std::string>& files) {
  json body;
  qc_ptr q = make_qc(cfg, body);
  body["qc"] = qc_json(q.get());

  const double tau = opt_num(cfg, "tau", 0.0);
  if (!cfg.contains("region")) die(2, "config key missing: region");
  const auto region = num_array(cfg["region"], "region");
  if (region.size() != 4) die(2, "region must be [re0, re1, im0, im1]");
  const int resolution = static_cast<int>(opt_num(cfg, "resolution", 25));
  if (resolution < 2) die(2, "resolution must be >= 2");

  const double reg[4] = {region[0], region[1], region[2], region[3]};
  const int cap = resolution * resolution;
  std::vector<double> rre(cap), rim(cap);
  int found = 0;
  check(hpax_locate_roots(q.get(), tau, reg, resolution, rre.data(), rim.data(),
                          cap, &found),
        "root localization");
  json roots = json::array();
  for (int i = 0; i < found && i < cap; ++i)
    roots.push_back({{"re", rre[i]}, {"im", rim[i]}});
  body["tau"] = tau;
  body["region"] = region;
  body["resolution"] = resolution;
  body["roots"] = roots;
  body["n_roots"] = found;

  // dense field for external contour plotting: roots.re.csv / roots.im.csv,
  // row-major with the real axis fastest
  std::vector<double> fre(static_cast<size_t>(cap)), fim(static_cast<size_t>(cap));
  check(hpax_contour_field(q.get(), tau, reg, resolution, resolution,
                           fre.data(), fim.data()),
        "contour field");
  for (int part = 0; part < 2; ++part) {
    const std::vector<double>& grid = part == 0 ? fre : fim;
    std::string out = "# region," + fmt17(reg[0]) + "," + fmt17(reg[1]) + "," +
                      fmt17(reg[2]) + "," + fmt17(reg[3]) + "\n";
    out += "# nx,ny," + std::to_string(resolution) + "," +
           std::to_string(resolution) + "\n";
    for (int row = 0; row < resolution; ++row) {
      for (int col = 0; col < resolution; ++col) {
        if (col) out += ',';
        out += fmt17(grid[static_cast<size_t>(row) * resolution + col]);
      }
      out += '\n';
    }
    const std::string name = part == 0 ? "roots.re.csv" : "roots.im.csv";
    write_text(outdir / name, out);
    files.push_back(name);
  }
  return body;
}

json run_simulate(const json& cfg, const fs::path& outdir,
                  std::vector<std::string>& files) {
  const hpax_params p = params_from(cfg);
  const hpax_state y0{need_num(cfg, "a0"), need_num(cfg, "r0"),
                      need_num(cfg, "o0")};
  const double t_end = need_num(cfg, "t_end");
  const double dt = opt_num(cfg, "dt", 0.01);
  hpax_trajectory* raw = nullptr;
  check(hpax_integrate_ode(&p, &y0, t_end, dt, &raw), "integration");
  traj_ptr tr(raw);

  write_series(outdir, "", "simulate", tr.get(), files);

  int n = 0;
  check(hpax_trajectory_size(tr.get(), &n), "trajectory");
  double tl = 0;
  hpax_state yl{}, dyl{};
  check(hpax_trajectory_node(tr.get(), n - 1, &tl, &yl, &dyl), "final node");
  json body;
  body["t_end"] = t_end;
  body["dt"] = dt;
  body["n_nodes"] = n;
  body["initial"] = state_json(y0);
  body["final"] = state_json(yl);
  body["final_t"] = tl;
  body["flags"] = flags_json(tr.get());
  return body;
}

json run_simulate_dde(const json& cfg, const fs::path& outdir,
                      std::vector<std::string>& files) {
  const hpax_params p = params_from(cfg);
  hist_ptr h = history_from(cfg);
  const double t_end = need_num(cfg, "t_end");
  const int spd = static_cast<int>(opt_num(cfg, "steps_per_delay", 200));
  hpax_trajectory* raw = nullptr;
  check(hpax_integrate_dde(&p, h.get(), t_end, spd, &raw), "integration");
  traj_ptr tr(raw);

  write_series(outdir, "", "simulate-dde", tr.get(), files);

  int n = 0, kind = 0;
  check(hpax_trajectory_size(tr.get(), &n), "trajectory");
  check(hpax_history_kind(h.get(), &kind), "history kind");
  double tl = 0;
  hpax_state yl{}, dyl{};
  check(hpax_trajectory_node(tr.get(), n - 1, &tl, &yl, &dyl), "final node");
  json body;
  body["tau"] = p.tau;
  body["t_end"] = t_end;
  body["steps_per_delay"] = spd;
  body["n_nodes"] = n;
  body["history_kind"] = kHistoryKinds[kind];
  body["final"] = state_json(yl);
  body["final_t"] = tl;
  body["flags"] = flags_json(tr.get());
  return body;
}

json run_periodic(const json& cfg, const fs::path& outdir,
                  std::vector<std::string>& files) {
  const hpax_params p = params_from(cfg);
  if (!(p.tau > 0.0)) die(2, "periodic requires tau > 0");

  double r0 = 0;
  const double* r0p = nullptr;
  if (cfg.contains("r0")) {
    r0 = need_num(cfg, "r0");
    r0p = &r0;
  }
  int kind_req = 0;
  const int* kindp = nullptr;
  if (cfg.contains("history") && cfg["history"].contains("kind")) {
    const std::string kind = cfg["history"]["kind"].get<std::string>();
    if (kind == "constant") kind_req = HPAX_HISTORY_CONSTANT;
    else if (kind == "quadexp") kind_req = HPAX_HISTORY_QUADEXP;
    else if (kind == "hermite") kind_req = HPAX_HISTORY_HERMITE;
    else die(2, "unknown history kind: " + kind);
    kindp = &kind_req;
  }
  hpax_setup* sraw = nullptr;
  check(hpax_build_periodic_setup(&p, r0p, kindp, &sraw), "setup");
  setup_ptr setup(sraw);

  double sr0 = 0, so0 = 0, sat0 = 0, sres = 0;
  int fallback = 0;
  check(hpax_setup_values(setup.get(), &sr0, &so0, &sat0, &fallback, &sres),
        "setup values");
  const hpax_history* hist = nullptr;
  check(hpax_setup_history(setup.get(), &hist), "setup history");
  int kind = 0;
  check(hpax_history_kind(hist, &kind), "history kind");

  const double t_end = opt_num(cfg, "t_end", 16.0 * p.tau);
  const int spd = static_cast<int>(opt_num(cfg, "steps_per_delay", 200));
  hpax_trajectory* traw = nullptr;
  check(hpax_integrate_dde(&p, hist, t_end, spd, &traw), "integration");
  traj_ptr tr(traw);

  const double period = opt_num(cfg, "period", p.tau);
  const double t_start = opt_num(cfg, "t_start", 10.0 * p.tau);
  const int samples = static_cast<int>(opt_num(cfg, "samples", 400));
  hpax_periodicity per{};
  check(hpax_verify_periodicity(tr.get(), period, t_start, samples, &per),
        "periodicity check");
  int has_est = 0;
  double est = 0, peak = 0;
  check(hpax_estimate_period(tr.get(), t_start, &has_est, &est, &peak),
        "period estimate");

  write_series(outdir, "", "periodic", tr.get(), files);

  json body;
  body["setup"] = {{"r0", sr0},
                   {"o0", so0},
                   {"a_tau_0", sat0},
                   {"fallback_used", fallback != 0},
                   {"fitting_residual", sres},
                   {"history_kind", kHistoryKinds[kind]}};
  body["tau"] = p.tau;
  body["t_end"] = t_end;
  body["steps_per_delay"] = spd;
  body["period"] = period;
  body["t_start"] = t_start;
  body["samples"] = samples;
  body["periodicity"] = {{"residual", per.residual},
                         {"amplitude", per.amplitude},
                         {"periodic", per.periodic != 0}};
  body["period_estimate"] = {{"period", has_est ? json(est) : json(nullptr)},
                             {"peak", peak}};
  body["flags"] = flags_json(tr.get());
  return body;
}

// ---------------------------------------------------------------- sweep

struct SweepDraw {
  hpax_params p{};
  double a0 = 0, r0 = 0, o0 = 0;
  double t_end = 0;
};

struct SweepOutcome {
  hpax_status status = HPAX_OK;
  std::string message;
  json summary;
};

std::pair<double, double> range_from(const json& ranges, const std::string& key,
                                     double lo, double hi) {
  if (!ranges.contains(key)) return {lo, hi};
  const auto v = num_array(ranges[key], "sweep.ranges." + key);
  if (v.size() != 2 || !(v[0] <= v[1]))
    die(2, "sweep.ranges." + key + " must be [lo, hi]");
  return {v[0], v[1]};
}

json run_sweep(const json& cfg, const fs::path& outdir, unsigned long long seed,
               std::vector<std::string>& files) {
  const json sw = cfg.contains("sweep") ? cfg["sweep"] : json::object();
  const int n = static_cast<int>(opt_num(sw, "n", 8));
  if (n < 1) die(2, "sweep.n must be >= 1");
  const double t_factor = opt_num(sw, "t_end_over_tau", 100.0);
  const int spd = static_cast<int>(opt_num(sw, "steps_per_delay", 200));
  std::vector<double> tau_choices = {0.5, 2.0};
  if (sw.contains("tau")) {
    if (sw["tau"].is_number())
      tau_choices = {sw["tau"].get<double>()};
    else
      tau_choices = num_array(sw["tau"], "sweep.tau");
    if (tau_choices.empty()) die(2, "sweep.tau must not be empty");
  }
  const json ranges = sw.contains("ranges") ? sw["ranges"] : json::object();
  const auto rA = range_from(ranges, "A", 0.3, 2.0);
  const auto rp2 = range_from(ranges, "p2", 0.5, 5.0);
  const auto rp3 = range_from(ranges, "p3", 0.5, 3.0);
  const auto rp4 = range_from(ranges, "p4", 0.05, 2.0);
  const auto rp5 = range_from(ranges, "p5", 0.05, 0.8);
  const auto rp6 = range_from(ranges, "p6", 0.6, 3.0);

  // all draws precomputed sequentially so worker scheduling cannot touch them
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto in_range = [&](const std::pair<double, double>& r) {
    return r.first + (r.second - r.first) * uniform();
  };
  std::vector<SweepDraw> draws(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    SweepDraw& d = draws[static_cast<size_t>(k)];
    d.p.A = in_range(rA);
    d.p.p2 = in_range(rp2);
    d.p.p3 = in_range(rp3);
    d.p.p4 = in_range(rp4);
    d.p.p5 = in_range(rp5);
    d.p.p6 = in_range(rp6);
    d.p.tau = tau_choices[static_cast<size_t>(k) % tau_choices.size()];
    const double cap = d.p.A / d.p.p3;
    d.a0 = (0.05 + 1.45 * uniform()) * cap;
    d.o0 = (0.05 + 1.45 * uniform()) * cap;
    d.r0 = (0.3 + 1.5 * uniform()) * ((d.p.p5 + 1.0) / d.p.p6);
    d.t_end = t_factor * d.p.tau;
  }

  for (int k = 0; k < n; ++k)
    fs::create_directories(outdir / "runs" / std::to_string(k));

  std::vector<SweepOutcome> outcomes(static_cast<size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= n) return;
      SweepOutcome& oc = outcomes[static_cast<size_t>(k)];
      const SweepDraw& d = draws[static_cast<size_t>(k)];
      hpax_history* hraw = nullptr;
      oc.status = hpax_history_constant(d.a0, d.r0, d.o0, &hraw);
      if (oc.status != HPAX_OK) {
        char buf[512];
        hpax_last_error(buf, sizeof buf);
        oc.message = buf;
        return;
      }
      hist_ptr h(hraw);
      hpax_trajectory* traw = nullptr;
      oc.status = hpax_integrate_dde(&d.p, h.get(), d.t_end, spd, &traw);
      if (oc.status != HPAX_OK) {
        char buf[512];
        hpax_last_error(buf, sizeof buf);
        oc.message = buf;
        continue;
      }
      traj_ptr tr(traw);

      const fs::path rundir = outdir / "runs" / std::to_string(k);
      const std::string prefix = "runs/" + std::to_string(k) + "/";
      std::vector<std::string> run_files;
      write_series(rundir, prefix, "sweep", tr.get(), run_files);

      int nn = 0;
      hpax_trajectory_size(tr.get(), &nn);
      double tl = 0;
      hpax_state yl{}, dyl{};
      hpax_trajectory_node(tr.get(), nn - 1, &tl, &yl, &dyl);
      const json jflags = flags_json(tr.get());

      json run;
      run["k"] = k;
      run["params"] = {{"A", d.p.A},   {"p2", d.p.p2}, {"p3", d.p.p3},
                       {"p4", d.p.p4}, {"p5", d.p.p5}, {"p6", d.p.p6},
                       {"tau", d.p.tau}};
      run["initial"] = {{"a", d.a0}, {"r", d.r0}, {"o", d.o0}};
      run["t_end"] = d.t_end;
      run["final"] = state_json(yl);
      run["flags"] = jflags;
      run["box_entered"] = !jflags["bounds_entry_time"].is_null();
      oc.summary = run;
      write_text(rundir / "sweep.report.json", dump_json(run));
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers = std::min<unsigned>(hw, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  json runs = json::array();
  for (int k = 0; k < n; ++k) {
    const SweepOutcome& oc = outcomes[static_cast<size_t>(k)];
    if (oc.status != HPAX_OK)
      die(exit_code_for(oc.status),
          "sweep run " + std::to_string(k) + ": " + oc.message);
    runs.push_back(oc.summary);
    const std::string prefix = "runs/" + std::to_string(k) + "/";
    for (const char* ch : {"a", "r", "o"})
      files.push_back(prefix + "sweep." + ch + ".csv");
    files.push_back(prefix + "sweep.report.json");
  }

  json body;
  body["seed"] = seed;
  body["n"] = n;
  body["tau_choices"] = tau_choices;
  body["t_end_over_tau"] = t_factor;
  body["steps_per_delay"] = spd;
  body["ranges"] = {{"A", {rA.first, rA.second}},
                    {"p2", {rp2.first, rp2.second}},
                    {"p3", {rp3.first, rp3.second}},
                    {"p4", {rp4.first, rp4.second}},
                    {"p5", {rp5.first, rp5.second}},
                    {"p6", {rp6.first, rp6.second}}};
  body["runs"] = runs;
  return body;
}

} // namespace

// ---------------------------------------------------------------- main

int main(int argc, char** argv) {
  CLI::App app{"delayed three-field axis model analysis"};
  app.require_subcommand(1);

  std::string config_path, output_dir, region_str;
  unsigned long long seed = 0;
  double tau = 0, t_end = 0, dt = 0;
  int n_max = 0, resolution = 0;

  const std::vector<std::string> commands = {
      "equilibrium", "stability", "cases",        "lyapunov", "delay-switches",
      "roots",       "simulate",  "simulate-dde", "periodic", "sweep"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name, name + " analysis");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--output", output_dir, "output directory");
    sub->add_option("--seed", seed, "seed for randomized sweeps");
    sub->add_option("--tau", tau, "delay override");
    sub->add_option("--t-end", t_end, "horizon override");
    sub->add_option("--dt", dt, "step override");
    sub->add_option("--n-max", n_max, "switch-sequence length override");
    sub->add_option("--region", region_str, "re0,re1,im0,im1");
    sub->add_option("--resolution", resolution, "grid resolution override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const auto t0 = std::chrono::steady_clock::now();

  json cfg = load_config(config_path);
  if (cfg.contains("command") &&
      cfg["command"].get<std::string>() != command)
    die(2, "config pins command `" + cfg["command"].get<std::string>() +
               "` but `" + command + "` was invoked");

  // flag overrides fold into the effective config (echoed in the report)
  if (sub->count("--tau")) cfg["tau"] = tau;
  if (sub->count("--t-end")) cfg["t_end"] = t_end;
  if (sub->count("--dt")) cfg["dt"] = dt;
  if (sub->count("--n-max")) cfg["n_max"] = n_max;
  if (sub->count("--resolution")) cfg["resolution"] = resolution;
  if (sub->count("--seed")) cfg["seed"] = seed;
  if (sub->count("--region")) {
    double r0 = 0, r1 = 0, i0 = 0, i1 = 0;
    if (std::sscanf(region_str.c_str(), "%lf,%lf,%lf,%lf", &r0, &r1, &i0, &i1) != 4)
      die(2, "--region expects re0,re1,im0,im1");
    cfg["region"] = {r0, r1, i0, i1};
  }
  unsigned long long eff_seed = 0;
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_unsigned() && !cfg["seed"].is_number_integer())
      die(2, "seed must be a nonnegative integer");
    eff_seed = cfg["seed"].get<unsigned long long>();
  }

  const bool needs_output = command == "roots" || command == "simulate" ||
                            command == "simulate-dde" || command == "periodic" ||
                            command == "sweep";
  const bool have_output = !output_dir.empty();
  if (needs_output && !have_output)
    die(2, command + " requires --output <dir>");
  fs::path outdir;
  if (have_output) {
    outdir = output_dir;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) die(2, "cannot create output directory: " + outdir.string());
    cfg["output_dir"] = output_dir;
  }

  std::vector<std::string> files;
  json body;
  if (command == "equilibrium") body = run_equilibrium(cfg);
  else if (command == "stability") body = run_stability(cfg);
  else if (command == "cases") body = run_cases(cfg);
  else if (command == "lyapunov") body = run_lyapunov(cfg);
  else if (command == "delay-switches") body = run_delay_switches(cfg);
  else if (command == "roots") body = run_roots(cfg, outdir, files);
  else if (command == "simulate") body = run_simulate(cfg, outdir, files);
  else if (command == "simulate-dde") body = run_simulate_dde(cfg, outdir, files);
  else if (command == "periodic") body = run_periodic(cfg, outdir, files);
  else if (command == "sweep") body = run_sweep(cfg, outdir, eff_seed, files);

  json report = body;
  report["command"] = command;
  report["config"] = cfg;
  report["version"] = hpax_version();
  if (cfg.contains("seed")) report["seed"] = eff_seed;
  if (have_output) {
    files.push_back(command + ".report.json");
    report["files"] = files;
    write_text(outdir / (command + ".report.json"), dump_json(report));
  } else {
    report["files"] = json::array();
  }

  const auto t1 = std::chrono::steady_clock::now();
  report["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  std::cout << dump_json(report);
  return 0;
}

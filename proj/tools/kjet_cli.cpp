// kjet: command-line front end. JSON result on stdout (or --out), optional
// CSV side file (--csv). Exit 0 on success, 2 when a computation ran but
// certification failed, 1 on input errors.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kjet/kjet.hpp"
#include "kjet/suites.hpp"

namespace {

using kjet::io::json;

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_uncertified = 2;

struct Options {
  std::string domain = "disc";
  std::string jet;
  std::string point;
  std::string disc;
  std::string blaschke;
  std::string lambdas = "0.5,0.7,0.9,0.99,1";
  std::string suite = "all";
  std::size_t k = 0;
  std::size_t degree = kjet::SolverConfig{}.degree;
  std::size_t grid = 0;  // 0: per-command default
  double tol = 0.0;      // 0: per-command default
  unsigned long long seed = 0;
  bool probe = false;
  std::string out;
  std::string csv;
};

bool is_certification_failure(kjet::Errc c) {
  using kjet::Errc;
  return c == Errc::NonzeroWinding || c == Errc::ResidualAboveTolerance || c == Errc::NotCertifiedStationary ||
         c == Errc::ProbeFailed || c == Errc::NotConverged;
}

std::vector<double> split_reals(const std::string& text, const std::string& path) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      kjet::io::bad(path, "cannot read '" + tok + "' as a number");
    }
  }
  if (out.empty()) kjet::io::bad(path, "empty list");
  return out;
}

// "disc", "ball", "ball:3", "ellipsoid:1,2", "complex_ellipsoid:2,1" or a JSON object.
kjet::Domain parse_domain(const std::string& text) {
  if (!text.empty() && text.front() == '{') return kjet::io::decode_domain(kjet::io::parse(text, "--domain"), "--domain");
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "disc" && args.empty()) return kjet::make_unit_disc();
  if (kind == "ball") {
    if (args.empty()) return kjet::make_ball(2);
    const double n = split_reals(args, "--domain")[0];
    if (!(n >= 1.0) || n != std::floor(n)) kjet::io::bad("--domain", "ball dimension must be an integer >= 1");
    return kjet::make_ball(static_cast<std::size_t>(n));
  }
  if (kind == "ellipsoid") return kjet::make_ellipsoid(split_reals(args, "--domain"));
  if (kind == "complex_ellipsoid") {
    std::vector<int> m;
    for (double v : split_reals(args, "--domain")) {
      if (v != std::floor(v)) kjet::io::bad("--domain", "exponents must be integers");
      m.push_back(static_cast<int>(v));
    }
    return kjet::make_complex_ellipsoid(m);
  }
  kjet::io::bad("--domain", "unknown domain '" + text + "'");
}

// "0.3,-0.2" (real zeros) or a JSON array of [re, im].
std::vector<kjet::cplx> parse_zeros(const std::string& text) {
  std::vector<kjet::cplx> zeros;
  if (!text.empty() && text.front() == '[') {
    const json j = kjet::io::parse(text, "--blaschke");
    if (!j.is_array()) kjet::io::bad("--blaschke", "expected an array");
    for (std::size_t i = 0; i < j.size(); ++i)
      zeros.push_back(kjet::io::decode_complex(j[i], "--blaschke[" + std::to_string(i) + "]"));
  } else {
    for (double v : split_reals(text, "--blaschke")) zeros.emplace_back(v, 0.0);
  }
  return zeros;
}

kjet::AnalyticDisc parse_disc(const Options& o) {
  if (!o.disc.empty() && !o.blaschke.empty()) kjet::io::bad("--disc", "give either --disc or --blaschke, not both");
  if (!o.blaschke.empty()) return kjet::blaschke_product(parse_zeros(o.blaschke));
  if (o.disc.empty()) kjet::io::bad("--disc", "a disc is required (--disc or --blaschke)");
  return kjet::io::decode_disc(kjet::io::parse(o.disc, "--disc"), "--disc");
}

std::optional<kjet::CVec> parse_point(const Options& o) {
  if (o.point.empty()) return std::nullopt;
  return kjet::io::decode_vector(kjet::io::parse(o.point, "--point"), "--point");
}

kjet::JetVector parse_jet(const Options& o) {
  if (o.jet.empty()) kjet::io::bad("--jet", "a jet is required");
  const auto p = parse_point(o);
  auto xi = kjet::io::decode_jet(kjet::io::parse(o.jet, "--jet"), "--jet", p ? &*p : nullptr);
  if (o.k != 0 && o.k != xi.order())
    kjet::io::bad("--k", "order " + std::to_string(o.k) + " differs from jet order " + std::to_string(xi.order()));
  return xi;
}

std::size_t require_k(const Options& o) {
  if (o.k == 0) kjet::io::bad("--k", "order k >= 1 is required");
  return o.k;
}

kjet::SolverConfig solver_config(const Options& o) {
  kjet::SolverConfig cfg;
  cfg.degree = o.degree;
  if (o.grid) cfg.grid = o.grid;
  if (o.tol > 0.0) cfg.bisection_tol = o.tol;
  cfg.seed = o.seed;
  return cfg;
}

kjet::StationarityConfig stationarity_config(const Options& o) {
  kjet::StationarityConfig cfg;
  if (o.grid) cfg.grid = o.grid;
  if (o.tol > 0.0) cfg.stat_tol = o.tol;
  return cfg;
}

json domain_json(const kjet::Domain& d) {
  json out = kjet::io::encode(d.spec());
  out["n"] = d.dim();
  return out;
}

void write_csv(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) kjet::io::bad("--csv", "cannot open '" + path + "' for writing");
  f.precision(17);
  f << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << '\n';
  }
}

void write_rho_profile(const Options& o, const kjet::Domain& omega, const kjet::AnalyticDisc& f) {
  if (o.csv.empty()) return;
  const std::size_t N = kjet::default_grid;
  std::vector<std::vector<double>> rows;
  for (std::size_t m = 0; m < N; ++m) {
    const double t = kjet::grid_angle(m, N);
    rows.push_back({t, omega.rho(f.value(kjet::unit(t)))});
  }
  write_csv(o.csv, "theta,rho", rows);
}

void write_weight(const Options& o, const kjet::CircleFunction& c) {
  if (o.csv.empty()) return;
  std::vector<std::vector<double>> rows;
  for (std::size_t m = 0; m < c.size(); ++m) rows.push_back({c.theta(m), c(m).real()});
  write_csv(o.csv, "theta,c", rows);
}

std::optional<double> disc_closed_form(const kjet::Domain& omega, const kjet::JetVector& xi) {
  if (omega.spec().kind != "disc") return std::nullopt;
  if (xi.order() == 1) return kjet::k1_disc_closed_form(xi.point(0), xi[1](0));
  if (xi.order() == 2 && xi.point(0) == kjet::cplx{0.0}) return kjet::k2_disc_closed_form(xi);
  return std::nullopt;
}

int cmd_metric(const Options& o, json& out) {
  const auto omega = parse_domain(o.domain);
  const auto xi = parse_jet(o);
  const auto cfg = solver_config(o);
  out["config"] = {{"domain", domain_json(omega)}, {"k", xi.order()}, {"solver", kjet::io::encode(cfg)}};
  out["jet"] = kjet::io::encode(xi);
  const auto r = kjet::kobayashi_k_metric(omega, xi, cfg);
  out["result"] = kjet::io::encode(r);
  if (auto exact = disc_closed_form(omega, xi)) out["closed_form"] = *exact;
  write_rho_profile(o, omega, r.extremal);
  return exit_ok;
}

int cmd_yu(const Options& o, json& out) {
  const auto omega = parse_domain(o.domain);
  const std::size_t k = require_k(o);
  if (o.jet.empty()) kjet::io::bad("--jet", "the vector v is required");
  const kjet::CVec v = kjet::io::decode_vector(kjet::io::parse(o.jet, "--jet"), "--jet");
  const auto p = parse_point(o).value_or(kjet::CVec::Zero(v.size()));
  if (p.size() != v.size()) kjet::io::bad("--point", "dimension differs from v");
  const auto cfg = solver_config(o);
  out["config"] = {{"domain", domain_json(omega)}, {"k", k}, {"solver", kjet::io::encode(cfg)}};
  out["point"] = kjet::io::encode(p);
  out["v"] = kjet::io::encode(v);
  const auto r = kjet::yu_metric(omega, p, v, k, cfg);
  out["result"] = kjet::io::encode(r);
  write_rho_profile(o, omega, r.extremal);
  return exit_ok;
}

int cmd_extremal(const Options& o, json& out) {
  const auto omega = parse_domain(o.domain);
  const auto xi = parse_jet(o);
  const auto cfg = solver_config(o);
  const kjet::EulerLagrangeConfig el{};
  out["config"] = {{"domain", domain_json(omega)},
                   {"k", xi.order()},
                   {"solver", kjet::io::encode(cfg)},
                   {"euler_lagrange", kjet::io::encode(el)}};
  out["jet"] = kjet::io::encode(xi);
  const auto r = kjet::kobayashi_k_metric(omega, xi, cfg);
  out["result"] = kjet::io::encode(r);
  const auto rep = kjet::euler_lagrange_check(omega, r, xi.order(), el);
  out["euler_lagrange"] = kjet::io::encode(rep);
  write_rho_profile(o, omega, r.extremal);
  return rep.passed ? exit_ok : exit_uncertified;
}

int cmd_stationary(const Options& o, json& out) {
  const auto omega = parse_domain(o.domain);
  const auto f = parse_disc(o);
  const std::size_t k = require_k(o);
  const auto cfg = stationarity_config(o);
  out["config"] = {{"domain", domain_json(omega)}, {"k", k}, {"stationarity", kjet::io::encode(cfg)}};
  out["disc"] = kjet::io::encode(f);
  int code = exit_ok;
  if (omega.spec().kind == "disc") {
    try {
      out["exact"] = kjet::io::encode(kjet::scalar_stationarity_exact(f, k, cfg.grid));
    } catch (const kjet::NonzeroWinding& e) {
      out["exact"] = {{"certified", false}, {"error", e.what()}, {"winding", e.winding()}};
      out["certified"] = false;
      return exit_uncertified;
    } catch (const kjet::Error& e) {
      if (e.code() != kjet::Errc::NotOnBoundary) throw;
      out["exact"] = {{"applicable", false}, {"reason", e.what()}};
    }
  }
  try {
    const auto cert = kjet::stationarity_search(omega, f, k, cfg);
    out["certificate"] = kjet::io::encode(cert);
    write_weight(o, cert.c);
  } catch (const kjet::ResidualAboveTolerance& e) {
    out["certificate"] = {{"certified", false}, {"error", e.what()}, {"best_residual", e.best()}};
    code = exit_uncertified;
  }
  out["certified"] = code == exit_ok;
  return code;
}

int cmd_blaschke(const Options& o, json& out) {
  if (o.blaschke.empty()) kjet::io::bad("--blaschke", "zeros are required");
  const auto zeros = parse_zeros(o.blaschke);
  const auto f = kjet::blaschke_product(zeros);
  const std::size_t k = o.k ? o.k : std::max<std::size_t>(zeros.size(), 1);
  const std::size_t N = o.grid ? o.grid : kjet::default_grid;
  out["config"] = {{"k", k}, {"grid", N}};
  json z = json::array();
  for (const auto& a : zeros) z.push_back(kjet::io::encode(a));
  out["zeros"] = std::move(z);
  out["disc"] = kjet::io::encode(f);
  out["jet"] = kjet::io::encode(kjet::jet_of_disc(f, k));
  const auto trace = kjet::boundary_trace(f, N);
  double dev = 0.0;
  for (std::size_t m = 0; m < N; ++m) dev = std::max(dev, std::abs(std::abs(trace(m)) - 1.0));
  out["boundary_modulus_deviation"] = dev;
  if (std::abs(f.value(0.0)(0)) <= 1e-12) out["schwarz_slack"] = kjet::schwarz_bound_check(f, N);
  if (!o.csv.empty()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t m = 0; m < N; ++m) rows.push_back({trace.theta(m), trace(m).real(), trace(m).imag()});
    write_csv(o.csv, "theta,re,im", rows);
  }
  return exit_ok;
}

int cmd_pairing(const Options& o, json& out) {
  const auto omega = parse_domain(o.domain);
  const auto f = parse_disc(o);
  const std::size_t k = require_k(o);
  const auto cfg = stationarity_config(o);
  const auto lambdas = split_reals(o.lambdas, "--lambda");
  for (double l : lambdas)
    if (!(l > 0.0 && l <= 1.0)) kjet::io::bad("--lambda", "values must lie in (0, 1]");
  out["config"] = {{"domain", domain_json(omega)},
                   {"k", k},
                   {"stationarity", kjet::io::encode(cfg)},
                   {"lambda", lambdas},
                   {"probe", o.probe}};
  out["disc"] = kjet::io::encode(f);
  const auto cert = kjet::stationarity_search(omega, f, k, cfg);
  out["certificate"] = kjet::io::encode(cert);
  json values = json::array();
  bool positive = true;
  for (double l : lambdas) {
    const double s = kjet::pairing_sum(f, cert.lift, l, k);
    values.push_back({{"lambda", l}, {"S", s}, {"signed", (1.0 - l) * s}});
    if (l < 1.0) positive = positive && (1.0 - l) * s > 0.0;
  }
  out["pairing"] = std::move(values);
  out["sign_property"] = positive;
  int code = positive ? exit_ok : exit_uncertified;
  if (o.probe) {
    kjet::ProbeConfig pc;
    pc.stationarity = cfg;
    pc.solver = solver_config(o);
    out["config"]["probe_solver"] = kjet::io::encode(pc.solver);
    try {
      const auto rep = kjet::local_extremality_probe(omega, f, k, pc);
      out["probe"] = kjet::io::encode(rep);
      if (!rep.passed) code = exit_uncertified;
    } catch (const kjet::ProbeFailed& e) {
      out["probe"] = kjet::io::encode(e.report());
      code = exit_uncertified;
    }
  }
  return code;
}

json suite_json(const kjet::SuiteResult& r) {
  return {{"name", r.name},   {"passed", r.passed()},       {"cases", r.cases},
          {"failures", r.failures}, {"worst", r.worst}, {"tolerance", r.tolerance}};
}

int cmd_verify(const Options& o, json& out) {
  static const std::vector<std::string> known{"all", "circle", "closed_form", "schwarz", "stationarity", "poletsky",
                                              "metric"};
  if (std::find(known.begin(), known.end(), o.suite) == known.end())
    kjet::io::bad("--suite", "unknown suite '" + o.suite + "'");
  const auto cfg = solver_config(o);
  out["config"] = {{"suite", o.suite}, {"seed", o.seed}, {"solver", kjet::io::encode(cfg)}};
  auto want = [&](const std::string& s) { return o.suite == "all" || o.suite == s; };
  json suites = json::array();
  bool ok = true;
  auto add = [&](const kjet::SuiteResult& r) {
    ok = ok && r.passed();
    suites.push_back(suite_json(r));
  };
  if (want("circle")) add(kjet::circle_suite(o.seed));
  if (want("closed_form")) {
    const auto rep = kjet::closed_form_property_suite(20, o.seed);
    ok = ok && rep.passed;
    json j = kjet::io::encode(rep);
    j["name"] = "closed_form";
    suites.push_back(std::move(j));
  }
  if (want("schwarz")) add(kjet::schwarz_suite(o.seed));
  if (want("stationarity")) add(kjet::blaschke_stationarity_suite(o.seed));
  if (want("poletsky")) add(kjet::poletsky_suite(o.seed));
  if (want("metric")) add(kjet::disc_metric_suite(o.seed, 5, cfg));
  out["suites"] = std::move(suites);
  out["passed"] = ok;
  return ok ? exit_ok : exit_uncertified;
}

int cmd_spectrum(const Options& o, json& out) {
  const auto f = parse_disc(o);
  const std::size_t N = o.grid ? o.grid : kjet::default_grid;
  out["config"] = {{"grid", N}};
  out["disc"] = kjet::io::encode(f);
  const auto s = kjet::fourier_transform(kjet::boundary_trace(f, N));
  out["total_energy"] = s.total_energy();
  out["negative_tail_residual"] = kjet::negative_tail_residual(s);
  out["positive_tail_residual"] = kjet::positive_tail_residual(s);
  json modes = json::array();
  for (int j = s.min_index(); j <= s.max_index(); ++j) modes.push_back({{"j", j}, {"norm", std::sqrt(s.mode_energy(j))}});
  out["modes"] = std::move(modes);
  if (!o.csv.empty()) {
    std::ofstream csv(o.csv);
    if (!csv) kjet::io::bad("--csv", "cannot open '" + o.csv + "' for writing");
    csv.precision(17);
    s.write_csv(csv);
  }
  return exit_ok;
}

void emit(const Options& o, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) kjet::io::bad("--out", "cannot open '" + o.out + "' for writing");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order Kobayashi metrics and k-stationary discs"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "JSON output path (default stdout)");
    sub->add_option("--csv", o.csv, "CSV side file");
    sub->add_option("--grid", o.grid, "circle grid size (power of two)");
    sub->add_option("--seed", o.seed, "random seed");
  };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--domain", o.domain, "disc | ball[:n] | ellipsoid:a1,a2,... | complex_ellipsoid:m1,... | JSON");
    sub->add_option("--degree", o.degree, "polynomial degree of competitor discs");
    sub->add_option("--tol", o.tol, "relative bisection tolerance");
    sub->add_option("--k", o.k, "jet order");
    sub->add_option("--point", o.point, "base point, JSON array of [re, im]");
  };
  auto disc_input = [&](CLI::App* sub) {
    sub->add_option("--disc", o.disc, "disc JSON");
    sub->add_option("--blaschke", o.blaschke, "Blaschke zeros: '0.3,-0.2' or JSON [[re, im], ...]");
  };

  auto* metric = app.add_subcommand("metric", "Kobayashi k-metric of a jet");
  common(metric);
  solver(metric);
  metric->add_option("--jet", o.jet, "jet components, JSON")->required();

  auto* yu = app.add_subcommand("yu", "Yu metric: K^k on the jet (0, ..., 0, v)");
  common(yu);
  solver(yu);
  yu->add_option("--jet", o.jet, "vector v, JSON array of [re, im]")->required();

  auto* extremal = app.add_subcommand("extremal", "metric plus Euler-Lagrange check of the witness");
  common(extremal);
  solver(extremal);
  extremal->add_option("--jet", o.jet, "jet components, JSON")->required();

  auto* stationary = app.add_subcommand("stationary", "certify k-stationarity of a disc");
  common(stationary);
  disc_input(stationary);
  stationary->add_option("--domain", o.domain, "domain");
  stationary->add_option("--k", o.k, "order")->required();
  stationary->add_option("--tol", o.tol, "stationarity tolerance");

  auto* blaschke = app.add_subcommand("blaschke", "build a Blaschke product");
  common(blaschke);
  blaschke->add_option("--blaschke", o.blaschke, "zeros")->required();
  blaschke->add_option("--k", o.k, "jet order to report");

  auto* pairing = app.add_subcommand("pairing", "pairing S(lambda) along f(lambda zeta)");
  common(pairing);
  disc_input(pairing);
  solver(pairing);
  pairing->add_option("--lambda", o.lambdas, "comma-separated lambdas in (0, 1]");
  pairing->add_flag("--probe", o.probe, "also run the local extremality probe");

  auto* verify = app.add_subcommand("verify", "randomized property suites");
  common(verify);
  verify->add_option("--suite", o.suite, "all | circle | closed_form | schwarz | stationarity | poletsky | metric");
  verify->add_option("--degree", o.degree, "solver degree for the metric suite");
  verify->add_option("--tol", o.tol, "solver bisection tolerance for the metric suite");

  auto* spectrum = app.add_subcommand("spectrum", "Fourier spectrum of a boundary trace");
  common(spectrum);
  disc_input(spectrum);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_input;
  }

  json doc;
  CLI::App* sub = app.get_subcommands().front();
  doc["command"] = sub->get_name();
  int code = exit_ok;
  try {
    if (sub == metric) code = cmd_metric(o, doc);
    else if (sub == yu) code = cmd_yu(o, doc);
    else if (sub == extremal) code = cmd_extremal(o, doc);
    else if (sub == stationary) code = cmd_stationary(o, doc);
    else if (sub == blaschke) code = cmd_blaschke(o, doc);
    else if (sub == pairing) code = cmd_pairing(o, doc);
    else if (sub == verify) code = cmd_verify(o, doc);
    else code = cmd_spectrum(o, doc);
  } catch (const kjet::Error& e) {
    if (!is_certification_failure(e.code())) {
      std::cerr << "kjet: " << e.what() << '\n';
      return exit_input;
    }
    doc["error"] = {{"code", kjet::errc_name(e.code())}, {"message", e.what()}};
    code = exit_uncertified;
  }
  try {
    emit(o, doc);
  } catch (const kjet::Error& e) {
    std::cerr << "kjet: " << e.what() << '\n';
    return exit_input;
  }
  return code;
}

#include "spinflip/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "spinflip/identities.hpp"
#include "spinflip/randomfield.hpp"

namespace spinflip::cli {

using nlohmann::json;

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"lemma1",        "theorem1",      "theorem2",
                                              "internal_energy", "concentration", "rf_suite",
                                              "gg_bounds"};
  return names;
}

namespace {

using Clock = std::chrono::steady_clock;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

std::array<double, 2> pair_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + " must be a list of two numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::size_t size_from_json(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(where + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

void check_name(const std::string& name) {
  const auto& known = known_checks();
  if (std::find(known.begin(), known.end(), name) == known.end()) {
    throw ConfigError("unknown check '" + name + "'");
  }
}

bool covers_volume(const ModelSpec& model, const FlipRegion& flip) {
  return flip.volume() == model.size();
}

// Keeps the row with the largest error for each check name.
void keep_worst(std::vector<CheckReport>& worst, const CheckReport& r) {
  for (auto& w : worst) {
    if (w.name == r.name) {
      const bool worse = (w.pass && !r.pass) || (w.pass == r.pass && r.abs_err > w.abs_err);
      if (worse) w = r;
      return;
    }
  }
  worst.push_back(r);
}

std::vector<CheckReport> run_rf_suite(const ModelSpec& model, const RunConfig& config) {
  if (model.kind != ModelKind::random_field) throw ConfigError("rf_suite needs a random_field model");
  const auto flip = full_region(model);
  const NormalStream stream(config.plan.seed);
  const std::uint64_t n = std::min<std::uint64_t>(config.plan.n_samples, 100);
  std::vector<CheckReport> worst;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto ensemble = make_ensemble(model, flip, stream, i);
    for (const auto& r : rf_per_sample_suite(ensemble, config.angles[0], config.angles[1])) {
      keep_worst(worst, r);
    }
  }
  return worst;
}

std::vector<CheckReport> run_lemma1(const ModelSpec& model, const FlipRegion& flip,
                                    const RunConfig& config) {
  const auto [a, b] = config.interval;
  const auto summary = summarize(model, flip);
  std::vector<CheckReport> out;
  if (model.kind == ModelKind::random_field && covers_volume(model, flip)) {
    const auto p = rf_lemma1_closed(model.size(), model.beta, a, b, config.legendre, config.hermite);
    out.push_back(make_check("lemma1_closed", summary, p.lhs, p.rhs, Criterion::equal_rel, 1e-6));
    const double sts = rf_lemma1_rhs(model.size(), model.beta, a, b, config.legendre,
                                     config.hermite, MiddleTerm::sts);
    out.push_back(make_check("lemma1_middle_terms", summary, p.rhs, sts, Criterion::equal_abs, 1e-9));
    return out;
  }
  if (flip.inside.empty() && flip.volume() == 0) {
    out.push_back(make_check("lemma1_closed", summary, 0.0, 0.0, Criterion::equal_abs, 1e-12));
    return out;
  }
  const auto tp = lemma1_two_path(model, flip, a, b, config.legendre, config.plan);
  out.push_back(make_check("lemma1_two_path", summary, tp.lhs.mean, tp.rhs.mean,
                           Criterion::statistical, config.plan.z_threshold, tp.z_score));
  return out;
}

std::vector<CheckReport> run_theorem1(const ModelSpec& model, const FlipRegion& flip,
                                      const RunConfig& config) {
  if (flip.volume() == 0) throw ConfigError("theorem1 needs a nonempty flip region");
  const auto summary = summarize(model, flip);
  std::vector<CheckReport> out;
  const double pi = std::numbers::pi;
  if (model.kind == ModelKind::random_field && covers_volume(model, flip)) {
    const std::size_t N = model.size();
    const double n = static_cast<double>(N);
    const double beta = model.beta;
    const auto integral = theorem1_integral_closed(N, beta, config.legendre, config.hermite);
    const double var = rf_lemma1_lhs(N, beta, 0.0, pi, config.hermite);
    const double k1 = rf_cosine_term(N, beta, config.legendre, config.hermite);
    const double oracle = (beta * beta * k1 - var) / (std::pow(beta, 4) * n * n);
    out.push_back(make_check("theorem1_rearrangement", summary, integral.value, oracle,
                             Criterion::equal_rel, 1e-6));
    out.push_back(make_check("theorem1_bound", summary, std::abs(integral.value),
                             pi * pi * (3.0 / n + 1.0 / (n * n)), Criterion::upper_bound, 1e-9));
    return out;
  }
  const NormalStream stream(config.plan.seed);
  const std::uint64_t n = std::min<std::uint64_t>(config.plan.n_samples, 20);
  const auto rule = gauss_legendre(config.legendre, 0.0, pi);
  std::vector<CheckReport> worst;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto ensemble = make_ensemble(model, flip, stream, i);
    for (int p = 0; p < 4; ++p) {
      for (int q = 0; q < 4; ++q) {
        const double t = p * pi / 4.0, s = q * pi / 4.0;
        keep_worst(worst, make_check("theorem1_truncated", summary,
                                     theorem1_bracket_sample(ensemble, t, s),
                                     theorem1_truncated_sample(ensemble, t, s),
                                     Criterion::equal_abs, 1e-10));
      }
    }
    keep_worst(worst, make_check("theorem1_middle_terms", summary,
                                 lemma1_rhs_sample(ensemble, rule, MiddleTerm::tst),
                                 lemma1_rhs_sample(ensemble, rule, MiddleTerm::sts),
                                 Criterion::equal_abs, 1e-9));
  }
  return worst;
}

std::vector<CheckReport> run_theorem2(const ModelSpec& model, const RunConfig& config) {
  const auto r = theorem2_combination(model, config.plan);
  return {make_check("theorem2_rearrangement", summarize(model, full_region(model)),
                     r.combination.mean, r.rearranged.mean, Criterion::statistical,
                     config.plan.z_threshold, r.paired.z_score)};
}

std::vector<CheckReport> run_concentration(const ModelSpec& model, const FlipRegion& flip,
                                           const RunConfig& config) {
  const double scale = flip.volume() > 0 ? std::sqrt(static_cast<double>(flip.volume())) : 1.0;
  std::vector<double> grid;
  for (double f : {0.5, 1.0, 2.0, 4.0}) grid.push_back(f * scale);
  return concentration_check(model, flip, config.plan, grid).reports;
}

std::vector<CheckReport> run_gg_bounds(const ModelSpec& model, const RunConfig& config) {
  if (model.kind != ModelKind::random_field) throw ConfigError("gg_bounds needs a random_field model");
  const std::size_t N = model.size();
  const double pi = std::numbers::pi;
  const std::vector<std::pair<std::string, Gamma>> gammas{
      {"gg_bound_theorem1", {1, 0, -2, 1}},
      {"gg_bound_pair", {1, 1, -2, 0}},
      {"gg_bound_quartet", {1, 2, 0, -3}}};
  std::vector<CheckReport> out;
  for (const auto& [name, gamma] : gammas) {
    std::optional<CheckReport> tightest;
    for (int p = 0; p < 5; ++p) {
      for (int q = 0; q < 5; ++q) {
        auto r = gg_bound_check(N, model.beta, p * pi / 4.0, q * pi / 4.0, gamma, config.hermite);
        if (!tightest || r.rhs - r.lhs < tightest->rhs - tightest->lhs) tightest = r;
      }
    }
    tightest->name = name;
    out.push_back(*tightest);
  }
  double residual = 0.0;
  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) {
      residual = std::max(residual,
                          std::abs(roma_residual(N, model.beta, p * pi / 4.0, q * pi / 4.0, config.hermite)));
    }
  }
  out.push_back(make_check("roma_residual", {"random_field", N, model.beta, N}, residual,
                           roma_bound(N), Criterion::upper_bound, kQuadratureSlack));
  return out;
}

json flip_from_text(const std::string& text) {
  if (text == "all" || text == "none") return text;
  json list = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("invalid --flip entry '" + item + "'");
    }
    if (pos != item.size()) throw ConfigError("invalid --flip entry '" + item + "'");
    list.push_back(v);
  }
  return list;
}

std::string summary_path(const std::string& csv_path) {
  const std::string ext = ".csv";
  if (csv_path.size() > ext.size() && csv_path.ends_with(ext)) {
    return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
  }
  return csv_path + ".json";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  require_keys(doc, {"model", "checks", "plan", "quadrature", "flip", "interval", "angles",
                     "tolerance", "output"},
               "config");
  RunConfig c;
  if (doc.contains("model")) {
    if (!doc["model"].is_object()) throw ConfigError("model must be an object");
    c.model = doc["model"];
  }
  if (doc.contains("checks")) {
    if (!doc["checks"].is_array()) throw ConfigError("checks must be a list");
    for (const auto& v : doc["checks"]) {
      if (!v.is_string()) throw ConfigError("check names must be strings");
      check_name(v.get<std::string>());
      c.checks.push_back(v.get<std::string>());
    }
  }
  if (doc.contains("plan")) {
    const auto& p = doc["plan"];
    require_keys(p, {"seed", "samples", "z", "threads"}, "plan");
    if (p.contains("seed")) c.plan.seed = size_from_json(p["seed"], "plan.seed");
    if (p.contains("samples")) c.plan.n_samples = size_from_json(p["samples"], "plan.samples");
    if (p.contains("z")) {
      if (!p["z"].is_number()) throw ConfigError("plan.z must be a number");
      c.plan.z_threshold = p["z"].get<double>();
    }
    if (p.contains("threads")) {
      c.plan.parallel_width = static_cast<unsigned>(size_from_json(p["threads"], "plan.threads"));
    }
  }
  if (doc.contains("quadrature")) {
    const auto& q = doc["quadrature"];
    require_keys(q, {"legendre", "hermite"}, "quadrature");
    if (q.contains("legendre")) c.legendre = size_from_json(q["legendre"], "quadrature.legendre");
    if (q.contains("hermite")) c.hermite = size_from_json(q["hermite"], "quadrature.hermite");
  }
  if (doc.contains("flip")) {
    const auto& f = doc["flip"];
    if (f.is_string()) {
      if (f != "all" && f != "none") throw ConfigError("flip must be \"all\", \"none\" or a list");
    } else if (f.is_array()) {
      for (const auto& v : f) size_from_json(v, "flip entries");
    } else {
      throw ConfigError("flip must be \"all\", \"none\" or a list");
    }
    c.flip = f;
  }
  if (doc.contains("interval")) c.interval = pair_from_json(doc["interval"], "interval");
  if (doc.contains("angles")) c.angles = pair_from_json(doc["angles"], "angles");
  if (doc.contains("tolerance")) {
    if (!doc["tolerance"].is_number()) throw ConfigError("tolerance must be a number");
    c.tolerance = doc["tolerance"].get<double>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output must be a string");
    c.output = doc["output"].get<std::string>();
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json doc;
  if (c.model) doc["model"] = *c.model;
  doc["checks"] = c.checks;
  doc["plan"] = {{"seed", c.plan.seed},
                 {"samples", c.plan.n_samples},
                 {"z", c.plan.z_threshold},
                 {"threads", c.plan.parallel_width}};
  doc["quadrature"] = {{"legendre", c.legendre}, {"hermite", c.hermite}};
  doc["flip"] = c.flip;
  doc["interval"] = c.interval;
  doc["angles"] = c.angles;
  if (c.tolerance) doc["tolerance"] = *c.tolerance;
  if (c.output) doc["output"] = *c.output;
  return doc;
}

FlipRegion resolve_flip(const ModelSpec& model, const json& flip) {
  if (flip.is_string()) {
    if (flip == "all") return full_region(model);
    if (flip == "none") return empty_region(model);
    throw ConfigError("flip must be \"all\", \"none\" or a list");
  }
  std::vector<std::size_t> sites;
  for (const auto& v : flip) {
    const auto s = size_from_json(v, "flip entries");
    if (s >= model.size()) throw ConfigError("flip site " + std::to_string(s) + " is out of range");
    sites.push_back(s);
  }
  return make_flip_region(model, std::move(sites));
}

std::vector<CheckReport> execute(const RunConfig& config) {
  if (!config.model) throw ConfigError("model section missing");
  if (config.checks.empty()) throw ConfigError("no checks requested");
  validate(config.plan);
  const auto model = model_from_json(*config.model);
  const auto flip = resolve_flip(model, config.flip);

  std::vector<CheckReport> all;
  for (const auto& name : config.checks) {
    check_name(name);
    const auto start = Clock::now();
    std::vector<CheckReport> rows;
    if (name == "rf_suite") rows = run_rf_suite(model, config);
    else if (name == "lemma1") rows = run_lemma1(model, flip, config);
    else if (name == "theorem1") rows = run_theorem1(model, flip, config);
    else if (name == "theorem2") rows = run_theorem2(model, config);
    else if (name == "internal_energy") rows = internal_energy_checks(model, config.plan);
    else if (name == "concentration") rows = run_concentration(model, flip, config);
    else if (name == "gg_bounds") rows = run_gg_bounds(model, config);
    const double runtime = std::chrono::duration<double>(Clock::now() - start).count();
    for (auto& r : rows) {
      r.runtime = runtime;
      if (config.tolerance && r.criterion != Criterion::statistical) {
        r = with_tolerance(r, *config.tolerance);
      }
      all.push_back(std::move(r));
    }
  }
  return all;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for Gaussian spin glasses under coupling flips"};
  app.require_subcommand(1);
  auto* check = app.add_subcommand("check", "run one or more checks");

  std::vector<std::string> names;
  std::string config_path, model_kind, flip_text, out_path;
  std::size_t sites = 0, quad = 0, hermite = 0;
  std::vector<std::size_t> dims;
  double beta = 0.0, z = 0.0, tol = 0.0;
  std::uint64_t seed = 0, samples = 0;
  unsigned threads = 0;
  std::vector<double> interval, angles;

  check->add_option("checks", names, "lemma1 theorem1 theorem2 internal_energy concentration rf_suite gg_bounds");
  auto* o_config = check->add_option("--config", config_path, "JSON config file");
  auto* o_model = check->add_option("--model", model_kind, "random_field | sk | ea_chain | ea_grid | custom");
  auto* o_sites = check->add_option("--sites", sites, "number of sites");
  auto* o_dims = check->add_option("--dims", dims, "grid dimensions, e.g. 4,4")->delimiter(',');
  auto* o_beta = check->add_option("--beta", beta, "inverse temperature");
  auto* o_flip = check->add_option("--flip", flip_text, "all | none | comma-separated site indices");
  auto* o_seed = check->add_option("--seed", seed, "RNG seed");
  auto* o_samples = check->add_option("--samples", samples, "disorder samples");
  auto* o_quad = check->add_option("--quad", quad, "Gauss-Legendre order per axis");
  auto* o_hermite = check->add_option("--hermite", hermite, "Gauss-Hermite order per axis");
  auto* o_z = check->add_option("--z", z, "z-score threshold");
  auto* o_out = check->add_option("--out", out_path, "CSV output path (JSON summary alongside)");
  auto* o_tol = check->add_option("--tol", tol, "tolerance for deterministic checks");
  auto* o_interval = check->add_option("--interval", interval, "Lemma-1 interval a,b")->delimiter(',')->expected(2);
  auto* o_angles = check->add_option("--angles", angles, "per-sample angles t,s")->delimiter(',')->expected(2);
  auto* o_threads = check->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    RunConfig config;
    if (*o_config) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
      }
      config = config_from_json(doc);
    }
    if (!names.empty()) {
      for (const auto& n : names) check_name(n);
      config.checks = names;
    }

    const bool model_flags = *o_model || *o_sites || *o_dims;
    if (model_flags || (config.model && *o_beta)) {
      json m = config.model ? *config.model : json::object();
      if (*o_model) m["kind"] = model_kind;
      if (*o_sites) m["sites"] = sites;
      if (*o_dims) m["dims"] = dims;
      if (*o_beta) m["beta"] = beta;
      if (!m.contains("kind")) m["kind"] = m.contains("dims") ? "ea_grid" : "random_field";
      config.model = m;
    }
    if (*o_flip) config.flip = flip_from_text(flip_text);
    if (*o_seed) config.plan.seed = seed;
    if (*o_samples) config.plan.n_samples = samples;
    if (*o_quad) config.legendre = quad;
    if (*o_hermite) config.hermite = hermite;
    if (*o_z) config.plan.z_threshold = z;
    if (*o_out) config.output = out_path;
    if (*o_tol) config.tolerance = tol;
    if (*o_interval) config.interval = {interval[0], interval[1]};
    if (*o_angles) config.angles = {angles[0], angles[1]};
    if (*o_threads) config.plan.parallel_width = threads;

    const auto start = Clock::now();
    const auto reports = execute(config);
    const double runtime = std::chrono::duration<double>(Clock::now() - start).count();
    const bool all_pass =
        std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });

    if (config.output) {
      std::ofstream csv(*config.output);
      if (!csv) throw ConfigError("cannot write '" + *config.output + "'");
      write_csv(csv, reports);
      json summary;
      summary["config"] = config_to_json(config);
      summary["model"] = model_to_json(model_from_json(*config.model));
      summary["timestamp"] = utc_timestamp();
      summary["runtime_seconds"] = runtime;
      summary["all_pass"] = all_pass;
      json rows = json::array();
      for (const auto& r : reports) {
        rows.push_back({{"check", r.name},
                        {"criterion", to_string(r.criterion)},
                        {"tolerance", r.tolerance},
                        {"pass", r.pass},
                        {"runtime_seconds", r.runtime}});
      }
      summary["checks"] = rows;
      std::ofstream js(summary_path(*config.output));
      js << summary.dump(2) << '\n';
    } else {
      write_csv(out, reports);
    }
    for (const auto& r : reports) {
      if (!r.pass) err << "FAIL " << r.name << ": lhs=" << format_double(r.lhs)
                       << " rhs=" << format_double(r.rhs) << '\n';
    }
    return all_pass ? kExitPass : kExitFail;
  } catch (const EnumerationLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace spinflip::cli

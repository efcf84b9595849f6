#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "plhom/experiments.hpp"
#include "plhom/version.hpp"

namespace plhom::cli {
namespace {

using nlohmann::json;

WeightPreset parse_preset(const std::string& text) {
  WeightPreset preset;
  std::stringstream ss(text);
  std::string tok;
  if (!std::getline(ss, tok, ',')) throw std::invalid_argument("empty weight spec");
  preset.name = tok;
  while (std::getline(ss, tok, ',')) preset.params.push_back(std::stod(tok));
  return preset;
}

ProblemSpec make_spec(const RunConfig& cfg) {
  return ProblemSpec::make(cfg.p, build_weight(parse_preset(cfg.weight)), cfg.eps,
                           cfg.length, build_weight(parse_preset(cfg.coefficient)));
}

std::vector<std::string> provenance(const RunConfig& cfg) {
  return {std::string("plhom ") + kVersion, "config " + to_json(cfg)};
}

// Data goes to --out when set, else stdout.
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output file '" + path + "'");
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_solve(const RunConfig& cfg) {
  const ProblemSpec spec = make_spec(cfg);
  EigenResult r;
  if (cfg.mode == "phase") {
    r = solve_eigen(spec, cfg.k, cfg.tol);
  } else if (cfg.mode == "endpoint") {
    if (!(cfg.bracket_lo > 0.0 && cfg.bracket_hi > cfg.bracket_lo))
      throw std::invalid_argument("mode endpoint requires --bracket lo,hi with 0 < lo < hi");
    r = solve_eigen(spec, cfg.k, cfg.tol, SolveMode::endpoint,
                    std::make_pair(cfg.bracket_lo, cfg.bracket_hi));
  } else {
    throw std::invalid_argument("mode: expected 'phase' or 'endpoint'");
  }
  std::cout << "lambda " << csv_number(r.lambda) << '\n'
            << "sqrt_lambda " << csv_number(std::sqrt(r.lambda)) << '\n';
  std::cerr << "iterations " << r.iterations << " residual " << r.residual
            << " zeros " << r.zeros.size() << '\n';
  if (!cfg.out.empty()) {
    OutStream os(cfg.out);
    for (const auto& line : provenance(cfg)) os.get() << "# " << line << '\n';
    os.get() << "x,u\n";
    for (const auto& [x, u] : reconstruct_eigenfunction(spec, r, cfg.samples))
      os.get() << csv_number(x) << ',' << csv_number(u) << '\n';
  }
  return 0;
}

int cmd_sweep_eps(const RunConfig& cfg) {
  if (cfg.eps_list.empty())
    throw std::invalid_argument("sweep-eps requires --eps-list v1,v2,...");
  const ProblemSpec spec = make_spec(cfg);
  std::vector<int> ks = cfg.k_list.empty() ? std::vector<int>{cfg.k} : cfg.k_list;
  std::vector<std::string> failures;
  const auto records = sweep_eps(spec, cfg.eps_list, ks, cfg.tol, &failures);
  OutStream os(cfg.out);
  write_records_csv(os.get(), records, provenance(cfg));
  for (const auto& f : failures) std::cerr << "cell failed: " << f << '\n';
  if (const auto fit = fit_rate(records, RateFit::Axis::eps, cfg.tol))
    std::cerr << "eps-rate slope " << fit->slope << " r2 " << fit->r_squared
              << " points " << fit->points_used << '\n';
  return failures.empty() ? 0 : 1;
}

int cmd_sweep_k(const RunConfig& cfg) {
  const ProblemSpec spec = make_spec(cfg);
  std::vector<std::string> warnings;
  const auto records = sweep_k(spec, cfg.eps, cfg.k_max, cfg.tol, &warnings);
  OutStream os(cfg.out);
  write_records_csv(os.get(), records, provenance(cfg));
  for (const auto& w : warnings) std::cerr << w << '\n';
  if (const auto fit = fit_rate(records, RateFit::Axis::k, cfg.tol))
    std::cerr << "k-rate slope " << fit->slope << " r2 " << fit->r_squared
              << " points " << fit->points_used << '\n';
  return 0;
}

int cmd_zeros(const RunConfig& cfg) {
  if (cfg.eps_list.empty())
    throw std::invalid_argument("zeros requires --eps-list v1,v2,...");
  const ProblemSpec spec = make_spec(cfg);
  const auto records = track_zeros(spec, cfg.eps_list, cfg.k, cfg.tol);
  OutStream os(cfg.out);
  write_zero_records_csv(os.get(), records, provenance(cfg));
  return 0;
}

int cmd_bounds(const RunConfig& cfg) {
  const ProblemSpec spec = make_spec(cfg);
  const PExponent& pe = spec.trig->exponent();
  BoundReport rep;
  if (cfg.theorem == "teo1d") {
    rep = bound_teo1d(spec.weight, pe, cfg.eps, cfg.k, cfg.length);
  } else if (cfg.theorem == "explicit") {
    rep = bound_explicit(spec.weight, cfg.alpha, cfg.beta, pe, cfg.n_dim, cfg.eps, cfg.k);
  } else if (cfg.theorem == "linear1d") {
    rep = bound_linear1d(spec.weight, cfg.eps, cfg.k);
  } else if (cfg.theorem == "general") {
    const TransformedProblem t = transform_general(spec);
    rep = bound_general_eq(t, spec.coefficient.upper(), spec.weight.lower(), pe,
                           cfg.eps, cfg.k);
  } else {
    throw std::invalid_argument("theorem: expected teo1d|explicit|linear1d|general");
  }
  if (cfg.observed) {
    const double lam = solve_eigen(spec, cfg.k, cfg.tol).lambda;
    const auto [L, a_star] =
        homogenize_coefficient(spec.coefficient, spec.trig->exponent());
    (void)L;
    const double lim =
        limit_eigenvalue({pe, spec.length, spec.weight.mean(), a_star}, cfg.k);
    rep.with_observed(std::abs(lam - lim));
  }
  OutStream os(cfg.out);
  if (cfg.csv) {
    for (const auto& line : provenance(cfg)) os.get() << "# " << line << '\n';
    os.get() << "theorem,eps,k,constant,bound,observed,ratio\n"
             << cfg.theorem << ',' << csv_number(cfg.eps) << ',' << cfg.k << ','
             << csv_number(rep.constant) << ',' << csv_number(rep.bound_value) << ','
             << csv_number(rep.observed_error) << ',' << csv_number(rep.ratio) << '\n';
  } else {
    os.get() << "theorem " << cfg.theorem << "\nconstant " << csv_number(rep.constant)
             << "\nbound " << csv_number(rep.bound_value);
    if (cfg.observed)
      os.get() << "\nobserved " << csv_number(rep.observed_error) << "\nratio "
               << csv_number(rep.ratio);
    os.get() << '\n';
  }
  return 0;
}

int cmd_transform(const RunConfig& cfg) {
  const ProblemSpec spec = make_spec(cfg);
  const TransformedProblem t = transform_general(spec);
  const auto [L, a_star] = homogenize_coefficient(spec.coefficient, spec.trig->exponent());
  (void)L;
  std::cout << "L " << csv_number(t.L) << "\nL_eps " << csv_number(t.L_eps)
            << "\ndelta " << csv_number(t.delta) << "\na_star " << csv_number(a_star)
            << "\nmu_scale " << csv_number(t.mu_scale) << '\n';
  if (!cfg.out.empty()) {
    OutStream os(cfg.out);
    for (const auto& line : provenance(cfg)) os.get() << "# " << line << '\n';
    os.get() << "z,g\n";
    for (int i = 0; i < cfg.samples; ++i) {
      const double z = static_cast<double>(i) / (cfg.samples - 1);
      os.get() << csv_number(z) << ',' << csv_number(t.g.eval(z)) << '\n';
    }
  }
  return 0;
}

int cmd_trig(const RunConfig& cfg) {
  if (cfg.resolution < 2) throw std::invalid_argument("trig needs --points >= 2");
  const PTrig trig(cfg.p);
  std::cout << "pi_p " << csv_number(trig.pi_p()) << '\n';
  OutStream os(cfg.out);
  os.get() << "x,sin_p,cos_p\n";
  for (int i = 0; i < cfg.resolution; ++i) {
    const double x = 2.0 * trig.pi_p() * i / (cfg.resolution - 1);
    os.get() << csv_number(x) << ',' << csv_number(trig.sin_p(x)) << ','
             << csv_number(trig.cos_p(x)) << '\n';
  }
  return 0;
}

int cmd_figure(const RunConfig& cfg) {
  const std::string payload = figure_data(cfg.figure_id, cfg.resolution);
  OutStream os(cfg.out);
  for (const auto& line : provenance(cfg)) os.get() << "# " << line << '\n';
  os.get() << payload;
  return 0;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--p", cfg.p, "exponent p (> 1)");
  sub->add_option("--eps", cfg.eps, "oscillation scale");
  sub->add_option("--k", cfg.k, "eigenvalue index (>= 1)");
  sub->add_option("--weight", cfg.weight, "weight preset NAME[,params]");
  sub->add_option("--coefficient", cfg.coefficient, "coefficient preset NAME[,params]");
  sub->add_option("--length", cfg.length, "interval length");
  sub->add_option("--tol", cfg.tol, "relative bisection tolerance");
  sub->add_option("--mode", cfg.mode, "solver mode: phase|endpoint");
  sub->add_option("--out", cfg.out, "output file (default: stdout)");
}

}  // namespace

std::string to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["p"] = c.p;
  j["length"] = c.length;
  j["eps"] = c.eps;
  j["k"] = c.k;
  j["weight"] = c.weight;
  j["coefficient"] = c.coefficient;
  j["tol"] = c.tol;
  j["mode"] = c.mode;
  j["bracket_lo"] = c.bracket_lo;
  j["bracket_hi"] = c.bracket_hi;
  j["eps_list"] = c.eps_list;
  j["k_list"] = c.k_list;
  j["k_max"] = c.k_max;
  j["figure_id"] = c.figure_id;
  j["resolution"] = c.resolution;
  j["samples"] = c.samples;
  j["theorem"] = c.theorem;
  j["n_dim"] = c.n_dim;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["csv"] = c.csv;
  j["observed"] = c.observed;
  j["out"] = c.out;
  return j.dump();
}

RunConfig from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      field = j.at(key).get<std::decay_t<decltype(field)>>();
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string("config: field '") + key +
                                  "' has the wrong type");
    }
  };
  get("subcommand", c.subcommand);
  get("p", c.p);
  get("length", c.length);
  get("eps", c.eps);
  get("k", c.k);
  // weights come either as "name,p1,p2" strings or as {"name":..., "params":[...]}
  auto get_weight = [&j](const char* key, std::string& field) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_object()) {
      std::string spec_str = v.value("name", std::string());
      if (spec_str.empty())
        throw std::invalid_argument(std::string("config: field '") + key +
                                    "' object needs a 'name'");
      if (v.contains("params"))
        for (double prm : v.at("params").get<std::vector<double>>())
          spec_str += "," + std::to_string(prm);
      field = spec_str;
      return;
    }
    try {
      field = v.get<std::string>();
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string("config: field '") + key +
                                  "' has the wrong type");
    }
  };
  get_weight("weight", c.weight);
  get_weight("coefficient", c.coefficient);
  get("tol", c.tol);
  get("mode", c.mode);
  get("bracket_lo", c.bracket_lo);
  get("bracket_hi", c.bracket_hi);
  get("eps_list", c.eps_list);
  get("k_list", c.k_list);
  get("k_max", c.k_max);
  get("figure_id", c.figure_id);
  get("resolution", c.resolution);
  get("samples", c.samples);
  get("theorem", c.theorem);
  get("n_dim", c.n_dim);
  get("alpha", c.alpha);
  get("beta", c.beta);
  get("csv", c.csv);
  get("observed", c.observed);
  get("out", c.out);
  return c;
}

int run(int argc, const char* const* argv) {
  RunConfig cfg;

  // --config seeds the defaults; explicit flags then override field by field
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) {
        std::cerr << "error: cannot read config file '" << argv[i + 1] << "'\n";
        return 2;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        cfg = from_json(ss.str());
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
      }
    }
  }

  CLI::App app{"1-D p-Laplacian eigenvalues with rapidly oscillating weights"};
  app.require_subcommand(0, 1);
  std::string config_path, dump_path;
  std::string bracket_str;

  auto* solve = app.add_subcommand("solve", "compute one eigenvalue");
  auto* sweep_e = app.add_subcommand("sweep-eps", "eigenvalue error sweep over eps");
  auto* sweep_kk = app.add_subcommand("sweep-k", "eigenvalue error sweep over k");
  auto* zeros = app.add_subcommand("zeros", "eigenfunction zero convergence table");
  auto* bounds = app.add_subcommand("bounds", "evaluate a convergence-rate bound");
  auto* transform = app.add_subcommand("transform", "coefficient-removing change of variables");
  auto* trig = app.add_subcommand("trig", "pi_p and a sin_p/cos_p table");
  auto* figure = app.add_subcommand("figure", "canned figure datasets as CSV");

  for (CLI::App* sub : {solve, sweep_e, sweep_kk, zeros, bounds, transform, trig, figure}) {
    add_common(sub, cfg);
    sub->add_option("--config", config_path, "JSON config file (flags override)");
    sub->add_option("--dump-config", dump_path, "write the effective config as JSON");
  }
  solve->add_option("--bracket", bracket_str, "endpoint-mode bracket lo,hi");
  solve->add_option("--samples", cfg.samples, "eigenfunction samples for --out");
  sweep_e->add_option("--eps-list", cfg.eps_list, "eps values")->delimiter(',');
  sweep_e->add_option("--k-list", cfg.k_list, "k values")->delimiter(',');
  sweep_kk->add_option("--k-max", cfg.k_max, "sweep k = 1..k_max");
  zeros->add_option("--eps-list", cfg.eps_list, "eps values")->delimiter(',');
  bounds->add_option("--theorem", cfg.theorem, "teo1d|explicit|linear1d|general");
  bounds->add_option("--n-dim", cfg.n_dim, "dimension for the explicit bound");
  bounds->add_option("--alpha", cfg.alpha, "coefficient lower bound (explicit)");
  bounds->add_option("--beta", cfg.beta, "coefficient upper bound (explicit)");
  bounds->add_flag("--csv", cfg.csv, "emit CSV instead of text");
  bounds->add_flag("--observed", cfg.observed, "also solve and report the ratio");
  transform->add_option("--samples", cfg.samples, "g samples for --out");
  trig->add_option("--points", cfg.resolution, "table rows over one period");
  figure->add_option("--id", cfg.figure_id, "figure id: 1|2|3|4");
  figure->add_option("--resolution", cfg.resolution, "samples per curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!bracket_str.empty()) {
    std::stringstream ss(bracket_str);
    char comma = 0;
    if (!(ss >> cfg.bracket_lo >> comma >> cfg.bracket_hi) || comma != ',') {
      std::cerr << "error: --bracket expects lo,hi\n";
      return 2;
    }
  }

  std::string sub;
  for (CLI::App* s : app.get_subcommands()) sub = s->get_name();
  if (sub.empty()) sub = cfg.subcommand;  // config may carry it
  if (sub.empty()) {
    std::cerr << app.help();
    return 2;
  }
  cfg.subcommand = sub;

  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    if (!out) {
      std::cerr << "error: cannot write config to '" << dump_path << "'\n";
      return 2;
    }
    out << to_json(cfg) << '\n';
  }

  try {
    if (sub == "solve") return cmd_solve(cfg);
    if (sub == "sweep-eps") return cmd_sweep_eps(cfg);
    if (sub == "sweep-k") return cmd_sweep_k(cfg);
    if (sub == "zeros") return cmd_zeros(cfg);
    if (sub == "bounds") return cmd_bounds(cfg);
    if (sub == "transform") return cmd_transform(cfg);
    if (sub == "trig") return cmd_trig(cfg);
    if (sub == "figure") return cmd_figure(cfg);
    std::cerr << "error: unknown subcommand '" << sub << "'\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace plhom::cli

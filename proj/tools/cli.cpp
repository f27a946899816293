#include "gconvex/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gconvex/auction.hpp"
#include "gconvex/errors.hpp"
#include "gconvex/gcf_io.hpp"
#include "gconvex/ot_dual.hpp"
#include "gconvex/validate.hpp"

namespace gcx::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out = ".";
  std::size_t threads = 1;
  std::string config;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c) {
  c.seed_opt = sub->add_option("--seed", c.seed, "random seed");
  c.out_opt = sub->add_option("--out", c.out, "output directory");
  c.threads_opt = sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "flat JSON config; flags override its values");
}

Json load_config(const std::string& path, const std::set<std::string>& allowed) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw InputError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw InputError("unknown config key '" + key + "'");
    if (value.is_object()) throw InputError("config key '" + key + "' must not be an object (flat config)");
  }
  return j;
}

// File values apply only where the flag was not given.
template <class T>
void take(const CLI::Option* flag, const Json& cfg, const char* key, T& target) {
  if ((flag && flag->count() > 0) || !cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InputError(std::string("config key '") + key + "' has the wrong type");
  }
}

void take_common(Common& c, const Json& cfg) {
  take(c.seed_opt, cfg, "seed", c.seed);
  take(c.out_opt, cfg, "out", c.out);
  take(c.threads_opt, cfg, "threads", c.threads);
  if (c.threads == 0) throw InputError("threads must be at least 1");
}

fs::path prepare_out(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  const fs::path probe = p / ".gconvex_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw InputError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << text;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json versions() {
  return Json{{"gconvex", GCONVEX_VERSION},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cli11", CLI11_VERSION},
              {"compiler", __VERSION__}};
}

void write_manifest(const fs::path& dir, const std::string& command, Json config, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  write_json(dir / "manifest.json", Json{{"command", command},
                                         {"config", std::move(config)},
                                         {"seed", seed},
                                         {"versions", versions()},
                                         {"outputs", outputs}});
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct AuctionArgs {
  Common common;
  std::size_t items = 1;
  std::size_t menu_size = 0;  // 0: default for the item count
  std::size_t samples = 100000;
  std::size_t batch_size = 1024;
  std::size_t epochs_per_stage = 20;
  std::vector<double> tau_schedule;
  double learning_rate = 0.01;
  double lr_decay_per_stage = 0.5;
  std::size_t eval_samples = 200000;
  std::size_t export_grid = 0;
  std::vector<CLI::Option*> opts;
};

int run_auction(AuctionArgs& a, std::ostream& out, std::ostream& err) {
  const Json cfg = load_config(a.common.config,
                               {"items", "menu_size", "samples", "batch_size", "epochs_per_stage", "tau_schedule",
                                "learning_rate", "lr_decay_per_stage", "eval_samples", "export_grid", "seed",
                                "threads", "out"});
  take_common(a.common, cfg);
  take(a.opts[0], cfg, "items", a.items);
  take(a.opts[1], cfg, "menu_size", a.menu_size);
  take(a.opts[2], cfg, "samples", a.samples);
  take(a.opts[3], cfg, "batch_size", a.batch_size);
  take(a.opts[4], cfg, "epochs_per_stage", a.epochs_per_stage);
  take(a.opts[5], cfg, "tau_schedule", a.tau_schedule);
  take(a.opts[6], cfg, "learning_rate", a.learning_rate);
  take(a.opts[7], cfg, "lr_decay_per_stage", a.lr_decay_per_stage);
  take(a.opts[8], cfg, "eval_samples", a.eval_samples);
  take(a.opts[9], cfg, "export_grid", a.export_grid);
  if (a.items == 0) throw InputError("items must be at least 1");

  auction::TrainConfig tc = auction::TrainConfig::defaults_for(a.items);
  if (a.menu_size != 0) tc.menu_size = a.menu_size;
  tc.samples = a.samples;
  tc.batch_size = a.batch_size;
  tc.epochs_per_stage = a.epochs_per_stage;
  tc.tau_schedule = a.tau_schedule;
  tc.step_rule.learning_rate = a.learning_rate;
  tc.lr_decay_per_stage = a.lr_decay_per_stage;
  tc.eval_samples = a.eval_samples;
  tc.seed = a.common.seed;
  tc.threads = a.common.threads;
  tc.validate();
  const fs::path dir = prepare_out(a.common.out);

  const auction::TrainResult result = auction::train_auction(tc);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  std::vector<std::string> outputs{"mechanism.json", "report.json", "trace.csv"};
  write_json(dir / "mechanism.json", auction::mechanism_json(result.menu, result.report));
  Json report = auction::to_json(result.report);
  report["initial_hard_revenue"] = result.initial_hard_revenue;
  report["final_hard_revenue"] = result.final_hard_revenue;
  report["status"] = result.status == auction::TrainStatus::Converged ? "converged" : "early_stopped";
  report["warnings"] = result.warnings;
  write_json(dir / "report.json", report);
  {
    std::ofstream trace(dir / "trace.csv");
    write_trace_csv(trace, result.trace);
  }
  if (a.export_grid > 0) {
    std::ofstream grid(dir / "grid.csv");
    auction::write_grid_csv(grid, result.menu, a.export_grid);
    outputs.push_back("grid.csv");
  }
  Json echo = auction::to_json(tc);
  echo["threads"] = tc.threads;
  echo["export_grid"] = a.export_grid;
  echo["out"] = a.common.out;
  write_manifest(dir, "auction", echo, tc.seed, outputs);

  const auto& r = result.report;
  out << "items  profit/item  surplus/item  utility/item\n"
      << std::setw(5) << r.items << "  " << std::setw(11) << fixed(r.mean_profit_per_item) << "  " << std::setw(12)
      << fixed(r.mean_surplus_per_item) << "  " << std::setw(12) << fixed(r.mean_utility_per_item) << "\n";
  return kOk;
}

struct OtArgs {
  Common common;
  std::string instance;
  std::size_t subgradient_iterations = 2000;
  bool no_polish = false;
  CLI::Option* instance_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* polish_opt = nullptr;
};

Json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot read ") + what + " '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string(what) + " '" + path + "' is not valid JSON: " + e.what());
  }
}

int run_ot(OtArgs& a, std::ostream& out, std::ostream& err) {
  const Json cfg =
      load_config(a.common.config, {"instance", "subgradient_iterations", "polish", "seed", "threads", "out"});
  take_common(a.common, cfg);
  take(a.instance_opt, cfg, "instance", a.instance);
  take(a.iterations_opt, cfg, "subgradient_iterations", a.subgradient_iterations);
  bool polish = !a.no_polish;
  take(a.polish_opt, cfg, "polish", polish);
  if (a.instance.empty()) throw InputError("no instance file given");

  const ot::Instance inst = ot::instance_from_json(read_json_file(a.instance, "instance file"));
  const fs::path dir = prepare_out(a.common.out);
  ot::SolverConfig sc;
  sc.subgradient_iterations = a.subgradient_iterations;
  sc.polish = polish;
  const ot::SemiDiscreteProblem problem(inst.mu, inst.eta, inst.kernel);
  const ot::DualSolution sol = ot::solve_dual(problem, sc);
  for (const auto& w : sol.warnings) err << "warning: " << w << "\n";
  const ot::TransportAssignment assignment = ot::assign(sol, problem);

  write_json(dir / "solution.json", ot::solution_json(sol, assignment));
  std::ostringstream csv;
  csv << std::setprecision(17) << "mu_index,target_index,mass\n";
  for (std::size_t k = 0; k < assignment.target.size(); ++k) {
    csv << k << "," << assignment.target[k] << "," << inst.mu.weights()[static_cast<Eigen::Index>(k)] << "\n";
  }
  write_text(dir / "assignment.csv", csv.str());
  write_manifest(dir, "ot",
                 Json{{"instance", a.instance},
                      {"subgradient_iterations", sc.subgradient_iterations},
                      {"polish", sc.polish},
                      {"threads", a.common.threads},
                      {"out", a.common.out}},
                 a.common.seed, {"solution.json", "assignment.csv"});
  out << "dual value " << std::setprecision(12) << sol.value << "\n";
  return kOk;
}

struct ValidateArgs {
  Common common;
  std::string suite;
  CLI::Option* suite_opt = nullptr;
};

int run_validate(ValidateArgs& a, std::ostream& out, std::ostream&) {
  const Json cfg = load_config(a.common.config, {"suite", "seed", "threads", "out"});
  take_common(a.common, cfg);
  take(a.suite_opt, cfg, "suite", a.suite);
  std::vector<std::string> suites;
  if (a.suite == "all") {
    suites = validate::suite_names();
  } else {
    const auto& names = validate::suite_names();
    if (std::find(names.begin(), names.end(), a.suite) == names.end()) {
      throw InputError("unknown suite '" + a.suite + "' (expected one of lemmas, lean, uap, gradients, duality, "
                       "auction-identities, all)");
    }
    suites.push_back(a.suite);
  }
  const fs::path dir = prepare_out(a.common.out);
  Json results = Json::array();
  bool pass = true;
  for (const auto& name : suites) {
    const validate::SuiteResult r = validate::run_suite(name);
    pass = pass && r.pass();
    for (const auto& c : r.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << name << "/" << c.check_name << " max_error=" << std::setprecision(6)
          << c.max_error << " tol=" << c.tolerance << "\n";
    }
    for (const auto& n : r.notes) out << "note " << name << ": " << n << "\n";
    results.push_back(validate::to_json(r));
  }
  write_json(dir / "validation.json", Json{{"suites", std::move(results)}, {"pass", pass}});
  write_manifest(dir, "validate", Json{{"suite", a.suite}, {"out", a.common.out}}, a.common.seed,
                 {"validation.json"});
  return pass ? kOk : kValidationFailure;
}

struct ExportArgs {
  Common common;
  std::string mechanism;
  std::size_t resolution = 0;
  CLI::Option* mechanism_opt = nullptr;
  CLI::Option* resolution_opt = nullptr;
};

int run_export(ExportArgs& a, std::ostream& out, std::ostream&) {
  const Json cfg = load_config(a.common.config, {"mechanism", "resolution", "seed", "threads", "out"});
  take_common(a.common, cfg);
  take(a.mechanism_opt, cfg, "mechanism", a.mechanism);
  take(a.resolution_opt, cfg, "resolution", a.resolution);
  if (a.mechanism.empty()) throw InputError("no mechanism file given");
  if (a.resolution == 0) throw InputError("resolution must be at least 1");
  const auction::Menu menu = auction::menu_from_json(read_json_file(a.mechanism, "mechanism file"));
  const fs::path dir = prepare_out(a.common.out);
  {
    std::ofstream grid(dir / "grid.csv");
    auction::write_grid_csv(grid, menu, a.resolution);
  }
  write_manifest(dir, "export-grid",
                 Json{{"mechanism", a.mechanism}, {"resolution", a.resolution}, {"out", a.common.out}},
                 a.common.seed, {"grid.csv"});
  out << "wrote " << (dir / "grid.csv").string() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finitely convex function toolkit: auctions, semi-discrete transport and validation suites"};
  app.require_subcommand(1);

  AuctionArgs aa;
  CLI::App* auction_cmd = app.add_subcommand("auction", "train a menu mechanism for uniform buyer types");
  add_common(auction_cmd, aa.common);
  aa.opts.push_back(auction_cmd->add_option("--items", aa.items, "number of items"));
  aa.opts.push_back(auction_cmd->add_option("--menu-size", aa.menu_size, "menu entries including the opt-out"));
  aa.opts.push_back(auction_cmd->add_option("--samples", aa.samples, "training sample count"));
  aa.opts.push_back(auction_cmd->add_option("--batch-size", aa.batch_size, "minibatch size"));
  aa.opts.push_back(auction_cmd->add_option("--epochs-per-stage", aa.epochs_per_stage, "epochs per temperature"));
  aa.opts.push_back(auction_cmd->add_option("--tau-schedule", aa.tau_schedule, "temperatures, increasing")
                        ->delimiter(','));
  aa.opts.push_back(auction_cmd->add_option("--learning-rate", aa.learning_rate, "initial step size"));
  aa.opts.push_back(auction_cmd->add_option("--lr-decay", aa.lr_decay_per_stage, "step size factor per stage"));
  aa.opts.push_back(auction_cmd->add_option("--eval-samples", aa.eval_samples, "evaluation sample count"));
  aa.opts.push_back(auction_cmd->add_option("--export-grid", aa.export_grid, "also write grid.csv at this resolution"));

  OtArgs oa;
  CLI::App* ot_cmd = app.add_subcommand("ot", "solve a semi-discrete transport dual");
  add_common(ot_cmd, oa.common);
  oa.instance_opt = ot_cmd->add_option("instance", oa.instance, "instance JSON file");
  oa.iterations_opt = ot_cmd->add_option("--subgradient-iterations", oa.subgradient_iterations,
                                         "averaged subgradient iterations before refinement");
  oa.polish_opt = ot_cmd->add_flag("--no-polish", oa.no_polish, "skip the smoothed Newton refinement");

  ValidateArgs va;
  CLI::App* validate_cmd = app.add_subcommand("validate", "run a property suite");
  add_common(validate_cmd, va.common);
  va.suite_opt = validate_cmd->add_option("suite", va.suite, "lemmas|lean|uap|gradients|duality|auction-identities|all");

  ExportArgs ea;
  CLI::App* export_cmd = app.add_subcommand("export-grid", "evaluate a mechanism on a regular lattice");
  add_common(export_cmd, ea.common);
  ea.mechanism_opt = export_cmd->add_option("--mechanism", ea.mechanism, "mechanism JSON file");
  ea.resolution_opt = export_cmd->add_option("--resolution", ea.resolution, "points per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*auction_cmd) return run_auction(aa, out, err);
    if (*ot_cmd) return run_ot(oa, out, err);
    if (*validate_cmd) {
      if (va.suite.empty() && va.common.config.empty()) throw InputError("no suite given");
      return run_validate(va, out, err);
    }
    if (*export_cmd) return run_export(ea, out, err);
  } catch (const auction::TrainingAborted& e) {
    err << "error: training aborted: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace gcx::cli

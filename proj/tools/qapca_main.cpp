#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qapca/csv.hpp"
#include "qapca/embedding.hpp"
#include "qapca/experiments.hpp"
#include "qapca/table.hpp"

namespace {

using namespace qapca;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  int k = 1;
  double epsilon = 100.0;
  int reads = 0;
  std::string solver = "sa";
  std::string remote_url;
  std::uint64_t seed = 1;
  std::int64_t band_climit = 0;  // 0 = derive from n_limit - chain_margin
  int n_limit = 175;
  int chain_margin = 25;
  int sweeps = 1000;
  int l1bf_restarts = 1;
  std::string out = "qapca_run";
  std::string format = "csv";
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->set_config("--config");
  cmd->add_option("--k", opts.k, "number of components")->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", opts.epsilon, "orthogonality weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--reads", opts.reads, "anneal repetitions (0 = per-algorithm default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--solver", opts.solver, "spin solver")
      ->check(CLI::IsMember({"exhaustive", "sa", "remote"}));
  cmd->add_option("--remote-url", opts.remote_url, "remote solver base URL");
  cmd->add_option("--seed", opts.seed, "base random seed");
  cmd->add_option("--band-climit", opts.band_climit,
                  "coupler budget (0 = derive from --n-limit and --chain-margin)");
  cmd->add_option("--n-limit", opts.n_limit, "sample limit of the coupler model")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--chain-margin", opts.chain_margin, "samples reserved for chains")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--sweeps", opts.sweeps, "annealing sweeps per read")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--l1bf-restarts", opts.l1bf_restarts, "bit-flipping restarts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out, "output path prefix");
  cmd->add_option("--format", opts.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", opts.jobs, "worker threads for trials")->check(CLI::PositiveNumber);
}

CouplerBudget make_budget(const CommonOpts& opts) {
  CouplerBudget budget = CouplerBudget::with_limits(opts.n_limit, opts.chain_margin);
  if (opts.band_climit > 0) budget.c_limit = opts.band_climit;
  return budget;
}

QapcaConfig make_config(const CommonOpts& opts) {
  QapcaConfig config;
  config.k = opts.k;
  config.epsilon = opts.epsilon;
  config.reads = opts.reads;
  config.solver = solver_from_name(opts.solver);
  config.remote_url = opts.remote_url;
  config.seed = opts.seed;
  config.sweeps = opts.sweeps;
  config.budget = make_budget(opts);
  if (config.solver == SolverKind::remote && config.remote_url.empty()) {
    throw CLI::ValidationError("--remote-url", "required when --solver remote");
  }
  return config;
}

void write_echoed_config(const CLI::App& app, const std::string& prefix) {
  std::filesystem::path path(prefix + ".config.toml");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << app.config_to_str(true, true);
}

void write_tables(const ExperimentOutput& output, const std::string& prefix,
                  const std::string& format) {
  std::filesystem::path path(prefix);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  output.trials.write(prefix, "trials", format);
  output.summary.write(prefix, "summary", format);
}

int cmd_fit(CLI::App& cmd, const CommonOpts& opts, const std::string& input,
            const std::string& label_column, const std::string& method) {
  if (!std::filesystem::exists(input)) {
    std::cerr << "error: input file '" << input << "' does not exist\n";
    return kExitUsage;
  }
  CsvSchema schema;
  schema.label_column = label_column;
  const LabeledDataset data = load_csv(input, schema);

  const QapcaConfig config = make_config(opts);
  L1bfConfig l1bf;
  l1bf.restarts = opts.l1bf_restarts;
  l1bf.seed = opts.seed;

  Matrix basis;
  std::optional<Matrix> assignment;
  int rank = 0;
  nlohmann::json diag;
  if (method == "qapca") {
    MultiResult res = qapca_multi(data.train, config);
    rank = res.rank;
    basis = res.basis ? *res.basis : achieved_basis(data.train, res.assignment);
    assignment = res.assignment.as_double();
    diag["kappa"] = res.diagnostics.kappa;
    diag["couplers"] = res.diagnostics.couplers;
    diag["weight_scale"] = res.diagnostics.weight_scale;
    diag["best_energy"] = res.diagnostics.best_energy;
    diag["degenerate"] = res.degenerate();
  } else if (method == "qapca-r") {
    RecursiveResult res = qapca_recursive(data.train, config);
    rank = config.k;
    basis = res.basis;
    assignment = res.assignments.as_double();
    diag["kappa"] = res.diagnostics.front().kappa;
    diag["couplers"] = res.diagnostics.front().couplers;
    nlohmann::json energies = nlohmann::json::array();
    for (const SolveDiagnostics& d : res.diagnostics) energies.push_back(d.best_energy);
    diag["best_energy_per_component"] = std::move(energies);
  } else if (method == "l1-bf") {
    L1bfResult res = l1_bf(data.train, config.k, l1bf);
    rank = res.rank;
    basis = res.basis ? *res.basis : achieved_basis(data.train, res.assignment);
    assignment = res.assignment.as_double();
    diag["objective"] = res.objective;
    diag["flips"] = res.flips;
  } else {
    basis = l2_pca(data.train, config.k);
    rank = config.k;
  }

  std::filesystem::path prefix(opts.out);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  save_matrix_csv(opts.out + ".components.csv", basis);
  if (assignment) save_matrix_csv(opts.out + ".assignment.csv", *assignment);

  diag["method"] = method;
  diag["n"] = data.train.cols();
  diag["d"] = data.train.rows();
  diag["k"] = config.k;
  diag["rank"] = rank;
  std::ofstream diag_out(opts.out + ".diagnostics.json");
  diag_out << diag.dump(2) << '\n';

  write_echoed_config(cmd, opts.out);
  std::cout << "fit written to " << opts.out
            << ".{components.csv,assignment.csv,diagnostics.json,config.toml}\n";
  return 0;
}

int cmd_embed(CLI::App& cmd, const CommonOpts& opts, int n, const std::string& cache_path) {
  const CouplerBudget budget = make_budget(opts);

  EmbeddingLayout layout;
  bool from_cache = false;
  nlohmann::json cache_doc = nlohmann::json::object();
  const std::string key =
      std::to_string(n) + ":" + std::to_string(opts.k) + ":" + std::to_string(budget.c_limit);
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    std::ifstream in(cache_path);
    in >> cache_doc;
    if (cache_doc.contains(key)) from_cache = true;
  }

  nlohmann::json doc;
  if (from_cache) {
    doc = cache_doc[key];
  } else {
    layout = build_layout(n, opts.k, budget);
    // Unit source weights: the layout is data independent.
    const Matrix ones = Matrix::Ones(n, n);
    const BandedCoupling banded = apply_layout(layout, ones, opts.epsilon,
                                               opts.k > 1 ? static_cast<double>(opts.k) : 1.0);
    doc = nlohmann::json::parse(banded_to_json(banded));
    if (!cache_path.empty()) {
      cache_doc[key] = doc;
      std::ofstream out(cache_path);
      out << cache_doc.dump() << '\n';
    }
  }

  std::cout << doc.dump(2) << '\n';
  std::cerr << (from_cache ? "embedding loaded from cache\n" : "embedding built\n");
  if (opts.out != "qapca_run") {
    std::ofstream out(opts.out + ".embedding.json");
    out << doc.dump(2) << '\n';
    write_echoed_config(cmd, opts.out);
  }
  return 0;
}

int cmd_experiment(CLI::App& cmd, const CommonOpts& opts, const std::string& name,
                   int trials, int n, int d, double fraction, double sigma,
                   const std::string& data_path, const std::string& label_column,
                   const std::string& target_label, const std::string& train_path,
                   const std::string& faultless_path, std::vector<std::string> faulty_paths,
                   int fault_onset, const std::vector<std::string>& methods) {
  const QapcaConfig config = make_config(opts);
  L1bfConfig l1bf;
  l1bf.restarts = opts.l1bf_restarts;
  l1bf.seed = opts.seed;

  ExperimentOutput output;
  if (name == "gaussian") {
    GaussianProtocol protocol;
    protocol.d = d;
    protocol.n = n > 0 ? n : 20;
    protocol.trials = trials;
    protocol.noise_fraction = fraction;
    protocol.noise_sigma = sigma;
    protocol.seed = opts.seed;
    protocol.jobs = opts.jobs;
    protocol.solver = config;
    protocol.l1bf = l1bf;
    if (!methods.empty()) protocol.methods = methods;
    output = run_gaussian(protocol);
  } else if (name == "wbcd") {
    if (data_path.empty()) throw CLI::ValidationError("--data", "required for wbcd");
    CsvSchema schema;
    schema.label_column = label_column;
    schema.ignore_columns = {"id", "ID", "Id"};
    MislabelProtocol protocol;
    protocol.data = load_csv(data_path, schema);
    protocol.target_label = target_label;
    protocol.n_train = n;
    protocol.trials = trials;
    protocol.fraction = fraction;
    protocol.seed = opts.seed;
    protocol.jobs = opts.jobs;
    protocol.solver = config;
    protocol.l1bf = l1bf;
    if (!methods.empty()) protocol.methods = methods;
    output = run_mislabel(protocol);
  } else {  // tep
    if (train_path.empty() || faultless_path.empty() || faulty_paths.empty()) {
      throw CLI::ValidationError("--train/--test-faultless/--test-faulty",
                                 "required for tep");
    }
    CsvSchema schema;
    FaultDetectionProtocol protocol;
    protocol.train = load_csv(train_path, schema).train;
    protocol.test_faultless = load_csv(faultless_path, schema).train;
    for (const std::string& p : faulty_paths) {
      protocol.test_faulty.push_back(load_csv(p, schema).train);
    }
    protocol.fault_onset = fault_onset;
    protocol.n_train = n;
    protocol.trials = trials;
    protocol.noise_fraction = fraction;
    protocol.noise_sigma = sigma;
    protocol.seed = opts.seed;
    protocol.jobs = opts.jobs;
    protocol.solver = config;
    protocol.l1bf = l1bf;
    if (!methods.empty()) protocol.methods = methods;
    output = run_fault_detection(protocol);
  }

  write_tables(output, opts.out, opts.format);
  write_echoed_config(cmd, opts.out);
  std::cout << "experiment '" << name << "' wrote " << output.trials.rows.size()
            << " trial rows to " << opts.out << ".trials." << opts.format << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust L1 principal component analysis via Ising-form solvers"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();  // full defaults in the echoed config

  CommonOpts fit_opts, embed_opts, exp_opts;

  auto* fit = app.add_subcommand("fit", "fit components to a CSV dataset");
  add_common(fit, fit_opts);
  std::string fit_input, fit_label, fit_method = "qapca";
  fit->add_option("--input", fit_input, "input CSV (rows = samples)")->required();
  fit->add_option("--label-column", fit_label, "ignore this column as labels");
  fit->add_option("--method", fit_method, "fitting method")
      ->check(CLI::IsMember({"qapca", "qapca-r", "l1-bf", "svd"}));

  auto* embed = app.add_subcommand("embed", "print a banded coupler layout");
  add_common(embed, embed_opts);
  int embed_n = 0;
  std::string embed_cache;
  embed->add_option("--n", embed_n, "sample count")->required()->check(CLI::PositiveNumber);
  embed->add_option("--cache", embed_cache, "layout cache file (read/write)");

  auto* exp = app.add_subcommand("experiment", "run a named study");
  add_common(exp, exp_opts);
  std::string exp_name;
  int exp_trials = 100, exp_n = 0, exp_d = 50, exp_onset = 160;
  double exp_fraction = 0.2, exp_sigma = 100.0;
  std::string exp_data, exp_label = "diagnosis", exp_target = "B";
  std::string exp_train, exp_faultless;
  std::vector<std::string> exp_faulty, exp_methods;
  exp->add_option("name", exp_name, "experiment name")
      ->required()
      ->check(CLI::IsMember({"gaussian", "wbcd", "tep"}));
  exp->add_option("--trials", exp_trials, "realizations to average")->check(CLI::PositiveNumber);
  exp->add_option("--n", exp_n, "training samples (0 = protocol default)")
      ->check(CLI::NonNegativeNumber);
  exp->add_option("--d", exp_d, "feature count (gaussian)")->check(CLI::PositiveNumber);
  exp->add_option("--fraction", exp_fraction, "corruption fraction")
      ->check(CLI::Range(0.0, 1.0));
  exp->add_option("--sigma", exp_sigma, "corruption noise std")->check(CLI::NonNegativeNumber);
  exp->add_option("--data", exp_data, "labeled CSV (wbcd)");
  exp->add_option("--label-column", exp_label, "label column name (wbcd)");
  exp->add_option("--target", exp_target, "target class label (wbcd)");
  exp->add_option("--train", exp_train, "training CSV (tep)");
  exp->add_option("--test-faultless", exp_faultless, "faultless test CSV (tep)");
  exp->add_option("--test-faulty", exp_faulty, "faulty test CSVs (tep)");
  exp->add_option("--fault-onset", exp_onset, "first faulty sample index (tep)")
      ->check(CLI::NonNegativeNumber);
  exp->add_option("--methods", exp_methods, "subset of {qapca,qapca-r,l1-bf,svd}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(*fit, fit_opts, fit_input, fit_label, fit_method);
    if (embed->parsed()) return cmd_embed(*embed, embed_opts, embed_n, embed_cache);
    return cmd_experiment(*exp, exp_opts, exp_name, exp_trials, exp_n, exp_d, exp_fraction,
                          exp_sigma, exp_data, exp_label, exp_target, exp_train, exp_faultless,
                          exp_faulty, exp_onset, exp_methods);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

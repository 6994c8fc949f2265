#include "qapca/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace qapca {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

nlohmann::json opt_int(bool present, std::int64_t v) {
  return present ? nlohmann::json(v) : nlohmann::json();
}

nlohmann::json opt_double(bool present, double v) {
  return present ? nlohmann::json(v) : nlohmann::json();
}

}  // namespace

FitOutcome fit_method(const std::string& method, const Matrix& train, const QapcaConfig& config,
                      const L1bfConfig& l1bf_config) {
  FitOutcome out;
  const auto start = Clock::now();
  if (method == "qapca") {
    MultiResult res = qapca_multi(train, config);
    out.rank = res.rank;
    out.basis = res.basis ? *res.basis : achieved_basis(train, res.assignment);
    out.diagnostics = res.diagnostics;
    out.has_diagnostics = true;
  } else if (method == "qapca-r") {
    RecursiveResult res = qapca_recursive(train, config);
    out.rank = config.k;
    out.basis = res.basis;
    out.diagnostics = res.diagnostics.front();
    out.has_diagnostics = true;
  } else if (method == "l1-bf") {
    L1bfConfig cfg = l1bf_config;
    cfg.seed = config.seed;
    L1bfResult res = l1_bf(train, config.k, cfg);
    out.rank = res.rank;
    out.basis = res.basis ? *res.basis : achieved_basis(train, res.assignment);
  } else if (method == "svd") {
    out.basis = l2_pca(train, config.k);
    out.rank = config.k;
  } else {
    throw std::invalid_argument("fit_method: unknown method '" + method + "'");
  }
  out.seconds = seconds_since(start);
  return out;
}

void parallel_trials(int trials, int jobs, const std::function<void(int)>& fn) {
  if (trials < 1) throw std::invalid_argument("parallel_trials: trial count must be positive");
  jobs = std::max(1, std::min(jobs, trials));
  if (jobs == 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) fn(t);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

std::pair<double, double> mean_sem(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

namespace {

// Collects per-(method, metric) values and renders the summary table.
class Summarizer {
 public:
  Summarizer(std::vector<std::string> methods, std::vector<std::string> metrics)
      : methods_(std::move(methods)), metrics_(std::move(metrics)),
        values_(methods_.size() * metrics_.size()) {}

  void add(const std::string& method, const std::string& metric, double value) {
    values_[index(method, metric)].push_back(value);
  }

  Table table() const {
    Table out;
    out.columns.push_back("method");
    for (const auto& metric : metrics_) {
      out.columns.push_back(metric + "_mean");
      out.columns.push_back(metric + "_sem");
    }
    for (const auto& method : methods_) {
      std::vector<nlohmann::json> row{method};
      for (const auto& metric : metrics_) {
        const auto [mean, sem] = mean_sem(values_[index(method, metric)]);
        row.emplace_back(mean);
        row.emplace_back(sem);
      }
      out.add_row(std::move(row));
    }
    return out;
  }

 private:
  std::size_t index(const std::string& method, const std::string& metric) const {
    const auto m = std::find(methods_.begin(), methods_.end(), method) - methods_.begin();
    const auto k = std::find(metrics_.begin(), metrics_.end(), metric) - metrics_.begin();
    if (m >= static_cast<std::ptrdiff_t>(methods_.size()) ||
        k >= static_cast<std::ptrdiff_t>(metrics_.size())) {
      throw std::invalid_argument("Summarizer: unknown method or metric");
    }
    return static_cast<std::size_t>(m) * metrics_.size() + static_cast<std::size_t>(k);
  }

  std::vector<std::string> methods_;
  std::vector<std::string> metrics_;
  std::vector<std::vector<double>> values_;
};

}  // namespace

ExperimentOutput run_gaussian(const GaussianProtocol& protocol) {
  if (protocol.trials < 1) throw std::invalid_argument("run_gaussian: trials must be positive");
  const int test_n = protocol.test_n > 0 ? protocol.test_n : protocol.n;

  Table trials;
  trials.columns = {"trial",      "seed",  "method",   "n",      "d",
                    "k",          "epsilon", "solver", "rank",   "recon_train",
                    "recon_test", "kappa", "couplers", "energy", "seconds"};
  std::vector<std::vector<std::vector<nlohmann::json>>> slots(
      static_cast<std::size_t>(protocol.trials));

  parallel_trials(protocol.trials, protocol.jobs, [&](int t) {
    const std::uint64_t trial_seed = protocol.seed + static_cast<std::uint64_t>(t);
    const GaussianToy toy(protocol.d, trial_seed);
    Rng rng(trial_seed ^ 0x9e3779b97f4a7c15ull);
    Matrix train_raw = toy.sample(protocol.n, rng);
    const Matrix test_raw = toy.sample(test_n, rng);
    // Outliers corrupt the raw samples; standardization sees them.
    if (protocol.noise_fraction > 0.0) {
      train_raw = corrupt_noise(train_raw, protocol.noise_fraction, protocol.noise_sigma,
                                trial_seed ^ 0xc2b2ae3d27d4eb4full);
    }
    const FeatureScaler scaler = fit_standardizer(train_raw);
    const Matrix train = scaler.apply(train_raw);
    const Matrix test = scaler.apply(test_raw);

    for (const std::string& method : protocol.methods) {
      QapcaConfig config = protocol.solver;
      config.seed = trial_seed;
      const FitOutcome fit = fit_method(method, train, config, protocol.l1bf);
      slots[static_cast<std::size_t>(t)].push_back(
          {t, trial_seed, method, protocol.n, protocol.d, config.k, config.epsilon,
           solver_name(config.solver), fit.rank, reconstruction_error(train, fit.basis),
           reconstruction_error(test, fit.basis),
           opt_int(fit.has_diagnostics, fit.diagnostics.kappa),
           opt_int(fit.has_diagnostics, fit.diagnostics.couplers),
           opt_double(fit.has_diagnostics, fit.diagnostics.best_energy), fit.seconds});
    }
  });

  Summarizer summary(protocol.methods, {"recon_train", "recon_test", "rank", "seconds"});
  for (auto& trial_rows : slots) {
    for (auto& row : trial_rows) {
      summary.add(row[2].get<std::string>(), "recon_train", row[9].get<double>());
      summary.add(row[2].get<std::string>(), "recon_test", row[10].get<double>());
      summary.add(row[2].get<std::string>(), "rank", row[8].get<double>());
      summary.add(row[2].get<std::string>(), "seconds", row[14].get<double>());
      trials.add_row(std::move(row));
    }
  }
  return ExperimentOutput{std::move(trials), summary.table()};
}

ExperimentOutput run_mislabel(const MislabelProtocol& protocol) {
  if (protocol.trials < 1) throw std::invalid_argument("run_mislabel: trials must be positive");
  if (protocol.data.train_labels.size() != static_cast<std::size_t>(protocol.data.train.cols())) {
    throw std::invalid_argument("run_mislabel: dataset must be labeled");
  }

  // Median-center and quartile-scale the whole pool once.
  LabeledDataset pool = protocol.data;
  pool.train = robust_scale(pool.train);

  std::vector<int> target_cols;
  std::vector<int> other_cols;
  for (int c = 0; c < pool.train.cols(); ++c) {
    if (pool.train_labels[static_cast<std::size_t>(c)] == protocol.target_label) {
      target_cols.push_back(c);
    } else {
      other_cols.push_back(c);
    }
  }
  if (target_cols.empty()) {
    throw std::invalid_argument("run_mislabel: target label '" + protocol.target_label +
                                "' not present");
  }
  int n_train = protocol.n_train > 0 ? protocol.n_train
                                     : std::max(4, static_cast<int>(target_cols.size() * 3 / 4));
  if (n_train > static_cast<int>(target_cols.size())) {
    throw std::invalid_argument("run_mislabel: n_train exceeds the target-class pool");
  }

  Table trials;
  trials.columns = {"trial", "seed", "method", "n", "d", "k", "epsilon",
                    "rank",  "recon_train", "recon_test", "seconds"};
  std::vector<std::vector<std::vector<nlohmann::json>>> slots(
      static_cast<std::size_t>(protocol.trials));

  parallel_trials(protocol.trials, protocol.jobs, [&](int t) {
    const std::uint64_t trial_seed = protocol.seed + static_cast<std::uint64_t>(t);
    Rng rng(trial_seed);
    const auto chosen = rng.sample_without_replacement(static_cast<int>(target_cols.size()), n_train);
    std::vector<bool> in_train(target_cols.size(), false);
    for (const int i : chosen) in_train[static_cast<std::size_t>(i)] = true;

    LabeledDataset split;
    split.train = Matrix(pool.train.rows(), n_train + static_cast<int>(other_cols.size()));
    split.train_labels.clear();
    int col = 0;
    for (const int i : chosen) {
      split.train.col(col++) = pool.train.col(target_cols[static_cast<std::size_t>(i)]);
      split.train_labels.push_back(protocol.target_label);
    }
    for (const int c : other_cols) {
      split.train.col(col++) = pool.train.col(c);
      split.train_labels.push_back(pool.train_labels[static_cast<std::size_t>(c)]);
    }
    std::vector<int> holdout;
    for (std::size_t i = 0; i < target_cols.size(); ++i) {
      if (!in_train[i]) holdout.push_back(target_cols[i]);
    }
    Matrix test(pool.train.rows(), static_cast<int>(holdout.size()));
    for (std::size_t i = 0; i < holdout.size(); ++i) {
      test.col(static_cast<int>(i)) = pool.train.col(holdout[i]);
    }

    const LabeledDataset corrupted =
        corrupt_mislabel(split, protocol.fraction, trial_seed ^ 0xc2b2ae3d27d4eb4full,
                         protocol.target_label);

    for (const std::string& method : protocol.methods) {
      QapcaConfig config = protocol.solver;
      config.seed = trial_seed;
      const FitOutcome fit = fit_method(method, corrupted.train, config, protocol.l1bf);
      slots[static_cast<std::size_t>(t)].push_back(
          {t, trial_seed, method, n_train, static_cast<int>(pool.train.rows()), config.k,
           config.epsilon, fit.rank, reconstruction_error(corrupted.train, fit.basis),
           test.cols() > 0 ? nlohmann::json(reconstruction_error(test, fit.basis))
                           : nlohmann::json(),
           fit.seconds});
    }
  });

  Summarizer summary(protocol.methods, {"recon_train", "recon_test", "rank", "seconds"});
  for (auto& trial_rows : slots) {
    for (auto& row : trial_rows) {
      summary.add(row[2].get<std::string>(), "recon_train", row[8].get<double>());
      if (!row[9].is_null()) summary.add(row[2].get<std::string>(), "recon_test", row[9].get<double>());
      summary.add(row[2].get<std::string>(), "rank", row[7].get<double>());
      summary.add(row[2].get<std::string>(), "seconds", row[10].get<double>());
      trials.add_row(std::move(row));
    }
  }
  return ExperimentOutput{std::move(trials), summary.table()};
}

ExperimentOutput run_fault_detection(const FaultDetectionProtocol& protocol) {
  if (protocol.trials < 1) {
    throw std::invalid_argument("run_fault_detection: trials must be positive");
  }
  if (protocol.test_faulty.empty()) {
    throw std::invalid_argument("run_fault_detection: need at least one faulty test run");
  }
  const Matrix train_all = protocol.n_train > 0 && protocol.n_train < protocol.train.cols()
                               ? Matrix(protocol.train.leftCols(protocol.n_train))
                               : protocol.train;
  const std::vector<double> grid = detection_threshold_grid();

  Table trials;
  trials.columns = {"trial", "seed", "method", "n", "d", "k", "auroc", "auprc", "seconds"};
  std::vector<std::vector<std::vector<nlohmann::json>>> slots(
      static_cast<std::size_t>(protocol.trials));

  parallel_trials(protocol.trials, protocol.jobs, [&](int t) {
    const std::uint64_t trial_seed = protocol.seed + static_cast<std::uint64_t>(t);
    const Matrix train_noisy = corrupt_noise(train_all, protocol.noise_fraction,
                                             protocol.noise_sigma, trial_seed);
    const FeatureScaler scaler = fit_standardizer(train_noisy);
    const Matrix train = scaler.apply(train_noisy);

    for (const std::string& method : protocol.methods) {
      QapcaConfig config = protocol.solver;
      config.seed = trial_seed;
      const FitOutcome fit = fit_method(method, train, config, protocol.l1bf);

      std::vector<double> scores;
      std::vector<bool> faulty;
      auto score_block = [&](const Matrix& block, auto is_faulty) {
        const Matrix scaled = scaler.apply(block);
        for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
          scores.push_back(spe(scaled.col(c), fit.basis));
          faulty.push_back(is_faulty(static_cast<int>(c)));
        }
      };
      score_block(protocol.test_faultless, [](int) { return false; });
      for (const Matrix& run : protocol.test_faulty) {
        score_block(run, [&](int c) { return c >= protocol.fault_onset; });
      }
      const RocPrcResult curves = roc_prc(scores, faulty, grid);
      slots[static_cast<std::size_t>(t)].push_back(
          {t, trial_seed, method, static_cast<int>(train.cols()),
           static_cast<int>(train.rows()), config.k, curves.auroc, curves.auprc, fit.seconds});
    }
  });

  Summarizer summary(protocol.methods, {"auroc", "auprc", "seconds"});
  for (auto& trial_rows : slots) {
    for (auto& row : trial_rows) {
      summary.add(row[2].get<std::string>(), "auroc", row[6].get<double>());
      summary.add(row[2].get<std::string>(), "auprc", row[7].get<double>());
      summary.add(row[2].get<std::string>(), "seconds", row[8].get<double>());
      trials.add_row(std::move(row));
    }
  }
  return ExperimentOutput{std::move(trials), summary.table()};
}

}  // namespace qapca

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qapca/baselines.hpp"
#include "qapca/core.hpp"
#include "qapca/eval.hpp"
#include "qapca/table.hpp"

namespace qapca {

inline const std::vector<std::string> kDefaultMethods = {"qapca", "qapca-r", "l1-bf", "svd"};

struct ExperimentOutput {
  Table trials;
  Table summary;
};

/// One subspace fit of a named method ("qapca", "qapca-r", "l1-bf", "svd").
/// The basis spans the achieved subspace even when the sign assignment is
/// rank deficient; `rank` reports how many unique components it carries.
struct FitOutcome {
  Matrix basis;
  int rank = 0;
  double seconds = 0.0;
  SolveDiagnostics diagnostics;
  bool has_diagnostics = false;
};

FitOutcome fit_method(const std::string& method, const Matrix& train, const QapcaConfig& config,
                      const L1bfConfig& l1bf_config);

/// Synthetic mixture study: per trial, draw train/test realizations of the
/// three-Gaussian toy, optionally contaminate the training samples with
/// large Gaussian noise, fit every method, and report reconstruction
/// errors on the (corrupted) train data and on clean held-out data.
struct GaussianProtocol {
  int d = 50;
  int n = 20;
  int test_n = 0;  // 0 = same as n
  int trials = 100;
  double noise_fraction = 0.0;
  double noise_sigma = 100.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::vector<std::string> methods = kDefaultMethods;
  QapcaConfig solver;  // k, epsilon, solver kind, reads, budget
  L1bfConfig l1bf;
};

ExperimentOutput run_gaussian(const GaussianProtocol& protocol);

/// Mislabeled-training study over a two-class dataset: per trial, draw a
/// training pool from the target class, replace a fraction with samples
/// from the other class, fit, and report reconstruction errors on the
/// contaminated train set and on clean held-out target samples.
struct MislabelProtocol {
  LabeledDataset data;  // labeled pool in `train`; robust-scaled by run_mislabel
  std::string target_label;
  int n_train = 0;  // 0 = 75% of the target pool
  int trials = 100;
  double fraction = 0.2;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::vector<std::string> methods = kDefaultMethods;
  QapcaConfig solver;
  L1bfConfig l1bf;
};

ExperimentOutput run_mislabel(const MislabelProtocol& protocol);

/// Fault-detection study: per trial, contaminate the training data with
/// large Gaussian noise, fit, score every test sample by its squared
/// prediction error, and sweep the detection-limit grid into ROC / PRC
/// areas. Faulty runs count as faultless up to `fault_onset` samples.
struct FaultDetectionProtocol {
  Matrix train;
  Matrix test_faultless;
  std::vector<Matrix> test_faulty;
  int fault_onset = 160;
  int n_train = 0;  // 0 = all training samples
  int trials = 50;
  double noise_fraction = 0.2;
  double noise_sigma = 100.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::vector<std::string> methods = kDefaultMethods;
  QapcaConfig solver;
  L1bfConfig l1bf;
};

ExperimentOutput run_fault_detection(const FaultDetectionProtocol& protocol);

/// Runs fn(trial) for trial in [0, trials) on `jobs` workers; results land
/// in trial order, so the output is independent of the worker count.
void parallel_trials(int trials, int jobs, const std::function<void(int)>& fn);

/// Mean and standard error of the mean.
std::pair<double, double> mean_sem(const std::vector<double>& values);

}  // namespace qapca

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qapca/ising.hpp"

namespace qapca {

/// Connection-level failure talking to a remote solver.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Response parsed but does not match the wire protocol.
struct MalformedResponseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Response is well-formed but a reported energy disagrees with the local
/// recomputation by more than 1e-6.
struct EnergyMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solves via a remote annealer-style service.
///
/// POST {base_url}/v1/ising/solve with
///   {"size": M, "couplings": [[i, j, w], ...], "num_reads": r, "seed": s}
/// and expects
///   {"samples": [[±1, ...], ...], "energies": [...], "occurrences": [...]}
/// with aligned arrays. Every reported energy is recomputed locally before
/// the set is accepted.
SampleSet solve_remote(const IsingProblem& problem, const std::string& base_url, int reads,
                       std::optional<std::uint64_t> seed = std::nullopt);

/// JSON body for the solve request (exposed for the mock server and tests).
std::string make_solve_request(const IsingProblem& problem, int reads,
                               std::optional<std::uint64_t> seed);

}  // namespace qapca

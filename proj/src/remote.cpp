#include "qapca/remote.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace qapca {

namespace {

constexpr const char* kSolvePath = "/v1/ising/solve";

}  // namespace

std::string make_solve_request(const IsingProblem& problem, int reads,
                               std::optional<std::uint64_t> seed) {
  nlohmann::json body;
  body["size"] = problem.size();
  nlohmann::json couplings = nlohmann::json::array();
  for (const Coupling& c : problem.couplings()) {
    couplings.push_back(nlohmann::json::array({c.i, c.j, c.weight}));
  }
  body["couplings"] = std::move(couplings);
  body["num_reads"] = reads;
  if (seed) body["seed"] = *seed;
  return body.dump();
}

SampleSet solve_remote(const IsingProblem& problem, const std::string& base_url, int reads,
                       std::optional<std::uint64_t> seed) {
  if (reads < 1) throw std::invalid_argument("solve_remote: reads must be positive");
  if (base_url.empty()) throw std::invalid_argument("solve_remote: endpoint URL is empty");

  httplib::Client client(base_url);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(120, 0);

  const auto res = client.Post(kSolvePath, make_solve_request(problem, reads, seed),
                               "application/json");
  if (!res) {
    throw TransportError("solve_remote: request to " + base_url + " failed (" +
                         httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw TransportError("solve_remote: " + base_url + " returned HTTP " +
                         std::to_string(res->status));
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedResponseError(std::string("solve_remote: response is not JSON: ") + e.what());
  }

  if (!doc.is_object() || !doc.contains("samples") || !doc.contains("energies") ||
      !doc.contains("occurrences")) {
    throw MalformedResponseError("solve_remote: response missing samples/energies/occurrences");
  }
  const auto& samples = doc["samples"];
  const auto& energies = doc["energies"];
  const auto& occurrences = doc["occurrences"];
  if (!samples.is_array() || !energies.is_array() || !occurrences.is_array() ||
      samples.size() != energies.size() || samples.size() != occurrences.size() ||
      samples.empty()) {
    throw MalformedResponseError("solve_remote: response arrays are empty or misaligned");
  }

  std::vector<SpinVector> spin_vectors;
  std::vector<int> counts;
  spin_vectors.reserve(samples.size());
  counts.reserve(samples.size());
  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    const auto& row = samples[idx];
    if (!row.is_array() || static_cast<int>(row.size()) != problem.size()) {
      throw MalformedResponseError("solve_remote: sample " + std::to_string(idx) +
                                   " has wrong length");
    }
    SpinVector spins(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].is_number_integer()) {
        throw MalformedResponseError("solve_remote: sample entries must be integers");
      }
      const int v = row[i].get<int>();
      if (v != 1 && v != -1) {
        throw MalformedResponseError("solve_remote: sample entries must be +1 or -1");
      }
      spins[i] = static_cast<std::int8_t>(v);
    }
    if (!energies[idx].is_number()) {
      throw MalformedResponseError("solve_remote: energies must be numbers");
    }
    if (!occurrences[idx].is_number_integer() || occurrences[idx].get<int>() < 1) {
      throw MalformedResponseError("solve_remote: occurrences must be positive integers");
    }
    const double reported = energies[idx].get<double>();
    const double local = problem.energy(spins);
    if (std::abs(reported - local) > 1e-6) {
      throw EnergyMismatchError("solve_remote: sample " + std::to_string(idx) +
                                " energy " + std::to_string(reported) +
                                " disagrees with local value " + std::to_string(local));
    }
    spin_vectors.push_back(std::move(spins));
    counts.push_back(occurrences[idx].get<int>());
  }

  // Local energies and ordering are authoritative from here on.
  return make_sample_set(problem, std::move(spin_vectors), std::move(counts));
}

}  // namespace qapca

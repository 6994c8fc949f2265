#include "qapca/mock_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "qapca/ising.hpp"

namespace qapca {

std::pair<int, std::string> handle_solve_request(const std::string& body, int exhaustive_cap) {
  nlohmann::json request;
  try {
    request = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    return {400, R"({"error":"request is not valid JSON"})"};
  }
  try {
    if (!request.contains("size") || !request.contains("couplings")) {
      return {400, R"({"error":"request needs size and couplings"})"};
    }
    const int size = request["size"].get<int>();
    std::vector<Coupling> couplings;
    for (const auto& entry : request["couplings"]) {
      if (!entry.is_array() || entry.size() != 3) {
        return {400, R"({"error":"couplings must be [i, j, w] triples"})"};
      }
      couplings.push_back(Coupling{entry[0].get<int>(), entry[1].get<int>(),
                                   entry[2].get<double>()});
    }
    const IsingProblem problem(size, std::move(couplings));
    const int reads = request.value("num_reads", 10);
    const std::uint64_t seed = request.value("seed", std::uint64_t{12345});

    SampleSet solved;
    if (size <= exhaustive_cap) {
      solved = solve_exhaustive(problem, exhaustive_cap);
    } else {
      AnnealSchedule schedule;
      schedule.reads = std::max(reads, 1);
      schedule.seed = seed;
      solved = solve_sa(problem, schedule);
    }

    nlohmann::json response;
    auto& samples = response["samples"] = nlohmann::json::array();
    auto& energies = response["energies"] = nlohmann::json::array();
    auto& occurrences = response["occurrences"] = nlohmann::json::array();
    for (std::size_t i = 0; i < solved.size(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (const std::int8_t s : solved.samples[i]) row.push_back(static_cast<int>(s));
      samples.push_back(std::move(row));
      energies.push_back(solved.energies[i]);
      occurrences.push_back(solved.occurrences[i]);
    }
    return {200, response.dump()};
  } catch (const std::exception& e) {
    return {400, nlohmann::json{{"error", e.what()}}.dump()};
  }
}

MockServer::MockServer(int exhaustive_cap) : exhaustive_cap_(exhaustive_cap) {}

MockServer::~MockServer() { stop(); }

int MockServer::start(const std::string& host, int port) {
  host_ = host;
  server_ = std::make_unique<httplib::Server>();

  server_->Post("/v1/ising/solve", [cap = exhaustive_cap_](const httplib::Request& req,
                                                           httplib::Response& res) {
    auto [status, body] = handle_solve_request(req.body, cap);
    res.status = status;
    res.set_content(body, "application/json");
  });
  server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  auto* srv = server_.get();
  server_->Post("/shutdown", [srv](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"stopping"})", "application/json");
    srv->stop();
  });

  if (port == 0) {
    port_ = server_->bind_to_any_port(host.c_str());
    if (port_ <= 0) throw std::runtime_error("MockServer: could not bind a port");
  } else {
    if (!server_->bind_to_port(host.c_str(), port)) {
      throw std::runtime_error("MockServer: could not bind port " + std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

void MockServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string MockServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace qapca

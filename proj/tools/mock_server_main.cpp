#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qapca/mock_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock annealer service speaking the /v1/ising/solve protocol"};
  int port = 0;
  int cap = 20;
  std::string host = "127.0.0.1";
  app.add_option("--port", port, "port to bind (0 = pick a free one)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--host", host, "address to bind");
  app.add_option("--cap", cap, "largest problem solved exactly")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    qapca::MockServer server(cap);
    const int bound = server.start(host, port);
    std::cout << "PORT=" << bound << std::endl;  // flushed so clients can scrape it
    std::cout << "serving " << server.base_url() << "/v1/ising/solve (POST /shutdown to stop)"
              << std::endl;
    // start() runs the listener on a background thread; block until it ends.
    signal(SIGPIPE, SIG_IGN);
    server.wait();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

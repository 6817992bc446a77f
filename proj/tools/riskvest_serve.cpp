#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "riskvest/parallel.hpp"
#include "riskvest/service.hpp"

namespace {
riskvest::service::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  std::string addr = "127.0.0.1:8080";
  std::string cors;
  int threads = 0;
  CLI::App app{"HTTP service for what-if investment queries", "riskvest-serve"};
  app.add_option("--addr", addr, "Listen address host:port")->capture_default_str();
  app.add_option("--cors-origin", cors, "Allowed CORS origin for the web UI");
  app.add_option("--threads", threads, "Worker threads per sweep (0: RISKVEST_THREADS or machine parallelism)")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "error: --addr must be host:port\n";
    return 1;
  }
  const std::string host = addr.substr(0, colon);
  const int port = std::stoi(addr.substr(colon + 1));

  riskvest::service::Server server({threads > 0 ? threads : riskvest::default_threads(), cors});
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << addr << "\n";
    return 2;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << host << ":" << bound << "\n";
  server.run();
  return 0;
}

#pragma once

// HTTP facade over the engine. State is in memory only: uploaded cases and
// job records are lost on restart.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "riskvest/io.hpp"

namespace httplib {
class Server;
}

namespace riskvest::service {

/// Storage boundary for uploaded cases; a file-backed store can replace the
/// in-memory one without touching the handlers.
class CaseStore {
 public:
  virtual ~CaseStore() = default;
  virtual std::string put(const ValidatedCase& validated) = 0;
  virtual std::optional<ValidatedCase> get(const std::string& id) const = 0;
};

class InMemoryCaseStore final : public CaseStore {
 public:
  std::string put(const ValidatedCase& validated) override;
  std::optional<ValidatedCase> get(const std::string& id) const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, ValidatedCase> cases_;
  std::uint64_t next_ = 1;
};

enum class JobStatus { Pending, Running, Done, Failed };
const char* to_string(JobStatus status);

struct JobRecord {
  std::string id;
  std::string kind = "sweep";
  JobStatus status = JobStatus::Pending;
  io::json request;
  io::json result;
  std::string error;
  std::chrono::system_clock::time_point created;
  std::chrono::system_clock::time_point updated;
};

struct ServiceOptions {
  int threads = 1;
  std::string corsOrigin;  // empty: no CORS headers
};

class Server {
 public:
  explicit Server(ServiceOptions options = {}, std::unique_ptr<CaseStore> store = nullptr);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to host:port (port 0 picks a free port) and returns the bound
  /// port, or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void run();
  void stop();

  std::optional<JobRecord> job(const std::string& id) const;

 private:
  void routes();
  std::string start_sweep(const std::string& caseId, const ValidatedCase& validated, io::json request);
  void update(const std::string& id, JobStatus status, io::json result = {}, std::string error = {});

  ServiceOptions options_;
  std::unique_ptr<CaseStore> store_;
  std::unique_ptr<httplib::Server> http_;

  mutable std::mutex jobsMutex_;
  std::map<std::string, JobRecord> jobs_;
  std::uint64_t nextJob_ = 1;
  std::vector<std::jthread> workers_;
};

}  // namespace riskvest::service

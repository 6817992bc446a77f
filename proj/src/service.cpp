#include "riskvest/service.hpp"

#include "httplib.h"

namespace riskvest::service {

using io::json;

std::string InMemoryCaseStore::put(const ValidatedCase& validated) {
  std::lock_guard lock(mutex_);
  std::string id = "case-" + std::to_string(next_++);
  cases_.emplace(id, validated);
  return id;
}

std::optional<ValidatedCase> InMemoryCaseStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = cases_.find(id);
  if (it == cases_.end()) return std::nullopt;
  return it->second;
}

const char* to_string(JobStatus status) {
  switch (status) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
  }
  return "?";
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, json{{"error", message}});
}

json issues_json(const ValidationError& e) {
  json list = json::array();
  for (const auto& issue : e.issues())
    list.push_back({{"code", to_string(issue.code)}, {"where", issue.where}, {"message", issue.message}});
  return list;
}

// Body must be a JSON object; reports 400 otherwise.
std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) {
    error(res, 400, "empty request body");
    return std::nullopt;
  }
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) {
      error(res, 400, "request body must be a JSON object");
      return std::nullopt;
    }
    return body;
  } catch (const json::parse_error& e) {
    error(res, 400, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

double number_or(const json& body, const char* key, double fallback) {
  if (!body.contains(key)) return fallback;
  if (!body.at(key).is_number()) throw Error(ErrorCode::InvalidValue, std::string(key) + " must be a number");
  return body.at(key).get<double>();
}

std::vector<double> numbers_or(const json& body, const char* key, std::vector<double> fallback) {
  if (!body.contains(key)) return fallback;
  const auto& v = body.at(key);
  if (!v.is_array() || v.empty()) throw Error(ErrorCode::InvalidValue, std::string(key) + " must be a non-empty array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::InvalidValue, std::string(key) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::uint64_t seed_of(const json& body) {
  if (!body.contains("seed")) return 0;
  const auto& v = body.at("seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw Error(ErrorCode::InvalidValue, "seed must be a non-negative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

Server::Server(ServiceOptions options, std::unique_ptr<CaseStore> store)
    : options_(std::move(options)),
      store_(store ? std::move(store) : std::make_unique<InMemoryCaseStore>()),
      http_(std::make_unique<httplib::Server>()) {
  routes();
}

Server::~Server() {
  stop();
  std::vector<std::jthread> workers;
  {
    std::lock_guard lock(jobsMutex_);
    workers.swap(workers_);
  }
  workers.clear();
}

int Server::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  return http_->bind_to_port(host, port) ? port : -1;
}

void Server::run() { http_->listen_after_bind(); }

void Server::stop() { http_->stop(); }

std::optional<JobRecord> Server::job(const std::string& id) const {
  std::lock_guard lock(jobsMutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

void Server::update(const std::string& id, JobStatus status, json result, std::string message) {
  std::lock_guard lock(jobsMutex_);
  auto& record = jobs_.at(id);
  record.status = status;
  record.result = std::move(result);
  record.error = std::move(message);
  record.updated = std::chrono::system_clock::now();
}

std::string Server::start_sweep(const std::string& caseId, const ValidatedCase& validated, json request) {
  const auto budgets = numbers_or(request, "budgets", {5, 10, 15, 20, 25});
  const auto levels = numbers_or(request, "uncertainties", {0, 0.05, 0.10, 0.15, 0.20, 0.25});
  const double trials = number_or(request, "trials", 100);
  const std::uint64_t seed = seed_of(request);
  SweepOptions sweepOptions;
  sweepOptions.engine.solver.bins = static_cast<int>(number_or(request, "bins", kDefaultBins));
  sweepOptions.engine.solver.kappa = number_or(request, "kappa", 1.0);
  sweepOptions.threads = options_.threads;
  if (trials < 1 || trials != static_cast<int>(trials)) throw Error(ErrorCode::InvalidValue, "trials must be an integer >= 1");
  if (sweepOptions.engine.solver.bins < 1) throw Error(ErrorCode::InvalidValue, "bins must be >= 1");
  for (double b : budgets)
    if (!(b >= 0.0)) throw Error(ErrorCode::InvalidValue, "budgets must be >= 0");
  for (double u : levels)
    if (!(u >= 0.0)) throw Error(ErrorCode::InvalidValue, "uncertainties must be >= 0");

  std::lock_guard lock(jobsMutex_);
  const std::string id = "job-" + std::to_string(nextJob_++);
  JobRecord record;
  record.id = id;
  record.request = std::move(request);
  record.request["caseId"] = caseId;
  record.created = record.updated = std::chrono::system_clock::now();
  jobs_.emplace(id, std::move(record));

  workers_.emplace_back([this, id, validated, budgets, levels, trials, seed, sweepOptions] {
    update(id, JobStatus::Running);
    try {
      const auto result = sweep(validated, budgets, levels, static_cast<int>(trials), seed, sweepOptions);
      update(id, JobStatus::Done, io::sweep_to_json(result));
    } catch (const std::exception& e) {
      update(id, JobStatus::Failed, {}, e.what());
    }
  });
  return id;
}

void Server::routes() {
  if (!options_.corsOrigin.empty()) {
    http_->set_default_headers({{"Access-Control-Allow-Origin", options_.corsOrigin},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    http_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }

  http_->Post("/api/cases", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    try {
      const auto validated = validate_case(io::case_from_json(*body));
      const std::string id = store_->put(validated);
      reply(res, 201,
            json{{"caseId", id},
                 {"controls", validated.control_count()},
                 {"targets", validated.target_count()},
                 {"sigma", validated.study().sigma},
                 {"warnings", validated.warnings()}});
    } catch (const ValidationError& e) {
      reply(res, 422, json{{"error", "validation failed"}, {"errors", issues_json(e)}});
    } catch (const Error& e) {
      reply(res, 422,
            json{{"error", "schema check failed"},
                 {"errors", json::array({{{"code", to_string(e.code())}, {"where", ""}, {"message", e.what()}}})}});
    }
  });

  http_->Post("/api/solve", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    if (!body->contains("caseId") || !body->at("caseId").is_string()) return error(res, 422, "caseId is required");
    const auto validated = store_->get(body->at("caseId").get<std::string>());
    if (!validated) return error(res, 404, "unknown case");
    try {
      io::SolveRequest request;
      request.budget = number_or(*body, "budget", 0.0);
      request.uncertainty = number_or(*body, "uncertainty", 0.0);
      request.seed = seed_of(*body);
      request.bins = static_cast<int>(number_or(*body, "bins", kDefaultBins));
      request.kappa = number_or(*body, "kappa", 1.0);
      if (!(request.budget >= 0.0)) return error(res, 422, "budget must be >= 0");
      if (!(request.uncertainty >= 0.0)) return error(res, 422, "uncertainty must be >= 0");
      if (request.bins < 1) return error(res, 422, "bins must be >= 1");
      reply(res, 200, io::solve_payload(*validated, request, options_.threads));
    } catch (const Error& e) {
      error(res, 422, e.what());
    }
  });

  http_->Post("/api/sweeps", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    if (!body->contains("caseId") || !body->at("caseId").is_string()) return error(res, 422, "caseId is required");
    const std::string caseId = body->at("caseId").get<std::string>();
    const auto validated = store_->get(caseId);
    if (!validated) return error(res, 404, "unknown case");
    try {
      const std::string id = start_sweep(caseId, *validated, *body);
      reply(res, 202, json{{"jobId", id}, {"status", "pending"}});
    } catch (const Error& e) {
      error(res, 422, e.what());
    }
  });

  http_->Get(R"(/api/sweeps/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto record = job(req.matches[1]);
    if (!record) return error(res, 404, "unknown job");
    json body{{"jobId", record->id}, {"kind", record->kind}, {"status", to_string(record->status)},
              {"request", record->request}};
    if (record->status == JobStatus::Done) body["result"] = record->result;
    if (record->status == JobStatus::Failed) body["error"] = record->error;
    reply(res, 200, body);
  });
}

}  // namespace riskvest::service

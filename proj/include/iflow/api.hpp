#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "iflow/errors.hpp"
#include "iflow/ingest.hpp"

namespace iflow::api {

enum class ErrorCode { BadRequest, NotFound, Unprocessable, Internal };

const char* to_string(ErrorCode code) noexcept;
int http_status(ErrorCode code) noexcept;
ErrorCode code_for(ErrorKind kind) noexcept;

struct Response {
  int status = 200;
  nlohmann::json body;
};

using Params = std::multimap<std::string, std::string>;

// Transport-independent request router. Every endpoint except POST /runs
// is read-only; loaded runs are cached as immutable shared snapshots.
//
//   POST /runs                      body: run document
//   GET  /runs                      run listing
//   GET  /runs/{id}                 run metadata
//   GET  /runs/{id}/flow            ?classes=&from=&to=&filter=
//   GET  /runs/{id}/flow/band       ?epoch=&fromBin=&toBin=&classes=&from=&to=&filter=
//   GET  /runs/{id}/glyphs          ?rankBy=&classes=&from=&to=&filter=
//   GET  /runs/{id}/traces          ?ids=&classes=&from=&to=
//   POST /runs/{id}/table           body: table spec
//   GET  /runs/{id}/confusion       ?from=&to=
//   GET  /runs/{id}/metrics         ?from=&to=
class Service {
 public:
  explicit Service(std::shared_ptr<RunStore> store) : store_(std::move(store)) {}

  Response handle(const std::string& method, const std::string& path, const Params& params,
                  const std::string& body);

  std::shared_ptr<const TrainingRun> run(const std::string& run_id);

 private:
  Response route(const std::string& method, const std::string& path, const Params& params,
                 const std::string& body);

  std::shared_ptr<RunStore> store_;
  std::mutex cache_mutex_;
  std::unordered_map<std::string, std::shared_ptr<const TrainingRun>> cache_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_body_bytes = 256u << 20;
};

// HTTP transport for Service. Port 0 binds any free port.
class HttpServer {
 public:
  HttpServer(Service& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port, or -1 on failure.
  int bind();
  // Blocks until stop() is called.
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace iflow::api

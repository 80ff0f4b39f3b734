#include <httplib.h>

#include "iflow/api.hpp"

namespace iflow::api {

struct HttpServer::Impl {
  Service& service;
  ServerOptions options;
  httplib::Server server;

  Impl(Service& s, ServerOptions o) : service(s), options(std::move(o)) {}

  void dispatch(const httplib::Request& req, httplib::Response& res) {
    Params params(req.params.begin(), req.params.end());
    auto out = service.handle(req.method, req.path, params, req.body);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  }
};

HttpServer::HttpServer(Service& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto& srv = impl_->server;
  srv.set_payload_max_length(impl_->options.max_body_bytes);
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    impl_->dispatch(req, res);
  };
  srv.Get(R"(/.*)", handler);
  srv.Post(R"(/.*)", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) return impl_->server.bind_to_any_port(o.host);
  return impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace iflow::api

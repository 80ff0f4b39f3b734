#include "iflow/api.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "iflow/codec.hpp"
#include "iflow/flow.hpp"
#include "iflow/metrics.hpp"
#include "iflow/table.hpp"

namespace iflow::api {

using json = nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss(path);
  std::string seg;
  while (std::getline(ss, seg, '/')) {
    if (!seg.empty()) out.push_back(seg);
  }
  return out;
}

std::optional<std::string> param(const Params& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

std::optional<long long> int_param(const Params& params, const std::string& key) {
  auto v = param(params, key);
  if (!v || v->empty()) return std::nullopt;
  long long out = 0;
  const auto* end = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument("parameter '" + key + "' must be an integer", key);
  }
  return out;
}

std::string required(const Params& params, const std::string& key) {
  auto v = param(params, key);
  if (!v || v->empty()) throw InvalidArgument("missing parameter '" + key + "'", key);
  return *v;
}

InstanceFilter filter_param(const Params& params) {
  auto v = param(params, "filter");
  if (!v) return std::nullopt;
  return codec::split_list(*v);
}

struct Frame {
  ClassSelection sel;
  EpochRange range;
};

Frame frame_params(const TrainingRun& run, const Params& params) {
  return Frame{codec::decode_selection(run, codec::split_list(param(params, "classes").value_or(""))),
               codec::decode_range(run, int_param(params, "from"), int_param(params, "to"))};
}

json summary_json(const RunSummary& s) {
  return json{{"run_id", s.run_id},
              {"metadata", s.metadata},
              {"m", s.instances},
              {"n", s.classes},
              {"E", s.epochs}};
}

json error_body(ErrorCode code, const std::string& message, const std::string& detail) {
  return json{{"error", {{"code", to_string(code)}, {"message", message}, {"detail", detail}}}};
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Unprocessable: return "unprocessable";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadRequest: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Unprocessable: return 422;
    case ErrorCode::Internal: return 500;
  }
  return 500;
}

ErrorCode code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::Schema:
    case ErrorKind::InvalidRegex: return ErrorCode::Unprocessable;
    case ErrorKind::NotFound:
    case ErrorKind::UnknownInstance: return ErrorCode::NotFound;
    case ErrorKind::InvalidTransition:
    case ErrorKind::InvalidWeights:
    case ErrorKind::UnknownAttribute:
    case ErrorKind::InvalidArgument: return ErrorCode::BadRequest;
    case ErrorKind::Storage: return ErrorCode::Internal;
  }
  return ErrorCode::Internal;
}

std::shared_ptr<const TrainingRun> Service::run(const std::string& run_id) {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(run_id); it != cache_.end()) return it->second;
  }
  // Loading happens outside the lock; two racing loads produce equal runs.
  auto loaded = std::make_shared<const TrainingRun>(store_->load_run(run_id));
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(run_id, std::move(loaded)).first->second;
}

Response Service::handle(const std::string& method, const std::string& path, const Params& params,
                         const std::string& body) {
  try {
    return route(method, path, params, body);
  } catch (const Error& e) {
    const auto code = code_for(e.kind());
    return Response{http_status(code), error_body(code, e.what(), e.detail())};
  } catch (const std::exception& e) {
    return Response{500, error_body(ErrorCode::Internal, e.what(), "")};
  }
}

Response Service::route(const std::string& method, const std::string& path, const Params& params,
                        const std::string& body) {
  const auto seg = split_path(path);
  if (seg.empty() || seg[0] != "runs") throw NotFound("no such endpoint", path);

  if (seg.size() == 1) {
    if (method == "POST") {
      const auto doc = parse_run_document(body);
      const auto id = store_->store_run(doc);
      const auto s = store_->summary(id);
      return Response{201, {{"run_id", id}, {"m", s.instances}, {"n", s.classes}, {"E", s.epochs}}};
    }
    if (method == "GET") {
      json runs = json::array();
      for (const auto& s : store_->list_runs()) runs.push_back(summary_json(s));
      return Response{200, {{"runs", std::move(runs)}}};
    }
    throw InvalidArgument("method not allowed", path);
  }

  const auto& run_id = seg[1];
  const auto snapshot = run(run_id);
  const auto& r = *snapshot;
  const std::string endpoint = seg.size() >= 3 ? seg[2] : "";
  const std::string sub = seg.size() >= 4 ? seg[3] : "";
  if (seg.size() > 4) throw NotFound("no such endpoint", path);

  if (method == "POST") {
    if (endpoint != "table" || !sub.empty()) throw InvalidArgument("method not allowed", path);
    json spec_json;
    try {
      spec_json = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), "body");
    }
    const auto spec = codec::decode_table_spec(r, spec_json);
    return Response{200, codec::encode_table_page(r, query_table(r, spec))};
  }
  if (method != "GET") throw InvalidArgument("method not allowed", path);

  if (endpoint.empty()) {
    auto s = store_->summary(run_id);
    auto j = summary_json(s);
    j["classes"] = r.class_labels();
    return Response{200, std::move(j)};
  }
  if (endpoint == "flow" && sub.empty()) {
    const auto f = frame_params(r, params);
    return Response{200, codec::encode_flow(r, compute_flow(r, f.sel, f.range, filter_param(params)))};
  }
  if (endpoint == "flow" && sub == "band") {
    const auto f = frame_params(r, params);
    const auto epoch = int_param(params, "epoch");
    if (!epoch) throw InvalidArgument("missing parameter 'epoch'", "epoch");
    if (*epoch < 1) throw InvalidTransition("epoch must be at least 1", "epoch");
    const auto from = codec::decode_bin(r, required(params, "fromBin"));
    const auto to = codec::decode_bin(r, required(params, "toBin"));
    const auto ids = band_members(r, f.sel, f.range, static_cast<std::size_t>(*epoch - 1), from,
                                  to, filter_param(params));
    return Response{200, {{"ids", ids}, {"count", ids.size()}}};
  }
  if (endpoint == "glyphs" && sub.empty()) {
    const auto f = frame_params(r, params);
    const auto rank_by = codec::decode_measure(param(params, "rankBy").value_or("S"));
    const auto glyphs = glyph_layout(r, f.sel, f.range, rank_by, filter_param(params));
    return Response{200, codec::encode_glyphs(r, f.range, rank_by, glyphs)};
  }
  if (endpoint == "traces" && sub.empty()) {
    const auto f = frame_params(r, params);
    const auto ids = codec::split_list(param(params, "ids").value_or(""));
    return Response{200, codec::encode_traces(r, trace(r, f.sel, f.range, ids))};
  }
  if (endpoint == "confusion" && sub.empty()) {
    const auto range = codec::decode_range(r, int_param(params, "from"), int_param(params, "to"));
    return Response{200, codec::encode_confusion(r, range, confusion_summary(r, range))};
  }
  if (endpoint == "metrics" && sub.empty()) {
    const auto range = codec::decode_range(r, int_param(params, "from"), int_param(params, "to"));
    return Response{200, codec::encode_scores(r, range, score_all(r, range))};
  }
  throw NotFound("no such endpoint", path);
}

}  // namespace iflow::api

// iflow: command-line front end for the instance-flow engine.
//
//   iflow serve [--host H] [--port P] [--store DIR] [--max-body BYTES]
//   iflow ingest <file>
//   iflow metrics <run> [--from N] [--to N]
//   iflow flow <run> [--classes A,B] [--from N] [--to N] [--filter ids]
//   iflow export-confusion <run> [--from N] [--to N] [--format json|csv]
//   iflow fixture <worked|random|cifar> [--seed S] [-o FILE]
//
// <run> is a stored run id or a path to a run file. The store root comes
// from --store or $IFLOW_STORE (default ./runs). Epochs are 1-based.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "iflow/api.hpp"
#include "iflow/codec.hpp"
#include "iflow/fixtures.hpp"
#include "iflow/ingest.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

iflow::api::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw iflow::StorageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

iflow::TrainingRun open_run(const std::string& ref, const std::string& store_root) {
  std::error_code ec;
  if (fs::is_regular_file(ref, ec)) return iflow::load_run_text(read_text(ref));
  return iflow::RunStore(store_root).load_run(ref);
}

struct RangeArgs {
  std::optional<long long> from;
  std::optional<long long> to;
};

void add_range(CLI::App* cmd, RangeArgs& args) {
  cmd->add_option("--from", args.from, "first epoch (1-based, inclusive)");
  cmd->add_option("--to", args.to, "last epoch (1-based, inclusive)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal instance-level analysis of classifier training runs"};
  app.require_subcommand(1);

  std::string store_root = "runs";
  app.add_option("--store", store_root, "run store directory")->envname("IFLOW_STORE");

  iflow::api::ServerOptions server_opts;
  auto* serve = app.add_subcommand("serve", "run the HTTP query service");
  serve->add_option("--host", server_opts.host, "listen address")->envname("IFLOW_HOST");
  serve->add_option("--port", server_opts.port, "listen port")->envname("IFLOW_PORT");
  serve->add_option("--max-body", server_opts.max_body_bytes, "request size limit in bytes")
      ->envname("IFLOW_MAX_BODY");

  std::string ingest_file;
  auto* ingest = app.add_subcommand("ingest", "validate and store a run file");
  ingest->add_option("file", ingest_file, "run file")->required();

  std::string run_ref;
  RangeArgs range_args;
  auto* metrics = app.add_subcommand("metrics", "print S, V, F for every instance");
  metrics->add_option("run", run_ref, "run id or run file")->required();
  add_range(metrics, range_args);

  std::string classes;
  std::string filter;
  auto* flow = app.add_subcommand("flow", "print the flow frame for a class selection");
  flow->add_option("run", run_ref, "run id or run file")->required();
  flow->add_option("--classes", classes, "comma-separated selected classes (default: all)");
  flow->add_option("--filter", filter, "comma-separated instance ids");
  add_range(flow, range_args);

  std::string format = "json";
  auto* confusion = app.add_subcommand("export-confusion", "print the epoch-summed confusion matrix");
  confusion->add_option("run", run_ref, "run id or run file")->required();
  confusion->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  add_range(confusion, range_args);

  std::string fixture_name;
  std::uint64_t seed = 1;
  std::size_t rand_m = 20, rand_n = 4, rand_e = 8;
  std::string out_file;
  auto* fixture = app.add_subcommand("fixture", "write a generated run file");
  fixture->add_option("name", fixture_name, "worked, random or cifar")
      ->required()
      ->check(CLI::IsMember({"worked", "random", "cifar"}));
  fixture->add_option("--seed", seed, "generator seed");
  fixture->add_option("--instances", rand_m, "random: instance count");
  fixture->add_option("--classes", rand_n, "random: class count");
  fixture->add_option("--epochs", rand_e, "random: epoch count");
  fixture->add_option("-o,--output", out_file, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      auto service = iflow::api::Service(std::make_shared<iflow::RunStore>(store_root));
      iflow::api::HttpServer server(service, server_opts);
      const int port = server.bind();
      if (port < 0) {
        std::cerr << "cannot bind " << server_opts.host << ":" << server_opts.port << "\n";
        return 1;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << server_opts.host << ":" << port << " (store "
                << store_root << ")\n";
      server.listen();
      g_server = nullptr;
      return 0;
    }
    if (*ingest) {
      iflow::RunStore store(store_root);
      const auto doc = iflow::parse_run_document(read_text(ingest_file));
      const auto id = store.store_run(doc);
      const auto s = store.summary(id);
      std::cout << json{{"run_id", id}, {"m", s.instances}, {"n", s.classes}, {"E", s.epochs}}.dump()
                << "\n";
      return 0;
    }
    if (*metrics) {
      const auto run = open_run(run_ref, store_root);
      const auto range = iflow::codec::decode_range(run, range_args.from, range_args.to);
      std::cout << iflow::codec::encode_scores(run, range, iflow::score_all(run, range)).dump(1)
                << "\n";
      return 0;
    }
    if (*flow) {
      const auto run = open_run(run_ref, store_root);
      const auto range = iflow::codec::decode_range(run, range_args.from, range_args.to);
      const auto sel = iflow::codec::decode_selection(run, iflow::codec::split_list(classes));
      iflow::InstanceFilter ids;
      if (!filter.empty()) ids = iflow::codec::split_list(filter);
      std::cout << iflow::codec::encode_flow(run, iflow::compute_flow(run, sel, range, ids)).dump(1)
                << "\n";
      return 0;
    }
    if (*confusion) {
      const auto run = open_run(run_ref, store_root);
      const auto range = iflow::codec::decode_range(run, range_args.from, range_args.to);
      const auto cm = iflow::confusion_summary(run, range);
      if (format == "json") {
        std::cout << iflow::codec::encode_confusion(run, range, cm).dump(1) << "\n";
        return 0;
      }
      std::cout << "truth\\predicted";
      for (const auto& l : run.class_labels()) std::cout << ',' << l;
      std::cout << '\n';
      for (std::size_t t = 0; t < cm.classes; ++t) {
        std::cout << run.class_labels()[t];
        for (std::size_t p = 0; p < cm.classes; ++p) std::cout << ',' << cm.at(t, p);
        std::cout << '\n';
      }
      return 0;
    }
    if (*fixture) {
      iflow::RunDocument doc;
      if (fixture_name == "worked") {
        doc = iflow::fixtures::worked_document();
      } else if (fixture_name == "random") {
        doc = iflow::fixtures::random_document(seed, rand_m, rand_n, rand_e);
      } else {
        doc = iflow::fixtures::cifar_scenario(seed).document;
      }
      const auto text = iflow::canonical_json(doc);
      if (out_file.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) throw iflow::StorageError("cannot write " + out_file);
        out << text << "\n";
      }
      return 0;
    }
  } catch (const iflow::Error& e) {
    std::cerr << "error: " << iflow::to_string(e.kind()) << ": " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
    std::cerr << "\n";
    return 2;
  }
  return 0;
}

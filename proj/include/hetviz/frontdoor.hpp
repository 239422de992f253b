#pragma once

// Service layer: view orchestration, in-memory sessions, the HTTP API and
// the command line. CLI and HTTP share every engine call below.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hetviz/formats.hpp"
#include "hetviz/hyperblock.hpp"
#include "hetviz/ingest.hpp"
#include "hetviz/render.hpp"
#include "hetviz/rules.hpp"
#include "hetviz/viewlayout.hpp"

namespace httplib {
class Server;
}

namespace hetviz {

struct ViewBundle {
  std::vector<std::string> order;   // axis names, left to right
  std::vector<AxisLayout> layouts;  // same order
  std::vector<EdgeBundle> edges;    // between neighbours
  std::vector<std::string> report;  // computed before filtering and flipping
  bool operator==(const ViewBundle&) const = default;
};

/// Pipeline: reference layout, join, relocate, sort, report, filter, flip,
/// edges. The reference defaults to the dataset target.
ViewBundle compute_view(const Dataset& ds, const ViewConfig& view);

formats::json to_json(const ViewBundle& bundle);

/// {hyperblocks: [{label, constraints, stats, rule}]}
formats::json hyperblocks_json(const std::vector<HyperBlock>& blocks, const Dataset& ds);

/// Overrides view fields from flat string parameters shared by the query
/// string and the CLI: ref, purity, minsize, smallsize, join, filter,
/// relocate, merge, sort, priority, order, flips (lists comma-separated).
ViewConfig apply_view_params(ViewConfig view, const std::map<std::string, std::string>& params);

/// Builds encoder parameters from the "params" object of an encode request.
EncoderParams encoder_params_from_json(const formats::json& j);

struct Session {
  std::string id;
  RawTable raw;
  SchemeDocument scheme;
  Dataset typed; // always consistent with `scheme`
  ViewConfig view;
  std::vector<HyperBlock> hyperblocks;
  std::vector<Rule> rules;

  /// Readers share `lock`; scheme and view changes take it exclusively.
  mutable std::shared_mutex lock;
  mutable std::mutex cache_lock;
  mutable std::map<std::string, std::shared_ptr<const ViewBundle>> layout_cache;
  mutable std::uint64_t cache_misses = 0;

  /// Cached by the canonical JSON of the view.
  std::shared_ptr<const ViewBundle> view_bundle(const ViewConfig& view) const;
  /// Replaces the scheme, retypes the data and drops cached views and blocks.
  void set_scheme(SchemeDocument doc);
};

class SessionStore {
public:
  /// Default scheme: every column Nominal, optional target.
  std::shared_ptr<Session> create(RawTable raw, std::optional<std::string> target = std::nullopt);
  /// Throws NotFound.
  std::shared_ptr<Session> get(const std::string& id) const;
  std::size_t size() const;

private:
  mutable std::shared_mutex lock_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_ = 1;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_upload = 64u << 20;
};

/// HTTP status for an engine error code.
int http_status(ErrorCode code);

/// Registers every /api route on `server`.
void install_routes(httplib::Server& server, SessionStore& store, const ServerConfig& config);

/// Blocks until the server stops. Port 0 in config reads HETVIZ_PORT.
int http_serve(const ServerConfig& config);

/// Command-line entry point; returns the process exit code (2 for usage
/// errors, 1 for failures).
int cli_run(int argc, const char* const* argv);

} // namespace hetviz

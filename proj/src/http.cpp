#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "hetviz/frontdoor.hpp"

namespace hetviz {

namespace {

using formats::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, formats::error_json(e), http_status(e.code())); }

template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, Error(ErrorCode::Parse, std::string("malformed request body: ") + e.what()));
    } catch (const std::exception& e) {
      send_error(res, Error(ErrorCode::Io, std::string("internal error: ") + e.what()));
    }
  };
}

std::map<std::string, std::string> query(const httplib::Request& req) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : req.params) out[k] = v;
  return out;
}

json dataset_summary(const Session& s) {
  json out;
  out["id"] = s.id;
  out["rows"] = s.typed.num_rows();
  out["attributes"] = json::array();
  for (const auto& a : s.typed.attributes()) out["attributes"].push_back(a.name);
  out["target"] = s.typed.target() ? json(s.typed.attribute(*s.typed.target()).name) : json(nullptr);
  return out;
}

} // namespace

void install_routes(httplib::Server& server, SessionStore& store, const ServerConfig& config) {
  server.set_payload_max_length(config.max_upload);
  const std::string id = R"(/api/datasets/([^/]+))";

  server.Post("/api/datasets", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                auto raw = parse_csv(req.body);
                std::optional<std::string> target;
                if (req.has_param("target")) target = req.get_param_value("target");
                auto s = store.create(std::move(raw), target);
                std::shared_lock guard(s->lock);
                send_json(res, dataset_summary(*s), 201);
              }));

  server.Get(id + "/scheme", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               std::shared_lock guard(s->lock);
               res.set_content(save_scheme(s->scheme), "application/json");
             }));

  server.Put(id + "/scheme", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               auto doc = load_scheme(req.body);
               std::unique_lock guard(s->lock);
               s->set_scheme(std::move(doc));
               send_json(res, dataset_summary(*s));
             }));

  server.Post(id + "/encode", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                auto s = store.get(req.matches[1]);
                const auto body = formats::parse(req.body);
                if (!body.is_object() || !body.contains("attr") || !body.contains("encoder"))
                  throw Error(ErrorCode::Parse, "encode request needs 'attr' and 'encoder'");
                const auto params = encoder_params_from_json(body.value("params", json()));
                std::shared_lock guard(s->lock);
                const auto attr = s->typed.index_of(body.at("attr").get<std::string>());
                send_json(res, formats::to_json(encode(s->typed, attr, body.at("encoder").get<std::string>(), params)));
              }));

  server.Get(id + "/layout", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               std::shared_lock guard(s->lock);
               const auto view = apply_view_params(s->view, query(req));
               send_json(res, to_json(*s->view_bundle(view)));
             }));

  server.Get(id + "/report", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               std::shared_lock guard(s->lock);
               const auto view = apply_view_params(s->view, query(req));
               send_json(res, {{"lines", s->view_bundle(view)->report}});
             }));

  server.Post(id + "/hyperblocks/discover", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                auto s = store.get(req.matches[1]);
                std::unique_lock guard(s->lock);
                s->hyperblocks = discover_pure_hbs(s->typed);
                send_json(res, hyperblocks_json(s->hyperblocks, s->typed));
              }));

  server.Get(id + "/hyperblocks", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               std::shared_lock guard(s->lock);
               send_json(res, hyperblocks_json(s->hyperblocks, s->typed));
             }));

  server.Post(id + "/rules/eval", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                auto s = store.get(req.matches[1]);
                auto rule = formats::rule_from_json(formats::parse(req.body));
                std::unique_lock guard(s->lock);
                auto violations = validate_rule(rule, s->typed);
                if (!violations.empty()) {
                  json body = formats::error_json(Error(ErrorCode::TypeViolation, "rule uses relations its attributes do not permit",
                                                        violations.front().attribute));
                  body["violations"] = json::array();
                  for (const auto& v : violations) body["violations"].push_back(formats::to_json(v));
                  send_json(res, body, 400);
                  return;
                }
                auto metrics = classify(rule, s->typed).metrics;
                s->rules.push_back(std::move(rule));
                send_json(res, formats::to_json(metrics));
              }));

  server.Put(id + "/view", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               const auto body = formats::parse(req.body);
               std::unique_lock guard(s->lock);
               auto view = formats::view_from_json(body, s->view);
               if (view.reference) s->typed.index_of(*view.reference);
               s->view = std::move(view);
               send_json(res, formats::to_json(s->view));
             }));

  server.Get(id + "/render.svg", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               RenderSpec spec;
               if (req.has_param("mode")) {
                 auto mode = parse_render_mode(req.get_param_value("mode"));
                 if (!mode) throw Error(ErrorCode::InvalidArgument, "unknown render mode '" + req.get_param_value("mode") + "'");
                 spec.mode = *mode;
               }
               auto params = query(req);
               params.erase("mode");
               std::shared_lock guard(s->lock);
               auto view = apply_view_params(s->view, params);
               const auto bundle = s->view_bundle(view);
               view.axis_order = bundle->order;
               res.set_content(render_svg(s->typed, view, bundle->layouts, bundle->edges, spec).text, "image/svg+xml");
             }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto code = res.status == 404 ? ErrorCode::NotFound : ErrorCode::InvalidArgument;
    json body = formats::error_json(Error(code, "no such endpoint or request rejected"));
    res.set_content(body.dump(), "application/json");
  });
}

int http_serve(const ServerConfig& input) {
  ServerConfig config = input;
  if (config.port == 0) {
    const char* env = std::getenv("HETVIZ_PORT");
    config.port = env ? std::atoi(env) : 8080;
  }
  SessionStore store;
  httplib::Server server;
  install_routes(server, store, config);
  std::cerr << "listening on http://" << config.host << ":" << config.port << "\n";
  if (!server.listen(config.host, config.port)) {
    std::cerr << "error: cannot listen on " << config.host << ":" << config.port << "\n";
    return 1;
  }
  return 0;
}

} // namespace hetviz

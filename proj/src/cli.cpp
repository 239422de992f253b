#include <iostream>

#include <CLI11.hpp>

#include "hetviz/frontdoor.hpp"

namespace hetviz {

namespace {

struct ViewOptions {
  std::string ref;
  std::optional<double> purity, min_size, small_size;
  bool join = false, filter = false, relocate = false, merge = false;
  std::string sort;
  std::vector<std::string> priority, order, flips;

  void attach(CLI::App* app) {
    app->add_option("--ref", ref, "Reference (class) attribute; defaults to the dataset target");
    app->add_option("--purity", purity, "Purity threshold in [0, 1]");
    app->add_option("--min-size", min_size, "Minimum block size in [0, 1]");
    app->add_option("--small-size", small_size, "Small block threshold in [0, 1]");
    app->add_flag("--join", join, "Join non-dominant mass into grey sub-bars");
    app->add_flag("--filter", filter, "Drop bars under the purity and size thresholds");
    app->add_flag("--relocate", relocate, "Move small blocks to the top of each axis");
    app->add_flag("--merge", merge, "Fold relocated small blocks into one bar");
    app->add_option("--sort", sort, "frequency | purity | color");
    app->add_option("--priority", priority, "Class priority for color sorting");
    app->add_option("--order", order, "Axis order");
    app->add_option("--flip", flips, "Attributes to flip");
  }

  ViewConfig config() const {
    auto join_list = [](const std::vector<std::string>& xs) {
      std::string s;
      for (const auto& x : xs) s += (s.empty() ? "" : ",") + x;
      return s;
    };
    std::map<std::string, std::string> p;
    if (!ref.empty()) p["ref"] = ref;
    if (purity) p["purity"] = format_number(*purity);
    if (min_size) p["minsize"] = format_number(*min_size);
    if (small_size) p["smallsize"] = format_number(*small_size);
    if (join) p["join"] = "true";
    if (filter) p["filter"] = "true";
    if (relocate) p["relocate"] = "true";
    if (merge) p["merge"] = "true";
    if (!sort.empty()) p["sort"] = sort;
    if (!priority.empty()) p["priority"] = join_list(priority);
    if (!order.empty()) p["order"] = join_list(order);
    if (!flips.empty()) p["flips"] = join_list(flips);
    return apply_view_params(ViewConfig{}, p);
  }
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
}

ScaleKind kind_option(const std::string& text) {
  auto k = scale_from_string(text);
  if (!k) throw Error(ErrorCode::InvalidArgument, "unknown measurement type '" + text + "'");
  return *k;
}

Dataset load_ds(const std::string& path) { return load_dataset(read_file(path)); }

} // namespace

int cli_run(int argc, const char* const* argv) {
  CLI::App app{"Heterogeneous data coding, visual layouts and hyperblock rules", "hetviz"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::function<void()> action;
  std::string out;

  // ingest
  std::string csv, scheme_path, target, mtype = "nominal";
  auto* ingest = app.add_subcommand("ingest", "Type a CSV file into a dataset file");
  ingest->add_option("csv", csv, "Input CSV")->required();
  ingest->add_option("--scheme", scheme_path, "Coding scheme JSON");
  ingest->add_option("--target", target, "Target attribute when no scheme is given");
  ingest->add_option("--mtype", mtype, "Type for attributes without a scheme entry");
  ingest->add_option("--out", out, "Output dataset file")->required();
  ingest->callback([&] {
    action = [&] {
      const auto raw = parse_csv(read_file(csv));
      CodingScheme scheme;
      if (!scheme_path.empty()) {
        scheme = load_scheme(read_file(scheme_path)).scheme;
      } else {
        scheme.default_kind = kind_option(mtype);
        if (!target.empty()) scheme.target = target;
      }
      const auto ds = apply_scheme(raw, scheme);
      write_file(out, save_dataset(ds));
      std::cout << ds.num_rows() << " rows, " << ds.num_attributes() << " attributes\n";
    };
  });

  // scheme generate | apply | validate
  auto* scheme = app.add_subcommand("scheme", "Create, apply or check coding schemes");
  scheme->require_subcommand(1);
  auto* generate = scheme->add_subcommand("generate", "All-Nominal or All-Ordinal scheme for a CSV file");
  generate->add_option("csv", csv, "Input CSV")->required();
  generate->add_option("--mtype", mtype, "nominal | ordinal");
  generate->add_option("--target", target, "Target attribute");
  generate->add_option("--out", out, "Output scheme file");
  generate->callback([&] {
    action = [&] {
      SchemeDocument doc;
      doc.scheme = bulk_assign(parse_csv(read_file(csv)), kind_option(mtype));
      if (!target.empty()) doc.scheme.target = target;
      doc.scheme.validate();
      emit(out, save_scheme(doc));
    };
  });
  auto* apply = scheme->add_subcommand("apply", "Apply a scheme to a CSV file");
  apply->add_option("csv", csv, "Input CSV")->required();
  apply->add_option("scheme", scheme_path, "Coding scheme JSON")->required();
  apply->add_option("--out", out, "Output dataset file")->required();
  apply->callback([&] {
    action = [&] {
      const auto ds = apply_scheme(parse_csv(read_file(csv)), load_scheme(read_file(scheme_path)).scheme);
      write_file(out, save_dataset(ds));
      std::cout << ds.num_rows() << " rows, " << ds.num_attributes() << " attributes\n";
    };
  });
  auto* check = scheme->add_subcommand("validate", "Check a scheme, optionally against a CSV file");
  check->add_option("scheme", scheme_path, "Coding scheme JSON")->required();
  check->add_option("--csv", csv, "CSV the scheme must apply to");
  check->callback([&] {
    action = [&] {
      const auto doc = load_scheme(read_file(scheme_path));
      if (!csv.empty()) apply_scheme(parse_csv(read_file(csv)), doc.scheme);
      std::cout << "ok\n";
    };
  });

  // encode
  std::string ds_path, attr, encoder;
  EncoderParams params;
  auto* enc = app.add_subcommand("encode", "Encode one attribute");
  enc->add_option("dataset", ds_path, "Dataset file")->required();
  enc->add_option("--attr", attr, "Attribute")->required();
  enc->add_option("--encoder", encoder, "Encoder identifier")->required();
  enc->add_option("--smoothing", params.smoothing, "Probability-ratio smoothing");
  enc->add_option("--shrink", params.shrink, "James-Stein shrinkage");
  enc->add_option("--dim", params.dim, "Hash dimension");
  enc->add_option("--seed", params.seed, "Hash seed");
  enc->add_option("--out", out, "Output JSON file");
  enc->callback([&] {
    action = [&] {
      const auto ds = load_ds(ds_path);
      emit(out, formats::to_json(encode(ds, ds.index_of(attr), encoder, params)).dump(2) + "\n");
    };
  });

  // layout / report / render
  ViewOptions vopts;
  auto* layout = app.add_subcommand("layout", "Axis layouts, edges and report as JSON");
  layout->add_option("dataset", ds_path, "Dataset file")->required();
  layout->add_option("--out", out, "Output JSON file");
  vopts.attach(layout);
  layout->callback([&] {
    action = [&] { emit(out, to_json(compute_view(load_ds(ds_path), vopts.config())).dump(2) + "\n"); };
  });

  auto* report = app.add_subcommand("report", "Linguistic description of the dominant blocks");
  report->add_option("dataset", ds_path, "Dataset file")->required();
  report->add_option("--out", out, "Output text file");
  vopts.attach(report);
  report->callback([&] {
    action = [&] {
      std::string text;
      for (const auto& line : compute_view(load_ds(ds_path), vopts.config()).report) text += line + "\n";
      emit(out, text);
    };
  });

  std::string mode = "lossless";
  auto* render = app.add_subcommand("render", "SVG parallel coordinates");
  render->add_option("dataset", ds_path, "Dataset file")->required();
  render->add_option("--out", out, "Output SVG file");
  render->add_option("--mode", mode, "lossless | aggregated");
  vopts.attach(render);
  render->callback([&] {
    action = [&] {
      const auto ds = load_ds(ds_path);
      auto view = vopts.config();
      const auto bundle = compute_view(ds, view);
      view.axis_order = bundle.order;
      RenderSpec spec;
      auto m = parse_render_mode(mode);
      if (!m) throw Error(ErrorCode::InvalidArgument, "unknown render mode '" + mode + "'");
      spec.mode = *m;
      emit(out, render_svg(ds, view, bundle.layouts, bundle.edges, spec).text);
    };
  });

  // hb discover
  auto* hb = app.add_subcommand("hb", "Hyperblocks");
  hb->require_subcommand(1);
  auto* discover = hb->add_subcommand("discover", "Pure hyperblocks of a dataset");
  discover->add_option("dataset", ds_path, "Dataset file")->required();
  discover->add_option("--out", out, "Output JSON file");
  discover->callback([&] {
    action = [&] {
      const auto ds = load_ds(ds_path);
      emit(out, hyperblocks_json(discover_pure_hbs(ds), ds).dump(2) + "\n");
    };
  });

  // rule eval
  std::string rule_path;
  auto* rule = app.add_subcommand("rule", "Rules");
  rule->require_subcommand(1);
  auto* eval = rule->add_subcommand("eval", "Evaluate a rule against a dataset");
  eval->add_option("dataset", ds_path, "Dataset file")->required();
  eval->add_option("rule", rule_path, "Rule JSON")->required();
  eval->add_option("--out", out, "Output JSON file");
  eval->callback([&] {
    action = [&] {
      const auto ds = load_ds(ds_path);
      const auto r = formats::rule_from_json(formats::parse(read_file(rule_path)));
      const auto violations = validate_rule(r, ds);
      if (!violations.empty()) {
        std::string msg = "rule uses relations its attributes do not permit:";
        for (const auto& v : violations) msg += "\n  " + v.atom + ": " + v.reason;
        throw Error(ErrorCode::TypeViolation, msg, violations.front().attribute);
      }
      emit(out, formats::to_json(classify(r, ds).metrics).dump(2) + "\n");
    };
  });

  // serve
  ServerConfig server{"127.0.0.1", 0};
  auto* serve = app.add_subcommand("serve", "Run the HTTP API (port from HETVIZ_PORT when omitted)");
  serve->add_option("--host", server.host, "Bind address");
  serve->add_option("--port", server.port, "Port");
  serve->add_option("--max-upload", server.max_upload, "Upload limit in bytes");
  serve->callback([&] { action = [&] { std::exit(http_serve(server)); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace hetviz

#pragma once

// Stable JSON formats shared by the CLI and the HTTP service.
//
//   rule        {antecedent: expr, consequent, else_class?}
//   expr        {op: "and"|"or"|"not", args: [expr]}
//               {atom: "equals"|"not_equals"|"in_set"|"not_in_set"|
//                      "in_rank_range"|"in_interval"|"pair_equals",
//                attr, params}
//   hyperblock  {label?, constraints: [{attr, kind, params}]}
//   layout      {attribute, flipped, bars: [{group, total, per_class,
//                dominant, purity, height, ...}], edges?}
//
// "not_in_set" reads as not(in_set). Unbounded interval ends are null.

#include <json.hpp>

#include "hetviz/encoders.hpp"
#include "hetviz/hyperblock.hpp"
#include "hetviz/render.hpp"
#include "hetviz/rules.hpp"
#include "hetviz/viewlayout.hpp"

namespace hetviz::formats {

using json = nlohmann::ordered_json;

/// Throws Parse with the offending location.
json parse(std::string_view text);

json to_json(const Expr& e);
Expr expr_from_json(const json& j);
json to_json(const Rule& r);
Rule rule_from_json(const json& j);

json to_json(const RuleMetrics& m);
json to_json(const RuleViolation& v);

json to_json(const HyperBlock& hb, const Dataset& schema);
HyperBlock hyperblock_from_json(const json& j, const Dataset& schema);
json to_json(const PurityStats& s);

json to_json(const AxisLayout& l, const EdgeBundle* outgoing = nullptr);
json to_json(const EdgeBundle& e);

json to_json(const EncodingResult& r);

json to_json(const ViewConfig& v);
/// Fields absent from `j` keep their value from `base`.
ViewConfig view_from_json(const json& j, const ViewConfig& base = {});

json error_json(const Error& e);

} // namespace hetviz::formats

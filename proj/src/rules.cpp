#include "hetviz/rules.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "hetviz/kernels.hpp"

namespace hetviz {

const std::string& atom_attribute(const Atom& atom) {
  return std::visit([](const auto& a) -> const std::string& { return a.attr; }, atom);
}

std::string describe(const Atom& atom) {
  struct {
    std::string operator()(const Equals& a) const { return a.attr + " = " + a.value; }
    std::string operator()(const NotEquals& a) const { return a.attr + " != " + a.value; }
    std::string operator()(const InSet& a) const {
      std::string s = a.attr + " in {";
      for (std::size_t i = 0; i < a.values.size(); ++i) s += (i ? ", " : "") + a.values[i];
      return s + "}";
    }
    std::string operator()(const InRankRange& a) const {
      return a.attr + " rank in [" + std::to_string(a.start) + ", " + std::to_string(a.end) + "]";
    }
    std::string operator()(const InInterval& a) const {
      return a.attr + " in [" + format_number(a.lo) + ", " + format_number(a.hi) + "]";
    }
    std::string operator()(const PairEquals& a) const { return "x." + a.attr + " = y." + a.attr; }
  } v;
  return std::visit(v, atom);
}

namespace {

Relation relation_of(const Atom& atom) {
  if (std::holds_alternative<InRankRange>(atom) || std::holds_alternative<InInterval>(atom))
    return Relation::Order;
  return Relation::Equality;
}

template <class F>
void for_each_atom(const Expr& e, F&& f) {
  if (e.op == Expr::Op::Atom) {
    f(*e.atom);
    return;
  }
  for (const auto& a : e.args) for_each_atom(a, f);
}

// Attribute names resolved once; evaluation then indexes rows directly.
struct Compiled {
  Expr::Op op;
  const Atom* atom = nullptr;
  std::size_t column = 0;
  std::vector<Compiled> args;
};

Compiled compile(const Expr& e, const Dataset& schema) {
  Compiled c{e.op, nullptr, 0, {}};
  if (e.op == Expr::Op::Atom) {
    if (!e.atom) throw Error(ErrorCode::InvalidArgument, "atom node without an atom");
    c.atom = &*e.atom;
    c.column = schema.index_of(atom_attribute(*e.atom));
    return c;
  }
  if (e.atom) throw Error(ErrorCode::InvalidArgument, "connective node carrying an atom");
  if (e.op == Expr::Op::Not && e.args.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "not takes exactly one argument");
  for (const auto& a : e.args) c.args.push_back(compile(a, schema));
  return c;
}

bool atom_holds(const Atom& atom, const Attribute& attr, const Value& x, const Value* y) {
  if (is_missing(x)) return false;
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Equals>) {
          return display(x) == a.value;
        } else if constexpr (std::is_same_v<T, NotEquals>) {
          return display(x) != a.value;
        } else if constexpr (std::is_same_v<T, InSet>) {
          return std::find(a.values.begin(), a.values.end(), display(x)) != a.values.end();
        } else if constexpr (std::is_same_v<T, InRankRange>) {
          auto n = attr.numeric(x);
          return n && *n >= double(a.start) && *n <= double(a.end);
        } else if constexpr (std::is_same_v<T, InInterval>) {
          auto n = attr.numeric(x);
          return n && *n >= a.lo && *n <= a.hi;
        } else {
          if (!y)
            throw Error(ErrorCode::InvalidArgument,
                        "pair atom on '" + a.attr + "' needs two points", a.attr);
          return !is_missing(*y) && display(x) == display(*y);
        }
      },
      atom);
}

bool run(const Compiled& c, const Dataset& schema, const Row& x, const Row* y) {
  switch (c.op) {
  case Expr::Op::Atom:
    return atom_holds(*c.atom, schema.attribute(c.column), x[c.column], y ? &(*y)[c.column] : nullptr);
  case Expr::Op::And:
    for (const auto& a : c.args)
      if (!run(a, schema, x, y)) return false;
    return true;
  case Expr::Op::Or:
    for (const auto& a : c.args)
      if (run(a, schema, x, y)) return true;
    return false;
  case Expr::Op::Not: return !run(c.args.front(), schema, x, y);
  }
  return false;
}

std::vector<std::string> class_labels(const Dataset& ds) {
  if (!ds.target()) throw Error(ErrorCode::InvalidArgument, "classification needs a target attribute");
  std::vector<std::string> out(ds.num_rows());
  for (std::size_t r = 0; r < ds.num_rows(); ++r) out[r] = display(ds.at(r, *ds.target()));
  return out;
}

void finish(Classification& c, const Rule& rule, const std::vector<std::string>& truth) {
  auto& m = c.metrics;
  m.rows = truth.size();
  c.decisions.assign(truth.size(), std::nullopt);
  for (std::size_t r = 0; r < truth.size(); ++r) {
    if (c.fired[r]) {
      c.decisions[r] = rule.consequent;
      ++m.coverage;
      m.correct += truth[r] == rule.consequent;
    } else if (rule.else_class) {
      c.decisions[r] = *rule.else_class;
      ++m.else_covered;
      m.else_correct += truth[r] == *rule.else_class;
    }
  }
  if (m.coverage) {
    m.precision = double(m.correct) / double(m.coverage);
    m.error_rate = 1.0 - *m.precision;
  }
  if (rule.else_class && m.rows) m.accuracy = double(m.correct + m.else_correct) / double(m.rows);
}

using CodeMap = std::vector<std::pair<std::string, double>>;

Rule rewrite(const Rule& rule, const std::function<const CodeMap*(const std::string&)>& codes_for,
             const std::function<bool(const std::string&)>& is_nominal) {
  std::function<Expr(const Expr&)> walk = [&](const Expr& e) -> Expr {
    if (e.op != Expr::Op::Atom) {
      Expr out{e.op, std::nullopt, {}};
      for (const auto& a : e.args) out.args.push_back(walk(a));
      return out;
    }
    const auto& atom = *e.atom;
    const bool threshold = std::holds_alternative<InInterval>(atom) || std::holds_alternative<InRankRange>(atom);
    const auto& name = atom_attribute(atom);
    if (!threshold || !is_nominal(name)) return e;
    const CodeMap* codes = codes_for(name);
    if (!codes || codes->empty())
      throw Error(ErrorCode::InvalidArgument, "attribute '" + name + "' has no code map to rewrite thresholds",
                  name);
    double lo, hi;
    if (auto iv = std::get_if<InInterval>(&atom)) {
      lo = iv->lo;
      hi = iv->hi;
    } else {
      const auto& rr = std::get<InRankRange>(atom);
      lo = rr.start;
      hi = rr.end;
    }
    auto sorted = *codes;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    InSet set{name, {}};
    for (const auto& [value, code] : sorted)
      if (code >= lo && code <= hi) set.values.push_back(value);
    return Expr::leaf(std::move(set));
  };
  return {walk(rule.antecedent), rule.consequent, rule.else_class};
}

} // namespace

std::vector<RuleViolation> validate_rule(const Rule& rule, const Dataset& schema) {
  std::vector<RuleViolation> out;
  compile(rule.antecedent, schema); // structural checks and attribute lookup
  for_each_atom(rule.antecedent, [&](const Atom& atom) {
    const auto& attr = schema.attribute(schema.index_of(atom_attribute(atom)));
    const auto rel = relation_of(atom);
    auto permit = check_operation(attr, rel);
    if (!permit) out.push_back({describe(atom), attr.name, rel, permit.reason});
  });
  return out;
}

bool eval_expr(const Expr& expr, const Dataset& schema, const Row& x) {
  return run(compile(expr, schema), schema, x, nullptr);
}

bool eval_rule(const Rule& rule, const Dataset& schema, const Row& x) {
  return eval_expr(rule.antecedent, schema, x);
}

bool eval_pairwise_rule(const Rule& rule, const Dataset& schema, const Row& x, const Row& y) {
  return run(compile(rule.antecedent, schema), schema, x, &y);
}

namespace {

void reject_pair_atoms(const Expr& e) {
  for_each_atom(e, [](const Atom& atom) {
    if (std::holds_alternative<PairEquals>(atom))
      throw Error(ErrorCode::InvalidArgument,
                  "pair atom on '" + atom_attribute(atom) + "' needs two points", atom_attribute(atom));
  });
}

} // namespace

Classification classify(const Rule& rule, const Dataset& ds) {
  const auto truth = class_labels(ds);
  const auto program = compile(rule.antecedent, ds);
  reject_pair_atoms(rule.antecedent);
  Classification c;
  c.fired = kernels::parallel::mask_rows(ds.num_rows(),
                                         [&](std::size_t r) { return run(program, ds, ds.row(r), nullptr); });
  finish(c, rule, truth);
  return c;
}

Classification classify_serial(const Rule& rule, const Dataset& ds) {
  const auto truth = class_labels(ds);
  const auto program = compile(rule.antecedent, ds);
  reject_pair_atoms(rule.antecedent);
  Classification c;
  c.fired = kernels::serial::mask_rows(ds.num_rows(),
                                       [&](std::size_t r) { return run(program, ds, ds.row(r), nullptr); });
  finish(c, rule, truth);
  return c;
}

Rule normalize_rule(const Rule& rule, const Dataset& schema) {
  std::map<std::string, CodeMap> maps;
  for (const auto& a : schema.attributes()) maps[a.name] = CodeMap(a.codes.begin(), a.codes.end());
  return rewrite(
      rule,
      [&](const std::string& name) -> const CodeMap* {
        schema.index_of(name);
        return &maps.at(name);
      },
      [&](const std::string& name) {
        return schema.attribute(schema.index_of(name)).mtype.kind() == ScaleKind::Nominal;
      });
}

Rule normalize_rule(const Rule& rule, const CodingScheme& scheme) {
  std::map<std::string, CodeMap> maps;
  for (const auto& e : scheme.entries) {
    CodeMap m;
    if (auto vg = e.group ? std::get_if<ValueGroups>(&*e.group) : nullptr) {
      for (const auto& g : vg->groups) m.emplace_back(g.label, g.code);
    } else if (auto ig = e.group ? std::get_if<IntervalGroups>(&*e.group) : nullptr) {
      for (std::size_t i = 0; i < ig->intervals.size(); ++i) m.emplace_back(ig->label(i), ig->intervals[i].code);
    } else {
      m = e.codes;
    }
    maps[e.name] = std::move(m);
  }
  return rewrite(
      rule,
      [&](const std::string& name) -> const CodeMap* {
        auto it = maps.find(name);
        return it == maps.end() ? nullptr : &it->second;
      },
      [&](const std::string& name) {
        const auto* e = scheme.find(name);
        return e ? e->mtype.kind() == ScaleKind::Nominal : scheme.default_kind == ScaleKind::Nominal;
      });
}

} // namespace hetviz

#include "vifp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vifp/diagnostics.hpp"

namespace vifp {

namespace {

const Json& req(const Json& j, const char* field, const std::string& where) {
  if (!j.is_object() || !j.contains(field))
    throw ConfigError(where + ": missing field '" + field + "'");
  return j.at(field);
}

double req_num(const Json& j, const char* field, const std::string& where) {
  const Json& v = req(j, field, where);
  if (!v.is_number()) throw ConfigError(where + ": field '" + field + "' must be a number");
  return v.get<double>();
}

std::string req_str(const Json& j, const char* field, const std::string& where) {
  const Json& v = req(j, field, where);
  if (!v.is_string()) throw ConfigError(where + ": field '" + field + "' must be a string");
  return v.get<std::string>();
}

Vec vec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a list of rows");
  std::vector<Vec> rows;
  rows.reserve(j.size());
  for (const auto& r : j) rows.push_back(vec_from_json(r, where));
  return Matrix::from_rows(rows);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sets
// ---------------------------------------------------------------------------

Json set_to_json(const ConvexSet& c) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return Json{{"type", "whole_space"}, {"dim", s.dim}};
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          return Json{{"type", "box"}, {"lower", s.lower}, {"upper", s.upper}};
        } else if constexpr (std::is_same_v<T, BallSet>) {
          return Json{{"type", "ball"}, {"center", s.center}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, HalfspaceSet>) {
          return Json{{"type", "halfspace"}, {"normal", s.normal}, {"offset", s.offset}};
        } else if constexpr (std::is_same_v<T, HyperplaneSet>) {
          return Json{{"type", "hyperplane"}, {"normal", s.normal}, {"offset", s.offset}};
        } else if constexpr (std::is_same_v<T, SimplexSet>) {
          return Json{{"type", "simplex"}, {"dim", s.dim}, {"scale", s.scale}};
        } else {
          Json members = Json::array();
          for (const auto& m : s.members) members.push_back(set_to_json(m));
          return Json{{"type", "intersection"}, {"members", members}, {"witness", s.witness}};
        }
      },
      c.desc());
}

ConvexSet set_from_json(const Json& j) {
  const std::string type = req_str(j, "type", "set");
  const std::string where = "set '" + type + "'";
  if (type == "whole_space")
    return ConvexSet::whole_space(static_cast<std::size_t>(req_num(j, "dim", where)));
  if (type == "box")
    return ConvexSet::box(vec_from_json(req(j, "lower", where), where),
                          vec_from_json(req(j, "upper", where), where));
  if (type == "ball")
    return ConvexSet::ball(vec_from_json(req(j, "center", where), where),
                           req_num(j, "radius", where));
  if (type == "halfspace")
    return ConvexSet::halfspace(vec_from_json(req(j, "normal", where), where),
                                req_num(j, "offset", where));
  if (type == "hyperplane")
    return ConvexSet::hyperplane(vec_from_json(req(j, "normal", where), where),
                                 req_num(j, "offset", where));
  if (type == "simplex")
    return ConvexSet::simplex(static_cast<std::size_t>(req_num(j, "dim", where)),
                              req_num(j, "scale", where));
  if (type == "intersection") {
    std::vector<ConvexSet> members;
    for (const auto& m : req(j, "members", where)) members.push_back(set_from_json(m));
    return ConvexSet::intersection(std::move(members),
                                   vec_from_json(req(j, "witness", where), where));
  }
  throw ConfigError("set: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Mappings
// ---------------------------------------------------------------------------

Json mapping_to_json(const PointMapping& m) {
  return std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PointMapping::Identity>) {
          return Json{{"type", "identity"}};
        } else if constexpr (std::is_same_v<T, PointMapping::Constant>) {
          return Json{{"type", "constant"}, {"target", d.target}};
        } else if constexpr (std::is_same_v<T, PointMapping::Scale>) {
          return Json{{"type", "scale"}, {"factor", d.factor}, {"center", d.center}};
        } else if constexpr (std::is_same_v<T, PointMapping::ProjectOnto>) {
          return Json{{"type", "project"}, {"set", set_to_json(d.set)}};
        } else {
          Json stages = Json::array();
          for (const auto& st : d.stages)
            stages.push_back(Json{{"mu", st.mu}, {"map", mapping_to_json(*st.map)}});
          return Json{{"type", "averaged_composition"}, {"stages", stages}};
        }
      },
      m.desc());
}

PointMapping mapping_from_json(const Json& j) {
  const std::string type = req_str(j, "type", "mapping");
  const std::string where = "mapping '" + type + "'";
  if (type == "identity") return PointMapping::identity();
  if (type == "constant")
    return PointMapping::constant(vec_from_json(req(j, "target", where), where));
  if (type == "scale")
    return PointMapping::scale(req_num(j, "factor", where),
                               vec_from_json(req(j, "center", where), where));
  if (type == "project") return PointMapping::project_onto(set_from_json(req(j, "set", where)));
  if (type == "averaged_composition") {
    std::vector<std::pair<double, PointMapping>> stages;
    for (const auto& st : req(j, "stages", where)) {
      stages.emplace_back(req_num(st, "mu", where), mapping_from_json(req(st, "map", where)));
    }
    return PointMapping::averaged_composition(std::move(stages));
  }
  throw ConfigError("mapping: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

Json operator_to_json(const IsmOperator& a) {
  Json j = std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IsmOperator::Zero>) {
          return Json{{"type", "zero"}, {"dim", d.dim}};
        } else if constexpr (std::is_same_v<T, IsmOperator::Affine>) {
          return Json{{"type", "affine"}, {"matrix", matrix_to_json(d.m)}, {"shift", d.shift}};
        } else if constexpr (std::is_same_v<T, IsmOperator::GradientQuadratic>) {
          return Json{{"type", "gradient_quadratic"},
                      {"matrix", matrix_to_json(d.q)},
                      {"linear", d.c}};
        } else if constexpr (std::is_same_v<T, IsmOperator::PseudocontractionResidual>) {
          return Json{{"type", "pseudocontraction_residual"},
                      {"s", mapping_to_json(d.s)},
                      {"k", d.k}};
        } else {
          return Json{{"type", "lipschitz"}, {"map", mapping_to_json(d.map)},
                      {"l", d.declared_l}, {"dim", d.dim}};
        }
      },
      a.desc());
  j["alpha_certified"] = a.alpha();
  j["lipschitz_certified"] = a.lipschitz();
  if (a.alpha_lipschitz()) j["alpha_lipschitz"] = *a.alpha_lipschitz();
  return j;
}

IsmOperator operator_from_json(const Json& j) {
  const std::string type = req_str(j, "type", "operator");
  const std::string where = "operator '" + type + "'";
  if (type == "zero")
    return IsmOperator::zero(static_cast<std::size_t>(req_num(j, "dim", where)));
  if (type == "affine") {
    Matrix m = matrix_from_json(req(j, "matrix", where), where);
    Vec shift = vec_from_json(req(j, "shift", where), where);
    if (j.contains("alpha"))
      return IsmOperator::affine_declared(std::move(m), std::move(shift),
                                          req_num(j, "alpha", where));
    return IsmOperator::affine(std::move(m), std::move(shift));
  }
  if (type == "gradient_quadratic")
    return IsmOperator::gradient_quadratic(matrix_from_json(req(j, "matrix", where), where),
                                           vec_from_json(req(j, "linear", where), where));
  if (type == "pseudocontraction_residual") {
    PointMapping s = mapping_from_json(req(j, "s", where));
    const double k = req_num(j, "k", where);
    std::size_t dim = s.dim();
    if (dim == 0) dim = static_cast<std::size_t>(req_num(j, "dim", where));
    Rng rng(kCertSeed);
    return ism_from_pseudocontraction(std::move(s), k, dim, rng);
  }
  if (type == "lipschitz") {
    PointMapping map = mapping_from_json(req(j, "map", where));
    const double l = req_num(j, "l", where);
    std::size_t dim = map.dim();
    if (dim == 0) dim = static_cast<std::size_t>(req_num(j, "dim", where));
    Rng rng(kCertSeed);
    return ism_from_lipschitz(std::move(map), l, dim, rng);
  }
  throw ConfigError("operator: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

Json family_to_json(const WMapping& w) {
  Json members = Json::array();
  for (const auto& m : w.family) members.push_back(mapping_to_json(m));
  std::string tail = "repeat_last";
  if (w.tail == WMapping::Tail::Identity) tail = "identity";
  if (w.tail == WMapping::Tail::None) tail = "none";
  return Json{{"members", members}, {"mu", w.mu}, {"tail", tail}, {"depth_cap", w.depth_cap}};
}

WMapping family_from_json(const Json& j, std::size_t dim) {
  const std::string where = "family";
  std::vector<PointMapping> members;
  for (const auto& m : req(j, "members", where)) members.push_back(mapping_from_json(m));

  std::vector<double> mu{0.5};
  if (j.contains("mu")) {
    const Json& jm = j.at("mu");
    if (jm.is_number()) mu = {jm.get<double>()};
    else mu = vec_from_json(jm, where);
  }

  WMapping::Tail tail = WMapping::Tail::RepeatLast;
  if (j.contains("tail")) {
    const std::string t = j.at("tail").get<std::string>();
    if (t == "repeat_last") tail = WMapping::Tail::RepeatLast;
    else if (t == "identity") tail = WMapping::Tail::Identity;
    else if (t == "none") tail = WMapping::Tail::None;
    else throw ConfigError("family: unknown tail rule '" + t + "'");
  }

  int depth_cap = 64;
  if (j.contains("depth_cap")) depth_cap = j.at("depth_cap").get<int>();

  return WMapping::certified(std::move(members), std::move(mu), tail, depth_cap, dim);
}

// ---------------------------------------------------------------------------
// Schedules and schemes
// ---------------------------------------------------------------------------

Json schedule_to_json(const ParamSchedule& s) {
  return std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ParamSchedule::Constant>) {
          return Json{{"type", "constant"}, {"value", d.value}};
        } else if constexpr (std::is_same_v<T, ParamSchedule::PeriodicList>) {
          return Json{{"type", "periodic"}, {"values", d.values}};
        } else {
          return Json{{"type", "harmonic"}, {"lo", d.lo}, {"hi", d.hi}};
        }
      },
      s.desc());
}

ParamSchedule schedule_from_json(const Json& j) {
  if (j.is_number()) return ParamSchedule::constant(j.get<double>());
  const std::string type = req_str(j, "type", "schedule");
  const std::string where = "schedule '" + type + "'";
  if (type == "constant") return ParamSchedule::constant(req_num(j, "value", where));
  if (type == "periodic") {
    Vec values = vec_from_json(req(j, "values", where), where);
    return ParamSchedule::periodic({values.begin(), values.end()});
  }
  if (type == "harmonic")
    return ParamSchedule::harmonic(req_num(j, "lo", where), req_num(j, "hi", where));
  throw ConfigError("schedule: unknown type '" + type + "'");
}

Json scheme_to_json(const SchemeSpec& s) {
  Json j{{"kind", s.name()}};
  if (s.uses_lambda()) j["lambda"] = schedule_to_json(s.lambda);
  j["alpha"] = schedule_to_json(s.alpha);
  if (s.anchor) j["anchor"] = *s.anchor;
  if (s.beta) j["beta"] = schedule_to_json(*s.beta);
  if (s.gamma) j["gamma"] = schedule_to_json(*s.gamma);
  if (s.kind == SchemeKind::YaoB) j["amended"] = s.yao_amended;
  return j;
}

SchemeSpec scheme_from_json(const Json& j) {
  SchemeSpec spec;
  spec.kind = scheme_from_name(req_str(j, "kind", "scheme"));
  const std::string where = "scheme '" + spec.name() + "'";
  if (j.contains("lambda")) spec.lambda = schedule_from_json(j.at("lambda"));
  if (j.contains("alpha")) spec.alpha = schedule_from_json(j.at("alpha"));
  if (j.contains("anchor")) spec.anchor = vec_from_json(j.at("anchor"), where);
  if (j.contains("beta")) spec.beta = schedule_from_json(j.at("beta"));
  if (j.contains("gamma")) spec.gamma = schedule_from_json(j.at("gamma"));
  if (j.contains("amended")) spec.yao_amended = j.at("amended").get<bool>();
  if (spec.kind == SchemeKind::YaoB && (!spec.beta || !spec.gamma))
    throw ConfigError(where + ": beta and gamma schedules are required");
  return spec;
}

// ---------------------------------------------------------------------------
// Experiment loading
// ---------------------------------------------------------------------------

namespace {

StopRule stop_from_json(const Json& j) {
  StopRule stop;
  if (j.contains("residual")) {
    const std::string r = j.at("residual").get<std::string>();
    if (r == "vi") stop.kind = StopRule::Residual::VI;
    else if (r == "fixed_point") stop.kind = StopRule::Residual::FixedPoint;
    else if (r == "combined") stop.kind = StopRule::Residual::Combined;
    else throw ConfigError("stop: unknown residual kind '" + r + "'");
  }
  if (j.contains("tol")) stop.tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) stop.max_iter = j.at("max_iter").get<int>();
  if (!(stop.tol > 0.0)) throw ConfigError("stop: tol must be strictly positive");
  if (stop.max_iter < 0) throw ConfigError("stop: max_iter must be >= 0");
  return stop;
}

Json stop_to_json(const StopRule& s) {
  std::string r = "combined";
  if (s.kind == StopRule::Residual::VI) r = "vi";
  if (s.kind == StopRule::Residual::FixedPoint) r = "fixed_point";
  return Json{{"residual", r}, {"tol", s.tol}, {"max_iter", s.max_iter}};
}

// seed precedence: CLI override, then the problem's own seed, then the
// config-level seed
ProblemInstance problem_from_json(const Json& j, std::uint64_t default_seed,
                                  std::optional<std::uint64_t> forced_seed) {
  const std::string where = "problem";
  if (j.contains("generator")) {
    const std::string gen = j.at("generator").get<std::string>();
    const std::uint64_t seed = forced_seed.value_or(
        j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed);
    Rng rng(seed);
    if (gen == "quadratic_box") {
      return gen_quadratic_box(static_cast<std::size_t>(req_num(j, "d", where)), rng);
    }
    if (gen == "common_fixed_family") {
      return gen_common_fixed_family(static_cast<std::size_t>(req_num(j, "d", where)),
                                     static_cast<std::size_t>(req_num(j, "m", where)), rng);
    }
    if (gen == "pseudocontractive") {
      return gen_pseudocontractive(static_cast<std::size_t>(req_num(j, "d", where)),
                                   req_num(j, "k", where), rng);
    }
    throw ConfigError("problem: unknown generator '" + gen + "'");
  }

  ConvexSet set = set_from_json(req(j, "set", where));
  IsmOperator op = operator_from_json(req(j, "operator", where));
  WMapping family = family_from_json(req(j, "family", where), set.dim());
  std::optional<Vec> hint;
  if (j.contains("oracle_hint")) hint = vec_from_json(j.at("oracle_hint"), where);
  std::string label = j.contains("label") ? j.at("label").get<std::string>() : "explicit";
  return ProblemInstance{std::move(set), std::move(op), std::move(family), std::move(hint),
                         std::move(label)};
}

Json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // convert the byte offset to a line number for the diagnostic
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("parse error in '" + path + "' at line " + std::to_string(line) + ": " +
                      e.what());
  }
}

}  // namespace

ExperimentConfig load_experiment(const std::string& path, const CliOverrides& over) {
  const Json root = parse_file(path);
  if (!root.is_object()) throw ConfigError("config root must be an object");

  const std::uint64_t base_seed =
      over.seed.value_or(root.value("seed", std::uint64_t{12345}));
  ExperimentConfig cfg{
      problem_from_json(req(root, "problem", "config"), base_seed, over.seed),
      {},
      {},
      "out",
      false,
      true,
      std::nullopt,
      base_seed,
      Json{}};

  const Json& schemes = req(root, "schemes", "config");
  if (!schemes.is_array() || schemes.empty())
    throw ConfigError("config: field 'schemes' must be a nonempty array");
  for (const auto& s : schemes) cfg.schemes.push_back(scheme_from_json(s));

  if (root.contains("stop")) cfg.stop = stop_from_json(root.at("stop"));
  if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();
  if (over.output_dir) cfg.output_dir = *over.output_dir;
  if (root.contains("compare")) cfg.compare = root.at("compare").get<bool>();
  if (root.contains("oracle")) cfg.oracle = root.at("oracle").get<bool>();
  if (root.contains("x0")) {
    cfg.x0 = vec_from_json(root.at("x0"), "config");
    if (cfg.x0->size() != cfg.problem.c.dim())
      throw ConfigError("config: x0 has dimension " + std::to_string(cfg.x0->size()) +
                        ", problem has " + std::to_string(cfg.problem.c.dim()));
  }

  // default lambda resolved against the certified constant when omitted
  const double alpha_cert = cfg.problem.a.alpha();
  const double lambda_default = std::isfinite(alpha_cert) ? alpha_cert : 0.1;
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
    const Json& sj = schemes.at(i);
    if (cfg.schemes[i].uses_lambda() && !sj.contains("lambda"))
      cfg.schemes[i].lambda = ParamSchedule::constant(lambda_default);
  }

  // echo of the resolved configuration
  Json echo;
  echo["label"] = cfg.problem.label;
  echo["seed"] = cfg.seed;
  echo["problem"] = Json{{"set", set_to_json(cfg.problem.c)},
                         {"operator", operator_to_json(cfg.problem.a)},
                         {"family", family_to_json(cfg.problem.w)}};
  if (cfg.problem.oracle_hint) echo["problem"]["oracle_hint"] = *cfg.problem.oracle_hint;
  Json scheme_echo = Json::array();
  for (const auto& s : cfg.schemes) scheme_echo.push_back(scheme_to_json(s));
  echo["schemes"] = scheme_echo;
  echo["stop"] = stop_to_json(cfg.stop);
  // output_dir deliberately left out: the echo describes the experiment, and
  // replays into fresh directories must reproduce it byte-for-byte
  echo["compare"] = cfg.compare;
  echo["oracle"] = cfg.oracle;
  if (cfg.x0) echo["x0"] = *cfg.x0;
  cfg.resolved = std::move(echo);
  return cfg;
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string fmt_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SummaryRow {
  std::string scheme;
  int iterations = 0;
  double final_vi = std::numeric_limits<double>::quiet_NaN();
  double final_fix = std::numeric_limits<double>::quiet_NaN();
  std::string terminated_by;
  double wall_ms = 0.0;
};

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "scheme,iterations,final_residual_vi,final_residual_fix,terminated_by,wall_ms\n";
  for (const auto& r : rows) {
    out += r.scheme + ',' + std::to_string(r.iterations) + ',' + fmt_sig(r.final_vi) + ',' +
           fmt_sig(r.final_fix) + ',' + r.terminated_by + ',' + fmt_sig(r.wall_ms) + '\n';
  }
  return out;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %10s %14s %14s %-10s %10s\n", "scheme", "iters",
                "residual_vi", "residual_fix", "status", "wall_ms");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-18s %10d %14.4e %14.4e %-10s %10.2f\n",
                  r.scheme.c_str(), r.iterations, r.final_vi, r.final_fix,
                  r.terminated_by.c_str(), r.wall_ms);
    out << line;
  }
  return out.str();
}

}  // namespace

int run_experiment(const std::string& path, const CliOverrides& over) {
  std::optional<ExperimentConfig> loaded;
  try {
    loaded = load_experiment(path, over);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  ExperimentConfig& cfg = *loaded;

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output directory '%s'\n",
                 cfg.output_dir.c_str());
    return 1;
  }

  std::optional<Vec> oracle_point = cfg.problem.oracle_hint;
  if (cfg.oracle && !oracle_point) {
    try {
      oracle_point = oracle_solve(cfg.problem.c, cfg.problem.a, cfg.problem.w);
    } catch (const Error&) {
      // dist_to_oracle stays absent
    }
  }

  const Vec x0 = cfg.x0.value_or(cfg.problem.c.any_point());
  const std::string echo_text = cfg.resolved.dump(2) + "\n";
  write_text_atomic(std::filesystem::path(cfg.output_dir) / "config_echo.json", echo_text);

  bool any_error = false;
  bool any_maxiter = false;
  std::vector<SummaryRow> rows;
  std::map<std::string, int> seen;
  for (const auto& spec : cfg.schemes) {
    std::string name = spec.name();
    const int k = ++seen[name];
    if (k > 1) name += "-" + std::to_string(k);

    SummaryRow row;
    row.scheme = name;
    try {
      RunOptions opts;
      opts.oracle_point = oracle_point;
      opts.config_echo = echo_text;
      const Trace trace = run_scheme(spec, cfg.problem.c, cfg.problem.a, cfg.problem.w, x0,
                                     cfg.stop, opts);
      write_text_atomic(std::filesystem::path(cfg.output_dir) / (name + ".csv"),
                        trace_to_csv(trace));
      row.iterations = trace.iterations();
      row.final_vi = trace.final_record().residual_vi;
      row.final_fix = trace.final_record().residual_fix;
      row.terminated_by = termination_name(trace.terminated_by);
      row.wall_ms = trace.wall_ms;
      if (trace.terminated_by == Termination::MaxIter) any_maxiter = true;
      if (trace.terminated_by == Termination::Error) any_error = true;
      if (!over.quiet)
        std::printf("%s: %s after %d iterations (vi %.3e, fix %.3e)\n", name.c_str(),
                    row.terminated_by.c_str(), row.iterations, row.final_vi, row.final_fix);
    } catch (const Error& e) {
      any_error = true;
      row.terminated_by = "error";
      if (!over.quiet) std::printf("%s: error: %s\n", name.c_str(), e.what());
    }
    rows.push_back(std::move(row));
  }

  if (cfg.compare) {
    write_text_atomic(std::filesystem::path(cfg.output_dir) / "summary.csv", summary_csv(rows));
    write_text_atomic(std::filesystem::path(cfg.output_dir) / "summary.txt",
                      summary_table(rows));
    if (!over.quiet) std::printf("%s", summary_table(rows).c_str());
  }

  if (any_error) return 1;
  if (any_maxiter) return 2;
  return 0;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationReport validate_config(const std::string& path, const CliOverrides& over) {
  ValidationReport report;
  std::optional<ExperimentConfig> loaded;
  try {
    loaded = load_experiment(path, over);
  } catch (const CertificationError& e) {
    report.ok = false;
    std::string line = std::string("certification failure: ") + e.what();
    if (e.witness) {
      line += " (witness pair x = [";
      for (std::size_t i = 0; i < e.witness->first.size(); ++i) {
        if (i) line += ", ";
        line += std::to_string(e.witness->first[i]);
      }
      line += "], y = [";
      for (std::size_t i = 0; i < e.witness->second.size(); ++i) {
        if (i) line += ", ";
        line += std::to_string(e.witness->second[i]);
      }
      line += "])";
    }
    report.lines.push_back(std::move(line));
    return report;
  } catch (const Error& e) {
    report.ok = false;
    report.lines.push_back(std::string("error: ") + e.what());
    return report;
  }
  ExperimentConfig& cfg = *loaded;

  const double alpha = cfg.problem.a.alpha();
  report.lines.push_back("problem: " + cfg.problem.label);
  report.lines.push_back("certified alpha: " + fmt_sig(alpha) +
                         ", certified lipschitz: " + fmt_sig(cfg.problem.a.lipschitz()));
  report.lines.push_back("family: " + std::to_string(cfg.problem.w.prefix_len()) +
                         " member(s), depth cap " + std::to_string(cfg.problem.w.depth_cap));

  for (const auto& spec : cfg.schemes) {
    std::string line = spec.name() + ": ";
    if (spec.uses_lambda()) {
      line += "lambda in [" + fmt_sig(spec.lambda.lo()) + ", " + fmt_sig(spec.lambda.hi()) +
              "], ";
    }
    line += "alpha in [" + fmt_sig(spec.alpha.lo()) + ", " + fmt_sig(spec.alpha.hi()) + "]";
    if (spec.uses_lambda() && std::isfinite(alpha)) {
      const double limit = 2.0 * alpha * (1.0 - 1e-6);
      if (spec.lambda.hi() > limit) {
        report.ok = false;
        line += "  VIOLATION: lambda upper bound " + fmt_sig(spec.lambda.hi()) +
                " reaches 2*alpha = " + fmt_sig(2.0 * alpha);
      }
    }
    if (spec.uses_lambda() && !(spec.lambda.lo() > 0.0)) {
      report.ok = false;
      line += "  VIOLATION: lambda lower bound must be strictly positive";
    }
    if (spec.kind != SchemeKind::YaoB &&
        (!(spec.alpha.lo() > 0.0) || !(spec.alpha.hi() < 1.0))) {
      report.ok = false;
      line += "  VIOLATION: alpha schedule must lie strictly inside (0, 1)";
    }
    report.lines.push_back(std::move(line));
  }
  if (report.ok) report.lines.push_back("OK");
  return report;
}

}  // namespace vifp

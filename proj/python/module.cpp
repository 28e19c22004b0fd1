#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vifp/config.hpp"
#include "vifp/diagnostics.hpp"
#include "vifp/operators.hpp"
#include "vifp/problems.hpp"
#include "vifp/schemes.hpp"
#include "vifp/sets.hpp"

namespace py = pybind11;
using namespace vifp;

namespace {

StopRule make_stop(const std::string& residual, double tol, int max_iter) {
  StopRule stop;
  if (residual == "vi") stop.kind = StopRule::Residual::VI;
  else if (residual == "fixed_point") stop.kind = StopRule::Residual::FixedPoint;
  else if (residual == "combined") stop.kind = StopRule::Residual::Combined;
  else throw ConfigError("unknown residual kind '" + residual + "'");
  stop.tol = tol;
  stop.max_iter = max_iter;
  return stop;
}

Trace run_scheme_py(const SchemeSpec& spec, const ProblemInstance& problem, const Vec& x0,
                    const std::string& residual, double tol, int max_iter, bool use_oracle) {
  RunOptions opts;
  if (use_oracle && problem.oracle_hint) opts.oracle_point = problem.oracle_hint;
  return run_scheme(spec, problem.c, problem.a, problem.w, x0,
                    make_stop(residual, tol, max_iter), opts);
}

}  // namespace

PYBIND11_MODULE(_vifp, m) {
  m.doc() = "Projected iterations for joint fixed-point / variational-inequality problems";

  // base first: translators run in reverse registration order, so the
  // derived registrations below take precedence
  py::register_exception<Error>(m, "VifpError");
  py::register_exception<DimensionError>(m, "DimensionError");
  py::register_exception<CorridorError>(m, "CorridorError");
  py::register_exception<CertificationError>(m, "CertificationError");
  py::register_exception<FeasibilityError>(m, "FeasibilityError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");
  py::register_exception<ConfigError>(m, "ConfigError");

  // core
  m.def("dot", &dot, py::arg("x"), py::arg("y"));
  m.def("norm", [](const Vec& x) { return norm(x); }, py::arg("x"));
  m.def("combine", &combine, py::arg("a"), py::arg("x"), py::arg("b"), py::arg("y"));

  // sets
  py::class_<ConvexSet>(m, "ConvexSet")
      .def_static("whole_space", &ConvexSet::whole_space, py::arg("dim"))
      .def_static("box", &ConvexSet::box, py::arg("lower"), py::arg("upper"))
      .def_static("ball", &ConvexSet::ball, py::arg("center"), py::arg("radius"))
      .def_static("halfspace", &ConvexSet::halfspace, py::arg("normal"), py::arg("offset"))
      .def_static("hyperplane", &ConvexSet::hyperplane, py::arg("normal"), py::arg("offset"))
      .def_static("simplex", &ConvexSet::simplex, py::arg("dim"), py::arg("scale"))
      .def_static("intersection", &ConvexSet::intersection, py::arg("members"),
                  py::arg("witness"))
      .def("project", &ConvexSet::project, py::arg("x"))
      .def("contains", &ConvexSet::contains, py::arg("x"), py::arg("eps") = kEpsEq)
      .def("any_point", &ConvexSet::any_point)
      .def_property_readonly("dim", &ConvexSet::dim)
      .def_property_readonly("kind", &ConvexSet::kind)
      .def("__repr__",
           [](const ConvexSet& c) { return "<ConvexSet " + c.kind() + ">"; });

  // mappings
  py::class_<PointMapping>(m, "PointMapping")
      .def_static("identity", &PointMapping::identity)
      .def_static("constant", &PointMapping::constant, py::arg("target"))
      .def_static("scale", &PointMapping::scale, py::arg("factor"), py::arg("center"))
      .def_static("project_onto", &PointMapping::project_onto, py::arg("set"))
      .def_static("averaged_composition", &PointMapping::averaged_composition,
                  py::arg("stages"))
      .def("apply", &PointMapping::apply, py::arg("x"))
      .def_property_readonly("certified_nonexpansive", &PointMapping::certified_nonexpansive)
      .def_property_readonly("kind", &PointMapping::kind)
      .def("__repr__",
           [](const PointMapping& t) { return "<PointMapping " + t.kind() + ">"; });

  // operators
  py::class_<IsmOperator>(m, "IsmOperator")
      .def_static("zero", &IsmOperator::zero, py::arg("dim"))
      .def_static(
          "affine",
          [](const std::vector<Vec>& rows, const Vec& shift) {
            return IsmOperator::affine(Matrix::from_rows(rows), shift);
          },
          py::arg("matrix"), py::arg("shift"))
      .def_static(
          "gradient_quadratic",
          [](const std::vector<Vec>& rows, const Vec& c) {
            return IsmOperator::gradient_quadratic(Matrix::from_rows(rows), c);
          },
          py::arg("matrix"), py::arg("linear"))
      .def("apply", &IsmOperator::apply, py::arg("x"))
      .def_property_readonly("alpha", &IsmOperator::alpha)
      .def_property_readonly("lipschitz", &IsmOperator::lipschitz)
      .def_property_readonly("alpha_lipschitz", &IsmOperator::alpha_lipschitz)
      .def_property_readonly("kind", &IsmOperator::kind)
      .def("__repr__",
           [](const IsmOperator& a) { return "<IsmOperator " + a.kind() + ">"; });

  m.def(
      "ism_from_lipschitz",
      [](PointMapping t, double l, std::size_t dim, std::uint64_t seed) {
        Rng rng(seed);
        return ism_from_lipschitz(std::move(t), l, dim, rng);
      },
      py::arg("mapping"), py::arg("l"), py::arg("dim"), py::arg("seed") = kCertSeed);
  m.def(
      "ism_from_pseudocontraction",
      [](PointMapping s, double k, std::size_t dim, std::uint64_t seed) {
        Rng rng(seed);
        return ism_from_pseudocontraction(std::move(s), k, dim, rng);
      },
      py::arg("mapping"), py::arg("k"), py::arg("dim"), py::arg("seed") = kCertSeed);
  m.def(
      "estimate_ism_constant",
      [](const IsmOperator& a, std::uint64_t seed, int pairs) {
        Rng rng(seed);
        return estimate_ism_constant(a, rng, pairs);
      },
      py::arg("operator"), py::arg("seed") = kCertSeed, py::arg("pairs") = kCertPairs);
  m.def(
      "verify_nonexpansive",
      [](const PointMapping& t, std::size_t dim, std::uint64_t seed, int pairs) {
        Rng rng(seed);
        return verify_nonexpansive(t, dim, rng, pairs);
      },
      py::arg("mapping"), py::arg("dim"), py::arg("seed") = kCertSeed,
      py::arg("pairs") = kCertPairs);

  // W-mapping
  py::class_<WMapping>(m, "WMapping")
      .def(py::init([](std::vector<PointMapping> family, std::vector<double> mu,
                       const std::string& tail, int depth_cap, std::size_t dim) {
             WMapping::Tail t = WMapping::Tail::RepeatLast;
             if (tail == "identity") t = WMapping::Tail::Identity;
             else if (tail == "none") t = WMapping::Tail::None;
             else if (tail != "repeat_last")
               throw ConfigError("unknown tail rule '" + tail + "'");
             return WMapping::certified(std::move(family), std::move(mu), t, depth_cap, dim);
           }),
           py::arg("family"), py::arg("mu"), py::arg("tail") = "repeat_last",
           py::arg("depth_cap") = 64, py::arg("dim") = 2)
      .def("apply", &WMapping::apply, py::arg("n"), py::arg("x"))
      .def("apply_limit", &WMapping::apply_limit, py::arg("x"), py::arg("tol"))
      .def("as_mapping", &WMapping::as_mapping, py::arg("depth"))
      .def_property_readonly("prefix_len", &WMapping::prefix_len)
      .def_readonly("depth_cap", &WMapping::depth_cap);

  // schedules and schemes
  py::class_<ParamSchedule>(m, "ParamSchedule")
      .def_static("constant", &ParamSchedule::constant, py::arg("value"))
      .def_static("periodic", &ParamSchedule::periodic, py::arg("values"))
      .def_static("harmonic", &ParamSchedule::harmonic, py::arg("lo"), py::arg("hi"))
      .def("at", &ParamSchedule::at, py::arg("n"))
      .def_property_readonly("lo", &ParamSchedule::lo)
      .def_property_readonly("hi", &ParamSchedule::hi);

  py::class_<SchemeSpec>(m, "SchemeSpec")
      .def(py::init([](const std::string& kind) {
             SchemeSpec spec;
             spec.kind = scheme_from_name(kind);
             return spec;
           }),
           py::arg("kind"))
      .def_readwrite("lambda_", &SchemeSpec::lambda)
      .def_readwrite("alpha", &SchemeSpec::alpha)
      .def_readwrite("anchor", &SchemeSpec::anchor)
      .def_readwrite("beta", &SchemeSpec::beta)
      .def_readwrite("gamma", &SchemeSpec::gamma)
      .def_readwrite("amended", &SchemeSpec::yao_amended)
      .def_property_readonly("name", &SchemeSpec::name);

  // problems
  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readonly("c", &ProblemInstance::c)
      .def_readonly("a", &ProblemInstance::a)
      .def_readonly("w", &ProblemInstance::w)
      .def_readonly("oracle_hint", &ProblemInstance::oracle_hint)
      .def_readonly("label", &ProblemInstance::label)
      .def("__repr__",
           [](const ProblemInstance& p) { return "<ProblemInstance " + p.label + ">"; });

  m.def(
      "gen_quadratic_box",
      [](std::size_t d, std::uint64_t seed) {
        Rng rng(seed);
        return gen_quadratic_box(d, rng);
      },
      py::arg("d"), py::arg("seed"));
  m.def(
      "gen_common_fixed_family",
      [](std::size_t d, std::size_t m_, std::uint64_t seed) {
        Rng rng(seed);
        return gen_common_fixed_family(d, m_, rng);
      },
      py::arg("d"), py::arg("m"), py::arg("seed"));
  m.def(
      "gen_pseudocontractive",
      [](std::size_t d, double k, std::uint64_t seed) {
        Rng rng(seed);
        return gen_pseudocontractive(d, k, rng);
      },
      py::arg("d"), py::arg("k"), py::arg("seed"));
  m.def(
      "gen_contraction_speed",
      [](std::uint64_t seed) {
        Rng rng(seed);
        const auto inst = gen_contraction_speed(rng);
        return py::make_tuple(inst.t, inst.fixed_point, inst.sigma);
      },
      py::arg("seed"));

  // diagnostics
  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("n", &TraceRecord::n)
      .def_readonly("x", &TraceRecord::x)
      .def_readonly("residual_vi", &TraceRecord::residual_vi)
      .def_readonly("residual_fix", &TraceRecord::residual_fix)
      .def_readonly("dist_to_oracle", &TraceRecord::dist_to_oracle)
      .def_readonly("step_time_ns", &TraceRecord::step_time_ns);

  py::class_<Trace>(m, "Trace")
      .def_readonly("records", &Trace::records)
      .def_readonly("scheme", &Trace::scheme)
      .def_readonly("error", &Trace::error)
      .def_readonly("x0_projected", &Trace::x0_projected)
      .def_readonly("final_coupling", &Trace::final_coupling)
      .def_readonly("wall_ms", &Trace::wall_ms)
      .def_property_readonly("iterations", &Trace::iterations)
      .def_property_readonly("terminated_by",
                             [](const Trace& t) { return termination_name(t.terminated_by); })
      .def("to_csv", &trace_to_csv);

  m.def("residual_vi", &residual_vi, py::arg("set"), py::arg("operator"), py::arg("x"),
        py::arg("lam"));
  m.def("residual_fix", &residual_fix, py::arg("w"), py::arg("x"), py::arg("depth"));
  m.def("oracle_solve", &oracle_solve, py::arg("set"), py::arg("operator"), py::arg("w"));
  m.def(
      "fejer_check",
      [](const Trace& trace, const Vec& z, double slack) {
        const FejerReport r = fejer_check(trace, z, slack);
        return py::make_tuple(r.pass, r.max_violation, r.deltas);
      },
      py::arg("trace"), py::arg("z"), py::arg("slack") = 1e-9);

  m.def("run_scheme", &run_scheme_py, py::arg("spec"), py::arg("problem"), py::arg("x0"),
        py::arg("residual") = "combined", py::arg("tol") = 1e-8, py::arg("max_iter") = 100000,
        py::arg("use_oracle") = true);

  // experiment harness
  m.def(
      "run_experiment",
      [](const std::string& path, std::optional<std::string> output_dir,
         std::optional<std::uint64_t> seed, bool quiet) {
        CliOverrides over;
        over.output_dir = std::move(output_dir);
        over.seed = seed;
        over.quiet = quiet;
        return run_experiment(path, over);
      },
      py::arg("config_path"), py::arg("output_dir") = std::nullopt,
      py::arg("seed") = std::nullopt, py::arg("quiet") = true);
  m.def(
      "validate_config",
      [](const std::string& path) {
        const ValidationReport r = validate_config(path);
        return py::make_tuple(r.ok, r.lines);
      },
      py::arg("config_path"));
}

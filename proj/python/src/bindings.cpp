#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "cmvlab/cmv_core.hpp"
#include "cmvlab/errors.hpp"
#include "cmvlab/localization.hpp"
#include "cmvlab/lyapunov_ldt.hpp"
#include "cmvlab/spectra.hpp"
#include "cmvlab/verify.hpp"

namespace py = pybind11;
using namespace cmvlab;

namespace {

VerblunskyField field_for(const std::string& dist, long a, long b, std::uint64_t seed) {
    return sample_field(Distribution::parse(dist), {a, b}, std::nullopt, std::nullopt, SeedPlan{seed, 0});
}

Boundary boundary_for(const std::string& decoration) {
    return decorate(parse_decoration(decoration), Complex(-1.0, 0.0), Complex(1.0, 0.0));
}

py::dict report_dict(const VerifyReport& r) {
    py::dict d;
    d["check_name"] = r.check_name;
    d["trials"] = r.trials;
    d["pass_count"] = r.pass_count;
    d["failures"] = r.failures;
    d["flagged"] = r.flagged;
    d["worst_error"] = r.worst_error;
    d["worst_seed"] = r.worst_seed;
    d["tolerance"] = r.tolerance;
    d["negative_control"] = r.negative_control ? py::cast(*r.negative_control) : py::none();
    return d;
}

py::dict proportion_dict(const Proportion& p) {
    py::dict d;
    d["p"] = p.p;
    d["lo"] = p.lo;
    d["hi"] = p.hi;
    d["successes"] = p.successes;
    d["trials"] = p.trials;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Random CMV matrix toolkit";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_ArithmeticError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

    m.def(
        "coefficients",
        [](const std::string& dist, long a, long b, std::uint64_t seed) {
            const auto f = field_for(dist, a, b, seed);
            std::vector<Complex> out;
            for (long k = a; k <= b; ++k) out.push_back(f.alpha(k));
            return out;
        },
        py::arg("dist"), py::arg("a"), py::arg("b"), py::arg("seed") = 0, "Sampled α_a … α_b.");

    m.def(
        "cmv_matrix",
        [](const std::string& dist, long a, long b, std::uint64_t seed, const std::string& boundary,
           const std::string& which) -> Eigen::MatrixXcd {
            const auto f = field_for(dist, a, b, seed);
            const CmvBlock blk = build_block(f, {a, b}, boundary_for(boundary));
            if (which == "E") return blk.E.dense();
            if (which == "L") return blk.L.dense();
            if (which == "M") return blk.M.dense();
            throw ParameterError("which must be E, L or M");
        },
        py::arg("dist"), py::arg("a"), py::arg("b"), py::arg("seed") = 0, py::arg("boundary") = "both",
        py::arg("which") = "E");

    m.def(
        "eigenvalues",
        [](const std::string& dist, long a, long b, std::uint64_t seed) -> Eigen::VectorXcd {
            const auto f = field_for(dist, a, b, seed);
            return eig_unitary(build_block(f, {a, b}, boundary_for("both"))).values;
        },
        py::arg("dist"), py::arg("a"), py::arg("b"), py::arg("seed") = 0);

    m.def(
        "det_P",
        [](const std::string& dist, long a, long b, std::uint64_t seed, const std::string& decoration, Complex z) {
            const auto f = field_for(dist, a, b, seed);
            return det_P(f, {a, b}, boundary_for(decoration), z).script_P.value();
        },
        py::arg("dist"), py::arg("a"), py::arg("b"), py::arg("seed") = 0, py::arg("decoration") = "both",
        py::arg("z") = Complex(1.0));

    m.def(
        "lyapunov",
        [](const std::string& dist, double theta, long n, long samples, std::uint64_t seed, int threads) {
            const auto e = lyapunov_estimate(Distribution::parse(dist), std::polar(1.0, theta), n, samples, seed, threads);
            py::dict d;
            d["gamma_hat"] = e.gamma_hat;
            d["std_err"] = e.std_err;
            d["possible_exceptional"] = e.possible_exceptional;
            return d;
        },
        py::arg("dist"), py::arg("theta"), py::arg("n") = 10000, py::arg("samples") = 200, py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "ldt_tail",
        [](const std::string& dist, double theta, double epsilon, long n, const std::string& decoration, long samples,
           double gamma_ref, std::uint64_t seed, int threads) {
            const auto t = ldt_tail(Distribution::parse(dist), std::polar(1.0, theta), epsilon, {0, n - 1},
                                    parse_decoration(decoration), samples, gamma_ref, seed, threads);
            return proportion_dict(t.tail);
        },
        py::arg("dist"), py::arg("theta"), py::arg("epsilon"), py::arg("n"), py::arg("decoration"), py::arg("samples"),
        py::arg("gamma_ref"), py::arg("seed") = 0, py::arg("threads") = 1);

    m.def(
        "resonance",
        [](const std::string& dist, long n, double delta, long samples, std::uint64_t seed, int threads) {
            const auto r = resonance_experiment(Distribution::parse(dist), 0, n, delta, samples, seed, threads);
            py::dict d = proportion_dict(r.tail);
            d["threshold"] = r.threshold;
            d["median_log_distance"] = r.median_log_distance;
            return d;
        },
        py::arg("dist"), py::arg("n"), py::arg("delta"), py::arg("samples"), py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "verify_suite",
        [](long trials, std::uint64_t seed, const std::string& suite, int threads) {
            std::vector<VerifyReport> reps;
            if (suite == "corrections") {
                reps = verify_suite(trials, seed, threads);
            } else if (suite == "identities") {
                reps = algebraic_suite(trials, seed, threads);
            } else {
                throw ParameterError("suite must be corrections or identities");
            }
            py::list out;
            for (const auto& r : reps) out.append(report_dict(r));
            return out;
        },
        py::arg("trials") = 100, py::arg("seed") = 0, py::arg("suite") = "corrections", py::arg("threads") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcbo/bo.hpp"
#include "pcbo/ci_tests.hpp"
#include "pcbo/error.hpp"
#include "pcbo/evaluation.hpp"
#include "pcbo/gbn_sim.hpp"
#include "pcbo/graph.hpp"
#include "pcbo/pc.hpp"

namespace py = pybind11;
using namespace pcbo;

namespace {

Theta make_theta(double alpha, const std::string& test) {
    Theta t = Theta::from_alpha(alpha, parse_test_kind(test));
    t.validate();
    return t;
}

py::list trace_to_list(const std::vector<TrialRecord>& trace) {
    py::list out;
    for (const auto& r : trace) {
        py::dict d;
        d["iteration"] = r.iteration;
        d["method"] = std::string(to_string(r.method));
        d["alpha"] = r.theta.alpha();
        d["test"] = std::string(to_string(r.theta.test));
        d["y"] = r.y;
        d["best_so_far"] = r.best_so_far;
        out.append(d);
    }
    return out;
}

// Python callables see (alpha, test) rather than the internal parameter struct.
Objective wrap(const py::function& f) {
    // by pointer: copies of the std::function may happen without the GIL
    const py::function* fn = &f;
    return [fn](const Theta& t) {
        py::gil_scoped_acquire gil;
        return (*fn)(t.alpha(), std::string(to_string(t.test))).cast<double>();
    };
}

}  // namespace

PYBIND11_MODULE(_pcbo, m) {
    m.attr("__version__") = PCBO_VERSION_STRING;

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);

    py::list names;
    for (TestKind t : kAllTests) names.append(std::string(to_string(t)));
    m.attr("tests") = py::tuple(names);

    py::class_<Pdag>(m, "Graph")
        .def(py::init([](int p, const std::vector<Edge>& directed, const std::vector<Edge>& undirected) {
                 Pdag g(p);
                 for (auto [a, b] : directed) g.set_directed(a, b);
                 for (auto [a, b] : undirected) g.set_undirected(a, b);
                 return g;
             }),
             py::arg("p"), py::arg("directed") = std::vector<Edge>{}, py::arg("undirected") = std::vector<Edge>{})
        .def_property_readonly("p", &Pdag::size)
        .def_property_readonly("directed_edges", &Pdag::directed_edges)
        .def_property_readonly("undirected_edges", &Pdag::undirected_edges)
        .def("adjacent", &Pdag::adjacent)
        .def("__len__", &Pdag::num_edges)
        .def("__eq__", [](const Pdag& a, const Pdag& b) { return a == b; })
        .def("__str__", &format_graph)
        .def("__repr__", [](const Pdag& g) {
            return "Graph(p=" + std::to_string(g.size()) + ", edges=" + std::to_string(g.num_edges()) + ")";
        });

    m.def(
        "dag_to_cpdag", [](int p, const std::vector<Edge>& edges) { return dag_to_cpdag(Dag(p, edges)).graph(); },
        py::arg("p"), py::arg("edges"));

    m.def(
        "simulate",
        [](int p, double n, int N, std::uint64_t seed, double weight_lo, double weight_hi, double noise_var) {
            RngStream rng(seed);
            const Gbn g = sample_weights(sample_dag(p, n, rng), rng, weight_lo, weight_hi, noise_var);
            const Dataset d = sample_data(g, N, rng);
            py::dict out;
            out["data"] = d.values();
            out["edges"] = g.dag().edges();
            out["beta"] = g.beta();
            out["cpdag"] = dag_to_cpdag(g.dag()).graph();
            return out;
        },
        py::arg("p"), py::arg("n"), py::arg("N"), py::arg("seed"), py::arg("weight_lo") = 0.1,
        py::arg("weight_hi") = 1.0, py::arg("noise_var") = 1.0,
        "Sample a random Gaussian network and N rows from it.");

    m.def(
        "pc_stable",
        [](const Eigen::MatrixXd& data, double alpha, const std::string& test, std::optional<int> max_cond) {
            PcOptions opt;
            opt.max_cond = max_cond;
            const Dataset d(data);
            py::gil_scoped_release release;
            return pc_stable(d, make_theta(alpha, test), opt).graph();
        },
        py::arg("data"), py::arg("alpha") = 0.01, py::arg("test") = "zf", py::arg("max_cond") = std::nullopt);

    m.def(
        "ci_test",
        [](const Eigen::MatrixXd& data, int i, int j, const std::vector<int>& cond, double alpha,
           const std::string& test) {
            const Dataset d(data);
            if (i < 0 || j < 0 || i >= d.p() || j >= d.p() || i == j) throw InvalidInput("ci_test: bad variable index");
            const TestResult r = ci_test(d, i, j, cond, make_theta(alpha, test));
            py::dict out;
            out["statistic"] = r.statistic;
            out["p_value"] = r.p_value;
            out["independent"] = r.independent;
            return out;
        },
        py::arg("data"), py::arg("i"), py::arg("j"), py::arg("cond") = std::vector<int>{}, py::arg("alpha") = 0.01,
        py::arg("test") = "zf");

    m.def(
        "shd", [](const Pdag& a, const Pdag& b) { return shd(a, b); }, py::arg("a"), py::arg("b"));
    m.def(
        "normalized_shd", [](const Pdag& a, const Pdag& b) { return normalized_shd(Cpdag(a), Cpdag(b)); },
        py::arg("a"), py::arg("b"));

    m.def("expert_criterion", [] {
        const Theta t = expert_criterion();
        return py::make_tuple(t.alpha(), std::string(to_string(t.test)));
    });

    m.def(
        "run_bo",
        [](const py::function& f, int budget, std::uint64_t seed) {
            RngStream rng(seed);
            const Objective obj = wrap(f);
            std::vector<TrialRecord> trace;
            {
                py::gil_scoped_release release;
                trace = run_bo(obj, budget, rng);
            }
            return trace_to_list(trace);
        },
        py::arg("objective"), py::arg("budget"), py::arg("seed"),
        "Minimize objective(alpha, test) with Bayesian optimization.");

    m.def(
        "run_random_search",
        [](const py::function& f, int budget, std::uint64_t seed) {
            RngStream rng(seed);
            return trace_to_list(run_random_search(wrap(f), budget, rng));
        },
        py::arg("objective"), py::arg("budget"), py::arg("seed"));
}

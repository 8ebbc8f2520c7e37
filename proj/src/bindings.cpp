#include "viralcm/experiment.hpp"
#include "viralcm/exploration.hpp"
#include "viralcm/graph.hpp"
#include "viralcm/oracle.hpp"
#include "viralcm/propagation.hpp"
#include "viralcm/theory.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace viralcm;

PYBIND11_MODULE(_core, m) {
    m.doc() = "influence propagation on the enhanced configuration model";

    py::register_exception<NotSupercritical>(m, "NotSupercritical");
    py::register_exception<NoSignChange>(m, "NoSignChange");
    py::register_exception<TooLarge>(m, "TooLarge");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<MomentSummary>(m, "MomentSummary")
        .def_readonly("lambda_r", &MomentSummary::lambda_r)
        .def_readonly("lambda_t", &MomentSummary::lambda_t)
        .def_readonly("lambda_", &MomentSummary::lambda)
        .def_readonly("e_dt_d", &MomentSummary::e_dt_d)
        .def_readonly("e_d2", &MomentSummary::e_d2)
        .def_readonly("p_d1", &MomentSummary::p_d1);

    py::enum_<Criticality>(m, "Criticality")
        .value("Supercritical", Criticality::Supercritical)
        .value("SubOrCritical", Criticality::SubOrCritical);

    py::class_<CriticalityReport>(m, "CriticalityReport")
        .def_readonly("verdict", &CriticalityReport::verdict)
        .def_readonly("margin", &CriticalityReport::margin)
        .def_readonly("near_critical", &CriticalityReport::near_critical);

    py::class_<JointDegreeDistribution>(m, "JointDegreeDistribution")
        .def_static(
            "from_table",
            [](const std::vector<std::tuple<int, int, double>>& rows) {
                std::vector<DegreeCell> cells;
                for (const auto& [k, l, p] : rows) cells.push_back({k, l, p});
                return JointDegreeDistribution::from_table(cells);
            },
            py::arg("rows"))
        .def_static("make_thinned_poisson", &JointDegreeDistribution::make_thinned_poisson,
                    py::arg("mu"), py::arg("q"), py::arg("cutoff"))
        .def("moments", [](const JointDegreeDistribution& d) { return d.moments(); })
        .def("pmf", &JointDegreeDistribution::pmf)
        .def("pgf_g", &JointDegreeDistribution::pgf_g)
        .def("h_forward", &JointDegreeDistribution::h_forward)
        .def("H_forward", &JointDegreeDistribution::H_forward)
        .def("g_bar", &JointDegreeDistribution::g_bar)
        .def("h_bar", &JointDegreeDistribution::h_bar)
        .def("H_bar", &JointDegreeDistribution::H_bar)
        .def("size_biased", &JointDegreeDistribution::size_biased)
        .def("criticality", &JointDegreeDistribution::criticality)
        .def("support_bound", &JointDegreeDistribution::support_bound)
        .def("cells", [](const JointDegreeDistribution& d) {
            std::vector<std::tuple<int, int, double>> rows;
            for (const auto& c : d.cells()) rows.emplace_back(c.k, c.l, c.p);
            return rows;
        });

    py::class_<TheoryPrediction>(m, "TheoryPrediction")
        .def_readonly("xi", &TheoryPrediction::xi)
        .def_readonly("xi_bar", &TheoryPrediction::xi_bar)
        .def_readonly("tau", &TheoryPrediction::tau)
        .def_readonly("tau_bar", &TheoryPrediction::tau_bar)
        .def_readonly("influenced_fraction", &TheoryPrediction::influenced_fraction)
        .def_readonly("pioneer_fraction", &TheoryPrediction::pioneer_fraction)
        .def_readonly("p_ext_tilde", &TheoryPrediction::p_ext_tilde)
        .def_readonly("p_ext", &TheoryPrediction::p_ext);

    m.def("solve_xi", &solve_xi, py::arg("dist"), py::arg("tol") = 1e-10);
    m.def("solve_xi_bar", &solve_xi_bar, py::arg("dist"), py::arg("tol") = 1e-10);
    m.def("branching_extinction", &branching_extinction, py::arg("dist"), py::arg("tol") = 1e-10);
    m.def("predict", &predict, py::arg("dist"), py::arg("tol") = 1e-10);

    py::class_<DegreeSequence>(m, "DegreeSequence")
        .def(py::init([](const std::vector<std::pair<int, int>>& degrees) {
                 DegreeSequence s;
                 for (const auto& [k, l] : degrees) {
                     s.d_r.push_back(k);
                     s.d_t.push_back(l);
                 }
                 return s;
             }),
             py::arg("degrees"))
        .def_readonly("d_r", &DegreeSequence::d_r)
        .def_readonly("d_t", &DegreeSequence::d_t)
        .def("n", &DegreeSequence::n)
        .def("total_half_edges", &DegreeSequence::total_half_edges)
        .def("d_max", &DegreeSequence::d_max);

    m.def("sample_degree_sequence", &sample_degree_sequence, py::arg("dist"), py::arg("n"),
          py::arg("seed"));

    py::class_<Digraph>(m, "Digraph")
        .def_readonly("n", &Digraph::n)
        .def("arc_count", &Digraph::arc_count)
        .def("out_degree",
             [](const Digraph& g, VertexId v) { return g.offsets[v + 1] - g.offsets[v]; });

    py::class_<MultigraphStats>(m, "MultigraphStats")
        .def_readonly("self_loops", &MultigraphStats::self_loops)
        .def_readonly("multi_edges", &MultigraphStats::multi_edges)
        .def_readonly("d_max", &MultigraphStats::d_max);

    py::class_<EnhancedMultigraph>(m, "EnhancedMultigraph")
        .def_readonly("matching", &EnhancedMultigraph::matching)
        .def("influence_digraph", &EnhancedMultigraph::influence_digraph)
        .def("stats", &EnhancedMultigraph::stats);

    m.def("uniform_matching", &uniform_matching, py::arg("seq"), py::arg("seed"));

    py::class_<ComponentReport>(m, "ComponentReport")
        .def_readonly("epsilon", &ComponentReport::epsilon)
        .def_readonly("n", &ComponentReport::n)
        .def_readonly("core_size", &ComponentReport::core_size)
        .def_readonly("in_size", &ComponentReport::in_size)
        .def_readonly("out_size", &ComponentReport::out_size)
        .def_readonly("c_star_size", &ComponentReport::c_star_size)
        .def_readonly("c_bar_star_size", &ComponentReport::c_bar_star_size)
        .def_readonly("count_small", &ComponentReport::count_small)
        .def_readonly("count_large", &ComponentReport::count_large)
        .def_readonly("count_small_bar", &ComponentReport::count_small_bar)
        .def_readonly("count_large_bar", &ComponentReport::count_large_bar)
        .def_readonly("sample_violations", &ComponentReport::sample_violations)
        .def_readonly("sample_size", &ComponentReport::sample_size)
        .def_readonly("has_big_component", &ComponentReport::has_big_component)
        .def_readonly("max_sampled_forward_frac", &ComponentReport::max_sampled_forward_frac);

    py::class_<DualityReport>(m, "DualityReport")
        .def_readonly("epsilon", &DualityReport::epsilon)
        .def_readonly("theorem5_lhs", &DualityReport::theorem5_lhs)
        .def_readonly("corollary6_lhs", &DualityReport::corollary6_lhs)
        .def_readonly("has_big_component", &DualityReport::has_big_component);

    m.def("forward_set", &forward_set, py::arg("digraph"), py::arg("x"));
    m.def("backward_set", &backward_set, py::arg("digraph"), py::arg("y"));
    m.def("classify", &classify, py::arg("digraph"), py::arg("epsilon"), py::arg("sample_size"),
          py::arg("seed"));
    m.def("duality_stats", &duality_stats, py::arg("digraph"), py::arg("epsilon"),
          py::arg("report"));
    m.def("tautology_check", &tautology_check, py::arg("digraph"), py::arg("pairs"),
          py::arg("seed"));
    m.def("uniqueness_probe", &uniqueness_probe, py::arg("digraph"), py::arg("report"),
          py::arg("pairs"), py::arg("seed"));

    py::enum_<Direction>(m, "Direction")
        .value("Forward", Direction::Forward)
        .value("Reverse", Direction::Reverse);

    py::class_<ExplorationTrace>(m, "ExplorationTrace")
        .def_readonly("direction", &ExplorationTrace::direction)
        .def_readonly("n", &ExplorationTrace::n)
        .def_readonly("two_m", &ExplorationTrace::two_m)
        .def_readonly("inprocess_pairs", &ExplorationTrace::inprocess_pairs)
        .def_readonly("posthoc_pairs", &ExplorationTrace::posthoc_pairs)
        .def_readonly("final_living", &ExplorationTrace::final_living)
        .def_readonly("end_time", &ExplorationTrace::end_time)
        .def_readonly("degenerate_no_transmitters",
                      &ExplorationTrace::degenerate_no_transmitters)
        .def("event_count", [](const ExplorationTrace& t) { return t.events.size(); })
        .def("c1_count", [](const ExplorationTrace& t) { return t.c1_times().size(); })
        .def("times",
             [](const ExplorationTrace& t) {
                 std::vector<double> out;
                 for (const auto& e : t.events) out.push_back(e.t);
                 return out;
             })
        .def("living_series", [](const ExplorationTrace& t) {
            std::vector<std::uint64_t> out;
            for (const auto& e : t.events) out.push_back(e.living);
            return out;
        });

    py::class_<DeviationPair>(m, "DeviationPair")
        .def_readonly("sup", &DeviationPair::sup)
        .def_readonly("window", &DeviationPair::window);

    py::class_<FluidDeviation>(m, "FluidDeviation")
        .def_readonly("living", &FluidDeviation::living)
        .def_readonly("receivers", &FluidDeviation::receivers)
        .def_readonly("sleeping_half", &FluidDeviation::sleeping_half)
        .def_readonly("active_half", &FluidDeviation::active_half)
        .def_readonly("watch_max", &FluidDeviation::watch_max);

    py::class_<BigWindow>(m, "BigWindow")
        .def_readonly("t1", &BigWindow::t1)
        .def_readonly("t2", &BigWindow::t2)
        .def_readonly("c_double_prime_size", &BigWindow::c_double_prime_size);

    m.def(
        "run_forward",
        [](const DegreeSequence& seq, std::uint64_t seed) { return run_forward(seq, seed); },
        py::arg("seq"), py::arg("seed"));
    m.def(
        "run_reverse",
        [](const DegreeSequence& seq, std::uint64_t seed) { return run_reverse(seq, seed); },
        py::arg("seq"), py::arg("seed"));
    m.def("fluid_deviation", &fluid_deviation, py::arg("trace"), py::arg("dist"),
          py::arg("prediction"));
    m.def("big_window", &big_window, py::arg("trace"), py::arg("prediction"));

    py::class_<ExactSummary>(m, "ExactSummary")
        .def_readonly("n", &ExactSummary::n)
        .def_readonly("matching_count", &ExactSummary::matching_count)
        .def_readonly("expected_forward_size", &ExactSummary::expected_forward_size)
        .def_readonly("expected_backward_size", &ExactSummary::expected_backward_size)
        .def("p_reach", &ExactSummary::p_reach);

    m.def("enumerate_matchings", &enumerate, py::arg("seq"));
    m.def("gw_survival", &gw_survival, py::arg("dist"), py::arg("max_generations"),
          py::arg("reps"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto cfg = ExperimentConfig::from_json_text(config_json);
            const auto report = run(cfg);
            emit(report, cfg);
            return report.to_json().dump(2);
        },
        py::arg("config_json"),
        "Run a pipeline from a JSON config string; returns the report as JSON text.");
}

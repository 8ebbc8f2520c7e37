import json
import math

import pytest

import viralcm


@pytest.fixture(scope="module")
def family():
    return viralcm.JointDegreeDistribution.make_thinned_poisson(4.0, 0.5, 30)


def test_moments_and_generating_functions(family):
    m = family.moments()
    assert abs(m.lambda_ - 4.0) < 1e-6
    assert abs(m.lambda_t - 2.0) < 1e-6
    assert abs(m.e_dt_d - 10.0) < 1e-6
    assert abs(family.pgf_g(1.0, 1.0) - 1.0) < 1e-12
    assert abs(family.pgf_g(0.5, 0.5) - math.exp(-2.0)) < 1e-9
    assert abs(family.H_forward(1.0)) < 1e-12
    assert abs(family.H_bar(0.5) - 2 * (0.5 - math.exp(-1.0))) < 1e-9


def test_table_and_errors():
    dist = viralcm.JointDegreeDistribution.from_table([(1, 0, 0.5), (0, 1, 0.5)])
    assert dist.criticality().verdict == viralcm.Criticality.SubOrCritical
    with pytest.raises(viralcm.NotSupercritical):
        viralcm.solve_xi(dist)
    with pytest.raises(ValueError):
        viralcm.JointDegreeDistribution.make_thinned_poisson(4.0, 0.5, 3)


def test_theory_prediction(family):
    pred = viralcm.predict(family)
    assert abs(pred.xi - 0.601594) < 1e-4
    assert abs(pred.xi_bar - 0.203188) < 1e-4
    assert abs(pred.influenced_fraction - 0.796812) < 1e-4
    assert abs(pred.p_ext_tilde - pred.xi_bar) < 1e-8


def test_graph_and_classification(family):
    seq = viralcm.sample_degree_sequence(family, 5000, 12)
    graph = viralcm.uniform_matching(seq, 13)
    digraph = graph.influence_digraph()
    assert digraph.n == 5000
    report = viralcm.classify(digraph, 0.05, 50, 14)
    assert report.has_big_component
    frac = report.c_star_size / 5000.0
    assert abs(frac - 0.7968) < 0.05
    dual = viralcm.duality_stats(digraph, 0.05, report)
    assert dual.theorem5_lhs <= 0.05
    assert viralcm.tautology_check(digraph, 200, 15) == 0
    cx = viralcm.forward_set(digraph, 0)
    assert 0 in cx


def test_exploration(family):
    seq = viralcm.sample_degree_sequence(family, 20000, 21)
    trace = viralcm.run_forward(seq, 22)
    assert trace.final_living == 0
    assert trace.inprocess_pairs + trace.posthoc_pairs == seq.total_half_edges() // 2
    pred = viralcm.predict(family)
    dev = viralcm.fluid_deviation(trace, family, pred)
    assert dev.living.sup < 0.05
    window = viralcm.big_window(trace, pred)
    assert abs(window.t2 - pred.tau) < 0.2


def test_oracle():
    seq = viralcm.DegreeSequence([(0, 2), (1, 0), (1, 0)])
    exact = viralcm.enumerate_matchings(seq)
    assert exact.matching_count == 3
    assert abs(exact.expected_forward_size[0] - 7.0 / 3.0) < 1e-12
    with pytest.raises(viralcm.TooLarge):
        viralcm.enumerate_matchings(viralcm.DegreeSequence([(3, 3)] * 3))


def test_run_experiment_roundtrip(tmp_path):
    config = {
        "subcommand": "theory",
        "distribution": {"family": "thinned_poisson", "mu": 4, "q": 0.5, "cutoff": 30},
        "out_dir": str(tmp_path),
    }
    text = viralcm.run_experiment(json.dumps(config))
    report = json.loads(text)
    assert abs(report["theory"]["xi"] - 0.601594) < 1e-4
    assert (tmp_path / "report.json").exists()
    on_disk = json.loads((tmp_path / "report.json").read_text())
    assert on_disk == report
    with pytest.raises(viralcm.ConfigError):
        viralcm.run_experiment("{bad json")

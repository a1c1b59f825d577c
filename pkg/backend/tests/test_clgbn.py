"""Tests for CLGBN fitting, likelihood, scores and prediction"""

import logging
import math
import warnings

import numpy as np
import pytest
from scipy import stats

from app.core.clgbn import (
    DataMatrix,
    LocalFitter,
    LocalScorer,
    aic,
    bic,
    check_clgbn_constraint,
    fit,
    load_fit,
    log_likelihood,
    penalty_per_param,
    predict_column,
    predict_node,
    row_log_densities,
    save_fit,
)
from app.core.exceptions import (
    ArgumentError,
    CollinearityError,
    EvaluationError,
    FitError,
    StructuralError,
)
from app.core.graph import Dag, make_nodes
from app.models.enums import ScoreCriterion
from tests.oracles import C, D, continuous_nodes, hybrid_dag, hybrid_sample, table_from


def linear_pair(n: int, seed: int, slope: float = 2.0, intercept: float = 0.0, noise: float = 1.0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    y = intercept + slope * x + noise * rng.normal(size=n)
    return table_from({"X": x, "Y": y}, {"X": C, "Y": C})


def xy_dag() -> Dag:
    return Dag(continuous_nodes("XY"), [("X", "Y")])


def random_gaussian_triple(n: int, seed: int):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n)
    b = rng.uniform(-2, 2) * a + rng.normal(size=n)
    c = rng.uniform(-2, 2) * b + rng.uniform(-1, 1) * a + rng.normal(size=n)
    return table_from({"A": a, "B": b, "C": c}, {"A": C, "B": C, "C": C})


def sparse_level_table():
    """G has a level observed once; Y regresses on G and X"""
    rng = np.random.default_rng(30)
    g = ["p"] * 20 + ["q"] * 20 + ["r"]
    x = rng.normal(size=41)
    y = 1.0 + 2.0 * x + rng.normal(size=41)
    return table_from({"G": g, "X": x, "Y": y}, {"G": D, "X": C, "Y": C})


SPARSE_DAG_EDGES = [("G", "Y"), ("X", "Y")]


# === Constraint
def test_clgbn_constraint_examples():
    nodes = make_nodes({"AREA": D, "Income": C})
    assert check_clgbn_constraint(Dag(nodes, [("AREA", "Income")]))
    assert not check_clgbn_constraint(Dag(nodes, [("Income", "AREA")]))
    assert check_clgbn_constraint(Dag(continuous_nodes("ABC"), [("C", "A"), ("A", "B")]))


def test_fit_rejects_continuous_to_discrete():
    t = table_from({"AREA": ["n", "s"] * 5, "Income": np.arange(10.0)}, {"AREA": D, "Income": C})
    with pytest.raises(StructuralError):
        fit(Dag(make_nodes(t.schema), [("Income", "AREA")]), t)


def test_fit_rejects_incomplete_table():
    t = table_from({"X": [1.0, np.nan, 3.0], "Y": [1.0, 2.0, 3.0]}, {"X": C, "Y": C})
    with pytest.raises(ArgumentError):
        fit(xy_dag(), t)


# === Parameter estimation
class TestFit:
    def test_cpt_relative_frequencies(self):
        t = table_from({"coin": ["h"] * 70 + ["t"] * 30}, {"coin": D})
        f = fit(Dag(make_nodes(t.schema)), t)
        np.testing.assert_allclose(f.locals["coin"].cpt, [[0.7, 0.3]])
        assert f.n_params == 1

    def test_slope_recovered(self):
        f = fit(xy_dag(), linear_pair(10_000, seed=1))
        assert f.locals["Y"].coefficients[0, 0] == pytest.approx(2.0, abs=0.05)

    def test_variance_is_mle(self):
        t = linear_pair(500, seed=2)
        f = fit(xy_dag(), t)
        x, y = t.values("X"), t.values("Y")
        slope, intercept = np.polyfit(x, y, 1)
        rss = np.sum((y - intercept - slope * x) ** 2)
        assert f.locals["Y"].variances[0] == pytest.approx(rss / 500)

    def test_hybrid_parameter_count(self):
        t = hybrid_sample(300, seed=3)
        nodes = make_nodes({"A": D, "X": C, "Y": C})
        f = fit(Dag(nodes, [("A", "Y"), ("X", "Y")]), t.drop(["B", "W", "Z"]))
        assert f.locals["Y"].n_params == 6
        assert f.n_params == 1 + 2 + 6

    def test_hybrid_fit_invariants(self):
        f = fit(hybrid_dag(), hybrid_sample(400, seed=4), workers=3)
        for local in f.locals.values():
            if hasattr(local, "cpt"):
                np.testing.assert_allclose(local.cpt.sum(axis=1), 1.0, atol=1e-9)
                assert (local.cpt >= 0).all()
            else:
                assert (local.variances > 0).all()
        assert math.isfinite(f.loglik)

    def test_laplace_smoothing(self):
        t = table_from({"A": ["x", "x", "y", "y"], "B": ["u", "u", "u", "v"]}, {"A": D, "B": D})
        f = fit(Dag(make_nodes(t.schema), [("A", "B")]), t, laplace=1.0)
        np.testing.assert_allclose(f.locals["B"].cpt, [[0.75, 0.25], [0.5, 0.5]])

    def test_zero_count_cells_fit_and_score_quietly(self):
        t = table_from({"A": ["x", "x", "y", "y"], "B": ["u", "u", "u", "v"]}, {"A": D, "B": D})
        dag = Dag(make_nodes(t.schema), [("A", "B")])
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            f = fit(dag, t)
            _, loglik = LocalFitter(DataMatrix(t)).fit("B", ["A"])
            score = LocalScorer(t).local_score("B", ["A"])
        assert f.locals["B"].cpt[0, 1] == 0.0
        assert loglik == pytest.approx(2 * math.log(0.5))
        assert math.isfinite(score)

    def test_empty_discrete_configuration(self):
        t = table_from({"A": ["x", "y", "z", "x"], "B": ["u", "v", "u", "v"]}, {"A": D, "B": D})
        subset = t.take([0, 1, 3])
        dag = Dag(make_nodes(t.schema), [("A", "B")])
        with pytest.raises(FitError, match="A=z"):
            fit(dag, subset)
        lenient = fit(dag, subset, strict=False)
        np.testing.assert_allclose(lenient.locals["B"].cpt[2], [1 / 3, 2 / 3])
        assert lenient.warnings

    def test_under_populated_gaussian_configuration(self):
        t = sparse_level_table()
        dag = Dag(make_nodes(t.schema), SPARSE_DAG_EDGES)
        with pytest.raises(FitError, match="G=r"):
            fit(dag, t)
        lenient = fit(dag, t, strict=False)
        assert list(lenient.locals["Y"].fitted) == [True, True, False]

    def test_collinear_parents_warn(self):
        rng = np.random.default_rng(5)
        x1 = rng.normal(size=50)
        t = table_from(
            {"X1": x1, "X2": 2.0 * x1, "Y": x1 + rng.normal(size=50)},
            {"X1": C, "X2": C, "Y": C},
        )
        dag = Dag(make_nodes(t.schema), [("X1", "Y"), ("X2", "Y")])
        f = fit(dag, t)
        assert any("collinear" in w for w in f.warnings)
        with pytest.raises(CollinearityError):
            LocalFitter(DataMatrix(t), collinearity="raise").fit("Y", ["X1", "X2"])

    def test_noiseless_variance_floored(self):
        t = linear_pair(50, seed=6, noise=0.0)
        f = fit(xy_dag(), t)
        assert f.locals["Y"].variances[0] >= 1e-12


# === Likelihood
def test_fair_coin_loglik():
    t = table_from({"coin": ["h", "t"]}, {"coin": D})
    f = fit(Dag(make_nodes(t.schema)), t)
    assert log_likelihood(f, t) == pytest.approx(2 * math.log(0.5))


def test_loglik_self_consistent():
    t = hybrid_sample(500, seed=7)
    f = fit(hybrid_dag(), t)
    assert log_likelihood(f, t) == pytest.approx(f.loglik, abs=1e-9)


def test_loglik_matches_mixture_density():
    t = hybrid_sample(300, seed=8).drop(["B", "W", "Z"])
    f = fit(Dag(make_nodes(t.schema), [("A", "X"), ("A", "Y"), ("X", "Y")]), t)
    px = f.locals["X"]
    py = f.locals["Y"]
    weights = f.locals["A"].cpt[0]
    codes, x, y = t.codes("A"), t.values("X"), t.values("Y")

    expected = np.empty(t.n_rows)
    for i in range(t.n_rows):
        a = codes[i]
        mu_x, var_x = px.intercepts[a], px.variances[a]
        b0, b1, var_y = py.intercepts[a], py.coefficients[a, 0], py.variances[a]
        mean = [mu_x, b0 + b1 * mu_x]
        cov = [[var_x, b1 * var_x], [b1 * var_x, b1 * b1 * var_x + var_y]]
        expected[i] = math.log(weights[a]) + stats.multivariate_normal(mean, cov).logpdf([x[i], y[i]])

    np.testing.assert_allclose(row_log_densities(f, t), expected, rtol=1e-9, atol=1e-9)


def test_unseen_level_rejected():
    t = table_from({"coin": ["h", "t"]}, {"coin": D})
    f = fit(Dag(make_nodes(t.schema)), t)
    with pytest.raises(EvaluationError):
        log_likelihood(f, table_from({"coin": ["h", "edge"]}, {"coin": D}))


def test_absent_unseen_level_is_fine():
    t = table_from({"coin": ["h", "t"]}, {"coin": D})
    f = fit(Dag(make_nodes(t.schema)), t)
    other = table_from({"coin": ["h", "edge", "t"]}, {"coin": D}).take([0, 2])
    assert log_likelihood(f, other) == pytest.approx(2 * math.log(0.5))


# === Scores
def test_penalty_per_param():
    assert penalty_per_param(ScoreCriterion.BIC, 100) == pytest.approx(math.log(100) / 2)
    assert penalty_per_param(ScoreCriterion.AIC, 100) == 1.0
    with pytest.raises(ArgumentError):
        penalty_per_param(ScoreCriterion.BIC, 0)


def test_empty_graph_bic_and_aic():
    t = hybrid_sample(200, seed=9)
    f = fit(Dag(make_nodes(t.schema)), t)
    assert bic(f) == pytest.approx(f.loglik - f.n_params / 2 * math.log(200))
    assert aic(f) == pytest.approx(f.loglik - f.n_params)
    assert f.score(ScoreCriterion.AIC) == aic(f)


def test_bic_decomposes():
    t = hybrid_sample(400, seed=10)
    d = hybrid_dag()
    f = fit(d, t)
    assert bic(f) == pytest.approx(sum(f.local_score(v) for v in d.names), rel=1e-12, abs=1e-9)
    assert LocalScorer(t).score(d) == pytest.approx(bic(f), rel=1e-12, abs=1e-9)
    assert LocalScorer(t, ScoreCriterion.AIC).score(d) == pytest.approx(aic(f), rel=1e-12, abs=1e-9)


def test_adding_parent_nests():
    t = hybrid_sample(300, seed=11)
    smaller = Dag(make_nodes(t.schema), [("A", "X"), ("X", "Y")])
    larger = smaller.copy()
    larger.add_edge("W", "Y")
    f1, f2 = fit(smaller, t), fit(larger, t)
    assert f2.loglik >= f1.loglik - 1e-9
    assert f2.n_params > f1.n_params


@pytest.mark.parametrize("seed", range(100))
def test_markov_equivalent_dags_score_equal(seed):
    t = random_gaussian_triple(200, seed)
    nodes = continuous_nodes("ABC")
    forward = Dag(nodes, [("A", "B"), ("B", "C")])
    backward = Dag(nodes, [("C", "B"), ("B", "A")])
    fork = Dag(nodes, [("B", "A"), ("B", "C")])
    scores = [bic(fit(d, t)) for d in (forward, backward, fork)]
    assert scores[1] == pytest.approx(scores[0], abs=1e-8)
    assert scores[2] == pytest.approx(scores[0], abs=1e-8)

    scorer = LocalScorer(t)
    assert scorer.score(forward) == pytest.approx(scores[0], abs=1e-9)


def test_under_populated_configuration_scores_minus_infinity():
    t = sparse_level_table()
    scorer = LocalScorer(t)
    assert scorer.local_score("Y", ["G", "X"]) == -math.inf
    assert math.isfinite(scorer.local_score("Y", ["X"]))


def test_local_scores_are_cached():
    scorer = LocalScorer(hybrid_sample(100, seed=12))
    first = scorer.local_score("Y", ["X", "W"])
    assert scorer.local_score("Y", ["W", "X"]) == first
    assert scorer.cache.stats.hits == 1
    assert len(scorer.cache) == 1
    assert scorer.cache.stats.hit_rate == pytest.approx(0.5)


# === Prediction
def test_predict_from_known_regression():
    t = linear_pair(40, seed=13, slope=2.0, intercept=1.0, noise=0.0)
    f = fit(xy_dag(), t)
    assert predict_node(f, "Y", {"X": 3.0}) == pytest.approx(7.0)


def test_predict_parentless_node_is_mean():
    t = linear_pair(40, seed=14)
    f = fit(xy_dag(), t)
    assert predict_node(f, "X", {}) == pytest.approx(t.values("X").mean())


def test_noiseless_predictions_reproduce_targets():
    t = hybrid_sample(200, seed=15, noise=0.0)
    f = fit(hybrid_dag(), t)
    for v in ("X", "Y", "Z"):
        predictions, fallback = predict_column(f, v, t)
        np.testing.assert_allclose(predictions, t.values(v), atol=1e-6)
        assert not fallback.any()


def test_training_mse_equals_residual_variance():
    t = hybrid_sample(300, seed=16)
    f = fit(hybrid_dag(), t)
    local = f.locals["Y"]
    predictions, _ = predict_column(f, "Y", t)
    codes = t.codes("B")
    for config in range(2):
        rows = codes == config
        mse = np.mean((predictions[rows] - t.values("Y")[rows]) ** 2)
        assert mse <= local.variances[config] + 1e-9


def test_predict_with_discrete_parent():
    t = hybrid_sample(300, seed=17)
    f = fit(hybrid_dag(), t)
    local = f.locals["Y"]
    row = {"B": "b1", "W": 0.5, "X": -1.0}
    expected = local.intercepts[1] + local.coefficients[1] @ np.array([0.5, -1.0])
    assert predict_node(f, "Y", row) == pytest.approx(expected)


def test_predict_unseen_configuration_uses_pooled(caplog):
    t = sparse_level_table()
    f = fit(Dag(make_nodes(t.schema), SPARSE_DAG_EDGES), t, strict=False)
    intercept, coefs, _ = f.locals["Y"].pooled
    with caplog.at_level(logging.WARNING):
        value = predict_node(f, "Y", {"G": "r", "X": 2.0})
    assert value == pytest.approx(intercept + coefs[0] * 2.0)
    assert "pooled" in caplog.text


def test_predict_errors():
    t = hybrid_sample(100, seed=18)
    f = fit(hybrid_dag(), t)
    with pytest.raises(ArgumentError):
        predict_node(f, "A", {})
    with pytest.raises(ArgumentError):
        predict_node(f, "Y", {"X": 1.0})
    with pytest.raises(EvaluationError):
        predict_node(f, "Y", {"B": "b9", "W": 0.0, "X": 0.0})


# === Serialization
def test_fit_document_roundtrip(tmp_path):
    t = hybrid_sample(200, seed=19)
    f = fit(hybrid_dag(), t)
    path = tmp_path / "model.json"
    save_fit(f, path)
    again = load_fit(path)
    assert again.dag == f.dag
    assert again.n_params == f.n_params
    assert log_likelihood(again, t) == pytest.approx(log_likelihood(f, t), abs=1e-9)
    assert predict_node(again, "Y", {"B": "b0", "W": 1.0, "X": 2.0}) == pytest.approx(
        predict_node(f, "Y", {"B": "b0", "W": 1.0, "X": 2.0})
    )

import json
import math

import pytest

import perpetuity as pp


def uniform_model():
    return pp.validate_model(pp.UniformInterval(0.0, 1.0), pp.DiscreteFinite([(1.0, 1.0)]))


def test_model_and_pdelta():
    model = uniform_model()
    assert model.q_bound == 1.0
    assert model.mean_abs_m == 0.5
    assert model.contractive and model.m_nonneg and model.q_constant
    assert pp.p_delta(model, 0.2) == pytest.approx(0.2)


def test_regime_errors_carry_kind():
    with pytest.raises(pp.PerpetuityError) as info:
        pp.validate_model(pp.DiscreteFinite([(-1.5, 0.1), (0.5, 0.9)]), pp.DiscreteFinite([(1.0, 1.0)]))
    assert info.value.kind == "UnsupportedRegime"


def test_bounds():
    model = uniform_model()
    assert pp.lower_bound_gg(model, 2.0, 0.5).value == pytest.approx(0.035431057123984366)
    assert pp.upper_bound_paper(model, 200.0).log_value == pytest.approx(50 * math.log(0.01))
    params, bound = pp.optimize_chernoff(model, 200.0)
    assert params.feasible
    assert bound.log_value <= -285.33592441213285
    assert pp.geometric_mgf(0.5, math.log(1.5)) == pytest.approx(3.0)


def test_simulation_and_oracles():
    model = uniform_model()
    curve = pp.simulate_tail(model, pp.SimConfig(n_samples=200_000, seed=3), [2.0, 3.0])
    assert curve.n == 200_000
    assert abs(curve.estimates[1] - pp.dickman_tail(3.0)) < 3 * (curve.ci_high[1] - curve.ci_low[1])
    d = pp.decompose_path([0.95, 0.5, 0.99, 0.3], 0.2)
    assert d.t_values == [2, 2]
    half = pp.validate_model(pp.DiscreteFinite([(0.0, 0.5), (0.5, 0.5)]), pp.DiscreteFinite([(1.0, 1.0)]))
    assert pp.exact_distribution(half, 3) == [(1.0, 0.5), (1.5, 0.25), (1.75, 0.25)]


def test_run_pipeline():
    config = {
        "model": {"m": {"type": "uniform", "a": 0, "b": 1}, "q": {"type": "discrete", "atoms": [[1, 1]]}},
        "xs": [2, 3, 4],
        "sim": {"n_samples": 10000, "seed": 1},
    }
    csv, meta = pp.run_pipeline(json.dumps(config))
    assert csv.splitlines()[0].startswith("x,n,exceed_count")
    assert len(csv.splitlines()) == 4
    assert json.loads(meta)["containment"]["violations"] == 0
    with pytest.raises(ValueError):
        pp.run_pipeline("{ not json")

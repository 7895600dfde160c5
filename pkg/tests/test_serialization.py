import io
import json

import jsonschema
import numpy as np
import pytest

from arblab import gen_counterexample_2d, gen_mixed_fbs, make_grid
from arblab.harness import load_schema
from arblab.models import (
    BrownianParams,
    BubbleParams,
    Counterexample2dParams,
    DriftedExpParams,
    FbmParams,
    LocalVolMixedParams,
    MixedFbsParams,
    MixedHestonParams,
    model_to_dict,
)
from arblab.paths import path_from_csv, path_sidecar, path_to_csv


def test_path_csv_round_trips_exactly():
    grid = make_grid(1.0, 64)
    params = MixedFbsParams(x0=(1.0, 2.0), sigma=((0.2, 0.0), (0.05, 0.3)), eta=0.1)
    p = gen_mixed_fbs(grid, params, seed=3)
    buf = io.StringIO()
    path_to_csv(p, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "t,asset_1,asset_2"
    assert len(text.splitlines()) == 66
    back = path_from_csv(io.StringIO(text), grid, p.kind, p.seed)
    assert np.array_equal(back.values, p.values)  # repr round-trip is exact


def test_sidecar_carries_params_seed_kind_metadata():
    grid = make_grid(1.5, 32)
    p = gen_counterexample_2d(grid, seed=9)
    doc = json.loads(path_sidecar(p, model_to_dict(__import__("arblab").Counterexample2dParams())))
    assert doc["kind"] == "price"
    assert doc["seed"] == {"root": 9, "path_index": 0}
    assert doc["params"]["variant"] == "counterexample_2d"
    assert doc["grid"] == {"horizon": 1.5, "steps": 32}
    assert 0.0 <= doc["metadata"]["U"] <= 1.0


@pytest.mark.parametrize("model", [
    BrownianParams(dims=2),
    FbmParams(hurst=0.75, method="cholesky"),
    BubbleParams(),
    DriftedExpParams(alpha=0.25),
    MixedFbsParams(x0=(1.0, 2.0), sigma=((0.2, 0.0), (0.05, 0.3)), eta=0.1),
    MixedHestonParams(),
    LocalVolMixedParams(drift_fn="long", vol_fn="running_max"),
    Counterexample2dParams(),
])
def test_model_dicts_validate_against_shipped_schema(model):
    schema = load_schema("model_params")
    d = json.loads(json.dumps(model_to_dict(model)))  # tuples -> lists
    jsonschema.Draft202012Validator(schema).validate(d)


def test_model_schema_rejects_stray_field():
    schema = load_schema("model_params")
    bad = {"variant": "bubble", "sigma": 0.2}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.Draft202012Validator(schema).validate(bad)


def test_strategy_dicts_validate_against_shipped_schema():
    from arblab import NoaViolationCertificate, Deterministic, Constant
    from arblab import example_strategies, obvious_arb_from_noa_violation, twc_arb
    from arblab import TwcViolationCertificate
    schema = load_schema("strategy")
    validator = jsonschema.Draft202012Validator(schema)
    strategies = [
        example_strategies("bubble"),
        example_strategies("drifted_exp"),
        obvious_arb_from_noa_violation(
            NoaViolationCertificate(Deterministic(0.0), Constant((-1.0,)), 0.4, 1.0)),
        twc_arb(TwcViolationCertificate(Deterministic(0.0), Constant((1.0,)), 10)),
    ]
    for strat in strategies:
        validator.validate(json.loads(json.dumps(strat.to_dict())))

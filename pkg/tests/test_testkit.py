from __future__ import annotations

import pytest

from indepforge import freeness_oracle, is_independent
from indepforge.instance import dumps
from indepforge.testkit import KINDS, GeneratorConfig, generate_instance, instance_stream


def test_same_seed_same_document():
    a = dumps(generate_instance(GeneratorConfig(seed=42), "square-zero"))
    b = dumps(generate_instance(GeneratorConfig(seed=42), "square-zero"))
    assert a == b


@pytest.mark.parametrize("kind", KINDS)
def test_every_kind_is_deterministic_and_parses(kind):
    docs = [dumps(generate_instance(GeneratorConfig(seed=s), kind)) for s in (1, 2, 1)]
    assert docs[0] == docs[2]
    for _, _, inst in instance_stream(kind, range(5)):
        assert inst.rings


def test_unknown_kind():
    with pytest.raises(ValueError):
        generate_instance(GeneratorConfig(), "no-such-kind")


def test_independent_pair_guarantee_500():
    for seed, doc, inst in instance_stream("independent-pair", range(500)):
        A, M = inst.rings["A"], inst.modules["M"]
        xs = [A.element(s) for s in doc["command"]["sequence"]]
        assert is_independent(xs, M).verdict, seed


def test_flat_finite_guarantee_500():
    for seed, doc, inst in instance_stream("flat-finite-morphism", range(500)):
        assert freeness_oracle(inst.modules["BA"]), seed


def test_square_zero_kind_has_square_zero_source():
    for _, _, inst in instance_stream("square-zero", range(20)):
        m = inst.rings["A"].maximal_ideal()
        assert (m * m).is_zero()


def test_knobs_are_respected():
    cfg = dict(min_vars=2, max_vars=2, max_truncation=3)
    for _, doc, inst in instance_stream("random-module", range(10), **cfg):
        A = inst.rings["A"]
        assert A.nvars == 2 and doc["rings"]["A"]["truncation"] <= 3

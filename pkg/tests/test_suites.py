import pytest

from posmat.errors import UnsupportedRing
from posmat.rings import RingId
from posmat.suites import SUITES, RunConfig, run_suite


@pytest.mark.parametrize("ring", list(RingId))
@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes(suite, ring):
    if suite == "1" and ring is RingId.SKEW:
        pytest.skip("inverse oracle is commutative-only")
    result = run_suite(suite, RunConfig(ring=ring, n=3, trials=6, seed=1, word_count=5))
    assert result.ok, result.counterexample
    assert result.trials >= 6
    obj = result.to_json()
    assert obj["failed"] == 0 and obj["ring"] == ring.value


def test_suite_1_rejects_skew():
    with pytest.raises(UnsupportedRing):
        run_suite("1", RunConfig(ring=RingId.SKEW))


def test_suite_seed_is_reproducible():
    a = run_suite("4", RunConfig(ring=RingId.Q, trials=10, seed=5)).to_json()
    b = run_suite("4", RunConfig(ring=RingId.Q, trials=10, seed=5)).to_json()
    assert a == b


@pytest.mark.parametrize("bad", [dict(n=2), dict(trials=0)])
def test_run_config_validation(bad):
    with pytest.raises(ValueError):
        run_suite("2", RunConfig(**bad))


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("6", RunConfig())

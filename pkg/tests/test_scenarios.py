import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import bundled
from gridsched.scenarios import penetration_of, synthesize_scenarios


def test_zero_penetration_is_all_zero(rts24):
    scen = synthesize_scenarios(rts24, 0.0, 6, seed=1)
    assert not scen.capacity.any()
    assert scen.probabilities.tolist() == [0.25] * 4


def direct_penetration(case, scen):
    res = sum(scen.probabilities[s] * scen.capacity[s].sum() for s in range(scen.count))
    demand = sum(sum(b.demand) for b in case.buses)
    return res / demand


def test_target_penetration_four_hour_blocks(rts24):
    scen = synthesize_scenarios(rts24, 0.48, 6, seed=20240613)
    assert direct_penetration(rts24, scen) == pytest.approx(0.48, abs=0.01)
    assert penetration_of(rts24, scen) == pytest.approx(0.48, abs=1e-12)


def test_bundled_scenarios_come_from_pinned_seed(rts24):
    scen = synthesize_scenarios(rts24, 0.48, 6, seed=20240613)
    assert np.allclose(scen.capacity, rts24.scenarios.capacity, rtol=1e-12, atol=1e-9)


def test_block_constant(rts24):
    scen = synthesize_scenarios(rts24, 0.48, 6, seed=3)
    blocks = scen.capacity.reshape(4, 2, 6, 4)
    assert np.all(blocks == blocks[..., :1])


def test_deterministic_in_seed(rts24):
    a = synthesize_scenarios(rts24, 0.3, 4, seed=9)
    b = synthesize_scenarios(rts24, 0.3, 4, seed=9)
    c = synthesize_scenarios(rts24, 0.3, 4, seed=10)
    assert a == b and a != c


@pytest.mark.parametrize("kwargs,match", [
    (dict(penetration=1.5, blocks=6), "penetration"),
    (dict(penetration=-0.1, blocks=6), "penetration"),
    (dict(penetration=0.4, blocks=5), "divide"),
])
def test_errors(rts24, kwargs, match):
    with pytest.raises(ValueError, match=match):
        synthesize_scenarios(rts24, seed=0, **kwargs)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.0), st.sampled_from([1, 2, 3, 4, 6, 8, 12, 24]),
       st.integers(0, 2**31), st.integers(1, 6))
def test_penetration_property(pen, blocks, seed, count):
    case = bundled("rts24")
    scen = synthesize_scenarios(case, pen, blocks, seed, count)
    assert scen.count == count
    assert np.all(scen.capacity >= 0)
    assert direct_penetration(case, scen) == pytest.approx(pen, rel=1e-9)

"""Seeded synthesis of block-constant RES capacity scenarios."""
from __future__ import annotations

import numpy as np

from .case import ScenarioSet


def synthesize_scenarios(case, penetration: float, blocks: int, seed: int,
                         count: int = 4) -> ScenarioSet:
    """Equiprobable RES scenarios hitting a target energy penetration.

    Each scenario gets a random overall level and each unit a random
    profile that is constant over ``blocks`` equal-length blocks of the
    horizon.  Capacities are then scaled so that the probability-weighted
    RES energy equals ``penetration`` times total demand energy.
    """
    if not 0.0 <= penetration <= 1.0:
        raise ValueError(f"penetration must lie in [0, 1], got {penetration}")
    T = case.horizon
    if blocks < 1 or T % blocks:
        raise ValueError(f"blocks={blocks} does not divide the horizon T={T}")
    if count < 1:
        raise ValueError("need at least one scenario")
    units = tuple(r.id for r in case.res_units)
    W = len(units)
    probs = np.full(count, 1.0 / count)
    if penetration == 0.0 or W == 0:
        if penetration > 0.0:
            raise ValueError("case has no RES units to carry a nonzero penetration")
        return ScenarioSet(probs, units, np.zeros((count, W, T)))

    rng = np.random.default_rng(seed)
    level = rng.uniform(0.6, 1.4, size=count)
    shape = rng.uniform(0.2, 1.0, size=(count, W, blocks))
    cap = np.repeat(level[:, None, None] * shape, T // blocks, axis=2)
    target = penetration * float(case.total_demand().sum())
    expected = float(np.einsum("s,swt->", probs, cap))
    cap *= target / expected
    return ScenarioSet(probs, units, cap)


def penetration_of(case, scenarios: ScenarioSet | None = None) -> float:
    """Probability-weighted RES energy over total demand energy."""
    scen = case.scenarios if scenarios is None else scenarios
    energy = float(np.einsum("s,swt->", scen.probabilities, scen.capacity))
    return energy / float(case.total_demand().sum())

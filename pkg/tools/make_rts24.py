"""Regenerate cases/rts24.case and its scenario CSV.

Network and unit data follow the IEEE Reliability Test System (24 buses).
Run from the repository root: ``python3 tools/make_rts24.py``.
"""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from gridsched.case import (Bus, Case, ESSUnit, Generator, Line, Options, RESUnit,
                            ScenarioSet, dump_case, scenario_csv)
from gridsched.scenarios import synthesize_scenarios

SEED = 20240613
PENETRATION = 0.48
BLOCKS = 6
PEAK_MW = 2270.0

# from, to, reactance (pu), normal rating, emergency rating (MVA)
BRANCHES = [
    (1, 2, 0.0139, 175, 200), (1, 3, 0.2112, 175, 200), (1, 5, 0.0845, 175, 200),
    (2, 4, 0.1267, 175, 200), (2, 6, 0.1920, 175, 200), (3, 9, 0.1190, 175, 200),
    (3, 24, 0.0839, 400, 600), (4, 9, 0.1037, 175, 200), (5, 10, 0.0883, 175, 200),
    (6, 10, 0.0605, 175, 200), (7, 8, 0.0614, 175, 200), (8, 9, 0.1651, 175, 200),
    (8, 10, 0.1651, 175, 200), (9, 11, 0.0839, 400, 600), (9, 12, 0.0839, 400, 600),
    (10, 11, 0.0839, 400, 600), (10, 12, 0.0839, 400, 600), (11, 13, 0.0476, 500, 625),
    (11, 14, 0.0418, 500, 625), (12, 13, 0.0476, 500, 625), (12, 23, 0.0966, 500, 625),
    (13, 23, 0.0865, 500, 625), (14, 16, 0.0389, 500, 625), (15, 16, 0.0173, 500, 625),
    (15, 21, 0.0490, 500, 625), (15, 21, 0.0490, 500, 625), (15, 24, 0.0519, 500, 625),
    (16, 17, 0.0259, 500, 625), (16, 19, 0.0231, 500, 625), (17, 18, 0.0144, 500, 625),
    (17, 22, 0.1053, 500, 625), (18, 21, 0.0259, 500, 625), (18, 21, 0.0259, 500, 625),
    (19, 20, 0.0396, 500, 625), (19, 20, 0.0396, 500, 625), (20, 23, 0.0216, 500, 625),
    (20, 23, 0.0216, 500, 625), (21, 22, 0.0678, 500, 625),
]

BUS_LOAD = {1: 108, 2: 97, 3: 180, 4: 74, 5: 71, 6: 136, 7: 125, 8: 171, 9: 175, 10: 195,
            13: 265, 14: 194, 15: 317, 16: 100, 18: 333, 19: 181, 20: 128}

# hourly winter-weekday shape, percent of daily peak
PROFILE = [67, 63, 60, 59, 59, 60, 74, 86, 95, 96, 96, 95,
           95, 95, 93, 94, 99, 100, 100, 96, 91, 83, 73, 63]

# unit type: pmin, pmax, $/MWh, no-load $/h, start-up $, MW/min ramp, min up, min down
UNIT = {
    "U12": (2.4, 12, 56.0, 90, 700, 1, 2, 2),
    "U20": (16, 20, 130.0, 180, 100, 3, 1, 1),
    "U50": (10, 50, 1.0, 0, 0, 5, 1, 1),
    "U76": (15.2, 76, 16.0, 150, 1500, 2, 8, 4),
    "U100": (25, 100, 44.0, 300, 4500, 7, 8, 8),
    "U155": (54.3, 155, 13.0, 250, 3000, 3, 8, 8),
    "U197": (69, 197, 48.0, 600, 5000, 3, 12, 10),
    "U350": (140, 338, 12.0, 500, 8000, 4, 24, 48),
    "U400": (100, 400, 5.0, 400, 15000, 20, 24, 48),
    "SYNC": (0, 0, 0.0, 0, 0, 0, 1, 1),
}
SITES = [(1, "U20"), (1, "U20"), (1, "U76"), (1, "U76"),
         (2, "U20"), (2, "U20"), (2, "U76"), (2, "U76"),
         (7, "U100"), (7, "U100"), (7, "U100"),
         (13, "U197"), (13, "U197"), (13, "U197"),
         (14, "SYNC"),
         (15, "U12"), (15, "U12"), (15, "U12"), (15, "U12"), (15, "U12"), (15, "U155"),
         (16, "U155"), (18, "U400"), (21, "U400"),
         (22, "U50"), (22, "U50"), (22, "U50"), (22, "U50"), (22, "U50"), (22, "U50"),
         (23, "U155"), (23, "U155"), (23, "U350")]

HEADER = f"""\
IEEE Reliability Test System, 24 buses, with two RES units and two storage units.
Network, unit sizes and ramp rates follow the standard RTS tables; susceptance is 1/x.
The 350 MW coal unit at bus 23 is derated to 338 MW for a 3393 MW fleet.
Costs are per-unit-type approximations.  Units start offline.
Load: hourly winter-weekday shape scaled to a {PEAK_MW:.0f} MW peak, RTS bus shares.
Storage at buses 14 and 23: 220 MW, 100 MW/h, SOC 20-90%, 250 MWh, 0.9 efficiencies.
RES at buses 16 and 21.  Scenarios: synthesize_scenarios(penetration={PENETRATION},
blocks={BLOCKS}, seed={SEED}, count=4), stored in rts24_scenarios.csv.
Regenerate with tools/make_rts24.py."""


def make_case() -> Case:
    total = sum(BUS_LOAD.values())
    buses = tuple(
        Bus(n, tuple(round(PEAK_MW * BUS_LOAD.get(n, 0) / total * p / 100.0, 4) for p in PROFILE))
        for n in range(1, 25))
    lines = tuple(Line(k, f, t, round(1.0 / x, 6), float(lim), float(em))
                  for k, (f, t, x, lim, em) in enumerate(BRANCHES, start=1))
    gens = []
    for g, (bus, kind) in enumerate(SITES, start=1):
        pmin, pmax, cost, nl, su, ramp, ut, dt = UNIT[kind]
        hourly = min(60.0 * ramp, float(pmax))
        gens.append(Generator(
            id=g, bus=bus, p_min=float(pmin), p_max=float(pmax), cost=cost,
            cost_no_load=float(nl), cost_startup=float(su), ramp_hr=hourly,
            ramp_10=min(10.0 * ramp, float(pmax)), ramp_su=max(float(pmin), hourly),
            ramp_sd=max(float(pmin), hourly), min_up=ut, min_down=dt))
    ess = tuple(ESSUnit(e, bus, 220.0, 220.0, 100.0, 100.0, 0.2, 0.9, 250.0, 0.9, 0.9, 125.0)
                for e, bus in ((1, 14), (2, 23)))
    res = (RESUnit(1, 16), RESUnit(2, 21))
    placeholder = ScenarioSet(np.full(4, 0.25), (1, 2), np.zeros((4, 2, 24)))
    case = Case(name="rts24", buses=buses, lines=lines, generators=tuple(gens),
                ess_units=ess, res_units=res, scenarios=placeholder, horizon=24,
                reference_bus=13, options=Options(), header=HEADER,
                scenario_csv="rts24_scenarios.csv")
    scen = synthesize_scenarios(case, PENETRATION, BLOCKS, SEED, count=4)
    return replace(case, scenarios=scen)


if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "src" / "gridsched" / "cases"
    case = make_case()
    (out / "rts24.case").write_text(dump_case(case))
    (out / "rts24_scenarios.csv").write_text(scenario_csv(case.scenarios))
    print(f"wrote {out / 'rts24.case'}")

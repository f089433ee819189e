"""Deterministic synthetic market fixtures.

Real historical market data is not bundled; these generators produce
series with the right qualitative shapes (declining oil, linear-growth
DAX and gas, declining coal, declining emissions, rising allowance price)
from the package's own seeded LCG, so every byte of every fixture is
reproducible from the seed.
"""

import math
from pathlib import Path

from .rng import Lcg64
from .series import TimeSeries, write_series

DEFAULT_SEED = 42

FIXTURE_FILES = {
    "oil": "oil_synthetic.csv",
    "dax": "dax_synthetic.csv",
    "coal": "coal_synthetic.csv",
    "gas": "gas_synthetic.csv",
    "emission": "emission_synthetic.csv",
    "price": "price_synthetic.csv",
}

SCENARIO_FILES = {
    "target1": "scenario_target1.cfg",
    "target2": "scenario_target2.cfg",
}

_SCENARIO_TARGETS = {"target1": 2137554.0, "target2": 1603165.5}


def _series(name, unit, start, end, rng, curve, noise):
    points = []
    for year in range(start, end + 1):
        t = year - start
        points.append((year, curve(t) + rng.normal(0.0, noise)))
    return TimeSeries(name=name, unit=unit, points=tuple(points))


def synthetic_oil(seed=DEFAULT_SEED) -> TimeSeries:
    """EUR/bbl, 1980-2021: long decline with a mid-period swell."""
    rng = Lcg64(seed ^ 0x01)
    return _series("oil", "EUR/bbl", 1980, 2021, rng,
                   lambda t: 95.0 * math.exp(-0.018 * t) + 12.0
                   + 8.0 * math.sin(t / 6.0), 2.0)


def synthetic_dax(seed=DEFAULT_SEED) -> TimeSeries:
    """Index points, 1990-2021: near-linear growth."""
    rng = Lcg64(seed ^ 0x02)
    return _series("dax", "points", 1990, 2021, rng,
                   lambda t: 2000.0 + 330.0 * t, 180.0)


def synthetic_coal(seed=DEFAULT_SEED) -> TimeSeries:
    """EUR/t, 1990-2021: gradual decline."""
    rng = Lcg64(seed ^ 0x03)
    return _series("coal", "EUR/t", 1990, 2021, rng,
                   lambda t: 120.0 - 1.9 * t, 3.0)


def synthetic_gas(seed=DEFAULT_SEED) -> TimeSeries:
    """EUR/MWh, 1990-2021: linear growth."""
    rng = Lcg64(seed ^ 0x04)
    return _series("gas", "EUR/MWh", 1990, 2021, rng,
                   lambda t: 12.0 + 1.35 * t, 1.5)


def synthetic_emission(seed=DEFAULT_SEED) -> TimeSeries:
    """kt CO2, 1990-2021: steady decline.

    The slope puts the 2030 trend extrapolation (~1.88e6 kt) between the
    two bundled policy targets, so the two scenario anchors pull the fit
    in opposite directions."""
    rng = Lcg64(seed ^ 0x05)
    return _series("emission", "kt", 1990, 2021, rng,
                   lambda t: 4.6e6 - 68_000.0 * t, 18_000.0)


def synthetic_price(seed=DEFAULT_SEED) -> TimeSeries:
    """EUR per allowance, 2007-2021: accelerating rise."""
    rng = Lcg64(seed ^ 0x06)
    return _series("price", "EUR", 2007, 2021, rng,
                   lambda t: 6.0 + 0.28 * t * t + 0.5 * t, 1.2)


_GENERATORS = {
    "oil": synthetic_oil,
    "dax": synthetic_dax,
    "coal": synthetic_coal,
    "gas": synthetic_gas,
    "emission": synthetic_emission,
    "price": synthetic_price,
}


def generate_all(seed=DEFAULT_SEED) -> dict:
    """All six fixture series keyed by factor name."""
    return {name: gen(seed) for name, gen in _GENERATORS.items()}


def scenario_text(label: str, target_kt: float,
                  horizon_start=2022, horizon_end=2030) -> str:
    return ("# scenario definition\n"
            f"label = {label}\n"
            f"emission_target_2030_kt = {target_kt!r}\n"
            f"horizon_start = {horizon_start}\n"
            f"horizon_end = {horizon_end}\n")


def write_fixtures(out_dir, seed=DEFAULT_SEED) -> dict:
    """Write the six CSVs plus the two scenario files; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, ts in generate_all(seed).items():
        path = out / FIXTURE_FILES[name]
        write_series(ts, path)
        paths[name] = path
    for label, fname in SCENARIO_FILES.items():
        path = out / fname
        path.write_text(scenario_text(label, _SCENARIO_TARGETS[label]),
                        encoding="utf-8", newline="\n")
        paths[label] = path
    return paths

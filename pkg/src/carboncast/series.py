"""Yearly time series and the CSV contract for reading/writing them.

File format: UTF-8, LF or CRLF line endings, optional leading comment
lines starting with '#' (a '# unit: <str>' comment sets the unit), then
the exact header 'year,value' followed by one 'year,value' row per
observation with '.' as the decimal separator.  Values survive a write/
read round trip exactly (shortest round-trip decimal representation).
"""

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateYear, NonFinite, ParseError

PROVENANCES = ("observed", "forecast", "target_anchor")


@dataclass(frozen=True)
class TimeSeries:
    name: str
    unit: str
    points: tuple            # ((year, value), ...) with strictly increasing years
    provenance: str = "observed"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        years = [y for y, _ in self.points]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise ValueError("years must be strictly increasing")
        if any(not isinstance(y, int) for y in years):
            raise ValueError("years must be integers")
        if any(not math.isfinite(v) for _, v in self.points):
            raise ValueError("values must be finite")

    @property
    def years(self):
        return [y for y, _ in self.points]

    @property
    def values(self):
        return [v for _, v in self.points]

    @property
    def first_year(self) -> int:
        return self.points[0][0]

    @property
    def last_year(self) -> int:
        return self.points[-1][0]

    def value_at(self, year: int) -> float:
        for y, v in self.points:
            if y == year:
                return v
        raise KeyError(f"{self.name} has no value for {year}")


def load_series(path, name=None) -> TimeSeries:
    """Read one series file; rejects malformed rows with their line number."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    unit = ""
    rows = []
    seen_years = {}
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not header_seen:
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.lower().startswith("unit:"):
                    unit = body[5:].strip()
                continue
            if line != "year,value":
                raise ParseError(f"expected header 'year,value', got {line!r}", lineno)
            header_seen = True
            continue
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 2:
            raise ParseError(f"expected two comma-separated cells, got {len(cells)}", lineno)
        year_text, value_text = cells[0].strip(), cells[1].strip()
        if not year_text:
            raise ParseError("empty year cell", lineno, column=1)
        if not value_text:
            raise ParseError("empty value cell", lineno, column=2)
        try:
            year = int(year_text)
        except ValueError:
            raise ParseError(f"year is not an integer: {year_text!r}", lineno, column=1)
        try:
            value = float(value_text)
        except ValueError:
            raise ParseError(f"value is not a number: {value_text!r}", lineno, column=2)
        if not math.isfinite(value):
            raise NonFinite(f"value {value_text!r} is not finite", lineno, column=2)
        if year in seen_years:
            raise DuplicateYear(f"year {year} already appeared on line {seen_years[year]}",
                                lineno)
        seen_years[year] = lineno
        rows.append((year, value))
    if not header_seen:
        raise ParseError("missing 'year,value' header", 1)
    rows.sort(key=lambda p: p[0])
    return TimeSeries(name=name or path.stem, unit=unit, points=tuple(rows))


def dump_series(ts: TimeSeries) -> str:
    lines = []
    if ts.unit:
        lines.append(f"# unit: {ts.unit}")
    lines.append("year,value")
    for year, value in ts.points:
        lines.append(f"{year},{value!r}")
    return "\n".join(lines) + "\n"


def write_series(ts: TimeSeries, path) -> None:
    Path(path).write_text(dump_series(ts), encoding="utf-8", newline="\n")


def stitch(observed: TimeSeries, forecast: TimeSeries) -> TimeSeries:
    """Concatenate observed history with a forecast continuation.

    Observed points pass through untouched; the forecast must start
    strictly after the last observed year.
    """
    if not forecast.points:
        raise ValueError("forecast continuation is empty")
    if forecast.first_year <= observed.last_year:
        raise ValueError(f"forecast for {forecast.name} starts at "
                         f"{forecast.first_year}, inside the observed range")
    return TimeSeries(name=observed.name, unit=observed.unit,
                      points=observed.points + forecast.points,
                      provenance="forecast")

"""Price ingestion, calendar alignment, log returns, descriptive statistics.

Input files are plain CSV. Two price layouts are accepted:

* long:  header ``ticker,date,close``, one observation per row;
* wide:  header ``date,<ticker1>,<ticker2>,...``, empty cell = missing.

Dates are ISO ``YYYY-MM-DD``. Rows with an unparseable date or a
non-positive/unparseable close are skipped and reported (vendor files are
gappy; aborting would hide the rest of the data), while structural problems
(missing file, manifest ticker absent, duplicate ticker/date) raise
:class:`~teflow.errors.DataError`.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


class Market(enum.Enum):
    US = "US"
    CANADA = "Canada"
    EUROPE = "Europe"

    @classmethod
    def parse(cls, text: str) -> "Market":
        key = text.strip().lower()
        aliases = {
            "us": cls.US,
            "usa": cls.US,
            "canada": cls.CANADA,
            "europe": cls.EUROPE,
        }
        if key not in aliases:
            raise DataError(f"unknown market {text!r} (expected US, Canada or Europe)")
        return aliases[key]


@dataclass(frozen=True)
class InstrumentMeta:
    ticker: str
    name: str
    currency: str
    market: Market


@dataclass
class PriceSeries:
    """Dated closes for one instrument; dates strictly increasing, closes > 0."""

    meta: InstrumentMeta
    dates: np.ndarray  # datetime64[D]
    closes: np.ndarray  # float64

    def __len__(self) -> int:
        return len(self.dates)


@dataclass
class ReturnSeries:
    meta: InstrumentMeta
    dates: np.ndarray  # datetime64[D], date of the later price of each ratio
    values: np.ndarray  # float64 log returns

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class DescriptiveStats:
    """Sample moments of a return series.

    ``std_dev`` uses the n-1 denominator. ``skewness`` is the adjusted
    Fisher-Pearson coefficient. ``kurtosis`` is the plain plugin m4/m2**2,
    non-excess, so a large Gaussian sample sits near 3. Skewness and
    kurtosis are NaN for a zero-variance sample (undefined).
    """

    mean: float
    std_dev: float
    kurtosis: float
    skewness: float
    n: int


@dataclass(frozen=True)
class RowError:
    line: int
    ticker: str
    reason: str


@dataclass
class PriceTable:
    """Result of :func:`load_prices`: the built series plus skipped-row report."""

    series: list[PriceSeries]
    row_errors: list[RowError] = field(default_factory=list)

    def by_ticker(self, ticker: str) -> PriceSeries:
        for s in self.series:
            if s.meta.ticker == ticker:
                return s
        raise KeyError(ticker)


def read_manifest(path: str | Path) -> list[InstrumentMeta]:
    """Read the instrument manifest CSV ``ticker,name,currency,market``."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"manifest file not found: {path}")
    metas: list[InstrumentMeta] = []
    seen: set[str] = set()
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"ticker", "name", "currency", "market"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise DataError(f"manifest {path} must have columns {sorted(required)}")
        for row in reader:
            ticker = row["ticker"].strip()
            if not ticker:
                raise DataError(f"manifest {path}: empty ticker")
            if ticker in seen:
                raise DataError(f"manifest {path}: duplicate ticker {ticker}")
            seen.add(ticker)
            metas.append(
                InstrumentMeta(
                    ticker=ticker,
                    name=row["name"].strip(),
                    currency=row["currency"].strip(),
                    market=Market.parse(row["market"]),
                )
            )
    return metas


def _parse_date(text: str):
    try:
        return np.datetime64(text.strip(), "D")
    except ValueError:
        return None


def _parse_close(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def load_prices(path: str | Path, manifest: list[InstrumentMeta]) -> PriceTable:
    """Load close prices for every manifest instrument from a CSV file.

    Skipped rows (bad date, non-positive or unparseable close) are collected
    in the returned :class:`PriceTable.row_errors`. A manifest ticker with no
    usable rows at all raises :class:`DataError` naming it, as does a
    duplicate (ticker, date) observation.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"price file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"price file {path} is empty") from None
        header = [h.strip() for h in header]
        wanted = {m.ticker for m in manifest}
        errors: list[RowError] = []
        # per ticker: date -> (line, close)
        cells: dict[str, dict[np.datetime64, float]] = {t: {} for t in wanted}

        def add(line: int, ticker: str, date, close: float) -> None:
            if close <= 0.0:
                errors.append(RowError(line, ticker, f"non-positive close {close}"))
                return
            if date in cells[ticker]:
                raise DataError(
                    f"{path}:{line}: duplicate observation for {ticker} on {date}"
                )
            cells[ticker][date] = close

        if header[:3] == ["ticker", "date", "close"]:
            for line, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) < 3:
                    errors.append(RowError(line, row[0].strip() if row else "", "short row"))
                    continue
                ticker = row[0].strip()
                if ticker not in wanted:
                    continue
                date = _parse_date(row[1])
                if date is None:
                    errors.append(RowError(line, ticker, f"unparseable date {row[1]!r}"))
                    continue
                close = _parse_close(row[2])
                if close is None:
                    errors.append(RowError(line, ticker, f"unparseable close {row[2]!r}"))
                    continue
                add(line, ticker, date, close)
        elif header[:1] == ["date"]:
            columns = header[1:]
            for line, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                date = _parse_date(row[0])
                if date is None:
                    errors.append(RowError(line, "", f"unparseable date {row[0]!r}"))
                    continue
                for ticker, cell in zip(columns, row[1:]):
                    if ticker not in wanted or not cell.strip():
                        continue
                    close = _parse_close(cell)
                    if close is None:
                        errors.append(RowError(line, ticker, f"unparseable close {cell!r}"))
                        continue
                    add(line, ticker, date, close)
        else:
            raise DataError(
                f"{path}: unrecognized header {header!r} "
                "(expected 'ticker,date,close' or 'date,<tickers...>')"
            )

    series: list[PriceSeries] = []
    for meta in manifest:
        obs = cells[meta.ticker]
        if not obs:
            raise DataError(f"ticker {meta.ticker} absent from price file {path}")
        dates = np.array(sorted(obs), dtype="datetime64[D]")
        closes = np.array([obs[d] for d in dates], dtype=np.float64)
        series.append(PriceSeries(meta=meta, dates=dates, closes=closes))
    return PriceTable(series=series, row_errors=errors)


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """Natural-log returns: value at date t is ln(close_t) - ln(close_{t-1})."""
    if len(prices) < 2:
        raise DataError(
            f"{prices.meta.ticker}: need at least 2 prices to compute returns"
        )
    values = np.diff(np.log(prices.closes))
    return ReturnSeries(meta=prices.meta, dates=prices.dates[1:], values=values)


def align_pair(a: ReturnSeries, b: ReturnSeries) -> tuple[ReturnSeries, ReturnSeries]:
    """Restrict both series to their common dates (inner join, order kept)."""
    if len(a) == 0 or len(b) == 0:
        raise DataError("cannot align an empty return series")
    common, idx_a, idx_b = np.intersect1d(a.dates, b.dates, return_indices=True)
    if common.size == 0:
        raise DataError(
            f"no common dates between {a.meta.ticker} and {b.meta.ticker}"
        )
    return (
        ReturnSeries(meta=a.meta, dates=common, values=a.values[idx_a]),
        ReturnSeries(meta=b.meta, dates=common.copy(), values=b.values[idx_b]),
    )


def describe(returns: ReturnSeries) -> DescriptiveStats:
    """Sample mean, standard deviation, kurtosis and skewness of a return series."""
    x = np.asarray(returns.values, dtype=np.float64)
    n = x.size
    if n < 4:
        raise DataError(
            f"{returns.meta.ticker}: need at least 4 returns for descriptive stats"
        )
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d**2))
    std_dev = float(np.sqrt(m2 * n / (n - 1)))
    if m2 == 0.0:
        skew = math.nan
        kurt = math.nan
    else:
        m3 = float(np.mean(d**3))
        m4 = float(np.mean(d**4))
        g1 = m3 / m2**1.5
        skew = g1 * math.sqrt(n * (n - 1)) / (n - 2)
        kurt = m4 / m2**2
    return DescriptiveStats(mean=mean, std_dev=std_dev, kurtosis=kurt, skewness=skew, n=n)

"""
Survival data module - Censored pairs, the minimum-time reparametrization
and the counting statistics all estimators are built from
"""
import bisect
import csv
import io
import logging
from collections import defaultdict
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

from lib.errors import ConsistencyError, ParseError

logger = logging.getLogger(__name__)

Time = Union[Decimal, float, int]
Weight = Union[int, Fraction, float]

CSV_HEADER = ('z1', 'd1', 'z2', 'd2')


class TimeGrid:
    """Strictly increasing sequence of distinct times"""

    def __init__(self, times: Iterable[Time] = ()):
        self.times = tuple(times)
        for earlier, later in zip(self.times, self.times[1:]):
            if not earlier < later:
                raise ConsistencyError(f"Grid is not strictly increasing at {earlier}, {later}")
        self._positions = {t: i for i, t in enumerate(self.times)}

    @classmethod
    def from_times(cls, times: Iterable[Time]) -> 'TimeGrid':
        return cls(sorted(set(times)))

    def union(self, other: Iterable[Time]) -> 'TimeGrid':
        return TimeGrid.from_times(self.times + tuple(other))

    def position(self, t: Time) -> int:
        try:
            return self._positions[t]
        except KeyError:
            raise ConsistencyError(f"Time {t} is not on the grid") from None

    def floor(self, t: Optional[Time]) -> int:
        """Index of the largest grid time <= t, or -1 when t is None or below the grid"""
        if t is None:
            return -1
        return bisect.bisect_right(self.times, t) - 1

    def tail(self, i: int) -> 'TimeGrid':
        """Times strictly after position i; offset d maps to tail index d - 1"""
        return TimeGrid(self.times[i + 1:])

    def __len__(self):
        return len(self.times)

    def __iter__(self) -> Iterator[Time]:
        return iter(self.times)

    def __getitem__(self, index):
        return self.times[index]

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and self.times == other.times

    def __hash__(self):
        return hash(self.times)

    def __repr__(self):
        return f"TimeGrid({', '.join(str(t) for t in self.times)})"


@dataclass(frozen=True)
class Observation:
    """One censored pair; a flag of 1 means the coordinate is uncensored"""
    z1: Time
    d1: int
    z2: Time
    d2: int

    def __post_init__(self):
        for name in ('d1', 'd2'):
            flag = getattr(self, name)
            if flag not in (0, 1):
                raise ConsistencyError(f"Censor flag {name} must be 0 or 1, got {flag!r}")
        if self.z1 < 0 or self.z2 < 0:
            raise ConsistencyError(f"Times must be nonnegative, got ({self.z1}, {self.z2})")


@dataclass(frozen=True)
class ReparamObservation:
    """An observation seen through its minimum: (Z*, Δ*, η, Z_η, Δ_η)"""
    z_star: Time
    delta_star: int
    eta: int
    z_eta: Time
    delta_eta: int


def observe(t1: Time, t2: Time, c1: Time, c2: Time) -> Observation:
    """Censor a lifetime pair (t1, t2) by (c1, c2)"""
    return Observation(min(t1, c1), int(t1 <= c1), min(t2, c2), int(t2 <= c2))


def lemma_delta_star(eta: int, d1: int, d2: int) -> int:
    """Δ* as a function of the observed flags: the minimum is uncensored exactly when
    the flag of the smaller coordinate (either one on a tie) is 1"""
    if eta == 1:
        return int(d2 == 1)
    if eta == 2:
        return int(d1 == 1)
    return int(d1 == 1 or d2 == 1)


def reparametrize(obs: Observation) -> ReparamObservation:
    if obs.z1 == obs.z2:
        eta, z_eta, delta_eta = 0, obs.z1, max(obs.d1, obs.d2)
    elif obs.z1 > obs.z2:
        eta, z_eta, delta_eta = 1, obs.z1, obs.d1
    else:
        eta, z_eta, delta_eta = 2, obs.z2, obs.d2

    return ReparamObservation(
        z_star=min(obs.z1, obs.z2),
        delta_star=lemma_delta_star(eta, obs.d1, obs.d2),
        eta=eta,
        z_eta=z_eta,
        delta_eta=delta_eta,
    )


@dataclass(frozen=True)
class Dataset:
    """Observations in file order plus the grid they live on (see make_dataset)"""
    observations: Tuple[Observation, ...]
    grid: TimeGrid

    def __len__(self):
        return len(self.observations)

    def with_grid(self, grid: TimeGrid) -> 'Dataset':
        return make_dataset(self.observations, grid)

    def to_dict(self):
        return {
            'grid': list(self.grid),
            'observations': [
                {'z1': o.z1, 'd1': o.d1, 'z2': o.z2, 'd2': o.d2}
                for o in self.observations
            ],
        }


def make_dataset(observations: Iterable[Observation], grid: Optional[TimeGrid] = None) -> Dataset:
    """
    Build a dataset, by default on the sorted distinct union of its times
    An explicit grid must contain every observed time
    """
    observations = tuple(observations)
    if grid is None:
        grid = TimeGrid.from_times(t for o in observations for t in (o.z1, o.z2))

    for obs in observations:
        grid.position(obs.z1)
        grid.position(obs.z2)

    return Dataset(observations, grid)


def _parse_time(text, line):
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise ParseError(f"Malformed number {text!r}", line) from None

    if not value.is_finite():
        raise ParseError(f"Malformed number {text!r}", line)
    if value < 0:
        raise ParseError(f"Negative time {text}", line)
    return value


def _parse_flag(text, line):
    if text not in ('0', '1'):
        raise ParseError(f"Censor flag must be 0 or 1, got {text!r}", line)
    return int(text)


def parse_dataset(text: str, format: str = 'csv') -> Dataset:
    """
    Parse a `z1,d1,z2,d2` CSV document
    Times are read as exact decimals so ties are detected without rounding
    """
    if format != 'csv':
        raise ParseError(f"Unsupported dataset format: {format}")

    reader = csv.reader(io.StringIO(text))
    header_seen = False
    observations = []

    for row in reader:
        line = reader.line_num
        cells = [cell.strip() for cell in row]
        if not any(cells):
            continue

        if not header_seen:
            if tuple(cell.lower() for cell in cells) != CSV_HEADER:
                raise ParseError(f"Expected header {','.join(CSV_HEADER)}, got {','.join(cells)}", line)
            header_seen = True
            continue

        if len(cells) != len(CSV_HEADER):
            raise ParseError(f"Expected {len(CSV_HEADER)} fields, got {len(cells)}", line)

        observations.append(Observation(
            z1=_parse_time(cells[0], line),
            d1=_parse_flag(cells[1], line),
            z2=_parse_time(cells[2], line),
            d2=_parse_flag(cells[3], line),
        ))

    if not header_seen:
        raise ParseError("Empty file", 1)
    if not observations:
        raise ParseError("No observations after the header", reader.line_num + 1)

    dataset = make_dataset(observations)
    logger.debug(f"Parsed {len(dataset)} observations on {len(dataset.grid)} grid times")
    return dataset


def parse_queries(text: str):
    """Query points from an `s,t` CSV; 0 reads as below every grid time"""
    reader = csv.reader(io.StringIO(text))
    points = []
    header_seen = False
    for row in reader:
        cells = [cell.strip() for cell in row]
        if not any(cells):
            continue
        if not header_seen:
            if [cell.lower() for cell in cells] != ['s', 't']:
                raise ParseError(f"Expected header s,t, got {','.join(cells)}", reader.line_num)
            header_seen = True
            continue
        if len(cells) != 2:
            raise ParseError(f"Expected 2 fields, got {len(cells)}", reader.line_num)
        points.append((_parse_time(cells[0], reader.line_num), _parse_time(cells[1], reader.line_num)))

    if not header_seen:
        raise ParseError("Empty file", 1)
    return points


def load_dataset(path) -> Dataset:
    """Read a CSV dataset from disk; a missing file raises FileNotFoundError"""
    dataset = parse_dataset(Path(path).read_text())
    logger.info(f"Loaded {len(dataset)} observations from {path}")
    return dataset


@dataclass(frozen=True)
class StratumCounts:
    """
    Conditional risk-set table of one (i, eps) stratum
    Members leave at grid offsets d >= 1 past position i; y(d) is the weight
    still at risk at offset d and dn(d) the weight observed uncensored there.
    Only offsets where members leave are stored.
    """
    offsets: Tuple[int, ...]
    exits: Tuple[Weight, ...]
    events: Tuple[Weight, ...]
    remaining: Tuple[Weight, ...]

    @classmethod
    def from_members(cls, members: Mapping[int, Tuple[Weight, Weight]]) -> 'StratumCounts':
        offsets = tuple(sorted(members))
        exits = tuple(members[d][0] for d in offsets)
        events = tuple(members[d][1] for d in offsets)

        remaining = []
        running = 0
        for weight in reversed(exits):
            running += weight
            remaining.append(running)
        remaining.reverse()

        return cls(offsets, exits, events, tuple(remaining))

    def y(self, d: int) -> Weight:
        k = bisect.bisect_left(self.offsets, d)
        return self.remaining[k] if k < len(self.offsets) else 0

    def dn(self, d: int) -> Weight:
        k = bisect.bisect_left(self.offsets, d)
        if k < len(self.offsets) and self.offsets[k] == d:
            return self.events[k]
        return 0

    @property
    def last_offset(self) -> Optional[int]:
        return self.offsets[-1] if self.offsets else None

    def event_offsets(self) -> Iterator[Tuple[int, Weight, Weight]]:
        """(d, dn(d), y(d)) for the offsets carrying uncensored weight"""
        for k, d in enumerate(self.offsets):
            if self.events[k]:
                yield d, self.events[k], self.remaining[k]


@dataclass(frozen=True)
class CountStatistics:
    """Risk sets and event counts of the minimum, the ε split and the conditional strata"""
    grid: TimeGrid
    y_star: Tuple[Weight, ...]
    dn_star: Tuple[Weight, ...]
    n_eps: Tuple[Tuple[Weight, Weight, Weight], ...]
    cond: Mapping[Tuple[int, int], StratumCounts]

    def y_cond(self, i: int, eps: int, d: int) -> Weight:
        stratum = self.cond.get((i, eps))
        return stratum.y(d) if stratum else 0

    def dn_cond(self, i: int, eps: int, d: int) -> Weight:
        stratum = self.cond.get((i, eps))
        return stratum.dn(d) if stratum else 0

    def to_dict(self):
        return {
            'grid': list(self.grid),
            'y_star': list(self.y_star),
            'dn_star': list(self.dn_star),
            'n_eps': [list(triple) for triple in self.n_eps],
            'y_cond': {
                f"{i},{eps}": [[d, stratum.y(d)] for d in stratum.offsets]
                for (i, eps), stratum in self.cond.items()
            },
            'dn_cond': {
                f"{i},{eps}": [[d, stratum.dn(d)] for d in stratum.offsets]
                for (i, eps), stratum in self.cond.items()
            },
        }


def _tally(records: Iterable[Tuple[ReparamObservation, Weight]], grid: TimeGrid) -> CountStatistics:
    size = len(grid)
    leaving = [0] * size
    dn_star = [0] * size
    n_eps = [[0, 0, 0] for _ in range(size)]
    members: Dict[Tuple[int, int], Dict[int, list]] = defaultdict(lambda: defaultdict(lambda: [0, 0]))

    for record, weight in records:
        if not weight:
            continue

        i = grid.position(record.z_star)
        leaving[i] += weight

        # Δ* = 0 only shrinks the risk set of the minimum
        if not record.delta_star:
            continue

        dn_star[i] += weight
        n_eps[i][record.eta] += weight
        if record.eta == 0:
            continue

        slot = members[(i, record.eta)][grid.position(record.z_eta) - i]
        slot[0] += weight
        if record.delta_eta:
            slot[1] += weight

    y_star = []
    running = 0
    for weight in reversed(leaving):
        running += weight
        y_star.append(running)
    y_star.reverse()

    cond = {
        key: StratumCounts.from_members({d: tuple(slot) for d, slot in table.items()})
        for key, table in sorted(members.items())
    }

    return CountStatistics(
        grid=grid,
        y_star=tuple(y_star),
        dn_star=tuple(dn_star),
        n_eps=tuple(tuple(triple) for triple in n_eps),
        cond=cond,
    )


def compute_counts(ds: Dataset) -> CountStatistics:
    counts = _tally(((reparametrize(obs), 1) for obs in ds.observations), ds.grid)
    logger.debug(f"Counted {len(ds)} observations into {len(counts.cond)} conditional strata")
    return counts


def counts_from_law(law: Mapping[Observation, Weight], grid: Optional[TimeGrid] = None) -> CountStatistics:
    """
    Counting statistics of an exact law of (Z̃, Δ̃)
    Each outcome contributes its probability where a sample would contribute a unit count
    """
    for obs, weight in law.items():
        if weight < 0:
            raise ConsistencyError(f"Negative probability {weight} for {obs}")

    if grid is None:
        grid = TimeGrid.from_times(t for obs in law for t in (obs.z1, obs.z2))

    return _tally(((reparametrize(obs), weight) for obs, weight in law.items()), grid)

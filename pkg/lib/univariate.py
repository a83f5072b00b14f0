"""
Univariate module - One-dimensional censoring engine reused by every stratum:
discrete hazards, Kaplan-Meier, and the Beta-process prior on a grid
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from lib.errors import ConsistencyError, EstimatorError
from lib.survdata import Time, TimeGrid, Weight

logger = logging.getLogger(__name__)


def ratio(num, den, exact=True):
    """
    num / den with an empty denominator read as 0
    Rational inputs give a Fraction; floats, or exact=False, give a float
    """
    if not den:
        return 0
    if not exact:
        return float(num) / float(den)
    if isinstance(num, float) or isinstance(den, float):
        return num / den
    return Fraction(num, den)


@dataclass(frozen=True)
class HazardCurve:
    """Discrete hazards P{T = t | T >= t}; `undefined` marks points nobody was at risk at"""
    grid: TimeGrid
    h: Tuple[Weight, ...]
    undefined: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if len(self.h) != len(self.grid):
            raise ConsistencyError(f"{len(self.h)} hazards for a grid of {len(self.grid)} times")
        for t, value in zip(self.grid, self.h):
            if not 0 <= value <= 1:
                raise ConsistencyError(f"Hazard {value} at {t} is outside [0, 1]")


@dataclass(frozen=True)
class BetaPrior1D:
    """
    Independent Beta(a(i), b(i)) hazards on a grid
    a = b = 0 at a point means no prior information there
    """
    grid: TimeGrid
    a: Tuple[Weight, ...]
    b: Tuple[Weight, ...]

    def __post_init__(self):
        if len(self.a) != len(self.grid) or len(self.b) != len(self.grid):
            raise ConsistencyError(
                f"Beta weights of length {len(self.a)}/{len(self.b)} for a grid of {len(self.grid)} times"
            )
        for t, a, b in zip(self.grid, self.a, self.b):
            if a < 0 or b < 0:
                raise ConsistencyError(f"Negative Beta weight ({a}, {b}) at {t}")

    @classmethod
    def zeros(cls, grid: TimeGrid) -> 'BetaPrior1D':
        return cls(grid, (0,) * len(grid), (0,) * len(grid))

    def scaled(self, factor) -> 'BetaPrior1D':
        return BetaPrior1D(
            self.grid,
            tuple(a * factor for a in self.a),
            tuple(b * factor for b in self.b),
        )

    def last_weighted(self) -> Optional[int]:
        """Last grid position with a + b > 0"""
        for i in range(len(self.grid) - 1, -1, -1):
            if self.a[i] + self.b[i]:
                return i
        return None

    def to_dict(self):
        return {'grid': list(self.grid), 'a': list(self.a), 'b': list(self.b)}


@dataclass(frozen=True)
class MassCurve:
    """
    Point masses on a grid plus the residual a product-limit construction
    did not assign, located at `defect_at`
    """
    grid: TimeGrid
    mass: Tuple[Weight, ...]
    defect: Weight = 0
    defect_at: Optional[Time] = None

    @property
    def defective(self) -> bool:
        return bool(self.defect)

    def total(self) -> Weight:
        return sum(self.mass) + self.defect

    def survival(self, t: Optional[Time]) -> Weight:
        """P{T > t}, counting the defect as mass at its placement; None is below every time"""
        start = self.grid.floor(t) + 1
        value = sum(self.mass[start:])
        if self.defect and (t is None or self.defect_at > t):
            value += self.defect
        return value

    def to_dict(self):
        return {
            'grid': list(self.grid),
            'mass': list(self.mass),
            'defect': self.defect,
            'defect_at': self.defect_at,
        }


def hazards_to_mass(h: HazardCurve, defect_index: Optional[int] = None) -> MassCurve:
    """
    mass(i) = h(i) * prod_{j<i} (1 - h(j))
    Whatever survival is left after the last point becomes the defect, placed
    at `defect_index` (default: the last grid point)
    """
    survival = 1
    masses = []
    for value in h.h:
        masses.append(survival * value)
        survival = survival * (1 - value)

    if not survival or not len(h.grid):
        return MassCurve(h.grid, tuple(masses))

    index = len(h.grid) - 1 if defect_index is None else defect_index
    return MassCurve(h.grid, tuple(masses), defect=survival, defect_at=h.grid[index])


def product_limit(h: HazardCurve) -> Tuple[Weight, ...]:
    """Survival just after each grid point, prod_{j<=i} (1 - h(j))"""
    survival = 1
    values = []
    for value in h.h:
        survival = survival * (1 - value)
        values.append(survival)
    return tuple(values)


def km_hazards(pairs: Iterable[Tuple[Time, int]], grid: TimeGrid) -> HazardCurve:
    """Empirical hazards ΔN(i)/Y(i); points with nobody at risk get hazard 0 and are flagged"""
    pairs = list(pairs)
    if not pairs:
        raise EstimatorError("Kaplan-Meier needs at least one observation")

    leaving = [0] * len(grid)
    events = [0] * len(grid)
    for t, flag in pairs:
        if flag not in (0, 1):
            raise ConsistencyError(f"Event flag must be 0 or 1, got {flag!r}")
        i = grid.position(t)
        leaving[i] += 1
        events[i] += flag

    hazards = [0] * len(grid)
    undefined = set()
    at_risk = 0
    for i in range(len(grid) - 1, -1, -1):
        at_risk += leaving[i]
        if not at_risk:
            undefined.add(i)
        hazards[i] = ratio(events[i], at_risk)

    return HazardCurve(grid, tuple(hazards), frozenset(undefined))


def km(pairs: Iterable[Tuple[Time, int]], grid: TimeGrid) -> MassCurve:
    """Kaplan-Meier mass curve; a censored tail leaves a defect at the largest observed time"""
    pairs = list(pairs)
    hazards = km_hazards(pairs, grid)
    last_observed = max(grid.position(t) for t, _ in pairs)
    return hazards_to_mass(hazards, defect_index=last_observed)


def beta_posterior_1d(prior: BetaPrior1D, dn: Sequence[Weight], y: Sequence[Weight]) -> BetaPrior1D:
    """Conjugate update: a + ΔN, b + Y - ΔN"""
    if len(dn) != len(prior.grid) or len(y) != len(prior.grid):
        raise ConsistencyError(f"Counts of length {len(dn)}/{len(y)} for a grid of {len(prior.grid)} times")

    for t, events, at_risk in zip(prior.grid, dn, y):
        if not 0 <= events <= at_risk:
            raise ConsistencyError(f"Event count {events} is not within the risk set {at_risk} at {t}")

    return BetaPrior1D(
        prior.grid,
        tuple(a + events for a, events in zip(prior.a, dn)),
        tuple(b + at_risk - events for b, events, at_risk in zip(prior.b, dn, y)),
    )


def posterior_mean_hazard(p: BetaPrior1D, exact: bool = True) -> HazardCurve:
    """Beta means a / (a + b); 0 where the point carries no weight"""
    hazards = []
    undefined = set()
    for i, (a, b) in enumerate(zip(p.a, p.b)):
        if not a + b:
            undefined.add(i)
        hazards.append(ratio(a, a + b, exact))
    return HazardCurve(p.grid, tuple(hazards), frozenset(undefined))

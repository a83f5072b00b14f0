"""
Dabrowska module - Bivariate product-limit survival estimator and the
rectangle-mass audit that exposes its negative mass
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from lib.errors import ConsistencyError, EstimatorError
from lib.survdata import Dataset, Time, TimeGrid, Weight
from lib.univariate import km_hazards, product_limit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SurvivalSurface:
    """
    S(s, t) = P{T1 > s, T2 > t} on the grid closure
    Index 0 stands for time 0 (below every grid time), index k >= 1 for grid[k - 1]
    """
    grid: TimeGrid
    values: Tuple[Tuple[Weight, ...], ...]

    def __post_init__(self):
        size = len(self.grid) + 1
        if len(self.values) != size or any(len(row) != size for row in self.values):
            raise ConsistencyError(f"Surface values must be {size}x{size} for a grid of {len(self.grid)} times")

    def at(self, s: Optional[Time], t: Optional[Time]) -> Weight:
        """Piecewise-constant query; None or 0 below the grid reads the axis"""
        return self.values[self.grid.floor(s) + 1][self.grid.floor(t) + 1]

    def label(self, k: int):
        return 0 if k == 0 else self.grid[k - 1]

    @classmethod
    def from_mass(cls, m) -> 'SurvivalSurface':
        """Surface of a BivariateMass, defects counted at their placement"""
        grid = m.grid
        size = len(grid)
        cell = [[0] * (size + 1) for _ in range(size + 1)]
        for (t1, t2), value in m.points.items():
            cell[grid.position(t1) + 1][grid.position(t2) + 1] += value

        # S at closure index (k, l) is the mass strictly above and to the right
        values = [[0] * (size + 1) for _ in range(size + 1)]
        for k in range(size - 1, -1, -1):
            row_tail = 0
            for l in range(size - 1, -1, -1):
                row_tail += cell[k + 1][l + 1]
                values[k][l] = values[k + 1][l] + row_tail

        return cls(grid, tuple(tuple(row) for row in values))

    def to_dict(self):
        return {
            'grid': list(self.grid),
            'values': [list(row) for row in self.values],
        }


@dataclass(frozen=True)
class CellMass:
    """Signed mass of the rectangle (s_lo, s_hi] x (t_lo, t_hi]"""
    s_lo: Time
    s_hi: Time
    t_lo: Time
    t_hi: Time
    mass: Weight


@dataclass(frozen=True)
class MassAudit:
    cells: Tuple[CellMass, ...]

    @property
    def negatives(self) -> Tuple[CellMass, ...]:
        return tuple(cell for cell in self.cells if cell.mass < 0)

    def total(self) -> Weight:
        return sum(cell.mass for cell in self.cells)

    def to_dict(self):
        def row(cell):
            return {'s_lo': cell.s_lo, 's_hi': cell.s_hi, 't_lo': cell.t_lo, 't_hi': cell.t_hi, 'mass': cell.mass}

        return {
            'cells': [row(cell) for cell in self.cells],
            'negatives': [row(cell) for cell in self.negatives],
            'negative_count': len(self.negatives),
            'total': self.total(),
        }


def _reverse_cumsum(table, axis):
    return np.flip(np.cumsum(np.flip(table, axis), axis), axis)


def _table(size, rows, cols, weights):
    out = np.zeros((size, size), dtype=np.int64)
    np.add.at(out, (rows, cols), weights)
    return out


def dabrowska_estimate(ds: Dataset) -> SurvivalSurface:
    """
    S(s, t) = S1(s) S2(t) prod_{u <= s, v <= t} [1 - L(u, v)] with
    L = (Λ10 Λ01 - Λ11) / ((1 - Λ10)(1 - Λ01)) over the risk set
    {z1 >= u, z2 >= v}; a factor with a vanishing denominator is skipped
    """
    if not len(ds):
        raise EstimatorError("Cannot estimate from an empty dataset")

    grid = ds.grid
    size = len(grid)
    obs = ds.observations
    p1 = np.array([grid.position(o.z1) for o in obs], dtype=np.int64)
    p2 = np.array([grid.position(o.z2) for o in obs], dtype=np.int64)
    d1 = np.array([o.d1 for o in obs], dtype=np.int64)
    d2 = np.array([o.d2 for o in obs], dtype=np.int64)

    at_risk = _reverse_cumsum(_reverse_cumsum(_table(size, p1, p2, 1), 0), 1)
    jumps1 = _reverse_cumsum(_table(size, p1, p2, d1), 1)
    jumps2 = _reverse_cumsum(_table(size, p1, p2, d2), 0)
    jumps12 = _table(size, p1, p2, d1 * d2)

    factors = [[1] * size for _ in range(size)]
    for u in range(size):
        for v in range(size):
            y = int(at_risk[u, v])
            if not y:
                continue
            l10 = Fraction(int(jumps1[u, v]), y)
            l01 = Fraction(int(jumps2[u, v]), y)
            l11 = Fraction(int(jumps12[u, v]), y)
            if l10 == 1 or l01 == 1:
                continue
            factors[u][v] = 1 - (l10 * l01 - l11) / ((1 - l10) * (1 - l01))

    s1 = product_limit(km_hazards([(o.z1, o.d1) for o in obs], grid))
    s2 = product_limit(km_hazards([(o.z2, o.d2) for o in obs], grid))

    values = [[1] + list(s2)]
    previous = [1] * size
    for u in range(size):
        running = 1
        row = [s1[u]]
        current = []
        for v in range(size):
            running = running * factors[u][v]
            current.append(previous[v] * running)
            row.append(s1[u] * s2[v] * current[v])
        previous = current
        values.append(row)

    logger.debug(f"Dabrowska surface on {size} grid times from {len(ds)} observations")
    return SurvivalSurface(grid, tuple(tuple(row) for row in values))


def mass_audit(s: SurvivalSurface) -> MassAudit:
    """Inclusion-exclusion mass of every adjacent-cell rectangle of the closure"""
    v = s.values
    size = len(s.grid)
    cells = []
    for k in range(size):
        for l in range(size):
            cells.append(CellMass(
                s_lo=s.label(k),
                s_hi=s.label(k + 1),
                t_lo=s.label(l),
                t_hi=s.label(l + 1),
                mass=v[k][l] - v[k + 1][l] - v[k][l + 1] + v[k + 1][l + 1],
            ))

    audit = MassAudit(tuple(cells))
    if audit.negatives:
        logger.info(f"Mass audit found {len(audit.negatives)} negative cells out of {len(cells)}")
    return audit

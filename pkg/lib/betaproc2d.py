"""
Bivariate Beta-process module - Prior construction, incomplete-likelihood
update, posterior-mean assembly of the joint mass, the noninformative
estimator, prior sampling and recovery of P from the law of the censored data

A joint mass is assembled through the minimum T* = T1 ∧ T2:
  - hazards of T* on the grid release mass at each point i
  - the released mass splits by ε (0: tie, 1: T1 is larger, 2: T2 is larger)
  - the ε = 1, 2 shares run through the conditional hazards of the larger
    coordinate over grid offsets d >= 1 past i
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from lib.config import parse_time, parse_weight
from lib.errors import ConfigError, ConsistencyError, EstimatorError, IdentifiabilityError, SamplingError
from lib.survdata import (
    CountStatistics, Dataset, Observation, Time, TimeGrid, Weight, counts_from_law,
)
from lib.univariate import BetaPrior1D, MassCurve, beta_posterior_1d, km, posterior_mean_hazard, ratio

logger = logging.getLogger(__name__)

STRATA = (1, 2)
RECOVERY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DefectRecord:
    """Mass a stratum left unassigned, placed at (t1, t2)"""
    stratum: str
    t1: Time
    t2: Time
    mass: Weight
    index: Optional[int] = None
    eps: Optional[int] = None

    def to_dict(self):
        return {
            'stratum': self.stratum,
            't1': self.t1,
            't2': self.t2,
            'mass': self.mass,
            'exact_mass': _exact_text(self.mass),
            'index': self.index,
            'eps': self.eps,
        }


@dataclass(frozen=True)
class BivariateMass:
    """
    Point masses on grid pairs plus the defect records of the strata that
    could not place all their mass; defects count as mass at their placement
    """
    grid: TimeGrid
    atoms: Mapping[Tuple[Time, Time], Weight]
    defects: Tuple[DefectRecord, ...] = ()

    def __post_init__(self):
        for point, value in self.atoms.items():
            if value < 0:
                raise ConsistencyError(f"Negative mass {value} at {point}")
        for record in self.defects:
            if record.mass < 0:
                raise ConsistencyError(f"Negative defect {record.mass} in stratum {record.stratum}")

    @cached_property
    def points(self) -> Dict[Tuple[Time, Time], Weight]:
        """Atoms and defect placements merged into one mass per point"""
        merged = defaultdict(int)
        for point, value in self.atoms.items():
            merged[point] += value
        for record in self.defects:
            merged[(record.t1, record.t2)] += record.mass
        return {point: value for point, value in sorted(merged.items()) if value}

    def defect_mass(self) -> Weight:
        return sum(record.mass for record in self.defects)

    def total(self) -> Weight:
        return sum(self.atoms.values()) + self.defect_mass()

    def survival(self, s: Optional[Time], t: Optional[Time]) -> Weight:
        """P{T1 > s, T2 > t}; None is below every time"""
        value = 0
        for (t1, t2), mass in self.points.items():
            if (s is None or t1 > s) and (t is None or t2 > t):
                value += mass
        return value


@dataclass(frozen=True)
class MassDecomposition:
    """A joint mass seen through its minimum"""
    grid: TimeGrid
    h_star: Tuple[Weight, ...]
    p_eps: Tuple[Tuple[Weight, Weight, Weight], ...]
    h_cond: Mapping[Tuple[int, int], Tuple[Weight, ...]]


@dataclass(frozen=True)
class BivariateBetaParams:
    """
    Parameters of the discrete bivariate Beta process
    star: Beta weights of the T* hazards
    dirichlet: weights of the ε split at each grid point
    cond: Beta weights of the conditional hazards of stratum (i, ε) over
          grid.tail(i); strata that are not listed carry no weight
    """
    grid: TimeGrid
    star: BetaPrior1D
    dirichlet: Tuple[Tuple[Weight, Weight, Weight], ...]
    cond: Mapping[Tuple[int, int], BetaPrior1D] = field(default_factory=dict)

    def __post_init__(self):
        if self.star.grid != self.grid:
            raise ConsistencyError("Star weights live on a different grid")
        if len(self.dirichlet) != len(self.grid):
            raise ConsistencyError(f"{len(self.dirichlet)} Dirichlet triples for a grid of {len(self.grid)} times")
        for t, weights in zip(self.grid, self.dirichlet):
            if len(weights) != 3 or any(w < 0 for w in weights):
                raise ConsistencyError(f"Invalid Dirichlet weights {weights} at {t}")
        for (i, eps), prior in self.cond.items():
            if eps not in STRATA or not 0 <= i < len(self.grid):
                raise ConsistencyError(f"No conditional stratum ({i}, {eps}) on this grid")
            if prior.grid != self.grid.tail(i):
                raise ConsistencyError(f"Conditional stratum ({i}, {eps}) is not defined over the times after {self.grid[i]}")

    @classmethod
    def zeros(cls, grid: TimeGrid) -> 'BivariateBetaParams':
        """The noninformative limit: no weight anywhere"""
        return cls(grid, BetaPrior1D.zeros(grid), tuple((0, 0, 0) for _ in grid), {})

    def scaled(self, factor) -> 'BivariateBetaParams':
        return BivariateBetaParams(
            self.grid,
            self.star.scaled(factor),
            tuple(tuple(w * factor for w in weights) for weights in self.dirichlet),
            {key: prior.scaled(factor) for key, prior in self.cond.items()},
        )

    def cond_for(self, i: int, eps: int) -> BetaPrior1D:
        prior = self.cond.get((i, eps))
        return prior if prior is not None else BetaPrior1D.zeros(self.grid.tail(i))


@dataclass(frozen=True)
class PriorGuess:
    """
    Prior guess F0 with its concentrations
    w_star, w_dir: one per grid position
    w_cond: per stratum (i, ε), one per offset d = 1 .. len(grid) - 1 - i
    """
    f0: BivariateMass
    w_star: Tuple[Weight, ...]
    w_dir: Tuple[Weight, ...]
    w_cond: Mapping[Tuple[int, int], Tuple[Weight, ...]]

    @classmethod
    def constant(cls, f0: BivariateMass, w, w_dir=None, w_cond=None) -> 'PriorGuess':
        size = len(f0.grid)
        w_dir = w if w_dir is None else w_dir
        w_cond = w if w_cond is None else w_cond
        return cls(
            f0=f0,
            w_star=(w,) * size,
            w_dir=(w_dir,) * size,
            w_cond={(i, eps): (w_cond,) * (size - 1 - i) for i in range(size) for eps in STRATA},
        )


def _hazards_from_masses(masses):
    hazards = []
    remaining = sum(masses)
    for value in masses:
        hazards.append(ratio(value, remaining))
        remaining -= value
    return tuple(hazards)


def decompose(mass: BivariateMass) -> MassDecomposition:
    """
    Reparametrize a joint mass into T* hazards, ε probabilities and conditional
    hazards; quantities conditioned on an empty event are 0
    """
    grid = mass.grid
    size = len(grid)
    star = [0] * size
    split = [[0, 0, 0] for _ in range(size)]
    cond = {(i, eps): [0] * (size - 1 - i) for i in range(size) for eps in STRATA}

    for (t1, t2), value in mass.points.items():
        p1, p2 = grid.position(t1), grid.position(t2)
        i = min(p1, p2)
        star[i] += value
        if p1 == p2:
            split[i][0] += value
        elif p1 > p2:
            split[i][1] += value
            cond[(i, 1)][p1 - i - 1] += value
        else:
            split[i][2] += value
            cond[(i, 2)][p2 - i - 1] += value

    return MassDecomposition(
        grid=grid,
        h_star=_hazards_from_masses(star),
        p_eps=tuple(tuple(ratio(part, star[i]) for part in split[i]) for i in range(size)),
        h_cond={key: _hazards_from_masses(values) for key, values in cond.items()},
    )


def _beta_from_guess(grid, weights, hazards):
    return BetaPrior1D(
        grid,
        tuple(w * h for w, h in zip(weights, hazards)),
        tuple(w * (1 - h) for w, h in zip(weights, hazards)),
    )


def prior_from_guess(g: PriorGuess) -> BivariateBetaParams:
    """Beta weights w·h0 and w·(1 - h0) around the hazards of F0; Dirichlet weights w·p0"""
    grid = g.f0.grid
    size = len(grid)

    total = g.f0.total()
    if abs(total - 1) > RECOVERY_TOLERANCE:
        raise ConfigError(f"Prior guess must total 1, got {total}")

    for name, weights in (('w_star', g.w_star), ('w_dir', g.w_dir)):
        if len(weights) != size:
            raise ConfigError(f"{name} needs {size} concentrations, got {len(weights)}")
        if any(not w > 0 for w in weights):
            raise ConfigError(f"{name} concentrations must be positive")

    dec = decompose(g.f0)
    cond = {}
    for i in range(size - 1):
        for eps in STRATA:
            weights = g.w_cond.get((i, eps))
            if weights is None or len(weights) != size - 1 - i:
                raise ConfigError(f"w_cond for stratum ({grid[i]}, eps={eps}) needs {size - 1 - i} concentrations")
            if any(not w > 0 for w in weights):
                raise ConfigError(f"w_cond concentrations must be positive (stratum {grid[i]}, eps={eps})")
            cond[(i, eps)] = _beta_from_guess(grid.tail(i), weights, dec.h_cond[(i, eps)])

    params = BivariateBetaParams(
        grid=grid,
        star=_beta_from_guess(grid, g.w_star, dec.h_star),
        dirichlet=tuple(tuple(w * p for p in dec.p_eps[i]) for i, w in enumerate(g.w_dir)),
        cond=cond,
    )
    logger.debug(f"Built prior on {size} grid times with {len(cond)} conditional strata")
    return params


def update(prior: BivariateBetaParams, c: CountStatistics) -> BivariateBetaParams:
    """
    Conjugate update under the incomplete likelihood
    Δ* = 0 observations enter only the risk sets of T*
    """
    if prior.grid != c.grid:
        raise ConsistencyError("Prior and counts live on different grids")

    star = beta_posterior_1d(prior.star, c.dn_star, c.y_star)
    dirichlet = tuple(
        tuple(w + n for w, n in zip(weights, counts))
        for weights, counts in zip(prior.dirichlet, c.n_eps)
    )

    cond = dict(prior.cond)
    for (i, eps), stratum in c.cond.items():
        base = prior.cond_for(i, eps)
        offsets = range(1, len(base.grid) + 1)
        cond[(i, eps)] = beta_posterior_1d(
            base,
            [stratum.dn(d) for d in offsets],
            [stratum.y(d) for d in offsets],
        )

    return BivariateBetaParams(prior.grid, star, dirichlet, cond)


def _cell(grid, i, eps, d):
    later = grid[i + d]
    return (later, grid[i]) if eps == 1 else (grid[i], later)


def _assemble(
    grid: TimeGrid,
    star_hazards: Iterable[Weight],
    star_end: int,
    eps_split: Callable[[int], Optional[Tuple[Weight, Weight, Weight]]],
    cond_hazards: Callable[[int, int], Tuple[Iterable[Tuple[int, Weight]], Optional[int]]],
) -> BivariateMass:
    """
    Product-form assembly shared by every estimator in this module
    eps_split(i) returns None when the split at i is undefined
    cond_hazards(i, eps) returns the nonzero conditional hazards as (d, h) in
    increasing d and the offset that receives the stratum's residual
    """
    size = len(grid)
    atoms = defaultdict(int)
    defects = []

    def release(i, released):
        t = grid[i]
        split = eps_split(i)
        if split is None:
            logger.warning(f"ε split undefined at {t}; withholding {float(released):.6g} as defect")
            defects.append(DefectRecord('dirichlet', t, t, released, index=i))
            return

        if split[0]:
            atoms[(t, t)] += released * split[0]

        for eps in STRATA:
            share = split[eps]
            if not share:
                continue
            remaining = released * share
            hazards, end = cond_hazards(i, eps)
            for d, hazard in hazards:
                value = remaining * hazard
                remaining = remaining * (1 - hazard)
                if value:
                    atoms[_cell(grid, i, eps, d)] += value
            if remaining:
                if i == size - 1:
                    point = (t, t)
                else:
                    point = _cell(grid, i, eps, end if end is not None else size - 1 - i)
                defects.append(DefectRecord('cond', point[0], point[1], remaining, index=i, eps=eps))

    survival = 1
    for i, hazard in enumerate(star_hazards):
        if not hazard:
            continue
        released = survival * hazard
        survival = survival * (1 - hazard)
        if released:
            release(i, released)

    if survival and size:
        t = grid[star_end]
        defects.append(DefectRecord('star', t, t, survival, index=star_end))

    return BivariateMass(grid, dict(atoms), tuple(defects))


def posterior_mean_mass(p: BivariateBetaParams, exact: bool = True) -> BivariateMass:
    """Joint mass with every hazard and split probability replaced by its posterior mean"""
    star_end = p.star.last_weighted()

    def eps_split(i):
        weights = p.dirichlet[i]
        total = sum(weights)
        if not total:
            return None
        return tuple(ratio(w, total, exact) for w in weights)

    def cond_hazards(i, eps):
        prior = p.cond.get((i, eps))
        if prior is None:
            return (), None
        hazards = posterior_mean_hazard(prior, exact).h
        end = prior.last_weighted()
        return [(d, h) for d, h in enumerate(hazards, start=1) if h], (None if end is None else end + 1)

    return _assemble(
        p.grid,
        posterior_mean_hazard(p.star, exact).h,
        len(p.grid) - 1 if star_end is None else star_end,
        eps_split,
        cond_hazards,
    )


def noninformative_estimate(c: CountStatistics, exact: bool = True) -> BivariateMass:
    """
    Posterior mean under the zero prior, computed from the empirical ratios
    directly; equal to posterior_mean_mass(update(zeros, c))
    """
    if not c.y_star or not c.y_star[0]:
        raise EstimatorError("Cannot estimate from an empty dataset")

    star_end = max(i for i, y in enumerate(c.y_star) if y)

    def eps_split(i):
        total = c.dn_star[i]
        if not total:
            return None
        return tuple(ratio(n, total, exact) for n in c.n_eps[i])

    def cond_hazards(i, eps):
        stratum = c.cond.get((i, eps))
        if stratum is None:
            return (), None
        hazards = [(d, ratio(events, at_risk, exact)) for d, events, at_risk in stratum.event_offsets()]
        return hazards, stratum.last_offset

    mass = _assemble(
        c.grid,
        (ratio(events, at_risk, exact) for events, at_risk in zip(c.dn_star, c.y_star)),
        star_end,
        eps_split,
        cond_hazards,
    )
    logger.debug(f"Noninformative estimate: {len(mass.atoms)} atoms, {len(mass.defects)} defect records")
    return mass


def survival_surface(m: BivariateMass, s: Optional[Time], t: Optional[Time]) -> Weight:
    return m.survival(s, t)


def check_proper(m: BivariateMass, tolerance=RECOVERY_TOLERANCE) -> bool:
    """Nonnegative entries totaling 1 within tolerance"""
    if any(value < 0 for value in m.atoms.values()) or any(r.mass < 0 for r in m.defects):
        return False
    return abs(m.total() - 1) <= tolerance


def recover_distribution(joint: Mapping[Observation, Weight]) -> BivariateMass:
    """
    Recover P from the exact law of the censored observations
    Only the Δ* = 1 part of the law is used; any mass the estimator must
    withhold means the censoring law does not reach past it
    """
    total = sum(joint.values())
    if abs(total - 1) > RECOVERY_TOLERANCE:
        raise ConsistencyError(f"Law of the observations sums to {total}, not 1")

    mass = noninformative_estimate(counts_from_law(joint))
    lost = mass.defect_mass()
    if lost > RECOVERY_TOLERANCE:
        where = ', '.join(f"{r.stratum} at ({r.t1}, {r.t2})" for r in mass.defects)
        raise IdentifiabilityError(
            f"Mass {float(lost):.6g} is not identifiable from the censored law ({where}); "
            f"the censoring distribution does not extend beyond it"
        )
    return mass


def _draw_beta(rng, a, b):
    if a > 0 and b > 0:
        return float(rng.beta(float(a), float(b)))
    if a > 0:
        return 1.0
    if b > 0:
        return 0.0
    return None


def _draw_dirichlet(rng, weights):
    if not sum(weights):
        return None
    gammas = [float(rng.gamma(float(w))) if w > 0 else 0.0 for w in weights]
    total = sum(gammas)
    if not total:
        # every positive shape underflowed; the largest weight takes it all
        top = max(range(3), key=lambda k: weights[k])
        return tuple(1.0 if k == top else 0.0 for k in range(3))
    return tuple(value / total for value in gammas)


def sample_prior(p: BivariateBetaParams, rng) -> BivariateMass:
    """
    Draw a joint mass from the prior
    Draw order is fixed (T* hazards, Dirichlet splits, then strata in sorted
    order) so a seed determines the result; a point without weight fails only
    when the draw would need it
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    grid = p.grid
    size = len(grid)
    star = [_draw_beta(rng, a, b) for a, b in zip(p.star.a, p.star.b)]
    splits = [_draw_dirichlet(rng, weights) for weights in p.dirichlet]
    strata = {
        key: [_draw_beta(rng, a, b) for a, b in zip(prior.a, prior.b)]
        for key, prior in sorted(p.cond.items())
    }

    def star_hazards():
        for t, hazard in zip(grid, star):
            if hazard is None:
                raise SamplingError(f"T* hazard at {t} has no Beta weight")
            yield hazard
            if hazard == 1:
                break

    def eps_split(i):
        if splits[i] is None:
            raise SamplingError(f"Dirichlet weights are all zero at {grid[i]}")
        return splits[i]

    def cond_hazards(i, eps):
        if i == size - 1:
            return (), None
        drawn = strata.get((i, eps))
        if drawn is None:
            raise SamplingError(f"Stratum ({grid[i]}, eps={eps}) has no Beta weights")

        def walk():
            for d, hazard in enumerate(drawn, start=1):
                if hazard is None:
                    raise SamplingError(f"Conditional hazard at offset {d} of stratum ({grid[i]}, eps={eps}) has no Beta weight")
                if hazard:
                    yield d, hazard
                if hazard == 1:
                    return

        return walk(), len(drawn)

    star_end = p.star.last_weighted()
    return _assemble(grid, star_hazards(), size - 1 if star_end is None else star_end, eps_split, cond_hazards)


def marginal_curves(ds: Dataset) -> Tuple[MassCurve, MassCurve]:
    return (
        km([(o.z1, o.d1) for o in ds.observations], ds.grid),
        km([(o.z2, o.d2) for o in ds.observations], ds.grid),
    )


def marginal_product_estimate(ds: Dataset) -> BivariateMass:
    """Product of the two marginal Kaplan-Meier curves; defects of either margin stay defects"""
    curves = marginal_curves(ds)

    margins = []
    for curve in curves:
        entries = [(t, value, False) for t, value in zip(curve.grid, curve.mass) if value]
        if curve.defect:
            entries.append((curve.defect_at, curve.defect, True))
        margins.append(entries)

    atoms = defaultdict(int)
    defects = []
    for t1, m1, defect1 in margins[0]:
        for t2, m2, defect2 in margins[1]:
            if defect1 or defect2:
                defects.append(DefectRecord('marginal', t1, t2, m1 * m2))
            else:
                atoms[(t1, t2)] += m1 * m2

    return BivariateMass(ds.grid, dict(atoms), tuple(defects))


def _exact_text(value):
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return str(value)
    return None


def mass_to_dict(m: BivariateMass):
    """JSON form; exact rational masses are repeated as 'p/q' strings"""
    atoms = sorted(m.atoms.items())
    return {
        'grid': list(m.grid),
        'atoms': [[t1, t2, value] for (t1, t2), value in atoms],
        'exact_masses': [_exact_text(value) for _, value in atoms],
        'defects': [record.to_dict() for record in m.defects],
        'total': m.total(),
    }


def _weight_from(exact, value):
    return parse_weight(exact) if exact is not None else parse_weight(value)


def _stratum_key(key):
    """'i,eps' text key of a conditional stratum"""
    try:
        i, eps = (int(part) for part in str(key).split(','))
    except ValueError:
        raise ConfigError(f"Stratum keys are 'i,eps' integer pairs, got {key!r}") from None
    if eps not in STRATA or i < 0:
        raise ConfigError(f"No conditional stratum {key!r}")
    return i, eps


def _defect_from_dict(entry):
    try:
        return DefectRecord(
            stratum=entry['stratum'],
            t1=parse_time(entry['t1']),
            t2=parse_time(entry['t2']),
            mass=_weight_from(entry.get('exact_mass'), entry['mass']),
            index=entry.get('index'),
            eps=entry.get('eps'),
        )
    except (KeyError, TypeError, AttributeError):
        raise ConfigError(f"Defects need stratum, t1, t2 and mass, got {entry!r}") from None


def mass_from_dict(doc) -> BivariateMass:
    """
    Inverse of mass_to_dict; also reads hand-written documents that list only
    atoms (the grid is then the times the atoms use)
    """
    if not isinstance(doc, dict) or not isinstance(doc.get('atoms'), list):
        raise ConfigError("A mass document needs an 'atoms' list")
    rows = doc['atoms']

    exact = doc.get('exact_masses') or [None] * len(rows)
    if not isinstance(exact, list) or len(exact) != len(rows):
        raise ConfigError("exact_masses must list one entry per atom")

    atoms = defaultdict(int)
    for row, text in zip(rows, exact):
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise ConfigError(f"Atoms are [t1, t2, mass] triples, got {row!r}")
        atoms[(parse_time(row[0]), parse_time(row[1]))] += _weight_from(text, row[2])

    entries = doc.get('defects', [])
    if not isinstance(entries, list):
        raise ConfigError("defects must be a list")
    defects = tuple(_defect_from_dict(entry) for entry in entries)

    if 'grid' in doc:
        if not isinstance(doc['grid'], list):
            raise ConfigError("grid must be a list of times")
        grid = TimeGrid(parse_time(t) for t in doc['grid'])
    else:
        grid = TimeGrid.from_times(
            [t for point in atoms for t in point] + [t for r in defects for t in (r.t1, r.t2)]
        )

    for t1, t2 in list(atoms) + [(r.t1, r.t2) for r in defects]:
        grid.position(t1)
        grid.position(t2)

    return BivariateMass(grid, dict(atoms), defects)


def params_to_dict(p: BivariateBetaParams):
    return {
        'grid': list(p.grid),
        'star': p.star.to_dict(),
        'dirichlet': [list(weights) for weights in p.dirichlet],
        'cond': {
            f"{i},{eps}": prior.to_dict()
            for (i, eps), prior in sorted(p.cond.items())
        },
    }


def params_from_dict(doc) -> BivariateBetaParams:
    grid = TimeGrid(parse_time(t) for t in doc['grid'])
    cond = {}
    for key, entry in doc.get('cond', {}).items():
        i, eps = _stratum_key(key)
        cond[(i, eps)] = BetaPrior1D(
            grid.tail(i),
            tuple(parse_weight(w) for w in entry['a']),
            tuple(parse_weight(w) for w in entry['b']),
        )
    return BivariateBetaParams(
        grid=grid,
        star=BetaPrior1D(
            grid,
            tuple(parse_weight(w) for w in doc['star']['a']),
            tuple(parse_weight(w) for w in doc['star']['b']),
        ),
        dirichlet=tuple(tuple(parse_weight(w) for w in weights) for weights in doc['dirichlet']),
        cond=cond,
    )


def _broadcast(value, size, name):
    if isinstance(value, list):
        if len(value) != size:
            raise ConfigError(f"{name} needs {size} entries, got {len(value)}")
        return tuple(parse_weight(w) for w in value)
    return (parse_weight(value),) * size


def guess_from_dict(doc, grid: Optional[TimeGrid] = None) -> PriorGuess:
    """
    Prior guess document:
      f0: mass document (atoms [t1, t2, mass])
      w_star, w_dir: a number or one entry per grid time
      w_cond: a number, or a mapping "i,eps" -> list over offsets
    The guess is extended to `grid` when one is given (e.g. the data grid)
    """
    if 'f0' not in doc:
        raise ConfigError("Prior document needs an 'f0' mass")

    f0 = mass_from_dict(doc['f0'])
    if grid is not None:
        grid = grid.union(f0.grid)
        f0 = BivariateMass(grid, f0.atoms, f0.defects)
    size = len(f0.grid)

    w = doc.get('w', 1)
    w_star = _broadcast(doc.get('w_star', w), size, 'w_star')
    w_dir = _broadcast(doc.get('w_dir', w), size, 'w_dir')

    raw_cond = doc.get('w_cond', w)
    if isinstance(raw_cond, dict):
        w_cond = {}
        for key, values in raw_cond.items():
            i, eps = _stratum_key(key)
            if i >= size:
                raise ConfigError(f"w_cond[{key}] is past the last grid time")
            w_cond[(i, eps)] = _broadcast(values, size - 1 - i, f"w_cond[{key}]")
    else:
        w_cond = {
            (i, eps): _broadcast(raw_cond, size - 1 - i, 'w_cond')
            for i in range(size) for eps in STRATA
        }

    return PriorGuess(f0, w_star, w_dir, w_cond)

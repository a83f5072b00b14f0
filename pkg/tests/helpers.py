"""Shared test data and small builders"""
from decimal import Decimal
from pathlib import Path

from lib.betaproc2d import BivariateBetaParams
from lib.univariate import BetaPrior1D

DATA = Path(__file__).resolve().parent.parent / 'data'

EXAMPLE_CSV = """z1,d1,z2,d2
.51,1,.02,1
.11,1,.62,0
.24,0,.24,0
.68,1,.68,1
"""


def D(text):
    return Decimal(text)


def ones_prior(grid):
    """Weight 1 on every Beta and Dirichlet parameter"""
    size = len(grid)
    return BivariateBetaParams(
        grid=grid,
        star=BetaPrior1D(grid, (1,) * size, (1,) * size),
        dirichlet=tuple((1, 1, 1) for _ in range(size)),
        cond={
            (i, eps): BetaPrior1D(grid.tail(i), (1,) * (size - 1 - i), (1,) * (size - 1 - i))
            for i in range(size - 1) for eps in (1, 2)
        },
    )

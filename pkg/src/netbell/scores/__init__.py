"""Bell scores and closed-form maxima."""

from .bell import (
    BellInequality,
    BellScore,
    CHSHInequality,
    ChainInequality,
    StarInequality,
    chain_score,
    chsh_score,
    cost,
    get_inequality,
    i_ny,
    star_score,
)
from .oracle import (
    UnsupportedCurveError,
    correlation_matrix_T,
    curve,
    horodecki_max_chsh,
    max_chain_score,
    max_star_score,
)

__all__ = [
    "BellInequality",
    "BellScore",
    "CHSHInequality",
    "ChainInequality",
    "StarInequality",
    "UnsupportedCurveError",
    "chain_score",
    "chsh_score",
    "correlation_matrix_T",
    "cost",
    "curve",
    "get_inequality",
    "horodecki_max_chsh",
    "i_ny",
    "max_chain_score",
    "max_star_score",
    "star_score",
]

"""Dense natural-gradient optimization lab.

Thin wrapper around the C++ core. Arrays follow the core's convention:
matrices are (rows, cols) with one column per sample.
"""

from ._core import (
    Network,
    NgdlabError,
    default_alpha_grid,
    empirical_fim,
    grid_search,
    kl_divergence,
    layer_gram,
    least_squares_loss,
    make_synthetic,
    score,
    train,
    verify,
    woodbury_check,
    __version__,
)

__all__ = [
    "Network",
    "NgdlabError",
    "default_alpha_grid",
    "empirical_fim",
    "grid_search",
    "kl_divergence",
    "layer_gram",
    "least_squares_loss",
    "make_synthetic",
    "score",
    "train",
    "verify",
    "woodbury_check",
    "__version__",
]

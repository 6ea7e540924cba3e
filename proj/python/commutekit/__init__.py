"""Commuting and accessibility analytics from mobile-network events.

Thin Python surface over the C++ core: anchor weight tables, inequality and
accessibility metrics, bivariate LISA, the cluster-composition statistics, the
synthetic-city generator, and the full pipeline runner.
"""

from ._core import (
    __version__,
    bivariate_lisa,
    dunn_posthoc,
    fit_multinomial,
    generate_city,
    gini,
    holm_sidak,
    home_weight,
    kruskal_wallis,
    palma_ratio,
    quartiles,
    run_pipeline,
    work_weight,
)

__all__ = [
    "__version__",
    "bivariate_lisa",
    "dunn_posthoc",
    "fit_multinomial",
    "generate_city",
    "gini",
    "holm_sidak",
    "home_weight",
    "kruskal_wallis",
    "palma_ratio",
    "quartiles",
    "run_pipeline",
    "work_weight",
]

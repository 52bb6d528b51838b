"""Answer-to-sequence data toolkit.

SQL synthesis and execution over small in-memory databases, unified
graph transformation with node segment ids, the template describer, and
coverage/repetition metrics. The heavy lifting lives in the compiled
``_core`` extension; this package re-exports it.
"""

from ._core import (  # noqa: F401
    __version__,
    build_graph,
    canonical_sql,
    classify_hardness,
    clean_tables,
    coverage,
    dataset_stats,
    execute,
    generate_sql,
    infer_column_types,
    link_tables,
    lne_forward,
    repetition,
    sample_dataset,
    sanitize_sensitive,
    temp_describe,
    validate,
)

__all__ = [
    "__version__",
    "build_graph",
    "canonical_sql",
    "classify_hardness",
    "clean_tables",
    "coverage",
    "dataset_stats",
    "execute",
    "generate_sql",
    "infer_column_types",
    "link_tables",
    "lne_forward",
    "repetition",
    "sample_dataset",
    "sanitize_sensitive",
    "temp_describe",
    "validate",
]

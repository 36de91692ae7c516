"""Tools for comparing a human-edited encyclopedia with a generative-AI counterpart.

The package is organized as a pipeline of independent modules:

- :mod:`wikigrok.ingest` — parse raw platform artifacts (HTML snapshots, sitemaps,
  edit-request records, pageview and revision dumps) and pair pages across platforms.
- :mod:`wikigrok.features` — ordinal activity levels (iterative mean-based binning),
  Gini concentration, editor fractions.
- :mod:`wikigrok.glm` — logistic regression (IRLS) over discretized page features.
- :mod:`wikigrok.complexity` — editor/page fitness–complexity fixed point and
  cross-platform rank comparison.
- :mod:`wikigrok.narrative` — signed, directed, weighted narrative multigraphs built
  from predicate–ARG0–ARG1 triplets; sentiment balances and role displacement.
- :mod:`wikigrok.framing` — lead-section extraction, sentence splitting, structured
  LLM annotation, per-page framing scores.
- :mod:`wikigrok.stats` — rank-correlation utilities shared by the above.
- :mod:`wikigrok.cli` — subcommand orchestration over on-disk artifacts.
"""

__version__ = "0.1.0"

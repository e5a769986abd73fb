"""Multi-source book impact scoring engine.

Extracts fifteen evaluation metrics from four evidence sources (book
contents, reviews, citations, usage), weights them with an expert-driven
hierarchical scheme, and fuses them into comprehensive and per-source impact
rankings with fine-grained per-book reports and a what-if weighting service.
"""

__version__ = "0.1.0"

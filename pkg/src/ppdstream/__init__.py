"""Stream-based postpartum-depression screening toolkit.

Submodules:

- ``records``: domain types, schema-mapped CSV ingestion
- ``encoding``: one-hot feature expansion (53 Boolean features)
- ``selection``: streaming variance-threshold feature selection
- ``learners``: five incremental classifiers (GNB, LR, ALMA, HATC, ARFC)
- ``evaluation``: prequential harness, streaming metrics, grid search
- ``counterfactual``: minimal-change explanations and rendering
- ``dialogue``: topic-driven conversation over a pluggable chat backend
- ``checkpoint``: model + selector persistence
- ``service`` / ``cli``: HTTP session API and command-line entry points
"""

__version__ = "0.1.0"

"""
tricolor: graph 3-coloring with a hybrid self-adaptive evolutionary algorithm, baseline
solvers, a planted-instance generator and a phase-transition benchmark harness.
"""

__version__ = "1.0.0"

"""
Radial Yamabe

Sign-changing solutions of -div(a grad u) + b u = lambda f |u|^(2#-2) u on
radial model manifolds:
- core: configuration, logging, exceptions, output helpers
- numerics: special functions, discretization, solvers, test functions, pipeline
- cli: command line interface
"""

__version__ = "1.0.0"
__description__ = "Sign-changing solutions of Yamabe-type equations on radial model manifolds"

__all__ = [
    "__version__",
    "__description__"
]

"""Covariant phase-space structures on Galilei and Einstein spacetimes.

The package builds, from a chart-level model file, the phase-space
geometry of a classical spacetime (contact structure, joined connection,
cosymplectic pair, special phase functions and their bracket) and the
representation of special functions by Hermitian vector fields of a
quantum line bundle.  Every structural law it claims is registered as a
named check in `covphase.suites` and runnable through the `covphase`
command line tool.
"""

from .modelspec import Model, load_builtin, load_model
from .galilei import GalileiPhase
from .einstein import EinsteinPhase
from .orbit import integrate_orbit
from .suites import run_suite, suite_names

__version__ = "0.1.0"

__all__ = [
    "Model", "load_builtin", "load_model",
    "GalileiPhase", "EinsteinPhase",
    "integrate_orbit", "run_suite", "suite_names",
]

"""Gain-cavity-assisted (PT-symmetric) cavity optomechanical magnetometry.

Modules
-------
params    parameter set, defaults and config files
pteigen   eigenfrequencies of the gain-loss cavity pair
steady    self-consistent steady state
fwm       analytic lower-sideband (four-wave mixing) intensity
sensing   peak intensity against field, contrast, sensitivity
oracle    harmonic-balance and time-domain cross-checks
cli       command-line front end
"""

from .params import SystemParams, paper_defaults, scale_zeta, validate

__version__ = "0.1.0"
__all__ = ["SystemParams", "paper_defaults", "scale_zeta", "validate"]

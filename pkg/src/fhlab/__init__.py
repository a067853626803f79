"""High-precision laboratory for Hankel determinants of a Hermite weight
with a combined root/jump singularity, the associated orthogonal
polynomials and equilibrium measures, their large-n asymptotics, the
Painleve-IV tau-function bridge, and the Airy/Bessel model Riemann-Hilbert
parametrices."""

from .mpnum import PrecContext, BigReal

__all__ = ["PrecContext", "BigReal"]
__version__ = "0.1.0"

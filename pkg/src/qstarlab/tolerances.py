"""Pinned numerical tolerances.

All thresholds are relative: each check states the scale it multiplies the
tolerance by (Frobenius norm of the element, top eigenvalue of the matrix
under test, norm of a right-hand side).  The defaults are deliberate choices,
not guesses, and the acceptance suite runs at exactly these values.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances shared by every check in the package."""

    # span membership, relative to the Frobenius norm of the tested element
    membership: float = 1e-9
    # structural residuals (closure, associativity, involution), relative
    structure: float = 1e-9
    # eigenvalue floor for positive-semidefinite tests, relative to the
    # largest eigenvalue magnitude
    psd: float = 1e-8
    # singular values above rank * sigma_max count toward numerical rank
    rank: float = 1e-10
    # weak-product residual, relative to the norm of the system RHS
    weak: float = 1e-8
    # agreement between independent routes to the same number, relative
    cross_check: float = 1e-8
    # form invariance and extensional form equality, relative
    form: float = 1e-9
    # the C*-type identity on weak products, relative
    cstar: float = 1e-7

    def override(self, **kwargs) -> "ToleranceConfig":
        """Return a copy with the given fields replaced."""
        return replace(self, **kwargs)


DEFAULT_TOL = ToleranceConfig()

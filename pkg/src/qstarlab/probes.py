"""Deterministic probe sets used by cross-checking routines and the CLI."""

from __future__ import annotations

import numpy as np

from .algebra import QuasiAlgebraInstance

DEFAULT_SEED = 0xA11CE


def standard_probes(alg: QuasiAlgebraInstance, count: int = 32,
                    seed: int = DEFAULT_SEED):
    """Basis elements, the unit, seeded unit-size random elements, and the
    adjoints of all of the above, in a reproducible order."""
    probes = [alg.basis_element(i) for i in range(alg.dim)]
    probes.append(alg.unit)
    rng = np.random.default_rng(seed)
    for _ in range(count):
        c = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
        e = alg.element(c)
        nf = e.norm_frobenius()
        if nf > 0:
            probes.append(e * (1.0 / nf))
    probes.extend([p.star() for p in list(probes)])
    return probes

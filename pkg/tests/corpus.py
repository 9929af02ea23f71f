"""Random instance corpus with provable validity.

Construction: partition {0..n-1} into contiguous blocks; the subalgebra
is the block-diagonal matrix algebra (identity plus the within-block
units, minus the top-left unit which the identity replaces); the full
span adds the units of a symmetric selection of off-diagonal block
rectangles.  This pattern is closed under the module actions and the
involution by construction.

Seed forms are rank-one vector states whose vector is nonzero inside
every block.  For those, the subalgebra orbit of the vector is the whole
coordinate space, so density always holds, and the depth-one twist
closure pins every column of a null element, so the balanced family is
always sufficient.  An optional unitary conjugation and a mild mixing of
the non-subalgebra basis rows preserve all of that while roughing up the
coordinates.
"""

from __future__ import annotations

import numpy as np

from qstarlab import FormFamily, IpsForm, QuasiAlgebraInstance


def _blocks(rng, n):
    cuts = sorted(rng.choice(range(1, n), size=rng.integers(0, min(n - 1, 2) + 1),
                             replace=False)) if n > 1 else []
    edges = [0] + list(cuts) + [n]
    return [list(range(edges[i], edges[i + 1])) for i in range(len(edges) - 1)]


def random_instance(rng, n_min=2, n_max=4, conjugate=True, mix=True,
                    full=False, label=""):
    """One random instance; returns (instance, ximaker) where ximaker draws
    admissible vector-state vectors for it."""
    n = int(rng.integers(n_min, n_max + 1))
    if full:
        blocks = [list(range(n))]
    else:
        blocks = _blocks(rng, n)

    block_of = {}
    for p, blk in enumerate(blocks):
        for i in blk:
            block_of[i] = p

    pairs = set()
    for p in range(len(blocks)):
        pairs.add((p, p))
    for p in range(len(blocks)):
        for q in range(p + 1, len(blocks)):
            if full or rng.random() < 0.6:
                pairs.add((p, q))
                pairs.add((q, p))

    U = np.eye(n, dtype=complex)
    if conjugate:
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        U, _ = np.linalg.qr(Z)

    def unit_mat(i, j):
        E = np.zeros((n, n), dtype=complex)
        E[i, j] = 1.0
        return U @ E @ U.conj().T

    basis = [np.eye(n, dtype=complex)]
    a0_indices = [0]
    for p, q in sorted(pairs):
        for i in blocks[p]:
            for j in blocks[q]:
                if (i, j) == (0, 0):
                    continue
                basis.append(unit_mat(i, j))
                if p == q:
                    a0_indices.append(len(basis) - 1)

    if mix and len(basis) > 1:
        a0_set = set(a0_indices)
        free = [k for k in range(1, len(basis)) if k not in a0_set]
        for k in free:
            other = free[int(rng.integers(0, len(free)))]
            # keep the span and the involution symmetry of the span intact
            basis[k] = basis[k] + 0.15 * float(rng.random()) * basis[other]

    inst = QuasiAlgebraInstance(basis, a0_indices=a0_indices, unit_index=0,
                                label=label or f"corpus-n{n}-b{len(blocks)}")

    def ximaker():
        xi = np.zeros(n, dtype=complex)
        for blk in blocks:
            while True:
                v = rng.standard_normal(len(blk)) + 1j * rng.standard_normal(len(blk))
                if np.linalg.norm(v) > 0.3:
                    break
            xi[blk] = v / np.linalg.norm(v)
        return U @ xi

    return inst, ximaker


def random_family(rng, inst, ximaker, n_seeds=1, as_gram=False, label=""):
    """Balanced family of blockwise-nonzero rank-one vector states."""
    gens = []
    for s in range(max(1, n_seeds)):
        xi = ximaker().reshape(-1, 1)
        phi = IpsForm("vector_state", xi @ xi.conj().T, label=f"xi{s}")
        if as_gram:
            phi = IpsForm("gram", phi.gram(inst), label=f"xi{s}g")
        gens.append(phi)
    return FormFamily(gens, balanced=True, label=label or "corpus-family")


def make_corpus(count=10, seed=0xC0FFEE, n_min=2, n_max=4):
    """Deterministic list of (instance, family) pairs covering the options."""
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(count):
        full = idx % 4 == 3
        inst, ximaker = random_instance(
            rng, n_min=n_min, n_max=n_max,
            conjugate=idx % 2 == 1, mix=idx % 3 == 1, full=full,
            label=f"corpus{idx}")
        fam = random_family(rng, inst, ximaker, n_seeds=1 + idx % 2,
                            as_gram=idx % 5 == 4, label=f"fam{idx}")
        out.append((inst, fam))
    return out

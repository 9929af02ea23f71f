"""Discrete weighted L^p model on k points.

Functions are diagonal matrices acting on themselves; the subalgebra is
the whole algebra.  A nonnegative weight vector w with
(sum_i w_i^s m_i)^(1/s) <= 1, where s = p/(p-2) (s = infinity at p = 2),
induces the form

    phi_w(f, g) = sum_i f_i conj(g_i) w_i m_i.

Sweeping w over the unit ball of the conjugate index recovers the p-norm:
sup_w phi_w(f, f) equals the squared L^p(m) norm of f, attained at
w ~ |f|^(p-2) (at w = 1 when p = 2).  The supremum is computed in closed
form and double-checked by a feasible-ascent oracle that can only ever
undershoot it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Element, QuasiAlgebraInstance
from .errors import BadExponent, BadMeasure, ZeroFunction
from .forms import VECTOR_STATE, FormFamily, IpsForm
from .tolerances import DEFAULT_TOL, ToleranceConfig


def conjugate_index(p: float) -> float:
    """s with 2/p + 1/s = 1; infinity at p = 2."""
    p = float(p)
    if not np.isfinite(p) or p < 2.0:
        raise BadExponent(f"exponent must satisfy p >= 2, got {p}")
    if p == 2.0:
        return float("inf")
    return p / (p - 2.0)


def _check_masses(masses):
    m = np.asarray(masses, dtype=float)
    if m.ndim != 1 or m.size == 0:
        raise BadMeasure("masses must be a non-empty vector")
    if not np.all(np.isfinite(m)) or np.any(m <= 0.0):
        raise BadMeasure("masses must be finite and strictly positive")
    return m


def build_lp_instance(k: int, label: str = "") -> QuasiAlgebraInstance:
    """Diagonal algebra on k points; the unit is the first basis element."""
    if k < 1:
        raise BadMeasure(f"need at least one point, got k={k}")
    basis = [np.eye(k, dtype=complex)]
    for i in range(1, k):
        E = np.zeros((k, k), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    return QuasiAlgebraInstance(basis, a0_indices=range(k), unit_index=0,
                                label=label or f"lp-diag-{k}")


@dataclass
class DiscreteLpAlgebra:
    """Instance plus measure; functions enter and leave as value vectors."""

    masses: np.ndarray
    inst: QuasiAlgebraInstance

    @classmethod
    def build(cls, masses):
        m = _check_masses(masses)
        return cls(masses=m, inst=build_lp_instance(m.size))

    @property
    def k(self) -> int:
        return self.masses.size

    def element(self, values) -> Element:
        v = np.asarray(values, dtype=complex)
        if v.shape != (self.k,):
            raise BadMeasure(f"expected {self.k} point values, got shape {v.shape}")
        coeffs = np.empty(self.k, dtype=complex)
        coeffs[0] = v[0]
        coeffs[1:] = v[1:] - v[0]
        return self.inst.element(coeffs)

    def values(self, a: Element):
        return np.diagonal(a.matrix).copy()

    def weight_norm(self, w, p: float) -> float:
        """The conjugate-index size of a weight vector against the measure."""
        s = conjugate_index(p)
        w = np.asarray(w, dtype=float)
        if np.isinf(s):
            return float(np.abs(w).max(initial=0.0))
        return float(np.sum(np.abs(w) ** s * self.masses) ** (1.0 / s))

    def weight_form(self, w, label: str = "") -> IpsForm:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.k,) or np.any(w < 0.0):
            raise BadMeasure("weights must be nonnegative, one per point")
        S = np.diag((w * self.masses).astype(complex))
        return IpsForm(VECTOR_STATE, S, label=label or "weight")

    def point_family(self, p: float, label: str = "") -> FormFamily:
        """Forms of the sphere-normalized point weights; quantifies over the
        listed weights only, so it is stored without the closure policy."""
        s = conjugate_index(p)
        gens = []
        for i in range(self.k):
            w = np.zeros(self.k)
            w[i] = 1.0 if np.isinf(s) else self.masses[i] ** (-1.0 / s)
            gens.append(self.weight_form(w, label=f"point{i}"))
        return FormFamily(gens, balanced=False, label=label or f"points-p{p:g}")

    def lp_norm(self, values, p: float) -> float:
        v = np.abs(np.asarray(values, dtype=complex))
        p = float(p)
        conjugate_index(p)  # validates the exponent range
        return float(np.sum(v ** p * self.masses) ** (1.0 / p))


def holder_sup(values, p: float, masses, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Closed-form supremum of phi_w(f, f) over the admissible weight ball.

    Returns the supremum (the squared p-norm), the seminorm (its square
    root), the extremal weight, and the value the extremal weight actually
    attains as a consistency field.
    """
    model = DiscreteLpAlgebra.build(masses)
    s = conjugate_index(p)
    v = np.abs(np.asarray(values, dtype=complex))
    if v.shape != (model.k,):
        raise BadMeasure(f"expected {model.k} point values, got shape {v.shape}")
    if float(v.max(initial=0.0)) == 0.0:
        raise ZeroFunction("the extremal weight is undefined for the zero function")

    norm_p = model.lp_norm(values, p)
    sup_val = norm_p ** 2
    if np.isinf(s):
        w_star = np.ones(model.k)
    else:
        w_star = v ** (p - 2.0) / norm_p ** (p - 2.0)
    attained = float(np.sum(v ** 2 * w_star * model.masses))
    return {
        "p": float(p),
        "conjugate_index": s,
        "sup": sup_val,
        "seminorm": norm_p,
        "extremal_weight": w_star,
        "attained": attained,
        "weight_ball_norm": model.weight_norm(w_star, p),
    }


def weight_ascent_oracle(values, p: float, masses, sweeps: int = 80,
                         seed: int = 0xA11CE) -> dict:
    """Feasible-ascent estimate of the weight-ball supremum.

    Every iterate stays on the admissible sphere, so the best value seen
    is a genuine lower bound for the supremum.  The ascent cycles over
    coordinate pairs and solves each two-coordinate slice of the sphere
    exactly by golden-section search; the slice problems are concave, the
    sphere has no flat spots, and the cycle stalls only at the optimum.
    """
    model = DiscreteLpAlgebra.build(masses)
    s = conjugate_index(p)
    v = np.abs(np.asarray(values, dtype=complex))
    g = v ** 2 * model.masses
    m = model.masses

    def value(w):
        return float(np.sum(g * w))

    rng = np.random.default_rng(seed)

    if np.isinf(s):
        best_w = np.ones(model.k)
        best = value(best_w)
        for _ in range(4):
            w = rng.uniform(0.0, 1.0, size=model.k)
            if value(w) > best:
                best, best_w = value(w), w
        return {"sup_estimate": best, "weight": best_w, "sweeps": 0}

    def normalize(w):
        w = np.clip(w, 0.0, None)
        nn = float(np.sum(w ** s * m) ** (1.0 / s))
        if nn == 0.0:
            w = np.ones(model.k)
            nn = float(np.sum(w ** s * m) ** (1.0 / s))
        return w / nn

    golden = (np.sqrt(5.0) - 1.0) / 2.0

    def slice_best(w, i, j):
        # redistribute the i/j share of the constraint along the slice
        budget = w[i] ** s * m[i] + w[j] ** s * m[j]
        if budget <= 0.0:
            budget = 1e-12

        def eval_t(t):
            wi = (t * budget / m[i]) ** (1.0 / s)
            wj = ((1.0 - t) * budget / m[j]) ** (1.0 / s)
            return g[i] * wi + g[j] * wj, wi, wj

        lo, hi = 0.0, 1.0
        x1 = hi - golden * (hi - lo)
        x2 = lo + golden * (hi - lo)
        f1, f2 = eval_t(x1)[0], eval_t(x2)[0]
        for _ in range(90):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + golden * (hi - lo)
                f2 = eval_t(x2)[0]
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - golden * (hi - lo)
                f1 = eval_t(x1)[0]
        t = x1 if f1 >= f2 else x2
        _, wi, wj = eval_t(t)
        w[i], w[j] = wi, wj
        return w

    w = normalize(np.ones(model.k))
    best = value(w)
    best_w = w.copy()
    done = 0
    for sweep in range(sweeps):
        before = value(w)
        for i in range(model.k):
            for j in range(i + 1, model.k):
                w = slice_best(w, i, j)
        w = normalize(w)
        done = sweep + 1
        if value(w) > best:
            best, best_w = value(w), w.copy()
        if abs(value(w) - before) <= 1e-14 * max(best, 1.0):
            break
    return {"sup_estimate": best, "weight": best_w, "sweeps": done}


def lp_bounded_norm(values, p: float, masses,
                    tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Norm of multiplication by f: the sup of |f|, cross-checked generically.

    The analytic value is max_i |f_i|.  The generic route runs the
    characterization pipeline against the family of point weights, whose
    joint quotients see every coordinate.
    """
    from .bounded import m_bounded_norm

    model = DiscreteLpAlgebra.build(masses)
    v = np.asarray(values, dtype=complex)
    analytic = float(np.abs(v).max(initial=0.0))
    fam = model.point_family(p)
    rep = m_bounded_norm(model.element(v), fam, model.inst, tol)
    return {
        "analytic": analytic,
        "generic": rep.value,
        "routes": rep.routes,
        "agrees": abs(analytic - rep.value) <= tol.cross_check * max(analytic, 1.0),
    }


def ball_lower_seminorm_nonneg(values, p: float, masses) -> float:
    """sup over the weight ball of phi_w(f, e) for entrywise nonnegative f.

    Equals the L^(p/2)(m) norm of f; complex phases break the identity, so
    callers must keep probes nonnegative.
    """
    model = DiscreteLpAlgebra.build(masses)
    v = np.asarray(values, dtype=float)
    if np.any(v < 0.0):
        raise BadMeasure("the closed form holds for nonnegative point values only")
    q = p / 2.0
    if q == 1.0:
        return float(np.sum(v * model.masses))
    return float(np.sum(v ** q * model.masses) ** (1.0 / q))

"""Dilation of conditionally positive definite germs.

The dissipation Gram of a valid germ factors as ``V† V``; reading the
factor columns as vectors of an auxiliary space yields the cocycle ``k``,
the noise coupling, and (by a least-squares solve on the spanning set) a
unital *-representation ``j``.  Those data assemble into a block
representation on the triple space (dual, auxiliary, plain) carrying an
indefinite metric, through which every germ block factors as
``L~ j(x) L`` with ``~`` the metric-adjoint.  Every identity is verified
numerically and reported.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FactorizationDefect, NegativeDissipator, NegativeEigenvalue, ResidualTooLarge
from .germ import (
    GermMap,
    coboundary_defect,
    derivation_defect,
    dissipator,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    dag,
    frob,
    kolmogorov_factor,
    solve_on_span,
)


@dataclass
class Dilation:
    """First-order dilation data extracted from the dissipation Gram."""

    germ: GermMap
    aux_dim: int
    j_images: np.ndarray  # (m, r, r)
    k_images: np.ndarray  # (m, r, d)
    l_images: np.ndarray  # (m, d, d)
    lso: np.ndarray  # (r, dK*d): noise space -> auxiliary space
    lplus: np.ndarray  # (dK*d, d): direct creation coupling
    d_const: np.ndarray  # (d, d) Hermitian
    residuals: dict

    def to_dict(self) -> dict:
        return {
            "aux_dim": self.aux_dim,
            "plain_dim": self.germ.d,
            "noise_dim": self.germ.noise_dim,
            "residuals": dict(self.residuals),
        }


def dilate(g: GermMap, tol: Tolerance = DEFAULT_TOL) -> Dilation:
    """Construct the dilation of a conditionally positive definite germ.

    The dissipation Gram is factored (raising
    :class:`NegativeDissipator` when it is not PSD); the cocycle is the
    plain-space slice of the factor, the noise coupling its unit slice on
    the noise side, and ``j`` solves the translation identity on the
    spanning columns (:class:`ResidualTooLarge` when inconsistent, which
    signals corrupted germ data).  All structural identities are verified
    and their worst defects stored in ``residuals``.
    """
    sg = g.sg
    m, d, w = len(sg), g.d, g.block_dim
    delta = dissipator(g)
    try:
        v, rank = kolmogorov_factor(delta.matrix, tol)
    except NegativeEigenvalue as exc:
        raise NegativeDissipator(str(exc)) from exc

    def kslice(x: int) -> np.ndarray:
        return v[:, x * w : (x + 1) * w]

    k_images = np.stack([kslice(x)[:, :d] for x in range(m)])
    lso = kslice(sg.unit)[:, d:]
    k_unit_defect = frob(k_images[sg.unit])
    thr = tol.threshold(max(1.0, frob(delta.matrix)))
    if k_unit_defect > thr:
        raise ResidualTooLarge(
            "cocycle does not vanish at the unit (defect %.3g)" % k_unit_defect
        )

    # j(z) on the spanning set: translating the factor columns by z and
    # removing the representation shift of the plain components.
    embed = np.zeros((m, w, w), dtype=complex)
    for x in range(m):
        embed[x, :d, :d] = g.rep.images[x]
    sources = v
    j_images = np.zeros((m, rank, rank), dtype=complex)
    for z in range(m):
        targets = np.hstack(
            [kslice(sg.mult[z, x]) - kslice(z) @ embed[x] for x in range(m)]
        )
        j_images[z] = solve_on_span(targets, sources, tol)

    d_const = g.d_const
    l_images = np.stack([g.lam[x] - d_const @ g.rep.images[x] for x in range(m)])
    lplus = g.lam_out[sg.unit].copy()

    dl = Dilation(
        g,
        rank,
        j_images,
        k_images,
        l_images,
        lso,
        lplus,
        d_const,
        {},
    )
    report = verify_structure(dl, g, tol)
    dl.residuals = {row["name"]: row["defect"] for row in report.rows}
    dl.residuals["gram"] = frob(dag(v) @ v - delta.matrix)
    dl.residuals["k_unit"] = k_unit_defect
    return dl


@dataclass
class StructureReport:
    rows: list
    ok: bool
    worst: float
    threshold: float

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "worst": self.worst,
            "threshold": self.threshold,
            "rows": list(self.rows),
        }


def verify_structure(dl: Dilation, g: GermMap, tol: Tolerance = DEFAULT_TOL) -> StructureReport:
    """Check every identity the dilation must satisfy against the germ.

    Per-pair: unitality and multiplicativity of ``j``, the derivation law
    for the cocycle and the coboundary law for the scalar part.
    Per-element: reconstruction of all four germ blocks from the dilation
    operators, including the adjoint route for the scalar block.
    """
    sg, rep = g.sg, g.rep.images
    m = len(sg)
    ji, ki, li = dl.j_images, dl.k_images, dl.l_images
    dconst, lso, lplus = dl.d_const, dl.lso, dl.lplus

    rows = []

    def add(name, defect):
        rows.append({"name": name, "defect": float(defect)})

    add("j_unital", frob(ji[sg.unit] - np.eye(dl.aux_dim)))
    rep_defect = 0.0
    for y in range(m):
        for x in range(m):
            z = sg.mult[sg.star[y], x]
            rep_defect = max(rep_defect, frob(ji[z] - dag(ji[y]) @ ji[x]))
    add("j_representation", rep_defect)
    add("k_derivation", derivation_defect(sg, rep, ji, ki))
    add("l_coboundary", coboundary_defect(sg, rep, ki, li))
    add("k_unit", frob(ki[sg.unit]))

    lam_defect = adj_defect = out_defect = in_defect = dot_defect = 0.0
    for x in range(m):
        xs = sg.star[x]
        kstar_x = dag(ki[xs])
        lam_defect = max(lam_defect, frob(li[x] + dconst @ rep[x] - g.lam[x]))
        adj_defect = max(adj_defect, frob(dag(li[xs]) + rep[x] @ dconst - g.lam[x]))
        out_defect = max(out_defect, frob(dag(lso) @ ki[x] + lplus @ rep[x] - g.lam_out[x]))
        in_defect = max(in_defect, frob(kstar_x @ lso + rep[x] @ dag(lplus) - g.lam_in[x]))
        dot_defect = max(dot_defect, frob(dag(lso) @ ji[x] @ lso - g.lam_dot[x]))
    add("lam_reconstruction", lam_defect)
    add("lam_adjoint_route", adj_defect)
    add("lam_out_reconstruction", out_defect)
    add("lam_in_reconstruction", in_defect)
    add("lam_dot_reconstruction", dot_defect)

    scale = max(g.scale() ** 2, float(np.max(np.abs(ji))) ** 2 if ji.size else 1.0)
    thr = tol.threshold(scale)
    worst = max(r["defect"] for r in rows)
    return StructureReport(rows, bool(worst <= thr), worst, thr)


@dataclass
class PseudoHilbert:
    """Indefinite-metric block representation through which the germ
    factors."""

    total_dim: int
    metric: np.ndarray
    metric_inv: np.ndarray
    jmath_images: np.ndarray  # (m, dE, dE)
    loper: np.ndarray  # (dE, d + dK*d)
    signature: tuple  # (negative, zero, positive) eigenvalue counts
    residuals: dict

    def flat_adjoint(self, mat: np.ndarray) -> np.ndarray:
        """Metric adjoint ``G^{-1} M† G`` of a block operator."""
        return self.metric_inv @ dag(mat) @ self.metric

    def to_dict(self) -> dict:
        return {
            "total_dim": self.total_dim,
            "signature": {
                "negative": self.signature[0],
                "zero": self.signature[1],
                "positive": self.signature[2],
            },
            "residuals": dict(self.residuals),
        }


def assemble_pseudo_hilbert(dl: Dilation, g: GermMap, tol: Tolerance = DEFAULT_TOL) -> PseudoHilbert:
    """Assemble and verify the indefinite-metric factorization.

    The metric and its inverse are closed block forms in the unit operator
    ``D`` (their product is the identity exactly); the block representation
    is triangular in (dual, auxiliary, plain) order; the factorization
    reproduces the full 2x2 germ block of every element through the
    metric-adjoint of the embedding operator.  A defect beyond tolerance
    raises :class:`FactorizationDefect` naming the element.
    """
    sg, rep = g.sg, g.rep.images
    m, d, r = len(sg), g.d, dl.aux_dim
    w = g.noise_dim * d
    de = d + r + d
    dconst = dl.d_const

    metric = np.zeros((de, de), dtype=complex)
    metric[0:d, d + r :] = np.eye(d)
    metric[d : d + r, d : d + r] = np.eye(r)
    metric[d + r :, 0:d] = np.eye(d)
    metric[d + r :, d + r :] = dconst
    metric_inv = np.zeros((de, de), dtype=complex)
    metric_inv[0:d, 0:d] = -dconst
    metric_inv[0:d, d + r :] = np.eye(d)
    metric_inv[d : d + r, d : d + r] = np.eye(r)
    metric_inv[d + r :, 0:d] = np.eye(d)

    jmath = np.zeros((m, de, de), dtype=complex)
    for x in range(m):
        kstar_x = dag(dl.k_images[sg.star[x]])
        jmath[x, 0:d, 0:d] = rep[x]
        jmath[x, 0:d, d : d + r] = kstar_x
        jmath[x, 0:d, d + r :] = dl.l_images[x]
        jmath[x, d : d + r, d : d + r] = dl.j_images[x]
        jmath[x, d : d + r, d + r :] = dl.k_images[x]
        jmath[x, d + r :, d + r :] = rep[x]

    loper = np.zeros((de, d + w), dtype=complex)
    loper[0:d, d:] = dag(dl.lplus)
    loper[d : d + r, d:] = dl.lso
    loper[d + r :, 0:d] = np.eye(d)

    inv_defect = frob(metric @ metric_inv - np.eye(de))
    unit_defect = frob(jmath[sg.unit] - np.eye(de))
    flat_defect = 0.0
    for y in range(m):
        yflat = metric_inv @ dag(jmath[y]) @ metric
        for x in range(m):
            z = sg.mult[sg.star[y], x]
            flat_defect = max(flat_defect, frob(jmath[z] - yflat @ jmath[x]))

    lflat = dag(loper) @ metric
    scale = max(g.scale() ** 2, 1.0)
    thr = tol.threshold(scale)
    fact_defect = 0.0
    for x in range(m):
        resid = frob(lflat @ jmath[x] @ loper - g.block(x))
        if resid > thr:
            raise FactorizationDefect(
                "factorization defect %.3g at element %s" % (resid, sg.elements[x])
            )
        fact_defect = max(fact_defect, resid)

    eigs = np.linalg.eigvalsh((metric + dag(metric)) / 2.0)
    band = tol.threshold(float(np.max(np.abs(eigs))))
    signature = (
        int(np.sum(eigs < -band)),
        int(np.sum(np.abs(eigs) <= band)),
        int(np.sum(eigs > band)),
    )

    return PseudoHilbert(
        de,
        metric,
        metric_inv,
        jmath,
        loper,
        signature,
        {
            "metric_inverse": inv_defect,
            "unit": unit_defect,
            "flat_representation": flat_defect,
            "factorization": fact_defect,
        },
    )

"""Germ matrices over finite *-semigroups.

A germ assigns to every semigroup element four blocks (scalar, creation,
annihilation, exchange) describing the stochastic derivative of a positive
definite process at time zero, on top of a reference *-representation.
This module decides conditional positive definiteness two independent
ways (kernel-restricted Gram vs. global dissipation Gram), evaluates the
coherent sandwich form, and generates valid germs from first-order data
(an intertwiner, a commuting gauge, a Hamiltonian and noise couplings).
"""

from dataclasses import dataclass

import numpy as np

from . import jsonio
from .errors import (
    AxiomViolation,
    DimensionMismatch,
    NonCommutingGauge,
    SchemaError,
)
from .linalg import (
    DEFAULT_TOL,
    PsdReport,
    Tolerance,
    dag,
    frob,
    nullspace_basis,
    psd_check,
)

# ---------------------------------------------------------------------------
# Semigroups with involution


@dataclass
class StarSemigroup:
    """Finite unital semigroup with involution ``x -> x*`` satisfying
    ``(x* y)* = y* x``; tables hold element indices."""

    elements: tuple
    unit: int
    mult: np.ndarray
    star: np.ndarray

    def __post_init__(self):
        m = len(self.elements)
        self.elements = tuple(str(e) for e in self.elements)
        self.mult = np.asarray(self.mult, dtype=int).reshape(m, m)
        self.star = np.asarray(self.star, dtype=int).reshape(m)
        self.validate()

    def __len__(self) -> int:
        return len(self.elements)

    def validate(self):
        m = len(self.elements)
        mult, star, unit = self.mult, self.star, self.unit
        if not (0 <= unit < m):
            raise AxiomViolation("unit index out of range")
        if mult.min(initial=0) < 0 or mult.max(initial=0) >= m:
            raise AxiomViolation("mult table has out-of-range indices")
        if star.min(initial=0) < 0 or star.max(initial=0) >= m:
            raise AxiomViolation("star table has out-of-range indices")
        if not (np.all(mult[unit, :] == np.arange(m)) and np.all(mult[:, unit] == np.arange(m))):
            raise AxiomViolation("unit laws fail")
        for x in range(m):
            for y in range(m):
                if np.any(mult[mult[x, y], :] != mult[x, mult[y, :]]):
                    raise AxiomViolation(
                        "associativity fails at (%s, %s)" % (self.elements[x], self.elements[y])
                    )
        if np.any(star[star] != np.arange(m)):
            raise AxiomViolation("involution is not involutive")
        for x in range(m):
            if np.any(star[mult[x, :]] != mult[star, star[x]]):
                raise AxiomViolation("involution is not anti-multiplicative at %s" % self.elements[x])


def trivial_semigroup() -> StarSemigroup:
    return StarSemigroup(("1",), 0, [[0]], [0])


def cyclic_group(n: int) -> StarSemigroup:
    """Z_n with ``x* = x^{-1}``."""
    if n < 1:
        raise AxiomViolation("cyclic group order must be >= 1")
    idx = np.arange(n)
    mult = (idx[:, None] + idx[None, :]) % n
    star = (-idx) % n
    names = tuple("g%d" % k for k in idx)
    return StarSemigroup(names, 0, mult, star)


_S3_PERMS = (
    (0, 1, 2),
    (1, 0, 2),
    (0, 2, 1),
    (2, 1, 0),
    (1, 2, 0),
    (2, 0, 1),
)


def symmetric_group_s3() -> StarSemigroup:
    """S_3 on three points with ``x* = x^{-1}``."""
    perms = _S3_PERMS
    index = {p: i for i, p in enumerate(perms)}
    m = len(perms)
    mult = np.zeros((m, m), dtype=int)
    star = np.zeros(m, dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            comp = tuple(p[q[a]] for a in range(3))
            mult[i, j] = index[comp]
        inv = tuple(p.index(a) for a in range(3))
        star[i] = index[inv]
    return StarSemigroup(tuple(str(p) for p in perms), 0, mult, star)


# ---------------------------------------------------------------------------
# Representations


@dataclass
class Representation:
    """Unital *-representation of a star semigroup by square matrices."""

    images: np.ndarray  # (m, d, d)

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=complex)
        if self.images.ndim != 3 or self.images.shape[1] != self.images.shape[2]:
            raise DimensionMismatch("representation images must be (m, d, d)")

    @property
    def space_dim(self) -> int:
        return self.images.shape[1]

    def defect(self, sg: StarSemigroup) -> float:
        """Worst violation of multiplicativity, the adjoint law and
        unitality."""
        imgs = self.images
        worst = frob(imgs[sg.unit] - np.eye(self.space_dim))
        for x in range(len(sg)):
            worst = max(worst, frob(imgs[sg.star[x]] - dag(imgs[x])))
            for y in range(len(sg)):
                worst = max(worst, frob(imgs[sg.mult[x, y]] - imgs[x] @ imgs[y]))
        return worst

    def validate(self, sg: StarSemigroup, tol: Tolerance = DEFAULT_TOL):
        scale = max(1.0, float(np.max(np.abs(self.images))))
        if self.defect(sg) > tol.threshold(scale * scale):
            raise AxiomViolation("images do not form a unital *-representation")


def trivial_representation(sg: StarSemigroup, dim: int = 1) -> Representation:
    return Representation(np.broadcast_to(np.eye(dim, dtype=complex), (len(sg), dim, dim)).copy())


def cyclic_diagonal_representation(n: int, exponents) -> Representation:
    """Diagonal unitary representation of Z_n with the given character
    exponents on the diagonal."""
    exponents = np.asarray(exponents, dtype=int)
    omega = np.exp(2j * np.pi / n)
    imgs = np.stack([np.diag(omega ** (k * exponents)) for k in range(n)])
    return Representation(imgs)


def s3_representation(labels) -> Representation:
    """Direct sum of S_3 irreducibles chosen from trivial / sign /
    standard (2-dimensional)."""
    # standard irrep: permutation action compressed to the sum-zero plane
    basis = np.array(
        [
            [1.0 / np.sqrt(2.0), 1.0 / np.sqrt(6.0)],
            [-1.0 / np.sqrt(2.0), 1.0 / np.sqrt(6.0)],
            [0.0, -2.0 / np.sqrt(6.0)],
        ]
    )
    std = {}
    for p in _S3_PERMS:
        perm = np.zeros((3, 3))
        for b in range(3):
            perm[p[b], b] = 1.0
        std[p] = basis.T @ perm @ basis

    def sign(p):
        swaps = sum(1 for a in range(3) for b in range(a + 1, 3) if p[a] > p[b])
        return -1.0 if swaps % 2 else 1.0

    imgs = []
    for p in _S3_PERMS:
        blocks = []
        for lab in labels:
            if lab == "trivial":
                blocks.append(np.eye(1))
            elif lab == "sign":
                blocks.append(np.array([[sign(p)]]))
            elif lab == "standard":
                blocks.append(std[p])
            else:
                raise AxiomViolation("unknown S3 irrep label %r" % lab)
        d = sum(b.shape[0] for b in blocks)
        out = np.zeros((d, d), dtype=complex)
        at = 0
        for b in blocks:
            out[at : at + b.shape[0], at : at + b.shape[0]] = b
            at += b.shape[0]
        imgs.append(out)
    return Representation(np.stack(imgs))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_representation(sg: StarSemigroup, dim: int, rng: np.random.Generator) -> Representation:
    """Random ``dim``-dimensional unitary *-representation: a sum of
    irreducibles conjugated by a random unitary."""
    m = len(sg)
    if m in (2, 3, 4) and np.array_equal(sg.mult, cyclic_group(m).mult):
        exps = rng.integers(0, m, size=dim)
        rep = cyclic_diagonal_representation(m, exps)
    elif m == 6:
        labels = []
        left = dim
        while left > 0:
            if left >= 2 and rng.random() < 0.5:
                labels.append("standard")
                left -= 2
            else:
                labels.append("trivial" if rng.random() < 0.5 else "sign")
                left -= 1
        rep = s3_representation(labels)
    else:
        rep = trivial_representation(sg, dim)
    u = random_unitary(rng, dim)
    return Representation(np.einsum("ab,xbc,cd->xad", u, rep.images, dag(u)))


# ---------------------------------------------------------------------------
# Germ maps


@dataclass
class GermMap:
    """Per-element germ blocks over a semigroup with reference
    representation.

    ``lam[x]`` is d x d, ``lam_out[x]`` maps D into the noise-tensored
    space (dK*d x d), ``lam_in[x]`` the reverse, and ``lam_dot[x]`` acts on
    the noise-tensored space; at time zero the exchange block carries the
    representation embedded as ``kron(I_dK, i(x))`` plus the derivative
    part.  Noise-major ordering is used throughout for the tensor factor.
    """

    sg: StarSemigroup
    rep: Representation
    noise_dim: int
    lam: np.ndarray
    lam_out: np.ndarray
    lam_in: np.ndarray
    lam_dot: np.ndarray

    def __post_init__(self):
        m, d, w = len(self.sg), self.rep.space_dim, self.noise_dim * self.rep.space_dim
        self.lam = np.asarray(self.lam, complex).reshape(m, d, d)
        self.lam_out = np.asarray(self.lam_out, complex).reshape(m, w, d)
        self.lam_in = np.asarray(self.lam_in, complex).reshape(m, d, w)
        self.lam_dot = np.asarray(self.lam_dot, complex).reshape(m, w, w)

    @property
    def d(self) -> int:
        return self.rep.space_dim

    @property
    def block_dim(self) -> int:
        return self.d + self.noise_dim * self.d

    @property
    def d_const(self) -> np.ndarray:
        """The Hermitian operator read off the unit scalar block."""
        return self.lam[self.sg.unit]

    def block(self, x: int) -> np.ndarray:
        """Full 2x2 block of the germ at element ``x``."""
        return np.block([[self.lam[x], self.lam_in[x]], [self.lam_out[x], self.lam_dot[x]]])

    def scale(self) -> float:
        return max(
            1.0,
            float(np.max(np.abs(self.lam))) if self.lam.size else 0.0,
            float(np.max(np.abs(self.lam_out))) if self.lam_out.size else 0.0,
            float(np.max(np.abs(self.lam_in))) if self.lam_in.size else 0.0,
            float(np.max(np.abs(self.lam_dot))) if self.lam_dot.size else 0.0,
        )


def representation_germ(sg: StarSemigroup, rep: Representation, noise_dim: int) -> GermMap:
    """Germ with zero stochastic derivative: only the embedded
    representation survives in the exchange block."""
    m, d, w = len(sg), rep.space_dim, noise_dim * rep.space_dim
    lam_dot = np.stack([np.kron(np.eye(noise_dim), rep.images[x]) for x in range(m)])
    return GermMap(
        sg,
        rep,
        noise_dim,
        np.zeros((m, d, d)),
        np.zeros((m, w, d)),
        np.zeros((m, d, w)),
        lam_dot,
    )


@dataclass
class SymmetryReport:
    entries: list
    ok: bool
    worst: float

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "worst": self.worst,
            "checks": [
                {"name": n, "defect": v, "threshold": t, "ok": k} for n, v, t, k in self.entries
            ],
        }


def check_symmetry(g: GermMap, tol: Tolerance = DEFAULT_TOL) -> SymmetryReport:
    """Verify the adjoint symmetries tying each block at ``x*`` to the
    adjoint block at ``x``, and Hermiticity of the unit scalar block."""
    sg = g.sg
    thr = tol.threshold(g.scale())
    rows = []
    for name, lhs, rhs in (
        ("lam", g.lam[sg.star], dag(g.lam)),
        ("lam_out", g.lam_out[sg.star], dag(g.lam_in)),
        ("lam_dot", g.lam_dot[sg.star], dag(g.lam_dot)),
    ):
        defect = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
        rows.append((name, defect, thr, bool(defect <= thr)))
    dd = frob(g.d_const - dag(g.d_const))
    rows.append(("unit_hermitian", dd, thr, bool(dd <= thr)))
    worst = max(v for _, v, _, _ in rows)
    return SymmetryReport(rows, all(k for _, _, _, k in rows), worst)


@dataclass
class PdVerdict:
    """Positive-definiteness verdict with its decidability margin.

    ``indeterminate`` flags minimum eigenvalues within ten thresholds of
    zero, where the sign is numerically meaningless.
    """

    ok: bool
    min_eig: float | None
    threshold: float
    indeterminate: bool
    kernel_dim: int | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        d = {
            "ok": self.ok,
            "min_eig": self.min_eig,
            "threshold": self.threshold,
            "indeterminate": self.indeterminate,
        }
        if self.kernel_dim is not None:
            d["kernel_dim"] = self.kernel_dim
        return d


def _verdict(psd: PsdReport, kernel_dim: int | None = None) -> PdVerdict:
    ind = psd.min_eig is not None and abs(psd.min_eig) <= 10.0 * psd.threshold
    return PdVerdict(psd.ok, psd.min_eig, psd.threshold, bool(ind), kernel_dim)


def kernel_restricted_psd(h: np.ndarray, c: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> PdVerdict:
    """PSD decision for the Hermitian form ``h`` restricted to the null
    space of the linear constraint ``c``."""
    basis = nullspace_basis(c, tol)
    restricted = dag(basis) @ h @ basis
    return _verdict(psd_check(restricted, tol), kernel_dim=basis.shape[1])


def germ_gram(g: GermMap) -> np.ndarray:
    """Gram of germ blocks over all element pairs: block (y, x) is the full
    germ block at ``y* x``."""
    m, w = len(g.sg), g.block_dim
    h = np.zeros((m * w, m * w), dtype=complex)
    blocks = [g.block(x) for x in range(m)]
    for y in range(m):
        for x in range(m):
            z = g.sg.mult[g.sg.star[y], x]
            h[y * w : (y + 1) * w, x * w : (x + 1) * w] = blocks[z]
    return h


def degenerate_constraint(g: GermMap) -> np.ndarray:
    """Linear constraint cutting out the kernel of the degenerate
    reference form: the representation applied to the plain-space
    components must sum to zero."""
    m, d, w = len(g.sg), g.d, g.block_dim
    c = np.zeros((d, m * w), dtype=complex)
    for x in range(m):
        c[:, x * w : x * w + d] = g.rep.images[x]
    return c


def conditional_pd(g: GermMap, tol: Tolerance = DEFAULT_TOL) -> PdVerdict:
    """Conditional positive definiteness of the germ: the full germ Gram
    must be PSD on the null space of the degenerate reference form."""
    return kernel_restricted_psd(germ_gram(g), degenerate_constraint(g), tol)


@dataclass
class DissipatorGram:
    """Hermitian dissipation Gram indexed by (element, D + noise space)."""

    matrix: np.ndarray
    block_dim: int
    elements: tuple
    herm_defect: float


def dissipator(g: GermMap) -> DissipatorGram:
    """Assemble the dissipation Gram.

    Block (y, x): the exchange part is the germ exchange block at
    ``y* x``; the annihilation part subtracts the representation-translated
    block; the scalar part is the second-order difference completed by the
    unit operator ``D``.  Each block is computed from its own formula so
    Hermiticity is observed, not enforced.
    """
    sg, rep = g.sg, g.rep.images
    m, d, w = len(sg), g.d, g.block_dim
    dconst = g.d_const
    out = np.zeros((m * w, m * w), dtype=complex)
    for y in range(m):
        ys = sg.star[y]
        iy_dag = dag(rep[y])
        for x in range(m):
            z = sg.mult[ys, x]
            corner = (
                g.lam[z]
                - iy_dag @ g.lam[x]
                - g.lam[ys] @ rep[x]
                + iy_dag @ dconst @ rep[x]
            )
            ann = g.lam_in[z] - iy_dag @ g.lam_in[x]
            cre = g.lam_out[z] - g.lam_out[ys] @ rep[x]
            blk = np.block([[corner, ann], [cre, g.lam_dot[z]]])
            out[y * w : (y + 1) * w, x * w : (x + 1) * w] = blk
    return DissipatorGram(out, w, sg.elements, frob(out - dag(out)))


def dissipator_pd(g: GermMap, tol: Tolerance = DEFAULT_TOL) -> PdVerdict:
    """Global positivity of the dissipation Gram; by the dilation theorem
    this must agree with :func:`conditional_pd` on decidable inputs."""
    return _verdict(psd_check(dissipator(g).matrix, tol))


def sandwich(g: GermMap, b_vec, x: int, a_vec) -> np.ndarray:
    """Coherent sandwich of the germ at element ``x``.

    ``a_vec`` and ``b_vec`` are noise-space vectors; ``b_vec`` enters
    conjugated.  Returns the d x d form combining the exchange block
    squeezed between the two noise vectors, the creation and annihilation
    blocks paired with one vector each, and the scalar block.
    """
    d, dk = g.d, g.noise_dim
    a = np.asarray(a_vec, complex).reshape(-1)
    b = np.asarray(b_vec, complex).reshape(-1)
    if a.shape[0] != dk or b.shape[0] != dk:
        raise DimensionMismatch(
            "noise vectors must have length %d, got %d and %d" % (dk, a.shape[0], b.shape[0])
        )
    inj_a = np.kron(a[:, None], np.eye(d))  # D -> K (x) D
    proj_b = np.kron(np.conj(b)[None, :], np.eye(d))  # K (x) D -> D
    return (
        proj_b @ g.lam_dot[x] @ inj_a
        + proj_b @ g.lam_out[x]
        + g.lam_in[x] @ inj_a
        + g.lam[x]
    )


# ---------------------------------------------------------------------------
# Germ generation


def derivation_defect(sg: StarSemigroup, i_imgs, j_imgs, k_imgs) -> float:
    """Worst defect of the first-order cocycle law
    ``k(y* x) = j(y)† k(x) + k(y*) i(x)``."""
    worst = 0.0
    for y in range(len(sg)):
        ys = sg.star[y]
        for x in range(len(sg)):
            z = sg.mult[ys, x]
            worst = max(
                worst,
                frob(k_imgs[z] - dag(j_imgs[y]) @ k_imgs[x] - k_imgs[ys] @ i_imgs[x]),
            )
    return worst


def coboundary_defect(sg: StarSemigroup, i_imgs, k_imgs, l_imgs) -> float:
    """Worst defect of the second-order law
    ``l(y* x) = i(y)† l(x) + l(y*) i(x) + k(y)† k(x)``."""
    worst = 0.0
    for y in range(len(sg)):
        ys = sg.star[y]
        for x in range(len(sg)):
            z = sg.mult[ys, x]
            worst = max(
                worst,
                frob(
                    l_imgs[z]
                    - dag(i_imgs[y]) @ l_imgs[x]
                    - l_imgs[ys] @ i_imgs[x]
                    - dag(k_imgs[y]) @ k_imgs[x]
                ),
            )
    return worst


def generate_germ(
    sg: StarSemigroup,
    rep: Representation,
    aux_rep: Representation,
    coupling,
    gauge,
    hamiltonian,
    lso,
    lplus,
    noise_dim: int,
    tol: Tolerance = DEFAULT_TOL,
) -> GermMap:
    """Build a conditionally positive definite germ from first-order data.

    Parameters
    ----------
    rep, aux_rep:
        Unital *-representations on the plain space D (dim d) and the
        auxiliary space (dim r).
    coupling:
        r x d intertwiner T; the cocycle is ``k(x) = T i(x) - j(x) T``.
    gauge:
        d x d Hermitian operator commuting with every ``i(x)``; shifts the
        unit block ``D = T† T + gauge``.
    hamiltonian:
        d x d Hermitian operator entering the scalar block as
        ``1j * (H i(x) - i(x) H)``.
    lso:
        r x (dK*d) coupling of the noise-tensored space into the auxiliary
        space; its adjoint feeds the creation block and the exchange block
        is ``lso† j(x) lso``.
    lplus:
        (dK*d) x d direct creation coupling.

    The cocycle and coboundary identities of the output are re-verified
    numerically; so is the block symmetry.
    """
    d, r, m = rep.space_dim, aux_rep.space_dim, len(sg)
    w = noise_dim * d
    t = np.asarray(coupling, complex).reshape(r, d)
    c = np.asarray(gauge, complex).reshape(d, d)
    h = np.asarray(hamiltonian, complex).reshape(d, d)
    lso = np.asarray(lso, complex).reshape(r, w)
    lplus = np.asarray(lplus, complex).reshape(w, d)

    scale = max(1.0, float(np.max(np.abs(rep.images))), float(np.max(np.abs(t))),
                float(np.max(np.abs(c))), float(np.max(np.abs(h))))
    thr = tol.threshold(scale * scale)
    if frob(c - dag(c)) > thr:
        raise NonCommutingGauge("gauge operator must be Hermitian")
    if frob(h - dag(h)) > thr:
        raise AxiomViolation("hamiltonian must be Hermitian")
    for x in range(m):
        if frob(c @ rep.images[x] - rep.images[x] @ c) > thr:
            raise NonCommutingGauge(
                "gauge operator does not commute with the representation at %s"
                % sg.elements[x]
            )

    imgs, jmgs = rep.images, aux_rep.images
    k_imgs = np.stack([t @ imgs[x] - jmgs[x] @ t for x in range(m)])
    tt = dag(t) @ t
    l_imgs = np.stack(
        [
            dag(t) @ jmgs[x] @ t - tt @ imgs[x] + 1j * (h @ imgs[x] - imgs[x] @ h)
            for x in range(m)
        ]
    )
    dconst = tt + c
    lam = np.stack([l_imgs[x] + dconst @ imgs[x] for x in range(m)])
    lam_out = np.stack([dag(lso) @ k_imgs[x] + lplus @ imgs[x] for x in range(m)])
    lam_in = np.stack([dag(lam_out[sg.star[x]]) for x in range(m)])
    lam_dot = np.stack([dag(lso) @ jmgs[x] @ lso for x in range(m)])
    g = GermMap(sg, rep, noise_dim, lam, lam_out, lam_in, lam_dot)

    post_scale = max(g.scale(), scale) ** 2
    post_thr = tol.threshold(post_scale)
    if derivation_defect(sg, imgs, jmgs, k_imgs) > post_thr:
        raise AxiomViolation("generated cocycle violates the derivation law")
    if coboundary_defect(sg, imgs, k_imgs, l_imgs) > post_thr:
        raise AxiomViolation("generated scalar part violates the coboundary law")
    sym = check_symmetry(g, tol)
    if not sym.ok:
        raise AxiomViolation("generated germ fails block symmetry: %r" % sym.to_dict())
    return g


def invalidate_germ(g: GermMap, tol: Tolerance = DEFAULT_TOL, strength: float = 1e3) -> GermMap:
    """Break conditional positive definiteness with a negative rank-one
    perturbation of the exchange block at the unit.

    The perturbation is aligned with the smallest eigenvector of the unit
    exchange block and its magnitude exceeds both ``strength`` thresholds
    and twice that block's smallest eigenvalue, so the violation is
    decidable rather than borderline.
    """
    unit = g.sg.unit
    base = g.lam_dot[unit]
    if base.shape[0] == 0:
        raise DimensionMismatch("cannot perturb a germ without noise components")
    hpart = (base + dag(base)) / 2.0
    w, u = np.linalg.eigh(hpart)
    thr = tol.threshold(max(1.0, float(np.max(np.abs(w)))))
    magnitude = strength * thr + 2.0 * max(0.0, float(w[0]))
    v = u[:, 0]
    lam_dot = g.lam_dot.copy()
    lam_dot[unit] = lam_dot[unit] - magnitude * np.outer(v, np.conj(v))
    return GermMap(g.sg, g.rep, g.noise_dim, g.lam.copy(), g.lam_out.copy(), g.lam_in.copy(), lam_dot)


_CORPUS_GROUPS = ("z2", "z3", "z4", "s3")


def corpus_semigroup(name: str) -> StarSemigroup:
    if name == "z2":
        return cyclic_group(2)
    if name == "z3":
        return cyclic_group(3)
    if name == "z4":
        return cyclic_group(4)
    if name == "s3":
        return symmetric_group_s3()
    raise AxiomViolation("unknown corpus group %r" % name)


def random_germ(
    rng: np.random.Generator,
    max_dim: int = 3,
    max_noise: int = 2,
    tol: Tolerance = DEFAULT_TOL,
) -> GermMap:
    """Random valid germ over one of the small groups, with random unitary
    representations and random bounded first-order data."""
    sg = corpus_semigroup(_CORPUS_GROUPS[rng.integers(len(_CORPUS_GROUPS))])
    d = int(rng.integers(1, max_dim + 1))
    r = int(rng.integers(1, max_dim + 1))
    dk = int(rng.integers(1, max_noise + 1))
    rep = random_representation(sg, d, rng)
    aux = random_representation(sg, r, rng)

    def cplx(shape, spread=0.8):
        return spread * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    coupling = cplx((r, d))
    gauge = float(rng.uniform(-0.5, 0.5)) * np.eye(d)
    hmat = cplx((d, d))
    hamiltonian = (hmat + dag(hmat)) / 2.0
    lso = cplx((r, dk * d))
    lplus = cplx((dk * d, d))
    return generate_germ(sg, rep, aux, coupling, gauge, hamiltonian, lso, lplus, dk, tol)


# ---------------------------------------------------------------------------
# Serialization


def germ_to_dict(g: GermMap) -> dict:
    return {
        "semigroup": {
            "elements": list(g.sg.elements),
            "unit": g.sg.unit,
            "mult": g.sg.mult.tolist(),
            "star": g.sg.star.tolist(),
        },
        "rep": jsonio.encode_carray(g.rep.images),
        "noise_dim": g.noise_dim,
        "lam": jsonio.encode_carray(g.lam),
        "lam_out": jsonio.encode_carray(g.lam_out),
        "lam_in": jsonio.encode_carray(g.lam_in),
        "lam_dot": jsonio.encode_carray(g.lam_dot),
    }


def germ_from_dict(data: dict) -> GermMap:
    required = {"semigroup", "rep", "noise_dim", "lam", "lam_out", "lam_in", "lam_dot"}
    if not isinstance(data, dict):
        raise SchemaError("germ spec must be a JSON object")
    missing = required - set(data)
    extra = set(data) - required
    if missing:
        raise SchemaError("germ spec missing fields: %s" % ", ".join(sorted(missing)))
    if extra:
        raise SchemaError("germ spec has unknown fields: %s" % ", ".join(sorted(extra)))
    sgd = data["semigroup"]
    for key in ("elements", "unit", "mult", "star"):
        if key not in sgd:
            raise SchemaError("semigroup spec missing %r" % key)
    try:
        sg = StarSemigroup(tuple(sgd["elements"]), int(sgd["unit"]), sgd["mult"], sgd["star"])
    except AxiomViolation as exc:
        raise SchemaError("semigroup tables invalid: %s" % exc) from exc
    rep = Representation(jsonio.decode_carray(data["rep"], 3, "rep"))
    nd = data["noise_dim"]
    if not isinstance(nd, int) or nd < 0:
        raise SchemaError("noise_dim must be a nonnegative integer")
    try:
        return GermMap(
            sg,
            rep,
            nd,
            jsonio.decode_carray(data["lam"], 3, "lam"),
            jsonio.decode_carray(data["lam_out"], 3, "lam_out"),
            jsonio.decode_carray(data["lam_in"], 3, "lam_in"),
            jsonio.decode_carray(data["lam_dot"], 3, "lam_dot"),
        )
    except ValueError as exc:
        raise SchemaError("germ blocks malformed: %s" % exc) from exc

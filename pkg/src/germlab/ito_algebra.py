"""Finite-dimensional Ito *-algebras and their GNS quadruple calculus.

An algebra is given by structure constants, an involution table and a
positive linear functional ``l``.  The GNS construction factors the Gram
``l(e_i* e_j)`` into a noise space K and represents every element as a
quadruple ``(l, k, k*, j)``, realized here as a strictly upper-triangular
block matrix over the index order (-, o, +) so that the stochastic Ito
multiplication table is plain matrix multiplication.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import jsonio
from .errors import AxiomViolation, DimensionMismatch, SchemaError, UnknownKind
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    dag,
    frob,
    kolmogorov_factor,
    solve_on_span,
)

CANONICAL_KINDS = ("newton", "wiener", "poisson")


@dataclass(frozen=True)
class NoiseComponent:
    """Tag locating one canonical summand inside a direct-sum algebra."""

    kind: str
    scale: float
    offset: int

    @property
    def dim(self) -> int:
        return 2 if self.kind == "wiener" else 1


@dataclass
class ItoAlgebra:
    """A *-algebra with product tensor, involution table and functional.

    ``structure[i, j, k]`` is the coefficient of ``e_k`` in ``e_i e_j``,
    ``involution[i, k]`` the coefficient of ``e_k`` in ``e_i*`` and
    ``functional[i] = l(e_i)``.  The scale of ``l`` is read as a
    per-unit-time increment mean.
    """

    dim: int
    basis_names: tuple
    structure: np.ndarray
    involution: np.ndarray
    functional: np.ndarray
    tol: Tolerance = DEFAULT_TOL
    components: tuple | None = None

    def __post_init__(self):
        n = self.dim
        object.__setattr__(self, "basis_names", tuple(self.basis_names))
        object.__setattr__(self, "structure", np.asarray(self.structure, complex).reshape(n, n, n))
        object.__setattr__(self, "involution", np.asarray(self.involution, complex).reshape(n, n))
        object.__setattr__(self, "functional", np.asarray(self.functional, complex).reshape(n))
        if len(self.basis_names) != n:
            raise DimensionMismatch("need %d basis names, got %d" % (n, len(self.basis_names)))
        for a in (self.structure, self.involution, self.functional):
            if not np.all(np.isfinite(a.view(float))):
                raise DimensionMismatch("algebra tensors must be finite")

    def mul(self, x, y) -> np.ndarray:
        """Bilinear product of coordinate vectors."""
        x = np.asarray(x, complex).reshape(self.dim)
        y = np.asarray(y, complex).reshape(self.dim)
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def star(self, x) -> np.ndarray:
        """Antilinear involution of a coordinate vector."""
        x = np.asarray(x, complex).reshape(self.dim)
        return np.einsum("i,ik->k", np.conj(x), self.involution)

    def l_of(self, x) -> complex:
        x = np.asarray(x, complex).reshape(self.dim)
        return complex(x @ self.functional)

    def gram(self) -> np.ndarray:
        """Gram matrix ``l(e_i* e_j)`` of the functional."""
        return np.einsum("ip,pjk,k->ij", self.involution, self.structure, self.functional)

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1.0
        return v


def ito_mul(alg: ItoAlgebra, x, y) -> np.ndarray:
    return alg.mul(x, y)


def star_product(alg: ItoAlgebra, a, b) -> np.ndarray:
    """Composition ``a * b = b + a~ b + a~`` with ``a~`` the involution of
    ``a``; the product ``(1+a)*(1+b)`` of the unitized semigroup equals
    ``1 + star_product(a, b)``."""
    a = np.asarray(a, complex).reshape(alg.dim)
    b = np.asarray(b, complex).reshape(alg.dim)
    astar = alg.star(a)
    return b + alg.mul(astar, b) + astar


@dataclass(frozen=True)
class SemigroupElement:
    """An element ``1 + a`` of the unitized semigroup of an algebra."""

    algebra: ItoAlgebra
    algebra_part: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "algebra_part", np.asarray(self.algebra_part, complex).reshape(self.algebra.dim)
        )

    def star(self) -> "SemigroupElement":
        return SemigroupElement(self.algebra, self.algebra.star(self.algebra_part))

    def __mul__(self, other: "SemigroupElement") -> "SemigroupElement":
        a, b = self.algebra_part, other.algebra_part
        return SemigroupElement(self.algebra, a + b + self.algebra.mul(a, b))


@dataclass
class AxiomReport:
    """Per-axiom worst defects of an algebra candidate."""

    entries: list
    ok: bool

    def __bool__(self) -> bool:
        return self.ok

    def defect(self, name: str) -> float:
        return dict((n, d) for n, d, _, _ in self.entries)[name]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "axioms": [
                {"name": n, "defect": d, "threshold": t, "ok": k}
                for n, d, t, k in self.entries
            ],
        }


def verify_axioms(alg: ItoAlgebra) -> AxiomReport:
    """Check associativity, the involution laws, and positivity plus
    *-symmetry of the functional; failures are report rows, not errors."""
    c, s, l = alg.structure, alg.involution, alg.functional
    tol = alg.tol
    base = max(1.0, frob(c), frob(s), float(np.linalg.norm(l)))
    thr2 = tol.threshold(base * base)
    thr3 = tol.threshold(base * base * base)
    entries = []

    assoc = np.einsum("ijp,pkq->ijkq", c, c) - np.einsum("jkp,ipq->ijkq", c, c)
    entries.append(("associativity", float(np.max(np.abs(assoc))) if assoc.size else 0.0, thr3, None))

    inv2 = np.conj(s) @ s - np.eye(alg.dim)
    entries.append(("involution_involutive", float(np.max(np.abs(inv2))) if inv2.size else 0.0, thr2, None))

    # (e_i e_j)* = e_j* e_i*
    lhs = np.einsum("ijk,km->ijm", np.conj(c), s)
    rhs = np.einsum("jp,iq,pqm->ijm", s, s, c)
    anti = lhs - rhs
    entries.append(("involution_antimultiplicative", float(np.max(np.abs(anti))) if anti.size else 0.0, thr3, None))

    lstar = s @ l - np.conj(l)
    entries.append(("functional_star_symmetric", float(np.max(np.abs(lstar))) if lstar.size else 0.0, thr2, None))

    gram = alg.gram()
    herm = gram - dag(gram)
    entries.append(("gram_hermitian", float(np.max(np.abs(herm))) if herm.size else 0.0, thr3, None))

    from .linalg import psd_check

    psd = psd_check(gram, tol)
    gram_defect = 0.0 if psd.ok else abs(psd.min_eig)
    entries.append(("functional_positive", gram_defect, psd.threshold, None))

    rows = [(n, d, t, bool(d <= t)) for n, d, t, _ in entries]
    return AxiomReport(rows, all(k for _, _, _, k in rows))


def canonical_algebra(kind: str, scale: float = 1.0) -> ItoAlgebra:
    """The canonical one-noise algebras.

    newton: dim 1, ``t . t = 0``, ``l(t) = scale`` (deterministic drift);
    poisson: dim 1, ``e . e = e``, ``l(e) = scale`` (jump intensity);
    wiener: dim 2 with basis (t, w), ``w . w = t``, ``l(t) = scale``
    (diffusion variance per unit time), all other products zero.
    """
    if scale <= 0:
        raise UnknownKind("scale must be positive, got %r" % scale)
    if kind == "newton":
        c = np.zeros((1, 1, 1))
        return ItoAlgebra(1, ("t",), c, np.eye(1), [scale],
                          components=(NoiseComponent("newton", scale, 0),))
    if kind == "poisson":
        c = np.ones((1, 1, 1))
        return ItoAlgebra(1, ("e",), c, np.eye(1), [scale],
                          components=(NoiseComponent("poisson", scale, 0),))
    if kind == "wiener":
        c = np.zeros((2, 2, 2))
        c[1, 1, 0] = 1.0  # w . w = t
        return ItoAlgebra(2, ("t", "w"), c, np.eye(2), [scale, 0.0],
                          components=(NoiseComponent("wiener", scale, 0),))
    raise UnknownKind("unknown canonical kind %r" % kind)


def quadruple_algebra(noise_dim: int = 1) -> ItoAlgebra:
    """The *-algebra of all quadruples over a noise space of dimension k.

    Basis: one time element, k creation and k annihilation elements, and
    k*k exchange elements; dimension ``1 + 2k + k*k``.  The functional
    picks the time coefficient.  Noncommutative for any k >= 1, and equal
    to its own GNS quadruple image, which makes it a sharp test case.
    """
    k = int(noise_dim)
    if k < 1:
        raise UnknownKind("noise_dim must be >= 1")
    names = ["t"]
    names += ["k%d" % p for p in range(k)]
    names += ["k*%d" % p for p in range(k)]
    names += ["j%d%d" % (p, q) for p in range(k) for q in range(k)]
    n = 1 + 2 * k + k * k

    def t_index():
        return 0

    def k_index(p):
        return 1 + p

    def ks_index(p):
        return 1 + k + p

    def j_index(p, q):
        return 1 + 2 * k + p * k + q

    c = np.zeros((n, n, n), dtype=complex)
    # Products through the noise index: ks_p . k_q = delta_pq t,
    # ks_p . j_qr = delta_pq ks_r, j_pq . k_r = delta_qr k_p,
    # j_pq . j_rs = delta_qr j_ps; everything else vanishes.
    for p in range(k):
        for q in range(k):
            c[ks_index(p), k_index(q), t_index()] = 1.0 if p == q else 0.0
            for r in range(k):
                c[ks_index(p), j_index(q, r), ks_index(r)] += 1.0 if p == q else 0.0
                c[j_index(p, q), k_index(r), k_index(p)] += 1.0 if q == r else 0.0
                for s_ in range(k):
                    c[j_index(p, q), j_index(r, s_), j_index(p, s_)] += 1.0 if q == r else 0.0
    s = np.zeros((n, n), dtype=complex)
    s[t_index(), t_index()] = 1.0
    for p in range(k):
        s[k_index(p), ks_index(p)] = 1.0
        s[ks_index(p), k_index(p)] = 1.0
        for q in range(k):
            s[j_index(p, q), j_index(q, p)] = 1.0
    l = np.zeros(n, dtype=complex)
    l[t_index()] = 1.0
    return ItoAlgebra(n, tuple(names), c, s, l)


def direct_sum(a: ItoAlgebra, b: ItoAlgebra) -> ItoAlgebra:
    """Orthogonal direct sum; cross products vanish and ``l`` concatenates."""
    for part in (a, b):
        rep = verify_axioms(part)
        if not rep.ok:
            raise AxiomViolation("direct_sum operand fails axioms: %r" % rep.to_dict())
    n, m = a.dim, b.dim
    c = np.zeros((n + m, n + m, n + m), dtype=complex)
    c[:n, :n, :n] = a.structure
    c[n:, n:, n:] = b.structure
    s = np.zeros((n + m, n + m), dtype=complex)
    s[:n, :n] = a.involution
    s[n:, n:] = b.involution
    l = np.concatenate([a.functional, b.functional])
    names = list(a.basis_names)
    for name in b.basis_names:
        candidate = name
        bump = 1
        while candidate in names:
            candidate = "%s.%d" % (name, bump)
            bump += 1
        names.append(candidate)
    comps = None
    if a.components is not None and b.components is not None:
        comps = tuple(a.components) + tuple(
            replace(cmp, offset=cmp.offset + n) for cmp in b.components
        )
    return ItoAlgebra(n + m, tuple(names), c, s, l,
                      tol=a.tol, components=comps)


@dataclass
class Quadruple:
    """GNS image of an algebra element: scalar part, creation vector,
    annihilation covector and exchange operator over the noise space."""

    l_part: complex
    k_part: np.ndarray
    kstar_part: np.ndarray
    j_part: np.ndarray

    def __post_init__(self):
        self.l_part = complex(self.l_part)
        self.k_part = np.asarray(self.k_part, complex).reshape(-1)
        self.kstar_part = np.asarray(self.kstar_part, complex).reshape(-1)
        dk = self.k_part.shape[0]
        self.j_part = np.asarray(self.j_part, complex).reshape(dk, dk)
        if self.kstar_part.shape[0] != dk:
            raise DimensionMismatch("quadruple parts disagree on noise dimension")

    @property
    def dimK(self) -> int:
        return self.k_part.shape[0]

    def to_matrix(self) -> np.ndarray:
        """Strictly upper-triangular block form over the order (-, o, +)."""
        dk = self.dimK
        m = np.zeros((dk + 2, dk + 2), dtype=complex)
        m[0, 1 : 1 + dk] = self.kstar_part
        m[0, -1] = self.l_part
        m[1 : 1 + dk, 1 : 1 + dk] = self.j_part
        m[1 : 1 + dk, -1] = self.k_part
        return m

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Quadruple":
        m = np.asarray(m, complex)
        dk = m.shape[0] - 2
        return cls(m[0, -1], m[1 : 1 + dk, -1], m[0, 1 : 1 + dk], m[1 : 1 + dk, 1 : 1 + dk])

    @classmethod
    def zero(cls, dimK: int) -> "Quadruple":
        return cls(0.0, np.zeros(dimK), np.zeros(dimK), np.zeros((dimK, dimK)))


def quad_mul(x: Quadruple, y: Quadruple) -> Quadruple:
    """Ito product of quadruples: contraction through the noise index only,
    identical to multiplying the triangular block forms."""
    if x.dimK != y.dimK:
        raise DimensionMismatch("quadruples have different noise dimensions")
    return Quadruple(
        complex(x.kstar_part @ y.k_part),
        x.j_part @ y.k_part,
        x.kstar_part @ y.j_part,
        x.j_part @ y.j_part,
    )


def quad_flat(x: Quadruple) -> Quadruple:
    """Flip-adjoint: conjugate-transpose of the triangular form followed by
    the (- <-> +) index swap; sends the quadruple of ``a`` to that of
    ``a*``."""
    return Quadruple(
        np.conj(x.l_part),
        np.conj(x.kstar_part),
        np.conj(x.k_part),
        dag(x.j_part),
    )


@dataclass
class GnsData:
    """GNS construction output: the noise space, per-basis quadruples and
    residuals of the defining identities."""

    algebra: ItoAlgebra
    dimK: int
    k_matrix: np.ndarray  # (dimK, n); column i is k(e_i)
    j_images: np.ndarray  # (n, dimK, dimK)
    quadruples: list
    residuals: dict

    def quadruple(self, x) -> Quadruple:
        """Quadruple of an arbitrary coordinate vector."""
        x = np.asarray(x, complex).reshape(self.algebra.dim)
        kx = self.k_matrix @ x
        ksx = np.conj(self.k_matrix @ self.algebra.star(x))
        jx = np.einsum("i,ipq->pq", x, self.j_images)
        return Quadruple(self.algebra.l_of(x), kx, ksx, jx)

    def to_dict(self) -> dict:
        return {
            "dimK": self.dimK,
            "quadruples": [
                {
                    "basis": str(self.algebra.basis_names[i]),
                    "l": jsonio.encode_complex(q.l_part),
                    "k": jsonio.encode_carray(q.k_part),
                    "kstar": jsonio.encode_carray(q.kstar_part),
                    "j": jsonio.encode_carray(q.j_part),
                }
                for i, q in enumerate(self.quadruples)
            ],
            "residuals": dict(self.residuals),
        }


def gns_quadruple(alg: ItoAlgebra) -> GnsData:
    """Run the GNS construction for the functional of ``alg``.

    The Gram ``l(e_i* e_j)`` is factored as ``V† V`` fixing the noise space;
    ``j`` is solved from ``j(a) k(b) = k(a b)`` on the span of the ``k``
    vectors and the isometry ``l(a* b) = k(a)† k(b)`` plus the adjoint law
    ``j(a*) = j(a)†`` are re-verified, with worst defects reported.
    """
    rep = verify_axioms(alg)
    if not rep.ok:
        raise AxiomViolation("algebra fails axioms: %r" % rep.to_dict())
    n = alg.dim
    gram = alg.gram()
    v, rank = kolmogorov_factor(gram, alg.tol)

    j_images = np.zeros((n, rank, rank), dtype=complex)
    solve_res = 0.0
    for i in range(n):
        targets = v @ alg.structure[i].T  # column j is k(e_i e_j)
        j_images[i] = solve_on_span(targets, v, alg.tol)
        solve_res = max(solve_res, frob(j_images[i] @ v - targets))

    iso = gram - dag(v) @ v
    iso_defect = float(np.max(np.abs(iso))) if iso.size else 0.0
    jstar_defect = 0.0
    for i in range(n):
        jstar = np.einsum("k,kpq->pq", alg.involution[i], j_images)
        jstar_defect = max(jstar_defect, frob(jstar - dag(j_images[i])))

    data = GnsData(alg, rank, v, j_images, [], {
        "isometry": iso_defect,
        "j_solve": solve_res,
        "j_star": jstar_defect,
    })
    data.quadruples = [data.quadruple(alg.basis_vector(i)) for i in range(n)]
    return data


def random_basis_change(alg: ItoAlgebra, rng: np.random.Generator, spread: float = 0.3) -> ItoAlgebra:
    """Rewrite the algebra in a random well-conditioned basis; all axioms
    are preserved exactly (up to rounding)."""
    n = alg.dim
    t = np.eye(n) + spread * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    tinv = np.linalg.inv(t)
    c = np.einsum("ai,bj,ijm,mk->abk", t, t, alg.structure, tinv)
    s = np.conj(t) @ alg.involution @ tinv
    l = t @ alg.functional
    return ItoAlgebra(n, alg.basis_names, c, s, l, tol=alg.tol)


def random_algebra(rng: np.random.Generator, max_dim: int = 4) -> ItoAlgebra:
    """Random axiom-passing algebra of dimension <= ``max_dim``: a direct
    sum of scaled canonical components or the quadruple algebra, in a
    random basis."""
    if max_dim >= 4 and rng.random() < 0.25:
        alg = quadruple_algebra(1)
    else:
        alg = None
        dim = 0
        while True:
            kind = CANONICAL_KINDS[rng.integers(len(CANONICAL_KINDS))]
            block = canonical_algebra(kind, scale=float(rng.uniform(0.25, 2.0)))
            if dim + block.dim > max_dim:
                break
            alg = block if alg is None else direct_sum(alg, block)
            dim += block.dim
            if dim == max_dim or (dim >= 1 and rng.random() < 0.35):
                break
        if alg is None:
            alg = canonical_algebra("poisson")
    return random_basis_change(alg, rng)


def algebra_to_dict(alg: ItoAlgebra) -> dict:
    d = {
        "dim": alg.dim,
        "basis": [str(b) for b in alg.basis_names],
        "structure": jsonio.encode_carray(alg.structure),
        "involution": jsonio.encode_carray(alg.involution),
        "functional": jsonio.encode_carray(alg.functional),
    }
    if alg.components is not None:
        d["components"] = [
            {"kind": c.kind, "scale": c.scale, "offset": c.offset} for c in alg.components
        ]
    return d


def algebra_from_dict(data: dict) -> ItoAlgebra:
    required = {"dim", "basis", "structure", "involution", "functional"}
    allowed = required | {"components"}
    if not isinstance(data, dict):
        raise SchemaError("algebra spec must be a JSON object")
    missing = required - set(data)
    extra = set(data) - allowed
    if missing:
        raise SchemaError("algebra spec missing fields: %s" % ", ".join(sorted(missing)))
    if extra:
        raise SchemaError("algebra spec has unknown fields: %s" % ", ".join(sorted(extra)))
    n = data["dim"]
    if not isinstance(n, int) or n < 0:
        raise SchemaError("dim must be a nonnegative integer")
    comps = None
    if "components" in data:
        comps = tuple(
            NoiseComponent(c["kind"], float(c["scale"]), int(c["offset"]))
            for c in data["components"]
        )
    try:
        return ItoAlgebra(
            n,
            tuple(data["basis"]),
            jsonio.decode_carray(data["structure"], 3, "structure"),
            jsonio.decode_carray(data["involution"], 2, "involution"),
            jsonio.decode_carray(data["functional"], 1, "functional"),
            components=comps,
        )
    except (DimensionMismatch, ValueError) as exc:
        raise SchemaError("algebra spec malformed: %s" % exc) from exc

"""Classical noise simulation and kernel positivity checks.

Trajectory generation for the deterministic, diffusion and jump
components, Monte Carlo stochastic exponentials against closed-form
vacuum means, moment checks of the discrete multiplication table, and
positive-definiteness checks of the analytic kernels induced on the
unitized semigroup, bridged back into the germ module.

Streams are deterministic: path ``i`` draws from the block
``i // _BLOCK`` of a seed sequence spawned per (component, block), so a
path's increments depend only on the seed and its index, never on the
batch size, and blocks can be generated in parallel.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadStep, DimensionMismatch, UnknownKind, UnsupportedAlgebra
from .germ import kernel_restricted_psd
from .ito_algebra import ItoAlgebra, gns_quadruple, star_product
from .linalg import DEFAULT_TOL, Tolerance, psd_check

_BLOCK = 4096
KINDS = ("newton", "wiener", "poisson")


def _nsteps(horizon: float, step: float) -> int:
    if not (horizon > 0 and 0 < step <= horizon):
        raise BadStep("need 0 < step <= horizon, got step=%r horizon=%r" % (step, horizon))
    q = horizon / step
    return int(math.ceil(q - 1e-9))


def _stream(seed: int, component: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(component, block))
    return np.random.default_rng(ss)


def _block_increments(kind, seed, component, block, nsteps, step, rate=1.0):
    """Increments for one full block of paths; rows beyond the batch are
    sliced off by the caller so path streams do not depend on batch size."""
    rng = _stream(seed, component, block)
    if kind == "wiener":
        return rng.standard_normal((_BLOCK, nsteps)) * math.sqrt(step * rate)
    if kind == "poisson":
        return rng.poisson(step * rate, size=(_BLOCK, nsteps))
    if kind == "newton":
        return np.full((_BLOCK, nsteps), step)
    raise UnknownKind("unknown noise kind %r" % kind)


@dataclass
class NoisePath:
    """One sampled trajectory of increments."""

    kind: str
    horizon: float
    step: float
    seed: int
    index: int
    increments: np.ndarray


def sample_paths(kind: str, horizon: float, step: float, seed: int, batch: int) -> list:
    """Sample ``batch`` independent increment paths.

    Wiener increments are centred normals with variance ``step``, jump
    increments Poisson counts with mean ``step``, deterministic increments
    the constant ``step``.  Identical (seed, index) always reproduce the
    same path.
    """
    if kind not in KINDS:
        raise UnknownKind("unknown noise kind %r" % kind)
    n = _nsteps(horizon, step)
    paths = []
    for block in range((batch + _BLOCK - 1) // _BLOCK):
        rows = min(_BLOCK, batch - block * _BLOCK)
        incr = _block_increments(kind, seed, 0, block, n, step)
        for row in range(rows):
            paths.append(
                NoisePath(kind, horizon, step, seed, block * _BLOCK + row, incr[row])
            )
    return paths


@dataclass
class MomentReport:
    rows: list
    ok: bool

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "moments": list(self.rows)}


def _moment_row(name, estimate, target, se, tol_sigmas):
    if se > 0:
        sig = abs(estimate - target) / se
        ok = sig <= tol_sigmas
    else:
        sig = 0.0
        ok = estimate == target
    return {
        "name": name,
        "estimate": float(estimate),
        "target": float(target),
        "se": float(se),
        "sigmas": float(sig),
        "ok": bool(ok),
    }


def ito_moment_check(paths: list, tol_sigmas: float = 4.0) -> MomentReport:
    """Statistical check of the discrete multiplication table.

    Wiener: squared increments average to the step and the time-cross term
    vanishes.  Poisson: increments average to the step and the factorial
    moment is second order in the step.  Newton: increments are exactly
    the step with no fluctuation.
    """
    if not paths:
        raise DimensionMismatch("empty batch")
    kind = paths[0].kind
    step = paths[0].step
    if any(p.kind != kind or p.step != step for p in paths):
        raise DimensionMismatch("batch mixes kinds or steps")
    incr = np.stack([p.increments for p in paths]).astype(float)
    n = incr.size
    rows = []
    if kind == "wiener":
        sq = incr * incr
        rows.append(_moment_row("mean_increment", incr.mean(), 0.0, math.sqrt(step / n), tol_sigmas))
        rows.append(_moment_row("mean_square_increment", sq.mean(), step, math.sqrt(2.0 * step * step / n), tol_sigmas))
        rows.append(
            _moment_row("time_cross_term", (step * incr).mean(), 0.0, step * math.sqrt(step / n), tol_sigmas)
        )
    elif kind == "poisson":
        rows.append(_moment_row("mean_increment", incr.mean(), step, math.sqrt(step / n), tol_sigmas))
        fact = incr * incr - incr
        est = fact.mean()
        rows.append(
            {
                "name": "factorial_moment_second_order",
                "estimate": float(est),
                "target": float(step * step),
                "bound": float(10.0 * step * step),
                "sigmas": 0.0,
                "ok": bool(abs(est) <= 10.0 * step * step),
            }
        )
    elif kind == "newton":
        dev = float(np.max(np.abs(incr - step)))
        rows.append({"name": "deterministic_increment", "estimate": dev, "target": 0.0,
                     "se": 0.0, "sigmas": 0.0, "ok": dev == 0.0})
        spread = float(np.ptp(incr))
        rows.append({"name": "stochastic_moments_zero", "estimate": spread, "target": 0.0,
                     "se": 0.0, "sigmas": 0.0, "ok": spread == 0.0})
    return MomentReport(rows, all(r["ok"] for r in rows))


class _MeanAccumulator:
    """Streaming complex mean/variance with a fixed summation order."""

    def __init__(self):
        self.count = 0
        self.sum = 0.0 + 0.0j
        self.sumsq = 0.0

    def add(self, values: np.ndarray):
        self.count += values.size
        self.sum += complex(values.sum())
        self.sumsq += float((np.abs(values) ** 2).sum())

    def mean(self) -> complex:
        return self.sum / self.count

    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        mu = self.mean()
        var = (self.sumsq - self.count * abs(mu) ** 2) / (self.count - 1)
        return math.sqrt(max(var, 0.0) / self.count)


def _component_factors(comp, coeffs, incr, step):
    """Per-step multiplicative factors ``1 + dLambda`` for one canonical
    component."""
    if comp.kind == "newton":
        return 1.0 + coeffs[0] * comp.scale * step * np.ones_like(incr, dtype=complex)
    if comp.kind == "poisson":
        return 1.0 + coeffs[0] * incr.astype(complex)
    if comp.kind == "wiener":
        drift = coeffs[0] * comp.scale * step
        return 1.0 + drift + coeffs[1] * incr.astype(complex)
    raise UnknownKind(comp.kind)


@dataclass
class ExpReport:
    """Monte Carlo stochastic exponential against its closed form."""

    mc_mean: complex
    closed_form: complex
    sigmas: float
    stderr: float
    abs_error: float
    batch: int
    nsteps: int
    seed: int
    exact_mean: complex | None = None
    exact_sigmas: float | None = None

    def to_dict(self) -> dict:
        d = {
            "mc_mean": self.mc_mean,
            "closed_form": self.closed_form,
            "sigmas": self.sigmas,
            "stderr": self.stderr,
            "abs_error": self.abs_error,
            "batch": self.batch,
            "nsteps": self.nsteps,
            "seed": self.seed,
        }
        if self.exact_mean is not None:
            d["exact_jump_mean"] = self.exact_mean
            d["exact_jump_sigmas"] = self.exact_sigmas
        return d


def _sigmas(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    return 0.0


def stochastic_exponential_mc(
    alg: ItoAlgebra, a, horizon: float, step: float, seed: int, batch: int
) -> ExpReport:
    """Estimate the vacuum mean of the multiplicative stochastic integral
    of ``1 + d(element)`` and compare with ``exp(l(a) * horizon)``.

    Requires a canonical algebra or a direct sum of canonical components
    (the orthogonal summands drive independent streams).  For a pure jump
    algebra an exact-jump estimator ``(1+a)**N`` over the total count is
    evaluated on the same streams; it is free of discretization error.
    """
    if alg.components is None:
        raise UnsupportedAlgebra(
            "Monte Carlo needs canonical components; got a bare algebra"
        )
    a = np.asarray(a, complex).reshape(alg.dim)
    n = _nsteps(horizon, step)
    lval = alg.l_of(a)
    closed = cmath.exp(lval * horizon)

    pure_poisson = len(alg.components) == 1 and alg.components[0].kind == "poisson"
    acc = _MeanAccumulator()
    acc_exact = _MeanAccumulator() if pure_poisson else None

    if batch < 1:
        raise BadStep("batch must be >= 1")
    for block in range((batch + _BLOCK - 1) // _BLOCK):
        rows = min(_BLOCK, batch - block * _BLOCK)
        factors = np.ones((rows, n), dtype=complex)
        for ci, comp in enumerate(alg.components):
            coeffs = a[comp.offset : comp.offset + comp.dim]
            rate = comp.scale if comp.kind == "poisson" else 1.0
            incr = _block_increments(comp.kind, seed, ci, block, n, step, rate)[:rows]
            factors *= _component_factors(comp, coeffs, incr, step)
            if acc_exact is not None:
                acc_exact.add((1.0 + coeffs[0]) ** incr.sum(axis=1))
        acc.add(np.prod(factors, axis=1))

    mc = acc.mean()
    se = acc.stderr()
    report = ExpReport(
        mc,
        closed,
        _sigmas(abs(mc - closed), se),
        se,
        abs(mc - closed),
        batch,
        n,
        seed,
    )
    if acc_exact is not None:
        ex = acc_exact.mean()
        report.exact_mean = ex
        report.exact_sigmas = _sigmas(abs(ex - closed), acc_exact.stderr())
    return report


@dataclass
class KernelSample:
    """Analytic kernel Gram of the unitized semigroup at one time."""

    algebra: ItoAlgebra
    elements: list
    time: float
    gram: np.ndarray


def kernel_gram(alg: ItoAlgebra, elements, time: float) -> KernelSample:
    """Gram ``exp(time * l(a_i ~*~ a_j))`` over the element list."""
    elements = [np.asarray(e, complex).reshape(alg.dim) for e in elements]
    k = len(elements)
    gram = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            gram[i, j] = cmath.exp(time * alg.l_of(star_product(alg, elements[i], elements[j])))
    return KernelSample(alg, elements, time, gram)


def semigroup_germ_check(alg: ItoAlgebra, elements, tol: Tolerance = DEFAULT_TOL,
                         fd_step: float = 1e-5) -> dict:
    """Bridge the analytic kernel back to the germ machinery.

    The time derivative of each kernel entry at zero, obtained by central
    finite differences of the closed form, must match ``l`` of the
    semigroup product; the quadruple-built germ blocks over the element
    family must be conditionally positive definite with respect to the
    constant unit representation.
    """
    elements = [np.asarray(e, complex).reshape(alg.dim) for e in elements]
    gns = gns_quadruple(alg)
    dk = gns.dimK
    m = len(elements)
    w = 1 + dk
    h = np.zeros((m * w, m * w), dtype=complex)
    deriv_defect = 0.0
    for i in range(m):
        for j in range(m):
            prod = star_product(alg, elements[i], elements[j])
            lval = alg.l_of(prod)
            fd = (cmath.exp(fd_step * lval) - cmath.exp(-fd_step * lval)) / (2.0 * fd_step)
            deriv_defect = max(deriv_defect, abs(fd - lval))
            q = gns.quadruple(prod)
            blk = np.zeros((w, w), dtype=complex)
            blk[0, 0] = q.l_part
            blk[0, 1:] = q.kstar_part
            blk[1:, 0] = q.k_part
            blk[1:, 1:] = np.eye(dk) + q.j_part
            h[i * w : (i + 1) * w, j * w : (j + 1) * w] = blk
    constraint = np.zeros((1, m * w), dtype=complex)
    for i in range(m):
        constraint[0, i * w] = 1.0
    verdict = kernel_restricted_psd(h, constraint, tol)
    return {
        "derivative_defect": float(deriv_defect),
        "conditional_pd": verdict.to_dict(),
        "ok": bool(verdict.ok),
    }


@dataclass
class KernelReport:
    sample: KernelSample
    psd: object
    entries: list
    max_sigmas: float
    germ_bridge: dict
    ok: bool
    seed: int
    batch: int

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "time": self.sample.time,
            "gram": [[[z.real, z.imag] for z in row] for row in self.sample.gram],
            "psd": self.psd.to_dict(),
            "entries": list(self.entries),
            "max_sigmas": self.max_sigmas,
            "germ_bridge": dict(self.germ_bridge),
            "seed": self.seed,
            "batch": self.batch,
        }


def pd_kernel_check(
    alg: ItoAlgebra,
    elements,
    time: float,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
    batch: int = 20000,
    step: float = 1e-3,
    tol_sigmas: float = 4.0,
) -> KernelReport:
    """Positive definiteness of the analytic kernel with a Monte Carlo
    cross-check of every entry over shared paths, plus the germ bridge.

    Entry (i, j) is estimated as the mean of ``conj(V_i) V_j`` with all
    exponentials evaluated on the same increments, so the comparison is
    discretization-consistent across entries.
    """
    if alg.components is None:
        raise UnsupportedAlgebra("kernel Monte Carlo needs canonical components")
    sample = kernel_gram(alg, elements, time)
    psd = psd_check(sample.gram, tol)
    elements = sample.elements
    m = len(elements)
    n = _nsteps(time, step)
    accs = [[_MeanAccumulator() for _ in range(m)] for _ in range(m)]
    for block in range((batch + _BLOCK - 1) // _BLOCK):
        rows = min(_BLOCK, batch - block * _BLOCK)
        values = np.ones((m, rows, n), dtype=complex)
        for ci, comp in enumerate(alg.components):
            rate = comp.scale if comp.kind == "poisson" else 1.0
            incr = _block_increments(comp.kind, seed, ci, block, n, step, rate)[:rows]
            for e in range(m):
                coeffs = elements[e][comp.offset : comp.offset + comp.dim]
                values[e] *= _component_factors(comp, coeffs, incr, step)
        paths = values.prod(axis=2)  # (m, rows)
        for i in range(m):
            for j in range(m):
                accs[i][j].add(np.conj(paths[i]) * paths[j])

    entries = []
    worst = 0.0
    for i in range(m):
        for j in range(m):
            est = accs[i][j].mean()
            se = accs[i][j].stderr()
            target = complex(sample.gram[i, j])
            sig = _sigmas(abs(est - target), se)
            worst = max(worst, sig)
            entries.append(
                {
                    "i": i,
                    "j": j,
                    "mc": [est.real, est.imag],
                    "analytic": [target.real, target.imag],
                    "sigmas": float(sig),
                }
            )
    bridge = semigroup_germ_check(alg, elements, tol)
    ok = bool(psd.ok and worst <= tol_sigmas and bridge["ok"])
    return KernelReport(sample, psd, entries, float(worst), bridge, ok, seed, batch)

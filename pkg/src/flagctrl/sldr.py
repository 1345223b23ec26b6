"""Numerical realization on SL(d, R): Iwasawa cocycles along simulated
control flows, fixed flags of autonomous generators, and growth-rate
verification against the exact classification from flagcalc.

Conventions
-----------
The compact factor is SO(d), the abelian factor the positive diagonal
matrices of determinant one, the nilpotent factor the upper unitriangular
matrices; QR with a sign-fixed positive diagonal realizes the
factorization.  Flags are represented by special orthogonal frames whose
leading column blocks span the nested subspaces.  Tangent spaces of a flag
manifold are modeled by block strictly lower triangular matrices acting
horizontally against the frame, with the Frobenius (trace form) metric;
determinant ratios and growth exponents are independent of that scale
choice.

The dictionary to the abstract side is the type A one: the i-th simple
root evaluates a diagonal vector ``h`` as ``h[i] - h[i+1]``, and abstract
Weyl elements act as permutation matrices built from their reduced words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .flagcalc import ChainControlSetRecord, FlagSpec
from .rootsys import RootSystem, build_root_system, span_subset
from .weyl import WeylElement

__all__ = [
    "IwasawaTriple",
    "FlagPoint",
    "Box",
    "Polytope",
    "ControlSignal",
    "IntegratorConfig",
    "ControlSystemSpec",
    "Trajectory",
    "SplitPart",
    "RealizationSplit",
    "RateReport",
    "CocycleSample",
    "iwasawa",
    "blocks_from_theta",
    "standard_flag",
    "flag_point",
    "flag_from_basis",
    "flag_act",
    "flag_distance",
    "a_cocycle",
    "constant_signal",
    "random_signal",
    "control_system",
    "system_to_json",
    "system_from_json",
    "load_system",
    "integrate",
    "cocycle_additivity_residual",
    "time_reversal_residual",
    "ktheta_invariance_residual",
    "realize_functional",
    "RealizedFunctional",
    "split_part",
    "permutation_matrix",
    "fixed_flags",
    "horizontal_basis",
    "projective_derivative_det",
    "invariant_realizations",
    "determinant_formula_residuals",
    "verify_rates",
    "cocycle_sample",
    "cocycle_to_csv",
    "flag_type_diagnostic",
    "type_a_system",
    "random_traceless",
    "random_special_orthogonal",
    "random_unimodular",
]

DEFAULT_COND_MAX = 1e12


@lru_cache(maxsize=None)
def type_a_system(d: int) -> RootSystem:
    """The abstract system matching SL(d, R); rank d-1."""
    if d < 2:
        raise ValueError("SL(d) realization needs d >= 2")
    return build_root_system("A", d - 1)


# ---------------------------------------------------------------------------
# Iwasawa factorization


@dataclass(frozen=True, eq=False)
class IwasawaTriple:
    """Factors g = k exp(diag(a_vec)) n with k special orthogonal, n unitriangular."""

    k: np.ndarray
    a_vec: np.ndarray
    n: np.ndarray


def _qr_pos(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # QR with the triangular factor's diagonal made positive
    q, r = np.linalg.qr(g)
    s = np.sign(np.diag(r)).copy()
    s[s == 0] = 1.0
    return q * s, s[:, None] * r


def iwasawa(
    g: np.ndarray,
    *,
    det_tol: float = 1e-8,
    cond_max: float | None = DEFAULT_COND_MAX,
) -> IwasawaTriple:
    """Iwasawa factorization of a unimodular matrix via sign-fixed QR.

    ``cond_max`` guards against inputs whose factor accuracy is
    conditioning-limited; pass None to disable the guard when the caller
    controls conditioning by other means (for example stepwise cocycle
    accumulation).
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("iwasawa needs a square matrix")
    det = float(np.linalg.det(g))
    if abs(det - 1.0) > det_tol:
        raise ValueError(f"matrix is not unimodular: det = {det!r}")
    if cond_max is not None:
        sv = np.linalg.svd(g, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
        if cond > cond_max:
            raise ValueError(
                f"matrix too ill-conditioned for a trustworthy factorization: "
                f"condition estimate {cond:.3e} exceeds {cond_max:.1e}"
            )
    q, r = _qr_pos(g)
    diag = np.diag(r).copy()
    a_vec = np.log(diag)
    n = r / diag[:, None]
    return IwasawaTriple(k=q, a_vec=a_vec, n=n)


# ---------------------------------------------------------------------------
# Flag points


def blocks_from_theta(theta: Iterable[int], d: int) -> tuple[int, ...]:
    """Column block sizes of the flag selected by theta.

    Simple root i sits between coordinates i and i+1; membership in theta
    removes that break point, merging the two positions into one block.
    """
    theta = frozenset(theta)
    bad = [i for i in theta if not (0 <= i < d - 1)]
    if bad:
        raise ValueError(f"simple-root indices {sorted(bad)} out of range for d={d}")
    sizes = []
    current = 1
    for i in range(d - 1):
        if i in theta:
            current += 1
        else:
            sizes.append(current)
            current = 1
    sizes.append(current)
    return tuple(sizes)


@dataclass(frozen=True, eq=False)
class FlagPoint:
    """A flag as a special orthogonal frame plus nested block sizes."""

    rep: np.ndarray
    blocks: tuple[int, ...]

    @property
    def dim_ambient(self) -> int:
        return self.rep.shape[0]

    @property
    def is_maximal(self) -> bool:
        return all(b == 1 for b in self.blocks)


def flag_point(rep: np.ndarray, blocks: Sequence[int], *, tol: float = 1e-9) -> FlagPoint:
    rep = np.array(rep, dtype=float)
    d = rep.shape[0]
    blocks = tuple(int(b) for b in blocks)
    if rep.ndim != 2 or rep.shape != (d, d):
        raise ValueError("flag frame must be square")
    if sum(blocks) != d or any(b < 1 for b in blocks):
        raise ValueError(f"block sizes {blocks} do not partition dimension {d}")
    if np.abs(rep.T @ rep - np.eye(d)).max() > tol:
        raise ValueError("flag frame is not orthogonal")
    if abs(np.linalg.det(rep) - 1.0) > max(tol, 1e-6):
        raise ValueError("flag frame must have determinant +1")
    rep.flags.writeable = False
    return FlagPoint(rep=rep, blocks=blocks)


def standard_flag(d: int, theta: Iterable[int] = ()) -> FlagPoint:
    return flag_point(np.eye(d), blocks_from_theta(theta, d))


def flag_from_basis(basis: np.ndarray, blocks: Sequence[int]) -> FlagPoint:
    """Orthonormalize an ordered basis; leading spans are preserved."""
    basis = np.asarray(basis, dtype=float)
    q, _ = _qr_pos(basis)
    if np.linalg.det(q) < 0:
        q = q.copy()
        q[:, -1] = -q[:, -1]
    return flag_point(q, blocks)


def flag_act(psi: np.ndarray, x: FlagPoint, *, cond_max: float | None = None) -> FlagPoint:
    """Image flag under the projective action of ``psi``."""
    trip = iwasawa(np.asarray(psi, float) @ x.rep, cond_max=cond_max)
    return flag_point(trip.k, x.blocks)


def flag_distance(x: FlagPoint, y: FlagPoint) -> float:
    """Largest spectral gap between corresponding subspace projectors."""
    if x.blocks != y.blocks:
        raise ValueError("flags live on different manifolds")
    d = x.dim_ambient
    out = 0.0
    cut = 0
    for b in x.blocks[:-1]:
        cut += b
        px = x.rep[:, :cut] @ x.rep[:, :cut].T
        py = y.rep[:, :cut] @ y.rep[:, :cut].T
        out = max(out, float(np.linalg.norm(px - py, 2)))
    return out


def a_cocycle(
    psi: np.ndarray,
    flag: FlagPoint,
    *,
    cond_max: float | None = DEFAULT_COND_MAX,
) -> np.ndarray:
    """Abelian cocycle increment of ``psi`` at a maximal flag.

    The identity transition returns the exact zero vector.
    """
    if not flag.is_maximal:
        raise ValueError("the abelian cocycle is defined on maximal flags")
    psi = np.asarray(psi, dtype=float)
    d = flag.dim_ambient
    if np.array_equal(psi, np.eye(d)):
        return np.zeros(d)
    return iwasawa(psi @ flag.rep, cond_max=cond_max).a_vec


# ---------------------------------------------------------------------------
# Control systems and signals


@dataclass(frozen=True)
class Box:
    """Per-channel interval bounds; the empty box is the zero-channel range."""

    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        norm = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if any(lo > hi for lo, hi in norm):
            raise ValueError("box bounds must satisfy lo <= hi")
        object.__setattr__(self, "bounds", norm)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def contains(self, u: np.ndarray, tol: float = 1e-9) -> bool:
        return all(lo - tol <= v <= hi + tol for (lo, hi), v in zip(self.bounds, u))

    def zero_in_interior(self) -> bool:
        return all(lo < 0.0 < hi for lo, hi in self.bounds)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((n, 0))
        lows = np.array([lo for lo, _ in self.bounds])
        highs = np.array([hi for _, hi in self.bounds])
        return rng.uniform(lows, highs, size=(n, self.dim))


@dataclass(frozen=True, eq=False)
class Polytope:
    """Half-space description {u : normals @ u <= offsets}."""

    normals: np.ndarray
    offsets: np.ndarray

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def contains(self, u: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(np.all(self.normals @ u <= self.offsets + tol))

    def zero_in_interior(self) -> bool:
        return bool(np.all(self.offsets > 0.0))


@dataclass(frozen=True, eq=False)
class ControlSignal:
    """Sampled piecewise-constant control, held constant on each period."""

    values: np.ndarray
    period: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ValueError("sample period must be positive")
        if self.values.ndim != 2:
            raise ValueError("signal values must be a (samples, channels) array")

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    def value_at(self, t: float) -> np.ndarray:
        idx = int(math.floor((t - self.t0) / self.period + 1e-9))
        idx = min(max(idx, 0), self.values.shape[0] - 1)
        return self.values[idx]


def constant_signal(u: Sequence[float], period: float = 1.0) -> ControlSignal:
    return ControlSignal(values=np.asarray([u], dtype=float), period=period)


def random_signal(
    rng: np.random.Generator,
    box: Box,
    T: float,
    period: float,
    t0: float = 0.0,
) -> ControlSignal:
    n = max(1, int(math.ceil(abs(T) / period - 1e-9)))
    return ControlSignal(values=box.sample(rng, n), period=period, t0=t0)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    renorm_cadence: int = 10

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.renorm_cadence < 1:
            raise ValueError("renorm cadence must be at least 1")


@dataclass(frozen=True, eq=False)
class ControlSystemSpec:
    """Right-invariant bilinear system: drift plus control-weighted terms."""

    drift: np.ndarray
    controls: tuple[np.ndarray, ...]
    control_range: Box | Polytope
    integrator: IntegratorConfig

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    def generator(self, u: np.ndarray) -> np.ndarray:
        out = self.drift.copy()
        for uj, m in zip(u, self.controls):
            out += uj * m
        return out


def control_system(
    drift: np.ndarray,
    controls: Sequence[np.ndarray],
    control_range: Box | Polytope,
    integrator: IntegratorConfig | None = None,
) -> ControlSystemSpec:
    """Validating constructor: traceless matrices, matching shapes, 0 inside U."""
    drift = np.array(drift, dtype=float)
    if drift.ndim != 2 or drift.shape[0] != drift.shape[1]:
        raise ValueError("drift must be a square matrix")
    d = drift.shape[0]
    mats = [drift] + [np.array(m, dtype=float) for m in controls]
    for m in mats:
        if m.shape != (d, d):
            raise ValueError("all system matrices must share the drift's shape")
        if abs(np.trace(m)) > 1e-12 * max(1.0, float(np.linalg.norm(m))):
            raise ValueError(f"system matrix has nonzero trace {np.trace(m)!r}")
    if control_range.dim != len(controls):
        raise ValueError(
            f"control range dimension {control_range.dim} does not match "
            f"{len(controls)} control matrices"
        )
    if not control_range.zero_in_interior():
        raise ValueError("zero must lie in the interior of the control range")
    for m in mats:
        m.flags.writeable = False
    return ControlSystemSpec(
        drift=mats[0],
        controls=tuple(mats[1:]),
        control_range=control_range,
        integrator=integrator if integrator is not None else IntegratorConfig(),
    )


def system_to_json(spec: ControlSystemSpec) -> dict:
    if isinstance(spec.control_range, Box):
        crange = {"type": "box", "bounds": [list(b) for b in spec.control_range.bounds]}
    else:
        crange = {
            "type": "polytope",
            "normals": spec.control_range.normals.tolist(),
            "offsets": spec.control_range.offsets.tolist(),
        }
    return {
        "dim": spec.dim,
        "drift": spec.drift.tolist(),
        "controls": [m.tolist() for m in spec.controls],
        "control_range": crange,
        "integrator": {
            "dt": spec.integrator.dt,
            "renorm_cadence": spec.integrator.renorm_cadence,
        },
    }


def system_from_json(doc: dict) -> ControlSystemSpec:
    try:
        d = int(doc["dim"])
        drift = np.asarray(doc["drift"], dtype=float)
        controls = [np.asarray(m, dtype=float) for m in doc.get("controls", [])]
        crdoc = doc["control_range"]
        if crdoc.get("type", "box") == "box":
            crange: Box | Polytope = Box(tuple(tuple(b) for b in crdoc["bounds"]))
        else:
            crange = Polytope(
                normals=np.asarray(crdoc["normals"], dtype=float),
                offsets=np.asarray(crdoc["offsets"], dtype=float),
            )
        idoc = doc.get("integrator", {})
        integ = IntegratorConfig(
            dt=float(idoc.get("dt", 1e-3)),
            renorm_cadence=int(idoc.get("renorm_cadence", 10)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed control system document: {exc}") from exc
    if drift.shape != (d, d):
        raise ValueError("drift shape disagrees with declared dimension")
    return control_system(drift, controls, crange, integ)


def load_system(path: str) -> ControlSystemSpec:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        return system_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# Integration


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Flow solution sampled on the integrator grid."""

    times: np.ndarray
    matrices: np.ndarray

    def value(self, t: float) -> np.ndarray:
        step = self.times[1] - self.times[0] if len(self.times) > 1 else 1.0
        idx = int(round((t - self.times[0]) / step))
        if not (0 <= idx < len(self.times)) or abs(self.times[idx] - t) > 1e-9:
            raise ValueError(f"time {t} is not on the trajectory grid")
        return self.matrices[idx]


def _rk4_step_matrix(x: np.ndarray, h: float) -> np.ndarray:
    # classical fourth order step for a constant generator is the degree-4
    # Taylor polynomial of exp(h x)
    d = x.shape[0]
    a = h * x
    eye = np.eye(d)
    m = eye + a / 4.0
    m = eye + (a / 3.0) @ m
    m = eye + (a / 2.0) @ m
    return eye + a @ m


def integrate(spec: ControlSystemSpec, signal: ControlSignal, T: float) -> Trajectory:
    """Fixed-step RK4 flow of the right-invariant system, with determinant
    renormalization every ``renorm_cadence`` steps.

    ``T`` may be negative; the control is evaluated at segment midpoints, so
    the sample period must be an integer multiple of dt and the signal
    origin must sit on the step grid.
    """
    cfg = spec.integrator
    dt = cfg.dt
    if signal.n_channels != spec.n_controls:
        raise ValueError("signal channel count does not match the system")
    ratio = signal.period / dt
    if abs(ratio - round(ratio)) > 1e-6:
        raise ValueError("control sample period must be an integer multiple of dt")
    offset = signal.t0 / dt
    if abs(offset - round(offset)) > 1e-6 * max(1.0, abs(offset)):
        raise ValueError("signal origin must lie on the integrator grid")
    n = int(round(abs(T) / dt))
    if abs(abs(T) - n * dt) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("horizon must be an integer multiple of dt")
    h = dt if T >= 0 else -dt
    d = spec.dim
    eye = np.eye(d)
    psi = eye
    out = [eye]
    cache: dict[bytes, tuple[np.ndarray, bool]] = {}
    for i in range(n):
        tm = (i + 0.5) * h
        u = signal.value_at(tm)
        key = u.tobytes()
        entry = cache.get(key)
        if entry is None:
            if not spec.control_range.contains(u):
                raise ValueError(f"control value {u.tolist()} lies outside the range")
            step = _rk4_step_matrix(spec.generator(u), h)
            entry = (step, bool(np.array_equal(step, eye)))
            cache[key] = entry
        step, is_id = entry
        if not is_id:
            psi = step @ psi
            if (i + 1) % cfg.renorm_cadence == 0 or i == n - 1:
                det = float(np.linalg.det(psi))
                if det <= 0.0 or abs(det - 1.0) > 1e-6:
                    raise ValueError(
                        f"determinant drift {det - 1.0:.3e} at step {i + 1}; reduce dt"
                    )
                psi = psi * det ** (-1.0 / d)
        out.append(psi)
    return Trajectory(times=h * np.arange(n + 1), matrices=np.stack(out))


# ---------------------------------------------------------------------------
# Cocycle identities


def cocycle_additivity_residual(
    spec: ControlSystemSpec,
    signal: ControlSignal,
    T: float,
    flag: FlagPoint,
    *,
    n_checkpoints: int = 11,
) -> float:
    """Worst additivity defect over checkpoint pairs (t, s) with t + s <= T.

    Every term is recomputed from full transition matrices, so the identity
    is genuinely tested rather than telescoped.
    """
    if not flag.is_maximal:
        raise ValueError("cocycle identities are checked on maximal flags")
    traj = integrate(spec, signal, T)
    n = len(traj.times) - 1
    if n_checkpoints < 2 or n == 0:
        raise ValueError("need at least two checkpoints and a positive horizon")
    stride = max(1, n // (n_checkpoints - 1))
    idxs = list(range(0, n + 1, stride))
    if idxs[-1] != n:
        idxs.append(n)
    mats = traj.matrices
    d = spec.dim
    a_at: dict[int, np.ndarray] = {0: np.zeros(d)}
    flag_at: dict[int, FlagPoint] = {0: flag}
    for p in idxs:
        if p == 0:
            continue
        trip = iwasawa(mats[p] @ flag.rep)
        a_at[p] = trip.a_vec
        flag_at[p] = flag_point(trip.k, flag.blocks)
    worst = 0.0
    for p in idxs:
        inv_p = None
        for q in idxs:
            if p + q not in a_at:
                continue
            if p == 0:
                shifted = a_at[q]
            elif q == 0:
                shifted = np.zeros(d)
            else:
                if inv_p is None:
                    inv_p = np.linalg.inv(mats[p])
                shifted = a_cocycle(mats[p + q] @ inv_p, flag_at[p])
            defect = float(np.abs(a_at[p + q] - shifted - a_at[p]).max())
            worst = max(worst, defect)
    return worst


def time_reversal_residual(
    backward: Trajectory,
    flag: FlagPoint,
    *,
    n_samples: int = 10,
) -> float:
    """Worst defect of the time-reversal identity along a backward trajectory.

    ``backward`` must start at time 0 and run into negative times; at a grid
    point -t the stored matrix is the backward transition, its inverse the
    forward transition for the shifted control.
    """
    if not flag.is_maximal:
        raise ValueError("cocycle identities are checked on maximal flags")
    if backward.times[0] != 0.0 or (len(backward.times) > 1 and backward.times[-1] > 0):
        raise ValueError("expected a trajectory over [ -T, 0 ] starting at time 0")
    n = len(backward.times) - 1
    stride = max(1, n // n_samples)
    worst = 0.0
    for i in range(0, n + 1, stride):
        if backward.times[i] == 0.0:
            continue  # both sides vanish identically at t = 0
        psi_m = backward.matrices[i]
        trip = iwasawa(psi_m @ flag.rep)
        forward = np.linalg.inv(psi_m)
        a_fwd = a_cocycle(forward, flag_point(trip.k, flag.blocks))
        worst = max(worst, float(np.abs(trip.a_vec + a_fwd).max()))
    return worst


def _type_a_form_row(beta: Sequence[Fraction], j: int) -> Fraction:
    # exact pairing of a simple-root-coordinate functional with the dual of
    # simple root j in type A (tridiagonal 2, -1 form)
    n = len(beta)
    val = 2 * beta[j]
    if j > 0:
        val -= beta[j - 1]
    if j < n - 1:
        val -= beta[j + 1]
    return val


def ktheta_invariance_residual(
    psi: np.ndarray,
    flag: FlagPoint,
    theta: Iterable[int],
    beta: Sequence[Fraction | int],
    k_block: np.ndarray,
    *,
    tol: float = 1e-9,
) -> float:
    """Defect of cocycle invariance under a block rotation of the frame.

    ``beta`` (simple-root coordinates, exact rationals) must annihilate the
    dual vectors of the theta roots; ``k_block`` must be block diagonal for
    the theta block structure, orthogonal, of determinant +1.
    """
    if not flag.is_maximal:
        raise ValueError("the invariance statement lives on maximal flags")
    d = flag.dim_ambient
    theta = frozenset(theta)
    beta_q = [Fraction(b) for b in beta]
    if len(beta_q) != d - 1:
        raise ValueError(f"functional must have {d - 1} simple-root coordinates")
    for j in sorted(theta):
        v = _type_a_form_row(beta_q, j)
        if v != 0:
            raise ValueError(
                f"functional {beta_q} does not annihilate the dual of simple root {j} "
                f"(value {v})"
            )
    k_block = np.asarray(k_block, dtype=float)
    blocks = blocks_from_theta(theta, d)
    mask = _block_diag_mask(blocks)
    if np.abs(k_block * ~mask).max() > 1e-12:
        raise ValueError("rotation is not block diagonal for the theta blocks")
    if np.abs(k_block.T @ k_block - np.eye(d)).max() > tol:
        raise ValueError("rotation is not orthogonal")
    if abs(np.linalg.det(k_block) - 1.0) > max(tol, 1e-6):
        raise ValueError("rotation must have determinant +1")
    f = realize_functional(beta_q, d)
    moved = flag_point(flag.rep @ k_block, flag.blocks)
    return abs(f(a_cocycle(psi, moved)) - f(a_cocycle(psi, flag)))


# ---------------------------------------------------------------------------
# Functional realization


@dataclass(frozen=True)
class RealizedFunctional:
    """Linear functional on diagonal vectors, with exact coefficients."""

    coeffs: tuple[Fraction, ...]

    def __call__(self, h: Sequence[float]) -> float:
        return float(sum(float(c) * float(v) for c, v in zip(self.coeffs, h)))

    def exact(self, h: Sequence[Fraction | int]) -> Fraction:
        return sum((c * Fraction(v) for c, v in zip(self.coeffs, h)), Fraction(0))


def realize_functional(coords: Sequence[Fraction | int], d: int) -> RealizedFunctional:
    """Realize simple-root coordinates as a functional on length-d vectors.

    Only the type A dictionary is realized: the i-th simple root maps
    ``h`` to ``h[i] - h[i+1]``.
    """
    if d < 2 or len(coords) != d - 1:
        raise ValueError(
            f"only the rank d-1 type A dictionary is realized; got {len(coords)} "
            f"coordinates for d={d}"
        )
    b = [Fraction(c) for c in coords]
    padded = [Fraction(0)] + b + [Fraction(0)]
    coeffs = tuple(padded[i + 1] - padded[i] for i in range(d))
    return RealizedFunctional(coeffs=coeffs)


# ---------------------------------------------------------------------------
# Split part and fixed flags of autonomous generators


@dataclass(frozen=True, eq=False)
class SplitPart:
    """Ordered real spectrum data of a real-diagonalizable traceless matrix.

    ``complex_pairs`` lists adjacent column index pairs of ``basis`` that
    carry the real and imaginary parts of one complex eigenvector.
    """

    h: np.ndarray
    theta: frozenset[int]
    basis: np.ndarray
    group_ids: tuple[int, ...]
    complex_pairs: tuple[tuple[int, int], ...]


def split_part(
    x: np.ndarray,
    *,
    gap_tol: float = 1e-6,
    cond_max: float = DEFAULT_COND_MAX,
) -> SplitPart:
    """Sorted real parts, degenerate simple roots, and an adapted real basis.

    Real parts are sorted descending; conjugate pairs contribute adjacent
    real-and-imaginary-part columns.  Gaps strictly between the zero
    threshold and ``gap_tol`` are rejected as ambiguous rather than
    silently grouped, and defective (non-diagonalizable) inputs are
    rejected through the basis condition number.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    if x.ndim != 2 or x.shape != (d, d):
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.linalg.norm(x)))
    if abs(np.trace(x)) > 1e-10 * scale * d:
        raise ValueError(f"matrix is not traceless: trace = {np.trace(x)!r}")
    evals, evecs = np.linalg.eig(x)
    imag_tol = 1e-10 * scale
    order = sorted(
        range(d), key=lambda i: (-evals[i].real, -abs(evals[i].imag), -evals[i].imag)
    )
    cols = []
    hvals = []
    pairs = []
    skip = False
    for pos, i in enumerate(order):
        if skip:
            skip = False
            continue
        lam = evals[i]
        if abs(lam.imag) <= imag_tol:
            v = evecs[:, i].real
            cols.append(v / np.linalg.norm(v))
            hvals.append(lam.real)
        else:
            if pos + 1 >= d:
                raise ValueError("unpaired complex eigenvalue")
            j = order[pos + 1]
            if abs(evals[j] - lam.conjugate()) > 1e-6 * scale:
                raise ValueError("complex eigenvalues do not pair into conjugates")
            v = evecs[:, i]
            vr, vi = v.real, v.imag
            cols.append(vr / np.linalg.norm(vr))
            cols.append(vi / np.linalg.norm(vi))
            hvals.extend([lam.real, lam.real])
            pairs.append((len(cols) - 2, len(cols) - 1))
            skip = True
    basis = np.column_stack(cols)
    cond = float(np.linalg.cond(basis))
    if not np.isfinite(cond) or cond > cond_max:
        raise ValueError(
            f"matrix is not numerically diagonalizable: eigenbasis condition "
            f"{cond:.3e} exceeds {cond_max:.1e}"
        )
    h = np.asarray(hvals, dtype=float)
    h = h - h.mean()  # restore exact zero sum lost to roundoff
    zero_tol = 1e-9 * scale
    theta = set()
    group_ids = [0]
    for i in range(d - 1):
        gap = h[i] - h[i + 1]
        if gap <= zero_tol:
            theta.add(i)
            group_ids.append(group_ids[-1])
        elif gap < gap_tol:
            raise ValueError(
                f"ambiguous real-part gap {gap:.3e} between positions {i} and {i + 1}: "
                f"inside (0, gap_tol={gap_tol:.1e}); pass an explicit gap_tol"
            )
        else:
            group_ids.append(group_ids[-1] + 1)
    # snap each group to its mean so degenerate exponents are exactly equal
    g = np.asarray(group_ids)
    for gid in range(g.max() + 1):
        sel = g == gid
        h[sel] = h[sel].mean()
    h.flags.writeable = False
    basis.flags.writeable = False
    return SplitPart(
        h=h,
        theta=frozenset(theta),
        basis=basis,
        group_ids=tuple(group_ids),
        complex_pairs=tuple(pairs),
    )


def permutation_matrix(w: WeylElement, d: int) -> np.ndarray:
    """The permutation matrix of a type A Weyl element on d letters."""
    if len(w.matrix) != d - 1:
        raise ValueError(f"Weyl element has rank {len(w.matrix)}, expected {d - 1}")
    p = np.eye(d)
    for i in w.reduced_word:
        t = np.eye(d)
        t[i, i] = t[i + 1, i + 1] = 0.0
        t[i, i + 1] = t[i + 1, i] = 1.0
        p = p @ t
    return p


def _permuted_layout(
    sp: SplitPart, w: WeylElement, blocks: tuple[int, ...]
) -> tuple[np.ndarray, np.ndarray]:
    """Permutation matrix and eigen-position assignment for a cell.

    Rejects arrangements that cut a complex conjugate pair across flag
    blocks: only whole pair planes are flow invariant, so such a cell has
    no fixed flag and no invariant tangent splitting.
    """
    d = sum(blocks)
    p = permutation_matrix(w, d)
    sigma = np.argmax(p, axis=0)  # flag position j holds eigen position sigma[j]
    bid = _block_index(blocks)
    flag_pos = {int(e): j for j, e in enumerate(sigma)}
    for a, b in sp.complex_pairs:
        if bid[flag_pos[a]] != bid[flag_pos[b]]:
            raise ValueError(
                f"cell of word {w.reduced_word} splits a complex eigenvalue pair "
                "across flag blocks; the generator fixes no flag there"
            )
    return p, sigma


def fixed_flags(
    x: np.ndarray,
    theta: Iterable[int],
    w: WeylElement,
    *,
    gap_tol: float = 1e-6,
) -> FlagPoint:
    """The invariant flag of the coset representative ``w`` for generator ``x``.

    Built by permuting the ordered eigenbasis columns and orthonormalizing;
    leading spans of eigenvector prefixes are invariant under the flow.
    """
    sp = split_part(x, gap_tol=gap_tol)
    blocks = blocks_from_theta(theta, x.shape[0])
    p, _ = _permuted_layout(sp, w, blocks)
    return flag_from_basis(sp.basis @ p, blocks)


# ---------------------------------------------------------------------------
# Horizontal tangent model and derivatives


def _block_index(blocks: tuple[int, ...]) -> np.ndarray:
    out = np.empty(sum(blocks), dtype=int)
    pos = 0
    for bi, b in enumerate(blocks):
        out[pos : pos + b] = bi
        pos += b
    return out


def _lower_mask(blocks: tuple[int, ...]) -> np.ndarray:
    bid = _block_index(blocks)
    return bid[:, None] > bid[None, :]


def _block_diag_mask(blocks: tuple[int, ...]) -> np.ndarray:
    bid = _block_index(blocks)
    return bid[:, None] == bid[None, :]


def _lower_positions(blocks: tuple[int, ...]) -> list[tuple[int, int]]:
    mask = _lower_mask(blocks)
    d = mask.shape[0]
    return [(i, j) for j in range(d) for i in range(d) if mask[i, j]]


def horizontal_basis(blocks: tuple[int, ...]) -> list[np.ndarray]:
    """Orthonormal elementary basis of the block strictly lower positions."""
    d = sum(blocks)
    out = []
    for i, j in _lower_positions(blocks):
        e = np.zeros((d, d))
        e[i, j] = 1.0
        out.append(e)
    return out


def projective_derivative_det(
    psi: np.ndarray,
    x: FlagPoint,
    basis: Sequence[np.ndarray],
    *,
    orth_tol: float = 1e-9,
) -> float:
    """Unsigned volume distortion of the flag action on a tangent subspace.

    ``basis`` must be orthonormal horizontal vectors at ``x`` (block
    strictly lower matrices under the Frobenius form).  The image volume is
    the Gram determinant of the transported horizontal components; the
    empty basis gives 1.
    """
    basis = [np.asarray(b, dtype=float) for b in basis]
    if not basis:
        return 1.0
    d = x.dim_ambient
    mask = _lower_mask(x.blocks)
    for b in basis:
        if b.shape != (d, d):
            raise ValueError("tangent vectors must match the ambient dimension")
        if np.abs(b * ~mask).max() > 1e-12 * max(1.0, np.abs(b).max()):
            raise ValueError("tangent vector is not horizontal for the flag blocks")
    k = len(basis)
    gram0 = np.array([[float(np.sum(a * b)) for b in basis] for a in basis])
    if np.abs(gram0 - np.eye(k)).max() > orth_tol:
        raise ValueError("tangent basis must be orthonormal")
    g = np.asarray(psi, dtype=float) @ x.rep
    _, r = _qr_pos(g)
    rinv = scipy.linalg.solve_triangular(r, np.eye(d))
    images = [(r @ b @ rinv) * mask for b in basis]
    gram = np.array([[float(np.sum(a * b)) for b in images] for a in images])
    det = float(np.linalg.det(gram))
    return math.sqrt(max(det, 0.0))


@dataclass(frozen=True, eq=False)
class RealizationSplit:
    """Orthonormal horizontal bases of the three invariant subbundles at a
    fixed flag, with the predicted growth exponent multisets."""

    stable: tuple[np.ndarray, ...]
    center: tuple[np.ndarray, ...]
    unstable: tuple[np.ndarray, ...]
    stable_exponents: tuple[float, ...]
    center_exponents: tuple[float, ...]
    unstable_exponents: tuple[float, ...]


def invariant_realizations(
    x: np.ndarray,
    theta: Iterable[int],
    w: WeylElement,
    *,
    gap_tol: float = 1e-6,
) -> RealizationSplit:
    """Stable, center and unstable tangent realizations at the fixed flag of ``w``."""
    sp = split_part(x, gap_tol=gap_tol)
    d = x.shape[0]
    blocks = blocks_from_theta(theta, d)
    p, sigma = _permuted_layout(sp, w, blocks)
    q, r = _qr_pos(sp.basis @ p)
    if np.linalg.det(q) < 0:
        q = q.copy()
        q[:, -1] = -q[:, -1]
        r = r.copy()
        r[-1, :] = -r[-1, :]
    mask = _lower_mask(blocks)
    hw = sp.h[sigma]
    gid = np.asarray(sp.group_ids)[sigma]
    rinv = scipy.linalg.solve_triangular(r, np.eye(d))
    buckets: dict[str, list[tuple[float, np.ndarray]]] = {
        "stable": [],
        "center": [],
        "unstable": [],
    }
    for i, j in _lower_positions(blocks):
        lam = float(hw[i] - hw[j])
        e = np.zeros((d, d))
        e[i, j] = 1.0
        vec = (r @ e @ rinv) * mask
        if gid[i] == gid[j]:
            buckets["center"].append((lam, vec))
        elif lam > 0:
            buckets["unstable"].append((lam, vec))
        else:
            buckets["stable"].append((lam, vec))

    def pack(items: list[tuple[float, np.ndarray]]) -> tuple[tuple[np.ndarray, ...], tuple[float, ...]]:
        if not items:
            return (), ()
        lams = tuple(sorted(lam for lam, _ in items))
        flat = np.column_stack([v[mask] for _, v in items])
        qf, _ = np.linalg.qr(flat)
        vecs = []
        for col in range(qf.shape[1]):
            m = np.zeros((d, d))
            m[mask] = qf[:, col]
            vecs.append(m)
        return tuple(vecs), lams

    sv, se = pack(buckets["stable"])
    cv, ce = pack(buckets["center"])
    uv, ue = pack(buckets["unstable"])
    return RealizationSplit(
        stable=sv,
        center=cv,
        unstable=uv,
        stable_exponents=se,
        center_exponents=ce,
        unstable_exponents=ue,
    )


# ---------------------------------------------------------------------------
# Verification against the exact classification


def _attractor_frame(sp: SplitPart) -> np.ndarray:
    q, _ = _qr_pos(sp.basis)
    if np.linalg.det(q) < 0:
        q = q.copy()
        q[:, -1] = -q[:, -1]
    return q


def determinant_formula_residuals(
    x: np.ndarray,
    rs: RootSystem,
    spec: FlagSpec,
    record: ChainControlSetRecord,
    t: float,
    *,
    gap_tol: float = 1e-6,
) -> tuple[float, float]:
    """Relative defects of the Jacobian determinant identity at time ``t``.

    Left side: Gram volume of the flow derivative on the unstable (stable)
    realization at the record's fixed flag.  Right side: exponential of the
    record's growth functional evaluated on the cocycle of the adapted
    frame.  Returns (unstable defect, stable defect).
    """
    if not record.hyperbolic:
        raise ValueError("the determinant identity requires a hyperbolic record")
    d = x.shape[0]
    sp = split_part(x, gap_tol=gap_tol)
    if sp.theta != spec.flag_type:
        raise ValueError(
            f"generator flow type {sorted(sp.theta)} disagrees with spec "
            f"{sorted(spec.flag_type)}"
        )
    frame = _attractor_frame(sp)
    xi = flag_point(frame, (1,) * d)
    psi = scipy.linalg.expm(t * x)
    avec = a_cocycle(psi, xi, cond_max=None)
    real = invariant_realizations(x, spec.theta, record.rep, gap_tol=gap_tol)
    xw = fixed_flags(x, spec.theta, record.rep, gap_tol=gap_tol)
    out = []
    for sig, basis in ((record.sigma_plus, real.unstable), (record.sigma_minus, real.stable)):
        lhs = projective_derivative_det(psi, xw, basis)
        rhs = math.exp(realize_functional(sig, d)(avec))
        out.append(abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return out[0], out[1]


@dataclass(frozen=True, eq=False)
class RateReport:
    """Measured growth data against the exact predictions."""

    positive_roots: tuple[tuple[int, ...], ...]
    cocycle_predicted: tuple[float, ...]
    cocycle_measured: tuple[float, ...]
    mu_estimate: float
    stable_predicted: tuple[float, ...]
    stable_measured: tuple[float, ...]
    unstable_predicted: tuple[float, ...]
    unstable_measured: tuple[float, ...]
    center_range: tuple[float, float] | None
    max_exponent_rel_error: float


def verify_rates(
    x: np.ndarray,
    rs: RootSystem,
    spec: FlagSpec,
    record: ChainControlSetRecord,
    T: float,
    *,
    require_hyperbolic: bool = True,
    gap_tol: float = 1e-6,
    step: float = 0.25,
) -> RateReport:
    """Measure cocycle slopes and subbundle singular value exponents.

    The cocycle along the attractor frame is accumulated in bounded steps,
    so arbitrarily long horizons stay well conditioned.  Subbundle
    derivatives are powers of a single short-time endomorphism at the fixed
    flag of the record.  Center realizations only appear on non-hyperbolic
    records, which must be enabled explicitly.
    """
    if T < 1.0:
        raise ValueError("need a horizon of at least 1")
    if not record.hyperbolic and require_hyperbolic:
        raise ValueError(
            "record is not hyperbolic; pass require_hyperbolic=False for "
            "center diagnostics"
        )
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    if rs.family != "A" or rs.rank != d - 1:
        raise ValueError(f"root system {rs.lie_type} does not match SL({d})")
    sp = split_part(x, gap_tol=gap_tol)
    if sp.theta != spec.flag_type:
        raise ValueError(
            f"generator flow type {sorted(sp.theta)} disagrees with spec "
            f"{sorted(spec.flag_type)}"
        )

    # cocycle slopes at the attractor frame, accumulated in bounded steps
    frame0 = _attractor_frame(sp)
    roots = [
        r
        for r in rs.sorted_positive_roots()
        if r not in span_subset(rs, spec.flag_type)
    ]
    functionals = [realize_functional(r.coords, d) for r in roots]
    predicted = tuple(f(sp.h) for f in functionals)
    n_sub = max(1, int(math.ceil(T / 0.5)))
    dt_sub = T / n_sub
    stepm = scipy.linalg.expm(dt_sub * x)
    frame = frame0
    acc = np.zeros(d)
    curve = [(0.0, acc)]
    for k in range(1, n_sub + 1):
        trip = iwasawa(stepm @ frame)
        frame = trip.k
        acc = acc + trip.a_vec
        curve.append((k * dt_sub, acc))
    measured = tuple(f(acc) / T for f in functionals)
    mu = min(
        f(a) / tau for tau, a in curve if tau >= 1.0 - 1e-12 for f in functionals
    )

    # subbundle exponents from singular values of powered short-time maps
    real = invariant_realizations(x, spec.theta, record.rep, gap_tol=gap_tol)
    xw = fixed_flags(x, spec.theta, record.rep, gap_tol=gap_tol)
    mask = _lower_mask(xw.blocks)
    m_step = xw.rep.T @ scipy.linalg.expm(step * x) @ xw.rep
    m_inv = np.linalg.inv(m_step)

    def short_map(basis: tuple[np.ndarray, ...]) -> np.ndarray:
        k = len(basis)
        out = np.empty((k, k))
        for col, b in enumerate(basis):
            img = (m_step @ b @ m_inv) * mask
            for row, a in enumerate(basis):
                out[row, col] = float(np.sum(a * img))
        return out

    n_pow = max(1, int(round(T / step)))
    horizon = n_pow * step

    def measured_exponents(basis: tuple[np.ndarray, ...]) -> tuple[float, ...]:
        if not basis:
            return ()
        powered = np.linalg.matrix_power(short_map(basis), n_pow)
        sv = np.linalg.svd(powered, compute_uv=False)
        return tuple(sorted(float(np.log(s)) / horizon for s in sv))

    stable_meas = measured_exponents(real.stable)
    unstable_meas = measured_exponents(real.unstable)
    center_range: tuple[float, float] | None = None
    if real.center:
        dc = short_map(real.center)
        lo, hi = math.inf, -math.inf
        powered = np.eye(len(real.center))
        for k in range(1, n_pow + 1):
            powered = dc @ powered
            sv = np.linalg.svd(powered, compute_uv=False)
            tau = k * step
            lo = min(lo, float(np.log(sv[-1])) / tau)
            hi = max(hi, float(np.log(sv[0])) / tau)
        center_range = (lo, hi)

    rel = 0.0
    for pred, meas in (
        (real.stable_exponents, stable_meas),
        (real.unstable_exponents, unstable_meas),
    ):
        for p_val, m_val in zip(pred, meas):
            rel = max(rel, abs(m_val - p_val) / max(abs(p_val), 1e-12))

    return RateReport(
        positive_roots=tuple(r.coords for r in roots),
        cocycle_predicted=predicted,
        cocycle_measured=measured,
        mu_estimate=float(mu),
        stable_predicted=real.stable_exponents,
        stable_measured=stable_meas,
        unstable_predicted=real.unstable_exponents,
        unstable_measured=unstable_meas,
        center_range=center_range,
        max_exponent_rel_error=float(rel),
    )


# ---------------------------------------------------------------------------
# Cocycle sampling along simulated flows


@dataclass(frozen=True, eq=False)
class CocycleSample:
    """Cocycle accumulated along a simulated trajectory at one flag."""

    times: np.ndarray
    a_values: np.ndarray

    @property
    def dim(self) -> int:
        return self.a_values.shape[1]


def cocycle_sample(
    spec: ControlSystemSpec,
    signal: ControlSignal,
    T: float,
    flag: FlagPoint,
    *,
    sample_every: int = 10,
) -> CocycleSample:
    """Accumulate the cocycle stepwise along the integrated flow.

    The frame is refactored every step, so conditioning never grows with
    the horizon; steps with an exactly-identity transition contribute
    exactly zero.
    """
    if not flag.is_maximal:
        raise ValueError("the cocycle is sampled at maximal flags")
    if sample_every < 1:
        raise ValueError("sample stride must be at least 1")
    cfg = spec.integrator
    dt = cfg.dt
    if signal.n_channels != spec.n_controls:
        raise ValueError("signal channel count does not match the system")
    n = int(round(abs(T) / dt))
    if abs(abs(T) - n * dt) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("horizon must be an integer multiple of dt")
    h = dt if T >= 0 else -dt
    d = spec.dim
    eye = np.eye(d)
    cache: dict[bytes, tuple[np.ndarray, bool]] = {}
    frame = flag.rep
    acc = np.zeros(d)
    times = [0.0]
    values = [acc]
    for i in range(n):
        u = signal.value_at((i + 0.5) * h)
        key = u.tobytes()
        entry = cache.get(key)
        if entry is None:
            if not spec.control_range.contains(u):
                raise ValueError(f"control value {u.tolist()} lies outside the range")
            step = _rk4_step_matrix(spec.generator(u), h)
            entry = (step, bool(np.array_equal(step, eye)))
            cache[key] = entry
        step, is_id = entry
        if not is_id:
            b = step @ frame
            q, r = _qr_pos(b)
            frame = q
            acc = acc + np.log(np.diag(r))
        if (i + 1) % sample_every == 0 or i == n - 1:
            times.append((i + 1) * h)
            values.append(acc)
    return CocycleSample(times=np.asarray(times), a_values=np.vstack(values))


def cocycle_to_csv(sample: CocycleSample) -> str:
    d = sample.dim
    lines = ["t," + ",".join(f"a{i + 1}" for i in range(d))]
    for t, row in zip(sample.times, sample.a_values):
        lines.append(f"{t:.10g}," + ",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"


def flag_type_diagnostic(
    samples: Sequence[CocycleSample],
    *,
    window: float = 0.5,
    margin: float = 0.05,
) -> dict:
    """Estimate which simple slopes stay central over the sampled runs.

    A simple root index is reported when, over the trailing ``window``
    fraction of every run, its slope band [min, max] straddles zero within
    ``margin``.  This is a numerical indicator, not a certificate.
    """
    if not samples:
        raise ValueError("need at least one cocycle sample")
    d = samples[0].dim
    slopes = []
    central = []
    for i in range(d - 1):
        lo, hi = math.inf, -math.inf
        for s in samples:
            t_end = abs(s.times[-1])
            if t_end == 0:
                raise ValueError("degenerate sample with zero horizon")
            sel = (np.abs(s.times) >= (1.0 - window) * t_end) & (s.times != 0)
            y = (s.a_values[sel, i] - s.a_values[sel, i + 1]) / s.times[sel]
            lo = min(lo, float(y.min()))
            hi = max(hi, float(y.max()))
        slopes.append((lo, hi))
        if lo <= margin and hi >= -margin:
            central.append(i)
    return {"slope_bands": slopes, "estimated_flag_type": central}


# ---------------------------------------------------------------------------
# Random sampling helpers


def random_traceless(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    m = rng.standard_normal((d, d))
    m -= np.trace(m) / d * np.eye(d)
    norm = float(np.linalg.norm(m))
    if norm == 0.0:
        return random_traceless(rng, d, scale)
    return m * (scale / norm)


def random_special_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, _ = _qr_pos(rng.standard_normal((d, d)))
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def random_unimodular(rng: np.random.Generator, d: int) -> np.ndarray:
    while True:
        m = rng.standard_normal((d, d))
        det = float(np.linalg.det(m))
        if abs(det) > 1e-6:
            break
    if det < 0:
        m[:, 0] = -m[:, 0]
        det = -det
    return m / det ** (1.0 / d)

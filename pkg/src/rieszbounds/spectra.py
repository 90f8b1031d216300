"""Node sets on the circle, their periodic line spectra, and perturbations.

A :class:`NodeSet` holds ``d`` points of ``[0, 1)``. Scaling by ``d`` and
repeating with period ``d`` gives the real sequence
``Lambda = d*theta_j + d*Z``, a density-one spectrum whose exponential system
has the same Riesz bounds as the Vandermonde system of the nodes.

Displacements are always stored in grid units: a node ``j/d`` moved by
``mu_j`` lands at ``j/d + mu_j/d``, i.e. the line point ``j`` moves to
``j + mu_j``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError

#: nodes closer than this (mod 1) count as duplicates
COLLISION_TOL = 1e-12

PERTURBATION_KINDS = ("uniform_kadec", "block_avdonin", "constant_shift")


def _normalize(values):
    arr = np.asarray(values, dtype=float).ravel() % 1.0
    # x % 1.0 rounds tiny negatives up to exactly 1.0
    arr[arr >= 1.0] = 0.0
    return np.sort(arr)


def _circular_gaps(nodes):
    if nodes.size == 1:
        return np.array([1.0])
    gaps = np.diff(nodes)
    return np.append(gaps, 1.0 - nodes[-1] + nodes[0])


@dataclass(frozen=True, eq=False)
class NodeSet:
    """``d`` distinct points on the circle ``[0, 1)``, sorted ascending.

    Any real input is reduced modulo 1 and sorted; duplicates (within
    :data:`COLLISION_TOL`) raise :class:`InvalidInputError`.
    """

    nodes: np.ndarray

    def __post_init__(self):
        arr = _normalize(self.nodes)
        if arr.size == 0:
            raise InvalidInputError("a node set needs at least one node")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("nodes must be finite")
        gaps = _circular_gaps(arr)
        if arr.size > 1 and gaps.min() < COLLISION_TOL:
            i = int(np.argmin(gaps))
            raise InvalidInputError(
                f"duplicate nodes modulo 1 near {arr[i]!r} "
                f"(gap {gaps[i]:.3e})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "nodes", arr)

    @property
    def d(self) -> int:
        return int(self.nodes.size)

    def __len__(self):
        return self.d

    def __iter__(self):
        return iter(self.nodes.tolist())

    def __eq__(self, other):
        if not isinstance(other, NodeSet):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.nodes, other.nodes)

    def __hash__(self):
        return hash(self.nodes.tobytes())

    def __repr__(self):
        return f"NodeSet(d={self.d}, nodes={self.nodes.tolist()!r})"

    def rotate(self, c: float) -> "NodeSet":
        return NodeSet(self.nodes + c)

    def reflect(self) -> "NodeSet":
        return NodeSet(-self.nodes)


def separation(nodes: NodeSet) -> float:
    """Minimal circular distance between distinct nodes.

    For ``d = 1`` the only "neighbour" is the node itself one full turn
    away, so the result is 1.
    """
    if not isinstance(nodes, NodeSet):
        nodes = NodeSet(nodes)
    return float(_circular_gaps(nodes.nodes).min())


def roots_of_unity(d: int) -> NodeSet:
    """The equispaced nodes ``{j/d}``; their Vandermonde matrix is the DFT."""
    if int(d) != d or d < 1:
        raise InvalidInputError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    return NodeSet(np.arange(d) / d)


def counterexample_family(d: int) -> NodeSet:
    """Nodes ``{0} U {+-(j - 1/4)/d}``: a quarter-shift of the roots of unity.

    For odd ``d = 2k+1`` the shifts run over ``j = 1..k``. For even ``d = 2k``
    they run over ``j = 1..k-1`` and the single extra node ``(k - 1/4)/d`` is
    added (the literal even-case formula; see README).
    Every node sits within a quarter grid step of some ``j/d`` and the
    lower bound of the family is not uniform in ``d``.
    """
    if int(d) != d or d < 1:
        raise InvalidInputError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    k = d // 2
    if d % 2:
        shifts = (np.arange(1, k + 1) - 0.25) / d
        pts = np.concatenate(([0.0], shifts, -shifts))
    else:
        shifts = (np.arange(1, k) - 0.25) / d
        pts = np.concatenate(([0.0, (k - 0.25) / d], shifts, -shifts))
    return NodeSet(pts)


@dataclass(frozen=True, eq=False)
class PeriodicSpectrum:
    """The ``d``-periodic line spectrum generated by a node set."""

    base: NodeSet

    @property
    def period(self) -> int:
        return self.base.d

    @property
    def generators(self) -> np.ndarray:
        """The points of one period, ``d * theta_j`` in ``[0, d)``."""
        return self.base.d * self.base.nodes

    @property
    def separation(self) -> float:
        return self.base.d * separation(self.base)

    def points(self, lo: float, hi: float) -> np.ndarray:
        """All spectrum points in the closed window ``[lo, hi]``, sorted."""
        P = self.period
        m0 = math.floor(lo / P) - 1
        m1 = math.ceil(hi / P) + 1
        shifts = P * np.arange(m0, m1 + 1)
        pts = (self.generators[None, :] + shifts[:, None]).ravel()
        pts = np.sort(pts)
        return pts[(pts >= lo) & (pts <= hi)]

    @classmethod
    def from_generators(cls, xs, period: int) -> "PeriodicSpectrum":
        """Build from ``period`` points of ``[0, period)``."""
        xs = np.asarray(xs, dtype=float)
        if xs.size != period:
            raise InvalidInputError(
                f"need exactly {period} generators per period, got {xs.size}"
            )
        return cls(NodeSet(xs / period))


@dataclass(frozen=True, eq=False)
class PerturbationSpec:
    """Grid-unit displacements ``mu_j`` together with their summary sizes."""

    mu: np.ndarray
    kind: str = "custom"
    block_size: int | None = None
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).ravel()
        if mu.size == 0 or not np.all(np.isfinite(mu)):
            raise InvalidInputError("displacements must be finite and non-empty")
        if self.block_size is not None and not 1 <= self.block_size <= mu.size:
            raise InvalidInputError(
                f"block size {self.block_size} outside [1, {mu.size}]"
            )
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def d(self) -> int:
        return int(self.mu.size)

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.mu).max())

    @property
    def mu_star(self) -> float | None:
        if self.block_size is None:
            return None
        return block_average_sup(self.mu, self.block_size)


def block_averages(mu, N: int) -> np.ndarray:
    """Averages of ``N`` consecutive entries starting at ``m*N``, ``m < d``.

    Indices wrap modulo ``d``.
    """
    mu = np.asarray(mu, dtype=float)
    d = mu.size
    idx = (np.arange(d)[:, None] * N + np.arange(N)[None, :]) % d
    return mu[idx].mean(axis=1)


def block_average_sup(mu, N: int) -> float:
    return float(np.abs(block_averages(mu, N)).max())


def rng_for(seed, *keys) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``seed`` and extra integers."""
    ss = np.random.SeedSequence([int(seed), *[int(k) for k in keys]])
    return np.random.Generator(np.random.Philox(ss))


def make_perturbation(kind: str, params: dict, d: int, seed: int = 0, keys=()) -> PerturbationSpec:
    """Draw a displacement pattern of length ``d``.

    Parameters
    ----------
    kind : {"uniform_kadec", "block_avdonin", "constant_shift"}
        ``uniform_kadec`` needs ``mu_max < 1/4`` and draws each displacement
        uniformly from ``[-mu_max, mu_max]``. ``block_avdonin`` needs ``L``,
        ``N`` and ``mu_star < 1/4`` with ``mu_star <= L``; entries stay in
        ``[-L, L]`` and the sup of the block averages equals ``mu_star``.
        ``constant_shift`` needs ``c``.
    params : dict
    d : int
    seed : int
    keys : sequence of int, optional
        Extra integers mixed into the random stream, e.g. ``(trial, d)``.

    Returns
    -------
    PerturbationSpec
    """
    if int(d) != d or d < 1:
        raise InvalidInputError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    rng = rng_for(seed, *keys)
    params = dict(params)

    if kind == "constant_shift":
        c = float(_require(params, "c", kind))
        return PerturbationSpec(np.full(d, c), kind=kind, seed=seed, params=params)

    if kind == "uniform_kadec":
        mu_max = float(_require(params, "mu_max", kind))
        if not 0.0 <= mu_max < 0.25:
            raise InvalidInputError(f"uniform_kadec needs 0 <= mu_max < 1/4, got {mu_max}")
        mu = rng.uniform(-mu_max, mu_max, size=d)
        return PerturbationSpec(mu, kind=kind, seed=seed, params=params)

    if kind == "block_avdonin":
        L = float(_require(params, "L", kind))
        N = int(_require(params, "N", kind))
        target = float(_require(params, "mu_star", kind))
        if L <= 0:
            raise InvalidInputError(f"L must be positive, got {L}")
        if not 1 <= N <= d:
            raise InvalidInputError(f"block size N={N} must lie in [1, d={d}]")
        if not 0.0 <= target < 0.25:
            raise InvalidInputError(f"block_avdonin needs 0 <= mu_star < 1/4, got {target}")
        if target > L:
            raise InvalidInputError(f"mu_star={target} cannot exceed L={L}")
        mu = _block_pattern(rng, d, L, N, target)
        return PerturbationSpec(mu, kind=kind, block_size=N, seed=seed, params=params)

    raise InvalidInputError(f"unknown perturbation kind {kind!r}; expected one of {PERTURBATION_KINDS}")


def _require(params, key, kind):
    if key not in params:
        raise InvalidInputError(f"{kind} perturbation needs parameter {key!r}")
    return params[key]


def _block_pattern(rng, d, L, N, target):
    # Every block starts at a multiple of g = gcd(N, d) and is a union of
    # whole chunks of length g, so fixing chunk means fixes block means.
    g = math.gcd(N, d)
    n_chunks = d // g
    if g == N:
        means = rng.uniform(-target, target, size=n_chunks)
        means[rng.integers(n_chunks)] = target * rng.choice((-1.0, 1.0))
    else:
        means = np.full(n_chunks, target * rng.choice((-1.0, 1.0)))

    mu = np.empty(d)
    for b in range(n_chunks):
        v = rng.uniform(-L, L, size=g)
        v -= v.mean()
        room = L - abs(means[b])
        peak = np.abs(v).max()
        if peak > room:
            v *= room / peak
        mu[b * g:(b + 1) * g] = means[b] + v
    return mu


def apply_perturbation(base: NodeSet, pert: PerturbationSpec) -> NodeSet:
    """Move node ``j`` to ``base_j + mu_j/d`` (mod 1) and resort."""
    if base.d != pert.d:
        raise InvalidInputError(
            f"perturbation length {pert.d} does not match node count {base.d}"
        )
    return NodeSet(base.nodes + pert.mu / base.d)


def read_nodes(path) -> NodeSet:
    """Read a node file: a JSON array, or one decimal number per line.

    Blank lines and lines starting with ``#`` are ignored in the text form.
    """
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            values = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: malformed JSON node list ({exc})") from exc
    else:
        values = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise InvalidInputError(f"{path}: node list must contain only numbers")
    return NodeSet(values)


def write_nodes(nodes: NodeSet, path, fmt: str = "txt"):
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps([float(x) for x in nodes.nodes]) + "\n")
    elif fmt == "txt":
        path.write_text("".join(f"{x:.17g}\n" for x in nodes.nodes))
    else:
        raise InvalidInputError(f"unknown node file format {fmt!r}")

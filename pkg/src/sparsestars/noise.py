"""Single-layer QAOA cost under per-qubit dephasing, and digital fidelity bounds.

The state is ``exp(-i beta B) exp(-i gamma C') |+>^n`` with mixer
``B = sum_u X_u``, scored against the cost ``C``. Implementing the phase
separator takes time ``t = gamma * T_unit`` under dephasing at rate
``Gamma``; edge correlators decay as ``exp(-Gamma t / 2)`` and the
triangle correlators as ``exp(-Gamma t)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph

STATEVECTOR_CAP = 14


@dataclass(frozen=True)
class NoiseParams:
    gamma_dephase: float = 0.0
    t_unit: float | None = None  # compile time of exp(-i C') from CompilationMetrics

    def __post_init__(self):
        if self.gamma_dephase < 0:
            raise ValueError("dephasing rate must be nonnegative")
        if self.gamma_dephase > 0 and not (self.t_unit and self.t_unit > 0):
            raise ValueError("a positive compile time is required when the dephasing rate is positive")

    def time(self, gamma):
        if self.gamma_dephase == 0:
            return np.zeros_like(np.asarray(gamma, dtype=float))
        # a negative angle is realised with flipped pulse signs, not negative time
        return np.abs(np.asarray(gamma, dtype=float)) * self.t_unit


def _profiles(c: WeightedGraph, c_prime: WeightedGraph, gammas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``A(gamma)`` and ``B(gamma)`` with ``f = sin(4b) A`` and ``tau = -sin(2b)^2 B``.

    Vertices adjacent in ``C'`` to neither endpoint contribute ``cos(0) = 1``
    to every product, so each edge only visits its ``C'`` neighbourhood.
    """
    if c.n != c_prime.n:
        raise ValueError(f"vertex counts differ: {c.n} != {c_prime.n}")
    gammas = np.atleast_1d(np.asarray(gammas, dtype=float))
    wp = c_prime.adjacency()
    nbrs = [set(x) for x in c_prime.neighbors()]
    two_g = 2.0 * gammas
    a = np.zeros_like(gammas)
    b = np.zeros_like(gammas)
    for u, v, w in c.edges:
        mu = sorted((nbrs[u] | nbrs[v]) - {u, v})
        cu = wp[mu, u][:, None]
        cv = wp[mu, v][:, None]
        if mu:
            p_v = np.prod(np.cos(two_g * cv), axis=0)
            p_u = np.prod(np.cos(two_g * cu), axis=0)
            p_plus = np.prod(np.cos(two_g * (cu + cv)), axis=0)
            p_minus = np.prod(np.cos(two_g * (cu - cv)), axis=0)
        else:
            p_v = p_u = p_plus = p_minus = np.ones_like(gammas)
        a += 0.5 * w * np.sin(two_g * wp[u, v]) * (p_v + p_u)
        b += 0.5 * w * (p_plus - p_minus)
    return a, b


def edge_triangle_split(c: WeightedGraph, c_prime: WeightedGraph, gamma: float, beta: float) -> tuple[float, float]:
    """Noiseless edge term ``f`` and triangle term ``tau`` at one parameter point."""
    a, b = _profiles(c, c_prime, np.array([gamma]))
    return float(math.sin(4 * beta) * a[0]), float(-(math.sin(2 * beta) ** 2) * b[0])


def qaoa_cost_dephased(
    c: WeightedGraph, c_prime: WeightedGraph, gamma: float, beta: float, noise: NoiseParams = NoiseParams()
) -> float:
    f, tau = edge_triangle_split(c, c_prime, gamma, beta)
    gt = float(noise.gamma_dephase * noise.time(gamma))
    return math.exp(-gt / 2) * f + math.exp(-gt) * tau


def statevector_qaoa_cost(c: WeightedGraph, c_prime: WeightedGraph, gamma: float, beta: float) -> float:
    """Dense-state evaluation of ``<C>``; the independent check of the closed form at zero noise."""
    n = c.n
    if n > STATEVECTOR_CAP:
        raise ValueError(f"statevector oracle capped at n <= {STATEVECTOR_CAP}")
    if c_prime.n != n:
        raise ValueError("vertex counts differ")
    idx = np.arange(1 << n)
    z = 1 - 2 * ((idx[:, None] >> np.arange(n)) & 1)

    def diagonal(g: WeightedGraph) -> np.ndarray:
        d = np.zeros(1 << n)
        for u, v, w in g.edges:
            d += w * z[:, u] * z[:, v]
        return d

    psi = np.exp(-1j * gamma * diagonal(c_prime)) / math.sqrt(1 << n)
    rx = np.array([[math.cos(beta), -1j * math.sin(beta)], [-1j * math.sin(beta), math.cos(beta)]])
    psi = psi.reshape((2,) * n)
    for q in range(n):
        axis = n - 1 - q  # qubit q is bit q of the flat index
        psi = np.moveaxis(np.tensordot(rx, psi, axes=([1], [axis])), 0, axis)
    psi = psi.reshape(-1)
    return float(np.real(np.vdot(psi, diagonal(c) * psi)))


def grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Multiples ``k * step`` with ``lo < k * step <= hi`` (lower end open)."""
    k0 = math.floor(lo / step + 1e-9) + 1
    k1 = math.floor(hi / step + 1e-9)
    if k1 < k0:
        raise ValueError(f"empty grid range ({lo}, {hi}]")
    return np.arange(k0, k1 + 1) * step


@dataclass(frozen=True)
class CostLandscape:
    gamma_axis: np.ndarray
    beta_axis: np.ndarray
    values: np.ndarray  # shape (len(gamma_axis), len(beta_axis))
    step: float
    noise: NoiseParams
    edge_part: np.ndarray = field(repr=False)  # f on the grid
    triangle_part: np.ndarray = field(repr=False)  # tau on the grid

    @property
    def argmin_index(self) -> tuple[int, int]:
        # row-major argmin: ties go to the smaller gamma, then the smaller beta
        i = int(np.argmin(self.values))
        return divmod(i, self.values.shape[1])

    @property
    def argmin(self) -> tuple[float, float, float]:
        i, j = self.argmin_index
        return float(self.gamma_axis[i]), float(self.beta_axis[j]), float(self.values[i, j])

    @property
    def optimal_time(self) -> float:
        return float(self.noise.time(self.argmin[0]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gamma", "beta", "cost"])
        for i, g in enumerate(self.gamma_axis):
            for j, b in enumerate(self.beta_axis):
                w.writerow([repr(float(g)), repr(float(b)), repr(float(self.values[i, j]))])
        return buf.getvalue()

    def summary(self) -> dict:
        g, b, v = self.argmin
        return {
            "gamma_star": g,
            "beta_star": b,
            "cost_star": v,
            "Gamma": self.noise.gamma_dephase,
            "T_unit": self.noise.t_unit,
            "step": self.step,
            "gamma_range": [float(self.gamma_axis[0]), float(self.gamma_axis[-1])],
            "beta_range": [float(self.beta_axis[0]), float(self.beta_axis[-1])],
        }


def grid_search(
    c: WeightedGraph,
    c_prime: WeightedGraph,
    noise: NoiseParams = NoiseParams(),
    gamma_range: tuple[float, float] = (0.0, math.pi),
    beta_range: tuple[float, float] = (0.0, math.pi / 2),
    step: float = 0.01 * math.pi,
) -> CostLandscape:
    """Evaluate ``<C>`` on the grid ``(lo, hi]`` in each parameter and locate the minimum.

    The beta dependence factorizes out of the correlators, so the profiles
    are evaluated once per gamma and combined by an outer product.
    """
    gammas = grid_axis(*gamma_range, step)
    betas = grid_axis(*beta_range, step)
    a, b = _profiles(c, c_prime, gammas)
    f = a[:, None] * np.sin(4 * betas)[None, :]
    tau = -b[:, None] * (np.sin(2 * betas) ** 2)[None, :]
    gt = noise.gamma_dephase * noise.time(gammas)
    values = np.exp(-gt / 2)[:, None] * f + np.exp(-gt)[:, None] * tau
    return CostLandscape(gammas, betas, values, step, noise, f, tau)


@dataclass(frozen=True)
class NoiseRatio:
    ratio: float
    bound: float
    triangle_free: bool

    @property
    def violated(self) -> bool:
        # the bound is only strict without triangles
        return self.triangle_free and self.ratio > self.bound + 1e-9


def is_triangle_free(c: WeightedGraph, c_prime: WeightedGraph | None = None) -> bool:
    """True when no vertex is adjacent in ``C'`` to both endpoints of a ``C`` edge."""
    c_prime = c if c_prime is None else c_prime
    nbrs = [set(x) for x in c_prime.neighbors()]
    return all(not ((nbrs[u] & nbrs[v]) - {u, v}) for u, v, _ in c.edges)


def noisy_to_ideal_ratio(noisy: CostLandscape, ideal: CostLandscape, triangle_free: bool = False) -> NoiseRatio:
    """Optimized noisy cost over optimized ideal cost, with ``exp(-Gamma t*/2)`` at the noisy optimum."""
    ideal_val = ideal.argmin[2]
    ratio = noisy.argmin[2] / ideal_val if ideal_val != 0 else 1.0
    bound = math.exp(-noisy.noise.gamma_dephase * noisy.optimal_time / 2)
    return NoiseRatio(float(ratio), bound, triangle_free)


@dataclass(frozen=True)
class FidelityReport:
    p1_bar: float
    m: int
    m_prime: int
    F0: float
    F0_prime: float
    M_raw: float
    M: int


def fidelity_bound(p1_bar: float, m: int) -> float:
    """Probability of ideal evolution with two two-qubit gates per edge."""
    if not 0 < p1_bar <= 1:
        raise ValueError("p1_bar must lie in (0, 1]")
    if m < 1:
        raise ValueError("m must be at least 1")
    return p1_bar ** (2 * m)


def sparsified_fidelity(f0: float, m: int, m_prime: int) -> float:
    if not 0 < f0 <= 1:
        raise ValueError("F0 must lie in (0, 1]")
    if m < 1 or m_prime < 1:
        raise ValueError("edge counts must be at least 1")
    return f0 ** (m_prime / m)


def measurement_bound_raw(f0: float, p: float) -> float:
    """``ln(1 - P) / ln(1 - F0)``; one measurement when ``F0 == 1``."""
    if not 0 < p < 1:
        raise ValueError("P must lie in (0, 1)")
    if not 0 < f0 <= 1:
        raise ValueError("F0 must lie in (0, 1]")
    if f0 == 1:
        return 1.0
    return math.log(1 - p) / math.log(1 - f0)


def measurement_bound(f0: float, p: float) -> int:
    return max(1, math.ceil(measurement_bound_raw(f0, p)))


def fidelity_report(p1_bar: float, m: int, m_prime: int, p: float) -> FidelityReport:
    f0 = fidelity_bound(p1_bar, m)
    f0p = sparsified_fidelity(f0, m, m_prime)
    return FidelityReport(p1_bar, m, m_prime, f0, f0p, measurement_bound_raw(f0, p), measurement_bound(f0, p))


def landscape_summary_json(landscapes: dict[str, CostLandscape]) -> str:
    return json.dumps({k: v.summary() for k, v in landscapes.items()}, indent=2, sort_keys=True)

"""Union-of-stars compilation into signed global Ising pulses.

A pulse of duration ``t`` with sign ``s`` applied while the qubits in
``flips`` are bit-flipped adds ``s * t * (-1)**(1_S(u) + 1_S(v))`` to the
coupling of every vertex pair ``(u, v)``. All pulses are diagonal in the
computational basis, so they commute and can be reordered freely.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import Star, WeightedGraph, star_decompose


@dataclass(frozen=True)
class Pulse:
    duration: float
    sign: int
    flips: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not self.duration > 0:
            raise ValueError("pulse duration must be positive")


@dataclass(frozen=True)
class CompilationMetrics:
    n_pulses: int
    n_bitflips: int
    total_time: float

    @property
    def n_total_ops(self) -> int:
        return self.n_pulses + self.n_bitflips

    def as_row(self) -> dict:
        return {
            "n_pulses": self.n_pulses,
            "n_bitflips": self.n_bitflips,
            "n_total_ops": self.n_total_ops,
            "T": self.total_time,
        }


@dataclass(frozen=True)
class PulseSchedule:
    n: int
    pulses: tuple[Pulse, ...] = ()

    @property
    def terminal_config(self) -> frozenset[int]:
        # flips are absolute; restoring X gates are implied after the last pulse
        return frozenset()

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        if other.n != self.n:
            raise ValueError("schedules act on different qubit counts")
        return PulseSchedule(self.n, self.pulses + other.pulses)

    def __len__(self) -> int:
        return len(self.pulses)

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({"sign": p.sign, "duration": p.duration, "flips": sorted(p.flips)}) + "\n"
            for p in self.pulses
        )

    @classmethod
    def from_jsonl(cls, n: int, text: str) -> "PulseSchedule":
        pulses = []
        for line in text.splitlines():
            if line.strip():
                rec = json.loads(line)
                pulses.append(Pulse(float(rec["duration"]), int(rec["sign"]), frozenset(rec["flips"])))
        return cls(n, tuple(pulses))


def compile_star(star: Star, coeff: float, n: int | None = None) -> PulseSchedule:
    """Four pulses of ``coeff/4`` realizing weight ``coeff`` on each star edge.

    Flip frames are ``{}``, ``{center}``, ``leaves`` and ``{center} | leaves``
    with signs ``+ - - +``. For a pair with frame signs ``x`` and ``y`` the
    net coupling is ``t (1 - x)(1 - y)``, which is ``4t`` on star edges and
    zero elsewhere.
    """
    if not coeff > 0:
        raise ValueError("star coefficient must be positive")
    if n is None:
        n = max(star.leaves | {star.center}) + 1
    t = coeff / 4.0
    c = frozenset([star.center])
    return PulseSchedule(
        n,
        (
            Pulse(t, 1, frozenset()),
            Pulse(t, -1, c),
            Pulse(t, -1, star.leaves),
            Pulse(t, 1, c | star.leaves),
        ),
    )


def merge_pulses(schedule: PulseSchedule) -> PulseSchedule:
    """Fuse runs of consecutive pulses sharing a flip frame.

    Signed durations are added; a run that cancels exactly is removed.
    """
    out: list[Pulse] = []
    for p in schedule.pulses:
        if out and out[-1].flips == p.flips:
            prev = out.pop()
            net = prev.sign * prev.duration + p.sign * p.duration
            if net != 0:
                out.append(Pulse(abs(net), 1 if net > 0 else -1, p.flips))
        else:
            out.append(p)
    return PulseSchedule(schedule.n, tuple(out))


def hoist_unflipped(schedule: PulseSchedule) -> PulseSchedule:
    """Move every unflipped-frame pulse to the front.

    Valid because all pulses commute. After :func:`merge_pulses` the
    uniform all-to-all terms of every star collapse into a single pulse.
    """
    head = [p for p in schedule.pulses if not p.flips]
    tail = [p for p in schedule.pulses if p.flips]
    return PulseSchedule(schedule.n, tuple(head + tail))


def _compile_stars(n: int, stars: Iterable[tuple[Star, float]]) -> PulseSchedule:
    pulses: list[Pulse] = []
    for star, coeff in stars:
        pulses.extend(compile_star(star, coeff, n).pulses)
    return merge_pulses(hoist_unflipped(PulseSchedule(n, tuple(pulses))))


def compile_unweighted(graph: WeightedGraph, coeff: float = 1.0) -> PulseSchedule:
    """Union-of-stars over the min-endpoint star partition, every star at ``coeff``.

    Stored weights are ignored: the graph is treated as an unweighted layer.
    """
    return _compile_stars(graph.n, ((s, coeff) for s in star_decompose(graph)))


def compile_weighted_edge_by_edge(graph: WeightedGraph) -> PulseSchedule:
    return _compile_stars(graph.n, ((Star(u, frozenset([v])), w) for u, v, w in graph.edges))


def compile_decomposition(decomposition) -> PulseSchedule:
    """Compile each unweighted layer at its coefficient and concatenate in layer order."""
    n = decomposition.n
    stars = []
    for layer in decomposition.layers:
        g = WeightedGraph(n, tuple((u, v, 1.0) for u, v in layer.edges))
        stars.extend((s, layer.alpha) for s in star_decompose(g))
    return _compile_stars(n, stars)


def accumulated_coupling(schedule: PulseSchedule) -> np.ndarray:
    """Net pair coupling ``J[u, v]`` produced by the schedule (zero diagonal)."""
    n = schedule.n
    if not schedule.pulses:
        return np.zeros((n, n))
    frames = np.ones((len(schedule.pulses), n))
    for i, p in enumerate(schedule.pulses):
        frames[i, list(p.flips)] = -1.0
    amp = np.array([p.sign * p.duration for p in schedule.pulses])
    j = frames.T @ (amp[:, None] * frames)
    np.fill_diagonal(j, 0.0)
    return j


def metrics(schedule: PulseSchedule) -> CompilationMetrics:
    flips = 0
    frame: frozenset[int] = frozenset()
    for p in schedule.pulses:
        flips += len(frame ^ p.flips)
        frame = p.flips
    flips += len(frame)
    return CompilationMetrics(len(schedule.pulses), flips, float(sum(p.duration for p in schedule.pulses)))


def metrics_csv(rows: Iterable[CompilationMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["n_pulses", "n_bitflips", "n_total_ops", "T"], lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r.as_row())
    return buf.getvalue()

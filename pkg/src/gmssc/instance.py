"""GMSSC instances: domain types, validation, random generation and text I/O.

Text format (UTF-8, whitespace separated)::

    gmssc v1
    <n> <m>
    <k_e> <v_1> ... <v_s>      # one line per edge, 0-based vertex ids
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import GmsscError

HEADER = "gmssc v1"
RULES = ("uniform", "all-ones", "full-size")


@dataclass(frozen=True)
class Edge:
    """A hyperedge: sorted vertex ids plus its covering requirement ``k``."""

    vertices: tuple[int, ...]
    k: int

    def __init__(self, vertices: Iterable[int], k: int):
        object.__setattr__(self, "vertices", tuple(sorted(int(v) for v in vertices)))
        object.__setattr__(self, "k", int(k))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def mask(self) -> int:
        m = 0
        for v in self.vertices:
            m |= 1 << v
        return m


@dataclass(frozen=True)
class Instance:
    n: int
    edges: tuple[Edge, ...]

    def __init__(self, n: int, edges: Iterable[Edge]):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def ks(self) -> np.ndarray:
        return np.array([e.k for e in self.edges], dtype=np.int64)

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge membership as (ptr, idx) arrays."""
        sizes = [len(e) for e in self.edges]
        ptr = np.zeros(len(sizes) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum(sizes)
        idx = np.array([v for e in self.edges for v in e.vertices], dtype=np.int64)
        return ptr, idx

    def is_mssc(self) -> bool:
        return all(e.k == 1 for e in self.edges)

    def is_mlc(self) -> bool:
        return all(e.k == len(e) for e in self.edges)


@dataclass(frozen=True)
class GeneratorParams:
    n: int
    m: int
    s_min: int = 1
    s_max: int = 3
    rule: str = "uniform"
    seed: int = 0


def validate(instance: Instance) -> Instance:
    """Return ``instance`` unchanged if every invariant holds, else raise."""
    if instance.n < 1:
        raise GmsscError("bad-vertex", "instance needs at least one vertex")
    if instance.m < 1:
        raise GmsscError("bad-k", "instance needs at least one edge")
    for i, e in enumerate(instance.edges):
        vs = e.vertices
        if any(v < 0 or v >= instance.n for v in vs):
            raise GmsscError("bad-vertex", f"edge {i} has an id outside 0..{instance.n - 1}", edge=i)
        if len(set(vs)) != len(vs):
            raise GmsscError("bad-vertex", f"edge {i} repeats a vertex", edge=i)
        if not 1 <= e.k <= len(vs):
            raise GmsscError("bad-k", f"edge {i} has k={e.k} with |e|={len(vs)}", edge=i)
    return instance


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))


def generate(params: GeneratorParams) -> Instance:
    """Draw a random instance; the result depends only on ``params``."""
    p = params
    if p.rule not in RULES:
        raise GmsscError("infeasible-params", f"unknown requirement rule {p.rule!r}")
    if p.n < 1 or p.m < 1 or not 1 <= p.s_min <= p.s_max or p.s_max > p.n:
        raise GmsscError("infeasible-params", f"need 1 <= s_min <= s_max <= n, m >= 1; got {p}")
    rng = _rng(p.seed)
    edges = []
    for _ in range(p.m):
        size = int(rng.integers(p.s_min, p.s_max + 1))
        verts = rng.choice(p.n, size=size, replace=False)
        if p.rule == "all-ones":
            k = 1
        elif p.rule == "full-size":
            k = size
        else:
            k = int(rng.integers(1, size + 1))
        edges.append(Edge(verts.tolist(), k))
    return validate(Instance(p.n, edges))


def write_instance(instance: Instance) -> str:
    lines = [HEADER, f"{instance.n} {instance.m}"]
    for e in instance.edges:
        lines.append(" ".join(str(x) for x in (e.k, *e.vertices)))
    return "\n".join(lines) + "\n"


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GmsscError("parse-error", f"line {lineno}: expected integers", line=lineno) from None


def read_instance(text: str) -> Instance:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].split() != HEADER.split():
        raise GmsscError("parse-error", f"line 1: expected header {HEADER!r}", line=1)
    if len(lines) < 2:
        raise GmsscError("parse-error", "line 2: missing '<n> <m>'", line=2)
    head = _ints(lines[1].split(), 2)
    if len(head) != 2:
        raise GmsscError("parse-error", "line 2: expected '<n> <m>'", line=2)
    n, m = head
    if len(lines) - 2 != m:
        raise GmsscError(
            "parse-error", f"line {len(lines)}: expected {m} edge lines, found {len(lines) - 2}",
            line=len(lines),
        )
    edges = []
    for lineno, line in enumerate(lines[2:], start=3):
        vals = _ints(line.split(), lineno)
        if not vals:
            raise GmsscError("parse-error", f"line {lineno}: empty edge record", line=lineno)
        edges.append(Edge(vals[1:], vals[0]))
    return validate(Instance(n, edges))


def load(path: str | Path) -> Instance:
    return read_instance(Path(path).read_text(encoding="utf-8"))


def save(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(write_instance(instance), encoding="utf-8")

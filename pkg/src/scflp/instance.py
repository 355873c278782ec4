"""Problem data model, random instance generators, and the on-disk format.

The native file format is UTF-8 text::

    scflp 1
    m n p r
    w_1 ... w_m
    v_11 ... v_1n
    ...
    v_m1 ... v_mn

Anything from ``#`` to the end of a line is a comment; blank lines are
skipped.  Numbers are plain decimals with an optional exponent (the parse is
locale independent, decimal point only).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

FORMAT_HEADER = "scflp 1"


class InstanceError(ValueError):
    """Malformed instance file or invalid instance data."""


@dataclass(frozen=True)
class Instance:
    """SCFLP instance: m customers, n candidate sites, demand weights w,
    attractiveness matrix v, leader cardinality p, follower cardinality r."""

    m: int
    n: int
    w: np.ndarray  # (m,) positive
    v: np.ndarray  # (m, n) positive
    p: int
    r: int

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if self.m < 1 or self.n < 1:
            raise InstanceError("m and n must be at least 1")
        if w.shape != (self.m,):
            raise InstanceError(f"w has shape {w.shape}, expected ({self.m},)")
        if v.shape != (self.m, self.n):
            raise InstanceError(f"v has shape {v.shape}, expected ({self.m}, {self.n})")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise InstanceError("non-positive demand weight")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            raise InstanceError("non-positive attractiveness")
        if not 1 <= self.p <= self.n:
            raise InstanceError(f"p={self.p} out of range [1, {self.n}]")
        if not 1 <= self.r <= self.n:
            raise InstanceError(f"r={self.r} out of range [1, {self.n}]")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", v)

    @property
    def total_demand(self) -> float:
        return float(self.w.sum())

    def digest(self) -> str:
        """Short content hash used to identify instances in reports."""
        return hashlib.sha256(save_instance(self).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class GeneratorParams:
    """Parameters for the two random-instance recipes.

    ``biesinger``: customer and site locations coincide, drawn uniformly at
    random on the [0,100]x[0,100] plane; v = 1/(d+1).
    ``qi``: customers and sites drawn independently with integer coordinates
    on [0,70]x[0,70]; v = exp(-0.1 d).
    Both draw demands uniformly from {1,...,10}.
    """

    style: str
    m: int
    n: int
    p: int
    r: int
    seed: int = 0

    def __post_init__(self):
        if self.style not in ("biesinger", "qi"):
            raise InstanceError(f"unknown generator style {self.style!r}")


def _tokenize(text: str):
    """Yield (line_number, tokens) for non-empty lines, comments stripped."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_float(tok: str, lineno: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InstanceError(f"line {lineno}: bad {what} {tok!r}") from None


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceError(f"line {lineno}: bad {what} {tok!r}") from None


def load_instance(text) -> Instance:
    """Parse an instance from a string or a readable text stream."""
    if hasattr(text, "read"):
        text = text.read()
    lines = _tokenize(text)

    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise InstanceError("empty instance file") from None
    if toks != FORMAT_HEADER.split():
        raise InstanceError(f"line {lineno}: malformed header {' '.join(toks)!r}, expected {FORMAT_HEADER!r}")

    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise InstanceError("missing size line 'm n p r'") from None
    if len(toks) != 4:
        raise InstanceError(f"line {lineno}: size line needs 4 integers 'm n p r', got {len(toks)}")
    m, n, p, r = (_parse_int(t, lineno, "size field") for t in toks)
    if m < 1 or n < 1:
        raise InstanceError(f"line {lineno}: m and n must be at least 1")
    if not 1 <= p <= n:
        raise InstanceError(f"line {lineno}: p={p} out of range [1, {n}]")
    if not 1 <= r <= n:
        raise InstanceError(f"line {lineno}: r={r} out of range [1, {n}]")

    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise InstanceError("missing weight line") from None
    if len(toks) != m:
        raise InstanceError(f"line {lineno}: expected {m} weights, got {len(toks)}")
    w = np.array([_parse_float(t, lineno, "weight") for t in toks])
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise InstanceError(f"line {lineno}: non-positive weight")

    v = np.empty((m, n))
    for i in range(m):
        try:
            lineno, toks = next(lines)
        except StopIteration:
            raise InstanceError(f"missing attractiveness row {i + 1} of {m}") from None
        if len(toks) != n:
            raise InstanceError(f"line {lineno}: expected {n} attractiveness values, got {len(toks)}")
        row = np.array([_parse_float(t, lineno, "attractiveness") for t in toks])
        if np.any(row <= 0.0) or not np.all(np.isfinite(row)):
            raise InstanceError(f"line {lineno}: non-positive attractiveness")
        v[i] = row

    for lineno, toks in lines:
        raise InstanceError(f"line {lineno}: unexpected trailing data")

    return Instance(m=m, n=n, w=w, v=v, p=p, r=r)


def save_instance(inst: Instance) -> str:
    """Render an instance in the native format, 12 significant digits."""
    out = [FORMAT_HEADER, f"{inst.m} {inst.n} {inst.p} {inst.r}"]
    out.append(" ".join(f"{x:.12g}" for x in inst.w))
    for i in range(inst.m):
        out.append(" ".join(f"{x:.12g}" for x in inst.v[i]))
    return "\n".join(out) + "\n"


def generate_instance(params: GeneratorParams) -> Instance:
    """Generate a random instance; deterministic for a fixed seed."""
    rng = np.random.default_rng(params.seed)
    m, n = params.m, params.n
    if params.style == "biesinger":
        # Shared location pool: customers take the first m points, sites the
        # first n, so they coincide whenever m == n.
        pts = rng.uniform(0.0, 100.0, size=(max(m, n), 2))
        cust, site = pts[:m], pts[:n]
        d = np.hypot(cust[:, 0:1] - site[None, :, 0], cust[:, 1:2] - site[None, :, 1])
        v = 1.0 / (d + 1.0)
    else:
        cust = rng.integers(0, 71, size=(m, 2)).astype(float)
        site = rng.integers(0, 71, size=(n, 2)).astype(float)
        d = np.hypot(cust[:, 0:1] - site[None, :, 0], cust[:, 1:2] - site[None, :, 1])
        v = np.exp(-0.1 * d)
    w = rng.integers(1, 11, size=m).astype(float)
    return Instance(m=m, n=n, w=w, v=v, p=params.p, r=params.r)

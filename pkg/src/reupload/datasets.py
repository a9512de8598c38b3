"""Generators and ground-truth labelers for the nine benchmark problems.

All points live in ``[-1, 1]^d``.  Geometry (``r`` is the Euclidean norm):

* circle:        class 0 iff ``r <= sqrt(2/pi)`` (half the square)
* sphere:        class 0 iff ``r <= (3/pi)^(1/3)`` (half the cube)
* hypersphere:   class 0 iff ``r <= 2/sqrt(pi)``; this ball has half the
  hypercube's volume but pokes out of it, so class 0 holds less than half
* crown:         class 0 iff ``R_IN <= r <= R_OUT``, an annulus with half
  the area, with ``R_OUT^2 = 0.8`` and ``R_IN^2 = 0.8 - 2/pi``
* tricrown:      the same two circles; inner disk 0, annulus 1, outside 2
* non-convex:    class 0 iff ``x2 <= -x1 + 0.5 sin(pi x1) + 0.3 sin(3 pi x1)``
* three-circles: disks of radius ``sqrt(2/pi)/2`` at (-.5,-.5), (.5,.5),
  (-.5,.5) are classes 0-2; everything else is class 3
* squares:       ``2 [x2 > 0] + [x1 > 0]``
* wavy-lines:    curves ``sin(pi x1) +- x1``; below both 0, above both 3,
  between them 1 where ``x1 > 0`` and 2 where ``x1 < 0``

Points exactly on a boundary go to the lower class index.  Coordinates come
from the counter-based generator in :mod:`reupload.rng` keyed by
``(problem name, seed)``, with counter ``i * dim + j`` for coordinate ``j``
of sample ``i``, so datasets are reproducible bit for bit anywhere.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import rng
from .errors import InvalidArgumentError

R_CIRCLE = math.sqrt(2 / math.pi)
R_SPHERE = (3 / math.pi) ** (1 / 3)
R_HYPERSPHERE = 2 / math.sqrt(math.pi)
R_OUT = math.sqrt(0.8)
R_IN = math.sqrt(0.8 - 2 / math.pi)
THREE_CIRCLES = ((-0.5, -0.5), (0.5, 0.5), (-0.5, 0.5))
R_SMALL = R_CIRCLE / 2

# offset between the train and test seeds of one experiment
TEST_SEED_OFFSET = 1_000_003


@dataclass(frozen=True)
class Problem:
    name: str
    dim: int
    classes: int
    ansatz: str  # ansatz used for this problem in the benchmark table


PROBLEMS = {
    p.name: p
    for p in [
        Problem("circle", 2, 2, "A"),
        Problem("non-convex", 2, 2, "B"),
        Problem("crown", 2, 2, "B"),
        Problem("sphere", 3, 2, "A"),
        Problem("hypersphere", 4, 2, "A"),
        Problem("tricrown", 2, 3, "A"),
        Problem("three-circles", 2, 4, "B"),
        Problem("squares", 2, 4, "A"),
        Problem("wavy-lines", 2, 4, "A"),
    ]
}


def get_problem(problem) -> Problem:
    if isinstance(problem, Problem):
        return problem
    try:
        return PROBLEMS[str(problem)]
    except KeyError:
        raise InvalidArgumentError(f"unknown problem {problem!r}; choose from {sorted(PROBLEMS)}") from None


def _non_convex_edge(x1):
    return -x1 + 0.5 * np.sin(np.pi * x1) + 0.3 * np.sin(3 * np.pi * x1)


def label_points(problem, X) -> np.ndarray:
    """Vectorised ground-truth classes for the rows of ``X``."""
    p = get_problem(problem)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != p.dim:
        raise InvalidArgumentError(f"{p.name} points have {p.dim} coordinates, got {X.shape[1]}")
    if not np.all(np.isfinite(X)) or np.any(np.abs(X) > 1.0):
        raise InvalidArgumentError("coordinates must lie in [-1, 1]")
    r2 = np.sum(X * X, axis=1)
    x1 = X[:, 0]
    x2 = X[:, 1] if p.dim > 1 else None
    name = p.name
    if name == "circle":
        c = r2 > R_CIRCLE ** 2
    elif name == "sphere":
        c = r2 > R_SPHERE ** 2
    elif name == "hypersphere":
        c = r2 > R_HYPERSPHERE ** 2
    elif name == "crown":
        c = (r2 < R_IN ** 2) | (r2 > R_OUT ** 2)
    elif name == "tricrown":
        c = (r2 > R_IN ** 2).astype(int) + (r2 > R_OUT ** 2)
    elif name == "non-convex":
        c = x2 > _non_convex_edge(x1)
    elif name == "three-circles":
        c = np.full(len(X), 3)
        for i, (a, b) in reversed(list(enumerate(THREE_CIRCLES))):
            inside = (x1 - a) ** 2 + (x2 - b) ** 2 <= R_SMALL ** 2
            c[inside] = i
    elif name == "squares":
        c = 2 * (x2 > 0) + (x1 > 0)
    elif name == "wavy-lines":
        s = np.sin(np.pi * x1)
        lo = np.minimum(s + x1, s - x1)
        hi = np.maximum(s + x1, s - x1)
        c = np.where(x2 <= lo, 0, np.where(x2 > hi, 3, np.where(x1 > 0, 1, 2)))
    else:  # pragma: no cover - registry and branches are kept in sync
        raise InvalidArgumentError(name)
    return np.asarray(c, dtype=np.int64)


def label_point(problem, x) -> int:
    return int(label_points(problem, np.asarray(x, dtype=float)[None, :])[0])


@dataclass(frozen=True, eq=False)
class Sample:
    x: np.ndarray
    c: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labelled points ``X`` (``(n, dim)``) with classes ``y``."""

    problem: Problem
    X: np.ndarray
    y: np.ndarray
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.y)

    @property
    def samples(self) -> list[Sample]:
        return [Sample(x, int(c)) for x, c in zip(self.X, self.y)]

    def subset(self, idx) -> Dataset:
        return Dataset(self.problem, self.X[idx], self.y[idx], self.seed)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join([f"x{j + 1}" for j in range(self.problem.dim)] + ["class"]) + "\n")
        for x, c in zip(self.X, self.y):
            buf.write(",".join(f"{v:.17g}" for v in x) + f",{int(c)}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, problem) -> Dataset:
        p = get_problem(problem)
        rows = list(csv.reader(io.StringIO(text)))
        want = [f"x{j + 1}" for j in range(p.dim)] + ["class"]
        if not rows or [h.strip() for h in rows[0]] != want:
            raise InvalidArgumentError(f"expected header {','.join(want)}")
        X, y = [], []
        for lineno, row in enumerate(rows[1:], 2):
            if not row:
                continue
            if len(row) != p.dim + 1:
                raise InvalidArgumentError(f"line {lineno}: expected {p.dim + 1} fields")
            try:
                x = [float(v) for v in row[:-1]]
                c = int(row[-1])
            except ValueError:
                raise InvalidArgumentError(f"line {lineno}: malformed number") from None
            if not all(math.isfinite(v) and -1.0 <= v <= 1.0 for v in x):
                raise InvalidArgumentError(f"line {lineno}: coordinate outside [-1, 1]")
            if not 0 <= c < p.classes:
                raise InvalidArgumentError(f"line {lineno}: class {c} out of range")
            X.append(x)
            y.append(c)
        return cls(p, np.array(X, dtype=float).reshape(-1, p.dim), np.array(y, dtype=np.int64))


def sample_dataset(problem, n: int, seed: int) -> Dataset:
    """``n`` uniform points in ``[-1, 1]^dim`` with their true classes."""
    p = get_problem(problem)
    if n <= 0:
        raise InvalidArgumentError("n must be positive")
    key = rng.stream_key(p.name, seed)
    u = rng.uniform(key, np.arange(n * p.dim, dtype=np.uint64)).reshape(n, p.dim)
    X = 2.0 * u - 1.0
    return Dataset(p, X, label_points(p, X), seed)


def train_test(problem, n_train: int = 200, n_test: int = 1000, seed: int = 0) -> tuple[Dataset, Dataset]:
    return sample_dataset(problem, n_train, seed), sample_dataset(problem, n_test, seed + TEST_SEED_OFFSET)


def _quarter_disk(t: float) -> float:
    """Area of ``{x in [0,1]^2 : |x|^2 <= t}``."""
    if t <= 0:
        return 0.0
    if t <= 1:
        return math.pi * t / 4
    if t >= 2:
        return 1.0
    return math.sqrt(t - 1) + 0.5 * t * (math.pi / 2 - 2 * math.acos(1 / math.sqrt(t)))


def _quarter_disk_density(t: float) -> float:
    """Derivative of ``_quarter_disk`` in ``t``."""
    if t <= 0 or t >= 2:
        return 0.0
    if t < 1:
        return math.pi / 4
    return math.pi / 4 - math.acos(1 / math.sqrt(t))


def _hypersphere_inner() -> float:
    # split x = (a, b) with a, b in [0,1]^2; P(|a|^2 + |b|^2 <= R^2) as a
    # one-dimensional integral over s = |a|^2
    t = R_HYPERSPHERE ** 2
    val, _ = integrate.quad(
        lambda s: _quarter_disk_density(s) * _quarter_disk(t - s), 0.0, 2.0, points=[1.0, t - 1.0], epsabs=1e-12
    )
    return val


def _wavy_balance() -> np.ndarray:
    def lengths(x1):
        s = math.sin(math.pi * x1)
        lo, hi = min(s + x1, s - x1), max(s + x1, s - x1)
        below = min(max(lo + 1, 0.0), 2.0)
        above = min(max(1 - hi, 0.0), 2.0)
        return below, above, 2.0 - below - above

    below = integrate.quad(lambda x: lengths(x)[0], -1, 1, points=[0.0], limit=200)[0]
    above = integrate.quad(lambda x: lengths(x)[1], -1, 1, points=[0.0], limit=200)[0]
    mid_pos = integrate.quad(lambda x: lengths(x)[2], 0, 1, limit=200)[0]
    mid_neg = integrate.quad(lambda x: lengths(x)[2], -1, 0, limit=200)[0]
    return np.array([below, mid_pos, mid_neg, above]) / 4.0


def class_balance(problem) -> np.ndarray:
    """Fraction of ``[-1, 1]^dim`` occupied by each class."""
    p = get_problem(problem)
    name = p.name
    if name in ("circle", "sphere", "non-convex"):
        return np.array([0.5, 0.5])
    if name == "hypersphere":
        inner = _hypersphere_inner()
        return np.array([inner, 1 - inner])
    if name == "crown":
        return np.array([0.5, 0.5])
    if name == "tricrown":
        inner = math.pi * R_IN ** 2 / 4
        return np.array([inner, 0.5, 0.5 - inner])
    if name == "three-circles":
        each = math.pi * R_SMALL ** 2 / 4
        return np.array([each, each, each, 1 - 3 * each])
    if name == "squares":
        return np.full(4, 0.25)
    if name == "wavy-lines":
        return _wavy_balance()
    raise InvalidArgumentError(name)  # pragma: no cover

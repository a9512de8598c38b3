"""Minimisers used for simulated training.

``sep_cmaes`` is a separable (diagonal covariance) CMA evolution strategy;
``lbfgsb`` is a projected limited-memory BFGS for box constraints.  Both
minimise ``f: R^n -> R`` and count every call to ``f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    evaluations: int
    history: list = field(default_factory=list)  # (evaluation index, best-so-far value)
    message: str = ""


class _Counter:
    """Wraps ``f`` to count calls and record best-so-far improvements."""

    def __init__(self, f, budget, offset=0, history=None):
        self.f = f
        self.budget = budget
        self.n = 0
        self.offset = offset
        self.best = math.inf
        self.best_x = None
        self.history = history if history is not None else []

    def __call__(self, x):
        v = float(self.f(x))
        self.n += 1
        if v < self.best:
            self.best = v
            self.best_x = np.array(x, dtype=float)
            self.history.append((self.offset + self.n, v))
        return v

    @property
    def exhausted(self):
        return self.n >= self.budget


def sep_cmaes(f: Callable, x0, sigma0: float, *, popsize: int = 12, max_evaluations: int = 10_000,
              tol: float = 1e-6, rng: np.random.Generator | None = None, bounds=None,
              history=None, offset: int = 0) -> OptimResult:
    """Minimise ``f`` from mean ``x0`` and step size ``sigma0``.

    Stops when the budget is spent, when the best value over the last
    ``10 + 30 n / popsize`` generations varies by less than ``tol``, or when
    the step size collapses.  ``bounds = (lo, hi)`` clips candidates.
    """
    rng = rng or np.random.default_rng()
    m = np.array(x0, dtype=float)
    n = m.size
    lam = max(int(popsize), 2)
    mu = lam // 2
    w = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    w /= w.sum()
    mueff = 1.0 / np.sum(w ** 2)
    cs = (mueff + 2) / (n + mueff + 5)
    ds = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + cs
    cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
    c1 = 2 / ((n + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
    # the diagonal model learns faster than a full covariance
    scale = (n + 2) / 3
    c1, cmu = min(1.0, c1 * scale), min(1 - min(1.0, c1 * scale), cmu * scale)
    chin = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))
    sigma = float(sigma0)
    diag = np.ones(n)
    ps = np.zeros(n)
    pc = np.zeros(n)
    counter = _Counter(f, max_evaluations, offset, history)
    window = 10 + int(math.ceil(30 * n / lam))
    recent: list[float] = []
    gen = 0
    message = "budget"
    lo, hi = (None, None) if bounds is None else (np.asarray(bounds[0], float), np.asarray(bounds[1], float))
    while counter.n + lam <= max_evaluations:
        gen += 1
        z = rng.standard_normal((lam, n))
        xs = m + sigma * diag * z
        if lo is not None:
            xs = np.clip(xs, lo, hi)
        vals = np.array([counter(x) for x in xs])
        if not np.all(np.isfinite(vals)):
            message = "non-finite"
            break
        order = np.argsort(vals, kind="stable")
        sel = xs[order[:mu]]
        m_old = m
        m = w @ sel
        yw = (m - m_old) / sigma
        ps = (1 - cs) * ps + math.sqrt(cs * (2 - cs) * mueff) * yw / diag
        hsig = np.linalg.norm(ps) / math.sqrt(1 - (1 - cs) ** (2 * gen)) < (1.4 + 2 / (n + 1)) * chin
        pc = (1 - cc) * pc + hsig * math.sqrt(cc * (2 - cc) * mueff) * yw
        ys = (sel - m_old) / sigma
        C = diag ** 2
        C = ((1 - c1 - cmu) * C + c1 * (pc ** 2 + (1 - hsig) * cc * (2 - cc) * C) + cmu * (w @ (ys ** 2)))
        diag = np.sqrt(np.maximum(C, 1e-300))
        sigma *= math.exp((cs / ds) * (np.linalg.norm(ps) / chin - 1))
        recent.append(vals[order[0]])
        if len(recent) > window:
            recent.pop(0)
            if max(recent) - min(recent) < tol:
                message = "converged"
                break
        if sigma * diag.max() < 1e-12:
            message = "step collapsed"
            break
    return OptimResult(counter.best_x, counter.best, counter.n, counter.history, message)


def _project(x, lo, hi):
    return np.minimum(np.maximum(x, lo), hi)


def lbfgsb(f: Callable, grad: Callable, x0, lo, hi, *, memory: int = 10, max_evaluations: int = 10_000,
           tol: float = 1e-6, grad_cost: int = 0, history=None, offset: int = 0) -> OptimResult:
    """Projected L-BFGS with an Armijo backtracking search along the projected path.

    ``grad_cost`` is the number of function evaluations one gradient costs
    (``2 n`` for central differences); it is charged to the budget.  Stops
    when the projected gradient vanishes, when an accepted step decreases
    ``f`` by less than ``tol``, or when the budget is spent.
    """
    lo = np.broadcast_to(np.asarray(lo, float), np.shape(x0)).copy()
    hi = np.broadcast_to(np.asarray(hi, float), np.shape(x0)).copy()
    counter = _Counter(f, max_evaluations, offset, history)
    x = _project(np.array(x0, dtype=float), lo, hi)
    fx = counter(x)
    g = grad(x)
    counter.n += grad_cost
    S: list[np.ndarray] = []
    Y: list[np.ndarray] = []
    message = "budget"
    while counter.n < max_evaluations:
        if not (math.isfinite(fx) and np.all(np.isfinite(g))):
            message = "non-finite"
            break
        # variables pinned at a bound by the gradient stay fixed this step
        free = ~(((x <= lo) & (g > 0)) | ((x >= hi) & (g < 0)))
        pg = np.where(free, g, 0.0)
        if np.max(np.abs(pg), initial=0.0) < 1e-10:
            message = "projected gradient vanished"
            break
        q = pg.copy()
        alphas = []
        for s, y in zip(reversed(S), reversed(Y)):
            a = (s @ q) / (y @ s)
            alphas.append(a)
            q -= a * y
        if S:
            q *= (S[-1] @ Y[-1]) / (Y[-1] @ Y[-1])
        else:
            q /= max(np.linalg.norm(q), 1.0)
        for (s, y), a in zip(zip(S, Y), reversed(alphas)):
            b = (y @ q) / (y @ s)
            q += (a - b) * s
        d = np.where(free, -q, 0.0)
        if d @ pg >= 0:  # not a descent direction; fall back to steepest descent
            d = -pg
            S.clear()
            Y.clear()
        step = 1.0
        accepted = False
        while counter.n < max_evaluations:
            x_new = _project(x + step * d, lo, hi)
            f_new = counter(x_new)
            if f_new <= fx + 1e-4 * (g @ (x_new - x)):
                accepted = True
                break
            step *= 0.5
            if step < 1e-12:
                break
        if not accepted:
            message = "line search failed"
            break
        g_new = grad(x_new)
        counter.n += grad_cost
        s, y = x_new - x, g_new - g
        if s @ y > 1e-12 * (y @ y):
            S.append(s)
            Y.append(y)
            if len(S) > memory:
                S.pop(0)
                Y.pop(0)
        decrease = fx - f_new
        x, fx, g = x_new, f_new, g_new
        if decrease < tol:
            message = "converged"
            break
    best_x = counter.best_x if counter.best_x is not None else x
    return OptimResult(best_x, counter.best, counter.n, counter.history, message)

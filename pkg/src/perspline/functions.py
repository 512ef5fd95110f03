"""Smooth 1-periodic test functions with analytic derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import numpy.typing as npt

from .bspline import PeriodicSpline, spline_derivative, spline_eval
from .errors import SplineError

FloatArray = npt.NDArray[np.float64]
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TestFunction:
    """A 1-periodic function ``u`` and its derivatives ``derivative(l, x)``."""

    __test__ = False  # not a pytest class

    label: str
    derivative: Callable[[int, FloatArray], FloatArray]
    max_order: int = 64

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        return self.derivative(0, np.asarray(x, dtype=float))

    def d(self, l: int, x: npt.ArrayLike) -> FloatArray:
        if not 0 <= l <= self.max_order:
            raise SplineError(f"{self.label}: derivative order {l} not available")
        return self.derivative(l, np.asarray(x, dtype=float))


def trig(kind: str, k: int) -> TestFunction:
    """``sin(2 pi k x)`` or ``cos(2 pi k x)``."""
    if kind not in ("sin", "cos"):
        raise SplineError(f"unknown trig kind {kind!r}")
    a = TWO_PI * k
    phase = 0.0 if kind == "sin" else 0.5 * math.pi

    def deriv(l: int, x: FloatArray) -> FloatArray:
        return a ** l * np.sin(a * x + phase + 0.5 * math.pi * l)

    return TestFunction(f"{kind}{k}", deriv)


def exp_sin() -> TestFunction:
    """``exp(sin 2 pi x)``; derivatives from ``f' = s' f`` by Leibniz' rule."""

    def deriv(l: int, x: FloatArray) -> FloatArray:
        s_derivs = [TWO_PI ** m * np.sin(TWO_PI * x + 0.5 * math.pi * m) for m in range(l + 1)]
        f = [np.exp(s_derivs[0])]
        for n in range(1, l + 1):
            f.append(sum(math.comb(n - 1, k) * s_derivs[k + 1] * f[n - 1 - k] for k in range(n)))
        return f[l]

    return TestFunction("exp_sin", deriv)


def random_trig(seed: int, degree: int = 4) -> TestFunction:
    """Trigonometric polynomial with seeded normal coefficients damped by ``1/k^2``."""
    rng = np.random.default_rng(seed)
    ks = np.arange(1, degree + 1)
    a = rng.standard_normal(degree) / ks ** 2
    b = rng.standard_normal(degree) / ks ** 2
    c0 = float(rng.standard_normal())

    def deriv(l: int, x: FloatArray) -> FloatArray:
        w = TWO_PI * ks
        arg = x[..., None] * w + 0.5 * math.pi * l
        out = np.sum(w ** l * (a * np.cos(arg) + b * np.sin(arg)), axis=-1)
        return out + c0 if l == 0 else out

    return TestFunction(f"randtrig{seed}", deriv)


def constant(value: float) -> TestFunction:
    def deriv(l: int, x: FloatArray) -> FloatArray:
        return np.full(np.shape(x), value if l == 0 else 0.0)

    return TestFunction(f"const{value:g}", deriv)


def from_spline(s: PeriodicSpline, label: str = "spline") -> TestFunction:
    """Wrap a spline as a test function (derivatives up to ``r - 1``)."""
    chain = [s]
    for _ in range(s.space.r - 1):
        chain.append(spline_derivative(chain[-1]))

    def deriv(l: int, x: FloatArray) -> FloatArray:
        return np.asarray(spline_eval(chain[l], x))

    return TestFunction(label, deriv, max_order=s.space.r - 1)


CORPUS_IDS = ("sin1", "cos1", "sin2", "cos2", "sin5", "cos5", "exp_sin", "randtrig")


def corpus_function(name: str, seed: int = 0) -> TestFunction:
    """Look up a corpus entry by id; ``randtrig`` uses ``seed``."""
    if name == "exp_sin":
        return exp_sin()
    if name == "randtrig":
        return random_trig(seed)
    for kind in ("sin", "cos"):
        if name.startswith(kind) and name[len(kind):].isdigit():
            return trig(kind, int(name[len(kind):]))
    raise SplineError(f"unknown corpus function {name!r}; known: {', '.join(CORPUS_IDS)}")


def default_corpus(seed: int = 0) -> list[TestFunction]:
    return [corpus_function(name, seed) for name in CORPUS_IDS]

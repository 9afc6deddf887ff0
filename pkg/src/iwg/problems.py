"""Built-in benchmark problems with manufactured piecewise solutions.

Each problem solves -div(beta grad u) = f on the unit square with Dirichlet
data g = u on the boundary, where u and beta jump across a level-set
interface but satisfy [u] = 0 and [beta du/dn] = 0 on it. The sources f are
derived by hand and double-checked at construction by a finite-difference
divergence oracle (validate()).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import LevelSet


class ProblemValidationError(RuntimeError):
    pass


def constant(value: float) -> Callable:
    def func(x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, value)

    return func


@dataclass
class Problem:
    """A benchmark instance: interface, coefficients, exact solution, source."""

    name: str
    levelset: LevelSet
    beta_plus: Callable
    beta_minus: Callable
    u_plus: Callable
    u_minus: Callable
    grad_u_plus: Callable   # (x, y) -> (n, 2)
    grad_u_minus: Callable
    f_plus: Callable
    f_minus: Callable
    interface_points: Callable  # m -> (m, 2) points on the interface

    def _select(self, fp: Callable, fm: Callable):
        ls = self.levelset

        def func(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return np.where(ls(x, y) > 0.0, fp(x, y), fm(x, y))

        return func

    @property
    def u(self) -> Callable:
        """Exact solution, side selected by the level-set sign pointwise."""
        return self._select(self.u_plus, self.u_minus)

    @property
    def f(self) -> Callable:
        return self._select(self.f_plus, self.f_minus)

    @property
    def beta(self) -> Callable:
        return self._select(self.beta_plus, self.beta_minus)

    @property
    def g(self) -> Callable:
        """Dirichlet boundary data: the trace of u."""
        return self.u

    def grad_u(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        sel = (self.levelset(x, y) > 0.0)[..., None]
        return np.where(sel, self.grad_u_plus(x, y), self.grad_u_minus(x, y))

    # fail-fast self checks -------------------------------------------------

    def validate(self, n: int = 200) -> None:
        """Verify [u] = 0, [beta du/dn] = 0 on the interface and f on both sides.

        The flux normal comes from a central-difference gradient of the
        level set; f is checked against a flux-form finite-difference
        divergence of the exact side functions (step 1e-5, tolerance 1e-4).
        """
        pts = np.asarray(self.interface_points(n), dtype=float)
        x, y = pts[:, 0], pts[:, 1]

        jump = np.abs(self.u_plus(x, y) - self.u_minus(x, y))
        if jump.max() > 1e-10:
            raise ProblemValidationError(
                f"{self.name}: solution jump {jump.max():.2e} on the interface"
            )

        eps = 1e-6
        ls = self.levelset
        nx = (ls(x + eps, y) - ls(x - eps, y)) / (2 * eps)
        ny = (ls(x, y + eps) - ls(x, y - eps)) / (2 * eps)
        scale = np.hypot(nx, ny)
        nx, ny = nx / scale, ny / scale
        flux_p = self.beta_plus(x, y) * (
            self.grad_u_plus(x, y)[:, 0] * nx + self.grad_u_plus(x, y)[:, 1] * ny
        )
        flux_m = self.beta_minus(x, y) * (
            self.grad_u_minus(x, y)[:, 0] * nx + self.grad_u_minus(x, y)[:, 1] * ny
        )
        if np.abs(flux_p - flux_m).max() > 1e-10:
            raise ProblemValidationError(
                f"{self.name}: flux jump {np.abs(flux_p - flux_m).max():.2e}"
            )

        rng = np.random.default_rng(12345)
        for side, u_s, beta_s, f_s in (
            (1, self.u_plus, self.beta_plus, self.f_plus),
            (-1, self.u_minus, self.beta_minus, self.f_minus),
        ):
            sx, sy = self._interior_samples(rng, side, n)
            fd = _fd_divergence(u_s, beta_s, sx, sy, step=1e-5)
            err = np.abs(f_s(sx, sy) + fd)
            if err.max() > 1e-4:
                raise ProblemValidationError(
                    f"{self.name}: f mismatch {err.max():.2e} on side {side:+d}"
                )

    def _interior_samples(self, rng, side: int, n: int):
        """Points strictly on one side, away from the interface and boundary."""
        xs: list[float] = []
        ys: list[float] = []
        while len(xs) < n:
            cand = rng.uniform(0.02, 0.98, size=(4 * n, 2))
            lv = self.levelset(cand[:, 0], cand[:, 1])
            keep = (lv > 1e-3) if side > 0 else (lv < -1e-3)
            for cx, cy in cand[keep]:
                xs.append(float(cx))
                ys.append(float(cy))
                if len(xs) >= n:
                    break
        return np.array(xs), np.array(ys)


def _fd_divergence(u: Callable, beta: Callable, x, y, step: float) -> np.ndarray:
    """Flux-form div(beta grad u) by central differences, O(step^2)."""
    h = step

    def flux_diff(dx, dy):
        bp = beta(x + 0.5 * h * dx, y + 0.5 * h * dy)
        bm = beta(x - 0.5 * h * dx, y - 0.5 * h * dy)
        return (
            bp * (u(x + h * dx, y + h * dy) - u(x, y))
            - bm * (u(x, y) - u(x - h * dx, y - h * dy))
        ) / h**2

    return flux_diff(1.0, 0.0) + flux_diff(0.0, 1.0)


# the three built-in benchmarks ----------------------------------------------


def problem_circle(beta_plus: float = 1.0, beta_minus: float = 10.0) -> Problem:
    """Circular interface of radius 0.4 centered at (0.5, 0.5).

    u = (r^2 - 0.16)^3 / beta on each side; the plus side is outside the
    circle. f is independent of beta because beta grad u = grad((r^2-0.16)^3).
    """
    if beta_plus <= 0.0 or beta_minus <= 0.0:
        raise ValueError("beta must be positive")
    r2_0 = 0.16

    def lf(x, y):
        return (x - 0.5) ** 2 + (y - 0.5) ** 2 - r2_0

    def u_side(beta):
        def u(x, y):
            return lf(x, y) ** 3 / beta

        return u

    def grad_side(beta):
        def grad(x, y):
            w = lf(x, y)
            return np.stack(
                [6.0 * w**2 * (x - 0.5) / beta, 6.0 * w**2 * (y - 0.5) / beta],
                axis=-1,
            )

        return grad

    def f(x, y):
        w = lf(x, y)
        r2 = w + r2_0
        return -(12.0 * w**2 + 24.0 * r2 * w)

    def interface_points(m):
        theta = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
        return np.column_stack(
            [0.5 + 0.4 * np.cos(theta), 0.5 + 0.4 * np.sin(theta)]
        )

    return Problem(
        name=f"circle(beta+={beta_plus:g}, beta-={beta_minus:g})",
        levelset=LevelSet(lf, "circle"),
        beta_plus=constant(beta_plus),
        beta_minus=constant(beta_minus),
        u_plus=u_side(beta_plus),
        u_minus=u_side(beta_minus),
        grad_u_plus=grad_side(beta_plus),
        grad_u_minus=grad_side(beta_minus),
        f_plus=f,
        f_minus=f,
        interface_points=interface_points,
    )


def problem_sharp_edge() -> Problem:
    """Interface with a sharp corner: two straight-ish branches meeting at a
    10 degree half-angle wedge. beta = 1000 on the plus side, 1 on the minus
    side; u = L / beta so beta grad u = grad L is globally continuous.
    """
    t2 = math.tan(math.radians(10.0)) ** 2

    def lf(x, y):
        return -((2 * y - 1) ** 2) + t2 * (2 * x - 2) ** 2 * (2 * x - 1)

    def grad_l(x, y):
        return np.stack(
            [t2 * (2 * x - 2) * (12 * x - 8), -4.0 * (2 * y - 1)], axis=-1
        )

    def u_side(beta):
        def u(x, y):
            return lf(x, y) / beta

        return u

    def grad_side(beta):
        def grad(x, y):
            return grad_l(x, y) / beta

        return grad

    def f(x, y):
        # -laplacian(L); the d2/dx2 part is t2 * (48 x - 40)
        x = np.asarray(x, dtype=float)
        return 8.0 - t2 * (48.0 * x - 40.0) + 0.0 * np.asarray(y)

    def interface_points(m):
        # branches y = 0.5 +- 0.5 tan(10deg) |2x-2| sqrt(2x-1), x in (0.5, 1)
        xs = np.linspace(0.52, 0.98, (m + 1) // 2)
        dev = 0.5 * math.sqrt(t2) * np.abs(2 * xs - 2) * np.sqrt(2 * xs - 1)
        pts = np.concatenate(
            [
                np.column_stack([xs, 0.5 + dev]),
                np.column_stack([xs, 0.5 - dev]),
            ]
        )
        return pts[:m]

    return Problem(
        name="sharp-edge",
        levelset=LevelSet(lf, "sharp-edge"),
        beta_plus=constant(1000.0),
        beta_minus=constant(1.0),
        u_plus=u_side(1000.0),
        u_minus=u_side(1.0),
        grad_u_plus=grad_side(1000.0),
        grad_u_minus=grad_side(1.0),
        f_plus=f,
        f_minus=f,
        interface_points=interface_points,
    )


def problem_variable_coefficient() -> Problem:
    """Elliptic interface (semi-axes 0.25, 0.125) with a variable coefficient
    inside: beta- is a positive quadratic, beta+ = 1; u = L / beta.
    """
    inv_r1sq = 16.0   # 1 / 0.25^2
    inv_r2sq = 64.0   # 1 / 0.125^2

    def lf(x, y):
        return inv_r1sq * (x - 0.5) ** 2 + inv_r2sq * (y - 0.5) ** 2 - 1.0

    def grad_l(x, y):
        return np.stack(
            [2.0 * inv_r1sq * (x - 0.5), 2.0 * inv_r2sq * (y - 0.5)], axis=-1
        )

    lap_l = 2.0 * inv_r1sq + 2.0 * inv_r2sq  # = 160

    def beta_m(x, y):
        a = 2 * np.asarray(x, dtype=float) - 1
        b = 2 * np.asarray(y, dtype=float) - 1
        return 1.0 + 0.5 * a**2 - a * b + b**2

    def grad_beta_m(x, y):
        a = 2 * np.asarray(x, dtype=float) - 1
        b = 2 * np.asarray(y, dtype=float) - 1
        return np.stack([2 * a - 2 * b, -2 * a + 4 * b], axis=-1)

    lap_beta_m = 12.0

    def u_plus(x, y):
        return lf(x, y)

    def grad_u_plus(x, y):
        return grad_l(x, y)

    def f_plus(x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, -lap_l)

    def u_minus(x, y):
        return lf(x, y) / beta_m(x, y)

    def grad_u_minus(x, y):
        u = u_minus(x, y)
        return (grad_l(x, y) - u[..., None] * grad_beta_m(x, y)) / beta_m(x, y)[
            ..., None
        ]

    def f_minus(x, y):
        # beta- grad u = grad L - u grad beta-, so
        # f = -lap L + grad u . grad beta- + u lap beta-
        u = u_minus(x, y)
        gu = grad_u_minus(x, y)
        gb = grad_beta_m(x, y)
        return -lap_l + (gu * gb).sum(axis=-1) + u * lap_beta_m

    def interface_points(m):
        theta = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
        return np.column_stack(
            [0.5 + 0.25 * np.cos(theta), 0.5 + 0.125 * np.sin(theta)]
        )

    return Problem(
        name="variable-coefficient",
        levelset=LevelSet(lf, "ellipse"),
        beta_plus=constant(1.0),
        beta_minus=beta_m,
        u_plus=u_plus,
        u_minus=u_minus,
        grad_u_plus=grad_u_plus,
        grad_u_minus=grad_u_minus,
        f_plus=f_plus,
        f_minus=f_minus,
        interface_points=interface_points,
    )


BUILTIN_PROBLEMS = {
    "circle": problem_circle,
    "sharp": problem_sharp_edge,
    "variable": problem_variable_coefficient,
}

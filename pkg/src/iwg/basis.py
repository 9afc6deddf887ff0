"""Element-local bases for the weak Galerkin interior component.

Non-interface cells use centroid-centered monomials {1, x - xc, y - yc}.
Interface cells use the broken-linear basis that is continuous across the
chord and has continuous frozen-coefficient-weighted normal derivative:

    b1 = 1
    b2 = tangent . (x - x0)
    b3 = normal . (x - x0) / beta_bar(side)

with x0 the chord midpoint. Gradients are constant per side; the side of a
point is the sign of normal . (x - x0) (negative: plus side, positive:
minus side; on the chord both branches agree).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ElementCut, InterfaceCut, NonInterfaceCut


@dataclass
class ElementBasis:
    cut: ElementCut
    centroid: np.ndarray  # used by the non-interface branch

    @property
    def is_interface(self) -> bool:
        return self.cut.is_interface

    def side_of(self, x, y) -> np.ndarray:
        """+1 on the plus side of the chord, -1 on the minus side."""
        if not self.cut.is_interface:
            return np.full(np.shape(np.asarray(x)), self.cut.side, dtype=int)
        c = self.cut
        s = (np.asarray(x) - c.x0[0]) * c.normal[0] + (np.asarray(y) - c.x0[1]) * c.normal[1]
        return np.where(s > 0.0, -1, 1)

    def eval(self, x, y) -> np.ndarray:
        """Basis values, shape (..., 3)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if not self.cut.is_interface:
            xc, yc = self.centroid
            return np.stack(
                [np.ones_like(x), x - xc, y - yc], axis=-1
            )
        c = self.cut
        dx = x - c.x0[0]
        dy = y - c.x0[1]
        t_comp = c.tangent[0] * dx + c.tangent[1] * dy
        n_comp = c.normal[0] * dx + c.normal[1] * dy
        beta = np.where(n_comp > 0.0, c.beta_minus_bar, c.beta_plus_bar)
        return np.stack([np.ones_like(x), t_comp, n_comp / beta], axis=-1)

    def grads(self, side: int) -> np.ndarray:
        """Constant gradients of the 3 basis functions on one side, (3, 2)."""
        if not self.cut.is_interface:
            return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        c = self.cut
        beta = c.beta_plus_bar if side > 0 else c.beta_minus_bar
        return np.array([[0.0, 0.0], list(c.tangent), list(c.normal / beta)])


def build_basis(cut: ElementCut, centroid: np.ndarray) -> ElementBasis:
    return ElementBasis(cut=cut, centroid=np.asarray(centroid, dtype=float))


def sub_regions(basis: ElementBasis, cell_coords: np.ndarray):
    """(polygon, side) pairs covering the cell: one per side actually present."""
    if isinstance(basis.cut, NonInterfaceCut):
        return [(cell_coords, basis.cut.side)]
    cut: InterfaceCut = basis.cut
    return [(cut.poly_plus, 1), (cut.poly_minus, -1)]

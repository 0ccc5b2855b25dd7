"""Triangle grid shared by both substrates and the data-patch patterns of the layouts.

Patches are triangles of a triangular lattice, addressed as ``(kind, i, j)`` with kind
``0`` for an upward and ``1`` for a downward triangle in cell ``(i, j)``. Triangles that
share a side are adjacent, which turns the triangle grid into a honeycomb graph:

* ``up(i, j)`` and ``down(i, j)`` share the diagonal side (direction ``a``),
* ``down(i, j)`` and ``up(i, j + 1)`` share a horizontal side (direction ``b``),
* ``down(i, j)`` and ``up(i + 1, j)`` share a vertical side (direction ``c``).
"""

from __future__ import annotations

from typing import Literal

LayoutKind = Literal["hexagonal", "row", "pair"]
LAYOUTS: tuple[LayoutKind, ...] = ("hexagonal", "row", "pair")

Triangle = tuple[int, int, int]
UP, DOWN = 0, 1


def triangle_neighbors(tri: Triangle) -> list[tuple[Triangle, str]]:
    """All side-sharing triangles of ``tri`` with the direction of the shared side."""
    kind, i, j = tri
    if kind == UP:
        return [((DOWN, i, j), "a"), ((DOWN, i, j - 1), "b"), ((DOWN, i - 1, j), "c")]
    return [((UP, i, j), "a"), ((UP, i, j + 1), "b"), ((UP, i + 1, j), "c")]


def pattern_is_data(layout: LayoutKind, tri: Triangle) -> bool:
    """Periodic data pattern of a layout, before boundary trimming.

    * row: upward triangles of every second row of cells, leaving one gap per six cells
      so that the ancilla strips between the rows stay connected (ratio 5/24),
    * hexagonal: upward triangles on a 3x3 supercell with four data patches (ratio 2/9),
      every data patch surrounded by ancilla patches on all three sides,
    * pair: side-sharing up/down pairs on every second cell in both directions.
    """
    kind, i, j = tri
    if layout == "row":
        return kind == UP and j % 2 == 0 and i % 6 != 5
    if layout == "hexagonal":
        return kind == UP and ((i - j) % 3 == 0 or (i % 3, j % 3) == (0, 2))
    if layout == "pair":
        return i % 2 == 0 and j % 2 == 0
    msg = f"Unknown layout {layout!r}."
    raise ValueError(msg)


def pair_partner(tri: Triangle) -> Triangle:
    """The triangle sharing the diagonal side, i.e. the other member of a square."""
    kind, i, j = tri
    return (1 - kind, i, j)

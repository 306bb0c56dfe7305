"""Finite CW complexes and integer cellular homology.

Complexes carry ordered cell ids per dimension and sparse integer boundary
matrices.  Homology is computed over the integers via Smith normal form
(arbitrary-precision throughout, minimal-absolute-value pivoting), which
yields Betti numbers and torsion invariant factors in one pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class CWComplex:
    """Cells per dimension plus boundary coefficient maps.

    `boundaries[k][cell_id]` maps each k-cell id to a dict
    `{(k-1)-cell id: incidence coefficient}` with zero entries omitted.
    """

    cells: dict[int, list[str]]
    boundaries: dict[int, dict[str, dict[str, int]]] = field(default_factory=dict)

    def top_dim(self) -> int:
        return max((d for d, ids in self.cells.items() if ids), default=0)

    def n_cells(self, dim: int) -> int:
        return len(self.cells.get(dim, []))

    def cell_counts(self) -> list[int]:
        return [self.n_cells(d) for d in range(self.top_dim() + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.cell_counts()))

    def boundary_matrix(self, dim: int) -> list[list[int]]:
        """Dense boundary matrix taking dim-cells to (dim-1)-cells."""
        rows = self.cells.get(dim - 1, [])
        cols = self.cells.get(dim, [])
        index = {cid: i for i, cid in enumerate(rows)}
        mat = [[0] * len(cols) for _ in rows]
        bnd = self.boundaries.get(dim, {})
        for j, cid in enumerate(cols):
            for rid, coeff in bnd.get(cid, {}).items():
                mat[index[rid]][j] += coeff
        return mat

    def validate(self) -> None:
        """Check ids are unique and the composite boundary vanishes."""
        seen: set[str] = set()
        for dim in sorted(self.cells):
            for cid in self.cells[dim]:
                if cid in seen:
                    raise ValueError(f"duplicate cell id: {cid}")
                seen.add(cid)
        for dim in sorted(self.cells):
            if dim < 2:
                continue
            lower = self.boundaries.get(dim - 1, {})
            for cid in self.cells.get(dim, []):
                acc: dict[str, int] = {}
                for mid, c1 in self.boundaries.get(dim, {}).get(cid, {}).items():
                    for rid, c2 in lower.get(mid, {}).items():
                        acc[rid] = acc.get(rid, 0) + c1 * c2
                bad = {k: v for k, v in acc.items() if v != 0}
                if bad:
                    raise ValueError(f"boundary of boundary nonzero at {cid}: {bad}")

    def to_json(self) -> str:
        payload = {
            "cells": {str(d): ids for d, ids in sorted(self.cells.items())},
            "boundary": {
                str(d): [
                    [rid, cid, coeff]
                    for cid in self.cells.get(d, [])
                    for rid, coeff in sorted(self.boundaries.get(d, {}).get(cid, {}).items())
                ]
                for d in sorted(self.cells)
                if d >= 1
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "CWComplex":
        payload = json.loads(text)
        cells = {int(d): list(ids) for d, ids in payload["cells"].items()}
        boundaries: dict[int, dict[str, dict[str, int]]] = {}
        for d, triples in payload.get("boundary", {}).items():
            bnd: dict[str, dict[str, int]] = {}
            for rid, cid, coeff in triples:
                bnd.setdefault(cid, {})[rid] = bnd.setdefault(cid, {}).get(rid, 0) + coeff
            boundaries[int(d)] = bnd
        return CWComplex(cells=cells, boundaries=boundaries)


def smith_normal_form(matrix: list[list[int]]) -> tuple[list[int], int]:
    """Invariant factors (d1 | d2 | ...) and rank of an integer matrix.

    Classic elimination with minimal-absolute-value pivoting; Python ints
    keep intermediate growth exact.  Only the diagonal is tracked (the
    transforms themselves are not needed here).
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            if v:
                rows.setdefault(i, {})[j] = v
                cols.setdefault(j, set()).add(i)

    def drop(i: int, j: int) -> None:
        rows[i].pop(j, None)
        if not rows[i]:
            del rows[i]
        cols[j].discard(i)
        if not cols[j]:
            del cols[j]

    def put(i: int, j: int, v: int) -> None:
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, set()).add(i)
        elif i in rows and j in rows[i]:
            drop(i, j)

    diagonal: list[int] = []
    while rows:
        # Minimal |entry| pivot keeps coefficient growth tame.
        pi, pj, pv = -1, -1, 0
        for i, r in rows.items():
            for j, v in r.items():
                if pv == 0 or abs(v) < abs(pv):
                    pi, pj, pv = i, j, v
            if abs(pv) == 1:
                break
        while True:
            moved = False
            # Clear the pivot column with row operations.
            for i in list(cols.get(pj, ())):
                if i == pi:
                    continue
                q = rows[i][pj] // pv
                if q:
                    for j2, pvj in list(rows[pi].items()):
                        put(i, j2, rows.get(i, {}).get(j2, 0) - q * pvj)
                if rows.get(i, {}).get(pj):
                    # Remainder has smaller magnitude: it becomes the pivot.
                    pi, pv = i, rows[i][pj]
                    moved = True
                    break
            if moved:
                continue
            # Clear the pivot row with column operations; the pivot column
            # holds only the pivot now, so other rows stay untouched.
            for j in list(rows.get(pi, {})):
                if j == pj:
                    continue
                q = rows[pi][j] // pv
                if q:
                    for i2 in list(cols.get(pj, ())):
                        put(i2, j, rows.get(i2, {}).get(j, 0) - q * rows[i2][pj])
                if rows.get(pi, {}).get(j):
                    pj, pv = j, rows[pi][j]
                    moved = True
                    break
            if not moved:
                break
        diagonal.append(abs(pv))
        for j in list(rows.get(pi, {})):
            drop(pi, j)
        if pj in cols:
            for i in list(cols[pj]):
                drop(i, pj)

    # Enforce the divisibility chain d1 | d2 | ...
    import math as _math

    changed = True
    while changed:
        changed = False
        diagonal.sort()
        for i in range(len(diagonal) - 1):
            a, b = diagonal[i], diagonal[i + 1]
            if b % a != 0:
                g = _math.gcd(a, b)
                diagonal[i], diagonal[i + 1] = g, a * b // g
                changed = True
    return diagonal, len(diagonal)


@dataclass(frozen=True)
class HomologyReport:
    """Betti numbers, torsion invariant factors, cell counts, Euler number."""

    betti: list[int]
    torsion: list[list[int]]
    cells: list[int]
    euler: int

    def summary(self) -> str:
        parts = []
        for k, b in enumerate(self.betti):
            tors = self.torsion[k]
            desc = f"Z^{b}" if b != 1 else "Z"
            if b == 0:
                desc = "0"
            if tors:
                tail = " + " + " + ".join(f"Z/{d}" for d in tors)
                desc = (desc if desc != "0" else "") + tail
            parts.append(f"H{k} = {desc}")
        return "; ".join(parts)


def homology(complex_: CWComplex) -> HomologyReport:
    """Integral cellular homology of a validated finite CW complex."""
    complex_.validate()
    top = complex_.top_dim()
    counts = complex_.cell_counts()
    ranks = [0] * (top + 2)
    factors: list[list[int]] = [[] for _ in range(top + 2)]
    for dim in range(1, top + 1):
        mat = complex_.boundary_matrix(dim)
        if mat and mat[0:]:
            diag, rank = smith_normal_form(mat)
        else:
            diag, rank = [], 0
        ranks[dim] = rank
        factors[dim] = [d for d in diag if d > 1]
    betti = [counts[k] - ranks[k] - ranks[k + 1] for k in range(top + 1)]
    torsion = [factors[k + 1] for k in range(top + 1)]
    euler = sum((-1) ** k * counts[k] for k in range(top + 1))
    if euler != sum((-1) ** k * betti[k] for k in range(top + 1)):
        raise AssertionError("Euler characteristic mismatch between cells and Betti numbers")
    return HomologyReport(betti=betti, torsion=torsion, cells=counts, euler=euler)

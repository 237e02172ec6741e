"""Generator action on basis indices: one row per generator, one column per basis."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .index_maps import conj_row, unitary_rows
from .mub_core import Dimension, MubFamily, check_unbiased, match_columns


class ClosureViolation(Exception):
    """A generator maps some family basis outside the family."""

    def __init__(self, label: str, basis: int, detail: str = ""):
        self.label = label
        self.basis = basis
        super().__init__(f"generator {label} does not close on basis M_{basis}"
                         + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class GeneratorRow:
    label: str
    images: tuple[int, ...]


@dataclass(frozen=True)
class TransformTable:
    d: int
    rows: tuple[GeneratorRow, ...]
    excluded: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = self.d + 1
        for r in self.rows:
            if sorted(r.images) != list(range(n)):
                raise ValueError(f"row {r.label} is not a permutation of 0..{self.d}")

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.rows]

    def array(self) -> np.ndarray:
        return np.array([r.images for r in self.rows], dtype=np.int64)

    def row(self, label: str) -> tuple[int, ...]:
        for r in self.rows:
            if r.label == label:
                return r.images
        raise KeyError(label)

    def __len__(self):
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["generator"] + [f"M_{y}" for y in range(self.d + 1)])
        for r in self.rows:
            w.writerow([r.label, *r.images])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "columns": [f"M_{y}" for y in range(self.d + 1)],
            "rows": {r.label: list(r.images) for r in self.rows},
            "order": self.labels,
            "excluded": list(self.excluded),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def unitary_label(x: int) -> str:
    return f"M_{x}"


def build_table_analytic(d: int) -> TransformTable:
    Dimension.odd_prime(d)
    rows = [GeneratorRow(unitary_label(x), tuple(int(v) for v in r))
            for x, r in enumerate(unitary_rows(d))]
    rows.append(GeneratorRow("conj", tuple(int(v) for v in conj_row(d))))
    return TransformTable(d, tuple(rows))


def _basis_image(images: np.ndarray, label: str, y: int, d: int) -> int:
    # images: (z, c) arrays for the d vectors of basis y
    z, c = images
    if np.any(z < 0):
        raise ClosureViolation(label, y, "a vector matches no family member")
    if np.any(z != z[0]):
        raise ClosureViolation(label, y, f"vectors land in several bases {sorted(set(z.tolist()))}")
    if len(set(c.tolist())) != d:
        raise ClosureViolation(label, y, "image vectors are not distinct")
    return int(z[0])


def numeric_row(family: MubFamily, label: str, op) -> GeneratorRow:
    """Row for ``op``: a callable mapping a (d, d) matrix of column vectors to its image."""
    d = family.d
    images = [_basis_image(match_columns(op(family.matrix(y)), family), label, y, d)
              for y in range(d + 1)]
    if sorted(images) != list(range(d + 1)):
        raise ClosureViolation(label, -1, "basis map is not a bijection")
    return GeneratorRow(label, tuple(images))


def build_table_numeric(family: MubFamily,
                        extra_unitaries: Sequence[np.ndarray] | Iterable = (),
                        extra_labels: Sequence[str] | None = None,
                        on_violation: str = "raise",
                        validate: bool = True) -> TransformTable:
    """Numerically realised table: rows M_0..M_d, conj, then the extras in order.

    on_violation="raise" propagates ClosureViolation; "skip" drops the
    offending generator and records its label in ``excluded``.
    """
    if on_violation not in ("raise", "skip"):
        raise ValueError("on_violation must be 'raise' or 'skip'")
    if validate:
        rep = check_unbiased(family)
        if not rep.passed:
            raise ValueError(f"family fails validation (deviation {rep.max_deviation:.3g})")
    d = family.d
    extras = list(extra_unitaries)
    if extra_labels is None:
        extra_labels = [f"U_{i}" for i in range(len(extras))]
    ops = [(unitary_label(x), (lambda m, U=family.matrix(x): U @ m)) for x in range(d + 1)]
    ops.append(("conj", np.conj))
    ops += [(lab, (lambda m, U=np.asarray(U): U @ m)) for lab, U in zip(extra_labels, extras)]
    rows, excluded = [], []
    for label, op in ops:
        try:
            rows.append(numeric_row(family, label, op))
        except ClosureViolation:
            if on_violation == "raise":
                raise
            excluded.append(label)
    return TransformTable(d, tuple(rows), tuple(excluded))

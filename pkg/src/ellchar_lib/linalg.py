"""体上の行列計算

有限体の行列は galois の FieldArray、Q(ζ_N) の行列は CycloNumber を成分と
する object 型の numpy 配列で表す。どちらも同じ名前のメソッドを持つ。
"""

from collections.abc import Sequence
from dataclasses import dataclass

import galois
import numpy as np

from ellchar_lib.cyclo import CycloNumber, RootOfUnity
from ellchar_lib.fields import FiniteField, root_of_unity


def _exact(x: object) -> CycloNumber:
    if isinstance(x, CycloNumber):
        return x
    return CycloNumber.from_int(x)  # type: ignore[arg-type]


@dataclass(frozen=True, slots=True)
class CyclotomicMatrices:
    """Q(ζ_N) 上の行列"""

    conductor: int = 1

    def realises(self: "CyclotomicMatrices", order: int) -> bool:
        """位数 order の1の冪根を含むか"""
        n = self.conductor
        return n % order == 0 or (n % 2 == 1 and (2 * n) % order == 0)

    def root(self: "CyclotomicMatrices", r: RootOfUnity) -> CycloNumber:
        if not self.realises(r.order):
            msg = f"{r} does not lie in Q(zeta_{self.conductor})"
            raise ValueError(msg)
        return CycloNumber.from_root(r)

    def scalar(self: "CyclotomicMatrices", x: int) -> CycloNumber:
        return CycloNumber.from_int(x)

    def asarray(
        self: "CyclotomicMatrices", values: Sequence[Sequence[object]]
    ) -> np.ndarray:
        rows = [[_exact(x) for x in row] for row in values]
        out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                out[i, j] = x
        return out

    def vector(
        self: "CyclotomicMatrices", values: Sequence[object]
    ) -> np.ndarray:
        out = np.empty(len(values), dtype=object)
        for i, x in enumerate(values):
            out[i] = _exact(x)
        return out

    def concat(
        self: "CyclotomicMatrices", vectors: Sequence[np.ndarray]
    ) -> np.ndarray:
        if not vectors:
            return np.empty(0, dtype=object)
        return np.concatenate(vectors)

    def zeros(self: "CyclotomicMatrices", rows: int, cols: int) -> np.ndarray:
        return np.full((rows, cols), CycloNumber.zero(), dtype=object)

    def identity(self: "CyclotomicMatrices", n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = CycloNumber.one()
        return out

    def matmul(
        self: "CyclotomicMatrices", a: np.ndarray, b: np.ndarray
    ) -> np.ndarray:
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return np.vectorize(_exact, otypes=[object])(a @ b)

    def hstack(
        self: "CyclotomicMatrices", a: np.ndarray, b: np.ndarray
    ) -> np.ndarray:
        return np.hstack([a, b])

    def rref(
        self: "CyclotomicMatrices", a: np.ndarray, ncols: int | None = None
    ) -> tuple[np.ndarray, list[int]]:
        """Gauss-Jordan 消去 (先頭 ncols 列だけを掃き出す)"""
        m = np.vectorize(_exact, otypes=[object])(a) if a.size else a.copy()
        rows, cols = m.shape
        limit = cols if ncols is None else min(ncols, cols)
        pivots: list[int] = []
        r = 0
        for c in range(limit):
            if r == rows:
                break
            pivot = next((i for i in range(r, rows) if m[i, c] != 0), None)
            if pivot is None:
                continue
            m[[r, pivot]] = m[[pivot, r]]
            m[r] = m[r] * m[r, c].inverse()
            for i in range(rows):
                if i != r and m[i, c] != 0:
                    m[i] = m[i] - m[r] * m[i, c]
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self: "CyclotomicMatrices", a: np.ndarray) -> int:
        return len(self.rref(a)[1])

    def null_space(self: "CyclotomicMatrices", a: np.ndarray) -> np.ndarray:
        """核の基底を列に並べた行列"""
        cols = a.shape[1]
        reduced, pivots = self.rref(a)
        free = [c for c in range(cols) if c not in pivots]
        out = self.zeros(cols, len(free))
        for k, f in enumerate(free):
            out[f, k] = CycloNumber.one()
            for i, p in enumerate(pivots):
                out[p, k] = -reduced[i, f]
        return out

    def trace(self: "CyclotomicMatrices", a: np.ndarray) -> CycloNumber:
        total = CycloNumber.zero()
        for i in range(a.shape[0]):
            total += a[i, i]
        return total

    def is_zero(self: "CyclotomicMatrices", a: np.ndarray) -> bool:
        return all(x == 0 for x in a.flat)


@dataclass(frozen=True, slots=True)
class FiniteFieldMatrices:
    """F_{ℓ^k} 上の行列 (galois)"""

    field: FiniteField

    def realises(self: "FiniteFieldMatrices", order: int) -> bool:
        return (self.field.order - 1) % order == 0

    def root(
        self: "FiniteFieldMatrices", r: RootOfUnity
    ) -> galois.FieldArray:
        return root_of_unity(r, self.field).to_galois()

    def scalar(self: "FiniteFieldMatrices", x: int) -> galois.FieldArray:
        return self.field.gf(x % self.field.characteristic)

    def asarray(
        self: "FiniteFieldMatrices", values: Sequence[Sequence[int]]
    ) -> galois.FieldArray:
        """整数行列を素体経由で写す"""
        array = np.array(values, dtype=np.int64).reshape(
            len(values), len(values[0]) if len(values) else 0
        )
        return self.field.gf(np.mod(array, self.field.characteristic))

    def vector(
        self: "FiniteFieldMatrices", values: Sequence[object]
    ) -> galois.FieldArray:
        ints = [int(x) for x in values]  # type: ignore[call-overload]
        return self.field.gf(np.array(ints, dtype=np.int64))

    def concat(
        self: "FiniteFieldMatrices", vectors: Sequence[np.ndarray]
    ) -> galois.FieldArray:
        if not vectors:
            return self.field.gf.Zeros(0)
        return self.field.gf(
            np.concatenate([v.view(np.ndarray) for v in vectors])
        )

    def zeros(
        self: "FiniteFieldMatrices", rows: int, cols: int
    ) -> galois.FieldArray:
        return self.field.gf.Zeros((rows, cols))

    def identity(self: "FiniteFieldMatrices", n: int) -> galois.FieldArray:
        return self.field.gf.Identity(n)

    def matmul(
        self: "FiniteFieldMatrices", a: np.ndarray, b: np.ndarray
    ) -> galois.FieldArray:
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return a @ b

    def hstack(
        self: "FiniteFieldMatrices", a: np.ndarray, b: np.ndarray
    ) -> galois.FieldArray:
        return self.field.gf(
            np.hstack([a.view(np.ndarray), b.view(np.ndarray)])
        )

    def rref(
        self: "FiniteFieldMatrices", a: np.ndarray, ncols: int | None = None
    ) -> tuple[galois.FieldArray, list[int]]:
        if a.shape[0] == 0 or a.shape[1] == 0:
            return a.copy(), []
        reduced = a.row_reduce(ncols=ncols)
        limit = a.shape[1] if ncols is None else ncols
        pivots = []
        for row in reduced:
            nonzero = np.flatnonzero(row.view(np.ndarray)[:limit])
            if nonzero.size:
                pivots.append(int(nonzero[0]))
        return reduced, pivots

    def rank(self: "FiniteFieldMatrices", a: np.ndarray) -> int:
        if a.shape[0] == 0 or a.shape[1] == 0:
            return 0
        return int(np.linalg.matrix_rank(a))

    def null_space(
        self: "FiniteFieldMatrices", a: np.ndarray
    ) -> galois.FieldArray:
        cols = a.shape[1]
        if cols == 0:
            return self.zeros(0, 0)
        if a.shape[0] == 0 or self.rank(a) == 0:
            return self.identity(cols)
        basis = a.null_space()
        if basis.size == 0:
            return self.zeros(cols, 0)
        return basis.T

    def trace(self: "FiniteFieldMatrices", a: np.ndarray) -> galois.FieldArray:
        return np.trace(a)

    def is_zero(self: "FiniteFieldMatrices", a: np.ndarray) -> bool:
        return not np.count_nonzero(a.view(np.ndarray))


Matrices = CyclotomicMatrices | FiniteFieldMatrices


def left_inverse(backend: Matrices, q: np.ndarray) -> np.ndarray:
    """列が一次独立な q に対し L·q = I となる L

    Examples
    --------
    >>> ops = CyclotomicMatrices()
    >>> q = ops.asarray([[1], [1]])
    >>> ops.matmul(left_inverse(ops, q), q)[0, 0]
    CycloNumber(1)
    """
    rows, cols = q.shape
    augmented = backend.hstack(q, backend.identity(rows))
    reduced, pivots = backend.rref(augmented, ncols=cols)
    if pivots != list(range(cols)):
        msg = "columns are not linearly independent"
        raise ValueError(msg)
    return reduced[:cols, cols:]


def independent_columns(backend: Matrices, a: np.ndarray) -> np.ndarray:
    """列空間の基底 (a の列から選ぶ)"""
    if a.shape[1] == 0:
        return a
    _, pivots = backend.rref(a)
    return a[:, pivots]


def extend_basis(
    backend: Matrices, sub: np.ndarray, ambient: np.ndarray
) -> np.ndarray:
    """sub の列に ambient の列を加えて span(ambient) の基底にする

    sub の列は ambient の列空間に含まれ、一次独立であるとする。
    返すのは加えた列だけ。
    """
    combined = backend.hstack(sub, ambient)
    if combined.shape[1] == 0:
        return ambient
    _, pivots = backend.rref(combined)
    extra = [p - sub.shape[1] for p in pivots if p >= sub.shape[1]]
    return ambient[:, extra]

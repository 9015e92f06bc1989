"""G×T 上の置換複体、係数拡大、isotypic 成分、ホモロジー、Euler 類

置換複体の各項は推移的な G×T 集合 (G×T)/K の直和で、微分は同変な整数
行列 (scipy の疎行列) で持つ。T は FinAb で、元の番号は FinAb.index に従う。
(G×T)/K の点は剰余類の最小の元 g·|T| + t の順に番号を振る。
"""

import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cache, partial
from typing import Any, Literal, TypedDict

import numpy as np
from scipy import sparse

from ellchar_lib.cyclo import (
    Coefficient,
    CycloNumber,
    RootOfUnity,
    check_prime,
    is_ell_regular,
)
from ellchar_lib.fgab import (
    AbChar,
    Coords,
    FinAb,
    FinAbDict,
    ell_part,
    smith_normal_form,
    subgroup,
)
from ellchar_lib.fields import make_field
from ellchar_lib.ggroup import (
    FinGroup,
    FinGroupDict,
    GClass,
    Subgroup,
    abelian_group,
    brauer_value,
    direct_product,
)
from ellchar_lib.limits import EXTENSION_DEGREE_CAP
from ellchar_lib.linalg import (
    CyclotomicMatrices,
    FiniteFieldMatrices,
    Matrices,
    extend_basis,
    independent_columns,
    left_inverse,
)

logger = logging.getLogger(__name__)

Stabilizer = tuple[tuple[int, Coords], ...]


@cache
def _t_table(t_group: FinAb) -> np.ndarray:
    return abelian_group(t_group).table


@cache
def product_group(g_group: FinGroup, t_group: FinAb) -> FinGroup:
    """G×T (元 (g, t) の番号は g·|T| + index(t))"""
    return direct_product(g_group, abelian_group(t_group))


@dataclass(frozen=True, slots=True, eq=False)
class Orbit:
    """推移的な G×T 集合 (G×T)/K"""

    stabilizer: Stabilizer
    point_of: np.ndarray
    representatives: np.ndarray
    g_action: np.ndarray
    t_action: np.ndarray

    @property
    def size(self: "Orbit") -> int:
        return len(self.representatives)

    @property
    def t_stabilizer_order(self: "Orbit") -> int:
        """|K ∩ T|"""
        return sum(1 for g, _ in self.stabilizer if g == 0)

    def act(self: "Orbit", g: int, t: int, x: int) -> int:
        return int(self.t_action[t, self.g_action[g, x]])


def make_orbit(
    g_group: FinGroup,
    t_group: FinAb,
    stabilizer: Iterable[tuple[int, Sequence[int]]],
) -> Orbit:
    """K ≤ G×T を (g, t) の組で与えて (G×T)/K を作る

    Raises
    ------
    ValueError
        K が部分群でない時に送出

    Examples
    --------
    >>> from ellchar_lib.ggroup import cyclic_group
    >>> T = FinAb((3,))
    >>> free = make_orbit(cyclic_group(1), T, [(0, (0,))])
    >>> free.size, free.t_action[1].tolist()
    (3, [1, 2, 0])
    >>> make_orbit(cyclic_group(1), T, [(0, (0,)), (0, (1,)), (0, (2,))]).size
    1
    """
    nt = t_group.order
    ttab = _t_table(t_group)
    pairs = sorted({(g, t_group.reduce(t)) for g, t in stabilizer})
    kg = np.array([g for g, _ in pairs], dtype=np.int64)
    kt = np.array([t_group.index(t) for _, t in pairs], dtype=np.int64)
    members = set((kg * nt + kt).tolist())
    products = (
        g_group.table[kg[:, None], kg[None, :]] * nt
        + ttab[kt[:, None], kt[None, :]]
    )
    if 0 not in members or not set(products.ravel().tolist()) <= members:
        msg = "stabilizer is not a subgroup of G x T"
        raise ValueError(msg)
    elements = np.arange(g_group.order * nt)
    eg, et = np.divmod(elements, nt)
    cosets = (
        g_group.table[eg[:, None], kg[None, :]] * nt
        + ttab[et[:, None], kt[None, :]]
    )
    reps, point_of = np.unique(cosets.min(axis=1), return_inverse=True)
    rep_g, rep_t = np.divmod(reps, nt)
    g_action = point_of[g_group.table[:, rep_g] * nt + rep_t[None, :]]
    t_action = point_of[rep_g[None, :] * nt + ttab[:, rep_t]]
    return Orbit(tuple(pairs), point_of, reps, g_action, t_action)


@dataclass(frozen=True, slots=True, eq=False)
class PermTerm:
    """置換加群 Z[S_i] (S_i は軌道の直和)"""

    orbits: tuple[Orbit, ...]
    offsets: tuple[int, ...]
    g_action: np.ndarray
    t_action: np.ndarray

    @property
    def size(self: "PermTerm") -> int:
        return self.g_action.shape[1]


def _term(g_order: int, t_order: int, orbits: Sequence[Orbit]) -> PermTerm:
    offsets = []
    total = 0
    for o in orbits:
        offsets.append(total)
        total += o.size
    g_action = np.empty((g_order, total), dtype=np.int64)
    t_action = np.empty((t_order, total), dtype=np.int64)
    for o, off in zip(orbits, offsets):
        g_action[:, off : off + o.size] = o.g_action + off
        t_action[:, off : off + o.size] = o.t_action + off
    return PermTerm(tuple(orbits), tuple(offsets), g_action, t_action)


class SparseDict(TypedDict):
    shape: list[int]
    rows: list[int]
    cols: list[int]
    data: list[int]


class PermComplexDict(TypedDict):
    group: FinGroupDict
    torus_group: FinAbDict
    terms: dict[str, list[list[list[Any]]]]
    differentials: dict[str, SparseDict]


@dataclass(frozen=True, slots=True, eq=False)
class PermComplex:
    """G×T 上の有界な置換複体

    differentials[i] は d_i: C_i → C_{i-1} で、形は (|S_{i-1}|, |S_i|)。
    """

    g_group: FinGroup
    t_group: FinAb
    terms: dict[int, PermTerm]
    differentials: dict[int, sparse.csr_array]

    @property
    def degrees(self: "PermComplex") -> list[int]:
        return sorted(self.terms)

    def size(self: "PermComplex", i: int) -> int:
        return self.terms[i].size if i in self.terms else 0

    def differential(self: "PermComplex", i: int) -> sparse.csr_array:
        if i in self.differentials:
            return self.differentials[i]
        return sparse.csr_array(
            (self.size(i - 1), self.size(i)), dtype=np.int64
        )

    @classmethod
    def build(
        cls: type["PermComplex"],
        g_group: FinGroup,
        t_group: FinAb,
        terms: Mapping[int, Sequence[Iterable[tuple[int, Sequence[int]]]]],
        maps: Mapping[tuple[int, int, int], Mapping[int, int]] | None = None,
    ) -> "PermComplex":
        """軌道の安定化群と同変写像から複体を作る

        Parameters
        ----------
        g_group : FinGroup
            G
        t_group : FinAb
            T
        terms : Mapping[int, Sequence[Iterable[tuple[int, Sequence[int]]]]]
            次数ごとの軌道の安定化群
        maps : Mapping[tuple[int, int, int], Mapping[int, int]] | None
            (次数 i, C_i の軌道番号, C_{i-1} の軌道番号) から、基点の像
            (行き先の軌道の点番号と係数) への対応

        Returns
        -------
        PermComplex
            複体

        Raises
        ------
        ValueError
            写像が同変でない、または d∘d ≠ 0 の時に送出
        """
        built = {
            i: _term(
                g_group.order,
                t_group.order,
                [make_orbit(g_group, t_group, k) for k in stabs],
            )
            for i, stabs in terms.items()
            if stabs
        }
        triplets: dict[int, tuple[list[int], list[int], list[int]]] = {}
        for (i, src, dst), image in (maps or {}).items():
            if i not in built or i - 1 not in built:
                msg = f"no terms in degrees {i} and {i - 1}"
                raise ValueError(msg)
            source, target = built[i], built[i - 1]
            rows, cols, data = _equivariant_block(
                source.orbits[src], target.orbits[dst], image, t_group.order
            )
            acc = triplets.setdefault(i, ([], [], []))
            acc[0].extend((rows + target.offsets[dst]).tolist())
            acc[1].extend((cols + source.offsets[src]).tolist())
            acc[2].extend(data.tolist())
        diffs = {}
        for i, (rows, cols, data) in triplets.items():
            d = sparse.coo_array(
                (np.array(data, dtype=np.int64), (rows, cols)),
                shape=(built[i - 1].size, built[i].size),
            ).tocsr()
            d.eliminate_zeros()
            diffs[i] = d
        complex_ = cls(g_group, t_group, built, diffs)
        complex_.validate()
        return complex_

    def validate(self: "PermComplex") -> None:
        """d∘d = 0 と G×T 同変性を確かめる

        Raises
        ------
        ValueError
            どちらかが成り立たない時に送出
        """
        for i, d in self.differentials.items():
            if d.shape != (self.size(i - 1), self.size(i)):
                msg = f"differential in degree {i} has the wrong shape"
                raise ValueError(msg)
            square = self.differential(i - 1) @ d
            square.eliminate_zeros()
            if square.nnz:
                msg = f"d o d is not zero in degree {i}"
                raise ValueError(msg)
            source, target = self.terms[i], self.terms[i - 1]
            t_gens = [self.t_group.index(b) for b in self.t_group.basis()]
            moves = [
                (target.g_action[g], source.g_action[g])
                for g in self.g_group.generators
            ] + [(target.t_action[t], source.t_action[t]) for t in t_gens]
            coo = d.tocoo()
            for row_perm, col_perm in moves:
                moved = sparse.coo_array(
                    (coo.data, (row_perm[coo.row], col_perm[coo.col])),
                    shape=d.shape,
                ).tocsr()
                if (moved != d).nnz:
                    msg = f"differential in degree {i} is not equivariant"
                    raise ValueError(msg)

    def is_t_free(self: "PermComplex") -> bool:
        return all(
            o.t_stabilizer_order == 1
            for term in self.terms.values()
            for o in term.orbits
        )

    def is_t_projective(self: "PermComplex", ell: int) -> bool:
        """各項が F_ℓ[T] 上射影的か (T 安定化群の位数が ℓ と素)"""
        return all(
            o.t_stabilizer_order % ell != 0
            for term in self.terms.values()
            for o in term.orbits
        )

    def to_dict(self: "PermComplex") -> PermComplexDict:
        terms = {
            str(i): [
                [[g, list(t)] for g, t in o.stabilizer] for o in term.orbits
            ]
            for i, term in self.terms.items()
        }
        differentials: dict[str, SparseDict] = {}
        for i, d in self.differentials.items():
            coo = d.tocoo()
            differentials[str(i)] = {
                "shape": [int(s) for s in d.shape],
                "rows": coo.row.tolist(),
                "cols": coo.col.tolist(),
                "data": coo.data.tolist(),
            }
        return {
            "group": self.g_group.to_dict(),
            "torus_group": self.t_group.to_dict(),
            "terms": terms,
            "differentials": differentials,
        }

    @classmethod
    def from_dict(
        cls: type["PermComplex"], data: PermComplexDict
    ) -> "PermComplex":
        g_group = FinGroup.from_dict(data["group"])
        t_group = FinAb.from_dict(data["torus_group"])
        terms = {
            int(i): _term(
                g_group.order,
                t_group.order,
                [
                    make_orbit(g_group, t_group, _pairs(stab))
                    for stab in stabs
                ],
            )
            for i, stabs in data["terms"].items()
        }
        diffs = {
            int(i): sparse.coo_array(
                (d["data"], (d["rows"], d["cols"])), shape=tuple(d["shape"])
            ).tocsr()
            for i, d in data["differentials"].items()
        }
        complex_ = cls(g_group, t_group, terms, diffs)
        complex_.validate()
        return complex_


def _pairs(stab: list[list[Any]]) -> list[tuple[int, Coords]]:
    return [(int(g), tuple(int(x) for x in t)) for g, t in stab]


def _equivariant_block(
    source: Orbit, target: Orbit, image: Mapping[int, int], t_order: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """基点の像 v から x = (g, t)K ↦ (g, t)·v を作る"""
    points = np.array(list(image), dtype=np.int64)
    coeffs = np.array(list(image.values()), dtype=np.int64)
    if points.size and (points.min() < 0 or points.max() >= target.size):
        msg = "image refers to points outside the target orbit"
        raise ValueError(msg)
    rep_g, rep_t = np.divmod(source.representatives, t_order)
    rows = target.t_action[
        rep_t[:, None], target.g_action[rep_g[:, None], points[None, :]]
    ]
    cols = np.repeat(np.arange(source.size), len(points))
    return rows.ravel(), cols, np.tile(coeffs, source.size)


def shift(c: PermComplex, k: int) -> PermComplex:
    """次数を k だけずらす (C[k]_i = C_{i-k})

    微分の符号は (-1)^k 倍せずそのまま移す。ホモロジーは変わらない。
    """
    return PermComplex(
        c.g_group,
        c.t_group,
        {i + k: term for i, term in c.terms.items()},
        {i + k: d for i, d in c.differentials.items()},
    )


def augment(c: PermComplex) -> PermComplex:
    """最低次数 i の下に Z (1点) を足し、ε: Z[S_i] → Z を和とする

    Raises
    ------
    ValueError
        ε∘d ≠ 0 の時に送出

    Examples
    --------
    >>> from ellchar_lib.ggroup import cyclic_group
    >>> T = FinAb((3,))
    >>> C = PermComplex.build(cyclic_group(1), T, {0: [[(0, (0,))]]})
    >>> augment(C).degrees, augment(C).differential(0).toarray().tolist()
    ([-1, 0], [[1, 1, 1]])
    """
    degrees = c.degrees or [0]
    low = degrees[0]
    whole = [
        (g, t) for g in range(c.g_group.order) for t in c.t_group.elements()
    ]
    point = _term(
        c.g_group.order,
        c.t_group.order,
        [make_orbit(c.g_group, c.t_group, whole)],
    )
    epsilon = sparse.csr_array(np.ones((1, c.size(low)), dtype=np.int64))
    out = PermComplex(
        c.g_group,
        c.t_group,
        {**c.terms, low - 1: point},
        {**c.differentials, low: epsilon},
    )
    out.validate()
    return out


def stability_shift(n: int, h: int, h_prime: int) -> int:
    """レベル h' の類を h に持ち上げる時の次数のずれ 2(n-1)(h-h')

    Examples
    --------
    >>> stability_shift(2, 3, 1)
    4
    """
    if not 1 <= h_prime <= h:
        msg = "levels must satisfy 1 <= h' <= h"
        raise ValueError(msg)
    return 2 * (n - 1) * (h - h_prime)


@dataclass(frozen=True, slots=True)
class CoeffSpec:
    """係数環 Z、Q(ζ_N)、F_{ℓ^k}"""

    kind: Literal["integers", "cyclotomic", "finite"]
    conductor: int = 1
    ell: int | None = None
    degree: int = 1

    def __post_init__(self: "CoeffSpec") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            入力値が不正値の時に送出
        """
        if self.conductor < 1 or self.degree < 1:
            msg = "conductor and degree must be positive"
            raise ValueError(msg)
        if (self.kind == "finite") != (self.ell is not None):
            msg = "a prime is required exactly for finite coefficients"
            raise ValueError(msg)
        if self.ell is not None:
            check_prime(self.ell)

    @classmethod
    def integers(cls: type["CoeffSpec"]) -> "CoeffSpec":
        return cls("integers")

    @classmethod
    def cyclotomic(cls: type["CoeffSpec"], n: int = 1) -> "CoeffSpec":
        return cls("cyclotomic", conductor=n)

    @classmethod
    def finite(cls: type["CoeffSpec"], ell: int, k: int = 1) -> "CoeffSpec":
        return cls("finite", ell=ell, degree=k)

    @classmethod
    def parse(cls: type["CoeffSpec"], text: str) -> "CoeffSpec":
        """"Z", "Q", "cyc:N", "F:ℓ", "F:ℓ^k" を読む

        Examples
        --------
        >>> CoeffSpec.parse("F:3^2")
        CoeffSpec(kind='finite', conductor=1, ell=3, degree=2)
        >>> str(CoeffSpec.parse("cyc:12"))
        'cyc:12'
        """
        text = text.strip()
        if text == "Z":
            return cls.integers()
        if text == "Q":
            return cls.cyclotomic(1)
        kind, _, rest = text.partition(":")
        try:
            if kind == "cyc":
                return cls.cyclotomic(int(rest))
            if kind == "F":
                ell, _, k = rest.partition("^")
                return cls.finite(int(ell), int(k or 1))
        except ValueError as e:
            msg = f"invalid coefficient spec {text!r}"
            raise ValueError(msg) from e
        msg = f"invalid coefficient spec {text!r}"
        raise ValueError(msg)

    def __str__(self: "CoeffSpec") -> str:
        if self.kind == "integers":
            return "Z"
        if self.kind == "cyclotomic":
            return "Q" if self.conductor == 1 else f"cyc:{self.conductor}"
        return f"F:{self.ell}^{self.degree}"

    @property
    def coefficient(self: "CoeffSpec") -> Coefficient:
        if self.kind == "finite":
            return Coefficient.mod(self.ell)  # type: ignore[arg-type]
        return Coefficient.char0()

    def matrices(self: "CoeffSpec") -> Matrices:
        if self.kind == "cyclotomic":
            return CyclotomicMatrices(self.conductor)
        if self.kind == "finite":
            return FiniteFieldMatrices(
                make_field(self.ell, self.degree)  # type: ignore[arg-type]
            )
        msg = "integer coefficients do not form a field"
        raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class Monomial:
    """列 x を scalars[x]·e_{images[x]} に送る可逆行列"""

    images: np.ndarray
    scalars: np.ndarray

    def apply(self: "Monomial", ops: Matrices, w: np.ndarray) -> np.ndarray:
        out = ops.zeros(*w.shape)
        if w.shape[0] and w.shape[1]:
            out[self.images] = w * self.scalars[:, None]
        return out

    def dense(self: "Monomial", ops: Matrices) -> np.ndarray:
        return self.apply(ops, ops.identity(len(self.images)))


def _block_monomial(ops: Matrices, parts: Sequence[Monomial]) -> Monomial:
    images = []
    offset = 0
    for p in parts:
        images.append(p.images + offset)
        offset += len(p.images)
    return Monomial(
        np.concatenate(images) if images else np.zeros(0, dtype=np.int64),
        ops.concat([p.scalars for p in parts]),
    )


@dataclass(frozen=True, slots=True, eq=False)
class MatrixComplex:
    """体係数の有界複体と群作用 (作用は単項行列)

    homology は valid の範囲の次数でだけ正しい。
    """

    spec: CoeffSpec
    group: FinGroup
    ranks: dict[int, int]
    differentials: dict[int, np.ndarray]
    action: Callable[[int, int], Monomial]
    valid: tuple[int, int]

    @property
    def degrees(self: "MatrixComplex") -> list[int]:
        return sorted(i for i, r in self.ranks.items() if r)

    def rank(self: "MatrixComplex", i: int) -> int:
        return self.ranks.get(i, 0)

    def differential(self: "MatrixComplex", i: int) -> np.ndarray:
        if i in self.differentials:
            return self.differentials[i]
        shape = (self.rank(i - 1), self.rank(i))
        if self.spec.kind == "integers":
            return np.zeros(shape, dtype=np.int64)
        return self.spec.matrices().zeros(*shape)

    def verify(self: "MatrixComplex") -> None:
        """d∘d = 0 と群作用との可換性を確かめる

        Raises
        ------
        ValueError
            どちらかが成り立たない時に送出
        """
        ops = None if self.spec.kind == "integers" else self.spec.matrices()

        def product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
            return a @ b if ops is None else ops.matmul(a, b)

        def is_zero(a: np.ndarray) -> bool:
            return not a.any() if ops is None else ops.is_zero(a)

        def dense(i: int, g: int) -> np.ndarray:
            m = self.action(i, g)
            if ops is not None:
                return m.dense(ops)
            out = np.zeros((len(m.images),) * 2, dtype=np.int64)
            out[m.images, np.arange(len(m.images))] = m.scalars
            return out

        for i, d in self.differentials.items():
            if not is_zero(product(self.differential(i - 1), d)):
                msg = f"d o d is not zero in degree {i}"
                raise ValueError(msg)
            if not d.size:
                continue
            for g in self.group.generators:
                lhs = product(d, dense(i, g))
                rhs = product(dense(i - 1, g), d)
                if not is_zero(lhs - rhs):
                    msg = f"differential in degree {i} is not equivariant"
                    raise ValueError(msg)


def base_change(c: PermComplex, spec: CoeffSpec) -> MatrixComplex:
    """Λ ⊗ C (G×T の作用付き)"""
    group = product_group(c.g_group, c.t_group)
    nt = c.t_group.order
    if spec.kind == "integers":
        diffs = {
            i: d.toarray().astype(np.int64)
            for i, d in c.differentials.items()
        }

        def ones(n: int) -> np.ndarray:
            return np.ones(n, dtype=np.int64)

    else:
        ops = spec.matrices()
        diffs = {
            i: ops.asarray(d.toarray().tolist())
            for i, d in c.differentials.items()
        }

        def ones(n: int) -> np.ndarray:
            return ops.vector([1] * n)

    def action(i: int, element: int) -> Monomial:
        g, t = divmod(element, nt)
        term = c.terms[i]
        return Monomial(term.t_action[t][term.g_action[g]], ones(term.size))

    ranks = {i: term.size for i, term in c.terms.items()}
    degrees = c.degrees or [0]
    out = MatrixComplex(
        spec, group, ranks, diffs, action, (degrees[0], degrees[-1])
    )
    out.verify()
    return out


@dataclass(frozen=True, slots=True)
class _Twist:
    """U 軌道の基点と θ による係数 ([x] = θ(t_x)[b_x])"""

    base: np.ndarray
    roots: tuple[RootOfUnity, ...]
    columns: dict[int, int]


def _twist(
    term: PermTerm, theta: AbChar, members: Sequence[int]
) -> _Twist:
    n = term.size
    elements = theta.domain.elements()
    act = term.t_action[list(members)]
    base = act.min(axis=0) if len(members) else np.arange(n)
    t_of = np.full(n, -1, dtype=np.int64)
    for row, u in zip(act, members):
        hit = (row[base] == np.arange(n)) & (t_of < 0)
        t_of[hit] = u
    value = {u: theta(elements[u]) for u in members}
    roots = tuple(value[int(u)] for u in t_of)
    bases = np.unique(base)
    alive = np.ones(len(bases), dtype=bool)
    for row, u in zip(act, members):
        if not value[u].is_identity():
            alive &= row[bases] != bases
    columns = {int(b): j for j, b in enumerate(bases[alive])}
    return _Twist(base, roots, columns)


class _Converter:
    """RootOfUnity から体の元への変換 (結果を覚えておく)"""

    def __init__(self: "_Converter", ops: Matrices) -> None:
        self.ops = ops
        self.cache: dict[RootOfUnity, object] = {}

    def __call__(self: "_Converter", r: RootOfUnity) -> object:
        if r not in self.cache:
            self.cache[r] = self.ops.root(r)
        return self.cache[r]


def _twisted_differential(
    d: sparse.csr_array,
    source: _Twist,
    target: _Twist,
    ops: Matrices,
    convert: _Converter,
) -> np.ndarray:
    out = ops.zeros(len(target.columns), len(source.columns))
    coo = d.tocoo()
    for r, c, v in zip(coo.row, coo.col, coo.data):
        j = source.columns.get(int(c))
        i = target.columns.get(int(target.base[r]))
        if i is None or j is None:
            continue
        out[i, j] += ops.scalar(int(v)) * convert(target.roots[r])
    return out


def _twisted_action(
    twist: _Twist, perm: np.ndarray, ops: Matrices, convert: _Converter
) -> Monomial:
    images = np.empty(len(twist.columns), dtype=np.int64)
    scalars = []
    for b, j in twist.columns.items():
        y = int(perm[b])
        images[j] = twist.columns[int(twist.base[y])]
        scalars.append(convert(twist.roots[y]))
    return Monomial(images, ops.vector(scalars))


@dataclass(frozen=True, slots=True, eq=False)
class _Coinvariants:
    ranks: dict[int, int]
    differentials: dict[int, np.ndarray]
    g_action: Callable[[int, int], Monomial]
    t_action: Callable[[int, int], Monomial]


def _check_theta(c: PermComplex, theta: AbChar, spec: CoeffSpec) -> None:
    if theta.domain != c.t_group:
        msg = "character is not defined on T"
        raise ValueError(msg)
    if spec.kind == "finite":
        ell = spec.ell or 0
        if not all(is_ell_regular(v, ell) for v in theta.values):
            msg = f"character does not take {ell}'-order values"
            raise ValueError(msg)


def _coinvariants(
    c: PermComplex, theta: AbChar, ops: Matrices, members: Sequence[int]
) -> _Coinvariants:
    convert = _Converter(ops)
    twists = {i: _twist(term, theta, members) for i, term in c.terms.items()}
    diffs = {
        i: _twisted_differential(d, twists[i], twists[i - 1], ops, convert)
        for i, d in c.differentials.items()
    }

    def g_action(i: int, g: int) -> Monomial:
        perm = c.terms[i].g_action[g]
        return _twisted_action(twists[i], perm, ops, convert)

    def t_action(i: int, t: int) -> Monomial:
        perm = c.terms[i].t_action[t]
        return _twisted_action(twists[i], perm, ops, convert)

    ranks = {i: len(tw.columns) for i, tw in twists.items()}
    return _Coinvariants(ranks, diffs, g_action, t_action)


def isotypic(c: PermComplex, theta: AbChar, spec: CoeffSpec) -> MatrixComplex:
    """θ-isotypic 成分 Λ_θ ⊗_{Λ[T]} C (G の作用付き)

    基底は安定化群が ker θ に含まれる T 軌道の基点で、[t·x] = θ(t)[x]。
    """
    _check_theta(c, theta, spec)
    ops = spec.matrices()
    co = _coinvariants(c, theta, ops, range(c.t_group.order))
    degrees = c.degrees or [0]
    out = MatrixComplex(
        spec,
        c.g_group,
        co.ranks,
        co.differentials,
        co.g_action,
        (degrees[0], degrees[-1]),
    )
    out.verify()
    return out


@dataclass(frozen=True, slots=True)
class FreeResolution:
    """F[S] 上の自明加群の極小自由分解

    boundaries[j-1] は ∂_j: F[S]^{r_j} → F[S]^{r_{j-1}} を群環の元の行列
    (形 (r_{j-1}, r_j, |S|)) で表す。
    """

    group: FinAb
    ranks: tuple[int, ...]
    boundaries: tuple[np.ndarray, ...]


def _translate(
    v: np.ndarray, s: int, table: np.ndarray, order: int
) -> np.ndarray:
    """F[S]^r の元に s を掛ける"""
    blocks = v.reshape(-1, order)
    out = blocks.copy()
    out[:, table[s]] = blocks
    return out.reshape(-1)


def minimal_resolution(
    group: FinAb, ops: FiniteFieldMatrices, length: int
) -> FreeResolution:
    """F[S] (S は ℓ 群) 上の自明加群 F の極小自由分解

    核を順に求め、生成元は J·K (J は添加イデアル) の基底を延長して選ぶ。

    Examples
    --------
    >>> ops = FiniteFieldMatrices(make_field(3, 1))
    >>> minimal_resolution(FinAb((3,)), ops, 4).ranks
    (1, 1, 1, 1, 1)
    >>> ops2 = FiniteFieldMatrices(make_field(2, 1))
    >>> minimal_resolution(FinAb((2, 2)), ops2, 3).ranks
    (1, 2, 3, 4)
    """
    order = group.order
    table = abelian_group(group).table
    gens = [group.index(b) for b in group.basis()]
    ranks = [1]
    boundaries = []
    kernel = ops.null_space(ops.asarray([[1] * order]))
    for _ in range(length):
        if kernel.shape[1] == 0:
            break
        moved = [
            _translate(kernel[:, k], s, table, order) - kernel[:, k]
            for s in gens
            for k in range(kernel.shape[1])
        ]
        radical = (
            ops.field.gf(np.stack([m.view(np.ndarray) for m in moved], 1))
            if moved
            else ops.zeros(kernel.shape[0], 0)
        )
        radical = independent_columns(ops, radical)
        chosen = extend_basis(ops, radical, kernel)
        r_prev, r = ranks[-1], chosen.shape[1]
        boundaries.append(
            chosen.T.reshape(r, r_prev, order).transpose(1, 0, 2).copy()
        )
        ranks.append(r)
        columns = [
            _translate(chosen[:, m], s, table, order)
            for m in range(r)
            for s in range(order)
        ]
        linear = ops.field.gf(
            np.stack([col.view(np.ndarray) for col in columns], 1)
        )
        kernel = ops.null_space(linear)
    return FreeResolution(group, tuple(ranks), tuple(boundaries))


def _ell_parts(
    t_group: FinAb, ell: int
) -> tuple[list[int], FinAb, list[int]]:
    """T_ℓ' の元の番号、T_ℓ、T_ℓ の元の T での番号"""
    elements = t_group.elements()
    prime_part = [
        i
        for i, t in enumerate(elements)
        if t_group.element_order(t) % ell != 0
    ]
    gens = [
        t_group.scale(d // ell_part(d, ell), b)
        for d, b in zip(t_group.invariant_factors, t_group.basis())
    ]
    s_group, inclusion = subgroup(t_group, gens)
    s_in_t = [
        t_group.index(inclusion.apply(s)) for s in s_group.elements()
    ]
    return prime_part, s_group, s_in_t


def derived_isotypic(
    c: PermComplex, theta: AbChar, spec: CoeffSpec, truncation: int
) -> MatrixComplex:
    """導来 isotypic 成分 F_θ ⊗^L_{F[T]} C

    F[T_ℓ'] は半単純なので T_ℓ' については通常の余不変量をとり、
    T_ℓ については自明加群の極小自由分解との全複体をとる。

    Parameters
    ----------
    c : PermComplex
        複体
    theta : AbChar
        T の ℓ' 値の指標
    spec : CoeffSpec
        有限体の係数
    truncation : int
        分解の長さ

    Returns
    -------
    MatrixComplex
        全複体 (valid の範囲でホモロジーが正しい)

    Raises
    ------
    ValueError
        係数が有限体でない、または truncation が C の長さより短い時に送出
    """
    if spec.kind != "finite":
        msg = "derived isotypic parts need finite field coefficients"
        raise ValueError(msg)
    _check_theta(c, theta, spec)
    degrees = c.degrees or [0]
    low, high = degrees[0], degrees[-1]
    reached = low + truncation - 1
    if reached < high:
        msg = (
            f"truncation {truncation} only reaches degree {reached}, "
            f"below the top degree {high}"
        )
        raise ValueError(msg)
    ops = spec.matrices()
    if not isinstance(ops, FiniteFieldMatrices):
        msg = "derived isotypic parts need finite field coefficients"
        raise TypeError(msg)
    ell = spec.ell or 0
    prime_part, s_group, s_in_t = _ell_parts(c.t_group, ell)
    co = _coinvariants(c, theta, ops, prime_part)
    res = minimal_resolution(s_group, ops, truncation)
    # Tot_N = ⊕_{i+j=N} (C'_i)^{r_j}
    blocks: dict[int, list[tuple[int, int, int]]] = {}
    for i in sorted(co.ranks):
        for j, r in enumerate(res.ranks):
            for k in range(r):
                blocks.setdefault(i + j, []).append((i, j, k))
    offsets: dict[tuple[int, int, int], int] = {}
    ranks: dict[int, int] = {}
    for total, parts in blocks.items():
        pos = 0
        for part in parts:
            offsets[part] = pos
            pos += co.ranks[part[0]]
        ranks[total] = pos

    def rho(i: int, element: np.ndarray) -> np.ndarray:
        """群環の元 Σ a_s s の C'_i への作用"""
        out = ops.zeros(co.ranks[i], co.ranks[i])
        for s in np.flatnonzero(element.view(np.ndarray)):
            m = co.t_action(i, s_in_t[int(s)])
            cols = np.arange(len(m.images))
            out[m.images, cols] += element[s] * m.scalars
        return out

    diffs: dict[int, np.ndarray] = {}
    for total in blocks:
        if total - 1 not in blocks:
            continue
        d = ops.zeros(ranks[total - 1], ranks[total])
        for i, j, k in blocks[total]:
            n_i = co.ranks[i]
            if not n_i:
                continue
            col = offsets[(i, j, k)]
            if (i - 1, j, k) in offsets and i in co.differentials:
                row = offsets[(i - 1, j, k)]
                block = co.differentials[i]
                d[row : row + block.shape[0], col : col + n_i] = block
            if j > 0:
                boundary = res.boundaries[j - 1]
                sign = ops.scalar(-1 if i % 2 else 1)
                for m in range(boundary.shape[0]):
                    entry = boundary[m, k]
                    if not np.count_nonzero(entry.view(np.ndarray)):
                        continue
                    row = offsets[(i, j - 1, m)]
                    d[row : row + n_i, col : col + n_i] += sign * rho(
                        i, entry
                    )
        diffs[total] = d

    def action(total: int, g: int) -> Monomial:
        return _block_monomial(
            ops, [co.g_action(i, g) for i, _, _ in blocks[total]]
        )

    logger.debug(
        "derived isotypic part: resolution ranks %s, total ranks %s",
        res.ranks,
        ranks,
    )
    out = MatrixComplex(spec, c.g_group, ranks, diffs, action, (low, reached))
    out.verify()
    return out


def _induced_trace(
    m: MatrixComplex,
    ops: Matrices,
    i: int,
    classes: np.ndarray,
    left: np.ndarray,
    skip: int,
    g: int,
) -> CycloNumber:
    """g が H_i に誘導する写像の (Brauer) トレース"""
    moved = m.action(i, g).apply(ops, classes)
    block = ops.matmul(left, moved)[skip:, :]
    if isinstance(ops, FiniteFieldMatrices):
        return brauer_value(
            block,
            int(m.group.orders[g]),
            ops.field,
            degree_cap=EXTENSION_DEGREE_CAP,
        )
    return ops.trace(block)


def homology(m: MatrixComplex) -> dict[int, GClass]:
    """各次数のホモロジーの K_0 での類

    標数0では作用のトレース、mod ℓ では Brauer 指標を返す。

    Raises
    ------
    ValueError
        係数が整数の時に送出
    """
    ops = m.spec.matrices()
    coefficient = m.spec.coefficient
    low, high = m.valid
    out = {}
    for i in range(low, high + 1):
        n_i = m.rank(i)
        if n_i == 0:
            out[i] = GClass.zero(m.group, coefficient)
            continue
        cycles = ops.null_space(m.differential(i))
        boundaries = independent_columns(ops, m.differential(i + 1))
        classes = extend_basis(ops, boundaries, cycles)
        h = classes.shape[1]
        if h == 0:
            out[i] = GClass.zero(m.group, coefficient)
            continue
        left = left_inverse(ops, ops.hstack(boundaries, classes))
        value = partial(
            _induced_trace, m, ops, i, classes, left, boundaries.shape[1]
        )
        out[i] = GClass.from_function(m.group, coefficient, value)
    return out


@dataclass(frozen=True, slots=True)
class IntegralHomology:
    """H_i(C; Z) = Z^rank ⊕ torsion"""

    degree: int
    rank: int
    torsion: FinAb


def integral_homology(c: PermComplex) -> list[IntegralHomology]:
    """Smith 標準形による整係数ホモロジー

    Examples
    --------
    >>> from ellchar_lib.ggroup import cyclic_group
    >>> T = FinAb((3,))
    >>> C = PermComplex.build(
    ...     cyclic_group(1), T, {1: [[(0, (0,))]], 0: [[(0, (0,))]]},
    ...     {(1, 0, 0): {0: 1, 1: -1}},
    ... )
    >>> [(h.rank, str(h.torsion)) for h in integral_homology(C)]
    [(1, '1'), (1, '1')]
    """

    def elementary(i: int) -> list[int]:
        d = c.differential(i).toarray()
        if d.size == 0:
            return []
        return [x for x in smith_normal_form(d.tolist()).diagonal if x]

    out = []
    for i in c.degrees:
        incoming = elementary(i + 1)
        rank = c.size(i) - len(elementary(i)) - len(incoming)
        torsion = tuple(sorted(abs(x) for x in incoming if abs(x) > 1))
        out.append(IntegralHomology(i, rank, FinAb(torsion)))
    return out


def euler_class(
    c: PermComplex, spec: CoeffSpec, theta: AbChar | None = None
) -> GClass:
    """Σ (-1)^i [C_i] を Hopf のトレース公式で求める

    theta を与えると G 上の θ-isotypic 部分の類、与えなければ G×T 上の
    類を返す。mod ℓ では各項が F[T] 上射影的である必要がある。

    Examples
    --------
    >>> from ellchar_lib.ggroup import cyclic_group
    >>> T = FinAb((3,))
    >>> C = PermComplex.build(cyclic_group(1), T, {0: [[(0, (0,))]]})
    >>> euler_class(C, CoeffSpec.cyclotomic(3)).values[0]
    CycloNumber(3)
    """
    coefficient = spec.coefficient
    if theta is None:
        group = product_group(c.g_group, c.t_group)
        nt = c.t_group.order

        def fixed(element: int) -> int:
            g, t = divmod(element, nt)
            total = 0
            for i, term in c.terms.items():
                moved = term.t_action[t][term.g_action[g]]
                count = int(np.count_nonzero(moved == np.arange(term.size)))
                total += -count if i % 2 else count
            return total

        return GClass.from_function(group, coefficient, fixed)
    _check_theta(c, theta, spec)
    if spec.kind == "finite" and not c.is_t_projective(spec.ell or 0):
        msg = "terms are not projective over F[T]"
        raise ValueError(msg)
    twists = {
        i: _twist(term, theta, range(c.t_group.order))
        for i, term in c.terms.items()
    }

    def trace(g: int) -> CycloNumber:
        counts: dict[RootOfUnity, int] = {}
        for i, tw in twists.items():
            perm = c.terms[i].g_action[g]
            sign = -1 if i % 2 else 1
            for b in tw.columns:
                y = int(perm[b])
                if int(tw.base[y]) == b:
                    r = tw.roots[y]
                    counts[r] = counts.get(r, 0) + sign
        return CycloNumber.from_roots(counts)

    return GClass.from_function(c.g_group, coefficient, trace)


def is_projective_perm(
    group: FinGroup, sub: Subgroup, field_spec: CoeffSpec
) -> bool:
    """F[G/H] が射影的か

    F[G] → F[G/H] の分裂、すなわち H 不変で剰余類 H に写る v ∈ F[G] の
    存在を一次方程式として解く。

    Examples
    --------
    >>> from ellchar_lib.ggroup import subgroup_generated, symmetric_group
    >>> S3 = symmetric_group(3)
    >>> H = subgroup_generated(S3, [1])
    >>> is_projective_perm(S3, H, CoeffSpec.finite(3))
    True
    >>> is_projective_perm(S3, H, CoeffSpec.finite(2))
    False
    """
    ops = field_spec.matrices()
    if sub.parent is not group:
        msg = "subgroup does not belong to the group"
        raise ValueError(msg)
    n = group.order
    rows: list[list[int]] = []
    rhs: list[int] = []
    members = [int(h) for h in sub.embedding]
    for h in sub.group.generators:
        hg = int(sub.embedding[h])
        # (h·v)_x = v_{h^{-1}x} = v_x
        for x in range(n):
            row = [0] * n
            row[int(group.table[int(group.inverse[hg]), x])] += 1
            row[x] -= 1
            rows.append(row)
            rhs.append(0)
    coset_of = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        if coset_of[x] < 0:
            coset_of[group.table[x, members]] = x
    for rep in np.unique(coset_of):
        rows.append([int(coset_of[x] == rep) for x in range(n)])
        rhs.append(int(rep == 0))
    a = ops.asarray(rows)
    augmented = ops.hstack(a, ops.asarray([[v] for v in rhs]))
    return ops.rank(a) == ops.rank(augmented)


def _random_stabilizer(
    g_group: FinGroup, t_group: FinAb, rng: np.random.Generator
) -> list[tuple[int, Coords]]:
    """K = {(h^k, k·t)} (λ: <h> → T は h ↦ t)"""
    h = int(rng.integers(g_group.order))
    e = int(g_group.orders[h])
    candidates = [
        t for t in t_group.elements() if e % t_group.element_order(t) == 0
    ]
    t = candidates[int(rng.integers(len(candidates)))]
    pairs = []
    power = 0
    for k in range(e):
        pairs.append((power, t_group.scale(k, t)))
        power = g_group.mul(power, h)
    return pairs


def _invariant_vector(
    orbit: Orbit,
    stabilizer: Sequence[tuple[int, Coords]],
    t_group: FinAb,
    rng: np.random.Generator,
) -> dict[int, int]:
    """K 不変なベクトル (K 軌道の和の整数結合)"""
    vector: dict[int, int] = {}
    for _ in range(int(rng.integers(1, 3))):
        start = int(rng.integers(orbit.size))
        coeff = int(rng.choice([-2, -1, 1, 2]))
        for x in {
            orbit.act(g, t_group.index(t), start) for g, t in stabilizer
        }:
            vector[x] = vector.get(x, 0) + coeff
    return vector


def make_torsor_complex(
    g_group: FinGroup, t_group: FinAb, seed: int = 0, *, pieces: int = 3
) -> PermComplex:
    """T が自由に作用する無作為な置換複体

    安定化群は K = {(h, λ(h))} (H ≤ G は巡回、λ: H → T) の形なので
    K ∩ T = 1。1項の軌道、2項の同変写像、可縮な恒等写像を直和する。

    Examples
    --------
    >>> from ellchar_lib.ggroup import symmetric_group
    >>> C = make_torsor_complex(symmetric_group(3), FinAb((2,)), seed=1)
    >>> C.is_t_free()
    True
    """
    rng = np.random.default_rng(seed)
    terms: dict[int, list[list[tuple[int, Coords]]]] = {}
    maps: dict[tuple[int, int, int], dict[int, int]] = {}

    def add(degree: int, stab: list[tuple[int, Coords]]) -> int:
        terms.setdefault(degree, []).append(stab)
        return len(terms[degree]) - 1

    for _ in range(pieces):
        kind = int(rng.integers(3))
        degree = int(rng.integers(0, 2))
        source_stab = _random_stabilizer(g_group, t_group, rng)
        if kind == 0:
            add(degree + int(rng.integers(0, 2)), source_stab)
            continue
        if kind == 1:
            target_stab = _random_stabilizer(g_group, t_group, rng)
            target = make_orbit(g_group, t_group, target_stab)
            vector = _invariant_vector(target, source_stab, t_group, rng)
        else:
            target_stab = source_stab
            vector = {0: 1}
        src = add(degree + 1, source_stab)
        dst = add(degree, target_stab)
        maps[(degree + 1, src, dst)] = vector
    return PermComplex.build(g_group, t_group, terms, maps)

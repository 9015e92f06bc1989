"""有限群 (乗積表) と Grothendieck 群 K_0 の元

群は乗積表 (numpy 配列) で持ち、単位元は常に 0 番目に置く。共役類は最小の
元の順に並べるので、単位元の類は常に先頭になる。K_0 の元は類関数で表し、
標数0では全ての共役類上の指標、mod ℓ では ℓ 正則な共役類上の Brauer 指標
(Teichmüller 持ち上げで複素数とみなした値) を持つ。
"""

import logging
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass, field
from functools import cache
from itertools import permutations
from math import lcm, prod
from typing import TypedDict, cast

import galois
import numpy as np

from ellchar_lib.cyclo import (
    Coefficient,
    CoefficientDict,
    CycloNumber,
    CycloNumberDict,
    RootOfUnity,
    Scalar,
    is_ell_regular,
)
from ellchar_lib.fgab import AbChar, FinAb
from ellchar_lib.fields import (
    FiniteField,
    embed_array,
    make_field,
    root_of_unity,
    splitting_degree,
)
from ellchar_lib.limits import (
    ENUMERATION_CAP,
    EXTENSION_DEGREE_CAP,
    GROUP_ORDER_CAP,
    check_cap,
)
from ellchar_lib.torus import prime_power

logger = logging.getLogger(__name__)


class FinGroupDict(TypedDict):
    name: str
    table: list[list[int]]


@dataclass(frozen=True, slots=True, eq=False)
class FinGroup:
    """乗積表で与えた有限群

    Examples
    --------
    >>> S3 = symmetric_group(3)
    >>> S3.order, len(S3.classes)
    (6, 3)
    >>> [len(c) for c in S3.classes]
    [1, 3, 2]
    """

    name: str
    table: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)
    classes: tuple[tuple[int, ...], ...] = field(repr=False)
    class_of: np.ndarray = field(repr=False)
    orders: np.ndarray = field(repr=False)
    generators: tuple[int, ...] = field(repr=False)
    labels: tuple[Hashable, ...] | None = field(default=None, repr=False)
    factors: tuple["FinGroup", "FinGroup"] | None = field(
        default=None, repr=False
    )

    @classmethod
    def from_table(
        cls: type["FinGroup"],
        table: Sequence[Sequence[int]] | np.ndarray,
        *,
        name: str = "G",
        labels: Sequence[Hashable] | None = None,
        factors: tuple["FinGroup", "FinGroup"] | None = None,
        cap: int = GROUP_ORDER_CAP,
    ) -> "FinGroup":
        """乗積表から群を作る

        Latin 方陣であること、単位元の存在、生成元に対する Light の
        結合律判定を確かめる。単位元が 0 番目でなければ並べ替える。

        Parameters
        ----------
        table : Sequence[Sequence[int]] | np.ndarray
            table[a][b] = a·b
        name : str, optional
            表示用の名前
        labels : Sequence[Hashable] | None, optional
            元のラベル
        factors : tuple[FinGroup, FinGroup] | None, optional
            直積として作った時の因子
        cap : int, optional
            位数の上限

        Returns
        -------
        FinGroup
            群

        Raises
        ------
        ValueError
            表が群の乗積表でない時に送出
        """
        t = np.array(table, dtype=np.int64)
        square = t.ndim == 2 and t.shape[0] == t.shape[-1]  # noqa: PLR2004
        if not square or not len(t):
            msg = "multiplication table must be a non-empty square array"
            raise ValueError(msg)
        n = t.shape[0]
        check_cap(n, cap, "group")
        if labels is not None and len(labels) != n:
            msg = "one label per element is required"
            raise ValueError(msg)
        if t.min() < 0 or t.max() >= n:
            msg = "multiplication table has entries out of range"
            raise ValueError(msg)
        full = np.arange(n)
        if not (
            (np.sort(t, axis=0) == full[:, None]).all()
            and (np.sort(t, axis=1) == full).all()
        ):
            msg = "multiplication table is not a Latin square"
            raise ValueError(msg)
        ids = [
            e
            for e in range(n)
            if (t[e] == full).all() and (t[:, e] == full).all()
        ]
        if not ids:
            msg = "multiplication table has no identity"
            raise ValueError(msg)
        if (e := ids[0]) != 0:
            perm = full.copy()
            perm[[0, e]] = [e, 0]
            t = perm[t[np.ix_(perm, perm)]]
            if labels is not None:
                labels = [labels[i] for i in perm]
        generators = _generating_set(t)
        for g in generators:
            if not (t[t[:, g], :] == t[:, t[g, :]]).all():
                msg = "multiplication table is not associative"
                raise ValueError(msg)
        inverse = np.argmax(t == 0, axis=1)
        classes, class_of = _conjugacy_classes(t, inverse)
        orders = _element_orders(t)
        for array in (t, inverse, class_of, orders):
            array.setflags(write=False)
        return cls(
            name,
            t,
            inverse,
            classes,
            class_of,
            orders,
            generators,
            None if labels is None else tuple(labels),
            factors,
        )

    @property
    def order(self: "FinGroup") -> int:
        return len(self.table)

    @property
    def exponent(self: "FinGroup") -> int:
        return lcm(*(int(o) for o in self.orders))

    def mul(self: "FinGroup", a: int, b: int) -> int:
        return int(self.table[a, b])

    def representative(self: "FinGroup", c: int) -> int:
        return self.classes[c][0]

    def is_abelian(self: "FinGroup") -> bool:
        return len(self.classes) == self.order

    def ell_regular_classes(self: "FinGroup", ell: int) -> tuple[int, ...]:
        return tuple(
            i
            for i, c in enumerate(self.classes)
            if int(self.orders[c[0]]) % ell != 0
        )

    def __repr__(self: "FinGroup") -> str:
        return f"FinGroup({self.name}, order={self.order})"

    def to_dict(self: "FinGroup") -> FinGroupDict:
        return {"name": self.name, "table": self.table.tolist()}

    @classmethod
    def from_dict(cls: type["FinGroup"], data: FinGroupDict) -> "FinGroup":
        return cls.from_table(data["table"], name=data["name"])


def _closure(table: np.ndarray, gens: Sequence[int]) -> np.ndarray:
    """生成する部分群の元を表すマスク"""
    mask = np.zeros(len(table), dtype=bool)
    mask[0] = True
    frontier = np.array([0])
    columns = np.asarray(list(gens), dtype=np.int64)
    while frontier.size:
        images = np.unique(table[np.ix_(frontier, columns)])
        frontier = images[~mask[images]]
        mask[frontier] = True
    return mask


def _generating_set(table: np.ndarray) -> tuple[int, ...]:
    gens: list[int] = []
    mask = _closure(table, gens)
    for x in range(len(table)):
        if not mask[x]:
            gens.append(x)
            mask = _closure(table, gens)
    return tuple(gens)


def _conjugacy_classes(
    table: np.ndarray, inverse: np.ndarray
) -> tuple[tuple[tuple[int, ...], ...], np.ndarray]:
    class_of = np.full(len(table), -1, dtype=np.int64)
    classes: list[tuple[int, ...]] = []
    for x in range(len(table)):
        if class_of[x] >= 0:
            continue
        # g x g^{-1} を全ての g について
        conj = np.unique(table[table[:, x], inverse])
        class_of[conj] = len(classes)
        classes.append(tuple(int(y) for y in conj))
    return tuple(classes), class_of


def _element_orders(table: np.ndarray) -> np.ndarray:
    idx = np.arange(len(table))
    orders = np.zeros(len(table), dtype=np.int64)
    power, k = idx.copy(), 1
    while (orders == 0).any():
        orders[(power == 0) & (orders == 0)] = k
        power = table[power, idx]
        k += 1
    return orders


def from_permutations(
    gens: Sequence[Sequence[int]],
    *,
    name: str = "G",
    cap: int = GROUP_ORDER_CAP,
) -> FinGroup:
    """置換で生成される群 (積は合成 (στ)(i) = σ(τ(i)))

    Examples
    --------
    >>> from_permutations([[1, 2, 0]]).order
    3
    """
    degree = len(gens[0]) if gens else 1
    for g in gens:
        if sorted(g) != list(range(degree)):
            msg = f"{list(g)} is not a permutation of {degree} points"
            raise ValueError(msg)
    identity = tuple(range(degree))
    elements = [identity]
    seen = {identity}
    i = 0
    while i < len(elements):
        x = elements[i]
        for g in gens:
            y = tuple(x[j] for j in g)
            if y not in seen:
                seen.add(y)
                elements.append(y)
                check_cap(len(elements), cap, "group")
        i += 1
    perms = np.array(elements, dtype=np.int64)
    n = len(perms)
    composed = perms[np.arange(n)[:, None, None], perms[None, :, :]]
    weights = degree ** np.arange(degree, dtype=np.int64)
    codes = perms @ weights
    order = np.argsort(codes)
    positions = np.searchsorted(codes[order], composed @ weights)
    return FinGroup.from_table(
        order[positions], name=name, labels=elements, cap=cap
    )


def cyclic_group(n: int) -> FinGroup:
    idx = np.arange(n)
    return FinGroup.from_table(
        np.add.outer(idx, idx) % n, name=f"C{n}", labels=range(n)
    )


def abelian_group(group: FinAb) -> FinGroup:
    """FinAb を乗積表にする (ラベルは座標、順序は FinAb.index)

    Examples
    --------
    >>> G = abelian_group(FinAb((2, 2)))
    >>> G.labels[3], G.is_abelian()
    ((1, 1), True)
    """
    elements = group.elements()
    coords = np.array(elements, dtype=np.int64).reshape(
        len(elements), group.rank
    )
    factors = np.array(group.invariant_factors, dtype=np.int64)
    weights = np.array(
        [prod(group.invariant_factors[j + 1 :]) for j in range(group.rank)],
        dtype=np.int64,
    )
    sums = (coords[:, None, :] + coords[None, :, :]) % factors
    return FinGroup.from_table(
        sums @ weights, name=str(group), labels=elements
    )


def symmetric_group(n: int) -> FinGroup:
    if n < 2:  # noqa: PLR2004
        return from_permutations([], name=f"S{n}")
    swap = [1, 0, *range(2, n)]
    cycle = [*range(1, n), 0]
    return from_permutations([swap, cycle], name=f"S{n}")


def alternating_group(n: int) -> FinGroup:
    gens = []
    for i in range(2, n):
        g = list(range(n))
        g[0], g[1], g[i] = 1, i, 0
        gens.append(g)
    return from_permutations(gens, name=f"A{n}")


def dihedral_group(n: int) -> FinGroup:
    """位数 2n の二面体群"""
    if n < 3:  # noqa: PLR2004
        msg = "dihedral groups need at least 3 vertices"
        raise ValueError(msg)
    rotation = [(i + 1) % n for i in range(n)]
    reflection = [(-i) % n for i in range(n)]
    return from_permutations([rotation, reflection], name=f"D{2 * n}")


def quaternion_group() -> FinGroup:
    i = [1, 2, 3, 0, 5, 6, 7, 4]
    j = [4, 7, 6, 5, 2, 1, 0, 3]
    return from_permutations([i, j], name="Q8")


def direct_product(
    left: FinGroup, right: FinGroup, *, cap: int = GROUP_ORDER_CAP
) -> FinGroup:
    """直積 (元 (g, t) の番号は g·|right| + t)"""
    nl, nr = left.order, right.order
    check_cap(nl * nr, cap, "group")
    table = (
        left.table[:, None, :, None] * nr + right.table[None, :, None, :]
    ).reshape(nl * nr, nl * nr)
    labels = [(g, t) for g in range(nl) for t in range(nr)]
    return FinGroup.from_table(
        table,
        name=f"{left.name} x {right.name}",
        labels=labels,
        factors=(left, right),
        cap=cap,
    )


def _parity(perm: Sequence[int]) -> int:
    return (
        sum(
            1
            for i in range(len(perm))
            for j in range(i + 1, len(perm))
            if perm[i] > perm[j]
        )
        % 2
    )


def _ring_tables(f: FiniteField, h: int) -> tuple[np.ndarray, np.ndarray]:
    """F_q[ϖ]/ϖ^h の加法表と乗法表"""
    q = f.order
    size = q**h
    weights = q ** np.arange(h, dtype=np.int64)
    digits = (np.arange(size)[:, None] // weights) % q
    d = f.gf(digits)
    add = (d[:, None, :] + d[None, :, :]).view(np.ndarray) @ weights
    mul = f.gf.Zeros((size, size, h))
    for i in range(h):
        for j in range(h - i):
            mul[:, :, i + j] += d[:, None, i] * d[None, :, j]
    return add, mul.view(np.ndarray) @ weights


def gl_truncated(
    q: int, n: int, h: int, *, cap: int = GROUP_ORDER_CAP
) -> FinGroup:
    """GL_n(F_q[ϖ]/ϖ^h)

    行列の成分は F_q[ϖ]/ϖ^h の元を整数 Σ a_i q^i (a_i は F_q の元の整数
    表現) で表す。ラベルは成分のタプルのタプル。

    Examples
    --------
    >>> gl_truncated(2, 2, 1).order
    6
    >>> gl_truncated(2, 2, 2).order
    96
    >>> gl_truncated(3, 1, 1).is_abelian()
    True
    """
    p, e = prime_power(q)
    if n < 1 or h < 1:
        msg = "n and h must be positive"
        raise ValueError(msg)
    finite_order = prod(q**n - q**i for i in range(n))
    check_cap(finite_order * q ** (n * n * (h - 1)), cap, "group")
    f = make_field(p, e)
    size = q**h
    check_cap(size ** (n * n), ENUMERATION_CAP, "matrix ring")
    add, mul = _ring_tables(f, h)
    grid = np.indices((size,) * (n * n)).reshape(n * n, -1).T
    red = f.gf(grid % q).reshape(-1, n, n)
    det = f.gf.Zeros(len(grid))
    for perm in permutations(range(n)):
        term = f.gf.Ones(len(grid))
        for i, j in enumerate(perm):
            term = term * red[:, i, j]
        det = det - term if _parity(perm) else det + term
    units = grid[det != 0]
    identity = np.eye(n, dtype=np.int64).ravel()
    first = int(np.flatnonzero((units == identity).all(axis=1))[0])
    units[[0, first]] = units[[first, 0]]
    m = len(units)
    mats = units.reshape(m, n, n)
    weights = size ** np.arange(n * n, dtype=np.int64)
    codes = units @ weights
    order = np.argsort(codes)
    sorted_codes = codes[order]
    table = np.empty((m, m), dtype=np.int64)
    block = 256
    for start in range(0, m, block):
        a = mats[start : start + block]
        c = np.empty((len(a), m, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                acc = np.zeros((len(a), m), dtype=np.int64)
                for k in range(n):
                    acc = add[acc, mul[a[:, None, i, k], mats[None, :, k, j]]]
                c[:, :, i, j] = acc
        products = c.reshape(len(a), m, n * n) @ weights
        table[start : start + block] = order[
            np.searchsorted(sorted_codes, products)
        ]
    labels = [tuple(tuple(int(x) for x in row) for row in a) for a in mats]
    logger.debug("built GL_%d over F_%d[t]/t^%d of order %d", n, q, h, m)
    return FinGroup.from_table(
        table, name=f"GL{n}(F{q}[t]/t^{h})", labels=labels, cap=cap
    )


def gl_reduction(
    source: FinGroup, target: FinGroup, modulus: int
) -> np.ndarray:
    """GL_n(O/ϖ^{h'}) → GL_n(O/ϖ^h) (modulus = q^h) を元の番号で表す"""
    if source.labels is None or target.labels is None:
        msg = "reduction needs matrix labels on both groups"
        raise ValueError(msg)
    index = {label: i for i, label in enumerate(target.labels)}
    images = np.empty(source.order, dtype=np.int64)
    for i, label in enumerate(source.labels):
        matrix = cast("tuple[tuple[int, ...], ...]", label)
        reduced = tuple(tuple(x % modulus for x in row) for row in matrix)
        if reduced not in index:
            msg = "source matrices do not reduce into the target group"
            raise ValueError(msg)
        images[i] = index[reduced]
    return images


@dataclass(frozen=True, slots=True, eq=False)
class Subgroup:
    """部分群 H ≤ G と包含写像 (embedding[h] は G での番号)"""

    parent: FinGroup
    group: FinGroup
    embedding: np.ndarray = field(repr=False)

    @property
    def order(self: "Subgroup") -> int:
        return self.group.order

    @property
    def index(self: "Subgroup") -> int:
        return self.parent.order // self.group.order


def _subgroup_from_mask(
    parent: FinGroup, mask: np.ndarray, name: str
) -> Subgroup:
    members = np.flatnonzero(mask)
    position = np.full(parent.order, -1, dtype=np.int64)
    position[members] = np.arange(len(members))
    table = position[parent.table[np.ix_(members, members)]]
    labels = (
        None
        if parent.labels is None
        else [parent.labels[i] for i in members]
    )
    group = FinGroup.from_table(table, name=name, labels=labels)
    return Subgroup(parent, group, members)


def subgroup_generated(
    parent: FinGroup, gens: Sequence[int], name: str = "H"
) -> Subgroup:
    """生成元で生成される部分群

    Examples
    --------
    >>> S3 = symmetric_group(3)
    >>> subgroup_generated(S3, [1]).index
    3
    """
    return _subgroup_from_mask(parent, _closure(parent.table, gens), name)


def all_subgroups(group: FinGroup) -> list[Subgroup]:
    """全ての部分群を位数の順に (巡回部分群の結びを繰り返して求める)

    Examples
    --------
    >>> len(all_subgroups(symmetric_group(3)))
    6
    >>> len(all_subgroups(quaternion_group()))
    6
    """
    cyclic = {
        frozenset(np.flatnonzero(_closure(group.table, [x])).tolist())
        for x in range(group.order)
    }
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for a in frontier:
            for c in cyclic:
                if c <= a:
                    continue
                mask = _closure(group.table, sorted(a | c))
                joined = frozenset(np.flatnonzero(mask).tolist())
                if joined not in found:
                    new.add(joined)
        found |= new
        frontier = new
    logger.debug("%s has %d subgroups", group.name, len(found))
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    subs = []
    for i, members in enumerate(ordered):
        mask = np.zeros(group.order, dtype=bool)
        mask[list(members)] = True
        subs.append(_subgroup_from_mask(group, mask, f"{group.name}.H{i}"))
    return subs


def group_corpus(max_order: int = 48) -> list[FinGroup]:
    """検証に使う小さな群の一覧"""
    groups = [cyclic_group(k) for k in range(1, 13)]
    groups += [
        abelian_group(FinAb((2, 2))),
        abelian_group(FinAb((2, 4))),
        abelian_group(FinAb((3, 3))),
        symmetric_group(3),
        dihedral_group(4),
        quaternion_group(),
        dihedral_group(6),
        alternating_group(4),
        symmetric_group(4),
        gl_truncated(3, 2, 1),
    ]
    return [g for g in groups if g.order <= max_order]


@cache
def class_indices(
    group: FinGroup, coefficient: Coefficient
) -> tuple[int, ...]:
    """K_0 の元が値を持つ共役類"""
    if coefficient.is_modular:
        return group.ell_regular_classes(coefficient.prime)
    return tuple(range(len(group.classes)))


@cache
def _class_positions(
    group: FinGroup, coefficient: Coefficient
) -> dict[int, int]:
    return {c: i for i, c in enumerate(class_indices(group, coefficient))}


class GClassDict(TypedDict):
    group: str
    coefficient: CoefficientDict
    representatives: list[int]
    values: list[CycloNumberDict]


@dataclass(frozen=True, slots=True, eq=False)
class GClass:
    """K_0(Λ[G]) の元 (類関数)

    values は class_indices(group, coefficient) の順に並ぶ。

    Examples
    --------
    >>> S3 = symmetric_group(3)
    >>> x = regular_class(S3, Coefficient.char0())
    >>> x.degree
    6
    >>> inner_product(x, GClass.trivial(S3, Coefficient.char0()))
    CycloNumber(1)
    """

    group: FinGroup
    coefficient: Coefficient
    values: tuple[CycloNumber, ...]

    def __post_init__(self: "GClass") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            値の個数が共役類の個数と合わない時に送出
        """
        expected = class_indices(self.group, self.coefficient)
        if len(self.values) != len(expected):
            msg = "one value per (ell-regular) conjugacy class is required"
            raise ValueError(msg)

    @classmethod
    def from_function(
        cls: type["GClass"],
        group: FinGroup,
        coefficient: Coefficient,
        f: Callable[[int], CycloNumber | Scalar],
    ) -> "GClass":
        """各共役類の代表元での値から作る"""
        values = []
        for c in class_indices(group, coefficient):
            v = f(group.representative(c))
            values.append(
                v if isinstance(v, CycloNumber) else CycloNumber.from_int(v)
            )
        return cls(group, coefficient, tuple(values))

    @classmethod
    def zero(
        cls: type["GClass"], group: FinGroup, coefficient: Coefficient
    ) -> "GClass":
        return cls.from_function(group, coefficient, lambda _: 0)

    @classmethod
    def trivial(
        cls: type["GClass"], group: FinGroup, coefficient: Coefficient
    ) -> "GClass":
        return cls.from_function(group, coefficient, lambda _: 1)

    @property
    def classes(self: "GClass") -> tuple[int, ...]:
        return class_indices(self.group, self.coefficient)

    def value_at(self: "GClass", element: int) -> CycloNumber:
        c = int(self.group.class_of[element])
        position = _class_positions(self.group, self.coefficient).get(c)
        if position is None:
            msg = f"element {element} is not ell-regular"
            raise ValueError(msg)
        return self.values[position]

    @property
    def degree(self: "GClass") -> int:
        """単位元での値 (仮想次元)"""
        value = self.values[0].rational_value()
        if value is None or value.denominator != 1:
            msg = "class function does not have an integral degree"
            raise ValueError(msg)
        return int(value)

    def _check(self: "GClass", other: "GClass") -> None:
        if other.group is not self.group:
            msg = "classes live on different groups"
            raise ValueError(msg)
        if other.coefficient != self.coefficient:
            msg = "classes have different coefficients"
            raise ValueError(msg)

    def __add__(self: "GClass", other: "GClass") -> "GClass":
        self._check(other)
        return GClass(
            self.group,
            self.coefficient,
            tuple(a + b for a, b in zip(self.values, other.values)),
        )

    def __neg__(self: "GClass") -> "GClass":
        return GClass(
            self.group, self.coefficient, tuple(-v for v in self.values)
        )

    def __sub__(self: "GClass", other: "GClass") -> "GClass":
        return self + (-other)

    def __mul__(self: "GClass", k: Scalar) -> "GClass":
        return GClass(
            self.group, self.coefficient, tuple(v * k for v in self.values)
        )

    __rmul__ = __mul__

    def __eq__(self: "GClass", other: object) -> bool:
        if not isinstance(other, GClass):
            return NotImplemented
        return (
            other.group is self.group
            and other.coefficient == self.coefficient
            and all(a == b for a, b in zip(self.values, other.values))
        )

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self: "GClass") -> bool:
        return all(v.is_zero() for v in self.values)

    def to_dict(self: "GClass") -> GClassDict:
        return {
            "group": self.group.name,
            "coefficient": self.coefficient.to_dict(),
            "representatives": [
                self.group.representative(c) for c in self.classes
            ],
            "values": [v.to_dict() for v in self.values],
        }


def regular_class(group: FinGroup, coefficient: Coefficient) -> GClass:
    return GClass.from_function(
        group, coefficient, lambda g: group.order if g == 0 else 0
    )


def inner_product(x: GClass, y: GClass) -> CycloNumber:
    """<x, y>_G (標数0のみ)"""
    x._check(y)  # noqa: SLF001
    if x.coefficient.is_modular:
        msg = "inner products are only defined in characteristic 0"
        raise ValueError(msg)
    total = CycloNumber.zero()
    for c, a, b in zip(x.classes, x.values, y.values):
        total += a * b.conjugate() * len(x.group.classes[c])
    return total / x.group.order


def decomposition_map(x: GClass, ell: int) -> GClass:
    """分解写像 d: K_0(Q̄_ℓ[G]) → K_0(F̄_ℓ[G])

    ℓ 正則な元での値への制限になる。

    Examples
    --------
    >>> S3 = symmetric_group(3)
    >>> d = decomposition_map(regular_class(S3, Coefficient.char0()), 3)
    >>> d.values
    (CycloNumber(6), CycloNumber(0))
    """
    if x.coefficient.is_modular:
        msg = "decomposition map takes characteristic 0 classes"
        raise ValueError(msg)
    target = Coefficient.mod(ell)
    return GClass.from_function(x.group, target, x.value_at)


def restrict(x: GClass, sub: Subgroup) -> GClass:
    if x.group is not sub.parent:
        msg = "class does not live on the parent group"
        raise ValueError(msg)
    return GClass.from_function(
        sub.group, x.coefficient, lambda h: x.value_at(int(sub.embedding[h]))
    )


def induce(sub: Subgroup, x: GClass) -> GClass:
    """Ind_H^G (Frobenius の公式)"""
    if x.group is not sub.group:
        msg = "class does not live on the subgroup"
        raise ValueError(msg)
    parent = sub.parent
    position = np.full(parent.order, -1, dtype=np.int64)
    position[sub.embedding] = np.arange(sub.order)
    idx = np.arange(parent.order)
    values = []
    for c in class_indices(parent, x.coefficient):
        g = parent.representative(c)
        # y^{-1} g y を全ての y について
        conj = parent.table[parent.table[parent.inverse, g], idx]
        inside = position[conj]
        counts = np.bincount(
            sub.group.class_of[inside[inside >= 0]],
            minlength=len(sub.group.classes),
        )
        total = CycloNumber.zero()
        for hc in np.flatnonzero(counts):
            h = sub.group.representative(int(hc))
            total += x.value_at(h) * int(counts[hc])
        values.append(total / sub.order)
    return GClass(parent, x.coefficient, tuple(values))


def permutation_character(
    sub: Subgroup, coefficient: Coefficient | None = None
) -> GClass:
    """[Λ[G/H]]"""
    coefficient = coefficient or Coefficient.char0()
    return induce(sub, GClass.trivial(sub.group, coefficient))


def brauer_value(
    matrix: galois.FieldArray,
    order: int,
    field: FiniteField,
    *,
    degree_cap: int = EXTENSION_DEGREE_CAP,
) -> CycloNumber:
    """位数 order (ℓ と素) の元の表現行列での Brauer 指標の値

    F_{ℓ^{k'}} (order | ℓ^{k'} - 1) に持ち上げ、各 ω^j の固有空間の次元を
    rank(M - ω^j) から求める。

    Raises
    ------
    ValueError
        order が ℓ で割れる、または行列が半単純でない時に送出
    """
    ell = field.characteristic
    dim = matrix.shape[0]
    if order == 1:
        return CycloNumber.from_int(dim)
    degree = lcm(field.degree, splitting_degree(order, ell))
    check_cap(degree, degree_cap, "extension degree")
    big = make_field(ell, degree)
    lifted = embed_array(field.gf(matrix), field, big)
    omega = root_of_unity(RootOfUnity.of(1, order), big).to_galois()
    identity = big.gf.Identity(dim)
    counts: dict[RootOfUnity, int] = {}
    remaining = dim
    for j in range(order):
        if remaining == 0:
            break
        nullity = dim - int(
            np.linalg.matrix_rank(lifted - (omega**j) * identity)
        )
        if nullity:
            counts[RootOfUnity.of(j, order)] = nullity
            remaining -= nullity
    if remaining != 0:
        msg = f"matrix does not act semisimply with order dividing {order}"
        raise ValueError(msg)
    return CycloNumber.from_roots(counts)


def brauer_character(
    group: FinGroup,
    generators: Sequence[int],
    matrices: Sequence[np.ndarray],
    field: FiniteField,
    *,
    degree_cap: int = EXTENSION_DEGREE_CAP,
) -> GClass:
    """生成元の行列で与えた F_{ℓ^k}[G] 加群の Brauer 指標

    Parameters
    ----------
    group : FinGroup
        G
    generators : Sequence[int]
        G の生成元
    matrices : Sequence[np.ndarray]
        各生成元の表現行列 (整数表現または galois 配列)
    field : FiniteField
        行列の成分の体
    degree_cap : int, optional
        固有値を実現する拡大次数の上限

    Returns
    -------
    GClass
        mod ℓ の K_0 の元

    Raises
    ------
    ValueError
        行列が準同型を定めない、または生成元が G を生成しない時に送出

    Examples
    --------
    >>> S3 = symmetric_group(3)
    >>> perm = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    >>> cyc = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    >>> gens = [S3.labels.index((1, 0, 2)), S3.labels.index((1, 2, 0))]
    >>> chi = brauer_character(S3, gens, [perm, cyc], make_field(2, 1))
    >>> chi.values
    (CycloNumber(3), CycloNumber(0))
    """
    if not matrices or len(generators) != len(matrices):
        msg = "one matrix per generator (at least one) is required"
        raise ValueError(msg)
    gf = field.gf
    mats = [gf(np.array(m, dtype=np.int64) % field.order) for m in matrices]
    dim = mats[0].shape[0]
    rho = {0: gf.Identity(dim)}
    queue = [0]
    while queue:
        x = queue.pop()
        for g, m in zip(generators, mats):
            y = group.mul(x, g)
            image = rho[x] @ m
            if y not in rho:
                rho[y] = image
                queue.append(y)
            elif not np.array_equal(rho[y], image):
                msg = "matrices do not satisfy the group relations"
                raise ValueError(msg)
    if len(rho) != group.order:
        msg = "generators do not generate the group"
        raise ValueError(msg)
    return GClass.from_function(
        group,
        Coefficient.mod(field.characteristic),
        lambda g: brauer_value(
            rho[g], int(group.orders[g]), field, degree_cap=degree_cap
        ),
    )


def naive_isotypic(m: GClass, psi: AbChar, ell: int | None = None) -> GClass:
    """G×T 上の類の ψ 成分を T 上の平均で求める

    mod ℓ では T の ℓ' 部分で平均する。ell を渡した場合は類の係数が
    mod ℓ であることを確かめる。

    Examples
    --------
    >>> T = FinAb((3,))
    >>> P = direct_product(cyclic_group(1), abelian_group(T))
    >>> M = regular_class(P, Coefficient.mod(3))
    >>> naive_isotypic(M, AbChar.trivial(T)).values
    (CycloNumber(3),)
    """
    if m.group.factors is None:
        msg = "class does not live on a product group G x T"
        raise ValueError(msg)
    if ell is not None and (
        not m.coefficient.is_modular or m.coefficient.prime != ell
    ):
        msg = f"class is not a mod-{ell} class"
        raise ValueError(msg)
    g_group, t_group = m.group.factors
    if t_group.labels != tuple(psi.domain.elements()):
        msg = "character is not defined on the second factor"
        raise ValueError(msg)
    ts = range(t_group.order)
    if m.coefficient.is_modular:
        ell = m.coefficient.prime
        if not all(is_ell_regular(v, ell) for v in psi.values):
            msg = f"character does not take {ell}'-order values"
            raise ValueError(msg)
        ts = [t for t in ts if int(t_group.orders[t]) % ell != 0]
    weights = [
        CycloNumber.from_root(-psi(cast("tuple[int, ...]", t_group.labels[t])))
        for t in ts
    ]
    nt = t_group.order

    def average(g: int) -> CycloNumber:
        total = CycloNumber.zero()
        for t, w in zip(ts, weights):
            value = m.value_at(g * nt + t)
            if not value.is_zero():
                total += value * w
        return total / len(weights)

    return GClass.from_function(g_group, m.coefficient, average)

"""有限アーベル群 (不変因子表示)、準同型、指標、Smith 標準形"""

from collections.abc import Callable, Hashable, Iterator, Sequence
from dataclasses import dataclass
from itertools import product
from math import gcd, lcm, prod
from typing import Generic, TypedDict, TypeVar

from more_itertools import unique_everseen
from sympy import multiplicity

from ellchar_lib.cyclo import RootOfUnity, check_prime, r_ell_project
from ellchar_lib.limits import ENUMERATION_CAP, check_cap

Coords = tuple[int, ...]
Matrix = list[list[int]]
E = TypeVar("E", bound=Hashable)


class FinAbDict(TypedDict):
    invariant_factors: list[int]


@dataclass(frozen=True, slots=True)
class FinAb:
    """有限アーベル群 Z/d_1 × … × Z/d_r (d_1 | … | d_r)

    Examples
    --------
    >>> A = FinAb((2, 6))
    >>> A.order, A.exponent
    (12, 6)
    >>> A.add((1, 5), (1, 2))
    (0, 1)
    """

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self: "FinAb") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            入力値が不正値の時に送出
        """
        if any(d < 2 for d in self.invariant_factors):  # noqa: PLR2004
            msg = "invariant factors must be at least 2"
            raise ValueError(msg)
        factors = self.invariant_factors
        if any(b % a != 0 for a, b in zip(factors, factors[1:])):
            msg = "invariant factors must form a divisibility chain"
            raise ValueError(msg)

    @property
    def rank(self: "FinAb") -> int:
        return len(self.invariant_factors)

    @property
    def order(self: "FinAb") -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self: "FinAb") -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def is_trivial(self: "FinAb") -> bool:
        return self.rank == 0

    def zero(self: "FinAb") -> Coords:
        return (0,) * self.rank

    def basis(self: "FinAb") -> list[Coords]:
        return [
            tuple(int(i == j) for j in range(self.rank))
            for i in range(self.rank)
        ]

    def reduce(self: "FinAb", x: Sequence[int]) -> Coords:
        if len(x) != self.rank:
            msg = f"expected {self.rank} coordinates, got {len(x)}"
            raise ValueError(msg)
        return tuple(
            c % d for c, d in zip(x, self.invariant_factors, strict=True)
        )

    def add(self: "FinAb", x: Coords, y: Coords) -> Coords:
        return self.reduce([a + b for a, b in zip(x, y, strict=True)])

    def neg(self: "FinAb", x: Coords) -> Coords:
        return self.reduce([-a for a in x])

    def scale(self: "FinAb", k: int, x: Coords) -> Coords:
        return self.reduce([k * a for a in x])

    def element_order(self: "FinAb", x: Coords) -> int:
        return lcm(
            1,
            *(
                d // gcd(c, d)
                for c, d in zip(x, self.invariant_factors, strict=True)
            ),
        )

    def elements(self: "FinAb", cap: int = ENUMERATION_CAP) -> list[Coords]:
        """全ての元を辞書式順序で列挙"""
        check_cap(self.order, cap, "abelian group")
        return list(product(*(range(d) for d in self.invariant_factors)))

    def index(self: "FinAb", x: Coords) -> int:
        """elements() における位置"""
        i = 0
        for c, d in zip(x, self.invariant_factors, strict=True):
            i = i * d + c % d
        return i

    def element_at(self: "FinAb", i: int) -> Coords:
        coords = []
        for d in reversed(self.invariant_factors):
            i, c = divmod(i, d)
            coords.append(c)
        return tuple(reversed(coords))

    def __str__(self: "FinAb") -> str:
        if self.is_trivial():
            return "1"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)

    def to_dict(self: "FinAb") -> FinAbDict:
        return {"invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_dict(cls: type["FinAb"], data: FinAbDict) -> "FinAb":
        return cls(tuple(data["invariant_factors"]))


@dataclass(frozen=True, slots=True)
class SmithForm:
    """U·A·V = D となる Smith 標準形と変換行列"""

    d: Matrix
    u: Matrix
    v: Matrix
    v_inv: Matrix

    @property
    def diagonal(self: "SmithForm") -> list[int]:
        return [self.d[i][i] for i in range(min(len(self.d), len(self.v)))]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]]) -> SmithForm:
    """整数行列の Smith 標準形

    Parameters
    ----------
    a : Sequence[Sequence[int]]
        整数行列

    Returns
    -------
    SmithForm
        対角成分が整除列をなす D と可逆な U, V

    Examples
    --------
    >>> smith_normal_form([[2, 1], [1, 2]]).diagonal
    [1, 3]
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(row) for row in a]
    u, v, v_inv = _identity(m), _identity(n), _identity(n)

    def swap_rows(i: int, j: int) -> None:
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in (*d, *v):
            row[i], row[j] = row[j], row[i]
        v_inv[i], v_inv[j] = v_inv[j], v_inv[i]

    def add_row(dst: int, src: int, k: int) -> None:
        for mat in (d, u):
            mat[dst] = [x + k * y for x, y in zip(mat[dst], mat[src])]

    def add_col(dst: int, src: int, k: int) -> None:
        for row in (*d, *v):
            row[dst] += k * row[src]
        # V ← V F なら V^{-1} ← F^{-1} V^{-1}
        v_inv[src] = [x - k * y for x, y in zip(v_inv[src], v_inv[dst])]

    t = 0
    while t < min(m, n):
        entries = [
            (abs(d[i][j]), i, j)
            for i in range(t, m)
            for j in range(t, n)
            if d[i][j] != 0
        ]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        pivot = d[t][t]
        reduced = True
        for i in range(t + 1, m):
            if q := d[i][t] // pivot:
                add_row(i, t, -q)
            reduced &= d[i][t] == 0
        for j in range(t + 1, n):
            if q := d[t][j] // pivot:
                add_col(j, t, -q)
            reduced &= d[t][j] == 0
        if not reduced:
            continue
        bad = next(
            (
                i
                for i in range(t + 1, m)
                for j in range(t + 1, n)
                if d[i][j] % pivot != 0
            ),
            None,
        )
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if pivot < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return SmithForm(d, u, v, v_inv)


@dataclass(frozen=True, slots=True)
class AbHom:
    """有限アーベル群の準同型

    matrix の列 j は定義域の標準生成元 j の像 (行は値域の座標)。
    """

    domain: FinAb
    codomain: FinAb
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self: "AbHom") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            行列の形が合わない、または関係式を保たない時に送出
        """
        if len(self.matrix) != self.codomain.rank or any(
            len(row) != self.domain.rank for row in self.matrix
        ):
            msg = "matrix shape does not match domain and codomain"
            raise ValueError(msg)
        for i, row in enumerate(self.matrix):
            e = self.codomain.invariant_factors[i]
            if any(not 0 <= c < e for c in row):
                msg = "matrix entries must be reduced"
                raise ValueError(msg)
        for j, d in enumerate(self.domain.invariant_factors):
            if any(
                d * row[j] % self.codomain.invariant_factors[i]
                for i, row in enumerate(self.matrix)
            ):
                msg = f"image of generator {j} has order not dividing {d}"
                raise ValueError(msg)

    @classmethod
    def from_images(
        cls: type["AbHom"],
        domain: FinAb,
        codomain: FinAb,
        images: Sequence[Sequence[int]],
    ) -> "AbHom":
        """生成元の像から作る"""
        images = [codomain.reduce(x) for x in images]
        if len(images) != domain.rank:
            msg = "one image per generator is required"
            raise ValueError(msg)
        matrix = tuple(
            tuple(x[i] for x in images) for i in range(codomain.rank)
        )
        return cls(domain, codomain, matrix)

    @classmethod
    def identity(cls: type["AbHom"], group: FinAb) -> "AbHom":
        return cls.from_images(group, group, group.basis())

    @classmethod
    def zero(cls: type["AbHom"], domain: FinAb, codomain: FinAb) -> "AbHom":
        return cls.from_images(
            domain, codomain, [codomain.zero()] * domain.rank
        )

    def image_of_generator(self: "AbHom", j: int) -> Coords:
        return tuple(row[j] for row in self.matrix)

    def apply(self: "AbHom", x: Coords) -> Coords:
        return self.codomain.reduce(
            [sum(c * a for c, a in zip(row, x)) for row in self.matrix]
        )

    def compose(self: "AbHom", other: "AbHom") -> "AbHom":
        """self ∘ other"""
        if other.codomain != self.domain:
            msg = "homomorphisms are not composable"
            raise ValueError(msg)
        return AbHom.from_images(
            other.domain,
            self.codomain,
            [
                self.apply(other.image_of_generator(j))
                for j in range(other.domain.rank)
            ],
        )

    def power(self: "AbHom", k: int) -> "AbHom":
        if self.domain != self.codomain or k < 0:
            msg = "only non-negative powers of endomorphisms are defined"
            raise ValueError(msg)
        result = AbHom.identity(self.domain)
        for _ in range(k):
            result = self.compose(result)
        return result

    def image_order(self: "AbHom") -> int:
        gens = [
            self.image_of_generator(j) for j in range(self.domain.rank)
        ]
        return subgroup(self.codomain, gens)[0].order

    def is_automorphism(self: "AbHom") -> bool:
        return (
            self.domain == self.codomain
            and self.image_order() == self.domain.order
        )

    def to_dict(self: "AbHom") -> dict[str, object]:
        return {
            "domain": self.domain.to_dict(),
            "codomain": self.codomain.to_dict(),
            "matrix": [list(row) for row in self.matrix],
        }


class AbCharDict(TypedDict):
    values: list[str]


@dataclass(frozen=True, slots=True)
class AbChar:
    """有限アーベル群の指標 (標準生成元の値を Q/Z で保持)

    Examples
    --------
    >>> A = FinAb((3,))
    >>> chi = AbChar(A, (RootOfUnity.of(1, 3),))
    >>> str(chi((2,)))
    '2/3'
    >>> chi.order
    3
    """

    domain: FinAb
    values: tuple[RootOfUnity, ...]

    def __post_init__(self: "AbChar") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            値の位数が生成元の位数を割らない時に送出
        """
        if len(self.values) != self.domain.rank:
            msg = "one value per generator is required"
            raise ValueError(msg)
        for v, d in zip(self.values, self.domain.invariant_factors):
            if d % v.order != 0:
                msg = f"value {v} does not have order dividing {d}"
                raise ValueError(msg)

    @classmethod
    def trivial(cls: type["AbChar"], domain: FinAb) -> "AbChar":
        return cls(domain, (RootOfUnity.identity(),) * domain.rank)

    def __call__(self: "AbChar", x: Coords) -> RootOfUnity:
        total = RootOfUnity.identity()
        for c, v in zip(x, self.values, strict=True):
            total += v * c
        return total

    def __add__(self: "AbChar", other: "AbChar") -> "AbChar":
        """値ごとの積 (Q/Z では和)"""
        if other.domain != self.domain:
            msg = "characters live on different groups"
            raise ValueError(msg)
        return AbChar(
            self.domain,
            tuple(a + b for a, b in zip(self.values, other.values)),
        )

    def __neg__(self: "AbChar") -> "AbChar":
        return AbChar(self.domain, tuple(-v for v in self.values))

    def __sub__(self: "AbChar", other: "AbChar") -> "AbChar":
        return self + (-other)

    def compose(self: "AbChar", phi: AbHom) -> "AbChar":
        """χ ∘ φ"""
        if phi.codomain != self.domain:
            msg = "homomorphism does not land in the character's domain"
            raise ValueError(msg)
        return AbChar(
            phi.domain,
            tuple(
                self(phi.image_of_generator(j))
                for j in range(phi.domain.rank)
            ),
        )

    restrict = compose

    def is_trivial(self: "AbChar") -> bool:
        return all(v.is_identity() for v in self.values)

    @property
    def order(self: "AbChar") -> int:
        return lcm(1, *(v.order for v in self.values))

    def r_ell(self: "AbChar", ell: int) -> "AbChar":
        return AbChar(
            self.domain, tuple(r_ell_project(v, ell) for v in self.values)
        )

    def to_dict(self: "AbChar") -> AbCharDict:
        return {"values": [str(v) for v in self.values]}

    @classmethod
    def from_dict(
        cls: type["AbChar"], domain: FinAb, data: AbCharDict
    ) -> "AbChar":
        return cls(domain, tuple(RootOfUnity.parse(v) for v in data["values"]))


@dataclass(frozen=True, slots=True)
class Cokernel:
    """Z^s / (関係式の行空間) と Smith 変換"""

    group: FinAb
    smith: SmithForm
    columns: tuple[int, ...]

    def project(self: "Cokernel", x: Sequence[int]) -> Coords:
        """Z^s の元の像"""
        y = [
            sum(c * self.smith.v[j][col] for j, c in enumerate(x))
            for col in self.columns
        ]
        return self.group.reduce(y)

    def lift(self: "Cokernel", a: Coords) -> list[int]:
        """標準生成元を V^{-1} の行で Z^s に持ち上げる"""
        s = len(self.smith.v)
        return [
            sum(
                c * self.smith.v_inv[col][j]
                for c, col in zip(a, self.columns, strict=True)
            )
            for j in range(s)
        ]


def cokernel(relation_matrix: Sequence[Sequence[int]]) -> Cokernel:
    """関係行列 (行が関係式) の余核を求める"""
    if not relation_matrix or not relation_matrix[0]:
        msg = "relation matrix must be non-empty"
        raise ValueError(msg)
    s = len(relation_matrix[0])
    smith = smith_normal_form(relation_matrix)
    diagonal = smith.diagonal
    if len(diagonal) < s or any(x == 0 for x in diagonal):
        msg = "relation matrix has an infinite cokernel"
        raise ValueError(msg)
    columns = tuple(i for i, x in enumerate(diagonal) if x != 1)
    group = FinAb(tuple(diagonal[i] for i in columns))
    return Cokernel(group, smith, columns)


def from_relations(
    relation_matrix: Sequence[Sequence[int]],
) -> tuple[FinAb, AbHom]:
    """関係行列の余核と射影

    射影の定義域は (Z/N)^s (N は余核の指数、最小 2) とする。

    Parameters
    ----------
    relation_matrix : Sequence[Sequence[int]]
        行が関係式の整数行列

    Returns
    -------
    tuple[FinAb, AbHom]
        余核と射影

    Raises
    ------
    ValueError
        余核が無限群の時に送出

    Examples
    --------
    >>> str(from_relations([[6]])[0])
    'Z/6'
    >>> str(from_relations([[2, 1], [1, 2]])[0])
    'Z/3'
    >>> str(from_relations([[1, 0], [0, 1]])[0])
    '1'
    """
    coker = cokernel(relation_matrix)
    s = len(relation_matrix[0])
    domain = FinAb((max(coker.group.exponent, 2),) * s)
    images = [coker.project(e) for e in domain.basis()]
    return coker.group, AbHom.from_images(domain, coker.group, images)


@dataclass(frozen=True, slots=True, eq=False)
class Presentation(Generic[E]):
    """具体的な元で生成されたアーベル群と座標の対応"""

    group: FinAb
    to_coords: dict[E, Coords]
    from_coords: dict[Coords, E]
    generators: tuple[E, ...]


def structure_from_generators(
    gens: Sequence[E],
    mult: Callable[[E, E], E],
    identity: E,
    *,
    cap: int = ENUMERATION_CAP,
) -> Presentation[E]:
    """生成元の組から有限アーベル群の構造を求める

    生成元を1つずつ加えて関係式の格子を作り、Smith 標準形で不変因子と
    座標を定める。

    Parameters
    ----------
    gens : Sequence[E]
        生成元
    mult : Callable[[E, E], E]
        群演算
    identity : E
        単位元
    cap : int, optional
        群の位数の上限

    Returns
    -------
    Presentation[E]
        群構造と座標の対応

    Examples
    --------
    >>> pres = structure_from_generators([2, 3], lambda a, b: a * b % 7, 1)
    >>> str(pres.group)
    'Z/6'
    """
    exps: dict[E, list[int]] = {identity: []}
    relations: Matrix = []
    for j, g in enumerate(gens):
        for vec in exps.values():
            vec.append(0)
        power, k = g, 1
        while power not in exps:
            power = mult(power, g)
            k += 1
        relations.append(
            [-c for c in exps[power][:j]] + [k] + [0] * (len(gens) - j - 1)
        )
        if k == 1:
            continue
        check_cap(len(exps) * k, cap, "abelian group")
        current = list(exps.items())
        step = identity
        for i in range(1, k):
            step = mult(step, g)
            for x, vec in current:
                exps[mult(step, x)] = [*vec[:j], i]
    for vec in exps.values():
        vec.extend([0] * (len(gens) - len(vec)))
    if not gens:
        group = FinAb()
        return Presentation(group, {identity: ()}, {(): identity}, ())
    coker = cokernel(relations)
    to_coords = {x: coker.project(vec) for x, vec in exps.items()}
    from_coords = {c: x for x, c in to_coords.items()}
    if len(from_coords) != len(to_coords):
        msg = "generators do not define a finite abelian group"
        raise ValueError(msg)
    generators = tuple(from_coords[e] for e in coker.group.basis())
    return Presentation(coker.group, to_coords, from_coords, generators)


def subgroup(
    group: FinAb, gens: Sequence[Coords], *, cap: int = ENUMERATION_CAP
) -> tuple[FinAb, AbHom]:
    """生成元で生成される部分群と包含写像

    Examples
    --------
    >>> H, inc = subgroup(FinAb((2, 6)), [(0, 2)])
    >>> str(H)
    'Z/3'
    """
    pres = structure_from_generators(
        [group.reduce(g) for g in gens], group.add, group.zero(), cap=cap
    )
    return pres.group, AbHom.from_images(
        pres.group, group, list(pres.generators)
    )


@dataclass(frozen=True, slots=True)
class DirectSum:
    """直和 A ⊕ B と成分との対応"""

    left: FinAb
    right: FinAb
    group: FinAb
    coker: Cokernel

    def pair(self: "DirectSum", a: Coords, b: Coords) -> Coords:
        return self.coker.project([*a, *b])

    def split(self: "DirectSum", x: Coords) -> tuple[Coords, Coords]:
        y = self.coker.lift(x)
        return (
            self.left.reduce(y[: self.left.rank]),
            self.right.reduce(
                y[self.left.rank : self.left.rank + self.right.rank]
            ),
        )


def direct_sum(left: FinAb, right: FinAb) -> DirectSum:
    factors = [*left.invariant_factors, *right.invariant_factors]
    if not factors:
        return DirectSum(left, right, FinAb(), cokernel([[1]]))
    relations = [
        [d if i == j else 0 for j in range(len(factors))]
        for i, d in enumerate(factors)
    ]
    coker = cokernel(relations)
    return DirectSum(left, right, coker.group, coker)


def iter_characters(group: FinAb) -> Iterator[AbChar]:
    for numerators in product(*(range(d) for d in group.invariant_factors)):
        yield AbChar(
            group,
            tuple(
                RootOfUnity.of(a, d)
                for a, d in zip(numerators, group.invariant_factors)
            ),
        )


def dual_enumerate(
    group: FinAb, *, cap: int = ENUMERATION_CAP
) -> list[AbChar]:
    """全ての指標を分子の辞書式順序で列挙

    Examples
    --------
    >>> len(dual_enumerate(FinAb((2, 2))))
    4
    >>> [c.is_trivial() for c in dual_enumerate(FinAb())]
    [True]
    """
    check_cap(group.order, cap, "dual group")
    return list(iter_characters(group))


def char_orbit(chi: AbChar, phi: AbHom, n: int) -> list[AbChar]:
    """χ ↦ χ∘φ による軌道

    Raises
    ------
    ValueError
        φ が自己同型でない、または φ^n ≠ id の時に送出

    Examples
    --------
    >>> A = FinAb((3,))
    >>> inversion = AbHom.from_images(A, A, [(2,)])
    >>> chi = AbChar(A, (RootOfUnity.of(1, 3),))
    >>> len(char_orbit(chi, inversion, 2))
    2
    """
    if n < 1:
        msg = "n must be positive"
        raise ValueError(msg)
    if not phi.is_automorphism():
        msg = "phi is not an automorphism"
        raise ValueError(msg)
    if phi.power(n) != AbHom.identity(phi.domain):
        msg = f"phi does not satisfy phi^{n} = id"
        raise ValueError(msg)
    orbit = [chi]
    for _ in range(n - 1):
        orbit.append(orbit[-1].compose(phi))
    return list(unique_everseen(orbit))


def ell_part(d: int, ell: int) -> int:
    return ell ** multiplicity(ell, d)


def ell_power_characters(group: FinAb, ell: int) -> list[AbChar]:
    """ℓ冪位数の値をとる指標 Hom(A, μ_{ℓ^∞})"""
    check_prime(ell)
    parts = [ell_part(d, ell) for d in group.invariant_factors]
    return [
        AbChar(
            group,
            tuple(RootOfUnity.of(a, e) for a, e in zip(numerators, parts)),
        )
        for numerators in product(*(range(e) for e in parts))
    ]


def reduction_fiber(chi: AbChar, ell: int) -> list[AbChar]:
    """r_ℓ で chi と同じ像を持つ指標全体

    個数は ℓ冪位数の元の個数に等しい。

    Examples
    --------
    >>> A = FinAb((6,))
    >>> chi = AbChar(A, (RootOfUnity.of(1, 2),))
    >>> len(reduction_fiber(chi, 3))
    3
    """
    base = chi.r_ell(ell)
    return [base + eta for eta in ell_power_characters(chi.domain, ell)]


def ell_prime_characters(group: FinAb, ell: int) -> list[AbChar]:
    """ℓと素な位数の値をとる指標 (mod ℓ 指標の全体)"""
    check_prime(ell)
    parts = [d // ell_part(d, ell) for d in group.invariant_factors]
    return [
        AbChar(
            group,
            tuple(RootOfUnity.of(a, e) for a, e in zip(numerators, parts)),
        )
        for numerators in product(*(range(e) for e in parts))
    ]

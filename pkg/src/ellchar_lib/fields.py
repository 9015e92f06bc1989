"""有限体 F_{p^k} とその塔、Frobenius、Teichmüller 持ち上げ

各体は galois の FieldArray クラスをラップする。既定の定義多項式は
Conway 多項式で、同じ標数の体どうしは埋め込みが両立する。
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cache
from typing import TypedDict

import galois
import numpy as np
from sympy.ntheory import n_order

from ellchar_lib.cyclo import RootOfUnity, check_prime
from ellchar_lib.limits import FIELD_SIZE_CAP, check_cap


class FieldDescriptor(TypedDict):
    p: int
    k: int
    modulus: list[int]
    generator: list[int]


@dataclass(frozen=True, slots=True, eq=False)
class FiniteField:
    """有限体 F_{p^k}

    modulus と generator は昇冪順の係数で保持する。
    """

    characteristic: int
    degree: int
    modulus: tuple[int, ...]
    generator: tuple[int, ...]
    gf: type[galois.FieldArray] = field(repr=False)

    @property
    def order(self: "FiniteField") -> int:
        return self.characteristic**self.degree

    @property
    def key(self: "FiniteField") -> tuple[int, int, tuple[int, ...]]:
        return self.characteristic, self.degree, self.modulus

    def __eq__(self: "FiniteField", other: object) -> bool:
        if not isinstance(other, FiniteField):
            return NotImplemented
        return self.key == other.key

    def __hash__(self: "FiniteField") -> int:
        return hash(self.key)

    def element(self: "FiniteField", value: int | Sequence[int]) -> "FFElem":
        """整数表現 (Σ c_i p^i) または昇冪順の係数列から元を作る"""
        if not isinstance(value, int):
            value = _coeffs_to_int(value, self.characteristic)
        if not 0 <= value < self.order:
            msg = f"{value} is not an element of F_{self.order}"
            raise ValueError(msg)
        return FFElem(self, _int_to_coeffs(value, self))

    def zero(self: "FiniteField") -> "FFElem":
        return self.element(0)

    def one(self: "FiniteField") -> "FFElem":
        return self.element(1)

    def gen(self: "FiniteField") -> "FFElem":
        return self.element(self.generator)

    def elements(self: "FiniteField") -> list["FFElem"]:
        return [self.element(v) for v in range(self.order)]

    def to_dict(self: "FiniteField") -> FieldDescriptor:
        return {
            "p": self.characteristic,
            "k": self.degree,
            "modulus": list(self.modulus),
            "generator": list(self.generator),
        }


def _coeffs_to_int(coeffs: Sequence[int], p: int) -> int:
    return sum((c % p) * p**i for i, c in enumerate(coeffs))


def _int_to_coeffs(value: int, f: FiniteField) -> tuple[int, ...]:
    coeffs = []
    for _ in range(f.degree):
        value, c = divmod(value, f.characteristic)
        coeffs.append(c)
    return tuple(coeffs)


@dataclass(frozen=True, slots=True)
class FFElem:
    """有限体の元 (定義多項式を法とする次数 k 未満の多項式)"""

    field: FiniteField
    coeffs: tuple[int, ...]

    def __post_init__(self: "FFElem") -> None:
        if len(self.coeffs) != self.field.degree or any(
            not 0 <= c < self.field.characteristic for c in self.coeffs
        ):
            msg = "coefficients must be reduced modulo the modulus"
            raise ValueError(msg)

    @property
    def value(self: "FFElem") -> int:
        return _coeffs_to_int(self.coeffs, self.field.characteristic)

    def to_galois(self: "FFElem") -> galois.FieldArray:
        return self.field.gf(self.value)

    def _wrap(self: "FFElem", x: galois.FieldArray) -> "FFElem":
        return self.field.element(int(x))

    def _other(self: "FFElem", other: "FFElem | int") -> galois.FieldArray:
        if isinstance(other, int):
            return self.field.gf(other % self.field.characteristic)
        if other.field != self.field:
            msg = "elements belong to different fields"
            raise ValueError(msg)
        return other.to_galois()

    def __add__(self: "FFElem", other: "FFElem | int") -> "FFElem":
        return self._wrap(self.to_galois() + self._other(other))

    def __sub__(self: "FFElem", other: "FFElem | int") -> "FFElem":
        return self._wrap(self.to_galois() - self._other(other))

    def __mul__(self: "FFElem", other: "FFElem | int") -> "FFElem":
        return self._wrap(self.to_galois() * self._other(other))

    def __truediv__(self: "FFElem", other: "FFElem | int") -> "FFElem":
        return self._wrap(self.to_galois() / self._other(other))

    def __neg__(self: "FFElem") -> "FFElem":
        return self._wrap(-self.to_galois())

    def __pow__(self: "FFElem", k: int) -> "FFElem":
        return self._wrap(self.to_galois() ** k)

    def is_zero(self: "FFElem") -> bool:
        return self.value == 0


@cache
def _make_field(
    p: int, k: int, modulus: tuple[int, ...] | None
) -> FiniteField:
    prime_field = galois.GF(p)
    if modulus is None:
        poly = None
    else:
        if len(modulus) != k + 1 or modulus[-1] % p != 1:
            msg = f"modulus must be monic of degree {k}"
            raise ValueError(msg)
        poly = galois.Poly(
            [c % p for c in reversed(modulus)], field=prime_field
        )
        if not poly.is_irreducible():
            msg = "modulus is reducible"
            raise ValueError(msg)
    if k == 1:
        gf = prime_field
        if poly is None:
            g = int(gf.primitive_element)
            return FiniteField(p, 1, ((-g) % p, 1), (g,), gf)
        # 根が原始元ならそれを生成元にとる
        root = int(-poly.coeffs[-1])
        primitive = root != 0 and poly.is_primitive()
        g = root if primitive else int(gf.primitive_element)
        return FiniteField(p, 1, (int(poly.coeffs[-1]), 1), (g,), gf)
    if poly is None:
        try:
            poly = galois.conway_poly(p, k)
        except LookupError:
            poly = galois.primitive_poly(p, k, method="min")
    gf = galois.GF(p**k, irreducible_poly=poly)
    asc = tuple(int(c) for c in reversed(poly.coeffs))
    # 原始多項式なら根 x を生成元にとる (塔の両立のため)
    alpha = gf(p)
    gen = alpha if poly.is_primitive() else gf.primitive_element
    f = FiniteField(p, k, asc, (), gf)
    return FiniteField(p, k, asc, _int_to_coeffs(int(gen), f), gf)


def make_field(
    p: int,
    k: int,
    modulus: Sequence[int] | None = None,
    *,
    size_cap: int = FIELD_SIZE_CAP,
) -> FiniteField:
    """有限体を作成する

    Parameters
    ----------
    p : int
        標数
    k : int
        素体上の次数
    modulus : Sequence[int] | None, optional
        定義多項式の係数 (昇冪順、モニック)。省略時は Conway 多項式
    size_cap : int, optional
        体の大きさの上限

    Returns
    -------
    FiniteField
        作成した体

    Raises
    ------
    ValueError
        定義多項式が既約でない時に送出

    Examples
    --------
    >>> f4 = make_field(2, 2, [1, 1, 1])
    >>> g = f4.gen()
    >>> g * g == g + 1
    True
    >>> make_field(3, 1).generator
    (2,)
    """
    check_prime(p)
    if k < 1:
        msg = "degree must be positive"
        raise ValueError(msg)
    check_cap(p**k, size_cap, "finite field")
    return _make_field(p, k, None if modulus is None else tuple(modulus))


def frobenius(x: FFElem, base_degree: int) -> FFElem:
    """Frobenius x ↦ x^q (q = p^base_degree)

    Examples
    --------
    >>> g = make_field(2, 2, [1, 1, 1]).gen()
    >>> frobenius(g, 1) == g + 1
    True
    """
    if base_degree < 1 or x.field.degree % base_degree != 0:
        msg = f"{base_degree} does not divide {x.field.degree}"
        raise ValueError(msg)
    return x ** (x.field.characteristic**base_degree)


@cache
def dlog_table(f: FiniteField) -> np.ndarray:
    """整数表現から生成元に関する離散対数への表 (0 は -1)"""
    size = f.order
    powers = f.gf(f.gen().value) ** np.arange(size - 1)
    table = np.full(size, -1, dtype=np.int64)
    table[powers.view(np.ndarray).astype(np.int64)] = np.arange(size - 1)
    return table


def teich_lift(x: FFElem) -> RootOfUnity:
    """Teichmüller 持ち上げ x = g^d ↦ d/(p^k - 1)

    Examples
    --------
    >>> f9 = make_field(3, 2)
    >>> str(teich_lift(f9.gen()))
    '1/8'
    >>> str(teich_lift(f9.gen() ** 2))
    '1/4'
    """
    if x.is_zero():
        msg = "zero has no Teichmüller lift"
        raise ValueError(msg)
    d = int(dlog_table(x.field)[x.value])
    return RootOfUnity.of(d, x.field.order - 1)


@cache
def _check_tower(source: FiniteField, target: FiniteField) -> None:
    image = target.gf(target.gen().value) ** (
        (target.order - 1) // (source.order - 1)
    )
    minimal = source.gf(source.gen().value).minimal_poly()
    value = target.gf(0)
    for c in minimal.coeffs:
        value = value * image + target.gf(int(c))
    if value != 0:
        msg = f"F_{source.order} and F_{target.order} are not tower compatible"
        raise ValueError(msg)


def embed(x: FFElem, target: FiniteField) -> FFElem:
    """塔の埋め込み g_a ↦ g_b^{(p^b-1)/(p^a-1)}"""
    source = x.field
    if (
        source.characteristic != target.characteristic
        or target.degree % source.degree != 0
    ):
        msg = f"F_{source.order} does not embed into F_{target.order}"
        raise ValueError(msg)
    _check_tower(source, target)
    if x.is_zero():
        return target.zero()
    d = int(dlog_table(source)[x.value])
    return target.gen() ** (d * ((target.order - 1) // (source.order - 1)))


def root_of_unity(r: RootOfUnity, f: FiniteField) -> FFElem:
    """ℓ'の1の冪根を体の中に実現する (teich_lift の逆)

    Raises
    ------
    ValueError
        位数が p^k - 1 を割らない時に送出
    """
    if (f.order - 1) % r.order != 0:
        msg = f"{r} is not realisable in F_{f.order}"
        raise ValueError(msg)
    return f.gen() ** (r.numerator * ((f.order - 1) // r.order))


def splitting_degree(e: int, p: int) -> int:
    """e | p^k - 1 となる最小の k

    Examples
    --------
    >>> splitting_degree(4, 3)
    2
    >>> splitting_degree(1, 5)
    1
    """
    if e % p == 0:
        msg = f"{e} is divisible by the characteristic {p}"
        raise ValueError(msg)
    if e == 1:
        return 1
    return int(n_order(p, e))


@cache
def embedding_table(source: FiniteField, target: FiniteField) -> np.ndarray:
    """埋め込みの整数表現での表"""
    embed(source.zero(), target)
    table = dlog_table(source)
    step = (target.order - 1) // (source.order - 1)
    image = np.zeros(source.order, dtype=np.int64)
    exponents = (table[1:] * step) % (target.order - 1)
    powers = target.gf(target.gen().value) ** exponents
    image[1:] = powers.view(np.ndarray).astype(np.int64)
    return image


def embed_array(
    values: galois.FieldArray, source: FiniteField, target: FiniteField
) -> galois.FieldArray:
    """galois の配列をまとめて埋め込む"""
    if source == target:
        return values
    table = embedding_table(source, target)
    return target.gf(table[values.view(np.ndarray).astype(np.int64)])

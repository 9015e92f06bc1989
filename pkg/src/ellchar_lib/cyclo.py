"""1の冪根と円分体の厳密な演算

1の冪根は Q/Z の元 a/N (ζ_N^a を表す) として加法的に扱う。
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import gcd, lcm
from typing import Literal, TypedDict

from sympy import (
    QQ,
    Poly,
    Rational,
    cyclotomic_poly,
    factorint,
    isprime,
    multiplicity,
    symbols,
    totient,
)

_X = symbols("x")


def check_prime(ell: int) -> None:
    """素数であることを検査

    Parameters
    ----------
    ell : int
        検査する整数

    Raises
    ------
    ValueError
        素数でない時に送出
    """
    if not isprime(ell):
        msg = f"{ell} is not a prime"
        raise ValueError(msg)


@dataclass(frozen=True, slots=True, order=True)
class RootOfUnity:
    """Q/Z の既約分数 numerator/order として表した1の冪根

    Examples
    --------
    >>> RootOfUnity.of(3, 12)
    RootOfUnity(numerator=1, order=4)
    >>> str(RootOfUnity.of(1, 3) + RootOfUnity.of(3, 4))
    '1/12'
    """

    numerator: int
    order: int

    def __post_init__(self: "RootOfUnity") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            入力値が不正値の時に送出
        """
        if self.order < 1:
            msg = "order must be positive"
            raise ValueError(msg)
        if not 0 <= self.numerator < self.order:
            msg = "numerator must lie in [0, order)"
            raise ValueError(msg)
        if self.numerator == 0 and self.order != 1:
            msg = "the identity must be written as 0/1"
            raise ValueError(msg)
        if self.numerator != 0 and gcd(self.numerator, self.order) != 1:
            msg = "fraction must be reduced"
            raise ValueError(msg)

    @classmethod
    def of(
        cls: type["RootOfUnity"], numerator: int, order: int
    ) -> "RootOfUnity":
        frac = Fraction(numerator, order) % 1
        return cls(frac.numerator, frac.denominator)

    @classmethod
    def identity(cls: type["RootOfUnity"]) -> "RootOfUnity":
        return cls(0, 1)

    @classmethod
    def parse(cls: type["RootOfUnity"], data: str) -> "RootOfUnity":
        """文字列 "a/N" から変換

        Examples
        --------
        >>> RootOfUnity.parse("2/8")
        RootOfUnity(numerator=1, order=4)
        """
        numerator, _, order = data.partition("/")
        return cls.of(int(numerator), int(order or 1))

    def as_fraction(self: "RootOfUnity") -> Fraction:
        return Fraction(self.numerator, self.order)

    def is_identity(self: "RootOfUnity") -> bool:
        return self.numerator == 0

    def __add__(self: "RootOfUnity", other: "RootOfUnity") -> "RootOfUnity":
        frac = self.as_fraction() + other.as_fraction()
        return RootOfUnity.of(frac.numerator, frac.denominator)

    def __neg__(self: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity.of(-self.numerator, self.order)

    def __sub__(self: "RootOfUnity", other: "RootOfUnity") -> "RootOfUnity":
        return self + (-other)

    def __mul__(self: "RootOfUnity", k: int) -> "RootOfUnity":
        return RootOfUnity.of(self.numerator * k, self.order)

    __rmul__ = __mul__

    def __str__(self: "RootOfUnity") -> str:
        return f"{self.numerator}/{self.order}"


def ell_split(x: RootOfUnity, ell: int) -> tuple[RootOfUnity, RootOfUnity]:
    """ℓ冪位数の部分とℓと素な位数の部分に分解する

    Parameters
    ----------
    x : RootOfUnity
        1の冪根
    ell : int
        素数ℓ

    Returns
    -------
    tuple[RootOfUnity, RootOfUnity]
        ℓ部分とℓ'部分

    Examples
    --------
    >>> a, b = ell_split(RootOfUnity.of(1, 12), 3)
    >>> str(a), str(b)
    ('1/3', '3/4')
    """
    check_prime(ell)
    ell_power = ell ** multiplicity(ell, x.order)
    coprime = x.order // ell_power
    # CRT: u * coprime + v * ell_power ≡ numerator (mod order)
    u = x.numerator * pow(coprime, -1, ell_power) % ell_power
    v = x.numerator * pow(ell_power, -1, coprime) % coprime
    return RootOfUnity.of(u, ell_power), RootOfUnity.of(v, coprime)


def is_ell_regular(x: RootOfUnity, ell: int) -> bool:
    return x.order % ell != 0


def teich_section(u: RootOfUnity, ell: int) -> RootOfUnity:
    """Teichmüller 切断

    Q/Z のモデルでは μ_∞(F̄_ℓ) を ℓ' 部分と同一視するので包含写像になる。

    Raises
    ------
    ValueError
        位数がℓで割り切れる時に送出
    """
    check_prime(ell)
    if not is_ell_regular(u, ell):
        msg = f"order of {u} is divisible by {ell}"
        raise ValueError(msg)
    return u


def r_ell_project(x: RootOfUnity, ell: int) -> RootOfUnity:
    """ℓ冪位数の部分を消す射影

    Examples
    --------
    >>> str(r_ell_project(RootOfUnity.of(1, 3), 3))
    '0/1'
    """
    return ell_split(x, ell)[1]


class CoefficientDict(TypedDict):
    tag: Literal["char0", "mod-ell"]
    ell: int | None


@dataclass(frozen=True, slots=True)
class Coefficient:
    """係数の種類 (標数0 または mod ℓ)"""

    tag: Literal["char0", "mod-ell"] = "char0"
    ell: int | None = None

    def __post_init__(self: "Coefficient") -> None:
        if self.tag == "mod-ell":
            if self.ell is None:
                msg = "mod-ell coefficients need a prime"
                raise ValueError(msg)
            check_prime(self.ell)
        elif self.ell is not None:
            check_prime(self.ell)

    @classmethod
    def char0(cls: type["Coefficient"]) -> "Coefficient":
        return cls("char0", None)

    @classmethod
    def mod(cls: type["Coefficient"], ell: int) -> "Coefficient":
        return cls("mod-ell", ell)

    @property
    def is_modular(self: "Coefficient") -> bool:
        return self.tag == "mod-ell"

    @property
    def prime(self: "Coefficient") -> int:
        if self.ell is None:
            msg = "coefficient carries no prime"
            raise ValueError(msg)
        return self.ell

    def to_dict(self: "Coefficient") -> CoefficientDict:
        return {"tag": self.tag, "ell": self.ell}

    @classmethod
    def from_dict(
        cls: type["Coefficient"], data: CoefficientDict
    ) -> "Coefficient":
        return cls(data["tag"], data["ell"])


@cache
def _cyclotomic(n: int) -> Poly:
    return Poly(cyclotomic_poly(n, _X), _X, domain=QQ)


@cache
def _degree(n: int) -> int:
    return int(totient(n))


@cache
def _mobius(n: int) -> int:
    exponents = factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def _to_poly(coeffs: Iterable[Fraction]) -> Poly:
    desc = [Rational(c.numerator, c.denominator) for c in coeffs][::-1]
    return Poly(desc or [0], _X, domain=QQ)


def _from_poly(poly: Poly, n: int) -> tuple[Fraction, ...]:
    rem = poly.rem(_cyclotomic(n))
    asc = [Fraction(int(c.p), int(c.q)) for c in reversed(rem.all_coeffs())]
    return tuple(asc + [Fraction(0)] * (_degree(n) - len(asc)))


def _reduce(coeffs: Iterable[Fraction], n: int) -> tuple[Fraction, ...]:
    return _from_poly(_to_poly(coeffs), n)


class CycloNumberDict(TypedDict):
    conductor: int
    coords: list[str]


Scalar = int | Fraction


@dataclass(frozen=True, slots=True, eq=False)
class CycloNumber:
    """円分体 Q(ζ_N) の元 (冪基底の座標)

    Examples
    --------
    >>> z3 = CycloNumber.from_root(RootOfUnity.of(1, 3))
    >>> 1 + z3 + z3 * z3 == 0
    True
    >>> z6 = CycloNumber.from_root(RootOfUnity.of(1, 6))
    >>> z6 == -(z3 * z3)
    True
    """

    conductor: int
    coords: tuple[Fraction, ...]

    def __post_init__(self: "CycloNumber") -> None:
        if self.conductor < 1:
            msg = "conductor must be positive"
            raise ValueError(msg)
        if len(self.coords) != _degree(self.conductor):
            msg = "coords must have length phi(conductor)"
            raise ValueError(msg)

    @classmethod
    def from_int(cls: type["CycloNumber"], value: Scalar) -> "CycloNumber":
        return cls(1, (Fraction(value),))

    @classmethod
    def zero(cls: type["CycloNumber"]) -> "CycloNumber":
        return cls.from_int(0)

    @classmethod
    def one(cls: type["CycloNumber"]) -> "CycloNumber":
        return cls.from_int(1)

    @classmethod
    def from_root(
        cls: type["CycloNumber"], root: RootOfUnity
    ) -> "CycloNumber":
        dense = [Fraction(0)] * (root.numerator + 1)
        dense[root.numerator] = Fraction(1)
        return cls(root.order, _reduce(dense, root.order))

    @classmethod
    def from_roots(
        cls: type["CycloNumber"], counts: Mapping[RootOfUnity, Scalar]
    ) -> "CycloNumber":
        """1の冪根の整数係数の和

        Parameters
        ----------
        counts : Mapping[RootOfUnity, Scalar]
            各冪根の係数

        Returns
        -------
        CycloNumber
            和
        """
        n = lcm(1, *(root.order for root in counts))
        dense = [Fraction(0)] * n
        for root, count in counts.items():
            dense[root.numerator * (n // root.order)] += Fraction(count)
        return cls(n, _reduce(dense, n))

    def embed(self: "CycloNumber", conductor: int) -> "CycloNumber":
        """Q(ζ_M) への埋め込み (ζ_N = ζ_M^{M/N})"""
        if conductor % self.conductor != 0:
            msg = f"{self.conductor} does not divide {conductor}"
            raise ValueError(msg)
        if conductor == self.conductor:
            return self
        if self.conductor == 1:
            zeros = (Fraction(0),) * (_degree(conductor) - 1)
            return CycloNumber(conductor, (self.coords[0], *zeros))
        step = conductor // self.conductor
        dense = [Fraction(0)] * (step * len(self.coords))
        for i, c in enumerate(self.coords):
            dense[i * step] = c
        return CycloNumber(conductor, _reduce(dense, conductor))

    def _align(
        self: "CycloNumber", other: "CycloNumber | Scalar"
    ) -> tuple["CycloNumber", "CycloNumber"]:
        if not isinstance(other, CycloNumber):
            other = CycloNumber.from_int(other)
        n = lcm(self.conductor, other.conductor)
        return self.embed(n), other.embed(n)

    def __add__(
        self: "CycloNumber", other: "CycloNumber | Scalar"
    ) -> "CycloNumber":
        a, b = self._align(other)
        return CycloNumber(
            a.conductor, tuple(x + y for x, y in zip(a.coords, b.coords))
        )

    __radd__ = __add__

    def __neg__(self: "CycloNumber") -> "CycloNumber":
        return CycloNumber(self.conductor, tuple(-c for c in self.coords))

    def __sub__(
        self: "CycloNumber", other: "CycloNumber | Scalar"
    ) -> "CycloNumber":
        return self + (-other)

    def __rsub__(self: "CycloNumber", other: Scalar) -> "CycloNumber":
        return (-self) + other

    def __mul__(
        self: "CycloNumber", other: "CycloNumber | Scalar"
    ) -> "CycloNumber":
        if not isinstance(other, CycloNumber):
            scalar = Fraction(other)
            return CycloNumber(
                self.conductor, tuple(c * scalar for c in self.coords)
            )
        if other.conductor == 1:
            return self * other.coords[0]
        if self.conductor == 1:
            return other * self.coords[0]
        a, b = self._align(other)
        product = _to_poly(a.coords) * _to_poly(b.coords)
        return CycloNumber(a.conductor, _from_poly(product, a.conductor))

    __rmul__ = __mul__

    def inverse(self: "CycloNumber") -> "CycloNumber":
        if self.is_zero():
            msg = "division by zero"
            raise ZeroDivisionError(msg)
        inv = _to_poly(self.coords).invert(_cyclotomic(self.conductor))
        return CycloNumber(self.conductor, _from_poly(inv, self.conductor))

    def __truediv__(
        self: "CycloNumber", other: "CycloNumber | Scalar"
    ) -> "CycloNumber":
        if not isinstance(other, CycloNumber):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self: "CycloNumber", other: Scalar) -> "CycloNumber":
        return self.inverse() * other

    def galois_action(self: "CycloNumber", k: int) -> "CycloNumber":
        """ζ_N ↦ ζ_N^k で作用させる (k は N と素)"""
        if gcd(k, self.conductor) != 1:
            msg = f"{k} is not a unit modulo {self.conductor}"
            raise ValueError(msg)
        n = self.conductor
        dense = [Fraction(0)] * n
        for i, c in enumerate(self.coords):
            dense[i * k % n] += c
        return CycloNumber(n, _reduce(dense, n))

    def conjugate(self: "CycloNumber") -> "CycloNumber":
        return self.galois_action(-1 % self.conductor or 1)

    def is_zero(self: "CycloNumber") -> bool:
        return all(c == 0 for c in self.coords)

    def rational_value(self: "CycloNumber") -> Fraction | None:
        """有理数ならその値、そうでなければ None"""
        if all(c == 0 for c in self.coords[1:]):
            return self.coords[0]
        return None

    def normalized_trace(self: "CycloNumber") -> Fraction:
        """Tr_{Q(ζ_N)/Q} を拡大次数で割った値 (導手に依らない)"""
        n = self.conductor
        total = Fraction(0)
        for i, c in enumerate(self.coords):
            m = n // gcd(i, n)
            total += c * Fraction(_mobius(m), _degree(m))
        return total

    def __eq__(self: "CycloNumber", other: object) -> bool:
        if isinstance(other, int | Fraction):
            other = CycloNumber.from_int(other)
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = self._align(other)
        return a.coords == b.coords

    def __hash__(self: "CycloNumber") -> int:
        return hash(self.normalized_trace())

    def __repr__(self: "CycloNumber") -> str:
        value = self.rational_value()
        if value is not None:
            return f"CycloNumber({value})"
        coords = ", ".join(str(c) for c in self.coords)
        return f"CycloNumber(N={self.conductor}, [{coords}])"

    def to_dict(self: "CycloNumber") -> CycloNumberDict:
        return {
            "conductor": self.conductor,
            "coords": [f"{c.numerator}/{c.denominator}" for c in self.coords],
        }

    @classmethod
    def from_dict(
        cls: type["CycloNumber"], data: CycloNumberDict
    ) -> "CycloNumber":
        return cls(
            data["conductor"], tuple(Fraction(c) for c in data["coords"])
        )


def cyc_add(a: CycloNumber, b: CycloNumber) -> CycloNumber:
    return a + b


def cyc_mul(a: CycloNumber, b: CycloNumber) -> CycloNumber:
    return a * b


def cyc_eq(a: CycloNumber, b: CycloNumber) -> bool:
    return a == b

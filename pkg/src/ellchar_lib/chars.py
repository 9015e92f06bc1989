"""T = L^× の滑らかな指標

指標は T_h 上の指標 (T_O への制限) と一意化元の値の組で表す。標数0の
係数では一意化元の値を ℓ^v·u (v は有理数、u は1の冪根) と書く。
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TypedDict

from more_itertools import unique_everseen
from sympy import multiplicity

from ellchar_lib.cyclo import (
    Coefficient,
    CoefficientDict,
    RootOfUnity,
    is_ell_regular,
    r_ell_project,
)
from ellchar_lib.fgab import (
    AbChar,
    AbCharDict,
    dual_enumerate,
    ell_power_characters,
    ell_prime_characters,
)
from ellchar_lib.limits import ENUMERATION_CAP, check_cap
from ellchar_lib.torus import (
    TorusLevel,
    filtration_subgroup,
    frobenius_power,
    truncation,
)


class UniformizerValueDict(TypedDict):
    valuation: str
    unit_part: str


@dataclass(frozen=True, slots=True)
class UniformizerValue:
    """θ(ϖ) = ℓ^valuation · unit_part"""

    valuation: Fraction = Fraction(0)
    unit_part: RootOfUnity = field(default_factory=RootOfUnity.identity)

    def __mul__(
        self: "UniformizerValue", other: "UniformizerValue"
    ) -> "UniformizerValue":
        return UniformizerValue(
            self.valuation + other.valuation, self.unit_part + other.unit_part
        )

    def to_dict(self: "UniformizerValue") -> UniformizerValueDict:
        return {
            "valuation": str(self.valuation),
            "unit_part": str(self.unit_part),
        }

    @classmethod
    def from_dict(
        cls: type["UniformizerValue"], data: UniformizerValueDict
    ) -> "UniformizerValue":
        return cls(
            Fraction(data["valuation"]), RootOfUnity.parse(data["unit_part"])
        )


class TorusCharDict(TypedDict):
    q: int
    n: int
    h: int
    level_part: AbCharDict
    uniformizer: UniformizerValueDict
    coefficient: CoefficientDict


@dataclass(frozen=True, slots=True)
class TorusChar:
    """T の滑らかな指標"""

    torus: TorusLevel
    level_part: AbChar
    uniformizer: UniformizerValue = field(default_factory=UniformizerValue)
    coefficient: Coefficient = field(default_factory=Coefficient.char0)

    def __post_init__(self: "TorusChar") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            mod ℓ 指標が ℓ' 値でない時に送出
        """
        if self.level_part.domain != self.torus.unit_group:
            msg = "level part is not a character of the given torus"
            raise ValueError(msg)
        if self.coefficient.is_modular:
            ell = self.coefficient.prime
            if self.uniformizer.valuation != 0:
                msg = "mod-ell characters must have valuation 0"
                raise ValueError(msg)
            values = [*self.level_part.values, self.uniformizer.unit_part]
            if not all(is_ell_regular(v, ell) for v in values):
                msg = f"mod-{ell} characters must have {ell}'-order values"
                raise ValueError(msg)

    def to_dict(self: "TorusChar") -> TorusCharDict:
        return {
            "q": self.torus.q,
            "n": self.torus.n,
            "h": self.torus.h,
            "level_part": self.level_part.to_dict(),
            "uniformizer": self.uniformizer.to_dict(),
            "coefficient": self.coefficient.to_dict(),
        }

    @classmethod
    def from_dict(
        cls: type["TorusChar"], torus: TorusLevel, data: TorusCharDict
    ) -> "TorusChar":
        if (data["q"], data["n"], data["h"]) != torus.key:
            msg = "character data belongs to a different torus"
            raise ValueError(msg)
        return cls(
            torus,
            AbChar.from_dict(torus.unit_group, data["level_part"]),
            UniformizerValue.from_dict(data["uniformizer"]),
            Coefficient.from_dict(data["coefficient"]),
        )


def ell_valuation(q: int, n: int, ell: int) -> int:
    """m = v_ℓ(q^n - 1)

    Examples
    --------
    >>> ell_valuation(2, 2, 3)
    1
    >>> ell_valuation(2, 2, 5)
    0
    """
    return int(multiplicity(ell, q**n - 1))


def restrict_to_units(theta: TorusChar, a: int = 1) -> AbChar:
    """θ|_{T^a}"""
    _, inclusion = filtration_subgroup(theta.torus, a)
    return theta.level_part.compose(inclusion)


def level(theta: TorusChar) -> int:
    """T_a を経由する最小の a

    Examples
    --------
    >>> from ellchar_lib.torus import build_torus
    >>> T = build_torus(2, 2, 2)
    >>> sorted(level(c) for c in enumerate_characters(T)).count(1)
    3
    """
    for a in range(theta.torus.h - 1, 0, -1):
        if not restrict_to_units(theta, a).is_trivial():
            return a + 1
    return 1


def frobenius_twist(theta: TorusChar, k: int = 1) -> TorusChar:
    """θ ∘ Frob^k"""
    frob = frobenius_power(theta.torus, k)
    return TorusChar(
        theta.torus,
        theta.level_part.compose(frob),
        theta.uniformizer,
        theta.coefficient,
    )


def galois_orbit(theta: TorusChar) -> list[TorusChar]:
    return list(
        unique_everseen(
            frobenius_twist(theta, k) for k in range(theta.torus.n)
        )
    )


def stabilizer_order(theta: TorusChar) -> int:
    return theta.torus.n // len(galois_orbit(theta))


def is_general(theta: TorusChar) -> bool:
    """Gal(L/K) の固定部分群が自明か

    一意化元の値は Frobenius で不変なので T_O への制限だけで決まる。
    """
    return len(galois_orbit(theta)) == theta.torus.n


def is_strongly_general(theta: TorusChar) -> bool:
    """θ|_{T^1} の固定部分群が自明か"""
    restrictions = {
        restrict_to_units(frobenius_twist(theta, k))
        for k in range(theta.torus.n)
    }
    return len(restrictions) == theta.torus.n


def is_integral(theta: TorusChar) -> bool:
    return theta.uniformizer.valuation == 0


def r_ell(theta: TorusChar, ell: int) -> TorusChar:
    """値を ℓ' 部分に射影して mod ℓ 指標にする

    Raises
    ------
    ValueError
        θ が整でない (一意化元の付値が 0 でない) 時に送出
    """
    if not is_integral(theta):
        msg = (
            f"character is not integral: valuation "
            f"{theta.uniformizer.valuation} at the uniformizer"
        )
        raise ValueError(msg)
    return TorusChar(
        theta.torus,
        theta.level_part.r_ell(ell),
        UniformizerValue(
            Fraction(0), r_ell_project(theta.uniformizer.unit_part, ell)
        ),
        Coefficient.mod(ell),
    )


def teichmueller_lift(psi: TorusChar) -> TorusChar:
    """mod ℓ 指標の Teichmüller 持ち上げ (r_ℓ の標準的な切断)"""
    if not psi.coefficient.is_modular:
        msg = "only mod-ell characters have a Teichmüller lift"
        raise ValueError(msg)
    return TorusChar(
        psi.torus,
        psi.level_part,
        psi.uniformizer,
        Coefficient.char0(),
    )


def lifts_enum(psi: TorusChar) -> list[TorusChar]:
    """r_ℓ による psi の持ち上げ (一意化元は Teichmüller 値) を列挙

    Examples
    --------
    >>> from ellchar_lib.torus import build_torus
    >>> T = build_torus(2, 2, 1)
    >>> psi = enumerate_characters(T, coefficient=Coefficient.mod(3))[0]
    >>> len(lifts_enum(psi))
    3
    """
    base = teichmueller_lift(psi)
    ell = psi.coefficient.prime
    return [
        TorusChar(
            base.torus,
            base.level_part + eta,
            base.uniformizer,
            base.coefficient,
        )
        for eta in ell_power_characters(psi.torus.unit_group, ell)
    ]


def rectifier(
    n: int, coefficient: Coefficient, *, torus: TorusLevel
) -> TorusChar:
    """ϖ ↦ (-1)^{n-1}、T_O 上自明な指標 μ

    Examples
    --------
    >>> from ellchar_lib.torus import build_torus
    >>> mu = rectifier(2, Coefficient.char0(), torus=build_torus(2, 2, 1))
    >>> str(mu.uniformizer.unit_part)
    '1/2'
    """
    if n < 1 or n != torus.n:
        msg = f"rectifier degree {n} does not match the torus degree"
        raise ValueError(msg)
    sign = RootOfUnity.of(n - 1, 2)
    if coefficient.is_modular:
        sign = r_ell_project(sign, coefficient.prime)
    return TorusChar(
        torus,
        AbChar.trivial(torus.unit_group),
        UniformizerValue(Fraction(0), sign),
        coefficient,
    )


def char_mul(theta: TorusChar, other: TorusChar) -> TorusChar:
    if theta.torus != other.torus or theta.coefficient != other.coefficient:
        msg = "characters live on different tori or coefficients"
        raise ValueError(msg)
    return TorusChar(
        theta.torus,
        theta.level_part + other.level_part,
        theta.uniformizer * other.uniformizer,
        theta.coefficient,
    )


def inflate(theta: TorusChar, target: TorusLevel) -> TorusChar:
    """T_{h'} → T_h に沿って引き戻す"""
    return TorusChar(
        target,
        theta.level_part.compose(truncation(target, theta.torus)),
        theta.uniformizer,
        theta.coefficient,
    )


def enumerate_characters(
    torus: TorusLevel,
    *,
    uniformizer: UniformizerValue | None = None,
    coefficient: Coefficient | None = None,
    strongly_general: bool = False,
    cap: int = ENUMERATION_CAP,
) -> list[TorusChar]:
    """T_h の指標を全て列挙する

    mod ℓ 係数では ℓ' 位数の値をとる指標だけを返す。

    Parameters
    ----------
    torus : TorusLevel
        T_h
    uniformizer : UniformizerValue | None, optional
        一意化元の値 (既定は 1)
    coefficient : Coefficient | None, optional
        係数 (既定は標数0)
    strongly_general : bool, optional
        強一般の位置にある指標だけに絞る
    cap : int, optional
        列挙の上限

    Returns
    -------
    list[TorusChar]
        指標
    """
    uniformizer = uniformizer or UniformizerValue()
    coefficient = coefficient or Coefficient.char0()
    check_cap(torus.order, cap, "character group")
    if coefficient.is_modular:
        parts = ell_prime_characters(torus.unit_group, coefficient.prime)
    else:
        parts = dual_enumerate(torus.unit_group, cap=cap)
    chars = [TorusChar(torus, c, uniformizer, coefficient) for c in parts]
    if strongly_general:
        chars = [c for c in chars if is_strongly_general(c)]
    return chars

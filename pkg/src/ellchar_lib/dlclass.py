"""全空間の類 M(θ) とその mod ℓ 還元、還元の図式の検証

M(θ) = (-1)^cd(θ) cInd_{ZG_O}^G [H_c(Ẋ_h)_θ] は有限レベルの類 (G_h 上の
GClass) と中心指標 θ の組で記号的に表す。有限レベルの類は外から与える
(provider)。
"""

import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, TypedDict

from pydantic import BaseModel

from ellchar_lib.chaincx import (
    CoeffSpec,
    PermComplex,
    euler_class,
    make_torsor_complex,
    stability_shift,
)
from ellchar_lib.chars import (
    TorusChar,
    TorusCharDict,
    UniformizerValue,
    ell_valuation,
    enumerate_characters,
    inflate,
    is_general,
    is_strongly_general,
    level,
    lifts_enum,
    r_ell,
    restrict_to_units,
)
from ellchar_lib.cyclo import Coefficient, RootOfUnity, r_ell_project
from ellchar_lib.fgab import AbChar, reduction_fiber
from ellchar_lib.fields import splitting_degree
from ellchar_lib.ggroup import (
    FinGroup,
    GClass,
    GClassDict,
    decomposition_map,
    gl_reduction,
    gl_truncated,
    naive_isotypic,
)
from ellchar_lib.torus import build_torus
from ellchar_lib.weil import r_ell_param, sigma

logger = logging.getLogger(__name__)

INDUCTION_MARKER = "cInd_{ZG_O}^G"

FiniteLevelProvider = Callable[[TorusChar], GClass]
Positions = Literal["strong", "general"]


def describe(theta: TorusChar) -> str:
    """報告用の短い表記

    Examples
    --------
    >>> from ellchar_lib.chars import enumerate_characters
    >>> from ellchar_lib.torus import build_torus
    >>> describe(enumerate_characters(build_torus(2, 2, 1))[0])
    'T_1(q=2,n=2)[0/1] w->0/1 char0'
    """
    values = ",".join(str(v) for v in theta.level_part.values)
    q, n, h = theta.torus.key
    tag = (
        f"mod {theta.coefficient.prime}"
        if theta.coefficient.is_modular
        else "char0"
    )
    unit = theta.uniformizer.unit_part
    valuation = theta.uniformizer.valuation
    twist = f" l^{valuation}" if valuation else ""
    return f"T_{h}(q={q},n={n})[{values}] w->{unit}{twist} {tag}"


@dataclass(frozen=True, slots=True)
class CdFunction:
    """θ ↦ cd(θ) (符号 (-1)^cd の指数)"""

    name: str
    function: Callable[[TorusChar], int]

    def __call__(self: "CdFunction", theta: TorusChar) -> int:
        return int(self.function(theta))

    @classmethod
    def constant(cls: type["CdFunction"], value: int = 0) -> "CdFunction":
        return cls(f"constant({value})", lambda _: value)

    @classmethod
    def level_proxy(cls: type["CdFunction"]) -> "CdFunction":
        """θ|_{T^1} のレベル (T^1 への制限だけで決まる)"""
        return cls("level", level)

    @classmethod
    def uniformizer_dependent(cls: type["CdFunction"]) -> "CdFunction":
        """θ(ϖ) に依存する (検証が失敗するべき例)"""
        return cls(
            "uniformizer",
            lambda theta: int(not theta.uniformizer.unit_part.is_identity()),
        )

    def shifted(self: "CdFunction", k: int = 1) -> "CdFunction":
        return CdFunction(f"{self.name}+{k}", lambda t: self(t) + k)


class FullSpaceClassDict(TypedDict):
    finite_level: GClassDict
    central_char: TorusCharDict
    level_h: int
    sign_exponent: int
    induction: str


@dataclass(frozen=True, slots=True, eq=False)
class FullSpaceClass:
    """(-1)^sign_exponent cInd_{ZG_O}^G (finite_level)

    Z は central_char で作用する。finite_level は G_h (またはその商) 上の
    類。
    """

    finite_level: GClass
    central_char: TorusChar
    level_h: int
    sign_exponent: int
    induction_marker: str = INDUCTION_MARKER

    def __post_init__(self: "FullSpaceClass") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            係数が揃っていない、またはレベルが合わない時に送出
        """
        if self.finite_level.coefficient != self.central_char.coefficient:
            msg = "class and central character have different coefficients"
            raise ValueError(msg)
        if self.central_char.torus.h != self.level_h:
            msg = (
                f"central character lives on level {self.central_char.torus.h}"
                f", not {self.level_h}"
            )
            raise ValueError(msg)

    @property
    def n(self: "FullSpaceClass") -> int:
        return self.central_char.torus.n

    def signed(self: "FullSpaceClass") -> GClass:
        """(-1)^cd を掛けた有限レベルの類"""
        if self.sign_exponent % 2:
            return -self.finite_level
        return self.finite_level

    def is_zero(self: "FullSpaceClass") -> bool:
        return self.finite_level.is_zero()

    def to_dict(self: "FullSpaceClass") -> FullSpaceClassDict:
        return {
            "finite_level": self.finite_level.to_dict(),
            "central_char": self.central_char.to_dict(),
            "level_h": self.level_h,
            "sign_exponent": self.sign_exponent,
            "induction": self.induction_marker,
        }


def build_full_class(
    finite_level: GClass,
    theta: TorusChar,
    cd: CdFunction,
    *,
    level_h: int | None = None,
) -> FullSpaceClass:
    """有限レベルの類を中心指標と符号で包む

    Raises
    ------
    ValueError
        θ のレベルが level_h を超える時に送出
    """
    level_h = theta.torus.h if level_h is None else level_h
    if level(theta) > level_h:
        msg = f"character of level {level(theta)} exceeds level {level_h}"
        raise ValueError(msg)
    if level_h != theta.torus.h:
        torus = build_torus(theta.torus.q, theta.torus.n, level_h)
        theta = inflate(theta, torus)
    return FullSpaceClass(finite_level, theta, level_h, cd(theta))


def inflate_class(x: GClass, source: FinGroup, modulus: int) -> GClass:
    """G_{h'} → G_h (成分を modulus で割った余り) に沿って引き戻す

    Examples
    --------
    >>> G1, G2 = gl_truncated(2, 2, 1), gl_truncated(2, 2, 2)
    >>> one = GClass.trivial(G1, Coefficient.char0())
    >>> inflate_class(one, G2, 2).degree
    1
    """
    images = gl_reduction(source, x.group, modulus)
    return GClass.from_function(
        source, x.coefficient, lambda g: x.value_at(int(images[g]))
    )


def transport(
    x: FullSpaceClass,
    h: int,
    *,
    pullback: Callable[[GClass], GClass] | None = None,
) -> FullSpaceClass:
    """レベル h (≥ x.level_h) に移す

    次数のずれ 2(n-1)(h-h') は偶数なので符号は変わらない。pullback を
    与えると有限レベルの類をそれで G_h に引き戻す。

    Examples
    --------
    >>> from ellchar_lib.chars import enumerate_characters
    >>> G1 = gl_truncated(2, 2, 1)
    >>> theta = enumerate_characters(build_torus(2, 2, 1))[1]
    >>> x = build_full_class(
    ...     GClass.trivial(G1, theta.coefficient), theta, CdFunction.constant()
    ... )
    >>> y = transport(x, 2)
    >>> y.level_h, same_class(x, y)
    (2, True)
    """
    shift = stability_shift(x.n, h, x.level_h)
    torus = x.central_char.torus
    theta = inflate(x.central_char, build_torus(torus.q, torus.n, h))
    finite_level = x.finite_level if pullback is None else pullback(
        x.finite_level
    )
    logger.debug("transport to level %d with degree shift %d", h, shift)
    return FullSpaceClass(
        finite_level,
        theta,
        h,
        x.sign_exponent + shift,
        x.induction_marker,
    )


def same_class(x: FullSpaceClass, y: FullSpaceClass) -> bool:
    """低い方を高い方のレベルに移してから比べる

    Raises
    ------
    ValueError
        有限レベルの類が異なる群の上にある時に送出
    """
    if x.level_h > y.level_h:
        x, y = y, x
    if x.level_h < y.level_h:
        x = transport(x, y.level_h)
    if x.finite_level.group is not y.finite_level.group:
        msg = "finite-level classes live on different groups"
        raise ValueError(msg)
    return x.central_char == y.central_char and x.signed() == y.signed()


def reduce_full_class(x: FullSpaceClass, ell: int) -> FullSpaceClass:
    """有限レベルの類に分解写像、中心指標に r_ℓ を施す

    Raises
    ------
    ValueError
        中心指標が整でない、または既に mod ℓ の時に送出
    """
    if x.finite_level.coefficient.is_modular:
        msg = "class is already modular"
        raise ValueError(msg)
    return FullSpaceClass(
        decomposition_map(x.finite_level, ell),
        r_ell(x.central_char, ell),
        x.level_h,
        x.sign_exponent,
        x.induction_marker,
    )


@dataclass(frozen=True, slots=True, eq=False)
class SyntheticProvider:
    """種から作った T 自由な置換複体の θ 成分の Euler 類

    G は GL_n(F_q)、T は T_h。
    """

    complex: PermComplex

    @classmethod
    def build(
        cls: type["SyntheticProvider"],
        q: int,
        n: int,
        h: int,
        *,
        seed: int = 0,
        pieces: int = 3,
    ) -> "SyntheticProvider":
        torus = build_torus(q, n, h)
        group = gl_truncated(q, n, 1)
        return cls(
            make_torsor_complex(group, torus.unit_group, seed, pieces=pieces)
        )

    @property
    def group(self: "SyntheticProvider") -> FinGroup:
        return self.complex.g_group

    def __call__(self: "SyntheticProvider", theta: TorusChar) -> GClass:
        order = theta.level_part.order
        if theta.coefficient.is_modular:
            ell = theta.coefficient.prime
            spec = CoeffSpec.finite(ell, splitting_degree(order, ell))
        else:
            spec = CoeffSpec.cyclotomic(order)
        return euler_class(self.complex, spec, theta.level_part)


@dataclass(frozen=True, slots=True, eq=False)
class TamperedProvider:
    """Teichmüller 持ち上げ以外の持ち上げに自明な類を足す"""

    base: FiniteLevelProvider
    ell: int

    def __call__(self: "TamperedProvider", theta: TorusChar) -> GClass:
        x = self.base(theta)
        part = theta.level_part
        if not theta.coefficient.is_modular and part.r_ell(self.ell) != part:
            return x + GClass.trivial(x.group, x.coefficient)
        return x


class CheckResult(BaseModel):
    name: str
    passed: bool
    witness: str | None = None


class DiagramReport(BaseModel):
    q: int
    n: int
    h: int
    ell: int
    psi: str
    positions: str
    asserted: bool
    lifts: int
    checks: list[CheckResult]

    @property
    def passed(self: "DiagramReport") -> bool:
        return all(c.passed for c in self.checks)


def _first_failure(
    name: str, items: Iterable[tuple[bool, str]]
) -> CheckResult:
    for ok, witness in items:
        if not ok:
            return CheckResult(name=name, passed=False, witness=witness)
    return CheckResult(name=name, passed=True)


def _weil_check(theta: TorusChar, ell: int, target: object) -> bool:
    try:
        return r_ell_param(sigma(theta), ell) == target
    except RuntimeError:
        return False


def verify_diagram(  # noqa: PLR0913
    q: int,
    n: int,
    h: int,
    ell: int,
    psi: TorusChar,
    provider: FiniteLevelProvider,
    *,
    cd: CdFunction | None = None,
    positions: Positions = "strong",
) -> DiagramReport:
    """ψ の全ての持ち上げについて還元の図式を確かめる

    Parameters
    ----------
    q : int
        剰余体の位数
    n : int
        次数
    h : int
        レベル
    ell : int
        素数 ℓ
    psi : TorusChar
        T_h の mod ℓ 指標
    provider : FiniteLevelProvider
        指標から有限レベルの類を返す関数
    cd : CdFunction | None, optional
        符号の指数 (既定は定数 0)
    positions : Positions, optional
        "general" にすると一般の位置の指標でも実行し、結果を主張しない

    Returns
    -------
    DiagramReport
        各検査の結果

    Raises
    ------
    ValueError
        ψ が mod ℓ でない、または指定した位置にない時に送出

    Examples
    --------
    >>> from ellchar_lib.torus import build_torus
    >>> T = build_torus(2, 2, 2)
    >>> chars = enumerate_characters(T, coefficient=Coefficient.mod(5))
    >>> psi = next(c for c in chars if is_strongly_general(c))
    >>> provider = SyntheticProvider.build(2, 2, 2)
    >>> report = verify_diagram(2, 2, 2, 5, psi, provider)
    >>> report.lifts, report.passed
    (1, True)
    """
    cd = cd or CdFunction.constant()
    if psi.torus.key != (q, n, h):
        msg = f"character lives on {psi.torus!r}, not on ({q}, {n}, {h})"
        raise ValueError(msg)
    if not psi.coefficient.is_modular or psi.coefficient.prime != ell:
        msg = f"psi must be a mod-{ell} character"
        raise ValueError(msg)
    position = is_strongly_general if positions == "strong" else is_general
    if not position(psi):
        msg = f"psi is not in {positions} position: {describe(psi)}"
        raise ValueError(msg)
    lifts = lifts_enum(psi)
    m = ell_valuation(q, n, ell)
    target = sigma(psi)
    full = [build_full_class(provider(t), t, cd) for t in lifts]
    reduced = [reduce_full_class(x, ell) for x in full]
    direct = build_full_class(provider(psi), psi, cd)
    checks = [
        CheckResult(
            name="lift-count",
            passed=len(lifts) == ell**m,
            witness=None if len(lifts) == ell**m else f"{len(lifts)} lifts",
        ),
        _first_failure(
            "position", ((position(t), describe(t)) for t in lifts)
        ),
        _first_failure(
            "weil", ((_weil_check(t, ell, target), describe(t)) for t in lifts)
        ),
        _first_failure(
            "reduction",
            (
                (same_class(reduced[i], reduced[j]), describe(lifts[j]))
                for i, j in combinations(range(len(lifts)), 2)
            ),
        ),
        _first_failure(
            "square",
            (
                (same_class(x, direct), describe(t))
                for x, t in zip(reduced, lifts)
            ),
        ),
        _first_failure(
            "cd",
            (
                (x.sign_exponent == direct.sign_exponent, describe(t))
                for x, t in zip(full, lifts)
            ),
        ),
    ]
    report = DiagramReport(
        q=q,
        n=n,
        h=h,
        ell=ell,
        psi=describe(psi),
        positions=positions,
        asserted=positions == "strong",
        lifts=len(lifts),
        checks=checks,
    )
    logger.debug("diagram at %s: passed=%s", report.psi, report.passed)
    return report


class MultiplicityReport(BaseModel):
    ell: int
    lifts: int
    passed: bool
    factor: int | None
    lhs: list[str]
    rhs: list[str]
    witness: str | None = None


def naive_multiplicity_check(
    m: GClass, psi: AbChar, ell: int
) -> MultiplicityReport:
    """Σ_i r_ℓ(M[θ_i]) = r_ℓ(M)[ψ] を確かめる

    θ_i は ψ の持ち上げ全体。全ての r_ℓ(M[θ_i]) が等しい時は
    r_ℓ(M)[ψ] = ℓ^m·(共通の値) の ℓ^m を factor に入れる。

    Examples
    --------
    >>> from ellchar_lib.fgab import FinAb
    >>> from ellchar_lib.ggroup import (
    ...     abelian_group, cyclic_group, direct_product, regular_class,
    ... )
    >>> T = build_torus(2, 2, 1).unit_group
    >>> P = direct_product(cyclic_group(1), abelian_group(T))
    >>> M = regular_class(P, Coefficient.char0())
    >>> report = naive_multiplicity_check(M, AbChar.trivial(T), 3)
    >>> report.passed, report.factor, report.rhs
    (True, 3, ['CycloNumber(3)'])
    """
    if m.coefficient.is_modular:
        msg = "class must be in characteristic 0"
        raise ValueError(msg)
    lifts = reduction_fiber(psi, ell)
    parts = [
        decomposition_map(naive_isotypic(m, theta), ell) for theta in lifts
    ]
    lhs = parts[0]
    for x in parts[1:]:
        lhs = lhs + x
    rhs = naive_isotypic(decomposition_map(m, ell), psi.r_ell(ell))
    passed = lhs == rhs
    common = all(x == parts[0] for x in parts[1:])
    factor = len(lifts) if common and parts[0] * len(lifts) == rhs else None
    return MultiplicityReport(
        ell=ell,
        lifts=len(lifts),
        passed=passed,
        factor=factor,
        lhs=[repr(v) for v in lhs.values],
        rhs=[repr(v) for v in rhs.values],
        witness=None if passed else "sum of naive parts differs",
    )


GridPoint = tuple[int, int, int, int]


class CdReport(BaseModel):
    cd: str
    points: int
    passed: bool
    witness: str | None = None


def _uniformizer_values(ell: int) -> list[UniformizerValue]:
    minus = RootOfUnity.of(1, 2)
    values = [RootOfUnity.identity(), minus, r_ell_project(minus, ell)]
    return [UniformizerValue(unit_part=u) for u in dict.fromkeys(values)]


def cd_validate(cd: CdFunction, grid: Sequence[GridPoint]) -> CdReport:
    """cd が r_ℓ の各ファイバー上で一定で、θ|_{T^1} だけで決まるか

    Examples
    --------
    >>> cd_validate(CdFunction.constant(), [(2, 2, 2, 3)]).passed
    True
    >>> cd_validate(CdFunction.uniformizer_dependent(), [(2, 2, 1, 3)]).passed
    False
    """
    for q, n, h, ell in grid:
        torus = build_torus(q, n, h)
        mod = Coefficient.mod(ell)
        for u in _uniformizer_values(ell):
            reduced_u = UniformizerValue(
                unit_part=r_ell_project(u.unit_part, ell)
            )
            for psi in enumerate_characters(
                torus, uniformizer=reduced_u, coefficient=mod
            ):
                values = {cd(t): t for t in lifts_enum(psi)}
                if len(values) > 1:
                    a, b = list(values.values())[:2]
                    return CdReport(
                        cd=cd.name,
                        points=len(grid),
                        passed=False,
                        witness=f"{describe(a)} vs {describe(b)}",
                    )
        by_restriction: dict[AbChar, TorusChar] = {}
        for u in _uniformizer_values(ell):
            for theta in enumerate_characters(torus, uniformizer=u):
                key = restrict_to_units(theta)
                seen = by_restriction.setdefault(key, theta)
                if cd(seen) != cd(theta):
                    return CdReport(
                        cd=cd.name,
                        points=len(grid),
                        passed=False,
                        witness=f"{describe(seen)} vs {describe(theta)}",
                    )
    return CdReport(cd=cd.name, points=len(grid), passed=True)

"""Weil 群側のパラメータ σ(θ) と有限商でのモデル

σ(θ) = Ind_{W_L}^{W_K}(μθ) を Frobenius 軌道 [μθ] で表す。表現そのものは
有限商 Γ = A ⋊ Z/(ns) 上の誘導表現として構成する。ここで A は T_h の
(θ∘Frob^k)_k による像、s は (μθ)(ϖ) の位数で、F ∈ Z/(ns) は A に Frobenius
として作用する。
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from math import lcm
from typing import TypedDict

import numpy as np
from more_itertools import unique_everseen

from ellchar_lib.chars import (
    TorusChar,
    TorusCharDict,
    char_mul,
    galois_orbit,
    is_integral,
    r_ell,
    rectifier,
)
from ellchar_lib.cyclo import (
    Coefficient,
    CoefficientDict,
    CycloNumber,
    RootOfUnity,
)
from ellchar_lib.fgab import (
    AbChar,
    AbHom,
    Coords,
    DirectSum,
    FinAb,
    Presentation,
    direct_sum,
    structure_from_generators,
)
from ellchar_lib.ggroup import (
    FinGroup,
    GClass,
    Subgroup,
    abelian_group,
    induce,
    inner_product,
    subgroup_generated,
)
from ellchar_lib.limits import GROUP_ORDER_CAP, check_cap
from ellchar_lib.torus import frobenius_power

logger = logging.getLogger(__name__)

Values = tuple[RootOfUnity, ...]


def char_key(theta: TorusChar) -> tuple[object, ...]:
    """軌道の代表を決める全順序"""
    return (
        tuple((v.order, v.numerator) for v in theta.level_part.values),
        theta.uniformizer.valuation,
        theta.uniformizer.unit_part,
    )


class WeilParamDict(TypedDict):
    n: int
    orbit: list[TorusCharDict]
    coefficient: CoefficientDict
    irreducible: bool


@dataclass(frozen=True, slots=True)
class WeilParam:
    """n 次元の Weil 表現 (Frobenius 軌道で表す)"""

    n: int
    orbit: tuple[TorusChar, ...]
    coefficient: Coefficient

    def __post_init__(self: "WeilParam") -> None:
        """初期化後の入力値チェック

        Raises
        ------
        ValueError
            軌道が正規化されていない時に送出
        """
        if not self.orbit:
            msg = "orbit must not be empty"
            raise ValueError(msg)
        if list(self.orbit) != sorted(self.orbit, key=char_key):
            msg = "orbit must be sorted"
            raise ValueError(msg)

    @property
    def dimension(self: "WeilParam") -> int:
        return self.n

    def is_irreducible(self: "WeilParam") -> bool:
        return len(self.orbit) == self.n

    def to_dict(self: "WeilParam") -> WeilParamDict:
        return {
            "n": self.n,
            "orbit": [c.to_dict() for c in self.orbit],
            "coefficient": self.coefficient.to_dict(),
            "irreducible": self.is_irreducible(),
        }


def _param(n: int, chars: list[TorusChar], c: Coefficient) -> WeilParam:
    return WeilParam(n, tuple(sorted(chars, key=char_key)), c)


def sigma(theta: TorusChar, n: int | None = None) -> WeilParam:
    """θ ↦ [μθ] の Frobenius 軌道

    n を渡した場合はトーラスの次数と一致するか確かめる。

    Examples
    --------
    >>> from ellchar_lib.chars import enumerate_characters
    >>> from ellchar_lib.torus import build_torus
    >>> chars = enumerate_characters(build_torus(2, 2, 1))
    >>> [sigma(c).is_irreducible() for c in chars]
    [False, True, True]
    """
    if n is not None and n != theta.torus.n:
        msg = f"character lives on n={theta.torus.n}, not n={n}"
        raise ValueError(msg)
    mu = rectifier(theta.torus.n, theta.coefficient, torus=theta.torus)
    orbit = galois_orbit(char_mul(mu, theta))
    return _param(theta.torus.n, orbit, theta.coefficient)


def is_irreducible(param: WeilParam) -> bool:
    """Frobenius 軌道の長さが n か"""
    return param.is_irreducible()


def r_ell_param(param: WeilParam, ell: int) -> WeilParam:
    """軌道の各元を r_ℓ で還元する

    Raises
    ------
    ValueError
        係数が既に mod ℓ の時に送出
    RuntimeError
        還元した像が1つの軌道にならない時に送出
    """
    if param.coefficient.is_modular:
        msg = "parameter is already modular"
        raise ValueError(msg)
    reduced = list(unique_everseen(r_ell(c, ell) for c in param.orbit))
    if set(reduced) != set(galois_orbit(reduced[0])):
        msg = "reduction of an orbit is not a single orbit"
        raise RuntimeError(msg)
    return _param(param.n, reduced, Coefficient.mod(ell))


def separates_orbits(chars: Sequence[TorusChar]) -> bool:
    """σ(θ) = σ(θ') ⇔ θ と θ' が同じ Frobenius 軌道

    Examples
    --------
    >>> from ellchar_lib.chars import enumerate_characters
    >>> from ellchar_lib.torus import build_torus
    >>> separates_orbits(enumerate_characters(build_torus(2, 2, 2)))
    True
    """
    params: dict[WeilParam, frozenset[TorusChar]] = {}
    for theta in chars:
        orbit = frozenset(galois_orbit(theta))
        if params.setdefault(sigma(theta), orbit) != orbit:
            return False
    return len(set(params.values())) == len(params)


@dataclass(frozen=True, slots=True, eq=False)
class WeilModel:
    """有限商 Γ と、誘導元となる指標 (θ ごとに1つ)"""

    characters: tuple[TorusChar, ...]
    image: Presentation[Values]
    frobenius: AbHom
    period: int
    group: FinGroup
    base: Subgroup
    base_sum: DirectSum
    base_characters: tuple[AbChar, ...]

    @property
    def n(self: "WeilModel") -> int:
        return self.characters[0].torus.n

    def base_class(self: "WeilModel", i: int = 0) -> GClass:
        """base 上の1次元指標を類関数にしたもの"""
        chi = self.base_characters[i]
        ns = self.n * self.period
        a_group = self.image.group

        def value(h: int) -> CycloNumber:
            a, j = divmod(int(self.base.embedding[h]), ns)
            k = (j // self.n,) if self.period > 1 else ()
            x = self.base_sum.pair(a_group.element_at(a), k)
            return CycloNumber.from_root(chi(x))

        return GClass.from_function(
            self.base.group, Coefficient.char0(), value
        )


def _rotate(v: Values, n: int) -> Values:
    return tuple(
        v[i * n + (k + 1) % n] for i in range(len(v) // n) for k in range(n)
    )


def build_model(
    *thetas: TorusChar, cap: int = GROUP_ORDER_CAP
) -> WeilModel:
    """θ たちを同時に実現する有限商 Γ を構成する

    Parameters
    ----------
    *thetas : TorusChar
        同じ T_h 上の整な指標
    cap : int, optional
        |Γ| の上限

    Returns
    -------
    WeilModel
        モデル

    Raises
    ------
    ValueError
        指標が整でない、または異なる群の指標の時に送出

    Examples
    --------
    >>> from ellchar_lib.chars import UniformizerValue, enumerate_characters
    >>> from ellchar_lib.torus import build_torus
    >>> minus = UniformizerValue(unit_part=RootOfUnity.of(1, 2))
    >>> T = build_torus(2, 2, 1)
    >>> theta = enumerate_characters(T, uniformizer=minus)[1]
    >>> model = build_model(theta)
    >>> model.group.order, model.group.is_abelian()
    (6, False)
    """
    if not thetas:
        msg = "at least one character is required"
        raise ValueError(msg)
    torus = thetas[0].torus
    if any(t.torus != torus for t in thetas):
        msg = "characters live on different tori"
        raise ValueError(msg)
    if not all(is_integral(t) for t in thetas):
        msg = "only integral characters have a finite Weil model"
        raise ValueError(msg)
    n = torus.n
    frob = [frobenius_power(torus, k) for k in range(n)]

    def values(x: Coords) -> Values:
        return tuple(
            theta.level_part(frob[k].apply(x))
            for theta in thetas
            for k in range(n)
        )

    width = len(thetas) * n
    image = structure_from_generators(
        [values(b) for b in torus.unit_group.basis()],
        lambda a, b: tuple(x + y for x, y in zip(a, b)),
        (RootOfUnity.identity(),) * width,
        cap=cap,
    )
    a_group = image.group
    phi = AbHom.from_images(
        a_group,
        a_group,
        [image.to_coords[_rotate(g, n)] for g in image.generators],
    )
    units = [
        char_mul(
            rectifier(n, theta.coefficient, torus=torus), theta
        ).uniformizer.unit_part
        for theta in thetas
    ]
    period = lcm(*(u.order for u in units))
    ns = n * period
    check_cap(a_group.order * ns, cap, "Weil quotient")
    group = _semidirect(a_group, phi, n, ns)
    base = subgroup_generated(
        group,
        [a_group.index(b) * ns for b in a_group.basis()] + [n % ns],
        name="base",
    )
    cyclic = FinAb((period,)) if period > 1 else FinAb()
    base_sum = direct_sum(a_group, cyclic)
    base_characters = []
    for i, u in enumerate(units):

        def chi(x: Coords, i: int = i, u: RootOfUnity = u) -> RootOfUnity:
            a, k = base_sum.split(x)
            k0 = k[0] if k else 0
            return image.from_coords[a][i * n] + u * k0

        base_characters.append(
            AbChar(
                base_sum.group,
                tuple(chi(b) for b in base_sum.group.basis()),
            )
        )
    logger.debug(
        "Weil model: A = %s, period %d, |Gamma| = %d",
        a_group,
        period,
        group.order,
    )
    return WeilModel(
        tuple(thetas),
        image,
        phi,
        period,
        group,
        base,
        base_sum,
        tuple(base_characters),
    )


def _semidirect(a_group: FinAb, phi: AbHom, n: int, ns: int) -> FinGroup:
    """A ⋊ Z/(ns) (元 (a, j) の番号は index(a)·ns + j)"""
    add = abelian_group(a_group).table
    elements = a_group.elements()
    powers = np.empty((n, len(elements)), dtype=np.int64)
    powers[0] = np.arange(len(elements))
    step = np.array(
        [a_group.index(phi.apply(a)) for a in elements], dtype=np.int64
    )
    for k in range(1, n):
        powers[k] = step[powers[k - 1]]
    idx = np.arange(len(elements) * ns)
    a_idx, j = np.divmod(idx, ns)
    # (a, j)(b, k) = (a + φ^j(b), j + k)
    moved = powers[(j % n)[:, None], a_idx[None, :]]
    table = add[a_idx[:, None], moved] * ns + (j[:, None] + j[None, :]) % ns
    return FinGroup.from_table(
        table,
        name=f"({a_group}) x| Z/{ns}",
        labels=[(int(a), int(b)) for a, b in zip(a_idx, j)],
    )


def induced_character(model: WeilModel, i: int = 0) -> GClass:
    """Γ 上の n 次元表現 Ind_base^Γ χ_i の指標"""
    return induce(model.base, model.base_class(i))


def mackey_restrict(model: WeilModel, i: int = 0) -> list[AbChar]:
    """Res_base Ind χ_i = ⊕_g χ_i∘F^g の各成分"""
    chi = model.base_characters[i]
    base_sum = model.base_sum
    conjugates = []
    for g in range(model.n):
        phi = model.frobenius.power(g)
        images = []
        for b in base_sum.group.basis():
            a, k = base_sum.split(b)
            images.append(base_sum.pair(phi.apply(a), k))
        twist = AbHom.from_images(base_sum.group, base_sum.group, images)
        conjugates.append(chi.compose(twist))
    return conjugates


def intertwining_number(
    theta: TorusChar, other: TorusChar, *, cap: int = GROUP_ORDER_CAP
) -> int:
    """<σ(θ), σ(θ')> を同じ有限商の上で計算する

    Examples
    --------
    >>> from ellchar_lib.chars import enumerate_characters
    >>> from ellchar_lib.torus import build_torus
    >>> a, b, c = enumerate_characters(build_torus(2, 2, 1))
    >>> intertwining_number(b, b), intertwining_number(b, c)
    (1, 1)
    >>> intertwining_number(a, a), intertwining_number(a, b)
    (2, 0)
    """
    model = build_model(theta, other, cap=cap)
    value = inner_product(
        induced_character(model, 0), induced_character(model, 1)
    ).rational_value()
    if value is None or value.denominator != 1:
        msg = "inner product of characters is not an integer"
        raise RuntimeError(msg)
    return int(value)

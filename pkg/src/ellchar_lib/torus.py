"""単位群 T_h = (F_{q^n}[ϖ]/ϖ^h)^× と Frobenius 作用

等標数のモデル K = F_q((ϖ)), L = F_{q^n}((ϖ)) で T_h を具体的に構成する。
元は F_{q^n} の元の整数表現を並べたタプル (a_0, …, a_{h-1}) で表す。
"""

import logging
from dataclasses import dataclass
from functools import cache
from typing import TypedDict

import numpy as np
from sympy import factorint

from ellchar_lib.fgab import (
    AbHom,
    Coords,
    FinAb,
    Presentation,
    structure_from_generators,
    subgroup,
)
from ellchar_lib.fields import (
    FieldDescriptor,
    FiniteField,
    dlog_table,
    make_field,
)
from ellchar_lib.limits import ENUMERATION_CAP, check_cap

logger = logging.getLogger(__name__)

Unit = tuple[int, ...]


def prime_power(q: int) -> tuple[int, int]:
    """q = p^f を分解する

    Examples
    --------
    >>> prime_power(9)
    (3, 2)
    """
    factors = factorint(q)
    if q < 2 or len(factors) != 1:  # noqa: PLR2004
        msg = f"{q} is not a prime power"
        raise ValueError(msg)
    [(p, f)] = factors.items()
    return int(p), int(f)


class TorusDescriptor(TypedDict):
    q: int
    n: int
    h: int
    order: int
    invariant_factors: list[int]
    frobenius: list[list[int]]
    filtration_orders: list[int]
    residue_field: FieldDescriptor


@dataclass(frozen=True, slots=True, eq=False)
class TorusLevel:
    """有限群 T_h と Frobenius"""

    q: int
    n: int
    h: int
    residue_field: FiniteField
    unit_group: FinAb
    structure_map: Presentation[Unit]
    frobenius: AbHom

    @property
    def key(self: "TorusLevel") -> tuple[int, int, int]:
        return self.q, self.n, self.h

    def __eq__(self: "TorusLevel", other: object) -> bool:
        if not isinstance(other, TorusLevel):
            return NotImplemented
        return self.key == other.key

    def __hash__(self: "TorusLevel") -> int:
        return hash(self.key)

    def __repr__(self: "TorusLevel") -> str:
        return f"TorusLevel(q={self.q}, n={self.n}, h={self.h})"

    @property
    def order(self: "TorusLevel") -> int:
        return self.unit_group.order

    def mul(self: "TorusLevel", x: Unit, y: Unit) -> Unit:
        return unit_mul(self.residue_field, x, y)

    def coords(self: "TorusLevel", x: Unit) -> Coords:
        return self.structure_map.to_coords[x]

    def unit(self: "TorusLevel", c: Coords) -> Unit:
        return self.structure_map.from_coords[self.unit_group.reduce(c)]

    def frobenius_unit(self: "TorusLevel", x: Unit) -> Unit:
        """係数ごとの q 乗"""
        gf = self.residue_field.gf
        return tuple(int(gf(a) ** self.q) for a in x)

    def to_dict(self: "TorusLevel") -> TorusDescriptor:
        return {
            "q": self.q,
            "n": self.n,
            "h": self.h,
            "order": self.order,
            "invariant_factors": list(self.unit_group.invariant_factors),
            "frobenius": [list(row) for row in self.frobenius.matrix],
            "filtration_orders": [
                filtration_subgroup(self, a)[0].order
                for a in range(1, self.h + 1)
            ],
            "residue_field": self.residue_field.to_dict(),
        }


def unit_mul(f: FiniteField, x: Unit, y: Unit) -> Unit:
    """ϖ^h を法とする多項式の積"""
    product = np.convolve(f.gf(list(x)), f.gf(list(y)))[: len(x)]
    return tuple(int(c) for c in product)


def _one(h: int) -> Unit:
    return (1,) + (0,) * (h - 1)


def teichmueller_unit(a: int, h: int) -> Unit:
    return (a,) + (0,) * (h - 1)


def one_unit_generators(f: FiniteField, h: int, a: int) -> list[Unit]:
    """T^a_h を生成する 1 + b ϖ^i (b は F_p 基底、a ≤ i < h)"""
    gens = []
    for i in range(a, h):
        for j in range(f.degree):
            x = [0] * h
            x[0] = 1
            x[i] = f.characteristic**j
            gens.append(tuple(x))
    return gens


@cache
def _build_torus(q: int, n: int, h: int) -> TorusLevel:
    p, e = prime_power(q)
    f = make_field(p, e * n)
    gens = [teichmueller_unit(f.gen().value, h)]
    gens += one_unit_generators(f, h, 1)
    pres = structure_from_generators(
        gens, lambda x, y: unit_mul(f, x, y), _one(h)
    )
    gf = f.gf
    frob_images = [
        pres.to_coords[tuple(int(gf(a) ** q) for a in g)]
        for g in pres.generators
    ]
    frobenius = AbHom.from_images(pres.group, pres.group, frob_images)
    torus = TorusLevel(q, n, h, f, pres.group, pres, frobenius)
    if frobenius.power(n) != AbHom.identity(pres.group):
        msg = "Frobenius does not have order dividing n"
        raise RuntimeError(msg)
    logger.debug("built T_%d for q=%d n=%d: %s", h, q, n, pres.group)
    return torus


def build_torus(
    q: int, n: int, h: int, *, cap: int = ENUMERATION_CAP
) -> TorusLevel:
    """T_h を構成する

    Parameters
    ----------
    q : int
        剰余体の位数 (素数冪)
    n : int
        L/K の次数
    h : int
        レベル
    cap : int, optional
        q^{nh} の上限

    Returns
    -------
    TorusLevel
        構成した群

    Raises
    ------
    CapExceededError
        q^{nh} が上限を超えた時に送出

    Examples
    --------
    >>> str(build_torus(2, 2, 2).unit_group)
    'Z/2 x Z/6'
    >>> build_torus(3, 1, 2).order
    6
    """
    prime_power(q)
    if n < 1 or h < 1:
        msg = "n and h must be positive"
        raise ValueError(msg)
    check_cap(q ** (n * h), cap, "truncated unit ring")
    return _build_torus(q, n, h)


def verify_structure(
    torus: TorusLevel, samples: int = 64, seed: int = 0
) -> bool:
    """座標写像が準同型であることを無作為な積で確かめる"""
    rng = np.random.default_rng(seed)
    group = torus.unit_group
    for _ in range(samples):
        a = group.element_at(int(rng.integers(group.order)))
        b = group.element_at(int(rng.integers(group.order)))
        product = torus.mul(torus.unit(a), torus.unit(b))
        if torus.coords(product) != group.add(a, b):
            return False
    return True


@cache
def filtration_subgroup(torus: TorusLevel, a: int) -> tuple[FinAb, AbHom]:
    """T^a_h = {x ≡ 1 mod ϖ^a} と包含写像

    Examples
    --------
    >>> T = build_torus(2, 2, 2)
    >>> str(filtration_subgroup(T, 1)[0])
    'Z/2 x Z/2'
    >>> filtration_subgroup(T, 2)[0].order
    1
    """
    if not 1 <= a <= torus.h:
        msg = f"filtration index {a} is out of range [1, {torus.h}]"
        raise ValueError(msg)
    gens = one_unit_generators(torus.residue_field, torus.h, a)
    return subgroup(torus.unit_group, [torus.coords(g) for g in gens])


@cache
def frobenius_power(torus: TorusLevel, k: int) -> AbHom:
    """Frob^k (k は n を法として扱う)"""
    return torus.frobenius.power(k % torus.n)


def fixed_subgroup(torus: TorusLevel) -> tuple[FinAb, AbHom]:
    """F_q 係数の単位 (F_q[ϖ]/ϖ^h)^× と包含写像"""
    f = torus.residue_field
    _, e = prime_power(torus.q)
    beta = f.gen() ** ((f.order - 1) // (torus.q - 1))
    basis = [f.one()]
    for _ in range(1, e):
        basis.append(basis[-1] * beta)
    gens = [teichmueller_unit(beta.value, torus.h)]
    for i in range(1, torus.h):
        for b in basis:
            x = [1] + [0] * (torus.h - 1)
            x[i] = b.value
            gens.append(tuple(x))
    return subgroup(torus.unit_group, [torus.coords(g) for g in gens])


def truncation(source: TorusLevel, target: TorusLevel) -> AbHom:
    """T_{h'} → T_h (h ≤ h')"""
    if (source.q, source.n) != (target.q, target.n) or target.h > source.h:
        msg = f"no truncation map from {source} to {target}"
        raise ValueError(msg)
    images = [
        target.coords(g[: target.h]) for g in source.structure_map.generators
    ]
    return AbHom.from_images(source.unit_group, target.unit_group, images)


@dataclass(frozen=True, slots=True)
class SplitSequence:
    """1 → T^1_h → T_h → T_1 → 1 と Teichmüller による分裂"""

    kernel: FinAb
    quotient: FinAb
    inclusion: AbHom
    projection: AbHom
    splitting: AbHom
    quotient_frobenius: AbHom


def split_ses(torus: TorusLevel) -> SplitSequence:
    """完全列の分裂を求め、Frobenius 同変性を確かめる

    Examples
    --------
    >>> ses = split_ses(build_torus(2, 2, 2))
    >>> str(ses.kernel), str(ses.quotient)
    ('Z/2 x Z/2', 'Z/3')
    """
    f = torus.residue_field
    kernel, inclusion = filtration_subgroup(torus, 1)
    size = f.order - 1
    quotient = FinAb((size,)) if size > 1 else FinAb()
    table = dlog_table(f)
    projection = AbHom.from_images(
        torus.unit_group,
        quotient,
        [
            (int(table[g[0]]),) if size > 1 else ()
            for g in torus.structure_map.generators
        ],
    )
    teich = torus.coords(teichmueller_unit(f.gen().value, torus.h))
    splitting = AbHom.from_images(
        quotient, torus.unit_group, [teich][: quotient.rank]
    )
    quotient_frobenius = AbHom.from_images(
        quotient, quotient, [(torus.q,)][: quotient.rank]
    )
    ses = SplitSequence(
        kernel, quotient, inclusion, projection, splitting, quotient_frobenius
    )
    checks = {
        "section": projection.compose(splitting) == AbHom.identity(quotient),
        "exactness": projection.compose(inclusion)
        == AbHom.zero(kernel, quotient),
        "order": kernel.order * quotient.order == torus.order,
        "equivariance": splitting.compose(quotient_frobenius)
        == torus.frobenius.compose(splitting),
    }
    if failed := [name for name, ok in checks.items() if not ok]:
        msg = f"split exact sequence check failed: {', '.join(failed)}"
        raise RuntimeError(msg)
    return ses

import pytest

from ellchar_lib.fgab import AbHom
from ellchar_lib.limits import CapExceededError
from ellchar_lib.torus import (
    build_torus,
    filtration_subgroup,
    fixed_subgroup,
    frobenius_power,
    prime_power,
    split_ses,
    truncation,
    unit_mul,
    verify_structure,
)


@pytest.mark.parametrize(
    ("in_q", "out_p", "out_f"),
    [
        pytest.param(2, 2, 1),
        pytest.param(9, 3, 2),
        pytest.param(8, 2, 3),
        pytest.param(25, 5, 2),
    ],
)
def test_prime_power(in_q: int, out_p: int, out_f: int) -> None:
    assert prime_power(in_q) == (out_p, out_f)


@pytest.mark.parametrize("in_q", [0, 1, 6, 12])
def test_prime_power_invalid(in_q: int) -> None:
    with pytest.raises(ValueError, match="is not a prime power"):
        prime_power(in_q)


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "out_order", "out_group"),
    [
        pytest.param(2, 1, 1, 1, "1"),
        pytest.param(2, 2, 1, 3, "Z/3"),
        pytest.param(2, 2, 2, 12, "Z/2 x Z/6"),
        pytest.param(3, 1, 2, 6, "Z/6"),
        pytest.param(2, 3, 1, 7, "Z/7"),
        pytest.param(3, 2, 1, 8, "Z/8"),
    ],
)
def test_build_torus(
    in_q: int, in_n: int, in_h: int, out_order: int, out_group: str
) -> None:
    torus = build_torus(in_q, in_n, in_h)
    assert torus.order == out_order
    assert torus.order == (in_q**in_n - 1) * in_q ** (in_n * (in_h - 1))
    assert str(torus.unit_group) == out_group
    assert verify_structure(torus)
    assert frobenius_power(torus, in_n) == AbHom.identity(torus.unit_group)


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "out_error_msg"),
    [
        pytest.param(6, 1, 1, "is not a prime power"),
        pytest.param(2, 0, 1, "n and h must be positive"),
        pytest.param(2, 1, 0, "n and h must be positive"),
    ],
)
def test_build_torus_invalid(
    in_q: int, in_n: int, in_h: int, out_error_msg: str
) -> None:
    with pytest.raises(ValueError, match=out_error_msg):
        build_torus(in_q, in_n, in_h)


def test_build_torus_cap() -> None:
    with pytest.raises(CapExceededError, match="truncated unit ring"):
        build_torus(2, 2, 2, cap=8)


def test_torus_identity() -> None:
    a = build_torus(2, 2, 2)
    b = build_torus(2, 2, 2)
    assert a == b
    assert hash(a) == hash(b)
    assert a != build_torus(2, 2, 1)
    assert repr(a) == "TorusLevel(q=2, n=2, h=2)"


def test_unit_arithmetic() -> None:
    torus = build_torus(2, 2, 2)
    for c in torus.unit_group.elements():
        x = torus.unit(c)
        assert torus.coords(x) == c
        assert torus.mul(x, (1, 0)) == x
    f = torus.residue_field
    # (1 + ϖ)^2 = 1 mod ϖ^2
    assert unit_mul(f, (1, 1), (1, 1)) == (1, 0)


def test_frobenius_unit() -> None:
    torus = build_torus(2, 2, 1)
    g = torus.residue_field.gen()
    assert torus.frobenius_unit((g.value,)) == ((g**2).value,)
    assert torus.coords(torus.frobenius_unit((g.value,))) == (
        torus.frobenius.apply(torus.coords((g.value,)))
    )


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h"),
    [
        pytest.param(2, 2, 2),
        pytest.param(2, 1, 3),
        pytest.param(3, 2, 2),
        pytest.param(3, 1, 3),
    ],
)
def test_filtration(in_q: int, in_n: int, in_h: int) -> None:
    torus = build_torus(in_q, in_n, in_h)
    orders = [
        filtration_subgroup(torus, a)[0].order for a in range(1, in_h + 1)
    ]
    assert orders == [in_q ** (in_n * (in_h - a)) for a in range(1, in_h + 1)]
    assert torus.to_dict()["filtration_orders"] == orders


@pytest.mark.parametrize("in_a", [0, 3])
def test_filtration_invalid(in_a: int) -> None:
    with pytest.raises(ValueError, match="is out of range"):
        filtration_subgroup(build_torus(2, 2, 2), in_a)


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "out_kernel", "out_quotient"),
    [
        pytest.param(2, 2, 2, "Z/2 x Z/2", "Z/3"),
        pytest.param(3, 1, 2, "Z/3", "Z/2"),
        pytest.param(2, 1, 3, "Z/4", "1"),
        pytest.param(2, 3, 1, "1", "Z/7"),
    ],
)
def test_split_ses(
    in_q: int, in_n: int, in_h: int, out_kernel: str, out_quotient: str
) -> None:
    ses = split_ses(build_torus(in_q, in_n, in_h))
    assert (str(ses.kernel), str(ses.quotient)) == (out_kernel, out_quotient)
    assert ses.projection.compose(ses.splitting) == AbHom.identity(
        ses.quotient
    )


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "out_order"),
    [
        pytest.param(2, 2, 2, 2),
        pytest.param(3, 2, 2, 6),
        pytest.param(2, 3, 1, 1),
        pytest.param(3, 1, 2, 6),
    ],
)
def test_fixed_subgroup(
    in_q: int, in_n: int, in_h: int, out_order: int
) -> None:
    torus = build_torus(in_q, in_n, in_h)
    sub, inclusion = fixed_subgroup(torus)
    assert sub.order == out_order
    assert torus.frobenius.compose(inclusion) == inclusion


def test_truncation() -> None:
    source = build_torus(2, 2, 2)
    target = build_torus(2, 2, 1)
    t = truncation(source, target)
    assert t.image_order() == target.order
    assert truncation(source, source) == AbHom.identity(source.unit_group)
    with pytest.raises(ValueError, match="no truncation map"):
        truncation(target, source)
    with pytest.raises(ValueError, match="no truncation map"):
        truncation(source, build_torus(3, 2, 1))


def test_to_dict() -> None:
    data = build_torus(2, 2, 2).to_dict()
    assert (data["q"], data["n"], data["h"]) == (2, 2, 2)
    assert data["order"] == 12
    assert data["invariant_factors"] == [2, 6]
    assert (data["residue_field"]["p"], data["residue_field"]["k"]) == (2, 2)

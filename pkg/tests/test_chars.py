from collections import Counter
from fractions import Fraction

import pytest

from ellchar_lib.chars import (
    TorusChar,
    UniformizerValue,
    char_mul,
    ell_valuation,
    enumerate_characters,
    frobenius_twist,
    galois_orbit,
    inflate,
    is_general,
    is_strongly_general,
    level,
    lifts_enum,
    r_ell,
    rectifier,
    restrict_to_units,
    stabilizer_order,
    teichmueller_lift,
)
from ellchar_lib.cyclo import Coefficient, RootOfUnity
from ellchar_lib.fgab import AbChar
from ellchar_lib.limits import CapExceededError
from ellchar_lib.torus import build_torus


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_ell", "out_valuation"),
    [
        pytest.param(2, 2, 3, 1),
        pytest.param(2, 2, 5, 0),
        pytest.param(2, 4, 3, 1),
        pytest.param(3, 2, 2, 3),
        pytest.param(5, 2, 2, 3),
        pytest.param(7, 1, 2, 1),
    ],
)
def test_ell_valuation(
    in_q: int, in_n: int, in_ell: int, out_valuation: int
) -> None:
    assert ell_valuation(in_q, in_n, in_ell) == out_valuation


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "out_levels"),
    [
        pytest.param(2, 2, 2, {1: 3, 2: 9}),
        pytest.param(2, 1, 3, {1: 1, 2: 1, 3: 2}),
        pytest.param(3, 1, 2, {1: 2, 2: 4}),
        pytest.param(2, 3, 1, {1: 7}),
    ],
)
def test_level_counts(
    in_q: int, in_n: int, in_h: int, out_levels: dict[int, int]
) -> None:
    torus = build_torus(in_q, in_n, in_h)
    chars = enumerate_characters(torus)
    assert len(chars) == torus.order
    assert Counter(level(c) for c in chars) == out_levels


def test_positions() -> None:
    torus = build_torus(2, 2, 2)
    chars = enumerate_characters(torus)
    general = [c for c in chars if is_general(c)]
    strong = [c for c in chars if is_strongly_general(c)]
    assert len(general) == 10
    assert len(strong) == 6
    assert all(is_general(c) for c in strong)
    assert strong == enumerate_characters(torus, strongly_general=True)
    assert sorted(stabilizer_order(c) for c in chars).count(2) == 2


def test_galois_orbit() -> None:
    torus = build_torus(2, 3, 1)
    chars = enumerate_characters(torus)
    for theta in chars:
        assert frobenius_twist(theta, 3) == theta
        orbit = galois_orbit(theta)
        assert len(orbit) * stabilizer_order(theta) == 3
        assert all(galois_orbit(other)[0] in orbit for other in orbit)
    # Z/7 の非自明な指標は全て一般の位置
    assert sum(is_general(c) for c in chars) == 6


def test_restrict_to_units() -> None:
    torus = build_torus(2, 2, 2)
    for theta in enumerate_characters(torus):
        assert restrict_to_units(theta, 2).is_trivial()
        assert (level(theta) == 1) == restrict_to_units(theta).is_trivial()


def test_mod_ell_validation() -> None:
    torus = build_torus(2, 2, 1)
    cubic = AbChar(torus.unit_group, (RootOfUnity.of(1, 3),))
    with pytest.raises(ValueError, match="must have 3'-order values"):
        TorusChar(torus, cubic, coefficient=Coefficient.mod(3))
    with pytest.raises(ValueError, match="must have valuation 0"):
        TorusChar(
            torus,
            AbChar.trivial(torus.unit_group),
            UniformizerValue(Fraction(1)),
            Coefficient.mod(5),
        )
    other = build_torus(2, 2, 2)
    with pytest.raises(ValueError, match="not a character of the given"):
        TorusChar(other, cubic)


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "in_ell", "out_mod_count"),
    [
        pytest.param(2, 2, 2, 3, 4),
        pytest.param(2, 2, 2, 2, 3),
        pytest.param(2, 2, 1, 3, 1),
        pytest.param(2, 3, 1, 7, 1),
        pytest.param(3, 2, 1, 5, 8),
    ],
)
def test_r_ell(
    in_q: int, in_n: int, in_h: int, in_ell: int, out_mod_count: int
) -> None:
    torus = build_torus(in_q, in_n, in_h)
    mod_chars = enumerate_characters(
        torus, coefficient=Coefficient.mod(in_ell)
    )
    assert len(mod_chars) == out_mod_count
    images = {r_ell(theta, in_ell) for theta in enumerate_characters(torus)}
    assert images == set(mod_chars)
    for psi in mod_chars:
        lifts = lifts_enum(psi)
        assert len(lifts) * out_mod_count == torus.order
        assert all(r_ell(theta, in_ell) == psi for theta in lifts)
        assert teichmueller_lift(psi) in lifts


def test_lifts_example() -> None:
    torus = build_torus(2, 2, 1)
    [psi] = enumerate_characters(torus, coefficient=Coefficient.mod(3))
    assert psi.level_part.is_trivial()
    assert len(lifts_enum(psi)) == 3


def test_r_ell_invalid() -> None:
    torus = build_torus(2, 2, 1)
    theta = enumerate_characters(
        torus, uniformizer=UniformizerValue(Fraction(1, 2))
    )[0]
    with pytest.raises(ValueError, match="character is not integral"):
        r_ell(theta, 3)
    with pytest.raises(ValueError, match="only mod-ell characters"):
        teichmueller_lift(theta)


def test_r_ell_uniformizer() -> None:
    torus = build_torus(2, 2, 1)
    value = UniformizerValue(unit_part=RootOfUnity.of(1, 6))
    theta = enumerate_characters(torus, uniformizer=value)[0]
    psi = r_ell(theta, 2)
    assert str(psi.uniformizer.unit_part) == "2/3"
    assert psi.coefficient == Coefficient.mod(2)


@pytest.mark.parametrize(
    ("in_n", "in_coefficient", "out_unit"),
    [
        pytest.param(2, Coefficient.char0(), "1/2"),
        pytest.param(2, Coefficient.mod(3), "1/2"),
        pytest.param(2, Coefficient.mod(2), "0/1"),
        pytest.param(3, Coefficient.char0(), "0/1"),
    ],
)
def test_rectifier(
    in_n: int, in_coefficient: Coefficient, out_unit: str
) -> None:
    torus = build_torus(2, in_n, 1)
    mu = rectifier(in_n, in_coefficient, torus=torus)
    assert str(mu.uniformizer.unit_part) == out_unit
    assert mu.level_part.is_trivial()
    assert mu.coefficient == in_coefficient


def test_rectifier_invalid() -> None:
    with pytest.raises(ValueError, match="does not match the torus degree"):
        rectifier(3, Coefficient.char0(), torus=build_torus(2, 2, 1))


def test_char_mul() -> None:
    torus = build_torus(2, 2, 1)
    chars = enumerate_characters(torus)
    mu = rectifier(2, Coefficient.char0(), torus=torus)
    product = char_mul(chars[1], mu)
    assert product.level_part == chars[1].level_part
    assert str(product.uniformizer.unit_part) == "1/2"
    assert char_mul(chars[1], chars[2]).level_part.is_trivial()
    psi = enumerate_characters(torus, coefficient=Coefficient.mod(3))[0]
    with pytest.raises(ValueError, match="different tori or coefficients"):
        char_mul(chars[0], psi)


def test_inflate() -> None:
    small = build_torus(2, 2, 1)
    big = build_torus(2, 2, 2)
    for theta in enumerate_characters(small):
        lifted = inflate(theta, big)
        assert lifted.torus == big
        assert level(lifted) == 1
        assert is_general(lifted) == is_general(theta)
        assert r_ell(lifted, 3) == inflate(r_ell(theta, 3), big)


def test_character_dict() -> None:
    torus = build_torus(2, 2, 2)
    value = UniformizerValue(Fraction(1, 3), RootOfUnity.of(1, 4))
    for theta in enumerate_characters(torus, uniformizer=value):
        assert TorusChar.from_dict(torus, theta.to_dict()) == theta
    data = enumerate_characters(torus)[0].to_dict()
    with pytest.raises(ValueError, match="belongs to a different torus"):
        TorusChar.from_dict(build_torus(2, 2, 1), data)


def test_uniformizer_value() -> None:
    a = UniformizerValue(Fraction(1, 2), RootOfUnity.of(1, 4))
    b = UniformizerValue(Fraction(1, 2), RootOfUnity.of(1, 4))
    c = a * b
    assert c.valuation == 1
    assert str(c.unit_part) == "1/2"
    assert UniformizerValue.from_dict(c.to_dict()) == c


def test_enumerate_cap() -> None:
    with pytest.raises(CapExceededError):
        enumerate_characters(build_torus(2, 2, 2), cap=5)

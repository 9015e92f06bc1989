from fractions import Fraction

import pytest

from ellchar_lib.chars import (
    UniformizerValue,
    enumerate_characters,
    frobenius_twist,
    galois_orbit,
    is_general,
    r_ell,
    stabilizer_order,
)
from ellchar_lib.cyclo import Coefficient, CycloNumber, RootOfUnity
from ellchar_lib.ggroup import inner_product
from ellchar_lib.torus import build_torus
from ellchar_lib.weil import (
    WeilParam,
    build_model,
    char_key,
    induced_character,
    intertwining_number,
    is_irreducible,
    mackey_restrict,
    r_ell_param,
    separates_orbits,
    sigma,
)


def test_sigma_irreducible() -> None:
    chars = enumerate_characters(build_torus(2, 2, 1))
    assert [sigma(c).is_irreducible() for c in chars] == [False, True, True]
    assert all(sigma(c).dimension == 2 for c in chars)
    assert [is_irreducible(sigma(c, 2)) for c in chars] == [
        False,
        True,
        True,
    ]
    with pytest.raises(ValueError, match="lives on n=2, not n=3"):
        sigma(chars[0], 3)


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h"),
    [
        pytest.param(2, 2, 2),
        pytest.param(2, 3, 1),
        pytest.param(3, 2, 1),
    ],
)
def test_sigma_is_frobenius_invariant(
    in_q: int, in_n: int, in_h: int
) -> None:
    for theta in enumerate_characters(build_torus(in_q, in_n, in_h)):
        param = sigma(theta)
        assert sigma(frobenius_twist(theta)) == param
        assert param.is_irreducible() == is_general(theta)
        assert len(param.orbit) * stabilizer_order(theta) == in_n


def test_sigma_applies_rectifier() -> None:
    torus = build_torus(2, 2, 1)
    theta = enumerate_characters(torus)[1]
    assert all(
        str(c.uniformizer.unit_part) == "1/2" for c in sigma(theta).orbit
    )
    odd = enumerate_characters(build_torus(2, 3, 1))[1]
    assert all(
        c.uniformizer.unit_part.is_identity() for c in sigma(odd).orbit
    )


def test_weil_param_invalid() -> None:
    chars = enumerate_characters(build_torus(2, 2, 1))
    with pytest.raises(ValueError, match="must not be empty"):
        WeilParam(2, (), Coefficient.char0())
    ordered = sorted(chars[1:], key=char_key)
    with pytest.raises(ValueError, match="must be sorted"):
        WeilParam(2, tuple(reversed(ordered)), Coefficient.char0())


def test_weil_param_dict() -> None:
    theta = enumerate_characters(build_torus(2, 2, 1))[1]
    data = sigma(theta).to_dict()
    assert data["n"] == 2
    assert data["irreducible"]
    assert len(data["orbit"]) == 2
    assert data["coefficient"] == Coefficient.char0().to_dict()


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "in_ell"),
    [
        pytest.param(2, 2, 2, 3),
        pytest.param(2, 2, 2, 2),
        pytest.param(2, 3, 1, 7),
        pytest.param(3, 2, 1, 2),
    ],
)
def test_r_ell_param(in_q: int, in_n: int, in_h: int, in_ell: int) -> None:
    for theta in enumerate_characters(build_torus(in_q, in_n, in_h)):
        reduced = r_ell_param(sigma(theta), in_ell)
        assert reduced == sigma(r_ell(theta, in_ell))
        assert reduced.coefficient == Coefficient.mod(in_ell)


def test_r_ell_param_invalid() -> None:
    theta = enumerate_characters(
        build_torus(2, 2, 1), coefficient=Coefficient.mod(2)
    )[0]
    with pytest.raises(ValueError, match="already modular"):
        r_ell_param(sigma(theta), 2)


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h"),
    [
        pytest.param(2, 2, 2),
        pytest.param(2, 3, 1),
        pytest.param(3, 2, 1),
    ],
)
def test_separates_orbits(in_q: int, in_n: int, in_h: int) -> None:
    chars = enumerate_characters(build_torus(in_q, in_n, in_h))
    assert separates_orbits(chars)
    orbits = {frozenset(galois_orbit(c)) for c in chars}
    assert len({sigma(c) for c in chars}) == len(orbits)


def test_build_model() -> None:
    minus = UniformizerValue(unit_part=RootOfUnity.of(1, 2))
    theta = enumerate_characters(build_torus(2, 2, 1), uniformizer=minus)[1]
    model = build_model(theta)
    assert model.n == 2
    assert (model.group.order, model.group.is_abelian()) == (6, False)
    assert model.base.index == 2
    chi = induced_character(model)
    assert chi.degree == 2
    assert inner_product(chi, chi) == CycloNumber.from_int(1)
    conjugates = mackey_restrict(model)
    assert len(conjugates) == 2
    assert conjugates[0] != conjugates[1]


def test_build_model_invalid() -> None:
    torus = build_torus(2, 2, 1)
    theta = enumerate_characters(torus)[0]
    with pytest.raises(ValueError, match="at least one character"):
        build_model()
    other = enumerate_characters(build_torus(2, 2, 2))[0]
    with pytest.raises(ValueError, match="different tori"):
        build_model(theta, other)
    half = UniformizerValue(Fraction(1, 2))
    wild = enumerate_characters(torus, uniformizer=half)[0]
    with pytest.raises(ValueError, match="only integral characters"):
        build_model(wild)


def test_mackey_restrict_of_fixed_character() -> None:
    theta = enumerate_characters(build_torus(2, 3, 1))[0]
    model = build_model(theta)
    conjugates = mackey_restrict(model)
    assert len(conjugates) == 3
    assert len(set(conjugates)) == 1


@pytest.mark.parametrize(
    ("in_left", "in_right", "out_number"),
    [
        pytest.param(0, 0, 3),
        pytest.param(1, 1, 1),
        pytest.param(1, 2, 1),
        pytest.param(1, 4, 1),
        pytest.param(1, 3, 0),
        pytest.param(0, 1, 0),
    ],
)
def test_intertwining_number(
    in_left: int, in_right: int, out_number: int
) -> None:
    chars = enumerate_characters(build_torus(2, 3, 1))
    assert intertwining_number(chars[in_left], chars[in_right]) == out_number


def test_intertwining_matches_stabilizer() -> None:
    for theta in enumerate_characters(build_torus(2, 2, 1)):
        assert intertwining_number(theta, theta) == stabilizer_order(theta)

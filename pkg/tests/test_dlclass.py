import pytest

from ellchar_lib.chars import (
    TorusChar,
    enumerate_characters,
    is_general,
    is_strongly_general,
    level,
)
from ellchar_lib.cyclo import Coefficient
from ellchar_lib.dlclass import (
    INDUCTION_MARKER,
    CdFunction,
    FullSpaceClass,
    SyntheticProvider,
    TamperedProvider,
    build_full_class,
    cd_validate,
    describe,
    inflate_class,
    naive_multiplicity_check,
    reduce_full_class,
    same_class,
    transport,
    verify_diagram,
)
from ellchar_lib.fgab import AbChar
from ellchar_lib.ggroup import (
    GClass,
    abelian_group,
    cyclic_group,
    direct_product,
    gl_truncated,
    regular_class,
)
from ellchar_lib.torus import build_torus

CHAR0 = Coefficient.char0()


def strong_mod_character(q: int, n: int, h: int, ell: int) -> TorusChar:
    chars = enumerate_characters(
        build_torus(q, n, h), coefficient=Coefficient.mod(ell)
    )
    return next(c for c in chars if is_strongly_general(c))


def test_describe() -> None:
    chars = enumerate_characters(build_torus(2, 2, 1))
    assert describe(chars[0]) == "T_1(q=2,n=2)[0/1] w->0/1 char0"
    psi = enumerate_characters(
        build_torus(2, 2, 1), coefficient=Coefficient.mod(3)
    )[0]
    assert describe(psi).endswith("mod 3")


def test_cd_function() -> None:
    theta = enumerate_characters(build_torus(2, 2, 2))[-1]
    assert CdFunction.constant(3)(theta) == 3
    assert CdFunction.level_proxy()(theta) == level(theta)
    shifted = CdFunction.constant().shifted(2)
    assert shifted(theta) == 2
    assert shifted.name == "constant(0)+2"
    assert CdFunction.uniformizer_dependent()(theta) == 0


def test_build_full_class() -> None:
    g1 = gl_truncated(2, 2, 1)
    theta = enumerate_characters(build_torus(2, 2, 1))[1]
    x = build_full_class(
        GClass.trivial(g1, CHAR0), theta, CdFunction.constant(1)
    )
    assert x.n == 2
    assert x.level_h == 1
    assert x.sign_exponent == 1
    assert x.signed() == -GClass.trivial(g1, CHAR0)
    assert not x.is_zero()
    data = x.to_dict()
    assert data["induction"] == INDUCTION_MARKER
    assert data["level_h"] == 1
    raised = build_full_class(
        GClass.trivial(g1, CHAR0), theta, CdFunction.constant(), level_h=2
    )
    assert raised.central_char.torus == build_torus(2, 2, 2)


def test_build_full_class_invalid() -> None:
    g1 = gl_truncated(2, 2, 1)
    chars = enumerate_characters(build_torus(2, 2, 2))
    theta = next(c for c in chars if level(c) == 2)
    with pytest.raises(ValueError, match="exceeds level 1"):
        build_full_class(
            GClass.trivial(g1, CHAR0), theta, CdFunction.constant(), level_h=1
        )
    psi = enumerate_characters(
        build_torus(2, 2, 1), coefficient=Coefficient.mod(3)
    )[0]
    with pytest.raises(ValueError, match="different coefficients"):
        FullSpaceClass(GClass.trivial(g1, CHAR0), psi, 1, 0)
    with pytest.raises(ValueError, match="lives on level 1, not 2"):
        FullSpaceClass(GClass.trivial(g1, Coefficient.mod(3)), psi, 2, 0)


def test_inflate_class() -> None:
    g1, g2 = gl_truncated(2, 2, 1), gl_truncated(2, 2, 2)
    x = regular_class(g1, CHAR0)
    y = inflate_class(x, g2, 2)
    assert y.group is g2
    assert y.degree == g1.order


def test_transport_and_same_class() -> None:
    g1 = gl_truncated(2, 2, 1)
    theta = enumerate_characters(build_torus(2, 2, 1))[1]
    x = build_full_class(
        GClass.trivial(g1, CHAR0), theta, CdFunction.constant()
    )
    for h in (1, 2, 3):
        y = transport(x, h)
        assert y.level_h == h
        assert y.sign_exponent % 2 == 0
        assert same_class(x, y)
        assert same_class(y, x)
    other = build_full_class(
        GClass.trivial(g1, CHAR0), theta, CdFunction.constant(1)
    )
    assert not same_class(x, other)
    elsewhere = build_full_class(
        GClass.trivial(cyclic_group(2), CHAR0), theta, CdFunction.constant()
    )
    with pytest.raises(ValueError, match="live on different groups"):
        same_class(x, elsewhere)


def test_transport_with_pullback() -> None:
    g1, g2 = gl_truncated(2, 2, 1), gl_truncated(2, 2, 2)
    theta = enumerate_characters(build_torus(2, 2, 1))[1]
    x = build_full_class(
        regular_class(g1, CHAR0), theta, CdFunction.constant()
    )
    y = transport(x, 2, pullback=lambda c: inflate_class(c, g2, 2))
    assert y.finite_level.group is g2
    assert y.finite_level.degree == g1.order


def test_reduce_full_class() -> None:
    g1 = gl_truncated(2, 2, 1)
    theta = enumerate_characters(build_torus(2, 2, 1))[1]
    x = build_full_class(
        regular_class(g1, CHAR0), theta, CdFunction.constant()
    )
    y = reduce_full_class(x, 3)
    assert y.central_char.coefficient == Coefficient.mod(3)
    assert y.finite_level.degree == g1.order
    with pytest.raises(ValueError, match="already modular"):
        reduce_full_class(y, 3)


def test_synthetic_provider() -> None:
    provider = SyntheticProvider.build(2, 2, 2, seed=4)
    assert provider.group.order == 6
    assert provider.complex.is_t_free()
    for theta in enumerate_characters(build_torus(2, 2, 2)):
        x = provider(theta)
        assert x.group is provider.group
        assert x.coefficient == CHAR0


@pytest.mark.parametrize(
    ("in_q", "in_n", "in_h", "in_ell", "out_lifts"),
    [
        pytest.param(2, 2, 2, 5, 1),
        pytest.param(2, 2, 2, 3, 3),
    ],
)
def test_verify_diagram(
    in_q: int, in_n: int, in_h: int, in_ell: int, out_lifts: int
) -> None:
    psi = strong_mod_character(in_q, in_n, in_h, in_ell)
    provider = SyntheticProvider.build(in_q, in_n, in_h)
    report = verify_diagram(in_q, in_n, in_h, in_ell, psi, provider)
    assert report.lifts == out_lifts
    assert report.asserted
    assert report.passed
    assert [c.name for c in report.checks] == [
        "lift-count",
        "position",
        "weil",
        "reduction",
        "square",
        "cd",
    ]


def test_verify_diagram_tampered() -> None:
    psi = strong_mod_character(2, 2, 2, 3)
    provider = TamperedProvider(SyntheticProvider.build(2, 2, 2), 3)
    report = verify_diagram(2, 2, 2, 3, psi, provider)
    assert not report.passed
    failed = [c for c in report.checks if not c.passed]
    assert failed
    assert all(c.witness for c in failed)


def test_verify_diagram_general_positions() -> None:
    chars = enumerate_characters(
        build_torus(2, 2, 2), coefficient=Coefficient.mod(3)
    )
    psi = next(c for c in chars if is_general(c))
    provider = SyntheticProvider.build(2, 2, 2)
    report = verify_diagram(
        2, 2, 2, 3, psi, provider, positions="general"
    )
    assert report.positions == "general"
    assert not report.asserted


def test_verify_diagram_invalid() -> None:
    provider = SyntheticProvider.build(2, 2, 2)
    psi = strong_mod_character(2, 2, 2, 3)
    with pytest.raises(ValueError, match="must be a mod-5 character"):
        verify_diagram(2, 2, 2, 5, psi, provider)
    with pytest.raises(ValueError, match="character lives on"):
        verify_diagram(2, 2, 1, 3, psi, provider)
    theta = enumerate_characters(build_torus(2, 2, 2))[0]
    with pytest.raises(ValueError, match="must be a mod-3 character"):
        verify_diagram(2, 2, 2, 3, theta, provider)
    trivial = enumerate_characters(
        build_torus(2, 2, 2), coefficient=Coefficient.mod(3)
    )[0]
    with pytest.raises(ValueError, match="is not in strong position"):
        verify_diagram(2, 2, 2, 3, trivial, provider)


def test_naive_multiplicity_check() -> None:
    t = build_torus(2, 2, 1).unit_group
    p = direct_product(cyclic_group(1), abelian_group(t))
    m = regular_class(p, CHAR0)
    report = naive_multiplicity_check(m, AbChar.trivial(t), 3)
    assert report.passed
    assert report.lifts == 3
    assert report.factor == 3
    assert report.rhs == ["CycloNumber(3)"]
    assert report.witness is None
    with pytest.raises(ValueError, match="must be in characteristic 0"):
        naive_multiplicity_check(
            regular_class(p, Coefficient.mod(3)), AbChar.trivial(t), 3
        )


@pytest.mark.parametrize(
    ("in_cd", "in_grid", "out_passed"),
    [
        pytest.param(CdFunction.constant(), [(2, 2, 2, 3)], True),
        pytest.param(CdFunction.level_proxy(), [(2, 2, 2, 3)], True),
        pytest.param(
            CdFunction.level_proxy().shifted(), [(2, 2, 1, 3)], True
        ),
        pytest.param(
            CdFunction.uniformizer_dependent(), [(2, 2, 1, 3)], False
        ),
    ],
)
def test_cd_validate(
    in_cd: CdFunction,
    in_grid: list[tuple[int, int, int, int]],
    out_passed: bool,
) -> None:
    report = cd_validate(in_cd, in_grid)
    assert report.passed is out_passed
    assert report.points == len(in_grid)
    assert (report.witness is None) is out_passed

import numpy as np
import pytest

from ellchar_lib.chaincx import (
    CoeffSpec,
    MatrixComplex,
    Monomial,
    PermComplex,
    augment,
    base_change,
    derived_isotypic,
    euler_class,
    homology,
    integral_homology,
    is_projective_perm,
    isotypic,
    make_orbit,
    make_torsor_complex,
    minimal_resolution,
    product_group,
    shift,
    stability_shift,
)
from ellchar_lib.cyclo import Coefficient, CycloNumber, RootOfUnity
from ellchar_lib.fgab import AbChar, FinAb, ell_prime_characters
from ellchar_lib.fields import make_field
from ellchar_lib.ggroup import (
    GClass,
    all_subgroups,
    cyclic_group,
    symmetric_group,
)
from ellchar_lib.linalg import FiniteFieldMatrices

T3 = FinAb((3,))
FREE = [(0, (0,))]
POINT = [(0, (0,)), (0, (1,)), (0, (2,))]


def one_minus_t() -> PermComplex:
    """Z[C3] --(1 - t)--> Z[C3]"""
    return PermComplex.build(
        cyclic_group(1),
        T3,
        {1: [FREE], 0: [FREE]},
        {(1, 0, 0): {0: 1, 1: -1}},
    )


def point_complex() -> PermComplex:
    return PermComplex.build(cyclic_group(1), T3, {0: [POINT]})


def theta3(numerator: int) -> AbChar:
    return AbChar(T3, (RootOfUnity.of(numerator, 3),))


def dimensions(classes: dict[int, GClass]) -> list[int]:
    return [classes[i].degree for i in sorted(classes)]


def test_make_orbit() -> None:
    free = make_orbit(cyclic_group(1), T3, FREE)
    assert free.size == 3
    assert free.t_action[1].tolist() == [1, 2, 0]
    assert free.t_stabilizer_order == 1
    point = make_orbit(cyclic_group(1), T3, POINT)
    assert point.size == 1
    assert point.t_stabilizer_order == 3


@pytest.mark.parametrize(
    "in_stabilizer",
    [
        pytest.param([(0, (1,))]),
        pytest.param([(0, (0,)), (0, (1,))]),
    ],
)
def test_make_orbit_invalid(
    in_stabilizer: list[tuple[int, tuple[int]]],
) -> None:
    with pytest.raises(ValueError, match="is not a subgroup of G x T"):
        make_orbit(cyclic_group(1), T3, in_stabilizer)


def test_orbit_sizes_on_s3() -> None:
    s3 = symmetric_group(3)
    t = FinAb((2,))
    for sub in all_subgroups(s3):
        stabilizer = [(int(h), (0,)) for h in sub.embedding]
        orbit = make_orbit(s3, t, stabilizer)
        assert orbit.size == 2 * sub.index
        for g in range(s3.order):
            for x in range(orbit.size):
                assert orbit.act(g, 0, orbit.act(0, 1, x)) == orbit.act(
                    0, 1, orbit.act(g, 0, x)
                )


def test_build() -> None:
    c = one_minus_t()
    assert c.degrees == [0, 1]
    assert c.size(1) == 3
    assert c.size(5) == 0
    assert c.differential(1).toarray().tolist() == [
        [1, 0, -1],
        [-1, 1, 0],
        [0, -1, 1],
    ]
    assert c.differential(2).shape == (3, 0)
    assert c.is_t_free()
    assert c.is_t_projective(3)


@pytest.mark.parametrize(
    ("in_terms", "in_maps", "out_error_msg"),
    [
        pytest.param(
            {0: [FREE]}, {(1, 0, 0): {0: 1}}, "no terms in degrees 1 and 0"
        ),
        pytest.param(
            {1: [FREE], 0: [FREE]},
            {(1, 0, 0): {5: 1}},
            "outside the target orbit",
        ),
        pytest.param(
            {1: [POINT], 0: [FREE]},
            {(1, 0, 0): {0: 1}},
            "is not equivariant",
        ),
        pytest.param(
            {2: [FREE], 1: [FREE], 0: [FREE]},
            {(2, 0, 0): {0: 1}, (1, 0, 0): {0: 1}},
            "d o d is not zero",
        ),
    ],
)
def test_build_invalid(
    in_terms: dict[int, list[list[tuple[int, tuple[int]]]]],
    in_maps: dict[tuple[int, int, int], dict[int, int]],
    out_error_msg: str,
) -> None:
    with pytest.raises(ValueError, match=out_error_msg):
        PermComplex.build(cyclic_group(1), T3, in_terms, in_maps)


def test_complex_dict() -> None:
    c = make_torsor_complex(symmetric_group(3), FinAb((2,)), seed=3)
    copy = PermComplex.from_dict(c.to_dict())
    assert copy.degrees == c.degrees
    for i in c.degrees:
        assert copy.size(i) == c.size(i)
        assert (
            copy.differential(i).toarray() == c.differential(i).toarray()
        ).all()


def test_shift_and_augment() -> None:
    c = one_minus_t()
    shifted = shift(c, 2)
    assert shifted.degrees == [2, 3]
    assert (
        shifted.differential(3).toarray() == c.differential(1).toarray()
    ).all()
    odd = shift(c, 1)
    assert (
        odd.differential(2).toarray() == c.differential(1).toarray()
    ).all()
    assert [(h.degree, h.rank) for h in integral_homology(odd)] == [
        (1, 1),
        (2, 1),
    ]
    augmented = augment(c)
    assert augmented.degrees == [-1, 0, 1]
    assert augmented.differential(0).toarray().tolist() == [[1, 1, 1]]
    identity = PermComplex.build(
        cyclic_group(1),
        T3,
        {1: [FREE], 0: [FREE]},
        {(1, 0, 0): {0: 1}},
    )
    with pytest.raises(ValueError, match="d o d is not zero"):
        augment(identity)


@pytest.mark.parametrize(
    ("in_n", "in_h", "in_h_prime", "out_shift"),
    [
        pytest.param(2, 3, 1, 4),
        pytest.param(2, 2, 2, 0),
        pytest.param(3, 2, 1, 4),
        pytest.param(1, 5, 1, 0),
    ],
)
def test_stability_shift(
    in_n: int, in_h: int, in_h_prime: int, out_shift: int
) -> None:
    assert stability_shift(in_n, in_h, in_h_prime) == out_shift


@pytest.mark.parametrize(("in_h", "in_h_prime"), [(2, 0), (2, 3)])
def test_stability_shift_invalid(in_h: int, in_h_prime: int) -> None:
    with pytest.raises(ValueError, match="levels must satisfy"):
        stability_shift(2, in_h, in_h_prime)


@pytest.mark.parametrize(
    ("in_text", "out_spec"),
    [
        pytest.param("Z", CoeffSpec.integers()),
        pytest.param("Q", CoeffSpec.cyclotomic(1)),
        pytest.param(" cyc:12 ", CoeffSpec.cyclotomic(12)),
        pytest.param("F:3", CoeffSpec.finite(3)),
        pytest.param("F:2^3", CoeffSpec.finite(2, 3)),
    ],
)
def test_coeff_spec_parse(in_text: str, out_spec: CoeffSpec) -> None:
    spec = CoeffSpec.parse(in_text)
    assert spec == out_spec
    assert CoeffSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("in_text", ["R", "F:4", "cyc:x", "F:", "cyc:0"])
def test_coeff_spec_parse_invalid(in_text: str) -> None:
    with pytest.raises(ValueError, match="invalid coefficient spec"):
        CoeffSpec.parse(in_text)


def test_coeff_spec() -> None:
    assert CoeffSpec.finite(5).coefficient == Coefficient.mod(5)
    assert CoeffSpec.integers().coefficient == Coefficient.char0()
    with pytest.raises(ValueError, match="do not form a field"):
        CoeffSpec.integers().matrices()
    with pytest.raises(ValueError, match="exactly for finite"):
        CoeffSpec("finite")
    with pytest.raises(ValueError, match="must be positive"):
        CoeffSpec.finite(3, 0)


@pytest.mark.parametrize("in_spec", ["Z", "Q", "cyc:3", "F:3", "F:2^2"])
def test_base_change(in_spec: str) -> None:
    c = one_minus_t()
    m = base_change(c, CoeffSpec.parse(in_spec))
    assert m.ranks == {0: 3, 1: 3}
    assert m.valid == (0, 1)
    assert m.group is product_group(c.g_group, c.t_group)


@pytest.mark.parametrize("in_spec", ["Q", "cyc:3", "F:3", "F:2"])
def test_homology_of_one_minus_t(in_spec: str) -> None:
    c = one_minus_t()
    spec = CoeffSpec.parse(in_spec)
    h = homology(base_change(c, spec))
    trivial = GClass.trivial(
        product_group(c.g_group, c.t_group), spec.coefficient
    )
    assert h[0] == trivial
    assert h[1] == trivial


def test_integral_homology() -> None:
    c = one_minus_t()
    assert [(h.rank, str(h.torsion)) for h in integral_homology(c)] == [
        (1, "1"),
        (1, "1"),
    ]
    t2 = FinAb((2,))
    point = [(0, (0,)), (0, (1,))]
    doubling = PermComplex.build(
        cyclic_group(1), t2, {1: [point], 0: [point]}, {(1, 0, 0): {0: 2}}
    )
    assert [
        (h.degree, h.rank, str(h.torsion))
        for h in integral_homology(doubling)
    ] == [(0, 0, "Z/2"), (1, 0, "1")]


@pytest.mark.parametrize(
    ("in_spec", "in_numerator", "out_dimensions"),
    [
        pytest.param("Q", 0, [1, 1]),
        pytest.param("cyc:3", 0, [1, 1]),
        pytest.param("cyc:3", 1, [0, 0]),
        pytest.param("cyc:3", 2, [0, 0]),
        pytest.param("F:2^2", 1, [0, 0]),
        pytest.param("F:3", 0, [1, 1]),
    ],
)
def test_isotypic(
    in_spec: str, in_numerator: int, out_dimensions: list[int]
) -> None:
    m = isotypic(one_minus_t(), theta3(in_numerator), CoeffSpec.parse(in_spec))
    assert m.ranks == {0: 1, 1: 1}
    assert dimensions(homology(m)) == out_dimensions


def test_isotypic_invalid() -> None:
    with pytest.raises(ValueError, match="does not take 3'-order values"):
        isotypic(one_minus_t(), theta3(1), CoeffSpec.finite(3))
    with pytest.raises(ValueError, match="not defined on T"):
        isotypic(
            one_minus_t(), AbChar.trivial(FinAb((2,))), CoeffSpec.finite(3)
        )


def test_isotypic_of_point() -> None:
    c = point_complex()
    spec = CoeffSpec.cyclotomic(3)
    assert isotypic(c, theta3(0), spec).ranks == {0: 1}
    assert isotypic(c, theta3(1), spec).ranks == {0: 0}


@pytest.mark.parametrize(
    ("in_order", "in_ell", "in_length", "out_ranks"),
    [
        pytest.param((3,), 3, 4, (1, 1, 1, 1, 1)),
        pytest.param((2, 2), 2, 3, (1, 2, 3, 4)),
        pytest.param((4,), 2, 3, (1, 1, 1, 1)),
    ],
)
def test_minimal_resolution(
    in_order: tuple[int, ...],
    in_ell: int,
    in_length: int,
    out_ranks: tuple[int, ...],
) -> None:
    ops = FiniteFieldMatrices(make_field(in_ell, 1))
    res = minimal_resolution(FinAb(in_order), ops, in_length)
    assert res.ranks == out_ranks
    assert len(res.boundaries) == len(out_ranks) - 1


def test_derived_isotypic_of_free_complex() -> None:
    c = one_minus_t()
    spec = CoeffSpec.finite(3)
    derived = derived_isotypic(c, theta3(0), spec, 4)
    assert derived.valid == (0, 3)
    assert dimensions(homology(derived)) == [1, 1, 0, 0]
    plain = homology(isotypic(c, theta3(0), spec))
    h = homology(derived)
    assert h[0] == plain[0]
    assert h[1] == plain[1]


def test_derived_isotypic_of_point() -> None:
    c = point_complex()
    derived = derived_isotypic(c, theta3(0), CoeffSpec.finite(3), 4)
    assert dimensions(homology(derived)) == [1, 1, 1, 1]
    plain = isotypic(c, theta3(0), CoeffSpec.finite(3))
    assert dimensions(homology(plain)) == [1]


def test_derived_isotypic_invalid() -> None:
    with pytest.raises(ValueError, match="need finite field coefficients"):
        derived_isotypic(one_minus_t(), theta3(0), CoeffSpec.cyclotomic(3), 4)
    with pytest.raises(ValueError, match="only reaches degree 0"):
        derived_isotypic(one_minus_t(), theta3(0), CoeffSpec.finite(3), 1)


def test_euler_class() -> None:
    free = PermComplex.build(cyclic_group(1), T3, {0: [FREE]})
    assert euler_class(free, CoeffSpec.cyclotomic(3)).values[0] == (
        CycloNumber.from_int(3)
    )
    assert euler_class(one_minus_t(), CoeffSpec.cyclotomic(3)).is_zero()
    for a in range(3):
        e = euler_class(free, CoeffSpec.cyclotomic(3), theta3(a))
        assert e.values == (CycloNumber.from_int(1),)
        assert euler_class(
            one_minus_t(), CoeffSpec.cyclotomic(3), theta3(a)
        ).is_zero()
    with pytest.raises(ValueError, match="not projective over F\\[T\\]"):
        euler_class(point_complex(), CoeffSpec.finite(3), theta3(0))


@pytest.mark.parametrize("in_seed", [0, 1, 2, 3])
def test_euler_class_matches_homology(in_seed: int) -> None:
    c = make_torsor_complex(symmetric_group(3), FinAb((2,)), seed=in_seed)
    spec = CoeffSpec.cyclotomic(2)
    for theta in ell_prime_characters(c.t_group, 3):
        h = homology(isotypic(c, theta, spec))
        alternating = GClass.zero(c.g_group, spec.coefficient)
        for i, x in h.items():
            alternating = alternating + (-x if i % 2 else x)
        assert euler_class(c, spec, theta) == alternating


@pytest.mark.parametrize("in_seed", [0, 1, 2, 5, 8])
def test_make_torsor_complex(in_seed: int) -> None:
    c = make_torsor_complex(symmetric_group(3), FinAb((2,)), seed=in_seed)
    assert c.is_t_free()
    assert c.is_t_projective(2)
    c.validate()


def test_is_projective_perm() -> None:
    s3 = symmetric_group(3)
    subs = all_subgroups(s3)
    assert all(
        is_projective_perm(s3, subs[0], CoeffSpec.finite(p)) for p in (2, 3)
    )
    assert is_projective_perm(s3, subs[1], CoeffSpec.finite(3))
    assert not is_projective_perm(s3, subs[1], CoeffSpec.finite(2))
    assert is_projective_perm(s3, subs[4], CoeffSpec.finite(2))
    assert not is_projective_perm(s3, subs[5], CoeffSpec.finite(3))
    with pytest.raises(ValueError, match="does not belong to the group"):
        is_projective_perm(symmetric_group(3), subs[1], CoeffSpec.finite(3))


def test_matrix_complex_verify() -> None:
    spec = CoeffSpec.cyclotomic(1)
    ops = spec.matrices()
    one = ops.asarray([[1]])

    def action(_i: int, _g: int) -> Monomial:
        return Monomial(np.array([0]), ops.vector([1]))

    with pytest.raises(ValueError, match="d o d is not zero in degree 2"):
        MatrixComplex(
            spec,
            cyclic_group(1),
            {0: 1, 1: 1, 2: 1},
            {1: one, 2: one},
            action,
            (0, 2),
        ).verify()

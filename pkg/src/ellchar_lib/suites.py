"""格子点ごとの検証スイートと報告

各スイートは点ごとの検査関数の列で、結果は PointResult として点の順に
並ぶ。報告は JSON (pydantic) と CSV (polars) で書き出す。
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import TypeVar

import numpy as np
import polars as pl
from more_itertools import first, unique_everseen
from pydantic import BaseModel

from ellchar_lib.chaincx import (
    CoeffSpec,
    PermComplex,
    derived_isotypic,
    euler_class,
    homology,
    is_projective_perm,
    isotypic,
    make_torsor_complex,
    product_group,
)
from ellchar_lib.chars import (
    ell_valuation,
    enumerate_characters,
    frobenius_twist,
    galois_orbit,
    is_strongly_general,
    lifts_enum,
    r_ell,
    stabilizer_order,
)
from ellchar_lib.cyclo import (
    Coefficient,
    CycloNumber,
    RootOfUnity,
    is_ell_regular,
)
from ellchar_lib.dlclass import (
    SyntheticProvider,
    TamperedProvider,
    describe,
    naive_multiplicity_check,
    verify_diagram,
)
from ellchar_lib.fgab import (
    AbChar,
    FinAb,
    dual_enumerate,
    ell_prime_characters,
)
from ellchar_lib.fields import (
    embed,
    make_field,
    root_of_unity,
    splitting_degree,
    teich_lift,
)
from ellchar_lib.ggroup import (
    FinGroup,
    GClass,
    Subgroup,
    all_subgroups,
    cyclic_group,
    decomposition_map,
    group_corpus,
    induce,
    permutation_character,
    regular_class,
    subgroup_generated,
)
from ellchar_lib.limits import CapExceededError
from ellchar_lib.suite_config import Config, GridPoint
from ellchar_lib.torus import (
    build_torus,
    filtration_subgroup,
    split_ses,
    verify_structure,
)
from ellchar_lib.weil import (
    intertwining_number,
    r_ell_param,
    separates_orbits,
    sigma,
)

logger = logging.getLogger(__name__)

Item = TypeVar("Item")

SMALL_TORI = [(2,), (3,), (4,), (2, 2), (6,), (2, 6), (12,)]

INTERTWINING_SAMPLES = 4


class PointResult(BaseModel):
    point: str
    passed: bool
    detail: str = ""


class SuiteReport(BaseModel):
    name: str
    passed: bool
    rows: list[PointResult]

    def to_frame(self: "SuiteReport") -> pl.DataFrame:
        return pl.DataFrame(
            [row.model_dump() for row in self.rows],
            schema={
                "point": pl.String,
                "passed": pl.Boolean,
                "detail": pl.String,
            },
        )


def summary(report: SuiteReport) -> pl.DataFrame:
    """点の数と失敗の数

    Examples
    --------
    >>> rows = [PointResult(point="a", passed=True)]
    >>> rows.append(PointResult(point="b", passed=False))
    >>> summary(SuiteReport(name="x", passed=False, rows=rows)).row(0)
    ('x', 2, 1)
    """
    return (
        report.to_frame()
        .lazy()
        .select(
            pl.lit(report.name).alias("suite"),
            pl.len().alias("points"),
            (~pl.col("passed")).sum().alias("failures"),
        )
        .collect()
    )


def write_report(report: SuiteReport, out_dir: Path) -> tuple[Path, Path]:
    """<name>.json と <name>.csv を書き出す"""
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{report.name}.json"
    csv_path = out_dir / f"{report.name}.csv"
    json_path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    report.to_frame().write_csv(csv_path)
    return json_path, csv_path


def _run(
    config: Config,
    check: Callable[[Config, Item], PointResult],
    items: Sequence[Item],
) -> list[PointResult]:
    # 出力の順序は入力の順序と同じ
    if config.workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            return list(executor.map(partial(check, config), items))
    return [check(config, item) for item in items]


def _result(point: object, failures: list[str], detail: str) -> PointResult:
    return PointResult(
        point=str(point),
        passed=not failures,
        detail="; ".join(failures) if failures else detail,
    )


def _torus_points(config: Config) -> list[tuple[int, int, int]]:
    return list(
        unique_everseen(
            (q, n, h) for q, n, h, _ in config.grid.grid_points()
        )
    )


def _teichmueller_point(config: Config, item: tuple[int, int]) -> PointResult:
    ell, k = item
    f = make_field(ell, k, size_cap=config.caps.field_size_cap)
    units = [x for x in f.elements() if not x.is_zero()]
    g = f.gen()
    failures = []
    if not all(root_of_unity(teich_lift(x), f) == x for x in units):
        failures.append("lift is not a section of reduction")
    if not all(
        teich_lift(g * x) == teich_lift(g) + teich_lift(x) for x in units
    ):
        failures.append("lift is not multiplicative")
    if not all(is_ell_regular(teich_lift(x), ell) for x in units):
        failures.append("lift has an ell-singular value")
    if k > 1:
        prime = make_field(ell, 1)
        if any(
            teich_lift(embed(x, f)) != teich_lift(x)
            for x in prime.elements()
            if not x.is_zero()
        ):
            failures.append("lift is not compatible with the tower")
    return _result(f"F_{ell}^{k}", failures, f"{len(units)} units")


def teichmueller_suite(config: Config) -> list[PointResult]:
    size = min(config.caps.field_size_cap, config.grid.max_torus_size)
    items = [
        (ell, k)
        for ell in sorted(set(config.grid.ell))
        for k in (1, 2, 3)
        if ell**k <= size
    ]
    return _run(config, _teichmueller_point, items)


def _torus_point(config: Config, item: tuple[int, int, int]) -> PointResult:
    q, n, h = item
    torus = build_torus(q, n, h, cap=config.caps.enumeration_cap)
    failures = []
    expected = (q**n - 1) * q ** (n * (h - 1))
    if torus.order != expected:
        failures.append(f"|T_h| = {torus.order}, expected {expected}")
    kernel, _ = filtration_subgroup(torus, 1)
    if kernel.order != q ** (n * (h - 1)):
        failures.append(f"|T^1_h| = {kernel.order}")
    try:
        split_ses(torus)
    except RuntimeError as e:
        failures.append(str(e))
    if not verify_structure(torus, seed=config.seed):
        failures.append("coordinates are not a homomorphism")
    return _result(item, failures, str(torus.unit_group))


def torus_suite(config: Config) -> list[PointResult]:
    return _run(config, _torus_point, _torus_points(config))


def _lifts_point(config: Config, point: GridPoint) -> PointResult:
    q, n, h, ell = point
    torus = build_torus(q, n, h, cap=config.caps.enumeration_cap)
    fiber = ell ** ell_valuation(q, n, ell)
    chars = enumerate_characters(
        torus,
        coefficient=Coefficient.mod(ell),
        cap=config.caps.enumeration_cap,
    )
    failures = []
    for psi in chars:
        lifts = lifts_enum(psi)
        if len(lifts) != fiber:
            failures.append(f"{len(lifts)} lifts of {describe(psi)}")
            break
        if any(r_ell(t, ell) != psi for t in lifts):
            failures.append(f"a lift of {describe(psi)} reduces elsewhere")
            break
        twisted = set(lifts_enum(frobenius_twist(psi)))
        if twisted != {frobenius_twist(t) for t in lifts}:
            failures.append(f"lifts of {describe(psi)} are not F-stable")
            break
    return _result(point, failures, f"{len(chars)} characters x {fiber}")


def lifts_suite(config: Config) -> list[PointResult]:
    return _run(config, _lifts_point, config.grid.grid_points())


def _position_point(config: Config, point: GridPoint) -> PointResult:
    q, n, h, ell = point
    torus = build_torus(q, n, h, cap=config.caps.enumeration_cap)
    chars = enumerate_characters(torus, cap=config.caps.enumeration_cap)
    flags = [is_strongly_general(t) for t in chars]
    failures = [
        f"position changes under reduction at {describe(t)}"
        for t, flag in zip(chars, flags)
        if flag != is_strongly_general(r_ell(t, ell))
    ][:1]
    return _result(point, failures, f"{sum(flags)} strongly general")


def position_suite(config: Config) -> list[PointResult]:
    return _run(config, _position_point, config.grid.grid_points())


def _corpus_items(
    config: Config, max_order: int = 48
) -> list[tuple[int, int]]:
    count = len(group_corpus(max_order))
    return [(i, ell) for i in range(count) for ell in config.primes]


def _projectivity_point(
    config: Config, item: tuple[int, int]
) -> PointResult:
    index, ell = item
    group = group_corpus()[index]
    spec = CoeffSpec.finite(ell)
    subgroups = all_subgroups(group)
    failures = [
        f"F_{ell}[G/H] with |H| = {sub.order}"
        for sub in subgroups
        if is_projective_perm(group, sub, spec) != (sub.order % ell != 0)
    ][:1]
    return _result(
        f"{group.name} ell={ell}", failures, f"{len(subgroups)} subgroups"
    )


def projectivity_suite(config: Config) -> list[PointResult]:
    return _run(config, _projectivity_point, _corpus_items(config))


def faithful_linear_class(sub: Subgroup) -> GClass | None:
    """巡回群 H の忠実な1次元指標 (H が巡回でなければ None)

    Examples
    --------
    >>> from ellchar_lib.ggroup import cyclic_group
    >>> H = subgroup_generated(cyclic_group(4), [1])
    >>> faithful_linear_class(H).value_at(2)
    CycloNumber(-1)
    """
    group = sub.group
    generators = np.flatnonzero(group.orders == group.order)
    if not generators.size:
        return None
    g = int(generators[0])
    exponent = {}
    x = 0
    for k in range(group.order):
        exponent[x] = k
        x = group.mul(x, g)
    return GClass.from_function(
        group,
        Coefficient.char0(),
        lambda y: CycloNumber.from_root(
            RootOfUnity.of(exponent[y], group.order)
        ),
    )


def _induction_point(config: Config, item: tuple[int, int]) -> PointResult:
    index, ell = item
    group = group_corpus(24)[index]
    char0 = Coefficient.char0()
    failures = []
    subgroups = all_subgroups(group)
    for sub in subgroups:
        classes = [
            GClass.trivial(sub.group, char0),
            regular_class(sub.group, char0),
            faithful_linear_class(sub),
        ]
        for x in classes:
            if x is None:
                continue
            lhs = decomposition_map(induce(sub, x), ell)
            rhs = induce(sub, decomposition_map(x, ell))
            if lhs != rhs:
                failures.append(f"|H| = {sub.order}")
                break
        if failures:
            break
    return _result(
        f"{group.name} ell={ell}", failures, f"{len(subgroups)} subgroups"
    )


def induction_square_suite(config: Config) -> list[PointResult]:
    return _run(config, _induction_point, _corpus_items(config, 24))


def _random_complex(seed: int) -> PermComplex:
    """種から G (位数 24 以下) と T を選んで T 自由な複体を作る"""
    rng = np.random.default_rng(seed)
    groups = group_corpus(24)
    g_group = groups[int(rng.integers(len(groups)))]
    t_group = FinAb(SMALL_TORI[int(rng.integers(len(SMALL_TORI)))])
    pieces = int(rng.integers(2, 5))
    return make_torsor_complex(g_group, t_group, seed, pieces=pieces)


def _complex_items(config: Config) -> list[tuple[int, int]]:
    seeds = range(config.seed, config.seed + config.complex_count)
    return [(s, ell) for s in seeds for ell in config.primes]


def _finite_spec(theta: AbChar, ell: int) -> CoeffSpec:
    return CoeffSpec.finite(ell, splitting_degree(theta.order, ell))


def _isotypic_point(config: Config, item: tuple[int, int]) -> PointResult:
    seed, ell = item
    c = _random_complex(seed)
    failures = []
    thetas = ell_prime_characters(c.t_group, ell)
    for theta in thetas:
        spec = _finite_spec(theta, ell)
        derived = homology(derived_isotypic(c, theta, spec, config.truncation))
        plain = homology(isotypic(c, theta, spec))
        for i, x in derived.items():
            expected = plain.get(i, GClass.zero(c.g_group, x.coefficient))
            if x != expected:
                failures.append(f"H_{i} at theta={theta.values}")
                break
        if failures:
            break
    point = f"seed={seed} {c.g_group.name} x {c.t_group} ell={ell}"
    return _result(point, failures, f"{len(thetas)} characters")


def fixed_point_control(truncation: int) -> PointResult:
    """T = Z/3 が自明に作用する1点と ℓ = 3: 導来版は各次数に Tor が出る

    Examples
    --------
    >>> fixed_point_control(4).passed
    True
    """
    t_group = FinAb((3,))
    stab = [(0, (k,)) for k in range(3)]
    c = PermComplex.build(cyclic_group(1), t_group, {0: [stab]})
    theta = AbChar.trivial(t_group)
    spec = CoeffSpec.finite(3)
    derived = homology(derived_isotypic(c, theta, spec, truncation))
    plain = homology(isotypic(c, theta, spec))
    dims = [derived[i].degree for i in sorted(derived)]
    failures = []
    if dims != [1] * truncation:
        failures.append(f"derived dimensions {dims}")
    if [x.degree for x in plain.values()] != [1]:
        failures.append("underived part is not one copy of F")
    return _result("fixed point T=Z/3 ell=3", failures, f"dims {dims}")


def isotypic_suite(config: Config) -> list[PointResult]:
    rows = _run(config, _isotypic_point, _complex_items(config))
    return [*rows, fixed_point_control(config.truncation)]


def _euler_point(config: Config, item: tuple[int, int]) -> PointResult:
    seed, ell = item
    c = _random_complex(seed)
    failures = []
    whole = euler_class(c, CoeffSpec.cyclotomic(1))
    if decomposition_map(whole, ell) != euler_class(c, CoeffSpec.finite(ell)):
        failures.append("G x T class")
    thetas = dual_enumerate(c.t_group)
    for theta in thetas:
        char0 = euler_class(c, CoeffSpec.cyclotomic(theta.order), theta)
        psi = theta.r_ell(ell)
        reduced = euler_class(c, _finite_spec(psi, ell), psi)
        if decomposition_map(char0, ell) != reduced:
            failures.append(f"theta={theta.values}")
            break
    point = f"seed={seed} {c.g_group.name} x {c.t_group} ell={ell}"
    return _result(point, failures, f"{len(thetas)} characters")


def euler_reduction_suite(config: Config) -> list[PointResult]:
    return _run(config, _euler_point, _complex_items(config))


def _weil_point(config: Config, point: GridPoint) -> PointResult:
    q, n, h, ell = point
    torus = build_torus(q, n, h, cap=config.caps.enumeration_cap)
    chars = enumerate_characters(torus, cap=config.caps.enumeration_cap)
    failures = []
    for t in chars:
        try:
            commutes = r_ell_param(sigma(t), ell) == sigma(r_ell(t, ell))
        except RuntimeError as e:
            commutes = False
            logger.debug("reduction of sigma failed: %s", e)
        if not commutes:
            failures.append(f"r_ell and sigma differ at {describe(t)}")
            break
    if not separates_orbits(chars):
        failures.append("sigma does not separate Frobenius orbits")
    orbits = {frozenset(galois_orbit(t)) for t in chars}
    checked = 0
    for t in chars[:INTERTWINING_SAMPLES]:
        try:
            value = intertwining_number(t, t, cap=config.weil_order_cap)
        except CapExceededError:
            continue
        checked += 1
        if value != stabilizer_order(t):
            failures.append(f"<sigma, sigma> = {value} at {describe(t)}")
            break
    return _result(
        point, failures, f"{len(orbits)} orbits, {checked} models"
    )


def weil_suite(config: Config) -> list[PointResult]:
    return _run(config, _weil_point, config.grid.grid_points())


def _diagram_point(config: Config, point: GridPoint) -> PointResult:
    q, n, h, ell = point
    torus = build_torus(q, n, h, cap=config.caps.enumeration_cap)
    provider = SyntheticProvider.build(q, n, h, seed=config.seed)
    tampered = TamperedProvider(provider, ell)
    chars = enumerate_characters(
        torus, coefficient=Coefficient.mod(ell), strongly_general=True
    )
    m = ell_valuation(q, n, ell)
    failures = []
    caught = 0
    for psi in chars:
        report = verify_diagram(q, n, h, ell, psi, provider)
        if not report.passed:
            failed = first(c for c in report.checks if not c.passed)
            failures.append(f"{failed.name} at {report.psi}")
            break
        if m > 0:
            caught += not verify_diagram(q, n, h, ell, psi, tampered).passed
    if m > 0 and chars and caught != len(chars):
        failures.append(f"tampered classes passed {len(chars) - caught} times")
    return _result(
        point, failures, f"{len(chars)} characters, {caught} tampered caught"
    )


def diagram_suite(config: Config) -> list[PointResult]:
    return _run(config, _diagram_point, config.diagram_points)


def _random_perm_class(
    g_group: FinGroup, t_group: FinAb, rng: np.random.Generator
) -> GClass:
    """Σ c_j [Z[(G×T)/K_j]] (K_j は無作為な生成元で生成)"""
    group = product_group(g_group, t_group)
    total = GClass.zero(group, Coefficient.char0())
    for _ in range(int(rng.integers(1, 4))):
        gens = rng.integers(group.order, size=int(rng.integers(1, 3)))
        sub = subgroup_generated(group, [int(x) for x in gens])
        total = total + permutation_character(sub) * int(
            rng.choice([-2, -1, 1, 2, 3])
        )
    return total


def _multiplicity_point(config: Config, item: tuple[int, int]) -> PointResult:
    seed, ell = item
    rng = np.random.default_rng(seed)
    groups = group_corpus(6)
    g_group = groups[int(rng.integers(len(groups)))]
    t_group = FinAb(SMALL_TORI[int(rng.integers(len(SMALL_TORI)))])
    m = _random_perm_class(g_group, t_group, rng)
    failures = []
    psis = ell_prime_characters(t_group, ell)
    for psi in psis:
        report = naive_multiplicity_check(m, psi, ell)
        if not report.passed:
            failures.append(f"psi={psi.values}")
            break
    point = f"seed={seed} {g_group.name} x {t_group} ell={ell}"
    return _result(point, failures, f"{len(psis)} characters")


def multiplicity_suite(config: Config) -> list[PointResult]:
    seeds = range(config.seed, config.seed + config.random_class_count)
    items = [(s, config.primes[s % len(config.primes)]) for s in seeds]
    return _run(config, _multiplicity_point, items)


SUITES: dict[str, Callable[[Config], list[PointResult]]] = {
    "teichmueller": teichmueller_suite,
    "torus": torus_suite,
    "lifts": lifts_suite,
    "position": position_suite,
    "projectivity": projectivity_suite,
    "induction-square": induction_square_suite,
    "isotypic": isotypic_suite,
    "euler-reduction": euler_reduction_suite,
    "weil": weil_suite,
    "diagram": diagram_suite,
    "multiplicity": multiplicity_suite,
}


def run_suite(name: str, config: Config) -> SuiteReport:
    """名前で指定したスイートを実行する

    Raises
    ------
    ValueError
        スイート名が不明な時に送出
    """
    if name not in SUITES:
        msg = f"unknown suite {name!r}, choose from {', '.join(SUITES)}"
        raise ValueError(msg)
    logger.info("running suite %s", name)
    rows = SUITES[name](config)
    report = SuiteReport(
        name=name, passed=all(r.passed for r in rows), rows=rows
    )
    logger.info(
        "suite %s: %d points, %d failures",
        name,
        len(rows),
        sum(not r.passed for r in rows),
    )
    return report

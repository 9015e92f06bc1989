"""コマンドラインの入口 ``ellchar``

終了コードは成功で 0、検証の失敗で 1、入力の誤りで 2。
"""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from ellchar_lib import __version__
from ellchar_lib.chaincx import (
    CoeffSpec,
    PermComplex,
    base_change,
    derived_isotypic,
    euler_class,
    homology,
    isotypic,
    product_group,
)
from ellchar_lib.chars import (
    TorusChar,
    UniformizerValue,
    enumerate_characters,
    is_general,
    is_strongly_general,
    level,
)
from ellchar_lib.cyclo import Coefficient, RootOfUnity
from ellchar_lib.dlclass import (
    SyntheticProvider,
    TamperedProvider,
    describe,
    naive_multiplicity_check,
    verify_diagram,
)
from ellchar_lib.fgab import AbChar, ell_prime_characters
from ellchar_lib.ggroup import GClass, cyclic_group, regular_class
from ellchar_lib.suite_config import check_point, load_config
from ellchar_lib.suites import SUITES, run_suite, summary, write_report
from ellchar_lib.torus import build_torus
from ellchar_lib.weil import sigma

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], int]


def _emit(data: object) -> None:
    text = json.dumps(data, indent=2, ensure_ascii=False, default=str)
    print(text)  # noqa: T201


def _parse_values(text: str | None) -> tuple[RootOfUnity, ...] | None:
    """カンマ区切りの値 (例 1/3,0/1) を読む (空文字列は階数0の群の指標)"""
    if text is None:
        return None
    return tuple(RootOfUnity.parse(v) for v in text.split(",") if v)


def _parse_unit(text: str | None) -> UniformizerValue:
    if text is None:
        return UniformizerValue()
    return UniformizerValue(unit_part=RootOfUnity.parse(text))


def _characters(
    args: argparse.Namespace, coefficient: Coefficient
) -> list[TorusChar]:
    torus = build_torus(args.q, args.n, args.h)
    chars = enumerate_characters(
        torus,
        uniformizer=_parse_unit(getattr(args, "unit", None)),
        coefficient=coefficient,
    )
    values = _parse_values(getattr(args, "values", None))
    if values is None:
        return chars
    chosen = [c for c in chars if c.level_part.values == values]
    if not chosen:
        msg = f"no character of {torus!r} takes the values {args.values}"
        raise ValueError(msg)
    return chosen


def _torus_build(args: argparse.Namespace) -> int:
    _emit(build_torus(args.q, args.n, args.h).to_dict())
    return 0


def _chars_enumerate(args: argparse.Namespace) -> int:
    coefficient = (
        Coefficient.char0() if args.ell is None else Coefficient.mod(args.ell)
    )
    chars = _characters(args, coefficient)
    if args.strongly_general:
        chars = [c for c in chars if is_strongly_general(c)]
    _emit(
        [
            {
                "label": describe(c),
                "level": level(c),
                "general": is_general(c),
                "strongly_general": is_strongly_general(c),
                "character": c.to_dict(),
            }
            for c in chars
        ]
    )
    return 0


def _weil_sigma(args: argparse.Namespace) -> int:
    chars = _characters(args, Coefficient.char0())
    _emit(
        [{"label": describe(c), "sigma": sigma(c).to_dict()} for c in chars]
    )
    return 0


def _load_complex(path: Path) -> PermComplex:
    return PermComplex.from_dict(json.loads(path.read_text(encoding="utf-8")))


def _theta(c: PermComplex, text: str | None) -> AbChar | None:
    values = _parse_values(text)
    return None if values is None else AbChar(c.t_group, values)


def _classes(out: dict[int, GClass]) -> dict[str, Any]:
    return {
        str(i): {"dimension": x.degree, "class": x.to_dict()}
        for i, x in out.items()
    }


def _complex(args: argparse.Namespace) -> int:
    c = _load_complex(args.input)
    spec = CoeffSpec.parse(args.spec)
    theta = _theta(c, args.theta)
    if args.action == "euler":
        _emit(euler_class(c, spec, theta).to_dict())
        return 0
    if args.action == "derived":
        if theta is None:
            msg = "derived needs --theta"
            raise ValueError(msg)
        m = derived_isotypic(c, theta, spec, args.truncation)
    elif theta is None:
        m = base_change(c, spec)
    else:
        m = isotypic(c, theta, spec)
    _emit(
        {
            "spec": str(spec),
            "ranks": {str(i): m.rank(i) for i in m.degrees},
            "valid": list(m.valid),
            "homology": _classes(homology(m)),
        }
    )
    return 0


def _verify_diagram(args: argparse.Namespace) -> int:
    point = check_point((args.q, args.n, args.h, args.ell))
    provider = SyntheticProvider.build(*point[:3], seed=args.seed)
    chosen = TamperedProvider(provider, args.ell) if args.tamper else provider
    strong = args.positions == "strong"
    position = is_strongly_general if strong else is_general
    chars = [
        psi
        for psi in _characters(args, Coefficient.mod(args.ell))
        if position(psi)
    ]
    reports = [
        verify_diagram(*point, psi, chosen, positions=args.positions)
        for psi in chars
    ]
    _emit([r.model_dump() for r in reports])
    return 0 if all(r.passed for r in reports) else 1


def _verify_multiplicity(args: argparse.Namespace) -> int:
    point = check_point((args.q, args.n, 1, args.ell))
    t_group = build_torus(point[0], point[1], 1).unit_group
    group = product_group(cyclic_group(1), t_group)
    m = regular_class(group, Coefficient.char0())
    reports = [
        naive_multiplicity_check(m, psi, args.ell)
        for psi in ell_prime_characters(t_group, args.ell)
    ]
    _emit([r.model_dump() for r in reports])
    return 0 if all(r.passed for r in reports) else 1


def _suite(args: argparse.Namespace) -> int:
    overrides: dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["output_dir"] = args.out
    config = load_config(args.config, overrides)
    point = (args.q, args.n, args.h, args.ell)
    if any(x is not None for x in point):
        if any(x is None for x in point):
            msg = "--q, --n, --h and --ell must be given together"
            raise ValueError(msg)
        check_point(point)
        grid = config.grid.model_copy(update={"points": [point]})
        config = config.model_copy(
            update={"grid": grid, "diagram_points": [point]}
        )
    report = run_suite(args.name, config)
    if config.output_dir is not None:
        for path in write_report(report, config.output_dir):
            logger.info("wrote %s", path)
    if args.json:
        print(report.model_dump_json(indent=2))  # noqa: T201
    else:
        print(summary(report))  # noqa: T201
    return 0 if report.passed else 1


def _point_options(parser: argparse.ArgumentParser, *, ell: bool) -> None:
    parser.add_argument("--q", type=int, required=True)
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--h", type=int, default=1)
    if ell:
        parser.add_argument("--ell", type=int, required=True)
    parser.add_argument(
        "--values", help='level part values, e.g. "1/3,0/1"'
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellchar",
        description="mod-ell characters of unramified tori and their "
        "finite-level cohomology classes",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    torus = commands.add_parser("torus").add_subparsers(
        dest="action", required=True
    )
    build = torus.add_parser("build")
    build.add_argument("--q", type=int, required=True)
    build.add_argument("--n", type=int, required=True)
    build.add_argument("--h", type=int, default=1)
    build.set_defaults(handler=_torus_build)

    chars = commands.add_parser("chars").add_subparsers(
        dest="action", required=True
    )
    enum = chars.add_parser("enumerate")
    _point_options(enum, ell=False)
    enum.add_argument("--ell", type=int)
    enum.add_argument("--unit", help='value at the uniformizer, e.g. "1/2"')
    enum.add_argument("--strongly-general", action="store_true")
    enum.set_defaults(handler=_chars_enumerate)

    weil = commands.add_parser("weil").add_subparsers(
        dest="action", required=True
    )
    sig = weil.add_parser("sigma")
    _point_options(sig, ell=False)
    sig.add_argument("--unit")
    sig.set_defaults(handler=_weil_sigma)

    complex_ = commands.add_parser("complex")
    complex_.add_argument(
        "action", choices=["homology", "isotypic", "derived", "euler"]
    )
    complex_.add_argument("--in", dest="input", type=Path, required=True)
    complex_.add_argument("--spec", default="Q", help="Z, Q, cyc:N or F:l^k")
    complex_.add_argument("--theta", help='values on T, e.g. "1/3"')
    complex_.add_argument("--truncation", type=int, default=8)
    complex_.set_defaults(handler=_complex)

    verify = commands.add_parser("verify").add_subparsers(
        dest="action", required=True
    )
    diagram = verify.add_parser("diagram")
    _point_options(diagram, ell=True)
    diagram.add_argument(
        "--provider", choices=["synthetic"], default="synthetic"
    )
    diagram.add_argument("--tamper", action="store_true")
    diagram.add_argument(
        "--positions", choices=["strong", "general"], default="strong"
    )
    diagram.add_argument("--seed", type=int, default=0)
    diagram.set_defaults(handler=_verify_diagram)
    mult = verify.add_parser("multiplicity")
    mult.add_argument("--q", type=int, required=True)
    mult.add_argument("--n", type=int, required=True)
    mult.add_argument("--ell", type=int, required=True)
    mult.set_defaults(handler=_verify_multiplicity)

    suite = commands.add_parser("suite")
    suite.add_argument("name", choices=list(SUITES))
    suite.add_argument("--config", type=Path)
    for name in ("q", "n", "h", "ell"):
        suite.add_argument(f"--{name}", type=int)
    suite.add_argument("--seed", type=int)
    suite.add_argument("--workers", type=int)
    suite.add_argument("--out", type=Path)
    suite.add_argument("--json", action="store_true")
    suite.set_defaults(handler=_suite)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler: Handler = args.handler
    try:
        return handler(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)  # noqa: T201
        return 2


if __name__ == "__main__":
    sys.exit(main())

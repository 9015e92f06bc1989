from invoke.context import Context
from invoke.tasks import task

QUICK_SUITES = ("teichmueller", "torus", "lifts", "position", "weil")


@task
def fmt(c: Context) -> None:
    c.run("ruff check --fix-only --show-fixes src tests", pty=True)
    c.run("ruff format tasks.py src tests", pty=True)


@task
def lint(c: Context) -> None:
    c.run("ruff format --check src tests", pty=True)
    c.run("ruff check src tests", pty=True, warn=True)
    c.run("mypy src tests", pty=True, warn=True)


@task
def test(c: Context, *, cov: bool = False, slow: bool = False) -> None:
    options = []
    if cov:
        options.append("--cov-report=term-missing --cov-report=html --cov")
    if not slow:
        options.append('-m "not slow"')
    c.run(f"pytest {' '.join(options)} src tests", pty=True)


@task
def suite(
    c: Context, name: str = "", config: str = "", out: str = "reports"
) -> None:
    """検証スイートを実行する (name を省くと軽いスイートを全て)"""
    names = [name] if name else QUICK_SUITES
    config_option = f"--config {config}" if config else ""
    for n in names:
        c.run(f"ellchar suite {n} {config_option} --out {out}", warn=True)

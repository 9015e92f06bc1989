import json
import os
from collections.abc import Mapping
from itertools import product
from pathlib import Path

from pydantic import BaseModel, field_validator

from ellchar_lib.cyclo import check_prime
from ellchar_lib.limits import (
    ENUMERATION_CAP,
    EXTENSION_DEGREE_CAP,
    FIELD_SIZE_CAP,
    GROUP_ORDER_CAP,
)
from ellchar_lib.torus import prime_power

GridPoint = tuple[int, int, int, int]

CAP_ENV = "ELLCHAR_CAP"


def check_point(point: GridPoint) -> GridPoint:
    """(q, n, h, ℓ) の検査

    Raises
    ------
    ValueError
        ℓ が q の標数と等しい、または n, h が正でない時に送出
    """
    q, n, h, ell = point
    p, _ = prime_power(q)
    check_prime(ell)
    if n < 1 or h < 1:
        msg = f"n and h must be positive at {point}"
        raise ValueError(msg)
    if ell == p:
        msg = f"ell = {ell} equals the residue characteristic of q = {q}"
        raise ValueError(msg)
    return point


class Caps(BaseModel):
    enumeration_cap: int = ENUMERATION_CAP
    group_order_cap: int = GROUP_ORDER_CAP
    field_size_cap: int = FIELD_SIZE_CAP
    extension_degree_cap: int = EXTENSION_DEGREE_CAP


class GridSpec(BaseModel):
    q: list[int] = [2, 3, 4, 5, 7]
    n: list[int] = [1, 2, 3]
    h: list[int] = [1, 2, 3]
    ell: list[int] = [2, 3, 5, 7]
    max_torus_size: int = 4096
    points: list[GridPoint] | None = None

    @field_validator("points")
    @classmethod
    def _check_points(
        cls: type["GridSpec"], points: list[GridPoint] | None
    ) -> list[GridPoint] | None:
        if points is not None:
            for point in points:
                check_point(point)
        return points

    def grid_points(self: "GridSpec") -> list[GridPoint]:
        """格子点 (範囲から作る時は ℓ = p の点を飛ばす)

        Examples
        --------
        >>> spec = GridSpec(q=[2, 3], n=[2], h=[1], ell=[2, 3])
        >>> spec.grid_points()
        [(2, 2, 1, 3), (3, 2, 1, 2)]
        """
        if self.points is not None:
            return list(self.points)
        out = []
        for q, n, h, ell in product(self.q, self.n, self.h, self.ell):
            if q ** (n * h) > self.max_torus_size:
                continue
            if prime_power(q)[0] == ell:
                continue
            out.append(check_point((q, n, h, ell)))
        return out


class Config(BaseModel):
    caps: Caps = Caps()
    grid: GridSpec = GridSpec()
    primes: list[int] = [2, 3, 5]
    diagram_points: list[GridPoint] = [(2, 2, 2, 3), (3, 2, 2, 2)]
    seed: int = 0
    complex_count: int = 50
    truncation: int = 8
    random_class_count: int = 200
    weil_order_cap: int = 2000
    workers: int = 1
    output_dir: Path | None = None

    @field_validator("diagram_points")
    @classmethod
    def _check_diagram_points(
        cls: type["Config"], points: list[GridPoint]
    ) -> list[GridPoint]:
        for point in points:
            check_point(point)
        return points


def load_config(
    path: Path | None = None,
    overrides: Mapping[str, object] | None = None,
) -> Config:
    """JSON ファイルと上書き値から Config を作る

    環境変数 ELLCHAR_CAP があれば列挙と群の位数の上限をその値にする。

    Raises
    ------
    ValueError
        設定が不正な時に送出 (pydantic の ValidationError)
    """
    data: dict[str, object] = {}
    if path is not None:
        data = json.loads(path.read_text(encoding="utf-8"))
    data.update(overrides or {})
    config = Config.model_validate(data)
    if CAP_ENV in os.environ:
        cap = int(os.environ[CAP_ENV])
        config = config.model_copy(
            update={
                "caps": config.caps.model_copy(
                    update={"enumeration_cap": cap, "group_order_cap": cap}
                )
            }
        )
    return config

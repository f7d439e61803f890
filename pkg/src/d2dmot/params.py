"""Closed-form figures of merit for each topology family.

Values are the textbook formulas evaluated literally; bracketed halves and
eighths are floored. Folded torus, octagon, SPIN and butterfly fat tree have
no builder and exist here only as a calculator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import SizeUnsupported
from .topology import Family, log2_exact, normalize_size


@dataclass(frozen=True)
class TopoParams:
    diameter: int | None
    bisection_width: int | None
    router_count: int
    node_degree: dict[str, int] = field(default_factory=dict)
    link_count: int | None = None
    ip_count: int | None = None

    def __post_init__(self):
        for name in ("diameter", "bisection_width", "router_count", "link_count", "ip_count"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")


def _mesh_links(m: int, n: int) -> int:
    return 2 * m * n - m - n


def params_for(family, size) -> TopoParams:
    family = Family.parse(family)
    size = normalize_size(family, size)
    if any(s < 1 for s in size):
        raise SizeUnsupported(f"sizes must be positive, got {size}")

    if family is Family.MESH:
        m, n = size
        return TopoParams(
            diameter=m + n - 2,
            bisection_width=min(m, n),
            router_count=m * n,
            node_degree={"corner": 3, "boundary": 4, "central": 5},
            link_count=_mesh_links(m, n),
            ip_count=m * n,
        )
    if family in (Family.TORUS, Family.FOLDED_TORUS):
        m, n = size
        return TopoParams(
            diameter=m // 2 + n // 2,
            bisection_width=2 * min(m, n),
            router_count=m * n,
            node_degree={"switch": 5},
            link_count=2 * m * n,
            ip_count=m * n,
        )
    if family is Family.D2DMESH:
        m, n = size
        # no closed-form diameter is given for the augmented mesh
        return TopoParams(
            diameter=None,
            bisection_width=None,
            router_count=m * n,
            node_degree={},
            link_count=_mesh_links(m, n) + 8,
            ip_count=m * n,
        )
    if family is Family.BINARY_TREE:
        (n,) = size
        return TopoParams(
            diameter=log2_exact(n, "binary tree IP count"),
            bisection_width=1,
            router_count=n - 1,
            node_degree={"leaf": 5, "stem": 3, "root": 2},
            link_count=max(n - 2, 0),
            ip_count=n,
        )
    if family is Family.OCTAGON:
        (n,) = size
        if n <= 8:
            bisection, routers = 6, 8
        else:
            bisection, routers = 6 * (1 + n // 8), 8 * (1 + n // 8)
        return TopoParams(
            diameter=2 * (n // 8),
            bisection_width=bisection,
            router_count=routers,
            node_degree={"member": 4, "bridge": 7},
            ip_count=n,
        )
    if family is Family.SPIN:
        (n,) = size
        lg = log2_exact(n, "SPIN IP count")
        if n < 8:
            raise SizeUnsupported("SPIN router count needs at least 8 IP cores")
        return TopoParams(
            diameter=lg,
            bisection_width=n // 2,
            router_count=n * (lg - 3),
            node_degree={"non_root": 8, "root": 4},
            ip_count=n,
        )
    if family is Family.BFT:
        (n,) = size
        lg = log2_exact(n, "butterfly fat tree IP count")
        return TopoParams(
            diameter=lg,
            bisection_width=math.isqrt(n),
            router_count=n // 2,
            node_degree={"non_root": 6, "root": 4},
            ip_count=n,
        )
    if family is Family.MOT:
        m, n = size
        lm, ln = log2_exact(m, "MoT rows"), log2_exact(n, "MoT cols")
        return TopoParams(
            diameter=2 * lm + 2 * ln,
            bisection_width=min(m, n),
            router_count=3 * m * n - (m + n),
            node_degree={"leaf": 2, "stem": 3, "root": 18},
            link_count=2 * (m * (n - 1) + n * (m - 1)),
            ip_count=m * n,
        )
    if family is Family.D2DMOT:
        m, n = size
        log2_exact(m, "D2D-MoT rows")
        log2_exact(n, "D2D-MoT cols")
        return TopoParams(
            diameter=None,
            bisection_width=None,
            router_count=3 * m * n - (m + n),
            node_degree={"leaf": 5, "stem": 3, "internal_root": 3, "external_root": 2},
            link_count=3 * m * n + (8 + 2),
            ip_count=2 * m * n,
        )
    raise SizeUnsupported(f"no closed-form parameters for {family.value}")

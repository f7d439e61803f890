"""Router addressing schemes.

Two schemes are used. Grid families (mesh, torus, diametrical mesh) label a
switch by its row ``x`` and column ``y``. Mesh-of-tree families use a
four-field address: a row prefix (RN), the column-tree level (CL), a column
prefix (CN) and the row-tree level (RL). A node at column-tree level ``cl``
covers every row whose top ``cl`` bits equal ``rn``; leaves carry full-length
prefixes in both fields.
"""

from __future__ import annotations

from dataclasses import dataclass


def bit_width(dim: int) -> int:
    """Bits needed to number ``dim`` items (at least one bit)."""
    return max(1, (dim - 1).bit_length())


@dataclass(frozen=True, order=True)
class XYAddress:
    x: int  # row
    y: int  # column

    def encode(self, rows: int, cols: int) -> str:
        """Binary label, X bits then Y bits."""
        return format(self.x, f"0{bit_width(rows)}b") + format(self.y, f"0{bit_width(cols)}b")

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y}


@dataclass(frozen=True, order=True)
class MoTAddress:
    """RN/CL/CN/RL address; ``cl`` and ``rl`` are the prefix lengths."""

    rn: int
    cl: int
    cn: int
    rl: int
    core_id: int = 0

    @classmethod
    def leaf(cls, row: int, col: int, row_bits: int, col_bits: int, core_id: int = 0) -> MoTAddress:
        return cls(row, row_bits, col, col_bits, core_id)

    def covers_row(self, row: int, row_bits: int) -> bool:
        return (row >> (row_bits - self.cl)) == self.rn

    def covers_col(self, col: int, col_bits: int) -> bool:
        return (col >> (col_bits - self.rl)) == self.cn

    def node_key(self) -> MoTAddress:
        """The router part of the address (core id dropped)."""
        if self.core_id == 0:
            return self
        return MoTAddress(self.rn, self.cl, self.cn, self.rl)

    def with_core(self, core_id: int) -> MoTAddress:
        return MoTAddress(self.rn, self.cl, self.cn, self.rl, core_id)

    def to_dict(self) -> dict:
        return {"rn": self.rn, "cl": self.cl, "cn": self.cn, "rl": self.rl}


def address_from_dict(data: dict | None):
    if data is None:
        return None
    if "x" in data:
        return XYAddress(data["x"], data["y"])
    return MoTAddress(data["rn"], data["cl"], data["cn"], data["rl"])

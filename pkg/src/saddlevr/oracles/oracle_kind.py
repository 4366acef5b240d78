from __future__ import annotations

from enum import Enum


class OracleKind(str, Enum):
    """Available gradient oracles, by command-line tag."""

    FULL = "full"
    UNIFORM_RC = "uniform-rc"
    IMPORTANCE_RC = "importance-rc"
    COORD_L1 = "coord-l1"
    COORD_FRO = "coord-fro"

    @classmethod
    def parse(cls, tag: str | OracleKind) -> OracleKind:
        """Accepts ``coord_fro`` as well as ``coord-fro``."""
        if isinstance(tag, OracleKind):
            return tag
        return cls(tag.strip().lower().replace("_", "-"))

    @property
    def is_coordinate(self) -> bool:
        return self in (OracleKind.COORD_L1, OracleKind.COORD_FRO)

    @property
    def is_row_column(self) -> bool:
        return self in (OracleKind.UNIFORM_RC, OracleKind.IMPORTANCE_RC)

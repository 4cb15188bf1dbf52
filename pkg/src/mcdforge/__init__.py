"""mcdforge: compile extended conceptual data models into relational schemas,
table-API integrity code and journaling structures, with iterative migration
planning."""

__version__ = "0.1.0"

from .mcd_parser import parse, serialize
from .conformance import check
from .transform_mld import IDENTIFYING, NON_IDENTIFYING, transform
from .tapis_gen import build_physical
from .sql_emit import emit_ddl
from .migrate_diff import diff, emit_migration

__all__ = [
    "parse",
    "serialize",
    "check",
    "transform",
    "IDENTIFYING",
    "NON_IDENTIFYING",
    "build_physical",
    "emit_ddl",
    "diff",
    "emit_migration",
    "__version__",
]

"""SQL rendering for pluggable dialects.

``oracle`` renders package-based table APIs (triggers copy row state into
record variables, call the procedure chain, write values back). ``embedded``
targets an embedded engine without stored procedures: procedure logic is
inlined into trigger bodies, value normalization moves to after-row triggers,
and the physical model stays procedure-structured; only rendering flattens it.

Scripts are UTF-8, LF line endings, two-space indent. Each script opens with a
generator header and the source-model hash; golden comparisons exclude the
hash line.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from ..model_ir import PhysicalModel, ProcedureSpec

GENERATOR = "mcdforge"
VERSION = "0.1.0"

DIALECT_ORACLE = "oracle"
DIALECT_EMBEDDED = "embedded"
DIALECTS = (DIALECT_ORACLE, DIALECT_EMBEDDED)

DDL_SCRIPT_NAMES = ("01_tables.sql", "02_journal.sql", "03_tapis.sql", "04_triggers.sql")
MIGRATION_SCRIPT_NAMES = (
    "01_drop_code.sql",
    "02_schema.sql",
    "03_tapis.sql",
    "04_triggers.sql",
)


class UnsupportedDialectError(Exception):
    def __init__(self, dialect: str):
        self.dialect = dialect
        super().__init__(f"unsupported dialect {dialect!r} (choose from {', '.join(DIALECTS)})")


class UnsupportedFeatureError(Exception):
    def __init__(self, dialect: str, feature: str):
        self.dialect = dialect
        self.feature = feature
        super().__init__(f"dialect {dialect} cannot express {feature}")


@dataclass(frozen=True)
class Script:
    name: str
    text: str


@dataclass(frozen=True)
class ScriptBundle:
    scripts: tuple[Script, ...]

    def script(self, name: str) -> Script:
        for s in self.scripts:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def text(self) -> str:
        return "\n".join(s.text for s in self.scripts)

    def write_to(self, directory: str | Path) -> list[Path]:
        target = Path(directory)
        target.mkdir(parents=True, exist_ok=True)
        written = []
        for s in self.scripts:
            path = target / s.name
            path.write_text(s.text, encoding="utf-8", newline="\n")
            written.append(path)
        return written


def model_hash(physical: PhysicalModel) -> str:
    from ..tapis_gen import serialize_physical

    return hashlib.sha256(serialize_physical(physical).encode("utf-8")).hexdigest()[:12]


def script_header(script_name: str, dialect: str, source_hash: str) -> str:
    return (
        f"-- {GENERATOR} {VERSION} {script_name} dialect={dialect}\n"
        f"-- model-hash: {source_hash}\n"
    )


def strip_hash_lines(text: str) -> str:
    """Drop the model-hash header lines so golden comparisons stay stable
    across cosmetic model edits."""
    return "\n".join(
        line for line in text.splitlines() if not line.startswith("-- model-hash:")
    )


def emit_ddl(physical: PhysicalModel, dialect: str) -> ScriptBundle:
    """Render the physical model to a dependency-ordered script bundle:
    tables, journal tables, table-API code, triggers."""
    if dialect == DIALECT_ORACLE:
        from . import oracle

        return oracle.emit_ddl(physical)
    if dialect == DIALECT_EMBEDDED:
        from . import embedded

        return embedded.emit_ddl(physical)
    raise UnsupportedDialectError(dialect)


def render_frozen_guard(proc: ProcedureSpec, dialect: str, table_name: str) -> str:
    """Dialect-correct compare-and-raise text for a frozen_column procedure.
    Two nulls compare equal and null-versus-value counts as a first write."""
    if dialect == DIALECT_ORACLE:
        from . import oracle

        return oracle.render_frozen_guard(proc, table_name)
    if dialect == DIALECT_EMBEDDED:
        from . import embedded

        return embedded.render_frozen_guard(proc, table_name)
    raise UnsupportedDialectError(dialect)

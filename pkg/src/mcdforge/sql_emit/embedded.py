"""Embedded dialect (SQLite). The engine has no stored procedures, so
procedure logic is inlined into trigger bodies:

* checks (word/token refinement, PEA coupling, frozen columns) become
  RAISE(ABORT) guards in the BIR/BUR before-row triggers;
* value normalization (init=now() fills, uppercase rewrites) cannot touch NEW
  in a before trigger, so it runs in extra after-row triggers (AIR/AUR) as a
  self-update of the freshly written row, bracketed by a session flag that
  keeps the normalization update from journaling itself;
* journal rows are written after normalization (INS/UPD read the stored row
  back) and in the before-delete trigger for DEL (key values only).

A frozen column that also carries init=now() is compared through the
autogen-adjusted value: assigning NULL to it counts as a modification, exactly
as the package dialect's autogen-then-frozen procedure order behaves.

Session state (journal user, normalization flag) lives in the single-row
``tapis_session`` table; the journal user falls back to 'unknown'.
"""

from __future__ import annotations

from .. import naming
from ..model_ir import (
    MSGTEXT_PEA_MANDATORY,
    ORIGIN_SURROGATE,
    PROC_CHECKTYPE,
    PROC_FROZEN,
    PROC_PEA,
    PhysicalModel,
    NeutralType,
    ProcedureSpec,
    Table,
    TableApi,
)

SESSION_TABLE = "tapis_session"
USER_EXPR = f"coalesce((SELECT jn_user FROM {SESSION_TABLE}), 'unknown')"
INTERNAL_EXPR = f"(SELECT internal FROM {SESSION_TABLE})"
TRIGGER_SUFFIXES = ("BIR", "AIR", "BUR", "AUR", "BDR")


def render_type(t: NeutralType) -> str:
    if t.kind == "TEXT":
        return "TEXT"
    if t.kind == "INTEGER":
        return "INTEGER"
    if t.kind == "NUMERIC":
        return "NUMERIC"
    if t.kind in ("DATE", "TIMESTAMP"):
        return "TEXT"  # ISO-8601
    if t.kind == "BOOLEAN":
        return "INTEGER"
    if t.kind == "INTERVAL":
        return "INTEGER"  # whole seconds
    raise ValueError(f"unknown neutral type {t.kind}")


def now_expr(t: NeutralType) -> str:
    return "date('now')" if t.kind == "DATE" else "datetime('now')"


def _sql_literal(text: str) -> str:
    return "'" + text.replace("'", "''") + "'"


def error_message(code: int | None, table: str, column: str, key: str, text: str) -> str:
    return f"[{code}] Table: {table} , Colonne: {column} , {key} , {text}"


def _abort(condition: str, message: str) -> str:
    return f"SELECT RAISE(ABORT, {_sql_literal(message)})\nWHERE {condition};"


def surrogate_column(table: Table) -> str | None:
    for c in table.columns:
        if c.origin_kind == ORIGIN_SURROGATE:
            return c.name
    return None


def render_create_table(table: Table) -> str:
    surrogate = surrogate_column(table)
    inline_pk = surrogate is not None and table.primary_key == (surrogate,)
    lines = [f"CREATE TABLE IF NOT EXISTS {table.name} ("]
    defs = []
    for c in table.columns:
        d = f"  {c.name} {render_type(c.sql_type)}"
        if inline_pk and c.name == surrogate:
            d += " PRIMARY KEY"  # rowid alias, auto-assigned on NULL insert
        elif not c.nullable and not c.init_expr:
            # init-bearing columns are filled after insert; their mandatory
            # character is guaranteed by the fill, not by the DDL
            d += " NOT NULL"
        defs.append(d)
    if table.primary_key and not inline_pk:
        defs.append(
            f"  CONSTRAINT {naming.pk_constraint_name(table.name)}"
            f" PRIMARY KEY ({', '.join(table.primary_key)})"
        )
    for fk in table.foreign_keys:
        d = (
            f"  CONSTRAINT {fk.name} FOREIGN KEY ({', '.join(fk.columns)})"
            f" REFERENCES {fk.referenced_table} ({', '.join(fk.referenced_columns)})"
        )
        d += " ON DELETE CASCADE" if fk.identifying else " ON DELETE RESTRICT"
        defs.append(d)
    lines.append(",\n".join(defs))
    lines.append(");")
    return "\n".join(lines)


def render_unique_indexes(table: Table) -> list[str]:
    # separate unique indexes keep their names observable in the catalog
    return [
        f"CREATE UNIQUE INDEX IF NOT EXISTS {u.name}"
        f" ON {table.name} ({', '.join(u.columns)});"
        for u in table.uniques
    ]


def render_frozen_guard(proc: ProcedureSpec, table_name: str) -> str:
    """Canonical guard text for a frozen column (no init adjustment): both
    values present and different aborts the statement."""
    blocks = []
    for col in proc.target_columns:
        message = error_message(
            proc.error_code, table_name, col, proc.message_key or "", proc.message_text or ""
        )
        blocks.append(
            _abort(
                f"OLD.{col} IS NOT NULL AND NEW.{col} IS NOT NULL AND NEW.{col} <> OLD.{col}",
                message,
            )
        )
    return "\n".join(blocks)


def _frozen_statements(table: Table, proc: ProcedureSpec) -> list[str]:
    out = []
    for col_name in proc.target_columns:
        col = table.column(col_name)
        message = error_message(
            proc.error_code, table.name, col_name, proc.message_key or "", proc.message_text or ""
        )
        if col.init_expr:
            new_value = f"coalesce(NEW.{col_name}, {now_expr(col.sql_type)})"
            cond = f"OLD.{col_name} IS NOT NULL AND {new_value} <> OLD.{col_name}"
        else:
            cond = (
                f"OLD.{col_name} IS NOT NULL AND NEW.{col_name} IS NOT NULL"
                f" AND NEW.{col_name} <> OLD.{col_name}"
            )
        out.append(_abort(cond, message))
    return out


def _checktype_statements(table: Table, proc: ProcedureSpec) -> list[str]:
    out = []
    for col_name in proc.target_columns:
        base = table.column(col_name).logical_type.base
        message = error_message(
            proc.error_code, table.name, col_name, proc.message_key or "",
            f"{proc.message_text} ({base})",
        )
        v = f"NEW.{col_name}"
        whitespace = (
            f"instr({v}, char(9)) > 0 OR instr({v}, char(10)) > 0 OR instr({v}, char(13)) > 0"
        )
        if base == "word":
            cond = f"instr({v}, ' ') > 0 OR {whitespace}"
        else:  # token
            cond = f"{v} <> trim({v}) OR {whitespace} OR instr({v}, '  ') > 0"
        out.append(_abort(f"{v} IS NOT NULL AND ({cond})", message))
    return out


def _pea_statements(table: Table, proc: ProcedureSpec) -> list[str]:
    from ..tapis_gen import pea_groups

    out = []
    for fk_name, cols in pea_groups(table).items():
        fk = next(f for f in table.foreign_keys if f.name == fk_name)
        all_null = " AND ".join(f"NEW.{c} IS NULL" for c in fk.columns)
        all_set = " AND ".join(f"NEW.{c} IS NOT NULL" for c in fk.columns)
        for col in cols:
            message = error_message(
                proc.error_code, table.name, col.name, proc.message_key or "",
                proc.message_text or "",
            )
            out.append(_abort(f"({all_null}) AND NEW.{col.name} IS NOT NULL", message))
        for col in cols:
            if col.name not in proc.mandatory_columns:
                continue
            message = error_message(
                proc.error_code, table.name, col.name, proc.message_key or "",
                MSGTEXT_PEA_MANDATORY,
            )
            out.append(_abort(f"({all_set}) AND NEW.{col.name} IS NULL", message))
    return out


def _normalization_sets(table: Table) -> list[str]:
    sets = []
    for c in table.columns:
        if c.init_expr and c.origin_kind != ORIGIN_SURROGATE:
            sets.append(f"{c.name} = coalesce({c.name}, {now_expr(c.sql_type)})")
        elif c.uppercase:
            sets.append(f"{c.name} = upper({c.name})")
    return sets


def _journal_insert(table: Table, operation: str) -> str:
    journal = naming.journal_table_name(table.name)
    cols = [c.name for c in table.columns]
    target = ", ".join(["JN_OPERATION", "JN_USER", "JN_DATETIME"] + cols)
    if operation == "DEL":
        values = ", ".join(
            ["'DEL'", USER_EXPR, "datetime('now')"]
            + [f"OLD.{c}" if c in table.primary_key else "NULL" for c in cols]
        )
        return f"INSERT INTO {journal} ({target})\nVALUES ({values});"
    select = ", ".join(
        [f"'{operation}'", USER_EXPR, "datetime('now')"] + [f"t.{c}" for c in cols]
    )
    return (
        f"INSERT INTO {journal} ({target})\n"
        f"SELECT {select}\nFROM {table.name} t WHERE t.rowid = NEW.rowid;"
    )


def _trigger(name: str, head: str, statements: list[str], when: str | None = None) -> str:
    lines = [f"CREATE TRIGGER {name}", head]
    if when:
        lines.append(f"WHEN {when}")
    lines.append("BEGIN")
    for stmt in statements:
        for line in stmt.splitlines():
            lines.append("  " + line if line else line)
    lines.append("END;")
    return "\n".join(lines)


def render_table_triggers(table: Table, api: TableApi) -> list[str]:
    """All trigger objects for one table API. Checks run before the row is
    written; normalization and journaling run after (delete journaling keeps
    running before the row disappears)."""
    checks: list[str] = []
    checktype = api.procedure(PROC_CHECKTYPE)
    if checktype:
        checks.extend(_checktype_statements(table, checktype))
    pea = api.procedure(PROC_PEA)
    if pea:
        checks.extend(_pea_statements(table, pea))
    frozen = api.procedure(PROC_FROZEN)

    sets = _normalization_sets(table)
    after: list[str] = []
    if sets:
        after.append(f"UPDATE {SESSION_TABLE} SET internal = internal + 1;")
        after.append(
            f"UPDATE {table.name} SET {', '.join(sets)} WHERE rowid = NEW.rowid;"
        )
        after.append(f"UPDATE {SESSION_TABLE} SET internal = internal - 1;")

    out: list[str] = []
    if checks:
        out.append(
            _trigger(
                naming.trigger_name(table.abbrev, "BIR"),
                f"BEFORE INSERT ON {table.name} FOR EACH ROW",
                checks,
            )
        )
    if after or table.journaled:
        statements = list(after)
        if table.journaled:
            statements.append(_journal_insert(table, "INS"))
        out.append(
            _trigger(
                naming.trigger_name(table.abbrev, "AIR"),
                f"AFTER INSERT ON {table.name} FOR EACH ROW",
                statements,
            )
        )
    update_checks = list(checks)
    if frozen:
        update_checks.extend(_frozen_statements(table, frozen))
    if update_checks:
        out.append(
            _trigger(
                naming.trigger_name(table.abbrev, "BUR"),
                f"BEFORE UPDATE ON {table.name} FOR EACH ROW",
                update_checks,
            )
        )
    if after or table.journaled:
        statements = list(after)
        if table.journaled:
            statements.append(_journal_insert(table, "UPD"))
        out.append(
            _trigger(
                naming.trigger_name(table.abbrev, "AUR"),
                f"AFTER UPDATE ON {table.name} FOR EACH ROW",
                statements,
                when=f"{INTERNAL_EXPR} = 0",
            )
        )
    if table.journaled:
        out.append(
            _trigger(
                naming.trigger_name(table.abbrev, "BDR"),
                f"BEFORE DELETE ON {table.name} FOR EACH ROW",
                [_journal_insert(table, "DEL")],
            )
        )
    return out


def drop_trigger_statements(abbrev: str) -> list[str]:
    return [
        f"DROP TRIGGER IF EXISTS {naming.trigger_name(abbrev, suffix)};"
        for suffix in TRIGGER_SUFFIXES
    ]


def session_setup_sql() -> str:
    return (
        f"CREATE TABLE IF NOT EXISTS {SESSION_TABLE} (\n"
        "  jn_user TEXT,\n"
        "  internal INTEGER NOT NULL DEFAULT 0\n"
        ");\n\n"
        f"INSERT INTO {SESSION_TABLE} (jn_user, internal)\n"
        f"SELECT NULL, 0 WHERE NOT EXISTS (SELECT 1 FROM {SESSION_TABLE});"
    )


def topo_tables(tables: tuple[Table, ...]) -> list[Table]:
    """Referenced tables first; cycles fall back to declaration order."""
    remaining = list(tables)
    placed: list[Table] = []
    placed_names: set[str] = set()
    while remaining:
        progressed = False
        for t in list(remaining):
            deps = {fk.referenced_table for fk in t.foreign_keys} - {t.name}
            if all(d in placed_names or not any(r.name == d for r in remaining) for d in deps):
                placed.append(t)
                placed_names.add(t.name)
                remaining.remove(t)
                progressed = True
        if not progressed:
            placed.extend(remaining)
            break
    return placed


def emit_ddl(physical: PhysicalModel) -> "ScriptBundle":
    from . import (
        DDL_SCRIPT_NAMES,
        DIALECT_EMBEDDED,
        Script,
        ScriptBundle,
        model_hash,
        script_header,
    )

    source_hash = model_hash(physical)
    tables = topo_tables(physical.logical.tables)

    parts = ["PRAGMA foreign_keys = ON;"] if tables else []
    for t in tables:
        parts.append(render_create_table(t))
        parts.extend(render_unique_indexes(t))
    tables_sql = "\n\n".join(parts)

    journal_sql = "\n\n".join(render_create_table(jt) for jt in physical.journal_tables)

    needs_session = bool(physical.table_apis) or bool(physical.journal_tables)
    tapis_sql = session_setup_sql() if needs_session else ""

    trigger_parts: list[str] = []
    for t in physical.logical.tables:
        api = physical.api_for(t.name)
        if api is None:
            continue
        trigger_parts.append("\n".join(drop_trigger_statements(t.abbrev)))
        trigger_parts.extend(render_table_triggers(t, api))
    triggers_sql = "\n\n".join(trigger_parts)

    def script(name: str, body: str) -> Script:
        text = script_header(name, DIALECT_EMBEDDED, source_hash)
        if body:
            text += "\n" + body + "\n"
        return Script(name, text)

    return ScriptBundle(
        (
            script(DDL_SCRIPT_NAMES[0], tables_sql),
            script(DDL_SCRIPT_NAMES[1], journal_sql),
            script(DDL_SCRIPT_NAMES[2], tapis_sql),
            script(DDL_SCRIPT_NAMES[3], triggers_sql),
        )
    )

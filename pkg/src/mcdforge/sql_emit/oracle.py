"""Oracle dialect: VARCHAR2 columns, sequences for surrogates, one PL/SQL
package per table API. Triggers copy :NEW/:OLD into %ROWTYPE records, run the
procedure chain, then write the record back, so procedures can normalize
values. Every chained procedure exists in the package; feature-less ones are
empty stubs so the fixed call order always compiles."""

from __future__ import annotations

from .. import naming
from ..model_ir import (
    EVENT_DELETE,
    EVENT_INSERT,
    EVENT_UPDATE,
    ORIGIN_SURROGATE,
    PROC_AUTOGEN,
    PROC_AUTOGEN_UPD,
    PROC_CHECKTYPE,
    PROC_FROZEN,
    PROC_JOURNALIZE,
    PROC_PEA,
    PROC_UPPERCASE,
    MSGTEXT_PEA_MANDATORY,
    Column,
    NeutralType,
    PhysicalModel,
    ProcedureSpec,
    Table,
    TableApi,
)

EVENT_CODES = {EVENT_INSERT: ("INS", "INSERT"), EVENT_UPDATE: ("UPD", "UPDATE"), EVENT_DELETE: ("DEL", "DELETE")}


def render_type(t: NeutralType) -> str:
    if t.kind == "TEXT":
        return f"VARCHAR2({t.length})"
    if t.kind == "INTEGER":
        return "NUMBER(10)"
    if t.kind == "NUMERIC":
        return f"NUMBER({t.precision},{t.scale})"
    if t.kind == "DATE":
        return "DATE"
    if t.kind == "TIMESTAMP":
        return "DATE"  # Oracle DATE carries time of day
    if t.kind == "BOOLEAN":
        return "NUMBER(1)"
    if t.kind == "INTERVAL":
        return "INTERVAL DAY TO SECOND"
    raise ValueError(f"unknown neutral type {t.kind}")


def _sql_literal(text: str) -> str:
    return "'" + text.replace("'", "''") + "'"


def error_message(table: str, column: str, key: str, text: str) -> str:
    return f"Table: {table} , Colonne: {column} , {key} , {text}"


def has_surrogate(table: Table) -> bool:
    return any(c.origin_kind == ORIGIN_SURROGATE for c in table.columns)


def render_create_table(table: Table) -> str:
    lines = [f"CREATE TABLE {table.name} ("]
    defs = []
    for c in table.columns:
        d = f"  {c.name} {render_type(c.sql_type)}"
        if not c.nullable:
            d += " NOT NULL"
        defs.append(d)
    if table.primary_key:
        defs.append(
            f"  CONSTRAINT {naming.pk_constraint_name(table.name)}"
            f" PRIMARY KEY ({', '.join(table.primary_key)})"
        )
    for u in table.uniques:
        defs.append(f"  CONSTRAINT {u.name} UNIQUE ({', '.join(u.columns)})")
    lines.append(",\n".join(defs))
    lines.append(");")
    return "\n".join(lines)


def render_add_foreign_key(table: Table) -> list[str]:
    out = []
    for fk in table.foreign_keys:
        stmt = (
            f"ALTER TABLE {table.name} ADD CONSTRAINT {fk.name}"
            f" FOREIGN KEY ({', '.join(fk.columns)})"
            f" REFERENCES {fk.referenced_table} ({', '.join(fk.referenced_columns)})"
        )
        if fk.identifying:
            stmt += " ON DELETE CASCADE"
        out.append(stmt + ";")
    return out


def render_frozen_guard(proc: ProcedureSpec, table_name: str) -> str:
    """Compare-and-raise blocks, one per frozen column. The PL/SQL inequality
    is null-tolerant: a comparison involving NULL never raises, which makes a
    first write onto a previously empty value legal."""
    blocks = []
    for col in proc.target_columns:
        message = error_message(table_name, col, proc.message_key or "", proc.message_text or "")
        blocks.append(
            f"IF pio_newrec.{col} <> pio_oldrec.{col} THEN\n"
            f"  raise_application_error({proc.error_code}, {_sql_literal(message)});\n"
            f"END IF;"
        )
    return "\n".join(blocks)


def _indent(text: str, prefix: str) -> str:
    return "\n".join(prefix + line if line else line for line in text.splitlines())


def _checktype_body(proc: ProcedureSpec, table: Table) -> str:
    blocks = []
    for col_name in proc.target_columns:
        col = table.column(col_name)
        base = col.logical_type.base
        message = error_message(
            table.name, col_name, proc.message_key or "", f"{proc.message_text} ({base})"
        )
        v = f"pio_newrec.{col_name}"
        if base == "word":
            cond = (
                f"instr({v}, ' ') > 0 OR instr({v}, chr(9)) > 0"
                f" OR instr({v}, chr(10)) > 0 OR instr({v}, chr(13)) > 0"
            )
        else:  # token
            cond = (
                f"{v} <> trim({v}) OR instr({v}, chr(9)) > 0"
                f" OR instr({v}, chr(10)) > 0 OR instr({v}, chr(13)) > 0"
                f" OR instr({v}, '  ') > 0"
            )
        blocks.append(
            f"IF {v} IS NOT NULL AND ({cond}) THEN\n"
            f"  raise_application_error({proc.error_code}, {_sql_literal(message)});\n"
            f"END IF;"
        )
    return "\n".join(blocks)


def _pea_body(proc: ProcedureSpec, table: Table) -> str:
    from ..tapis_gen import pea_groups

    blocks = []
    groups = pea_groups(table)
    for fk_name, cols in groups.items():
        fk = next(f for f in table.foreign_keys if f.name == fk_name)
        all_null = " AND ".join(f"pio_newrec.{c} IS NULL" for c in fk.columns)
        all_set = " AND ".join(f"pio_newrec.{c} IS NOT NULL" for c in fk.columns)
        inner = []
        for col in cols:
            message = error_message(
                table.name, col.name, proc.message_key or "", proc.message_text or ""
            )
            inner.append(
                f"  IF pio_newrec.{col.name} IS NOT NULL THEN\n"
                f"    raise_application_error({proc.error_code}, {_sql_literal(message)});\n"
                f"  END IF;"
            )
        blocks.append(f"IF {all_null} THEN\n" + "\n".join(inner) + "\nEND IF;")
        mandatory = [c for c in cols if c.name in proc.mandatory_columns]
        if mandatory:
            inner = []
            for col in mandatory:
                message = error_message(
                    table.name, col.name, proc.message_key or "", MSGTEXT_PEA_MANDATORY
                )
                inner.append(
                    f"  IF pio_newrec.{col.name} IS NULL THEN\n"
                    f"    raise_application_error({proc.error_code}, {_sql_literal(message)});\n"
                    f"  END IF;"
                )
            blocks.append(f"IF {all_set} THEN\n" + "\n".join(inner) + "\nEND IF;")
    return "\n".join(blocks)


def _autogen_body(proc: ProcedureSpec, table: Table) -> str:
    blocks = []
    for col_name in proc.target_columns:
        col = table.column(col_name)
        if col.origin_kind == ORIGIN_SURROGATE:
            value = f"{naming.sequence_name(table.name)}.NEXTVAL"
        else:
            value = "SYSDATE"
        blocks.append(
            f"IF pio_newrec.{col_name} IS NULL THEN\n"
            f"  pio_newrec.{col_name} := {value};\n"
            f"END IF;"
        )
    return "\n".join(blocks)


def _uppercase_body(proc: ProcedureSpec) -> str:
    return "\n".join(
        f"pio_newrec.{col} := UPPER(pio_newrec.{col});" for col in proc.target_columns
    )


def _journalize_body(table: Table) -> str:
    journal = naming.journal_table_name(table.name)
    cols = [c.name for c in table.columns]
    target = ", ".join(["JN_OPERATION", "JN_USER", "JN_DATETIME"] + cols)
    values = ", ".join(
        ["p_operation", "USER", "SYSDATE"] + [f"pio_rec.{c}" for c in cols]
    )
    return f"INSERT INTO {journal} ({target})\nVALUES ({values});"


def render_package(table: Table, api: TableApi) -> str:
    """Package spec and body. The row-record signature mirrors the published
    procedure shapes; journalize_row takes the operation code plus one record
    (new values for INS/UPD, key-only old values for DEL)."""
    pkg = naming.package_name(table.abbrev)
    rec = f"{table.name}%ROWTYPE"
    spec_lines = [f"CREATE OR REPLACE PACKAGE {pkg} AS"]
    for kind in (PROC_AUTOGEN, PROC_AUTOGEN_UPD, PROC_CHECKTYPE, PROC_UPPERCASE, PROC_PEA):
        spec_lines.append(f"  PROCEDURE {kind}(pio_newrec IN OUT {rec});")
    spec_lines.append(
        f"  PROCEDURE {PROC_FROZEN}(pio_newrec IN OUT {rec}, pio_oldrec IN OUT {rec});"
    )
    if table.journaled:
        spec_lines.append(
            f"  PROCEDURE {PROC_JOURNALIZE}(p_operation IN VARCHAR2, pio_rec IN OUT {rec});"
        )
    spec_lines.append(f"END {pkg};")
    spec_lines.append("/")

    def procedure(kind: str, params: str, body: str) -> str:
        text = f"  PROCEDURE {kind}({params}) IS\n  BEGIN\n"
        if body:
            text += _indent(body, "    ") + "\n"
        else:
            text += "    NULL;\n"
        text += "  END;"
        return text

    bodies = {p.kind: p for p in api.procedures}
    body_lines = [f"CREATE OR REPLACE PACKAGE BODY {pkg} AS"]
    one_rec = f"pio_newrec IN OUT {rec}"
    body_lines.append(
        procedure(
            PROC_AUTOGEN,
            one_rec,
            _autogen_body(bodies[PROC_AUTOGEN], table) if PROC_AUTOGEN in bodies else "",
        )
    )
    # reserved empty hook for future update-time defaults
    body_lines.append(procedure(PROC_AUTOGEN_UPD, one_rec, ""))
    body_lines.append(
        procedure(
            PROC_CHECKTYPE,
            one_rec,
            _checktype_body(bodies[PROC_CHECKTYPE], table) if PROC_CHECKTYPE in bodies else "",
        )
    )
    body_lines.append(
        procedure(
            PROC_UPPERCASE,
            one_rec,
            _uppercase_body(bodies[PROC_UPPERCASE]) if PROC_UPPERCASE in bodies else "",
        )
    )
    body_lines.append(
        procedure(
            PROC_PEA,
            one_rec,
            _pea_body(bodies[PROC_PEA], table) if PROC_PEA in bodies else "",
        )
    )
    body_lines.append(
        procedure(
            PROC_FROZEN,
            f"pio_newrec IN OUT {rec}, pio_oldrec IN OUT {rec}",
            render_frozen_guard(bodies[PROC_FROZEN], table.name) if PROC_FROZEN in bodies else "",
        )
    )
    if table.journaled:
        body_lines.append(
            procedure(
                PROC_JOURNALIZE,
                f"p_operation IN VARCHAR2, pio_rec IN OUT {rec}",
                _journalize_body(table),
            )
        )
    body_lines.append(f"END {pkg};")
    body_lines.append("/")
    return "\n".join(spec_lines) + "\n\n" + "\n".join(body_lines)


def _render_call(pkg: str, call: str, event: str) -> str:
    if call == PROC_FROZEN:
        return f"  {pkg}.{call}(vl_newrec, vl_oldrec);"
    if call == PROC_JOURNALIZE:
        code = EVENT_CODES[event][0]
        rec = "vl_oldrec" if event == EVENT_DELETE else "vl_newrec"
        return f"  {pkg}.{call}('{code}', {rec});"
    return f"  {pkg}.{call}(vl_newrec);"


def render_trigger(table: Table, api: TableApi, event: str) -> str:
    pkg = naming.package_name(table.abbrev)
    trig = next(t for t in api.triggers if t.event == event)
    sql_event = EVENT_CODES[event][1]
    lines = [
        f"CREATE OR REPLACE TRIGGER {trig.name}",
        f"BEFORE {sql_event} ON {table.name} FOR EACH ROW",
        "DECLARE",
    ]
    uses_new = event in (EVENT_INSERT, EVENT_UPDATE)
    uses_old = event in (EVENT_UPDATE, EVENT_DELETE)
    if uses_new:
        lines.append(f"  vl_newrec {table.name}%ROWTYPE;")
    if uses_old:
        lines.append(f"  vl_oldrec {table.name}%ROWTYPE;")
    lines.append("BEGIN")
    if uses_new:
        for c in table.columns:
            lines.append(f"  vl_newrec.{c.name} := :NEW.{c.name};")
    if event == EVENT_UPDATE:
        for c in table.columns:
            lines.append(f"  vl_oldrec.{c.name} := :OLD.{c.name};")
    if event == EVENT_DELETE:
        # delete journaling keeps only the key values
        for name in table.primary_key:
            lines.append(f"  vl_oldrec.{name} := :OLD.{name};")
    for call in trig.procedure_calls:
        lines.append(_render_call(pkg, call, event))
    if uses_new:
        for c in table.columns:
            lines.append(f"  :NEW.{c.name} := vl_newrec.{c.name};")
    lines.append("END;")
    lines.append("/")
    return "\n".join(lines)


def render_table_api(table: Table, api: TableApi) -> tuple[str, str]:
    """(package text, triggers text) for one table."""
    triggers = [render_trigger(table, api, t.event) for t in api.triggers]
    return render_package(table, api), "\n\n".join(triggers)


def emit_ddl(physical: PhysicalModel) -> "ScriptBundle":
    from . import (
        DDL_SCRIPT_NAMES,
        DIALECT_ORACLE,
        Script,
        ScriptBundle,
        model_hash,
        script_header,
    )

    source_hash = model_hash(physical)
    tables = physical.logical.tables

    parts = [render_create_table(t) for t in tables]
    parts += [
        f"CREATE SEQUENCE {naming.sequence_name(t.name)};" for t in tables if has_surrogate(t)
    ]
    for t in tables:
        parts.extend(render_add_foreign_key(t))
    tables_sql = "\n\n".join(parts)

    journal_sql = "\n\n".join(render_create_table(jt) for jt in physical.journal_tables)

    packages = []
    triggers = []
    for t in tables:
        api = physical.api_for(t.name)
        if api is None:
            continue
        pkg, trg = render_table_api(t, api)
        packages.append(pkg)
        triggers.append(trg)

    def script(name: str, body: str) -> Script:
        text = script_header(name, DIALECT_ORACLE, source_hash)
        if body:
            text += "\n" + body + "\n"
        return Script(name, text)

    return ScriptBundle(
        (
            script(DDL_SCRIPT_NAMES[0], tables_sql),
            script(DDL_SCRIPT_NAMES[1], journal_sql),
            script(DDL_SCRIPT_NAMES[2], "\n\n".join(packages)),
            script(DDL_SCRIPT_NAMES[3], "\n\n".join(triggers)),
        )
    )

"""Physical-model construction: per-table API units and journaling structures.

A table API couples triggers with integrity procedures the DDL cannot
express: frozen columns, word/token refinements, uppercase normalization,
pseudo-associative-entity coupling, insert-time defaults and journaling.
Triggers always call the full published procedure chain; procedures are
materialized only for the features a table actually has, and dialect emitters
render no-op stubs for the rest (autogen_column_upd stays a reserved empty
hook for update-timestamp features).

For each journaled table T a shadow table JN_T records one row per operation:
JN_OPERATION (INS/UPD/DEL), JN_USER, JN_DATETIME, then every column of T, all
nullable. Insert and update rows carry the new values; delete rows carry only
the primary-key values.
"""

from __future__ import annotations

from . import naming
from .model_ir import (
    ERRCODE_CHECKTYPE,
    ERRCODE_FROZEN,
    ERRCODE_PEA,
    EVENT_DELETE,
    EVENT_INSERT,
    EVENT_UPDATE,
    MSGKEY_CHECKTYPE,
    MSGKEY_FROZEN,
    MSGKEY_PEA,
    MSGTEXT_CHECKTYPE,
    MSGTEXT_FROZEN,
    MSGTEXT_PEA,
    ORIGIN_OWN,
    ORIGIN_PEA,
    ORIGIN_SURROGATE,
    PROC_AUTOGEN,
    PROC_CHECKTYPE,
    PROC_FROZEN,
    PROC_JOURNALIZE,
    PROC_PEA,
    PROC_UPPERCASE,
    Column,
    ConceptualModel,
    LogicalModel,
    NeutralType,
    PhysicalModel,
    ProcedureSpec,
    Table,
    TableApi,
    TriggerSpec,
    W3CType,
    expected_calls,
)

JN_OPERATION = "JN_OPERATION"
JN_USER = "JN_USER"
JN_DATETIME = "JN_DATETIME"


class TraceMismatchError(Exception):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"logical element {path} has no conceptual provenance")


def checktype_targets(table: Table) -> tuple[Column, ...]:
    """Columns whose word/token refinement needs a generated check. Key
    columns copied from a parent are excluded: the foreign key already pins
    their values to checked parent rows."""
    return tuple(
        c
        for c in table.columns
        if c.origin_kind in (ORIGIN_OWN, ORIGIN_PEA)
        and c.logical_type.base in ("word", "token")
    )


def autogen_targets(table: Table) -> tuple[Column, ...]:
    return tuple(
        c for c in table.columns if c.init_expr or c.origin_kind == ORIGIN_SURROGATE
    )


def pea_groups(table: Table) -> dict[str, tuple[Column, ...]]:
    """PEA columns per foreign-key group, in column order."""
    groups: dict[str, list[Column]] = {}
    for c in table.columns:
        if c.origin_kind == ORIGIN_PEA and c.pea_fk_group:
            groups.setdefault(c.pea_fk_group, []).append(c)
    return {k: tuple(v) for k, v in groups.items()}


def _pea_mandatory_columns(
    table: Table, conceptual: ConceptualModel, reverse_trace: dict[str, str]
) -> tuple[str, ...]:
    """PEA columns whose source attribute is marked mandatory; these must be
    filled whenever their association link exists."""
    mandatory: list[str] = []
    for c in table.columns:
        if c.origin_kind != ORIGIN_PEA:
            continue
        source = reverse_trace.get(f"table:{table.name}/column:{c.name}")
        if source is None or "/attribute:" not in source:
            raise TraceMismatchError(f"table:{table.name}/column:{c.name}")
        assoc_name = source.split("/", 1)[0].split(":", 1)[1]
        attr_name = source.rsplit(":", 1)[1]
        assoc = conceptual.association(assoc_name)
        for attr in assoc.pea_attributes:
            if attr.name == attr_name and attr.mandatory:
                mandatory.append(c.name)
    return tuple(mandatory)


def build_table_api(
    table: Table, conceptual: ConceptualModel, reverse_trace: dict[str, str]
) -> TableApi | None:
    """The table's API unit, or None when nothing needs generating."""
    frozen_cols = tuple(c for c in table.columns if c.frozen)
    check_cols = checktype_targets(table)
    upper_cols = tuple(c for c in table.columns if c.uppercase)
    groups = pea_groups(table)
    auto_cols = autogen_targets(table)
    if not (frozen_cols or check_cols or upper_cols or groups or auto_cols or table.journaled):
        return None

    procedures: list[ProcedureSpec] = []
    if auto_cols:
        procedures.append(
            ProcedureSpec(PROC_AUTOGEN, tuple(c.name for c in auto_cols))
        )
    if check_cols:
        procedures.append(
            ProcedureSpec(
                PROC_CHECKTYPE,
                tuple(c.name for c in check_cols),
                ERRCODE_CHECKTYPE,
                MSGKEY_CHECKTYPE,
                MSGTEXT_CHECKTYPE,
            )
        )
    if upper_cols:
        procedures.append(
            ProcedureSpec(PROC_UPPERCASE, tuple(c.name for c in upper_cols))
        )
    if groups:
        procedures.append(
            ProcedureSpec(
                PROC_PEA,
                tuple(c.name for cols in groups.values() for c in cols),
                ERRCODE_PEA,
                MSGKEY_PEA,
                MSGTEXT_PEA,
                mandatory_columns=_pea_mandatory_columns(table, conceptual, reverse_trace),
            )
        )
    if frozen_cols:
        procedures.append(
            ProcedureSpec(
                PROC_FROZEN,
                tuple(c.name for c in frozen_cols),
                ERRCODE_FROZEN,
                MSGKEY_FROZEN,
                MSGTEXT_FROZEN,
            )
        )
    if table.journaled:
        procedures.append(ProcedureSpec(PROC_JOURNALIZE, ()))

    triggers = [
        TriggerSpec(
            name=naming.trigger_name(table.abbrev, "BIR"),
            event=EVENT_INSERT,
            timing="Before",
            procedure_calls=expected_calls(EVENT_INSERT, table.journaled),
        ),
        TriggerSpec(
            name=naming.trigger_name(table.abbrev, "BUR"),
            event=EVENT_UPDATE,
            timing="Before",
            procedure_calls=expected_calls(EVENT_UPDATE, table.journaled),
        ),
    ]
    if table.journaled:
        triggers.append(
            TriggerSpec(
                name=naming.trigger_name(table.abbrev, "BDR"),
                event=EVENT_DELETE,
                timing="Before",
                procedure_calls=expected_calls(EVENT_DELETE, True),
            )
        )
    return TableApi(
        table_name=table.name, triggers=tuple(triggers), procedures=tuple(procedures)
    )


def build_journal_table(table: Table) -> Table:
    header = (
        Column(JN_OPERATION, W3CType("string", length=3), NeutralType("TEXT", length=3), False, ORIGIN_OWN),
        Column(JN_USER, W3CType("string", length=30), NeutralType("TEXT", length=30), False, ORIGIN_OWN),
        Column(JN_DATETIME, W3CType("dateTime"), NeutralType("TIMESTAMP"), False, ORIGIN_OWN),
    )
    copies = tuple(
        Column(
            name=c.name,
            logical_type=c.logical_type,
            sql_type=c.sql_type,
            nullable=True,
            origin_kind=ORIGIN_OWN,
        )
        for c in table.columns
    )
    return Table(
        name=naming.journal_table_name(table.name),
        abbrev=table.abbrev,
        columns=header + copies,
        primary_key=(),
        journaled=False,
    )


def build_physical(logical: LogicalModel, conceptual: ConceptualModel) -> PhysicalModel:
    """Assemble the physical model from the logical model and the conceptual
    model it was transformed from (trace links must be intact)."""
    reverse_trace = {v: k for k, v in logical.trace_links.items()}
    apis: list[TableApi] = []
    journals: list[Table] = []
    for table in logical.tables:
        if f"table:{table.name}" not in reverse_trace:
            raise TraceMismatchError(f"table:{table.name}")
        api = build_table_api(table, conceptual, reverse_trace)
        if api is not None:
            apis.append(api)
        if table.journaled:
            journals.append(build_journal_table(table))
    return PhysicalModel(
        logical=logical, table_apis=tuple(apis), journal_tables=tuple(journals)
    )


# ---------------------------------------------------------------------------
# Canonical serialization (.mpd)


def serialize_physical(model: PhysicalModel) -> str:
    from .transform_mld import serialize_logical

    lines = [serialize_logical(model.logical).rstrip("\n")]
    for api in model.table_apis:
        lines.append(f"tapi {api.table_name} {{")
        for trig in api.triggers:
            lines.append(
                f"  trigger {trig.name} {trig.timing} {trig.event}"
                f" calls ({', '.join(trig.procedure_calls)})"
            )
        for proc in api.procedures:
            parts = [f"  procedure {proc.kind} targets ({', '.join(proc.target_columns)})"]
            if proc.mandatory_columns:
                parts.append(f"mandatory ({', '.join(proc.mandatory_columns)})")
            if proc.error_code is not None:
                parts.append(f"code {proc.error_code}")
            if proc.message_key:
                parts.append(f"key {proc.message_key}")
            if proc.message_text:
                parts.append(f'text "{proc.message_text}"')
            lines.append(" ".join(parts))
        lines.append("}")
    for jt in model.journal_tables:
        lines.append(f"journal {jt.name} {{")
        for c in jt.columns:
            nullness = "NULL" if c.nullable else "NOT NULL"
            lines.append(f"  column {c.name} {c.sql_type.render()} {nullness}")
        lines.append("}")
    return "\n".join(lines) + "\n"

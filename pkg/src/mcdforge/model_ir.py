"""Model intermediate representation for the three abstraction levels.

Conceptual level: entities, attributes, associations (optionally carrying
pseudo-associative-entity payload attributes). Logical level: tables, columns
and constraints, dialect-neutral. Physical level: the logical model plus
generated table-API units and journaling tables.

All values are immutable after construction and compare structurally, which is
what the migration differ relies on. Invariants are not enforced in
constructors; each level has a ``verify_*`` routine returning diagnostics, so
that invalid values can exist transiently (the conformance checker and the
tests need to build them on purpose).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import naming

ERROR = "error"
WARNING = "warning"

MANY = "*"

W3C_BASES = (
    "string",
    "token",
    "word",
    "integer",
    "decimal",
    "boolean",
    "date",
    "dateTime",
    "duration",
)
STRING_FAMILY = ("string", "token", "word")

ORIGIN_OWN = "OwnAttribute"
ORIGIN_PEA = "PeaAttribute"
ORIGIN_FK = "ForeignKey"
ORIGIN_SURROGATE = "Surrogate"

INIT_NOW = "now()"


@dataclass(frozen=True)
class SourceSpan:
    """1-based source location; start <= end."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Diagnostic:
    rule_id: str
    severity: str
    path: str
    message: str
    span: SourceSpan | None = None

    def render(self) -> str:
        return f"{self.rule_id} {self.severity} {self.path}: {self.message}"


# ---------------------------------------------------------------------------
# Conceptual level


@dataclass(frozen=True)
class W3CType:
    """W3C-style attribute type. ``length`` only for the string family,
    ``precision``/``scale`` only for decimal. The refinement semantics of
    token/word are not representable in DDL and are enforced by generated
    table-API code."""

    base: str
    length: int | None = None
    precision: int | None = None
    scale: int | None = None

    def render(self) -> str:
        if self.base in STRING_FAMILY and self.length is not None:
            return f"{self.base}({self.length})"
        if self.base == "decimal" and self.precision is not None:
            if self.scale is not None:
                return f"decimal({self.precision},{self.scale})"
            return f"decimal({self.precision})"
        return self.base


@dataclass(frozen=True)
class Attribute:
    name: str
    data_type: W3CType
    mandatory: bool = False
    uid_index: int | None = None
    uppercase: bool = False
    init_expr: str | None = None
    frozen: bool = False


@dataclass(frozen=True)
class Entity:
    """``abbrev`` prefixes generated code objects; the DSL parser fills the
    default (first three characters, capitalized) when it is omitted."""

    name: str
    attributes: tuple[Attribute, ...]
    abbrev: str = ""
    table_name_override: str | None = None
    journaled: bool = False

    @property
    def table_name(self) -> str:
        return self.table_name_override or naming.default_table_name(self.name)


@dataclass(frozen=True)
class AssociationEnd:
    entity_name: str
    role: str
    min_card: int
    max_card: str  # "1" or MANY

    def render_card(self) -> str:
        return f"{self.min_card}..{self.max_card}"


@dataclass(frozen=True)
class Association:
    """Binary 1:n association. ``identifying`` marks the PK composition kind;
    ``pea_attributes`` is the pseudo-associative-entity payload carried by the
    association and later dissolved into child-table columns."""

    name: str
    parent: AssociationEnd
    child: AssociationEnd
    identifying: bool = False
    pea_attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class ConceptualModel:
    name: str
    entities: tuple[Entity, ...] = ()
    associations: tuple[Association, ...] = ()
    journaled: bool = False

    def entity(self, name: str) -> Entity:
        for e in self.entities:
            if e.name == name:
                return e
        raise KeyError(name)

    def association(self, name: str) -> Association:
        for a in self.associations:
            if a.name == name:
                return a
        raise KeyError(name)

    def has_entity(self, name: str) -> bool:
        return any(e.name == name for e in self.entities)

    def is_journaled(self, entity: Entity) -> bool:
        return self.journaled or entity.journaled

    def identifying_parents(self, entity_name: str) -> tuple[Association, ...]:
        """Identifying associations whose child is the given entity, in model
        declaration order."""
        return tuple(
            a
            for a in self.associations
            if a.identifying and a.child.entity_name == entity_name
        )


# ---------------------------------------------------------------------------
# Identifier closure


@dataclass(frozen=True)
class LocalAttribute:
    name: str


@dataclass(frozen=True)
class PropagatedKey:
    association: str
    parts: tuple["IdentifierPart", ...]


IdentifierPart = LocalAttribute | PropagatedKey


class CyclicIdentificationError(Exception):
    """The identifying-association graph loops back onto the starting entity."""

    def __init__(self, entity: str, cycle: tuple[str, ...]):
        self.entity = entity
        self.cycle = cycle
        super().__init__(
            f"identifying associations form a cycle at entity {entity}: "
            + " -> ".join(cycle)
        )


class NoIdentifierError(Exception):
    """An entity has neither UID-1 attributes nor an identifying parent."""

    def __init__(self, entity: str):
        self.entity = entity
        super().__init__(f"entity {entity} has no natural identifier")


def identifier_closure(
    model: ConceptualModel, entity_name: str
) -> tuple[IdentifierPart, ...]:
    """Parts composing an entity's natural identifier, in deterministic order:
    identifying parents in association declaration order first, each expanded
    recursively, then local UID-1 attributes in declaration order."""

    def expand(name: str, trail: tuple[str, ...]) -> tuple[IdentifierPart, ...]:
        if name in trail:
            raise CyclicIdentificationError(entity_name, trail + (name,))
        entity = model.entity(name)
        parts: list[IdentifierPart] = []
        for assoc in model.identifying_parents(name):
            parent_parts = expand(assoc.parent.entity_name, trail + (name,))
            parts.append(PropagatedKey(assoc.name, parent_parts))
        for attr in entity.attributes:
            if attr.uid_index == 1:
                parts.append(LocalAttribute(attr.name))
        return tuple(parts)

    parts = expand(entity_name, ())
    if not parts:
        raise NoIdentifierError(entity_name)
    return parts


def identifier_column_names(model: ConceptualModel, entity_name: str) -> tuple[str, ...]:
    """Flatten the identifier closure into derived primary-key column names,
    in closure order. Propagated parts compound: a grandparent key reaches the
    grandchild with both prefixes applied."""
    out: list[str] = []
    for part in identifier_closure(model, entity_name):
        if isinstance(part, LocalAttribute):
            out.append(part.name)
        else:
            assoc = model.association(part.association)
            parent = model.entity(assoc.parent.entity_name)
            for pk_col in identifier_column_names(model, parent.name):
                out.append(naming.fk_column_name(parent.abbrev, assoc.parent.role, pk_col))
    return tuple(out)


# ---------------------------------------------------------------------------
# Logical level


@dataclass(frozen=True)
class NeutralType:
    """Dialect-neutral SQL type category."""

    kind: str  # TEXT | INTEGER | NUMERIC | DATE | TIMESTAMP | BOOLEAN | INTERVAL
    length: int | None = None
    precision: int | None = None
    scale: int | None = None

    def render(self) -> str:
        if self.kind == "TEXT":
            return f"TEXT({self.length})"
        if self.kind == "NUMERIC":
            return f"NUMERIC({self.precision},{self.scale})"
        return self.kind


@dataclass(frozen=True)
class Column:
    name: str
    logical_type: W3CType
    sql_type: NeutralType
    nullable: bool
    origin_kind: str
    frozen: bool = False
    uppercase: bool = False
    init_expr: str | None = None
    pea_fk_group: str | None = None


@dataclass(frozen=True)
class ForeignKey:
    name: str
    columns: tuple[str, ...]
    referenced_table: str
    referenced_columns: tuple[str, ...]
    identifying: bool
    nullable: bool


@dataclass(frozen=True)
class UniqueConstraint:
    name: str
    columns: tuple[str, ...]


@dataclass(frozen=True)
class Table:
    name: str
    abbrev: str
    columns: tuple[Column, ...]
    primary_key: tuple[str, ...]
    foreign_keys: tuple[ForeignKey, ...] = ()
    uniques: tuple[UniqueConstraint, ...] = ()
    journaled: bool = False

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)


@dataclass(frozen=True)
class LogicalModel:
    name: str
    tables: tuple[Table, ...] = ()
    trace_links: dict[str, str] = field(default_factory=dict)

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)

    def has_table(self, name: str) -> bool:
        return any(t.name == name for t in self.tables)


# ---------------------------------------------------------------------------
# Physical level

EVENT_INSERT = "Insert"
EVENT_UPDATE = "Update"
EVENT_DELETE = "Delete"

PROC_AUTOGEN = "autogen_column"
PROC_AUTOGEN_UPD = "autogen_column_upd"
PROC_CHECKTYPE = "checktype_column"
PROC_UPPERCASE = "uppercase_column"
PROC_PEA = "column_PEA"
PROC_FROZEN = "frozen_column"
PROC_JOURNALIZE = "journalize_row"

PROCEDURE_KINDS = (
    PROC_AUTOGEN,
    PROC_AUTOGEN_UPD,
    PROC_CHECKTYPE,
    PROC_UPPERCASE,
    PROC_PEA,
    PROC_FROZEN,
    PROC_JOURNALIZE,
)

# Contiguous diagnostic block; the frozen code is the published one.
ERRCODE_FROZEN = -20001
ERRCODE_CHECKTYPE = -20002
ERRCODE_PEA = -20003

MSGKEY_FROZEN = "mpd.constraint.mess.err.column.frozen"
MSGKEY_CHECKTYPE = "mpd.constraint.mess.err.column.checktype"
MSGKEY_PEA = "mpd.constraint.mess.err.column.pea"

MSGTEXT_FROZEN = "La valeur de la colonne n'est pas modifiable"
MSGTEXT_CHECKTYPE = "La valeur de la colonne ne respecte pas les restrictions de son type"
MSGTEXT_PEA = (
    "La colonne de pseudo entite associative ne peut etre renseignee sans sa cle etrangere"
)
MSGTEXT_PEA_MANDATORY = (
    "La colonne de pseudo entite associative est obligatoire lorsque la cle etrangere est renseignee"
)


@dataclass(frozen=True)
class TriggerSpec:
    name: str
    event: str
    timing: str  # always "Before" at this level; dialects may split further
    procedure_calls: tuple[str, ...]


@dataclass(frozen=True)
class ProcedureSpec:
    kind: str
    target_columns: tuple[str, ...]
    error_code: int | None = None
    message_key: str | None = None
    message_text: str | None = None
    # column_PEA only: targets that are mandatory whenever their link exists
    mandatory_columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class TableApi:
    table_name: str
    triggers: tuple[TriggerSpec, ...]
    procedures: tuple[ProcedureSpec, ...]

    def procedure(self, kind: str) -> ProcedureSpec | None:
        for p in self.procedures:
            if p.kind == kind:
                return p
        return None


@dataclass(frozen=True)
class PhysicalModel:
    logical: LogicalModel
    table_apis: tuple[TableApi, ...] = ()
    journal_tables: tuple[Table, ...] = ()

    def api_for(self, table_name: str) -> TableApi | None:
        for api in self.table_apis:
            if api.table_name == table_name:
                return api
        return None

    def journal_for(self, table_name: str) -> Table | None:
        wanted = naming.journal_table_name(table_name)
        for t in self.journal_tables:
            if t.name == wanted:
                return t
        return None


# ---------------------------------------------------------------------------
# Migration plan

PRESERVED = "Preserved"
FORCED = "Forced"

CHANGE_KINDS = (
    "CreateTable",
    "DropTable",
    "AddColumn",
    "DropColumn",
    "AlterColumnType",
    "AlterNullability",
    "AddConstraint",
    "DropConstraint",
    "CreateTrigger",
    "ReplaceTrigger",
    "DropTrigger",
    "CreateJournalTable",
)


@dataclass(frozen=True)
class ChangeItem:
    """One migration step. ``before``/``after`` hold the element snapshots the
    emitters render from (tables, columns, constraints, table APIs);
    ``table_before``/``table_after`` give column- and constraint-level items
    their enclosing table so dialects without ALTER support can rebuild.
    ``detail`` is the human-readable delta for plan listings."""

    kind: str
    path: str
    classification: str
    detail: str = ""
    before: object | None = None
    after: object | None = None
    table_before: object | None = None
    table_after: object | None = None

    def render(self) -> str:
        line = f"{self.classification.upper()} {self.kind} {self.path}"
        if self.detail:
            line += f" {self.detail}"
        return line


@dataclass(frozen=True)
class MigrationPlan:
    items: tuple[ChangeItem, ...] = ()

    @property
    def forced_items(self) -> tuple[ChangeItem, ...]:
        return tuple(i for i in self.items if i.classification == FORCED)

    def render(self) -> str:
        return "\n".join(i.render() for i in self.items)


# ---------------------------------------------------------------------------
# Verification of type invariants
#
# V0xx: conceptual level, V1xx: logical level, V2xx: physical level. Each
# routine returns every violation found; an empty list means the value
# satisfies its published invariants.


def _is_identifier(s: str) -> bool:
    return bool(s) and (s[0].isalpha()) and all(c.isalnum() or c == "_" for c in s)


def _verify_type(t: W3CType, path: str, out: list[Diagnostic]) -> None:
    if t.base not in W3C_BASES:
        out.append(Diagnostic("V020", ERROR, path, f"unknown type base {t.base!r}"))
        return
    if t.length is not None and t.base not in STRING_FAMILY:
        out.append(
            Diagnostic("V021", ERROR, path, f"type {t.base} does not take a length")
        )
    if t.length is not None and t.length <= 0:
        out.append(Diagnostic("V022", ERROR, path, "length must be positive"))
    if (t.precision is not None or t.scale is not None) and t.base != "decimal":
        out.append(
            Diagnostic(
                "V023", ERROR, path, f"type {t.base} does not take precision/scale"
            )
        )
    if t.base == "decimal" and t.precision is not None:
        scale = t.scale if t.scale is not None else 0
        if not (t.precision >= scale >= 0):
            out.append(
                Diagnostic("V024", ERROR, path, "requires precision >= scale >= 0")
            )


def _verify_attribute(a: Attribute, path: str, out: list[Diagnostic]) -> None:
    _verify_type(a.data_type, path, out)
    if a.init_expr is not None and a.init_expr != INIT_NOW:
        out.append(
            Diagnostic("V030", ERROR, path, f"unsupported init expression {a.init_expr!r}")
        )
    if a.init_expr == INIT_NOW and a.data_type.base not in ("date", "dateTime"):
        out.append(
            Diagnostic(
                "V031",
                ERROR,
                path,
                "init=now() requires a date or dateTime attribute",
            )
        )
    if a.uid_index is not None and a.uid_index < 1:
        out.append(Diagnostic("V032", ERROR, path, "UID index must be positive"))


def verify_conceptual(model: ConceptualModel) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    mpath = f"model:{model.name}"
    seen_entities: set[str] = set()
    for e in model.entities:
        epath = f"entity:{e.name}"
        if e.name in seen_entities:
            out.append(Diagnostic("V001", ERROR, epath, "duplicate entity name"))
        seen_entities.add(e.name)
        if not e.abbrev or not e.abbrev.isalnum():
            out.append(
                Diagnostic("V005", ERROR, epath, f"abbrev {e.abbrev!r} must be non-empty and alphanumeric")
            )
        elif len(e.abbrev) > 4:
            out.append(
                Diagnostic("V005", ERROR, epath, f"abbrev {e.abbrev!r} longer than 4 characters")
            )
        seen_attrs: set[str] = set()
        for a in e.attributes:
            apath = f"{epath}/attribute:{a.name}"
            if a.name in seen_attrs:
                out.append(Diagnostic("V004", ERROR, apath, "duplicate attribute name"))
            seen_attrs.add(a.name)
            _verify_attribute(a, apath, out)
        indices = sorted(a.uid_index for a in e.attributes if a.uid_index is not None)
        if indices and set(indices) != set(range(1, max(indices) + 1)):
            out.append(
                Diagnostic(
                    "V006",
                    ERROR,
                    epath,
                    f"UID indices {sorted(set(indices))} must be contiguous from 1",
                )
            )
    seen_assocs: set[str] = set()
    for assoc in model.associations:
        apath = f"association:{assoc.name}"
        if assoc.name in seen_assocs:
            out.append(Diagnostic("V002", ERROR, apath, "duplicate association name"))
        seen_assocs.add(assoc.name)
        for end_name, end in (("parent", assoc.parent), ("child", assoc.child)):
            if end.entity_name not in seen_entities:
                out.append(
                    Diagnostic(
                        "V003",
                        ERROR,
                        f"{apath}/{end_name}",
                        f"references unknown entity {end.entity_name}",
                    )
                )
            if end.min_card not in (0, 1) or end.max_card not in ("1", MANY):
                out.append(
                    Diagnostic(
                        "V012",
                        ERROR,
                        f"{apath}/{end_name}",
                        f"cardinality {end.min_card}..{end.max_card} out of range",
                    )
                )
        if assoc.parent.max_card != "1":
            out.append(
                Diagnostic(
                    "V010",
                    ERROR,
                    f"{apath}/parent",
                    "parent end must have maximum cardinality 1 (degree 1:n)",
                )
            )
        seen_pea: set[str] = set()
        for a in assoc.pea_attributes:
            ppath = f"{apath}/attribute:{a.name}"
            if a.name in seen_pea:
                out.append(Diagnostic("V004", ERROR, ppath, "duplicate attribute name"))
            seen_pea.add(a.name)
            _verify_attribute(a, ppath, out)
    if not _is_identifier(model.name):
        out.append(Diagnostic("V000", ERROR, mpath, f"invalid model name {model.name!r}"))
    return out


def verify_logical(model: LogicalModel) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    seen_tables: set[str] = set()
    for t in model.tables:
        tpath = f"table:{t.name}"
        if t.name in seen_tables:
            out.append(Diagnostic("V101", ERROR, tpath, "duplicate table name"))
        seen_tables.add(t.name)
        seen_cols: set[str] = set()
        for c in t.columns:
            cpath = f"{tpath}/column:{c.name}"
            if c.name in seen_cols:
                out.append(Diagnostic("V102", ERROR, cpath, "duplicate column name"))
            seen_cols.add(c.name)
            if c.origin_kind == ORIGIN_PEA and (not c.nullable or not c.pea_fk_group):
                out.append(
                    Diagnostic(
                        "V103",
                        ERROR,
                        cpath,
                        "PEA columns must be nullable and belong to a foreign-key group",
                    )
                )
        if not t.primary_key:
            out.append(Diagnostic("V104", ERROR, tpath, "primary key must be non-empty"))
        for name in t.primary_key:
            if name not in seen_cols:
                out.append(
                    Diagnostic("V105", ERROR, tpath, f"primary-key column {name} missing")
                )
            elif t.column(name).nullable:
                out.append(
                    Diagnostic(
                        "V106", ERROR, tpath, f"primary-key column {name} must be non-nullable"
                    )
                )
        seen_uniques: set[str] = set()
        for u in t.uniques:
            upath = f"{tpath}/unique:{u.name}"
            if u.name in seen_uniques:
                out.append(Diagnostic("V107", ERROR, upath, "duplicate constraint name"))
            seen_uniques.add(u.name)
            for name in u.columns:
                if name not in seen_cols:
                    out.append(
                        Diagnostic("V108", ERROR, upath, f"unknown column {name}")
                    )
    for t in model.tables:
        tpath = f"table:{t.name}"
        for fk in t.foreign_keys:
            fpath = f"{tpath}/fk:{fk.name}"
            if fk.identifying:
                if not all(c in t.primary_key for c in fk.columns):
                    out.append(
                        Diagnostic(
                            "V109",
                            ERROR,
                            fpath,
                            "identifying foreign-key columns must be part of the primary key",
                        )
                    )
                if fk.nullable:
                    out.append(
                        Diagnostic(
                            "V110", ERROR, fpath, "identifying foreign keys must be non-nullable"
                        )
                    )
            if not model.has_table(fk.referenced_table):
                out.append(
                    Diagnostic(
                        "V111", ERROR, fpath, f"references unknown table {fk.referenced_table}"
                    )
                )
                continue
            ref = model.table(fk.referenced_table)
            if tuple(fk.referenced_columns) != tuple(ref.primary_key):
                out.append(
                    Diagnostic(
                        "V112",
                        ERROR,
                        fpath,
                        "referenced columns must be the referenced table's primary key",
                    )
                )
                continue
            for own, other in zip(fk.columns, fk.referenced_columns):
                if not t.has_column(own):
                    out.append(Diagnostic("V113", ERROR, fpath, f"unknown column {own}"))
                elif t.column(own).sql_type != ref.column(other).sql_type:
                    out.append(
                        Diagnostic(
                            "V114",
                            ERROR,
                            fpath,
                            f"column {own} type differs from {fk.referenced_table}.{other}",
                        )
                    )
    return out


_BUR_ORDER = (
    PROC_AUTOGEN_UPD,
    PROC_AUTOGEN,
    PROC_CHECKTYPE,
    PROC_UPPERCASE,
    PROC_PEA,
    PROC_FROZEN,
)
_BIR_ORDER = (PROC_AUTOGEN, PROC_CHECKTYPE, PROC_UPPERCASE, PROC_PEA)


def expected_calls(event: str, journaled: bool) -> tuple[str, ...]:
    """The fixed procedure-call chain per trigger event. The update chain is
    the full published order; insert omits frozen_column and
    autogen_column_upd; delete only journalizes."""
    if event == EVENT_UPDATE:
        calls = _BUR_ORDER
    elif event == EVENT_INSERT:
        calls = _BIR_ORDER
    else:
        calls = ()
    if journaled:
        calls = calls + (PROC_JOURNALIZE,)
    return calls


def verify_physical(model: PhysicalModel) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    out.extend(verify_logical(model.logical))
    api_tables = {api.table_name for api in model.table_apis}
    for api in model.table_apis:
        tpath = f"tapi:{api.table_name}"
        if not model.logical.has_table(api.table_name):
            out.append(Diagnostic("V201", ERROR, tpath, "no such logical table"))
            continue
        table = model.logical.table(api.table_name)
        for kind in (p.kind for p in api.procedures):
            if kind not in PROCEDURE_KINDS:
                out.append(Diagnostic("V202", ERROR, tpath, f"unknown procedure kind {kind}"))
        frozen_cols = [c.name for c in table.columns if c.frozen]
        has_frozen_proc = api.procedure(PROC_FROZEN) is not None
        if bool(frozen_cols) != has_frozen_proc:
            out.append(
                Diagnostic(
                    "V203",
                    ERROR,
                    tpath,
                    "frozen_column procedure present iff the table has frozen columns",
                )
            )
        pea_cols = [c.name for c in table.columns if c.origin_kind == ORIGIN_PEA]
        has_pea_proc = api.procedure(PROC_PEA) is not None
        if bool(pea_cols) != has_pea_proc:
            out.append(
                Diagnostic(
                    "V204",
                    ERROR,
                    tpath,
                    "column_PEA procedure present iff the table has PEA columns",
                )
            )
        for trig in api.triggers:
            expected_name = naming.trigger_name(
                table.abbrev,
                {"Insert": "BIR", "Update": "BUR", "Delete": "BDR"}[trig.event],
            )
            if trig.name != expected_name:
                out.append(
                    Diagnostic(
                        "V205",
                        ERROR,
                        f"{tpath}/trigger:{trig.name}",
                        f"trigger name must be {expected_name}",
                    )
                )
            if trig.procedure_calls != expected_calls(trig.event, table.journaled):
                out.append(
                    Diagnostic(
                        "V206",
                        ERROR,
                        f"{tpath}/trigger:{trig.name}",
                        "procedure-call order deviates from the published chain",
                    )
                )
    journal_names = {t.name for t in model.journal_tables}
    for t in model.logical.tables:
        jn = naming.journal_table_name(t.name)
        if t.journaled and jn not in journal_names:
            out.append(
                Diagnostic("V207", ERROR, f"table:{t.name}", "journaled table lacks journal table")
            )
        if not t.journaled and jn in journal_names:
            out.append(
                Diagnostic(
                    "V208", ERROR, f"table:{t.name}", "journal table exists for unjournaled table"
                )
            )
        if t.journaled and t.name not in api_tables:
            out.append(
                Diagnostic("V209", ERROR, f"table:{t.name}", "journaled table lacks a table API")
            )
    return out

"""Conceptual-to-relational transformation.

Two modes:

* identifying (default): identifying associations propagate the parent key
  into the child table and the child primary key, in identifier-closure order.
* non-identifying: identifying associations become plain non-nullable foreign
  keys; a child that would have carried a propagated key receives a surrogate
  ``id`` primary key instead, and its natural identifier survives as an
  explicit unique constraint UID1_<abbrev> so no implicit integrity is lost.

Pseudo-associative entities dissolve: their attributes land in the child table
as nullable columns grouped under the association's foreign key. No table is
ever generated for an association.
"""

from __future__ import annotations

from . import naming
from .conformance import check, errors
from .model_ir import (
    ORIGIN_FK,
    ORIGIN_OWN,
    ORIGIN_PEA,
    ORIGIN_SURROGATE,
    Association,
    Column,
    ConceptualModel,
    Diagnostic,
    Entity,
    ForeignKey,
    LogicalModel,
    NeutralType,
    Table,
    UniqueConstraint,
    W3CType,
)

IDENTIFYING = "identifying"
NON_IDENTIFYING = "non-identifying"
MODES = (IDENTIFYING, NON_IDENTIFYING)

SURROGATE_COLUMN = "id"
SURROGATE_TYPE = W3CType("integer")

DEFAULT_TEXT_LENGTH = 255
DEFAULT_DECIMAL = (18, 6)


class NotConformantError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__(
            "model is not conformant: " + "; ".join(d.render() for d in diagnostics)
        )


class NameCollisionError(Exception):
    def __init__(self, table: str, column: str):
        self.table = table
        self.column = column
        super().__init__(f"derived column name {column} collides in table {table}")


def map_type(t: W3CType) -> NeutralType:
    """W3C attribute type to neutral SQL category. Total over valid types;
    token/word refinements are not expressible in DDL and are enforced by the
    generated table APIs instead."""
    base = t.base
    if base in ("string", "token", "word"):
        return NeutralType("TEXT", length=t.length if t.length is not None else DEFAULT_TEXT_LENGTH)
    if base == "integer":
        return NeutralType("INTEGER")
    if base == "decimal":
        precision = t.precision if t.precision is not None else DEFAULT_DECIMAL[0]
        scale = t.scale if t.scale is not None else DEFAULT_DECIMAL[1]
        return NeutralType("NUMERIC", precision=precision, scale=scale)
    if base == "boolean":
        return NeutralType("BOOLEAN")
    if base == "date":
        return NeutralType("DATE")
    if base == "dateTime":
        return NeutralType("TIMESTAMP")
    if base == "duration":
        return NeutralType("INTERVAL")
    raise ValueError(f"unknown W3C type base {base!r}")


def derive_fk_column_name(parent: Entity, role: str, parent_pk_column: str) -> str:
    """<parent.abbrev>_<role>_<parentPkColumn>; one name per parent key column."""
    return naming.fk_column_name(parent.abbrev, role, parent_pk_column)


def _actual_pk(
    model: ConceptualModel, entity: Entity, mode: str, memo: dict[str, tuple[tuple[str, W3CType], ...]]
) -> tuple[tuple[str, W3CType], ...]:
    """Name and conceptual type of the entity's primary-key columns under the
    given mode. In non-identifying mode an entity with identifying parents
    keys on the surrogate instead of the propagated columns."""
    if entity.name in memo:
        return memo[entity.name]
    local_uid = tuple(
        (a.name, a.data_type) for a in entity.attributes if a.uid_index == 1
    )
    identifying_parents = model.identifying_parents(entity.name)
    if mode == NON_IDENTIFYING and identifying_parents:
        pk: tuple[tuple[str, W3CType], ...] = ((SURROGATE_COLUMN, SURROGATE_TYPE),)
    else:
        propagated: list[tuple[str, W3CType]] = []
        for assoc in identifying_parents:
            parent = model.entity(assoc.parent.entity_name)
            for pk_col, pk_type in _actual_pk(model, parent, mode, memo):
                propagated.append(
                    (derive_fk_column_name(parent, assoc.parent.role, pk_col), pk_type)
                )
        pk = tuple(propagated) + local_uid
    memo[entity.name] = pk
    return pk


def _fk_columns_for(
    model: ConceptualModel,
    assoc: Association,
    mode: str,
    memo: dict[str, tuple[tuple[str, W3CType], ...]],
) -> tuple[tuple[str, str, W3CType], ...]:
    """(column name, referenced column, type) triples for an association's
    foreign key, in parent-key order."""
    parent = model.entity(assoc.parent.entity_name)
    return tuple(
        (derive_fk_column_name(parent, assoc.parent.role, pk_col), pk_col, pk_type)
        for pk_col, pk_type in _actual_pk(model, parent, mode, memo)
    )


def transform(model: ConceptualModel, mode: str = IDENTIFYING) -> LogicalModel:
    """Build the relational logical model. Refuses models with conformance
    errors; warnings pass through."""
    if mode not in MODES:
        raise ValueError(f"unknown transform mode {mode!r}")
    found_errors = errors(check(model))
    if found_errors:
        raise NotConformantError(found_errors)

    memo: dict[str, tuple[tuple[str, W3CType], ...]] = {}
    tables: list[Table] = []
    trace: dict[str, str] = {}

    for entity in model.entities:
        table_name = entity.table_name
        trace[f"entity:{entity.name}"] = f"table:{table_name}"
        child_assocs = tuple(
            a for a in model.associations if a.child.entity_name == entity.name
        )
        identifying_assocs = tuple(a for a in child_assocs if a.identifying)
        pk_names = tuple(name for name, _ in _actual_pk(model, entity, mode, memo))
        has_surrogate = mode == NON_IDENTIFYING and bool(identifying_assocs)

        columns: list[Column] = []
        foreign_keys: list[ForeignKey] = []
        uniques: list[UniqueConstraint] = []

        if has_surrogate:
            columns.append(
                Column(
                    name=SURROGATE_COLUMN,
                    logical_type=SURROGATE_TYPE,
                    sql_type=map_type(SURROGATE_TYPE),
                    nullable=False,
                    origin_kind=ORIGIN_SURROGATE,
                )
            )

        # Foreign keys of identifying associations lead the column list; they
        # open the primary key in identifying mode (closure order).
        for assoc in identifying_assocs:
            fk_name = naming.fk_constraint_name(table_name, assoc.parent.role)
            fk_cols = _fk_columns_for(model, assoc, mode, memo)
            for col_name, _, col_type in fk_cols:
                columns.append(
                    Column(
                        name=col_name,
                        logical_type=col_type,
                        sql_type=map_type(col_type),
                        nullable=False,
                        origin_kind=ORIGIN_FK,
                    )
                )
            parent_table = model.entity(assoc.parent.entity_name).table_name
            foreign_keys.append(
                ForeignKey(
                    name=fk_name,
                    columns=tuple(c for c, _, _ in fk_cols),
                    referenced_table=parent_table,
                    referenced_columns=tuple(r for _, r, _ in fk_cols),
                    identifying=mode == IDENTIFYING,
                    nullable=False,
                )
            )
            trace[f"association:{assoc.name}"] = f"table:{table_name}/fk:{fk_name}"

        for attr in entity.attributes:
            columns.append(
                Column(
                    name=attr.name,
                    logical_type=attr.data_type,
                    sql_type=map_type(attr.data_type),
                    nullable=not attr.mandatory and attr.name not in pk_names,
                    origin_kind=ORIGIN_OWN,
                    frozen=attr.frozen,
                    uppercase=attr.uppercase,
                    init_expr=attr.init_expr,
                )
            )
            trace[f"entity:{entity.name}/attribute:{attr.name}"] = (
                f"table:{table_name}/column:{attr.name}"
            )

        # Plain associations contribute nullable or mandatory foreign keys;
        # each association's dissolved PEA attributes follow its key columns.
        for assoc in child_assocs:
            fk_name = naming.fk_constraint_name(table_name, assoc.parent.role)
            if not assoc.identifying:
                fk_cols = _fk_columns_for(model, assoc, mode, memo)
                fk_nullable = assoc.parent.min_card == 0
                for col_name, _, col_type in fk_cols:
                    columns.append(
                        Column(
                            name=col_name,
                            logical_type=col_type,
                            sql_type=map_type(col_type),
                            nullable=fk_nullable,
                            origin_kind=ORIGIN_FK,
                        )
                    )
                parent_table = model.entity(assoc.parent.entity_name).table_name
                foreign_keys.append(
                    ForeignKey(
                        name=fk_name,
                        columns=tuple(c for c, _, _ in fk_cols),
                        referenced_table=parent_table,
                        referenced_columns=tuple(r for _, r, _ in fk_cols),
                        identifying=False,
                        nullable=fk_nullable,
                    )
                )
                trace[f"association:{assoc.name}"] = f"table:{table_name}/fk:{fk_name}"
            for attr in assoc.pea_attributes:
                col_name = naming.pea_column_name(assoc.parent.role, attr.name)
                columns.append(
                    Column(
                        name=col_name,
                        logical_type=attr.data_type,
                        sql_type=map_type(attr.data_type),
                        nullable=True,
                        origin_kind=ORIGIN_PEA,
                        frozen=attr.frozen,
                        uppercase=attr.uppercase,
                        init_expr=attr.init_expr,
                        pea_fk_group=fk_name,
                    )
                )
                trace[f"association:{assoc.name}/attribute:{attr.name}"] = (
                    f"table:{table_name}/column:{col_name}"
                )

        seen: set[str] = set()
        for col in columns:
            if col.name in seen:
                raise NameCollisionError(table_name, col.name)
            seen.add(col.name)

        if has_surrogate:
            former_pk = tuple(
                c for c, _, _ in (
                    item
                    for assoc in identifying_assocs
                    for item in _fk_columns_for(model, assoc, mode, memo)
                )
            ) + tuple(a.name for a in entity.attributes if a.uid_index == 1)
            uniques.append(
                UniqueConstraint(naming.unique_constraint_name(1, entity.abbrev), former_pk)
            )
        secondary = sorted(
            {a.uid_index for a in entity.attributes if a.uid_index is not None and a.uid_index > 1}
        )
        for idx in secondary:
            uniques.append(
                UniqueConstraint(
                    naming.unique_constraint_name(idx, entity.abbrev),
                    tuple(a.name for a in entity.attributes if a.uid_index == idx),
                )
            )

        tables.append(
            Table(
                name=table_name,
                abbrev=entity.abbrev,
                columns=tuple(columns),
                primary_key=pk_names,
                foreign_keys=tuple(foreign_keys),
                uniques=tuple(uniques),
                journaled=model.is_journaled(entity),
            )
        )

    return LogicalModel(name=model.name, tables=tuple(tables), trace_links=trace)


# ---------------------------------------------------------------------------
# Canonical serialization (.mld), bit-stable for golden tests


def serialize_logical(model: LogicalModel) -> str:
    lines: list[str] = [f"logical {model.name}"]
    for t in model.tables:
        head = f"table {t.name} abbrev {t.abbrev}"
        if t.journaled:
            head += " journaled"
        lines.append(head + " {")
        for c in t.columns:
            parts = [
                f"  column {c.name} {c.sql_type.render()}",
                "NULL" if c.nullable else "NOT NULL",
                f"origin={c.origin_kind}",
                f"type={c.logical_type.render()}",
            ]
            if c.frozen:
                parts.append("frozen")
            if c.uppercase:
                parts.append("uppercase")
            if c.init_expr:
                parts.append(f"init={c.init_expr}")
            if c.pea_fk_group:
                parts.append(f"group={c.pea_fk_group}")
            lines.append(" ".join(parts))
        lines.append(f"  primary key ({', '.join(t.primary_key)})")
        for fk in t.foreign_keys:
            parts = [
                f"  foreign key {fk.name} ({', '.join(fk.columns)})",
                f"references {fk.referenced_table} ({', '.join(fk.referenced_columns)})",
            ]
            if fk.identifying:
                parts.append("identifying")
            parts.append("NULL" if fk.nullable else "NOT NULL")
            lines.append(" ".join(parts))
        for u in t.uniques:
            lines.append(f"  unique {u.name} ({', '.join(u.columns)})")
        lines.append("}")
    for source, target in model.trace_links.items():
        lines.append(f"trace {source} -> {target}")
    return "\n".join(lines) + "\n"

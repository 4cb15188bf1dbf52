"""Iterative-incremental migration: diff two physical models into an ordered
plan whose every step is classified Preserved (cannot alter or lose existing
row data) or Forced (can; requires explicit operator opt-in).

Classification is total and deterministic per change kind:

    Preserved  CreateTable, CreateJournalTable, AddColumn (nullable or
               init-defaulted), AlterColumnType widening TEXT length or
               NUMERIC precision/scale, AlterNullability to NULL,
               AddConstraint UNIQUE or FOREIGN KEY, DropConstraint UNIQUE,
               Create/Replace/DropTrigger (code objects carry no data)
    Forced     DropTable, DropColumn, AlterColumnType narrowing or changing
               category, AlterNullability to NOT NULL, AddColumn NOT NULL
               without default, AddConstraint/DropConstraint touching a
               primary key (key composition changes are always forced),
               DropConstraint FOREIGN KEY

Elements match by name; renames are out of scope and a dropped+added column
pair sharing type and position is reported as ambiguous, never guessed.
"""

from __future__ import annotations

from dataclasses import replace

from . import naming
from .model_ir import (
    FORCED,
    PRESERVED,
    ChangeItem,
    Column,
    ForeignKey,
    MigrationPlan,
    PhysicalModel,
    Table,
    TableApi,
    UniqueConstraint,
)
from .sql_emit import (
    DIALECT_EMBEDDED,
    DIALECT_ORACLE,
    MIGRATION_SCRIPT_NAMES,
    Script,
    ScriptBundle,
    UnsupportedDialectError,
    script_header,
)


class AmbiguousRenameError(Exception):
    def __init__(self, table: str, dropped: str, added: str):
        self.table = table
        self.dropped = dropped
        self.added = added
        super().__init__(
            f"table {table}: dropped column {dropped} and added column {added}"
            " share type and position; renames must be resolved by hand"
        )


class ForcedChangesBlockedError(Exception):
    def __init__(self, items: tuple[ChangeItem, ...]):
        self.items = items
        listing = "; ".join(i.render() for i in items)
        super().__init__(f"plan contains forced changes (pass allow_forced to apply): {listing}")


def _is_widening(old: Column, new: Column) -> bool:
    a, b = old.sql_type, new.sql_type
    if a.kind != b.kind:
        return False
    if a.kind == "TEXT":
        return (b.length or 0) >= (a.length or 0)
    if a.kind == "NUMERIC":
        return (b.precision or 0) >= (a.precision or 0) and (b.scale or 0) >= (a.scale or 0)
    return True


def classify(kind: str, before: object | None = None, after: object | None = None) -> str:
    if kind in ("CreateTable", "CreateJournalTable", "CreateTrigger", "ReplaceTrigger", "DropTrigger"):
        return PRESERVED
    if kind in ("DropTable", "DropColumn"):
        return FORCED
    if kind == "AddColumn":
        col = after
        assert isinstance(col, Column)
        return PRESERVED if col.nullable or col.init_expr else FORCED
    if kind == "AlterColumnType":
        assert isinstance(before, Column) and isinstance(after, Column)
        return PRESERVED if _is_widening(before, after) else FORCED
    if kind == "AlterNullability":
        assert isinstance(after, Column)
        return PRESERVED if after.nullable else FORCED
    if kind == "AddConstraint":
        return FORCED if isinstance(after, tuple) else PRESERVED  # tuple payload = primary key
    if kind == "DropConstraint":
        if isinstance(before, UniqueConstraint):
            return PRESERVED
        return FORCED  # primary or foreign keys guard data invariants
    raise ValueError(f"unknown change kind {kind}")


def _item(kind: str, path: str, detail: str = "", **payload) -> ChangeItem:
    return ChangeItem(
        kind=kind,
        path=path,
        classification=classify(kind, payload.get("before"), payload.get("after")),
        detail=detail,
        **payload,
    )


def _nullness(c: Column) -> str:
    return "NULL" if c.nullable else "NOT NULL"


def _diff_columns(old: Table, new: Table, out: dict[str, list[ChangeItem]]) -> None:
    old_names = [c.name for c in old.columns]
    new_names = [c.name for c in new.columns]
    dropped = [c for c in old.columns if c.name not in new_names]
    added = [c for c in new.columns if c.name not in old_names]
    for d in dropped:
        for a in added:
            if d.sql_type == a.sql_type and old_names.index(d.name) == new_names.index(a.name):
                raise AmbiguousRenameError(new.name, d.name, a.name)
    for c in dropped:
        out["drop_column"].append(
            _item(
                "DropColumn",
                f"table:{new.name}/column:{c.name}",
                before=c,
                table_before=old,
                table_after=new,
            )
        )
    for c in added:
        out["add_column"].append(
            _item(
                "AddColumn",
                f"table:{new.name}/column:{c.name}",
                detail=f"{c.sql_type.render()} {_nullness(c)}",
                after=c,
                table_before=old,
                table_after=new,
            )
        )
    for c_new in new.columns:
        if c_new.name not in old_names:
            continue
        c_old = old.column(c_new.name)
        path = f"table:{new.name}/column:{c_new.name}"
        if c_old.sql_type != c_new.sql_type:
            out["alter_type"].append(
                _item(
                    "AlterColumnType",
                    path,
                    detail=f"{c_old.sql_type.render()} -> {c_new.sql_type.render()}",
                    before=c_old,
                    after=c_new,
                    table_before=old,
                    table_after=new,
                )
            )
        if c_old.nullable != c_new.nullable:
            out["alter_null"].append(
                _item(
                    "AlterNullability",
                    path,
                    detail=f"{_nullness(c_old)} -> {_nullness(c_new)}",
                    before=c_old,
                    after=c_new,
                    table_before=old,
                    table_after=new,
                )
            )


def _diff_constraints(old: Table, new: Table, out: dict[str, list[ChangeItem]]) -> None:
    if old.primary_key != new.primary_key:
        pk_name = naming.pk_constraint_name(new.name)
        path = f"table:{new.name}/constraint:{pk_name}"
        out["drop_constraint"].append(
            _item(
                "DropConstraint",
                path,
                detail=f"PRIMARY KEY ({', '.join(old.primary_key)})",
                before=("PK",) + tuple(old.primary_key),
                table_before=old,
                table_after=new,
            )
        )
        out["add_constraint"].append(
            _item(
                "AddConstraint",
                path,
                detail=f"PRIMARY KEY ({', '.join(new.primary_key)})",
                after=("PK",) + tuple(new.primary_key),
                table_before=old,
                table_after=new,
            )
        )
    old_uniques = {u.name: u for u in old.uniques}
    new_uniques = {u.name: u for u in new.uniques}
    for name, u in old_uniques.items():
        if name not in new_uniques or new_uniques[name] != u:
            out["drop_constraint"].append(
                _item(
                    "DropConstraint",
                    f"table:{new.name}/constraint:{name}",
                    detail=f"UNIQUE ({', '.join(u.columns)})",
                    before=u,
                    table_before=old,
                    table_after=new,
                )
            )
    for name, u in new_uniques.items():
        if name not in old_uniques or old_uniques[name] != u:
            out["add_constraint"].append(
                _item(
                    "AddConstraint",
                    f"table:{new.name}/constraint:{name}",
                    detail=f"UNIQUE ({', '.join(u.columns)})",
                    after=u,
                    table_before=old,
                    table_after=new,
                )
            )
    old_fks = {f.name: f for f in old.foreign_keys}
    new_fks = {f.name: f for f in new.foreign_keys}
    for name, f in old_fks.items():
        if name not in new_fks or new_fks[name] != f:
            out["drop_constraint"].append(
                _item(
                    "DropConstraint",
                    f"table:{new.name}/constraint:{name}",
                    detail=f"FOREIGN KEY ({', '.join(f.columns)})",
                    before=f,
                    table_before=old,
                    table_after=new,
                )
            )
    for name, f in new_fks.items():
        if name not in old_fks or old_fks[name] != f:
            out["add_constraint"].append(
                _item(
                    "AddConstraint",
                    f"table:{new.name}/constraint:{name}",
                    detail=f"FOREIGN KEY ({', '.join(f.columns)}) REFERENCES {f.referenced_table}",
                    after=f,
                    table_before=old,
                    table_after=new,
                )
            )


def _table_universe(model: PhysicalModel) -> dict[str, tuple[Table, bool]]:
    universe: dict[str, tuple[Table, bool]] = {}
    for t in model.logical.tables:
        universe[t.name] = (t, False)
    for t in model.journal_tables:
        universe[t.name] = (t, True)
    return universe


def _drop_order(tables: list[Table], universe: dict[str, tuple[Table, bool]]) -> list[Table]:
    """Dependents before the tables they reference."""
    order: list[Table] = []
    names = {t.name for t in tables}
    remaining = list(tables)
    while remaining:
        progressed = False
        for t in list(remaining):
            referers = [
                r
                for r in remaining
                if r.name != t.name and any(fk.referenced_table == t.name for fk in r.foreign_keys)
            ]
            if not referers:
                order.append(t)
                remaining.remove(t)
                progressed = True
        if not progressed:
            order.extend(remaining)
            break
    return order


def diff(old: PhysicalModel, new: PhysicalModel) -> MigrationPlan:
    """Minimal ordered change set transforming old into new."""
    from .sql_emit.embedded import topo_tables

    old_universe = _table_universe(old)
    new_universe = _table_universe(new)

    groups: dict[str, list[ChangeItem]] = {
        key: []
        for key in (
            "drop_trigger",
            "drop_constraint",
            "drop_column",
            "drop_table",
            "create_table",
            "add_column",
            "alter_type",
            "alter_null",
            "add_constraint",
            "triggers",
        )
    }

    dropped_tables = [t for name, (t, _) in old_universe.items() if name not in new_universe]
    for t in _drop_order(dropped_tables, old_universe):
        api = old.api_for(t.name)
        if api is not None:
            for trig in api.triggers:
                groups["drop_trigger"].append(
                    _item(
                        "DropTrigger",
                        f"table:{t.name}/trigger:{trig.name}",
                        before=api,
                        table_before=t,
                    )
                )
        groups["drop_table"].append(
            _item("DropTable", f"table:{t.name}", before=t, table_before=t)
        )

    created: list[tuple[Table, bool]] = [
        (t, is_journal)
        for name, (t, is_journal) in new_universe.items()
        if name not in old_universe
    ]
    created_order = {t.name: i for i, t in enumerate(topo_tables(tuple(t for t, _ in created)))}
    for t, is_journal in sorted(created, key=lambda pair: created_order[pair[0].name]):
        kind = "CreateJournalTable" if is_journal else "CreateTable"
        groups["create_table"].append(
            _item(kind, f"table:{t.name}", after=t, table_after=t)
        )

    changed_tables: set[str] = set()
    for name, (new_table, _) in new_universe.items():
        if name not in old_universe:
            changed_tables.add(name)
            continue
        old_table, _ = old_universe[name]
        before = {k: len(v) for k, v in groups.items()}
        _diff_columns(old_table, new_table, groups)
        _diff_constraints(old_table, new_table, groups)
        if any(len(groups[k]) != before[k] for k in before):
            changed_tables.add(name)

    # Table APIs: regenerate whenever the API spec or the table shape changed;
    # trigger bodies embed column lists, so shape changes invalidate them.
    for t in new.logical.tables:
        new_api = new.api_for(t.name)
        old_api = old.api_for(t.name) if t.name in old_universe else None
        old_table = old_universe.get(t.name, (None, False))[0]
        if t.name not in old_universe:
            if new_api is not None:
                for trig in new_api.triggers:
                    groups["triggers"].append(
                        _item(
                            "CreateTrigger",
                            f"table:{t.name}/trigger:{trig.name}",
                            after=new_api,
                            table_after=t,
                        )
                    )
            continue
        table_changed = t.name in changed_tables or (
            old_table is not None and old_table != t
        )
        if new_api == old_api and not (table_changed and new_api is not None):
            continue
        old_triggers = {trig.name for trig in old_api.triggers} if old_api else set()
        new_triggers = {trig.name for trig in new_api.triggers} if new_api else set()
        if old_api is not None:
            for trig in old_api.triggers:
                if trig.name not in new_triggers:
                    groups["drop_trigger"].append(
                        _item(
                            "DropTrigger",
                            f"table:{t.name}/trigger:{trig.name}",
                            before=old_api,
                            table_before=old_table,
                        )
                    )
        if new_api is not None:
            for trig in new_api.triggers:
                kind = "ReplaceTrigger" if trig.name in old_triggers else "CreateTrigger"
                groups["triggers"].append(
                    _item(
                        kind,
                        f"table:{t.name}/trigger:{trig.name}",
                        after=new_api,
                        table_before=old_table,
                        table_after=t,
                    )
                )

    # journaling toggled on: the journal table is new (created above) but the
    # item kind must say so even when the source table already existed
    items: list[ChangeItem] = []
    for key in (
        "drop_trigger",
        "drop_constraint",
        "drop_column",
        "drop_table",
        "create_table",
        "add_column",
        "alter_type",
        "alter_null",
        "add_constraint",
        "triggers",
    ):
        items.extend(groups[key])
    return MigrationPlan(tuple(items))


def serialize_plan(plan: MigrationPlan) -> str:
    if not plan.items:
        return ""
    return plan.render() + "\n"


# ---------------------------------------------------------------------------
# Migration script emission


def _oracle_type(col: Column) -> str:
    from .sql_emit.oracle import render_type

    return render_type(col.sql_type)


def _oracle_schema_statements(plan: MigrationPlan) -> list[str]:
    from .sql_emit import oracle

    stmts: list[str] = []
    fk_alters: list[str] = []
    for item in plan.items:
        table_name = item.path.split("/", 1)[0].split(":", 1)[1]
        if item.kind == "DropConstraint":
            name = item.path.rsplit(":", 1)[1]
            stmts.append(f"ALTER TABLE {table_name} DROP CONSTRAINT {name};")
        elif item.kind == "DropColumn":
            assert isinstance(item.before, Column)
            stmts.append(f"ALTER TABLE {table_name} DROP COLUMN {item.before.name};")
        elif item.kind == "DropTable":
            assert isinstance(item.before, Table)
            stmts.append(f"DROP TABLE {item.before.name} CASCADE CONSTRAINTS;")
            if oracle.has_surrogate(item.before):
                stmts.append(f"DROP SEQUENCE {naming.sequence_name(item.before.name)};")
        elif item.kind in ("CreateTable", "CreateJournalTable"):
            assert isinstance(item.after, Table)
            stmts.append(oracle.render_create_table(item.after))
            if oracle.has_surrogate(item.after):
                stmts.append(f"CREATE SEQUENCE {naming.sequence_name(item.after.name)};")
            fk_alters.extend(oracle.render_add_foreign_key(item.after))
        elif item.kind == "AddColumn":
            assert isinstance(item.after, Column)
            col = item.after
            clause = f"{col.name} {_oracle_type(col)}"
            if col.init_expr:
                clause += " DEFAULT SYSDATE"
            if not col.nullable:
                clause += " NOT NULL"
            stmts.append(f"ALTER TABLE {table_name} ADD ({clause});")
        elif item.kind == "AlterColumnType":
            assert isinstance(item.after, Column)
            stmts.append(
                f"ALTER TABLE {table_name} MODIFY ({item.after.name} {_oracle_type(item.after)});"
            )
        elif item.kind == "AlterNullability":
            assert isinstance(item.after, Column)
            nullness = "NULL" if item.after.nullable else "NOT NULL"
            stmts.append(f"ALTER TABLE {table_name} MODIFY ({item.after.name} {nullness});")
        elif item.kind == "AddConstraint":
            payload = item.after
            if isinstance(payload, tuple):
                name = naming.pk_constraint_name(table_name)
                stmts.append(
                    f"ALTER TABLE {table_name} ADD CONSTRAINT {name}"
                    f" PRIMARY KEY ({', '.join(payload[1:])});"
                )
            elif isinstance(payload, UniqueConstraint):
                stmts.append(
                    f"ALTER TABLE {table_name} ADD CONSTRAINT {payload.name}"
                    f" UNIQUE ({', '.join(payload.columns)});"
                )
            elif isinstance(payload, ForeignKey):
                stmt = (
                    f"ALTER TABLE {table_name} ADD CONSTRAINT {payload.name}"
                    f" FOREIGN KEY ({', '.join(payload.columns)})"
                    f" REFERENCES {payload.referenced_table}"
                    f" ({', '.join(payload.referenced_columns)})"
                )
                if payload.identifying:
                    stmt += " ON DELETE CASCADE"
                stmts.append(stmt + ";")
    return stmts + fk_alters


def _regen_targets(plan: MigrationPlan) -> list[tuple[Table, TableApi]]:
    """Tables whose API must be (re)created, with the new API, in first-seen
    plan order."""
    seen: dict[str, tuple[Table, TableApi]] = {}
    for item in plan.items:
        if item.kind in ("CreateTrigger", "ReplaceTrigger"):
            table = item.table_after
            api = item.after
            assert isinstance(table, Table) and isinstance(api, TableApi)
            seen.setdefault(table.name, (table, api))
    return list(seen.values())


def _dropped_api_tables(plan: MigrationPlan) -> list[Table]:
    """Surviving tables whose whole API disappears (all triggers dropped, none
    recreated)."""
    dropped: dict[str, Table] = {}
    recreated = {
        item.table_after.name
        for item in plan.items
        if item.kind in ("CreateTrigger", "ReplaceTrigger") and isinstance(item.table_after, Table)
    }
    survivors_lost = {
        item.path.split("/", 1)[0].split(":", 1)[1]
        for item in plan.items
        if item.kind == "DropTable"
    }
    for item in plan.items:
        if item.kind != "DropTrigger" or not isinstance(item.table_before, Table):
            continue
        name = item.table_before.name
        if name not in recreated and name not in survivors_lost:
            dropped[name] = item.table_before
    return list(dropped.values())


def _emit_oracle(plan: MigrationPlan, source_hash: str) -> ScriptBundle:
    from .sql_emit import oracle

    drop_code: list[str] = []
    for item in plan.items:
        if item.kind == "DropTrigger":
            drop_code.append(f"DROP TRIGGER {item.path.rsplit(':', 1)[1]};")
    for table in _dropped_api_tables(plan):
        drop_code.append(f"DROP PACKAGE {naming.package_name(table.abbrev)};")

    schema = _oracle_schema_statements(plan)

    packages: list[str] = []
    triggers: list[str] = []
    for table, api in _regen_targets(plan):
        pkg, trg = oracle.render_table_api(table, api)
        packages.append(pkg)
        triggers.append(trg)

    def script(name: str, statements: list[str]) -> Script:
        text = script_header(name, DIALECT_ORACLE, source_hash)
        if statements:
            text += "\n" + "\n\n".join(statements) + "\n"
        return Script(name, text)

    return ScriptBundle(
        (
            script(MIGRATION_SCRIPT_NAMES[0], drop_code),
            script(MIGRATION_SCRIPT_NAMES[1], schema),
            script(MIGRATION_SCRIPT_NAMES[2], packages),
            script(MIGRATION_SCRIPT_NAMES[3], triggers),
        )
    )


_REBUILD_KINDS = ("AlterColumnType", "AlterNullability", "DropColumn")


def _embedded_rebuild_tables(plan: MigrationPlan) -> dict[str, tuple[Table, Table]]:
    """Tables the embedded engine must rebuild (copy into a fresh table):
    column type/nullability changes, column drops, and primary- or foreign-key
    composition changes. Unique constraints alone need only index statements."""
    rebuild: dict[str, tuple[Table, Table]] = {}
    for item in plan.items:
        needs = item.kind in _REBUILD_KINDS or (
            item.kind in ("AddConstraint", "DropConstraint")
            and not isinstance(item.after or item.before, UniqueConstraint)
        )
        if not needs:
            continue
        if not isinstance(item.table_before, Table) or not isinstance(item.table_after, Table):
            continue
        rebuild[item.table_after.name] = (item.table_before, item.table_after)
    return rebuild


def _emit_embedded(plan: MigrationPlan, source_hash: str) -> ScriptBundle:
    from .sql_emit import embedded

    rebuild = _embedded_rebuild_tables(plan)

    drop_code: list[str] = []
    seen_drop: set[str] = set()
    for item in plan.items:
        table = item.table_before if isinstance(item.table_before, Table) else None
        if item.kind == "DropTrigger" and table and table.name not in seen_drop:
            seen_drop.add(table.name)
            drop_code.extend(embedded.drop_trigger_statements(table.abbrev))
    for old_table, _ in rebuild.values():
        if old_table.name not in seen_drop and old_table.primary_key is not None:
            seen_drop.add(old_table.name)
            drop_code.extend(embedded.drop_trigger_statements(old_table.abbrev))
    for table, _api in _regen_targets(plan):
        if table.name not in seen_drop:
            seen_drop.add(table.name)
            drop_code.extend(embedded.drop_trigger_statements(table.abbrev))

    schema: list[str] = ["PRAGMA foreign_keys = OFF;"]
    for item in plan.items:
        if item.kind == "DropConstraint" and isinstance(item.before, UniqueConstraint):
            if item.table_after is None or item.table_after.name not in rebuild:
                schema.append(f"DROP INDEX IF EXISTS {item.before.name};")
    for item in plan.items:
        if item.kind == "DropTable":
            assert isinstance(item.before, Table)
            schema.append(f"DROP TABLE IF EXISTS {item.before.name};")
    for item in plan.items:
        if item.kind in ("CreateTable", "CreateJournalTable"):
            assert isinstance(item.after, Table)
            schema.append(embedded.render_create_table(item.after))
            schema.extend(embedded.render_unique_indexes(item.after))
    for item in plan.items:
        if item.kind != "AddColumn":
            continue
        assert isinstance(item.after, Column) and isinstance(item.table_after, Table)
        if item.table_after.name in rebuild:
            continue
        col = item.after
        clause = f"{col.name} {embedded.render_type(col.sql_type)}"
        if not col.nullable and not col.init_expr:
            filler = "''" if col.sql_type.kind == "TEXT" else "0"
            clause += f" NOT NULL DEFAULT {filler}"
        schema.append(f"ALTER TABLE {item.table_after.name} ADD COLUMN {clause};")
    for old_table, new_table in rebuild.values():
        tmp = replace(new_table, name=f"{new_table.name}__rebuild")
        common = [c.name for c in new_table.columns if old_table.has_column(c.name)]
        schema.append(embedded.render_create_table(tmp))
        if common:
            schema.append(
                f"INSERT INTO {tmp.name} ({', '.join(common)})\n"
                f"SELECT {', '.join(common)} FROM {old_table.name};"
            )
        schema.append(f"DROP TABLE {old_table.name};")
        schema.append(f"ALTER TABLE {tmp.name} RENAME TO {new_table.name};")
        schema.extend(embedded.render_unique_indexes(new_table))
    for item in plan.items:
        if item.kind == "AddConstraint" and isinstance(item.after, UniqueConstraint):
            if item.table_after is not None and item.table_after.name not in rebuild:
                schema.append(
                    f"CREATE UNIQUE INDEX IF NOT EXISTS {item.after.name}"
                    f" ON {item.table_after.name} ({', '.join(item.after.columns)});"
                )
    schema.append("PRAGMA foreign_keys = ON;")
    if len(schema) == 2:
        schema = []

    regen = _regen_targets(plan)
    needs_session = bool(regen) or any(
        item.kind == "CreateJournalTable" for item in plan.items
    )
    tapis = [embedded.session_setup_sql()] if needs_session else []

    triggers: list[str] = []
    for table, api in regen:
        triggers.extend(embedded.render_table_triggers(table, api))

    def script(name: str, statements: list[str]) -> Script:
        text = script_header(name, DIALECT_EMBEDDED, source_hash)
        if statements:
            text += "\n" + "\n\n".join(statements) + "\n"
        return Script(name, text)

    return ScriptBundle(
        (
            script(MIGRATION_SCRIPT_NAMES[0], drop_code),
            script(MIGRATION_SCRIPT_NAMES[1], schema),
            script(MIGRATION_SCRIPT_NAMES[2], tapis),
            script(MIGRATION_SCRIPT_NAMES[3], triggers),
        )
    )


def emit_migration(plan: MigrationPlan, dialect: str, allow_forced: bool = False) -> ScriptBundle:
    """Dependency-ordered migration scripts. Refuses plans containing forced
    items unless the operator opted in."""
    forced = plan.forced_items
    if forced and not allow_forced:
        raise ForcedChangesBlockedError(forced)
    import hashlib

    source_hash = hashlib.sha256(serialize_plan(plan).encode("utf-8")).hexdigest()[:12]
    if dialect == DIALECT_ORACLE:
        return _emit_oracle(plan, source_hash)
    if dialect == DIALECT_EMBEDDED:
        return _emit_embedded(plan, source_hash)
    raise UnsupportedDialectError(dialect)

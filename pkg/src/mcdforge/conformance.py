"""Semantic conformance control for conceptual models.

Rule catalog (all Errors except R8):

    R1  identifying association's parent end cardinality must be exactly 1..1
    R2  association attributes (PEA payload) only on degree-1:n associations
    R3  every entity's identifier closure is non-empty and acyclic
    R4  UID indices contiguous from 1 per entity; none on association attributes
    R5  init=now() only on date/dateTime attributes
    R6  frozen forbidden on identifier-member attributes
    R7  mandatory association attributes mean "mandatory when the link exists";
        since parent ends are capped at cardinality 1 this rule cannot be
        violated by a well-formed value and exists as documented semantics
    R8  uppercase only on string-family types (Warning: ignorable, no
        integrity loss)
    R9  journaling is a model- or entity-level marker; attribute-level
        journaling is unrepresentable here and already rejected by the parser
    R10 name collisions after foreign-key/PEA column-name derivation,
        including collisions in the generated code-object namespace
        (duplicate abbrevs, duplicate table names)

The catalog reproduces the published control for R1; the remaining rules are
induced from the formalism's stated semantics. ``check`` is pure and reports
in model-declaration order.
"""

from __future__ import annotations

from . import naming
from .model_ir import (
    ERROR,
    STRING_FAMILY,
    WARNING,
    ConceptualModel,
    CyclicIdentificationError,
    Diagnostic,
    Entity,
    NoIdentifierError,
    identifier_column_names,
)


def _check_entity_rules(model: ConceptualModel, entity: Entity, out: list[Diagnostic]) -> None:
    epath = f"entity:{entity.name}"
    try:
        identifier_column_names(model, entity.name)
    except CyclicIdentificationError as exc:
        out.append(
            Diagnostic(
                "R3",
                ERROR,
                epath,
                "identifying associations form a cycle: " + " -> ".join(exc.cycle),
            )
        )
    except NoIdentifierError:
        out.append(
            Diagnostic(
                "R3",
                ERROR,
                epath,
                "no natural identifier: needs a UID-1 attribute or an identifying parent",
            )
        )
    indices = sorted(a.uid_index for a in entity.attributes if a.uid_index is not None)
    if indices and set(indices) != set(range(1, max(indices) + 1)):
        out.append(
            Diagnostic(
                "R4",
                ERROR,
                epath,
                f"UID indices {sorted(set(indices))} must be contiguous from 1",
            )
        )
    for attr in entity.attributes:
        apath = f"{epath}/attribute:{attr.name}"
        if attr.init_expr is not None and attr.data_type.base not in ("date", "dateTime"):
            out.append(
                Diagnostic(
                    "R5",
                    ERROR,
                    apath,
                    f"init=now() requires date or dateTime, not {attr.data_type.base}",
                )
            )
        if attr.frozen and attr.uid_index is not None:
            out.append(
                Diagnostic("R6", ERROR, apath, "frozen is forbidden on identifier members")
            )
        if attr.uppercase and attr.data_type.base not in STRING_FAMILY:
            out.append(
                Diagnostic(
                    "R8",
                    WARNING,
                    apath,
                    f"uppercase has no effect on type {attr.data_type.base}",
                )
            )


def _derived_column_names(model: ConceptualModel, entity: Entity) -> list[tuple[str, str]]:
    """(column name, origin path) pairs the transform would create for the
    entity's table, skipping associations whose parent identifier is broken
    (R3 reports those)."""
    names: list[tuple[str, str]] = [
        (a.name, f"entity:{entity.name}/attribute:{a.name}") for a in entity.attributes
    ]
    for assoc in model.associations:
        if assoc.child.entity_name != entity.name:
            continue
        if not model.has_entity(assoc.parent.entity_name):
            continue
        parent = model.entity(assoc.parent.entity_name)
        try:
            parent_pk = identifier_column_names(model, parent.name)
        except (CyclicIdentificationError, NoIdentifierError):
            parent_pk = ()
        apath = f"association:{assoc.name}"
        for pk_col in parent_pk:
            names.append(
                (naming.fk_column_name(parent.abbrev, assoc.parent.role, pk_col), apath)
            )
        for attr in assoc.pea_attributes:
            names.append(
                (
                    naming.pea_column_name(assoc.parent.role, attr.name),
                    f"{apath}/attribute:{attr.name}",
                )
            )
    return names


def _check_naming(model: ConceptualModel, out: list[Diagnostic]) -> None:
    for entity in model.entities:
        seen: dict[str, str] = {}
        for name, path in _derived_column_names(model, entity):
            if name in seen:
                out.append(
                    Diagnostic(
                        "R10",
                        ERROR,
                        path,
                        f"derived column name {name} collides with {seen[name]}"
                        f" in table {entity.table_name}",
                    )
                )
            else:
                seen[name] = path
    by_abbrev: dict[str, str] = {}
    by_table: dict[str, str] = {}
    for entity in model.entities:
        epath = f"entity:{entity.name}"
        if entity.abbrev in by_abbrev:
            out.append(
                Diagnostic(
                    "R10",
                    ERROR,
                    epath,
                    f"abbrev {entity.abbrev} already used by {by_abbrev[entity.abbrev]};"
                    " generated trigger and constraint names would collide",
                )
            )
        else:
            by_abbrev[entity.abbrev] = epath
        if entity.table_name in by_table:
            out.append(
                Diagnostic(
                    "R10",
                    ERROR,
                    epath,
                    f"table name {entity.table_name} already used by {by_table[entity.table_name]}",
                )
            )
        else:
            by_table[entity.table_name] = epath


def check(model: ConceptualModel) -> list[Diagnostic]:
    """All rule-catalog violations, empty iff conformant."""
    out: list[Diagnostic] = []
    for entity in model.entities:
        _check_entity_rules(model, entity, out)
    for assoc in model.associations:
        apath = f"association:{assoc.name}"
        if assoc.identifying and not (
            assoc.parent.min_card == 1 and assoc.parent.max_card == "1"
        ):
            out.append(
                Diagnostic(
                    "R1",
                    ERROR,
                    f"{apath}/parent",
                    "the parent end of an identifying composition must carry"
                    f" cardinality 1..1, found {assoc.parent.render_card()}",
                )
            )
        if assoc.pea_attributes and assoc.parent.max_card != "1":
            out.append(
                Diagnostic(
                    "R2",
                    ERROR,
                    apath,
                    "association attributes require a degree-1:n association",
                )
            )
        for attr in assoc.pea_attributes:
            ppath = f"{apath}/attribute:{attr.name}"
            if attr.uid_index is not None:
                out.append(
                    Diagnostic(
                        "R4", ERROR, ppath, "UID stereotypes are not allowed on association attributes"
                    )
                )
            if attr.init_expr is not None and attr.data_type.base not in ("date", "dateTime"):
                out.append(
                    Diagnostic(
                        "R5",
                        ERROR,
                        ppath,
                        f"init=now() requires date or dateTime, not {attr.data_type.base}",
                    )
                )
            if attr.uppercase and attr.data_type.base not in STRING_FAMILY:
                out.append(
                    Diagnostic(
                        "R8",
                        WARNING,
                        ppath,
                        f"uppercase has no effect on type {attr.data_type.base}",
                    )
                )
    _check_naming(model, out)
    return out


def errors(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.severity == ERROR]

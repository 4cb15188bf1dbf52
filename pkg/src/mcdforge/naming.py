"""Deterministic naming conventions shared by the transform, conformance and emitters.

All generated object names derive from these few functions so that repeated
runs over the same model are byte-identical.
"""

JOURNAL_PREFIX = "JN_"


def default_abbrev(entity_name: str) -> str:
    """First three characters of the entity name, first letter capitalized.

    Examen -> Exa, Matiere -> Mat, Professeur -> Pro.
    """
    stem = entity_name[:3]
    return stem[:1].upper() + stem[1:]


def default_table_name(entity_name: str) -> str:
    """Entity name plus a plain trailing 's' (Examen -> Examens). No smarter
    pluralization: determinism beats grammar."""
    return entity_name + "s"


def fk_column_name(parent_abbrev: str, role: str, parent_pk_column: str) -> str:
    """<parentAbbrev>_<role>_<parentPkColumn>, e.g. Mat_evaluer_num."""
    return f"{parent_abbrev}_{role}_{parent_pk_column}"


def fk_constraint_name(child_table: str, role: str) -> str:
    return f"FK_{child_table}_{role}"


def pk_constraint_name(table: str) -> str:
    return f"PK_{table}"


def unique_constraint_name(uid_index: int, abbrev: str) -> str:
    """UID<i>_<abbrev>, e.g. UID1_Exa."""
    return f"UID{uid_index}_{abbrev}"


def pea_column_name(role: str, attribute_name: str) -> str:
    """<role><CapitalizedAttrName>, e.g. dirige + tempsPrevu -> dirigeTempsPrevu."""
    return role + attribute_name[:1].upper() + attribute_name[1:]


def journal_table_name(table_name: str) -> str:
    return JOURNAL_PREFIX + table_name


def trigger_name(abbrev: str, event_code: str) -> str:
    """<abbrev>_TAPIs_<BIR|BUR|BDR>. The mixed-case TAPIs spelling is canonical."""
    return f"{abbrev}_TAPIs_{event_code}"


def package_name(abbrev: str) -> str:
    return f"{abbrev}_TAPIS"


def sequence_name(table_name: str) -> str:
    return f"{table_name}_SQ"

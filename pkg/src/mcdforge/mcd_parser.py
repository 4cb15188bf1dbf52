"""Textual conceptual-model DSL: lexer, recursive-descent parser, serializer.

The grammar mirrors the modeling profile one token per formal specification:

    model       := "model" NAME stereo* "{" (entity | association)* "}"
    entity      := "entity" NAME stereo* ["abbrev" NAME] ["table" NAME]
                   "{" attribute* "}"
    attribute   := NAME ":" type stereo* ["init" "=" "now" "(" ")"] ["{" "frozen" "}"]
    type        := BASE ["(" INT ["," INT] ")"]
    association := "association" NAME stereo* "{"
                   "parent" NAME "[" card "]" ["role" NAME]
                   "child" NAME "[" card "]"
                   ["attrs" "{" attribute* "}"] "}"
    card        := ("0"|"1") ".." ("1"|"*")

Stereotypes accept guillemet («M») and ASCII (<<M>>) spellings; serialization
canonicalizes on guillemets, one declaration per line. Comments run from "--"
to end of line. Parse errors recover at declaration boundaries so a single run
reports every problem.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import naming
from .model_ir import (
    ERROR,
    INIT_NOW,
    MANY,
    STRING_FAMILY,
    W3C_BASES,
    Association,
    AssociationEnd,
    Attribute,
    ConceptualModel,
    Diagnostic,
    Entity,
    SourceSpan,
    W3CType,
    verify_conceptual,
)

MODEL_STEREOTYPES = ("journaled",)
ENTITY_STEREOTYPES = ("journaled",)
ASSOCIATION_STEREOTYPES = ("PK",)
ATTRIBUTE_STEREOTYPES = ("M", "uppercase")  # plus UID-<i>

_KEYWORDS = (
    "model",
    "entity",
    "association",
    "abbrev",
    "table",
    "parent",
    "child",
    "role",
    "attrs",
    "init",
)

_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "[": "LBRACK",
    "]": "RBRACK",
    "(": "LPAREN",
    ")": "RPAREN",
    ":": "COLON",
    ",": "COMMA",
    "=": "EQUALS",
    "*": "STAR",
}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | INT | STEREO | DOTDOT | punctuation kind | EOF | BAD
    text: str
    span: SourceSpan


class _Lexer:
    def __init__(self, source: str, file: str):
        self.source = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def _span(self, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(self.file, start_line, start_col, self.line, max(1, self.col - 1))

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos >= len(self.source):
                return
            if self.source[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        src = self.source
        while self.pos < len(src):
            c = src[self.pos]
            if c in " \t\r\n":
                self._advance()
                continue
            if src.startswith("--", self.pos):
                while self.pos < len(src) and src[self.pos] != "\n":
                    self._advance()
                continue
            line, col = self.line, self.col
            if src.startswith("..", self.pos):
                self._advance(2)
                out.append(Token("DOTDOT", "..", self._span(line, col)))
                continue
            if c == "«" or src.startswith("<<", self.pos):  # « or <<
                closer = "»" if c == "«" else ">>"
                self._advance(1 if c == "«" else 2)
                start = self.pos
                end = src.find(closer, start)
                nl = src.find("\n", start)
                if end == -1 or (nl != -1 and nl < end):
                    out.append(Token("BAD", src[start - 1 : start], self._span(line, col)))
                    continue
                text = src[start:end]
                self._advance(end - start + len(closer))
                out.append(Token("STEREO", text, self._span(line, col)))
                continue
            if c in _PUNCT:
                self._advance()
                out.append(Token(_PUNCT[c], c, self._span(line, col)))
                continue
            if c.isdigit():
                start = self.pos
                while self.pos < len(src) and src[self.pos].isdigit():
                    self._advance()
                out.append(Token("INT", src[start : self.pos], self._span(line, col)))
                continue
            if c.isalpha() or c == "_":
                start = self.pos
                while self.pos < len(src) and (src[self.pos].isalnum() or src[self.pos] == "_"):
                    self._advance()
                out.append(Token("IDENT", src[start : self.pos], self._span(line, col)))
                continue
            self._advance()
            out.append(Token("BAD", c, self._span(line, col)))
        eof_span = SourceSpan(self.file, self.line, self.col, self.line, self.col)
        out.append(Token("EOF", "", eof_span))
        return out


class _ParseAbort(Exception):
    """Internal signal: bail out of the current declaration and resynchronize."""


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token plumbing ----------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.current
        return tok.kind == kind and (text is None or tok.text == text)

    def error(self, code: str, message: str, span: SourceSpan | None = None) -> None:
        self.diagnostics.append(
            Diagnostic(code, ERROR, "source", message, span or self.current.span)
        )

    def abort(self, code: str, message: str) -> _ParseAbort:
        self.error(code, message)
        return _ParseAbort()

    def expect(self, kind: str, what: str) -> Token:
        if self.at(kind):
            return self.advance()
        raise self.abort("P001", f"expected {what}, found {self.current.text!r}")

    def expect_keyword(self, word: str) -> Token:
        if self.at("IDENT", word):
            return self.advance()
        raise self.abort("P001", f"expected keyword {word!r}, found {self.current.text!r}")

    def expect_name(self, what: str) -> Token:
        if self.at("IDENT") and self.current.text not in _KEYWORDS:
            return self.advance()
        raise self.abort("P001", f"expected {what} name, found {self.current.text!r}")

    def skip_to_declaration(self) -> None:
        """Resynchronize after an error: skip to the next top-level declaration
        keyword or to the closing brace of the model body."""
        depth = 0
        while not self.at("EOF"):
            if depth == 0 and self.at("IDENT") and self.current.text in ("entity", "association"):
                return
            if self.at("LBRACE"):
                depth += 1
            elif self.at("RBRACE"):
                if depth == 0:
                    return
                depth -= 1
            self.advance()

    # -- grammar -----------------------------------------------------------

    def parse_model(self) -> ConceptualModel | None:
        try:
            self.expect_keyword("model")
            name = self.expect_name("model").text
            journaled = self.parse_stereotypes("model", MODEL_STEREOTYPES)
            self.expect("LBRACE", "'{'")
        except _ParseAbort:
            return None
        entities: list[Entity] = []
        associations: list[Association] = []
        while not self.at("RBRACE") and not self.at("EOF"):
            try:
                if self.at("IDENT", "entity"):
                    entities.append(self.parse_entity())
                elif self.at("IDENT", "association"):
                    associations.append(self.parse_association())
                else:
                    raise self.abort(
                        "P001",
                        f"expected 'entity' or 'association', found {self.current.text!r}",
                    )
            except _ParseAbort:
                self.skip_to_declaration()
        if self.at("RBRACE"):
            self.advance()
        else:
            self.error("P001", "expected '}' closing the model body")
        model = ConceptualModel(
            name=name,
            entities=tuple(entities),
            associations=tuple(associations),
            journaled="journaled" in journaled,
        )
        for diag in verify_conceptual(model):
            code = "P004" if diag.rule_id in ("V001", "V002", "V004") else "P001"
            self.diagnostics.append(Diagnostic(code, ERROR, diag.path, diag.message))
        return model

    def parse_stereotypes(self, context: str, allowed: tuple[str, ...]) -> list[str]:
        found: list[str] = []
        while self.at("STEREO"):
            tok = self.advance()
            if tok.text in allowed:
                found.append(tok.text)
            else:
                self.error(
                    "P002",
                    f"stereotype «{tok.text}» not allowed on a {context}",
                    tok.span,
                )
        return found

    def parse_entity(self) -> Entity:
        self.expect_keyword("entity")
        name = self.expect_name("entity").text
        stereos = self.parse_stereotypes("entity", ENTITY_STEREOTYPES)
        abbrev = naming.default_abbrev(name)
        table_override: str | None = None
        if self.at("IDENT", "abbrev"):
            self.advance()
            abbrev = self.expect_name("abbrev").text
        if self.at("IDENT", "table"):
            self.advance()
            table_override = self.expect_name("table").text
        self.expect("LBRACE", "'{'")
        attributes = self.parse_attributes()
        self.expect("RBRACE", "'}'")
        return Entity(
            name=name,
            attributes=tuple(attributes),
            abbrev=abbrev,
            table_name_override=table_override,
            journaled="journaled" in stereos,
        )

    def parse_attributes(self) -> list[Attribute]:
        attributes: list[Attribute] = []
        while self.at("IDENT") and self.current.text not in _KEYWORDS:
            attributes.append(self.parse_attribute())
        return attributes

    def parse_attribute(self) -> Attribute:
        name = self.expect_name("attribute").text
        self.expect("COLON", "':'")
        data_type = self.parse_type()
        mandatory = False
        uppercase = False
        uid_index: int | None = None
        while self.at("STEREO"):
            tok = self.advance()
            if tok.text == "M":
                mandatory = True
            elif tok.text == "uppercase":
                uppercase = True
            elif tok.text.startswith("UID-") and tok.text[4:].isdigit() and int(tok.text[4:]) > 0:
                uid_index = int(tok.text[4:])
            else:
                self.error(
                    "P002",
                    f"stereotype «{tok.text}» not allowed on an attribute",
                    tok.span,
                )
        init_expr: str | None = None
        if self.at("IDENT", "init"):
            self.advance()
            self.expect("EQUALS", "'='")
            fn = self.expect("IDENT", "init expression")
            if fn.text != "now":
                raise self.abort("P001", f"unsupported init expression {fn.text!r}")
            self.expect("LPAREN", "'('")
            self.expect("RPAREN", "')'")
            init_expr = INIT_NOW
        frozen = False
        if self.at("LBRACE"):
            self.advance()
            flag = self.expect("IDENT", "constraint")
            if flag.text != "frozen":
                raise self.abort("P001", f"unknown constraint {{{flag.text}}}")
            self.expect("RBRACE", "'}'")
            frozen = True
        return Attribute(
            name=name,
            data_type=data_type,
            mandatory=mandatory,
            uid_index=uid_index,
            uppercase=uppercase,
            init_expr=init_expr,
            frozen=frozen,
        )

    def parse_type(self) -> W3CType:
        tok = self.expect("IDENT", "type")
        base = tok.text
        if base not in W3C_BASES:
            raise self.abort("P003", f"unknown type {base!r}")
        length = precision = scale = None
        if self.at("LPAREN"):
            self.advance()
            first = int(self.expect("INT", "number").text)
            second: int | None = None
            if self.at("COMMA"):
                self.advance()
                second = int(self.expect("INT", "number").text)
            self.expect("RPAREN", "')'")
            if base in STRING_FAMILY and second is None:
                length = first
            elif base == "decimal":
                precision, scale = first, (second if second is not None else 0)
            else:
                raise self.abort("P003", f"type {base} does not take parameters ({first})")
        return W3CType(base=base, length=length, precision=precision, scale=scale)

    def parse_cardinality(self, end_name: str) -> tuple[int, str]:
        self.expect("LBRACK", "'['")
        span = self.current.span
        if not self.at("INT"):
            raise self.abort("P005", "malformed cardinality: expected 0 or 1")
        lo_text = self.advance().text
        self.expect("DOTDOT", "'..'")
        if self.at("INT"):
            hi_text = self.advance().text
        elif self.at("STAR"):
            self.advance()
            hi_text = MANY
        else:
            raise self.abort("P005", "malformed cardinality: expected 1 or *")
        self.expect("RBRACK", "']'")
        valid = {("0", "1"), ("1", "1"), ("0", MANY), ("1", MANY)}
        if (lo_text, hi_text) not in valid:
            self.error(
                "P005",
                f"cardinality {lo_text}..{hi_text} must be one of 0..1, 1..1, 0..*, 1..*",
                span,
            )
            raise _ParseAbort()
        if end_name == "parent" and hi_text == MANY:
            self.error(
                "P005",
                "parent end must carry maximum cardinality 1 (degree 1:n)",
                span,
            )
            raise _ParseAbort()
        return int(lo_text), hi_text

    def parse_association(self) -> Association:
        self.expect_keyword("association")
        name = self.expect_name("association").text
        stereos = self.parse_stereotypes("association", ASSOCIATION_STEREOTYPES)
        self.expect("LBRACE", "'{'")
        self.expect_keyword("parent")
        parent_entity = self.expect_name("entity").text
        parent_min, parent_max = self.parse_cardinality("parent")
        role = parent_entity.lower()
        if self.at("IDENT", "role"):
            self.advance()
            role = self.expect_name("role").text
        self.expect_keyword("child")
        child_entity = self.expect_name("entity").text
        child_min, child_max = self.parse_cardinality("child")
        pea: list[Attribute] = []
        if self.at("IDENT", "attrs"):
            self.advance()
            self.expect("LBRACE", "'{'")
            pea = self.parse_attributes()
            self.expect("RBRACE", "'}'")
        self.expect("RBRACE", "'}'")
        return Association(
            name=name,
            parent=AssociationEnd(parent_entity, role, parent_min, parent_max),
            child=AssociationEnd(child_entity, child_entity.lower(), child_min, child_max),
            identifying="PK" in stereos,
            pea_attributes=tuple(pea),
        )


def parse(source: str, file: str = "<input>") -> tuple[ConceptualModel | None, list[Diagnostic]]:
    """Parse DSL text. Returns (model, []) on success or (None, diagnostics)
    listing every parse error found."""
    parser = _Parser(_Lexer(source, file).tokens())
    model = parser.parse_model()
    if parser.diagnostics:
        return None, parser.diagnostics
    return model, []


# ---------------------------------------------------------------------------
# Serialization


def _stereo(text: str) -> str:
    return f"«{text}»"


def _serialize_attribute(a: Attribute, indent: str) -> str:
    parts = [f"{indent}{a.name}: {a.data_type.render()}"]
    if a.uid_index is not None:
        parts.append(_stereo(f"UID-{a.uid_index}"))
    if a.mandatory:
        parts.append(_stereo("M"))
    if a.uppercase:
        parts.append(_stereo("uppercase"))
    if a.init_expr == INIT_NOW:
        parts.append("init=now()")
    if a.frozen:
        parts.append("{frozen}")
    return " ".join(parts)


def serialize(model: ConceptualModel) -> str:
    """Canonical text form: two-space indent, one declaration per line,
    guillemet stereotypes, roles always explicit. parse(serialize(m)) == m."""
    lines: list[str] = []
    head = f"model {model.name}"
    if model.journaled:
        head += f" {_stereo('journaled')}"
    lines.append(head + " {")
    for e in model.entities:
        decl = f"  entity {e.name}"
        if e.journaled:
            decl += f" {_stereo('journaled')}"
        if e.abbrev and e.abbrev != naming.default_abbrev(e.name):
            decl += f" abbrev {e.abbrev}"
        if e.table_name_override:
            decl += f" table {e.table_name_override}"
        lines.append(decl + " {")
        for a in e.attributes:
            lines.append(_serialize_attribute(a, "    "))
        lines.append("  }")
    for assoc in model.associations:
        decl = f"  association {assoc.name}"
        if assoc.identifying:
            decl += f" {_stereo('PK')}"
        lines.append(decl + " {")
        lines.append(
            f"    parent {assoc.parent.entity_name} [{assoc.parent.render_card()}]"
            f" role {assoc.parent.role}"
        )
        lines.append(f"    child {assoc.child.entity_name} [{assoc.child.render_card()}]")
        if assoc.pea_attributes:
            lines.append("    attrs {")
            for a in assoc.pea_attributes:
                lines.append(_serialize_attribute(a, "      "))
            lines.append("    }")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"

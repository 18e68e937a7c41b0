"""Reader and writer for the plain-text net/transition-system file format.

A document is a `.type LPN` (labelled Petri net) or `.type LTS` file made of
dot-keyword sections in any order; `/*..*/` and `//` comments are allowed
between any two tokens.  The writer emits a canonical form: parsing its
output yields a structurally identical model, and printing is idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .common import AptError, ParseError
from .lts import Lts
from .petri import OMEGA, Marking, PetriNet


@dataclass
class Document:
    kind: str  # "LPN" | "LTS"
    net: Optional[PetriNet] = None
    lts: Optional[Lts] = None
    state_markings: Optional[Dict[str, Marking]] = None

    @property
    def payload(self):
        return self.net if self.kind == "LPN" else self.lts


# ---------------------------------------------------------------------------
# Lexer.
# ---------------------------------------------------------------------------

_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "[": "LBRACK",
    "]": "RBRACK",
    ",": "COMMA",
    ":": "COLON",
    "*": "STAR",
    "=": "EQUALS",
}


@dataclass(frozen=True)
class _Token:
    kind: str  # SECTION ID NUM STR ARROW plus _PUNCT values and EOF
    value: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k: int = 1):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance()
            continue
        if text.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not text.startswith("*/", i):
                advance()
            if i >= n:
                raise ParseError("unterminated comment", start_line, start_col)
            advance(2)
            continue
        start_line, start_col = line, col
        if ch == ".":
            advance()
            j = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance()
            word = text[j:i]
            if not word:
                raise ParseError("lone '.'", start_line, start_col)
            tokens.append(_Token("SECTION", word, start_line, start_col))
            continue
        if ch == '"':
            advance()
            out = []
            while True:
                if i >= n:
                    raise ParseError("unterminated string", start_line, start_col)
                c = text[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise ParseError("dangling escape", line, col)
                    nxt = text[i + 1]
                    if nxt not in ('"', "\\"):
                        raise ParseError(f"unknown escape \\{nxt}", line, col)
                    out.append(nxt)
                    advance(2)
                    continue
                if c == '"':
                    advance()
                    break
                out.append(c)
                advance()
            tokens.append(_Token("STR", "".join(out), start_line, start_col))
            continue
        if text.startswith("->", i):
            advance(2)
            tokens.append(_Token("ARROW", "->", start_line, start_col))
            continue
        if ch in _PUNCT:
            advance()
            tokens.append(_Token(_PUNCT[ch], ch, start_line, start_col))
            continue
        if ch.isdigit():
            j = i
            while i < n and text[i].isdigit():
                advance()
            tokens.append(_Token("NUM", text[j:i], start_line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance()
            tokens.append(_Token("ID", text[j:i], start_line, start_col))
            continue
        raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.value!r}", tok.line, tok.column)
        return tok

    def fail(self, message: str, tok: Optional[_Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Document:
        sections: List[Tuple[_Token, List]] = []
        while self.peek().kind != "EOF":
            head = self.expect("SECTION")
            body_start = self.pos
            while self.peek().kind not in ("SECTION", "EOF"):
                self.next()
            sections.append((head, self.tokens[body_start : self.pos]))

        doc_type: Optional[str] = None
        type_tok = None
        for head, body in sections:
            if head.value == "type":
                if doc_type is not None:
                    self.fail("multiple .type sections", head)
                if len(body) != 1 or body[0].kind != "ID" or body[0].value not in ("LPN", "LTS"):
                    self.fail(".type must be LPN or LTS", head)
                doc_type = body[0].value
                type_tok = head
        if doc_type is None:
            self.fail("missing .type section", self.tokens[0] if self.tokens else None)

        seen: Dict[str, _Token] = {}
        for head, _ in sections:
            if head.value == "type":
                continue
            if head.value in seen:
                self.fail(f"duplicate .{head.value} section", head)
            seen[head.value] = head

        if doc_type == "LPN":
            return self._build_net(sections)
        return self._build_lts(sections)

    # -- shared helpers -----------------------------------------------------

    def _string_section(self, body: List[_Token], head: _Token) -> str:
        if len(body) != 1 or body[0].kind != "STR":
            self.fail(f".{head.value} takes one quoted string", head)
        return body[0].value

    def _ids_with_attrs(self, body: List[_Token], head: _Token):
        """Parse `id [attr, attr=...]...` lists; returns [(token, attrs)]."""
        out = []
        k = 0
        while k < len(body):
            tok = body[k]
            if tok.kind != "ID":
                self.fail(f"expected an identifier in .{head.value}", tok)
            k += 1
            attrs: List[Tuple[_Token, Optional[_Token]]] = []
            if k < len(body) and body[k].kind == "LBRACK":
                k += 1
                while True:
                    if k >= len(body):
                        self.fail("unterminated attribute list", tok)
                    name = body[k]
                    if name.kind != "ID":
                        self.fail("expected an attribute name", name)
                    k += 1
                    value = None
                    if k < len(body) and body[k].kind == "EQUALS":
                        k += 1
                        if k >= len(body) or body[k].kind not in ("STR", "NUM", "ID"):
                            self.fail("expected an attribute value", name)
                        value = body[k]
                        k += 1
                    attrs.append((name, value))
                    if k < len(body) and body[k].kind == "COMMA":
                        k += 1
                        continue
                    if k < len(body) and body[k].kind == "RBRACK":
                        k += 1
                        break
                    self.fail("expected ',' or ']' in attribute list", name)
            out.append((tok, attrs))
        return out

    def _multiset(self, body: List[_Token], k: int, head: _Token):
        """Parse a `{ [n *] id, ... }` multiset starting at body[k]."""
        if k >= len(body) or body[k].kind != "LBRACE":
            self.fail("expected '{'", body[k] if k < len(body) else head)
        k += 1
        counts: Dict[str, int] = {}
        order: List[str] = []
        if k < len(body) and body[k].kind == "RBRACE":
            return counts, order, k + 1
        while True:
            mult = 1
            if k < len(body) and body[k].kind == "NUM":
                mult = int(body[k].value)
                if mult == 0:
                    self.fail("zero multiplicity", body[k])
                k += 1
                if k >= len(body) or body[k].kind != "STAR":
                    self.fail("expected '*' after a multiplicity", body[k - 1])
                k += 1
            if k >= len(body) or body[k].kind != "ID":
                self.fail("expected a place name", body[k] if k < len(body) else head)
            name = body[k].value
            if name not in counts:
                counts[name] = 0
                order.append(name)
            counts[name] += mult
            k += 1
            if k < len(body) and body[k].kind == "COMMA":
                k += 1
                continue
            if k < len(body) and body[k].kind == "RBRACE":
                return counts, order, k + 1
            self.fail("expected ',' or '}' in multiset", body[k] if k < len(body) else head)

    # -- LPN ----------------------------------------------------------------

    def _build_net(self, sections) -> Document:
        net = PetriNet()
        place_toks: List[_Token] = []
        transition_entries = []
        flow_sections = []
        marking_section = None
        for head, body in sections:
            if head.value == "type":
                continue
            elif head.value == "name":
                net.name = self._string_section(body, head)
            elif head.value == "description":
                net.description = self._string_section(body, head)
            elif head.value == "places":
                for tok, attrs in self._ids_with_attrs(body, head):
                    if attrs:
                        self.fail("places take no attributes", tok)
                    place_toks.append(tok)
            elif head.value == "transitions":
                transition_entries = self._ids_with_attrs(body, head)
            elif head.value == "flows":
                flow_sections.append((head, body))
            elif head.value == "initial_marking":
                marking_section = (head, body)
            else:
                self.fail(f"unknown section .{head.value} in an LPN file", head)

        for tok in place_toks:
            try:
                net.add_place(tok.value)
            except AptError as err:
                raise ParseError(str(err), tok.line, tok.column) from None
        for tok, attrs in transition_entries:
            label = None
            for name, value in attrs:
                if name.value != "label" or value is None or value.kind != "STR":
                    self.fail("transitions only take label=\"...\"", name)
                label = value.value
            try:
                net.add_transition(tok.value, label=label)
            except AptError as err:
                raise ParseError(str(err), tok.line, tok.column) from None

        defined = set()
        for head, body in flow_sections:
            k = 0
            while k < len(body):
                tok = body[k]
                if tok.kind != "ID":
                    self.fail("expected a transition name", tok)
                t = tok.value
                if t not in net.transitions:
                    self.fail(f"unknown transition {t!r}", tok)
                if t in defined:
                    self.fail(f"duplicate flow definition for {t!r}", tok)
                defined.add(t)
                k += 1
                if k >= len(body) or body[k].kind != "COLON":
                    self.fail("expected ':'", tok)
                k += 1
                pre, pre_order, k = self._multiset(body, k, head)
                if k >= len(body) or body[k].kind != "ARROW":
                    self.fail("expected '->'", tok)
                k += 1
                post, post_order, k = self._multiset(body, k, head)
                for name in pre_order:
                    if name not in net.places:
                        self.fail(f"unknown place {name!r}", tok)
                    net.add_flow(name, t, pre[name])
                for name in post_order:
                    if name not in net.places:
                        self.fail(f"unknown place {name!r}", tok)
                    net.add_flow(t, name, post[name])

        if marking_section is not None:
            head, body = marking_section
            counts, order, k = self._multiset(body, 0, head)
            if k != len(body):
                self.fail("trailing tokens after the initial marking", body[k])
            for name in order:
                if name not in net.places:
                    self.fail(f"unknown place {name!r} in the initial marking", head)
                net.set_tokens(name, counts[name])
        return Document(kind="LPN", net=net)

    # -- LTS ----------------------------------------------------------------

    def _build_lts(self, sections) -> Document:
        lts = Lts()
        state_entries = []
        label_entries = []
        arc_sections = []
        for head, body in sections:
            if head.value == "type":
                continue
            elif head.value == "name":
                lts.name = self._string_section(body, head)
            elif head.value == "description":
                lts.description = self._string_section(body, head)
            elif head.value == "states":
                state_entries = self._ids_with_attrs(body, head)
            elif head.value == "labels":
                label_entries = self._ids_with_attrs(body, head)
            elif head.value == "arcs":
                arc_sections.append((head, body))
            else:
                self.fail(f"unknown section .{head.value} in an LTS file", head)

        initial_seen = None
        for tok, attrs in state_entries:
            initial = False
            for name, value in attrs:
                if name.value != "initial" or value is not None:
                    self.fail("states only take the bare attribute 'initial'", name)
                initial = True
            if initial:
                if initial_seen is not None:
                    self.fail(f"second [initial] state (first was {initial_seen!r})", tok)
                initial_seen = tok.value
            try:
                lts.add_state(tok.value, initial=initial)
            except AptError as err:
                raise ParseError(str(err), tok.line, tok.column) from None
        if initial_seen is None:
            self.fail("no state is marked [initial]", sections[0][0])

        for tok, attrs in label_entries:
            location = None
            for name, value in attrs:
                if name.value != "location" or value is None or value.kind != "STR":
                    self.fail("labels only take location=\"...\"", name)
                location = value.value
            try:
                lts.add_label(tok.value, location=location)
            except AptError as err:
                raise ParseError(str(err), tok.line, tok.column) from None

        for head, body in arc_sections:
            if len(body) % 3 != 0:
                self.fail(".arcs needs 'source label target' triples", head)
            for k in range(0, len(body), 3):
                src, lab, tgt = body[k : k + 3]
                for tok in (src, lab, tgt):
                    if tok.kind != "ID":
                        self.fail("expected an identifier in .arcs", tok)
                try:
                    lts.add_arc(src.value, lab.value, tgt.value)
                except AptError as err:
                    raise ParseError(str(err), src.line, src.column) from None
        return Document(kind="LTS", lts=lts)


def parse(text: str) -> Document:
    """Parse a document; all errors carry a line/column position."""
    return _Parser(text).parse()


def parse_net(text: str) -> PetriNet:
    doc = parse(text)
    if doc.kind != "LPN":
        raise AptError("expected an LPN document")
    return doc.net


def parse_lts(text: str) -> Lts:
    doc = parse(text)
    if doc.kind != "LTS":
        raise AptError("expected an LTS document")
    return doc.lts


# ---------------------------------------------------------------------------
# Writer.
# ---------------------------------------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _multiset_text(counts: List[Tuple[str, int]]) -> str:
    parts = []
    for name, count in counts:
        if count == 1:
            parts.append(name)
        elif count > 1:
            parts.append(f"{count} * {name}")
    return "{ " + ", ".join(parts) + " }" if parts else "{ }"


def _marking_comment(marking: Marking) -> str:
    inner = " ".join(
        f"[{p}:{'OMEGA' if c is OMEGA else c}]" for p, c in marking.items()
    )
    return f"/* [ {inner} ] */"


def render(doc: Document) -> str:
    """Canonical text form; `parse(render(d))` is structurally identical to
    `d` and rendering is idempotent."""
    if doc.kind == "LPN":
        return _render_net(doc.net)
    return _render_lts(doc.lts, doc.state_markings)


def _render_net(net: PetriNet) -> str:
    lines = [f".name {_quote(net.name)}"]
    if net.description:
        lines.append(f".description {_quote(net.description)}")
    lines.append(".type LPN")
    lines.append(".places")
    if net.places:
        lines.append(" ".join(net.places))
    lines.append(".transitions")
    if net.transitions:
        entries = []
        for t in net.transitions:
            label = net.label(t)
            entries.append(t if label == t else f'{t}[label={_quote(label)}]')
        lines.append(" ".join(entries))
    lines.append(".flows")
    for t in net.transitions:
        pre = [(p, net.flow(p, t)) for p in net.places if net.flow(p, t)]
        post = [(p, net.flow(t, p)) for p in net.places if net.flow(t, p)]
        if pre or post:
            lines.append(f"{t}: {_multiset_text(pre)} -> {_multiset_text(post)}")
    marking = [(p, c) for p, c in net.initial_marking().items() if c]
    lines.append(f".initial_marking {_multiset_text(marking)}")
    return "\n".join(lines) + "\n"


def _render_lts(lts: Lts, markings: Optional[Dict[str, Marking]] = None) -> str:
    lines = [f".name {_quote(lts.name)}"]
    if lts.description:
        lines.append(f".description {_quote(lts.description)}")
    lines.append(".type LTS")
    lines.append(".states")
    for s in lts.states:
        entry = f"{s}[initial]" if s == lts.initial else s
        if markings and s in markings:
            entry = f"{entry} {_marking_comment(markings[s])}"
        lines.append(entry)
    lines.append(".labels")
    if lts.labels:
        entries = []
        for t in lts.labels:
            location = lts.location(t)
            entries.append(t if location is None else f'{t}[location={_quote(location)}]')
        lines.append(" ".join(entries))
    lines.append(".arcs")
    for arc in lts.arcs:
        lines.append(f"{arc.source} {arc.label} {arc.target}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT export.
# ---------------------------------------------------------------------------


def to_dot(doc: Document) -> str:
    """GraphViz rendering: states/places as circles, transitions as boxes."""
    if doc.kind == "LTS":
        lts = doc.lts
        lines = ["digraph lts {", "  node [shape=circle];"]
        for s in lts.states:
            shape = ' [style=bold]' if s == lts.initial else ""
            lines.append(f'  "{s}"{shape};')
        for arc in lts.arcs:
            lines.append(f'  "{arc.source}" -> "{arc.target}" [label="{arc.label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    net = doc.net
    lines = ["digraph net {"]
    marking = net.initial_marking()
    for p in net.places:
        tokens = marking.get(p)
        label = f"{p}\\n{tokens}" if tokens else p
        lines.append(f'  "{p}" [shape=circle, label="{label}"];')
    for t in net.transitions:
        lines.append(f'  "{t}" [shape=box];')
    for (src, tgt), w in net.flows.items():
        suffix = f' [label="{w}"]' if w > 1 else ""
        lines.append(f'  "{src}" -> "{tgt}"{suffix};')
    lines.append("}")
    return "\n".join(lines) + "\n"

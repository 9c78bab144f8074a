"""Input documents: declarations plus relations, in plain ASCII.

A document is a sequence of statements separated by newlines or ';'.
Directive statements declare the setting, relation statements the system:

    mode: algebraic                # optional, inferred from declarations
    vars: a < b < c < x            # algebraic ranking, ascending
    a*x^2 + b*x + c = 0

    mode: differential
    derivations: x, t
    functions: eta, zeta           # first declared ranks highest on ties
    ranking: orderly               # or: elimination (blocks = functions)
    scan: t, x                     # optional Janet scan order
    u[0,1] + u[0,0]*u[1,0] = 0     # jets as name[i1,...,in]; bare name = 0-jet

Relations accept "p = q", "p <> q" and "p != q"; the right side is moved
to the left.  '#' starts a comment.  Errors carry line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .differential import DiffRanking
from .poly import ContractViolation, Poly, Ranking, Relation

_TOKEN = re.compile(r"""
    (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><>|!=|[-+*^()\[\],=<:/])
  | (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<sep>[;\n])
""", re.VERBOSE)

_DIRECTIVES = ("mode", "vars", "derivations", "functions", "ranking", "scan")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int,
                 expected: Optional[str] = None):
        self.line = line
        self.col = col
        self.expected = expected
        tail = f" (expected {expected})" if expected else ""
        super().__init__(f"line {line}, column {col}: {message}{tail}")


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class InputDocument:
    mode: str
    ranking: object
    relations: Tuple[Relation, ...]

    def declarations(self) -> Dict[str, str]:
        """Directive lines that reproduce this document's header."""
        out = {"mode": self.mode}
        if self.mode == "algebraic":
            out["vars"] = " < ".join(self.ranking.names)
        else:
            rk = self.ranking
            out["derivations"] = ", ".join(rk.derivations)
            out["functions"] = ", ".join(rk.functions)
            out["ranking"] = rk.kind
            if rk.scan_order != tuple(range(rk.n)):
                out["scan"] = ", ".join(rk.derivations[l] for l in rk.scan_order)
        return out


def _tokenize(text: str) -> List[List[Token]]:
    """Token stream grouped into statements; ';' and newlines separate."""
    statements: List[List[Token]] = [[]]
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "sep":
            if statements[-1]:
                statements.append([])
            if tok == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        else:
            if kind in ("num", "name", "op"):
                statements[-1].append(Token(kind, tok, line, col))
            col += len(tok)
        pos = m.end()
    if not statements[-1]:
        statements.pop()
    return statements


class _Parser:
    """Recursive descent over one relation statement."""

    def __init__(self, tokens: List[Token], ranking, mode: str):
        self.tokens = tokens
        self.i = 0
        self.ranking = ranking
        self.mode = mode

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1]
            raise ParseError("statement ended unexpectedly", last.line,
                             last.col + len(last.text))
        self.i += 1
        return tok

    def expect_op(self, text: str) -> Token:
        tok = self.take()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"found {tok.text!r}", tok.line, tok.col,
                             expected=repr(text))
        return tok

    def fail(self, tok: Optional[Token], expected: str):
        if tok is None:
            last = self.tokens[-1]
            raise ParseError("statement ended unexpectedly", last.line,
                             last.col + len(last.text), expected=expected)
        raise ParseError(f"found {tok.text!r}", tok.line, tok.col, expected)

    # expr := ('-')? term (('+'|'-') term)*
    def expr(self) -> Poly:
        tok = self.peek()
        negate = False
        if tok and tok.kind == "op" and tok.text == "-":
            self.take()
            negate = True
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            tok = self.peek()
            if tok and tok.kind == "op" and tok.text in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if tok.text == "+" else acc - rhs
            else:
                return acc

    # term := factor ('*'? factor)*
    def term(self) -> Poly:
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok and tok.kind == "op" and tok.text == "*":
                self.take()
                acc = acc * self.factor()
            elif tok and (tok.kind in ("num", "name")
                          or (tok.kind == "op" and tok.text == "(")):
                acc = acc * self.factor()
            else:
                return acc

    # factor := base ('^' nat)?
    def factor(self) -> Poly:
        base = self.base()
        tok = self.peek()
        if tok and tok.kind == "op" and tok.text == "^":
            self.take()
            e = self.take()
            if e.kind != "num":
                self.fail(e, "a non-negative integer exponent")
            return base ** int(e.text)
        return base

    # base := number ('/' number)? | jet-or-var | '(' expr ')'
    def base(self) -> Poly:
        tok = self.take()
        if tok.kind == "num":
            nxt = self.peek()
            if nxt and nxt.kind == "op" and nxt.text == "/":
                self.take()
                den = self.take()
                if den.kind != "num" or int(den.text) == 0:
                    self.fail(den, "a nonzero integer denominator")
                return Poly.constant(Fraction(int(tok.text), int(den.text)),
                                     self.ranking)
            return Poly.constant(int(tok.text), self.ranking)
        if tok.kind == "name":
            return self.variable(tok)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        self.fail(tok, "a number, a variable or '('")

    def variable(self, tok: Token) -> Poly:
        name = tok.text
        nxt = self.peek()
        if nxt and nxt.kind == "op" and nxt.text == "[":
            if self.mode != "differential":
                raise ParseError("jet notation needs differential mode",
                                 nxt.line, nxt.col)
            self.take()
            idx = []
            while True:
                e = self.take()
                if e.kind != "num":
                    self.fail(e, "a derivation count")
                idx.append(int(e.text))
                sep = self.take()
                if sep.kind == "op" and sep.text == "]":
                    break
                if not (sep.kind == "op" and sep.text == ","):
                    self.fail(sep, "',' or ']'")
            if len(idx) != self.ranking.n:
                raise ParseError(
                    f"jet {name}{idx} needs {self.ranking.n} indices",
                    tok.line, tok.col)
            name = "%s[%s]" % (name, ",".join(str(e) for e in idx))
        try:
            key = self.ranking.key(name)
        except ContractViolation as bad:
            raise ParseError(str(bad), tok.line, tok.col) from None
        return Poly.from_var_key(key, self.ranking)

    def relation(self) -> Relation:
        lhs = self.expr()
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text not in ("=", "<>", "!="):
            self.fail(tok, "'=', '<>' or '!='")
        self.take()
        rhs = self.expr()
        leftover = self.peek()
        if leftover is not None:
            self.fail(leftover, "end of relation")
        return Relation(lhs - rhs, tok.text == "=")


def _names(tokens: List[Token], what: str) -> List[str]:
    """NAME (',' NAME)* with '<' also accepted as a separator."""
    names = []
    expect_name = True
    for tok in tokens:
        if expect_name:
            if tok.kind != "name":
                raise ParseError(f"found {tok.text!r} in {what} list",
                                 tok.line, tok.col, expected="a name")
            names.append(tok.text)
            expect_name = False
        else:
            if tok.kind != "op" or tok.text not in (",", "<"):
                raise ParseError(f"found {tok.text!r} in {what} list",
                                 tok.line, tok.col, expected="',' or '<'")
            expect_name = True
    if expect_name:
        last = tokens[-1] if tokens else None
        raise ParseError(f"{what} list ends with a separator",
                         last.line if last else 1,
                         last.col if last else 1, expected="a name")
    return names


def parse(text: str) -> InputDocument:
    """Parse a document; raises ParseError with line/column on bad input."""
    statements = _tokenize(text)
    directives: Dict[str, Tuple[Token, List[Token]]] = {}
    relation_stmts: List[List[Token]] = []
    for stmt in statements:
        if (len(stmt) >= 2 and stmt[0].kind == "name"
                and stmt[0].text in _DIRECTIVES
                and stmt[1].kind == "op" and stmt[1].text == ":"):
            head = stmt[0]
            if head.text in directives:
                raise ParseError(f"duplicate directive {head.text!r}",
                                 head.line, head.col)
            if len(stmt) == 2:
                raise ParseError(f"empty directive {head.text!r}",
                                 head.line, head.col)
            directives[head.text] = (head, stmt[2:])
        else:
            relation_stmts.append(stmt)

    def word(key: str, allowed: Tuple[str, ...]) -> Optional[str]:
        got = directives.get(key)
        if got is None:
            return None
        head, toks = got
        if len(toks) != 1 or toks[0].kind != "name" or toks[0].text not in allowed:
            raise ParseError(f"bad {key!r} directive", head.line, head.col,
                             expected=" or ".join(allowed))
        return toks[0].text

    mode = word("mode", ("algebraic", "differential"))
    if mode is None:
        mode = "differential" if ("derivations" in directives
                                  or "functions" in directives) else "algebraic"

    if mode == "algebraic":
        for key in ("derivations", "functions", "ranking", "scan"):
            if key in directives:
                head = directives[key][0]
                raise ParseError(f"{key!r} needs differential mode",
                                 head.line, head.col)
        if "vars" not in directives:
            raise ParseError("algebraic input needs a 'vars:' directive", 1, 1)
        head, toks = directives["vars"]
        try:
            ranking = Ranking(_names(toks, "vars"))
        except ContractViolation as bad:
            raise ParseError(str(bad), head.line, head.col) from None
    else:
        if "vars" in directives:
            head = directives["vars"][0]
            raise ParseError("'vars' is for algebraic mode; declare "
                             "'functions' and 'derivations'", head.line, head.col)
        for key in ("derivations", "functions"):
            if key not in directives:
                raise ParseError(f"differential input needs a {key!r} directive",
                                 1, 1)
        derivs = _names(directives["derivations"][1], "derivations")
        funcs = _names(directives["functions"][1], "functions")
        kind = word("ranking", ("orderly", "elimination")) or "orderly"
        scan = None
        if "scan" in directives:
            scan = _names(directives["scan"][1], "scan")
        head = directives["functions"][0]
        try:
            ranking = DiffRanking(funcs, derivs, kind=kind, scan=scan)
        except ContractViolation as bad:
            raise ParseError(str(bad), head.line, head.col) from None

    relations = []
    for stmt in relation_stmts:
        relations.append(_Parser(stmt, ranking, mode).relation())
    return InputDocument(mode=mode, ranking=ranking,
                         relations=tuple(relations))

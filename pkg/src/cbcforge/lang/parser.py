"""Tokenizer and recursive-descent parser for the canonical concrete syntax.

One grammar serves every textual surface: expressions, predicates, and the
statement language of block instantiation scripts. Script formats (.cbc,
.trait, .tc) reuse the token stream exposed here.

Expression grammar, loosest first:

    pred    := 'forall' ID 'in' domain ':' pred
             | 'exists' ID 'in' domain ':' pred
             | or ('==>' pred)?                      (right associative)
    or      := and ('||' and)*
    and     := cmp ('&&' cmp)*
    cmp     := sum (('=='|'!='|'<'|'<='|'>'|'>=') sum)?
    sum     := term (('+'|'-') term)*
    term    := unary (('*'|'div') unary)*
    unary   := ('!'|'-') unary | postfix
    postfix := primary ('.' ID '(' args ')')*
    primary := INT | 'true' | 'false' | 'result' | 'old' '(' ID ')'
             | ID | ID '(' args ')' | 'new' ID '(' args ')'
             | 'if' '(' pred ')' '{' pred '}' ('elseif' ...)* 'else' '{' pred '}'
             | '[' args ']' | '(' pred ')'
    domain  := '[' INT ',' INT ']' | 'elems' '(' expr ')' | 'indices' '(' expr ')'

`==>`, `forall`, and `exists` are only legal where a predicate is expected;
`size/get/contains/element/tail` always denote the built-in sequence
operations; any other `recv.m(...)` or bare `m(...)` is a trait-language
method call (bare calls receive `this`).
"""

from __future__ import annotations

from .ast import (
    Abstract,
    AllInts,
    Assign,
    Atom,
    AndP,
    Binary,
    BlockRef,
    BoolLit,
    BoundedDomain,
    Call,
    Exists,
    Expr,
    FalseP,
    Forall,
    IfE,
    Implies,
    IntLit,
    IntRange,
    KERNEL_TYPES,
    LocalDecl,
    MethodCallStmt,
    New,
    Not,
    NotP,
    Old,
    OrP,
    Predicate,
    Repeat,
    Result,
    Select,
    SeqElems,
    SeqIndices,
    SeqLit,
    SeqOp,
    SeqStmt,
    Skip,
    Statement,
    TrueP,
    Var,
)
from .ast import SEQ_OPS


class ParseError(Exception):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


_PUNCT = [
    "==>",
    ":=",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "&",
    "||",
    "->",
    "(",
    ")",
    "[",
    "]",
    "{",
    "}",
    ",",
    ";",
    ":",
    ".",
    "+",
    "-",
    "*",
    "<",
    ">",
    "!",
    "=",
    "@",
]

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789'")


class Token:
    __slots__ = ("kind", "text", "line")

    def __init__(self, kind: str, text: str, line: int):
        self.kind = kind  # 'int' | 'ident' | 'punct' | 'eof'
        self.text = text
        self.line = line

    def __repr__(self):
        return "Token(%s, %r)" % (self.kind, self.text)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    i, n, line = 0, len(text), 1
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            continue
        if text.startswith("//", i) or c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ParseError("unterminated comment", line)
            line += text.count("\n", i, end)
            i = end + 2
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(Token("int", text[i:j], line))
            i = j
            continue
        if c in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            out.append(Token("ident", text[i:j], line))
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                out.append(Token("punct", p, line))
                i += len(p)
                break
        else:
            raise ParseError("stray character %r" % c, line)
    out.append(Token("eof", "", line))
    return out


class TokenStream:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str, ahead: int = 0) -> bool:
        return self.peek(ahead).text == text and self.peek(ahead).kind != "eof"

    def atIdent(self, ahead: int = 0) -> bool:
        return self.peek(ahead).kind == "ident"

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise ParseError("expected %r, found %r" % (text, tok.text or "end of input"), tok.line)
        return self.next()

    def expectIdent(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError("expected %s, found %r" % (what, tok.text or "end of input"), tok.line)
        return self.next().text

    def expectEof(self):
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError("trailing input starting at %r" % tok.text, tok.line)


_KEYWORDS = {
    "true",
    "false",
    "old",
    "new",
    "forall",
    "exists",
    "in",
    "if",
    "elseif",
    "else",
    "div",
    "skip",
    "while",
    "select",
    "block",
}


# ---------------------------------------------------------------------------
# Expressions and predicates
#
# The parser builds predicates where predicate syntax appears and converts
# to a plain Expr on demand; `asExpr` rejects quantifiers and implications.


def parsePred(ts: TokenStream) -> Predicate:
    tok = ts.peek()
    if tok.text in ("forall", "exists") and tok.kind == "ident":
        kind = ts.next().text
        var = ts.expectIdent("quantified variable")
        if ts.at("in"):
            ts.next()
            dom = parseDomain(ts)
        else:
            # trait form `forall Num n: P`: the first ident was the type
            if var != "Num":
                raise ParseError(
                    "only Num-typed quantification is supported, not %r" % var, tok.line
                )
            var = ts.expectIdent("quantified variable")
            dom = AllInts()
        ts.expect(":")
        body = parsePred(ts)
        return (Forall if kind == "forall" else Exists)(var, dom, body)
    lhs = _parseOr(ts)
    if ts.accept("==>"):
        rhs = parsePred(ts)
        return Implies(lhs, rhs)
    return lhs


def parseDomain(ts: TokenStream) -> BoundedDomain:
    if ts.accept("["):
        lo = _parseSignedInt(ts)
        ts.expect(",")
        hi = _parseSignedInt(ts)
        ts.expect("]")
        tok = ts.peek()
        try:
            return IntRange(lo, hi)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line)
    if ts.at("elems"):
        ts.next()
        ts.expect("(")
        seq = asExpr(parsePred(ts), ts)
        ts.expect(")")
        return SeqElems(seq)
    if ts.at("indices"):
        ts.next()
        ts.expect("(")
        seq = asExpr(parsePred(ts), ts)
        ts.expect(")")
        return SeqIndices(seq)
    tok = ts.peek()
    raise ParseError("expected a quantifier domain", tok.line)


def _parseSignedInt(ts: TokenStream) -> int:
    neg = ts.accept("-")
    tok = ts.peek()
    if tok.kind != "int":
        raise ParseError("expected an integer bound", tok.line)
    ts.next()
    value = int(tok.text)
    return -value if neg else value


def _parseOr(ts: TokenStream) -> Predicate:
    items = [_parseAnd(ts)]
    while ts.at("||"):
        ts.next()
        items.append(_parseAnd(ts))
    if len(items) == 1:
        return items[0]
    return OrP(tuple(items))


def _parseAnd(ts: TokenStream) -> Predicate:
    # `&` is the trait-specification spelling of `&&`
    items = [_parseCmpPred(ts)]
    while ts.at("&&") or ts.at("&"):
        ts.next()
        items.append(_parseCmpPred(ts))
    if len(items) == 1:
        return items[0]
    return AndP(tuple(items))


_CMP = ("==", "!=", "<", "<=", ">", ">=")


_EXPR_CONTINUATION = {".", "+", "-", "*", "div", "==", "!=", "<", "<=", ">", ">="}


def _parseCmpPred(ts: TokenStream) -> Predicate:
    if ts.at("!"):
        ts.next()
        return NotP(_parseCmpPred(ts))
    if ts.at("("):
        # A parenthesized quantifier or implication stays a predicate unless
        # expression syntax continues after the closing paren.
        save = ts.pos
        ts.next()
        inner = parsePred(ts)
        ts.expect(")")
        if isinstance(inner, (Forall, Exists, Implies)) and not ts.peek().text in _EXPR_CONTINUATION:
            return inner
        ts.pos = save
    lhs = _parseSum(ts)
    for op in _CMP:
        if ts.at(op):
            ts.next()
            rhs = _parseSum(ts)
            return Atom(Binary(op, lhs, rhs))
    # A bare expression in predicate position.
    if isinstance(lhs, BoolLit):
        return TrueP() if lhs.value else FalseP()
    return Atom(lhs)


def _parseSum(ts: TokenStream) -> Expr:
    lhs = _parseTerm(ts)
    while ts.at("+") or ts.at("-"):
        op = ts.next().text
        lhs = Binary(op, lhs, _parseTerm(ts))
    return lhs


def _parseTerm(ts: TokenStream) -> Expr:
    lhs = _parseUnary(ts)
    while ts.at("*") or ts.at("div"):
        op = ts.next().text
        lhs = Binary(op, lhs, _parseUnary(ts))
    return lhs


def _parseUnary(ts: TokenStream) -> Expr:
    if ts.at("-"):
        ts.next()
        inner = _parseUnary(ts)
        if isinstance(inner, IntLit):
            return IntLit(-inner.value)
        return Binary("-", IntLit(0), inner)
    if ts.at("!"):
        ts.next()
        return Not(_parseUnary(ts))
    return _parsePostfix(ts)


def _parsePostfix(ts: TokenStream) -> Expr:
    e = _parsePrimary(ts)
    while ts.at("."):
        ts.next()
        name = ts.expectIdent("method name")
        ts.expect("(")
        args = _parseArgs(ts)
        ts.expect(")")
        e = _makeCall(e, name, args, ts)
    return e


def _makeCall(recv: Expr, name: str, args: list[Expr], ts: TokenStream) -> Expr:
    tok = ts.peek()
    if name in SEQ_OPS:
        if name in ("get", "contains"):
            if len(args) != 1:
                raise ParseError("%s takes exactly one argument" % name, tok.line)
            return SeqOp(name, recv, args[0])
        if args:
            raise ParseError("%s takes no arguments" % name, tok.line)
        return SeqOp(name, recv)
    return Call(recv, name, tuple(args))


def _parseArgs(ts: TokenStream) -> list[Expr]:
    args: list[Expr] = []
    if ts.at(")") or ts.at("]"):
        return args
    args.append(asExpr(parsePred(ts), ts))
    while ts.accept(","):
        args.append(asExpr(parsePred(ts), ts))
    return args


def _parsePrimary(ts: TokenStream) -> Expr:
    tok = ts.peek()
    if tok.kind == "int":
        ts.next()
        return IntLit(int(tok.text))
    if ts.accept("("):
        inner = parsePred(ts)
        ts.expect(")")
        return _predAsOperand(inner, tok)
    if ts.accept("["):
        elems = _parseArgs(ts)
        ts.expect("]")
        return SeqLit(tuple(elems))
    if tok.kind != "ident":
        raise ParseError("expected an expression, found %r" % (tok.text or "end of input"), tok.line)
    if tok.text == "true":
        ts.next()
        return BoolLit(True)
    if tok.text == "false":
        ts.next()
        return BoolLit(False)
    if tok.text == "result":
        ts.next()
        return Result()
    if tok.text == "old":
        ts.next()
        ts.expect("(")
        name = ts.expectIdent("variable inside old(...)")
        ts.expect(")")
        return Old(Var(name))
    if tok.text == "new":
        ts.next()
        cls = ts.expectIdent("class name")
        ts.expect("(")
        args = _parseArgs(ts)
        ts.expect(")")
        return New(cls, tuple(args))
    if tok.text == "if":
        return _parseIfExpr(ts)
    name = ts.next().text
    if name in _KEYWORDS:
        raise ParseError("keyword %r cannot start an expression" % name, tok.line)
    if ts.at("("):
        ts.next()
        args = _parseArgs(ts)
        ts.expect(")")
        return _makeCall(Var("this"), name, args, ts)
    return Var(name)


def _parseIfExpr(ts: TokenStream) -> Expr:
    ts.expect("if")
    ts.expect("(")
    cond = asExpr(parsePred(ts), ts)
    ts.expect(")")
    ts.expect("{")
    then = asExpr(parsePred(ts), ts)
    ts.expect("}")
    branches = [(cond, then)]
    while ts.at("elseif") or (ts.at("else") and ts.at("if", 1)):
        if ts.at("elseif"):
            ts.next()
        else:
            ts.next()
            ts.next()
        ts.expect("(")
        c = asExpr(parsePred(ts), ts)
        ts.expect(")")
        ts.expect("{")
        t = asExpr(parsePred(ts), ts)
        ts.expect("}")
        branches.append((c, t))
    ts.expect("else")
    ts.expect("{")
    els = asExpr(parsePred(ts), ts)
    ts.expect("}")
    for c, t in reversed(branches):
        els = IfE(c, t, els)
    return els


def _predAsOperand(p: Predicate, tok: Token) -> Expr:
    """A parenthesized predicate used inside a larger formula."""

    return asExprTok(p, tok)


def asExprTok(p, tok: Token) -> Expr:
    if isinstance(p, Expr):
        return p
    if isinstance(p, Atom):
        return p.expr
    if isinstance(p, TrueP):
        return BoolLit(True)
    if isinstance(p, FalseP):
        return BoolLit(False)
    if isinstance(p, NotP):
        return Not(asExprTok(p.inner, tok))
    if isinstance(p, AndP):
        e = asExprTok(p.items[0], tok)
        for q in p.items[1:]:
            e = Binary("&&", e, asExprTok(q, tok))
        return e
    if isinstance(p, OrP):
        e = asExprTok(p.items[0], tok)
        for q in p.items[1:]:
            e = Binary("||", e, asExprTok(q, tok))
        return e
    raise ParseError("quantifiers and ==> are not allowed here", tok.line)


def asExpr(p, ts: TokenStream) -> Expr:
    return asExprTok(p, ts.peek())


# Predicate parsing produces Atom(...) for comparisons but leaves plain
# boolean structure as predicate nodes; expression contexts convert back.


def parseExprText(text: str) -> Expr:
    ts = TokenStream(text)
    e = asExpr(parsePred(ts), ts)
    ts.expectEof()
    return e


def parsePredText(text: str) -> Predicate:
    ts = TokenStream(text)
    p = parsePred(ts)
    ts.expectEof()
    if isinstance(p, Expr):
        p = Atom(p)
    return p


# ---------------------------------------------------------------------------
# Statements


class BlockSite:
    """A nested `block B ...;` statement found inside an instantiation."""

    def __init__(self, name, pre, post, accessible, assignable, line):
        self.name = name
        self.pre = pre
        self.post = post
        self.accessible = accessible  # None when the clause was omitted
        self.assignable = assignable
        self.line = line


def parseStatements(ts: TokenStream, stopAt: str = "}") -> tuple[Statement, list[BlockSite]]:
    """Parse a statement sequence until `stopAt` (not consumed)."""

    sites: list[BlockSite] = []
    stmts: list[Statement] = []
    while not ts.at(stopAt) and ts.peek().kind != "eof":
        stmts.append(_parseStmt(ts, sites))
    if not stmts:
        tok = ts.peek()
        raise ParseError("empty statement sequence", tok.line)
    out = stmts[0]
    for s in stmts[1:]:
        out = SeqStmt(out, s)
    return out, sites


def parseStatementsText(text: str) -> tuple[Statement, list[BlockSite]]:
    ts = TokenStream(text)
    stmt, sites = parseStatements(ts, stopAt="\0")
    ts.expectEof()
    return stmt, sites


def _parseBlockStmt(ts: TokenStream, sites: list[BlockSite]) -> Statement:
    tok = ts.expect("block")
    name = ts.expectIdent("block name")
    accessible = assignable = None
    if ts.accept("accessible"):
        ts.expect("(")
        accessible = tuple(_parseIdentList(ts))
        ts.expect(")")
    if ts.accept("assignable"):
        ts.expect("(")
        assignable = tuple(_parseIdentList(ts))
        ts.expect(")")
    ts.expect("requires")
    ts.expect(":")
    pre = parsePredHere(ts)
    ts.expect(";")
    ts.expect("ensures")
    ts.expect(":")
    post = parsePredHere(ts)
    ts.expect(";")
    sites.append(BlockSite(name, pre, post, accessible, assignable, tok.line))
    return BlockRef(name, pre, post)


def parsePredHere(ts: TokenStream) -> Predicate:
    """Parse a predicate mid-stream, normalizing a bare Expr to an Atom."""

    p = parsePred(ts)
    if isinstance(p, Expr):
        p = Atom(p)
    return p


def _parseIdentList(ts: TokenStream) -> list[str]:
    names = [ts.expectIdent()]
    while ts.accept(","):
        names.append(ts.expectIdent())
    return names


def _parseStmt(ts: TokenStream, sites: list[BlockSite]) -> Statement:
    tok = ts.peek()
    if ts.accept("skip"):
        ts.expect(";")
        return Skip()
    if ts.at("block"):
        return _parseBlockStmt(ts, sites)
    if ts.at("while"):
        return _parseWhile(ts, sites)
    if ts.at("if"):
        return _parseIfStmt(ts, sites)
    if ts.at("select"):
        return _parseSelect(ts, sites)
    if tok.text in KERNEL_TYPES and ts.atIdent(1) and ts.at(":=", 2):
        declType = ts.next().text
        name = ts.expectIdent()
        ts.expect(":=")
        value = asExpr(parsePred(ts), ts)
        ts.expect(";")
        return LocalDecl(name, declType, value)
    if tok.kind == "ident":
        target = ts.expectIdent()
        ts.expect(":=")
        if ts.atIdent() and ts.at("(", 1) and ts.peek().text not in _KEYWORDS:
            method = ts.expectIdent()
            ts.expect("(")
            args = _parseArgs(ts)
            ts.expect(")")
            ts.expect(";")
            return MethodCallStmt(method, tuple(args), target)
        value = asExpr(parsePred(ts), ts)
        ts.expect(";")
        return Assign(target, value)
    raise ParseError("expected a statement, found %r" % (tok.text or "end of input"), tok.line)


def _parseBody(ts: TokenStream, sites: list[BlockSite]) -> Statement:
    ts.expect("{")
    inner, innerSites = parseStatements(ts, stopAt="}")
    ts.expect("}")
    sites.extend(innerSites)
    return inner


def _parseWhile(ts: TokenStream, sites: list[BlockSite]) -> Statement:
    ts.expect("while")
    ts.expect("(")
    guard = asExpr(parsePred(ts), ts)
    ts.expect(")")
    ts.expect("invariant")
    ts.expect(":")
    inv = parsePredHere(ts)
    ts.expect(";")
    ts.expect("variant")
    ts.expect(":")
    variant = asExpr(parsePred(ts), ts)
    ts.expect(";")
    body = _parseBody(ts, sites)
    return Repeat(inv, variant, guard, body)


def _parseIfStmt(ts: TokenStream, sites: list[BlockSite]) -> Statement:
    ts.expect("if")
    ts.expect("(")
    guard = asExpr(parsePred(ts), ts)
    ts.expect(")")
    thenBody = _parseBody(ts, sites)
    chain: list[tuple[Expr, Statement]] = [(guard, thenBody)]
    while _acceptElseIf(ts):
        ts.expect("(")
        g = asExpr(parsePred(ts), ts)
        ts.expect(")")
        chain.append((g, _parseBody(ts, sites)))
    elseBody: Statement = Skip()
    if ts.accept("else"):
        elseBody = _parseBody(ts, sites)
    elif len(chain) > 1:
        tok = ts.peek()
        raise ParseError("if/elseif needs a final else branch", tok.line)
    return desugarIf(chain, elseBody)


def _acceptElseIf(ts: TokenStream) -> bool:
    """Accept either `elseif` or the two-token `else if`."""
    if ts.at("elseif"):
        ts.next()
        return True
    if ts.at("else") and ts.at("if", 1):
        ts.next()
        ts.next()
        return True
    return False


def desugarIf(chain: list[tuple[Expr, Statement]], elseBody: Statement) -> Select:
    """Build a Select whose guards make the branch conditions disjoint."""

    branches: list[tuple[Expr, Statement]] = []
    negs: Expr | None = None
    for g, body in chain:
        guard = g if negs is None else Binary("&&", negs, g)
        branches.append((guard, body))
        neg = Not(g)
        negs = neg if negs is None else Binary("&&", negs, neg)
    branches.append((negs, elseBody))
    return Select(tuple(branches))


def _parseSelect(ts: TokenStream, sites: list[BlockSite]) -> Statement:
    ts.expect("select")
    ts.expect("{")
    branches: list[tuple[Expr, Statement]] = []
    while not ts.at("}"):
        ts.expect("(")
        g = asExpr(parsePred(ts), ts)
        ts.expect(")")
        ts.expect("->")
        body = _parseBody(ts, sites)
        branches.append((g, body))
    ts.expect("}")
    if not branches:
        tok = ts.peek()
        raise ParseError("select needs at least one branch", tok.line)
    return Select(tuple(branches))

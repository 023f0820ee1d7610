"""Parsers for trait declaration files.

Two surface forms share one token stream:

  .trait files hold body literals:

      trait MaxETrait3 {
          @Pre: list.size() > 0
          @Post: result == list.element()
          Num accessHead(List list) = list.element()
      }

      interface Shape {
          abstract Num area();
      }

  .tc files hold compositions:

      class MaxE = MaxETrait1 + MaxETrait2 + MaxETrait3 + MaxETrait4
      trait Reduced = MaxETrait2 [makeAbstract maxElement]

Method annotations: @Pre and @Post give the contract (defaults: true) and
@Measure gives the termination measure a directly recursive body needs.
Abstract methods end in ';'; concrete methods bind their body with '='.
In .tc files the kind keyword is optional and defaults to class.
"""

from __future__ import annotations

from ..lang.ast import Contract, TrueP
from ..lang.parser import ParseError, TokenStream, asExpr, parsePred, parsePredHere
from .model import (
    KIND_CLASS,
    KIND_INTERFACE,
    KIND_TRAIT,
    Lit,
    MakeAbstract,
    Method,
    Plus,
    Ref,
    TraitBody,
    TraitExpr,
)

_KINDS = {"trait": KIND_TRAIT, "interface": KIND_INTERFACE, "class": KIND_CLASS}

# Words the surface grammar claims for itself; they cannot name members.
_RESERVED = {
    "trait", "interface", "class", "abstract", "implements", "makeAbstract",
    "new", "if", "elseif", "else", "forall", "exists", "in", "true", "false",
    "old", "div", "this", "result",
}


def _name(ts: TokenStream, what: str) -> str:
    tok = ts.peek()
    n = ts.expectIdent(what)
    if n in _RESERVED:
        raise ParseError("%r cannot be used as %s" % (n, what), tok.line)
    return n


def _parseAnnotations(ts: TokenStream):
    pre = post = measure = None
    while ts.at("@"):
        tok = ts.next()
        kw = ts.expectIdent("annotation name")
        ts.expect(":")
        if kw == "Pre":
            if pre is not None:
                raise ParseError("duplicate @Pre", tok.line)
            pre = parsePredHere(ts)
        elif kw == "Post":
            if post is not None:
                raise ParseError("duplicate @Post", tok.line)
            post = parsePredHere(ts)
        elif kw == "Measure":
            if measure is not None:
                raise ParseError("duplicate @Measure", tok.line)
            measure = asExpr(parsePred(ts), ts)
        else:
            raise ParseError("unknown annotation @%s" % kw, tok.line)
        ts.accept(";")
    return pre, post, measure


def _parseMethod(ts: TokenStream) -> Method:
    pre, post, measure = _parseAnnotations(ts)
    isAbs = ts.accept("abstract")
    retType = ts.expectIdent("return type")
    tok = ts.peek()
    name = _name(ts, "a method name")
    ts.expect("(")
    params = []
    if not ts.at(")"):
        while True:
            pt = ts.expectIdent("parameter type")
            pn = _name(ts, "a parameter name")
            params.append((pt, pn))
            if not ts.accept(","):
                break
    ts.expect(")")
    body = None
    if ts.accept("="):
        if isAbs:
            raise ParseError("abstract method %r cannot have a body" % name, tok.line)
        body = asExpr(parsePred(ts), ts)
        ts.accept(";")
    else:
        ts.expect(";")
    if measure is not None and body is None:
        raise ParseError("@Measure on abstract method %r" % name, tok.line)
    spec = Contract(pre if pre is not None else TrueP(), post if post is not None else TrueP())
    return Method(spec, retType, name, tuple(params), body, measure)


def _parseBodyDecl(ts: TokenStream):
    kindTok = ts.peek()
    kindWord = ts.expectIdent("declaration kind")
    if kindWord not in ("trait", "interface"):
        raise ParseError(
            "expected 'trait' or 'interface', found %r" % kindWord, kindTok.line
        )
    name = _name(ts, "a declaration name")
    interfaces = []
    if ts.accept("implements"):
        interfaces.append(ts.expectIdent("interface name"))
        while ts.accept(","):
            interfaces.append(ts.expectIdent("interface name"))
    ts.expect("{")
    methods = []
    while not ts.at("}"):
        methods.append(_parseMethod(ts))
    ts.expect("}")
    body = TraitBody(
        isInterface=(kindWord == "interface"),
        interfaces=tuple(interfaces),
        methods=tuple(methods),
    )
    return name, _KINDS[kindWord], Lit(body)


def parseTraitFile(text: str):
    """All declarations of a .trait file as (name, kind, Lit) triples."""
    ts = TokenStream(text)
    out = []
    while ts.peek().kind != "eof":
        out.append(_parseBodyDecl(ts))
    ts.expectEof()
    return out


# --- composition files -----------------------------------------------------


def _parseTAtom(ts: TokenStream) -> TraitExpr:
    if ts.accept("("):
        e = _parseTExpr(ts)
        ts.expect(")")
    else:
        e = Ref(ts.expectIdent("trait name"))
    while ts.at("["):
        ts.next()
        tok = ts.peek()
        if ts.expectIdent("modifier") != "makeAbstract":
            raise ParseError("only [makeAbstract m] is supported here", tok.line)
        m = _name(ts, "a method name")
        ts.expect("]")
        e = MakeAbstract(e, m)
    return e


def _parseTExpr(ts: TokenStream) -> TraitExpr:
    e = _parseTAtom(ts)
    while ts.accept("+"):
        e = Plus(e, _parseTAtom(ts))
    return e


def parseTcFile(text: str):
    """All declarations of a .tc file as (name, kind, TraitExpr) triples."""
    ts = TokenStream(text)
    out = []
    while ts.peek().kind != "eof":
        kind = KIND_CLASS
        if ts.peek().text in _KINDS and ts.peek(1).kind == "ident" and ts.at("=", 2):
            kind = _KINDS[ts.next().text]
        name = _name(ts, "a declaration name")
        ts.expect("=")
        expr = _parseTExpr(ts)
        ts.accept(";")
        out.append((name, kind, expr))
    ts.expectEof()
    return out

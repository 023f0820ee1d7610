"""Canonical text form of trait bodies, the shape `flatten` prints."""

from __future__ import annotations

from ..lang.ast import TrueP
from ..lang.printer import exprStr, predStr
from .model import Method, TraitBody


def methodStr(m: Method, indent: int = 1) -> str:
    pad = "    " * indent
    lines = []
    if not isinstance(m.spec.pre, TrueP):
        lines.append("%s@Pre: %s" % (pad, predStr(m.spec.pre)))
    if not isinstance(m.spec.post, TrueP):
        lines.append("%s@Post: %s" % (pad, predStr(m.spec.post)))
    if m.measure is not None:
        lines.append("%s@Measure: %s" % (pad, exprStr(m.measure)))
    params = ", ".join("%s %s" % (t, n) for t, n in m.params)
    head = "%s %s(%s)" % (m.returnType, m.name, params)
    if m.isAbstract:
        lines.append("%sabstract %s;" % (pad, head))
    else:
        lines.append("%s%s = %s" % (pad, head, exprStr(m.body)))
    return "\n".join(lines)


def bodyStr(name: str, kind: str, body: TraitBody) -> str:
    head = "%s %s" % (kind, name)
    if body.interfaces:
        head += " implements " + ", ".join(body.interfaces)
    if not body.methods:
        return head + " { }"
    chunks = [methodStr(m) for m in body.methods]
    return "%s {\n%s\n}" % (head, "\n\n".join(chunks))

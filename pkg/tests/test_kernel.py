"""Name handling and typing: substitution, fresh names, alpha renaming."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from cbcforge.lang.ast import (
    Atom,
    Binary,
    Contract,
    IntLit,
    IntRange,
    SeqOp,
    TrueP,
    Var,
)
from cbcforge.lang.names import (
    alphaRename,
    boundVars,
    declaredLocals,
    freeVars,
    freeVarsExpr,
    freshName,
    resolveOld,
    substitute,
)
from cbcforge.lang.parser import parseExprText, parsePredText, parseStatementsText
from cbcforge.lang.types import KernelTypeError, checkPred, typeOfExpr
from cbcforge.prover.result import Obligation, ProverConfig

from naive_oracle import EvalError, evalExpr, evalPred
from obgen import genObligation
from stmt_exec import runStatement

CFG = ProverConfig()


def P(text):
    return parsePredText(text)


# ---------------------------------------------------------------------------
# freeVars / boundVars


def test_free_vars_basic():
    assert freeVars(P("x + y > z")) == {"x", "y", "z"}
    assert freeVars(P("true")) == set()


def test_free_vars_quantifier_binds():
    p = P("forall q in [0, 3]: q < x")
    assert freeVars(p) == {"x"}
    assert boundVars(p) == {"q"}


def test_free_vars_seq_domain_counts_sequence():
    # the domain expression itself is free even though q is bound
    p = P("forall q in indices(list): list.get(q) >= 0")
    assert freeVars(p) == {"list"}


def test_free_vars_old_refers_to_base_name():
    p = P("old(x) <= x")
    assert freeVars(p) == {"x"}


# ---------------------------------------------------------------------------
# freshName


def test_fresh_name_unused_base_is_kept():
    assert freshName("x", set()) == "x"


def test_fresh_name_counts_up():
    assert freshName("x", {"x"}) == "x'1"
    assert freshName("x", {"x", "x'1"}) == "x'2"


def test_fresh_name_takes_first_gap():
    assert freshName("x", {"x", "x'2"}) == "x'1"


@given(st.sets(st.sampled_from(["x", "x'1", "x'2", "x'3", "y"]), max_size=5))
def test_fresh_name_never_collides(taken):
    assert freshName("x", taken) not in taken


# ---------------------------------------------------------------------------
# substitution


def test_substitute_example():
    assert substitute(P("x == 1"), "x", parseExprText("x + 1")) == P("x + 1 == 1")


def test_substitute_leaves_unrelated_vars_alone():
    p = P("y > 0")
    assert substitute(p, "x", IntLit(5)) == p


def test_substitute_bound_occurrence_untouched():
    p = P("forall q in [0, 2]: q >= 0")
    assert substitute(p, "q", IntLit(7)) == p


def test_substitute_avoids_capture():
    # replacing x with q must not let the binder capture the new q
    p = P("forall q in [0, 3]: q < x")
    r = substitute(p, "x", Var("q"))
    assert freeVars(r) == {"q"}
    assert r.var != "q"
    assert r.body == Atom(Binary("<", Var(r.var), Var("q")))


def test_substitute_rewrites_domain_expressions():
    p = P("forall q in indices(xs): xs.get(q) > 0")
    r = substitute(p, "xs", Var("ys"))
    assert freeVars(r) == {"ys"}


def _obligation(seed):
    rng = random.Random(seed)
    return genObligation(rng, seed, CFG)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_substitute_with_var_itself_is_identity(seed):
    ob = _obligation(seed)
    for p in (ob.hypothesis, ob.conclusion):
        for v in sorted(freeVars(p)):
            assert substitute(p, v, Var(v)) == p


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6), st.integers(-3, 3))
def test_substitute_free_var_bound(seed, k):
    # freeVars(p[x:=e]) <= (freeVars(p) - {x}) | freeVars(e)
    ob = _obligation(seed)
    p = ob.hypothesis
    names = sorted(freeVars(p))
    if not names:
        return
    x = names[seed % len(names)]
    e = Binary("+", Var(names[0]), IntLit(k)) if ob.envTypes[names[0]] == "int" else Var(names[0])
    got = freeVars(substitute(p, x, e))
    assert got <= (freeVars(p) - {x}) | freeVarsExpr(e)


def _outcome(fn):
    try:
        return ("value", fn())
    except EvalError:
        return ("error",)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(-2, 2))
def test_substitute_agrees_with_store_update(seed, k):
    # p[x:=e] at s  ==  p at s[x := e at s], including partiality
    ob = _obligation(seed)
    p = ob.conclusion
    intVars = sorted(v for v in freeVars(p) if ob.envTypes[v] == "int")
    if not intVars:
        return
    x = intVars[0]
    e = Binary("+", Var(intVars[-1]), IntLit(k))
    store = {}
    for v, t in ob.envTypes.items():
        store[v] = {"int": 1, "bool": True}.get(t, (1, 0) if t == "List" else 0)
    lhs = _outcome(lambda: evalPred(substitute(p, x, e), store))
    updated = dict(store)
    updated[x] = evalExpr(e, store)
    assert lhs == _outcome(lambda: evalPred(p, updated))


def test_resolve_old_snapshots_at_call_point():
    p = P("result == old(x) + 1")
    assert resolveOld(p, {"x": Binary("+", Var("x"), IntLit(2))}) == P("result == x + 2 + 1")
    # without a mapping, old(v) is just v
    assert resolveOld(P("old(y) >= y")) == P("y >= y")


# ---------------------------------------------------------------------------
# alphaRename


STMT = """
int t := x + 1;
if (t > 0) {
    int u := t;
    x := u + u;
} else {
    x := 0 - t;
}
"""


def test_alpha_rename_renames_colliding_locals():
    s, _ = parseStatementsText(STMT)
    r, m = alphaRename(s, {"t", "u"})
    assert m == {"t": "t'1", "u": "u'1"}
    assert {n for n, _ in declaredLocals(r)}.isdisjoint({"t", "u"})


def test_alpha_rename_no_collision_is_identity():
    s, _ = parseStatementsText(STMT)
    r, m = alphaRename(s, {"z"})
    assert m == {}
    assert r == s


@pytest.mark.parametrize("x0", [-3, -1, 0, 2, 4])
def test_alpha_rename_preserves_behaviour(x0):
    s, _ = parseStatementsText(STMT)
    r, _ = alphaRename(s, {"t", "u", "x'1"})
    assert runStatement(s, {"x": x0}) == runStatement(r, {"x": x0})


LOOP_STMT = """
int n := x;
int acc := 0;
while (n > 0) invariant: true; variant: n; {
    int step := 2;
    acc := acc + step;
    n := n - 1;
}
x := acc;
"""


@pytest.mark.parametrize("x0", [0, 1, 3, 5])
def test_alpha_rename_inside_loop_body(x0):
    s, _ = parseStatementsText(LOOP_STMT)
    r, m = alphaRename(s, {"n", "step"})
    assert set(m) == {"n", "step"}
    assert runStatement(s, {"x": x0}) == runStatement(r, {"x": x0})


def test_alpha_rename_fresh_names_avoid_statement_names():
    # the fresh name must dodge names already used inside the statement
    s, _ = parseStatementsText("int t := 1; x := t + z;")
    r, m = alphaRename(s, {"t"})
    assert m["t"] not in {"t", "x", "z"}
    assert runStatement(s, {"x": 0, "z": 5}) == runStatement(r, {"x": 0, "z": 5})


# ---------------------------------------------------------------------------
# AST construction guards


def test_seqop_get_needs_an_index():
    with pytest.raises(ValueError):
        SeqOp("get", Var("xs"))


def test_seqop_size_refuses_an_index():
    with pytest.raises(ValueError):
        SeqOp("size", Var("xs"), IntLit(0))


def test_seqop_rejects_unknown_operation():
    with pytest.raises(ValueError):
        SeqOp("reverse", Var("xs"))


def test_empty_int_range_rejected():
    with pytest.raises(ValueError):
        IntRange(1, 0)


# ---------------------------------------------------------------------------
# typing


def test_type_of_arithmetic():
    env = {"x": "int", "xs": "List"}
    assert typeOfExpr(Binary("+", Var("x"), IntLit(1)), env) == "int"
    assert typeOfExpr(SeqOp("size", Var("xs")), env) == "int"
    assert typeOfExpr(SeqOp("tail", Var("xs")), env) == "List"
    assert typeOfExpr(SeqOp("contains", Var("xs"), IntLit(0)), env) == "bool"


def test_type_error_on_bool_arithmetic():
    with pytest.raises(KernelTypeError):
        typeOfExpr(Binary("+", Var("b"), IntLit(1)), {"b": "bool"})


def test_type_error_on_unknown_variable():
    with pytest.raises(KernelTypeError):
        typeOfExpr(Var("nope"), {})


def test_check_pred_rejects_seq_domain_over_int():
    with pytest.raises(KernelTypeError):
        checkPred(P("forall q in elems(x): q > 0"), {"x": "int"})


def test_check_pred_accepts_listing_style_invariant():
    env = {"list": "List", "i": "int", "j": "int"}
    checkPred(
        P(
            "list.contains(i) && j > 0 && j <= list.size()"
            " && (forall q in indices(list): q < j ==> i >= list.get(q))"
        ),
        env,
    )


# ---------------------------------------------------------------------------
# obligation construction


def test_obligation_requires_env_cover():
    with pytest.raises(ValueError, match="not covered"):
        Obligation("t", TrueP(), P("x > 0"), envTypes={})


def test_obligation_typechecks_both_sides():
    with pytest.raises(KernelTypeError):
        Obligation("t", P("b + 1 > 0"), TrueP(), envTypes={"b": "bool"})


def test_obligation_equality_is_structural():
    a = Obligation("t", TrueP(), P("x > 0"), envTypes={"x": "int"})
    b = Obligation("t", TrueP(), P("x > 0"), envTypes={"x": "int"})
    assert a == b


def test_contract_rejects_old_in_precondition():
    with pytest.raises(ValueError, match="old"):
        Contract(P("old(x) > 0"), TrueP())


def test_contract_rejects_result_in_precondition():
    with pytest.raises(ValueError, match="result"):
        Contract(P("result > 0"), TrueP())

"""ASTs and syntactic operations shared by every other module."""

from .ast import (  # noqa: F401
    Abstract,
    AndP,
    Assign,
    Atom,
    Binary,
    BlockRef,
    BoolLit,
    BoundedDomain,
    Call,
    Contract,
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
    RESULT,
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
    T_BOOL,
    T_INT,
    T_LIST,
    TrueP,
    TypeAtom,
    Var,
    mentionsOld,
    mentionsResult,
)
from .names import (  # noqa: F401
    allNames,
    alphaRename,
    assignedVars,
    boundVars,
    declaredLocals,
    exists,
    forall,
    freeVars,
    freeVarsExpr,
    freshName,
    renameExpr,
    renamePred,
    resolveOld,
    stmtNames,
    substExpr,
    substMap,
    substitute,
)
from .parser import (  # noqa: F401
    BlockSite,
    ParseError,
    TokenStream,
    parseExprText,
    parsePredText,
    parseStatementsText,
)
from .printer import exprStr, predStr, stmtStr  # noqa: F401
from .types import KernelTypeError, checkPred, typeOfExpr  # noqa: F401

"""
Problem Files

Parses the sectioned problem format into a resolved ``Problem``:

    # the R alphabet
    alphabet: nat/0, int/0, list/1, set/1
    order: nat <= int, list <= set
    signatures:
      zero : nat
      s    : nat -> nat
      nil  : list('a)
      cons : 'a * list('a) -> list('a)
    term: cons(zero, nil)

Parameters carry a leading apostrophe. In a term, identifiers that are
not declared function symbols are variables. Section keywords cannot be
used as names. Every error raised here carries the 1-based line and
column of the offending token.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import structlog
from lark import Lark, Token, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput

from polysub.core import validate_alphabet
from polysub.models import (
    App,
    Application,
    ErrorCode,
    InequationSystem,
    OrderedTypeAlphabet,
    Parameter,
    PolysubError,
    Problem,
    Signature,
    Term,
    Type,
    TypeConstructor,
    TypeInequation,
    Var,
)

logger = structlog.get_logger()

PROBLEM_GRAMMAR = r"""
start: alphabet_sec order_sec? sigs_sec? (term_sec | solve_sec | pair_sec)?

alphabet_sec: "alphabet" ":" ctor ("," ctor)*
ctor: IDENT "/" NAT

order_sec: "order" ":" (order_pair ","?)*
order_pair: IDENT "<=" IDENT

sigs_sec: "signatures" ":" sig*
sig: IDENT ":" type ("*" type)* "->" type   -> fn_sig
   | IDENT ":" type                         -> const_sig

term_sec: "term" ":" term
term: IDENT ("(" term ("," term)* ")")?

solve_sec: "solve" ":" (inequation ","?)*
inequation: type "<=" type

pair_sec: "subtype" ":" type "," type

type: PARAM                              -> param_type
    | IDENT ("(" type ("," type)* ")")?  -> app_type

PARAM: "'" IDENT
IDENT: /[A-Za-z_][A-Za-z0-9_]*/
NAT: /[0-9]+/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""


@lru_cache(maxsize=1)
def _get_parser() -> Lark:
    return Lark(PROBLEM_GRAMMAR, parser="lalr", propagate_positions=True)


def _parse_error(exc: UnexpectedInput, text: str) -> PolysubError:
    line, column = exc.line, exc.column
    if isinstance(exc, UnexpectedEOF) or line is None or line < 1:
        lines = text.split("\n")
        line, column = len(lines), len(lines[-1]) + 1
    if isinstance(exc, UnexpectedCharacters):
        message = f"unexpected character {exc.char!r}"
    elif isinstance(exc, UnexpectedEOF):
        message = "unexpected end of input"
    else:
        token = getattr(exc, "token", None)
        if token is None or token.type == "$END":
            message = "unexpected end of input"
        else:
            message = f"unexpected token {str(token)!r}"
    expected = sorted(getattr(exc, "expected", None) or getattr(exc, "allowed", None) or [])
    return PolysubError(
        ErrorCode.PARSE_ERROR,
        message,
        line=line,
        column=column,
        details={"expected": expected} if expected else {},
    )


class _ProblemBuilder:
    """Resolves a parse tree against its own alphabet and signatures."""

    def __init__(self, tree: Tree):
        self.tree = tree
        self.alphabet: Optional[OrderedTypeAlphabet] = None
        self.signatures: Dict[str, Signature] = {}

    def build(self) -> Problem:
        sections = {child.data: child for child in self.tree.children if isinstance(child, Tree)}

        self.alphabet = self._alphabet(sections["alphabet_sec"], sections.get("order_sec"))
        if "sigs_sec" in sections:
            self._signatures(sections["sigs_sec"])

        term: Optional[Term] = None
        system: Optional[InequationSystem] = None
        pair: Optional[Tuple[Type, Type]] = None
        if "term_sec" in sections:
            term = self._term(sections["term_sec"].children[0])
        elif "solve_sec" in sections:
            system = InequationSystem(
                inequations=tuple(
                    TypeInequation(lhs=self._type(node.children[0]), rhs=self._type(node.children[1]))
                    for node in sections["solve_sec"].children
                )
            )
        elif "pair_sec" in sections:
            lhs, rhs = sections["pair_sec"].children
            pair = (self._type(lhs), self._type(rhs))

        return Problem(
            alphabet=self.alphabet,
            signatures=self.signatures,
            term=term,
            system=system,
            pair=pair,
        )

    # -- alphabet ------------------------------------------------------------

    def _alphabet(self, alphabet_sec: Tree, order_sec: Optional[Tree]) -> OrderedTypeAlphabet:
        constructors: List[TypeConstructor] = []
        seen: set[str] = set()
        for ctor in alphabet_sec.children:
            name, arity = ctor.children
            if str(name) in seen:
                raise PolysubError(
                    ErrorCode.DUPLICATE_CONSTRUCTOR,
                    f"type constructor '{name}' is declared twice",
                    line=name.line,
                    column=name.column,
                    details={"name": str(name)},
                )
            seen.add(str(name))
            constructors.append(TypeConstructor(name=str(name), arity=int(arity)))

        pairs: List[Tuple[str, str]] = []
        for pair in order_sec.children if order_sec is not None else ():
            for name in pair.children:
                if str(name) not in seen:
                    raise PolysubError(
                        ErrorCode.UNKNOWN_CONSTRUCTOR,
                        f"order mentions undeclared type constructor '{name}'",
                        line=name.line,
                        column=name.column,
                        details={"name": str(name)},
                    )
            pairs.append((str(pair.children[0]), str(pair.children[1])))

        where = order_sec if order_sec is not None and order_sec.children else alphabet_sec
        try:
            return validate_alphabet(constructors, pairs)
        except PolysubError as exc:
            raise exc.located(where.meta.line, where.meta.column)

    # -- signatures ----------------------------------------------------------

    def _signatures(self, sigs_sec: Tree) -> None:
        for sig in sigs_sec.children:
            name = sig.children[0]
            if str(name) in self.signatures:
                raise PolysubError(
                    ErrorCode.PARSE_ERROR,
                    f"function symbol '{name}' has two signatures",
                    line=name.line,
                    column=name.column,
                    details={"name": str(name)},
                )
            types = [self._type(node) for node in sig.children[1:]]
            self.signatures[str(name)] = Signature(
                fn=str(name),
                domain=tuple(types[:-1]),
                codomain=types[-1],
            )

    # -- types and terms -----------------------------------------------------
    #
    # Both walks keep an explicit stack: a node is checked on the way down,
    # built on the way up from the last len(args) finished children.

    def _constructor(self, name: Token, arity: int) -> TypeConstructor:
        assert self.alphabet is not None
        if not self.alphabet.has(str(name)):
            raise PolysubError(
                ErrorCode.UNKNOWN_CONSTRUCTOR,
                f"type constructor '{name}' is not declared",
                line=name.line,
                column=name.column,
                details={"name": str(name)},
            )
        ctor = self.alphabet.constructor(str(name))
        if arity != ctor.arity:
            raise PolysubError(
                ErrorCode.ARITY_MISMATCH,
                f"{name} expects {ctor.arity} argument(s), got {arity}",
                line=name.line,
                column=name.column,
                details={"name": str(name), "expected": ctor.arity, "actual": arity},
            )
        return ctor

    def _type(self, node: Tree) -> Type:
        built: List[Type] = []
        stack: List[Tuple[Tree, Optional[TypeConstructor]]] = [(node, None)]
        while stack:
            current, ctor = stack.pop()
            if current.data == "param_type":
                built.append(Parameter(name=str(current.children[0])[1:]))
                continue
            name, *args = current.children
            if ctor is None:
                stack.append((current, self._constructor(name, len(args))))
                stack.extend((a, None) for a in reversed(args))
                continue
            cut = len(built) - len(args)
            built[cut:] = [Application(constructor=ctor, args=tuple(built[cut:]))]
        return built[0]

    def _symbol(self, name: Token, arity: int) -> Optional[Signature]:
        signature = self.signatures.get(str(name))
        if signature is None:
            if arity:
                raise PolysubError(
                    ErrorCode.UNKNOWN_SYMBOL,
                    f"function symbol '{name}' has no signature",
                    line=name.line,
                    column=name.column,
                    details={"name": str(name)},
                )
            return None
        if arity != signature.arity:
            raise PolysubError(
                ErrorCode.ARITY_MISMATCH,
                f"'{name}' takes {signature.arity} argument(s), got {arity}",
                line=name.line,
                column=name.column,
                details={"name": str(name), "expected": signature.arity, "actual": arity},
            )
        return signature

    def _term(self, node: Tree) -> Term:
        built: List[Term] = []
        stack: List[Tuple[Tree, bool]] = [(node, False)]
        while stack:
            current, expanded = stack.pop()
            name, *args = current.children
            if not expanded:
                if self._symbol(name, len(args)) is None:
                    built.append(Var(name=str(name)))
                    continue
                stack.append((current, True))
                stack.extend((a, False) for a in reversed(args))
                continue
            cut = len(built) - len(args)
            built[cut:] = [App(fn=str(name), args=tuple(built[cut:]))]
        return built[0]


def parse_problem(text: str) -> Problem:
    """
    Parse and resolve a problem file.

    Raises:
        PolysubError: PARSE_ERROR, any alphabet validation error, or
            UNKNOWN_CONSTRUCTOR / UNKNOWN_SYMBOL / ARITY_MISMATCH, all located
    """
    try:
        tree = _get_parser().parse(text)
    except UnexpectedInput as exc:
        raise _parse_error(exc, text) from None

    problem = _ProblemBuilder(tree).build()
    logger.debug(
        "problem_parsed",
        constructors=len(problem.alphabet.constructors),
        signatures=len(problem.signatures),
        payload=type(problem.payload).__name__ if problem.payload is not None else None,
    )
    return problem


def parse_problem_file(path: Path | str) -> Problem:
    """Read a UTF-8 problem file and parse it."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PolysubError(
            ErrorCode.CONFIG_ERROR,
            f"cannot read problem file {path}: {exc.strerror or exc}",
            details={"path": str(path)},
        ) from exc
    logger.debug("problem_file_read", path=str(path), chars=len(text))
    return parse_problem(text)


def render_problem(problem: Problem) -> str:
    """Serialize a problem back to the file format; parse_problem inverts it."""
    alphabet = problem.alphabet
    lines = ["alphabet: " + ", ".join(f"{c.name}/{c.arity}" for c in alphabet.constructors)]
    if alphabet.declared:
        lines.append("order: " + ", ".join(f"{lower} <= {upper}" for lower, upper in alphabet.declared))
    if problem.signatures:
        lines.append("signatures:")
        lines.extend(f"  {problem.signatures[fn]}" for fn in problem.signatures)
    if problem.term is not None:
        lines.append(f"term: {problem.term}")
    elif problem.system is not None:
        lines.append("solve: " + ", ".join(str(i) for i in problem.system.inequations))
    elif problem.pair is not None:
        lines.append(f"subtype: {problem.pair[0]}, {problem.pair[1]}")
    return "\n".join(lines) + "\n"

"""Surface syntax for terms and types.

    term  := ident
           | (lam ident term)
           | (app term term)
           | (pure term)
           | (let ident term term)
           | (eff ident (param*) term*)
           | (fn ident term*)
    param := integer | ident
    type  := ident | (E type) | (-> type type)

A bare ident is a variable.  Symbol applications are checked against the
signature (existence, kind, parameter domain, arity) at parse time.
"""

from __future__ import annotations

from .sexpr import SexprError, parse_one
from .signature import Signature, SignatureError, check_symapp
from .terms import App, Arrow, Base, Eff, Lam, Let, Pure, SymApp, Term, Type, Var

class ParseError(Exception):
    pass


def _ident(node, what: str) -> str:
    if not isinstance(node, str):
        raise ParseError(f"expected {what}, got {node!r}")
    return node


def build_term(node, sig: Signature) -> Term:
    if isinstance(node, str):
        return Var(node)
    if isinstance(node, int):
        raise ParseError(f"bare integer {node} is not a term")
    if not isinstance(node, list) or not node:
        raise ParseError("empty form is not a term")
    head = node[0]
    if head == "lam":
        if len(node) != 3:
            raise ParseError("(lam ident term) takes two parts")
        return Lam(_ident(node[1], "binder"), build_term(node[2], sig))
    if head == "app":
        if len(node) != 3:
            raise ParseError("(app term term) takes two parts")
        return App(build_term(node[1], sig), build_term(node[2], sig))
    if head == "pure":
        if len(node) != 2:
            raise ParseError("(pure term) takes one part")
        return Pure(build_term(node[1], sig))
    if head == "let":
        if len(node) != 4:
            raise ParseError("(let ident term term) takes three parts")
        return Let(_ident(node[1], "binder"), build_term(node[2], sig), build_term(node[3], sig))
    if head == "eff":
        if len(node) < 3 or not isinstance(node[2], list):
            raise ParseError("(eff ident (param*) term*) needs a parameter list")
        name = _ident(node[1], "effect name")
        params = []
        for p in node[2]:
            if isinstance(p, list):
                raise ParseError(f"parameter of {name} must be an integer or ident")
            params.append(p)
        args = tuple(build_term(a, sig) for a in node[3:])
        term = SymApp("eff", name, tuple(params), args)
        check_symapp(sig, term)
        return term
    if head == "fn":
        if len(node) < 2:
            raise ParseError("(fn ident term*) needs a symbol name")
        name = _ident(node[1], "function name")
        args = tuple(build_term(a, sig) for a in node[2:])
        term = SymApp("fn", name, (), args)
        check_symapp(sig, term)
        return term
    raise ParseError(f"unknown form head: {head!r}")


def parse_term(text: str, sig: Signature) -> Term:
    """Parse one term, validating symbols against the signature.

    Raises ParseError (the message keeps line:col for syntax problems),
    which also wraps unknown-symbol and arity errors.
    """
    try:
        node = parse_one(text)
    except SexprError as e:
        raise ParseError(f"syntax error at {e}") from e
    try:
        return build_term(node, sig)
    except SignatureError as e:
        raise ParseError(str(e)) from e


def build_type(node) -> Type:
    if isinstance(node, str):
        return Base(node)
    if isinstance(node, list) and len(node) == 2 and node[0] == "E":
        return Eff(build_type(node[1]))
    if isinstance(node, list) and len(node) == 3 and node[0] == "->":
        return Arrow(build_type(node[1]), build_type(node[2]))
    raise ParseError(f"not a type: {node!r}")


def parse_type(text: str) -> Type:
    try:
        return build_type(parse_one(text))
    except SexprError as e:
        raise ParseError(f"syntax error at {e}") from e

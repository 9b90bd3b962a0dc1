"""The rewrite engine: metalanguage rules, user rules, strategies.

Four built-in metalanguage rules operate on the monadic structure:

    abs-beta   (app (lam x u) t)         ~> u{t/x}
    let-beta   (let x (pure t) u)        ~> u{t/x}
    let-assoc  (let y (let x t1 t2) u)   ~> (let x t1 (let y t2 u))
               requires x not free in u; discharged by renaming x
    eff-assoc  (let x e(t1..tn) u)       ~> e(t1'..tn'), ti' = (let x ti u)
               only when the subject head is an effect symbol

User rules live in the binder-free symbolic fragment (variables and
symbol applications).  Rules flagged extended may additionally use pure
on the right-hand side; their variables that occur under a pure there
are value metavariables and match only pure-wrapped subterms or plain
variables.

All rules apply at any position (compatible closure): under binders, in
let subjects, inside effect arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from random import Random

from .terms import (
    App,
    Lam,
    Let,
    Position,
    Pure,
    SymApp,
    Term,
    Var,
    alpha_eq,
    children,
    free_vars,
    fresh_name,
    iter_subterms,
    print_term,
    replace_at,
    substitute,
)

ML_RULES = ("abs-beta", "let-beta", "let-assoc", "eff-assoc")

STRATEGIES = ("leftmost-outermost", "rightmost-innermost", "random")


class RuleError(Exception):
    pass


class StaleRedexError(Exception):
    pass


class FuelExhausted(Exception):
    """Raised when normalize runs out of steps; carries the partial result."""

    def __init__(self, term: Term, trace: "Trace"):
        super().__init__(f"fuel exhausted after {len(trace.steps)} steps")
        self.term = term
        self.trace = trace


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: Term
    rhs: Term
    extended: bool = False
    value_vars: frozenset[str] = frozenset()
    certified: bool = False


def pattern_vars(t: Term) -> frozenset[str]:
    """Variables of a symbolic pattern (patterns have no binders, so every
    variable occurrence is a metavariable)."""
    if isinstance(t, Var):
        return frozenset((t.name,))
    out: frozenset[str] = frozenset()
    for k in children(t):
        out |= pattern_vars(k)
    return out


def _is_symbolic(t: Term, allow_pure: bool = False) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, SymApp):
        return all(_is_symbolic(a, allow_pure) for a in t.args)
    if allow_pure and isinstance(t, Pure):
        return _is_symbolic(t.body, allow_pure)
    return False


def _vars_under_pure(t: Term, inside: bool = False) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,)) if inside else frozenset()
    inside = inside or isinstance(t, Pure)
    out: frozenset[str] = frozenset()
    for k in children(t):
        out |= _vars_under_pure(k, inside)
    return out


def make_rule(name: str, lhs: Term, rhs: Term, extended: bool = False) -> RewriteRule:
    """Validate and build a rule.  Checks the symbolic-fragment shape, that
    the left side is not a bare variable, and that the right side invents
    no variables.  For extended rules the value metavariables are the
    right-hand-side variables that occur under a pure."""
    if isinstance(lhs, Var):
        raise RuleError(f"rule {name}: left side is a bare variable")
    if not _is_symbolic(lhs):
        raise RuleError(f"rule {name}: left side leaves the symbolic fragment")
    if not _is_symbolic(rhs, allow_pure=extended):
        raise RuleError(
            f"rule {name}: right side leaves the symbolic fragment"
            + ("" if extended else " (pure needs the extended flag)")
        )
    lv, rv = pattern_vars(lhs), pattern_vars(rhs)
    if not rv <= lv:
        missing = ", ".join(sorted(rv - lv))
        raise RuleError(f"rule {name}: right side invents variables: {missing}")
    value_vars = _vars_under_pure(rhs) if extended else frozenset()
    return RewriteRule(name, lhs, rhs, extended, value_vars)


# ---------------------------------------------------------------------------
# matching


def match_pattern(
    pattern: Term,
    subject: Term,
    value_vars: frozenset[str] = frozenset(),
    bindings: dict[str, Term] | None = None,
) -> dict[str, Term] | None:
    """First-order match of a symbolic pattern against a subject subterm.

    Pattern variables bind arbitrary subject terms (binders included); a
    repeated variable must see alpha-equal subterms.  Value metavariables
    bind the payload of a pure-wrapped subject, or a plain variable, and
    match nothing else.
    """
    out = {} if bindings is None else bindings
    if isinstance(pattern, Var):
        name = pattern.name
        if name in value_vars:
            if isinstance(subject, Pure):
                bound = subject.body
            elif isinstance(subject, Var):
                bound = subject
            else:
                return None
        else:
            bound = subject
        if name in out:
            return out if alpha_eq(out[name], bound) else None
        out[name] = bound
        return out
    if isinstance(pattern, SymApp):
        if not isinstance(subject, SymApp):
            return None
        if pattern.identity != subject.identity or pattern.kind != subject.kind:
            return None
        if len(pattern.args) != len(subject.args):
            return None
        for p, s in zip(pattern.args, subject.args):
            if match_pattern(p, s, value_vars, out) is None:
                return None
        return out
    raise RuleError(f"pattern leaves the symbolic fragment: {print_term(pattern)}")


def instantiate(rhs: Term, bindings: dict[str, Term]) -> Term:
    """Plug matched bindings into a rule right-hand side.  Right sides are
    binder-free, so this cannot capture."""
    if isinstance(rhs, Var):
        return bindings[rhs.name]
    if isinstance(rhs, SymApp):
        return SymApp(rhs.kind, rhs.name, rhs.params, tuple(instantiate(a, bindings) for a in rhs.args))
    if isinstance(rhs, Pure):
        return Pure(instantiate(rhs.body, bindings))
    raise RuleError(f"rule right side leaves the symbolic fragment: {print_term(rhs)}")


# ---------------------------------------------------------------------------
# redexes


@dataclass(frozen=True)
class Redex:
    position: Position
    rule_name: str
    reduct: Term
    source: Term = field(repr=False, compare=False, default=None)
    ml: bool = field(compare=False, default=False)
    rule_index: int = field(compare=False, default=0)


def _ml_contraction(t: Term) -> tuple[str, Term] | None:
    """The metalanguage contraction rooted at t, if any.  At most one of
    the four rules can apply at a given node."""
    if isinstance(t, App) and isinstance(t.fun, Lam):
        return "abs-beta", substitute(t.fun.body, t.fun.binder, t.arg)
    if isinstance(t, Let):
        subj = t.subject
        if isinstance(subj, Pure):
            return "let-beta", substitute(t.body, t.binder, subj.body)
        if isinstance(subj, Let):
            inner_binder, t1, t2 = subj.binder, subj.subject, subj.body
            if inner_binder in free_vars(t.body):
                renamed = fresh_name(
                    inner_binder,
                    free_vars(t.body) | free_vars(t2) | free_vars(t1) | {t.binder},
                )
                t2 = substitute(t2, inner_binder, Var(renamed))
                inner_binder = renamed
            return "let-assoc", Let(inner_binder, t1, Let(t.binder, t2, t.body))
        if isinstance(subj, SymApp) and subj.kind == "eff":
            pushed = tuple(Let(t.binder, ti, t.body) for ti in subj.args)
            return "eff-assoc", SymApp("eff", subj.name, subj.params, pushed)
    return None


def ml_redexes(t: Term) -> list[Redex]:
    """All metalanguage redexes of t, in preorder position order."""
    out = []
    for pos, sub in iter_subterms(t):
        hit = _ml_contraction(sub)
        if hit is not None:
            name, contractum = hit
            out.append(Redex(pos, name, replace_at(t, pos, contractum), t, ml=True))
    return out


def symbolic_redexes(t: Term, rules: list[RewriteRule]) -> list[Redex]:
    """All user-rule redexes of t, positions in preorder, rules in the
    order given at equal positions."""
    out = []
    for pos, sub in iter_subterms(t):
        for idx, rule in enumerate(rules):
            bindings = match_pattern(rule.lhs, sub, rule.value_vars)
            if bindings is not None:
                contractum = instantiate(rule.rhs, bindings)
                out.append(
                    Redex(pos, rule.name, replace_at(t, pos, contractum), t, ml=False, rule_index=idx)
                )
    return out


def all_redexes(t: Term, rules: list[RewriteRule] = ()) -> list[Redex]:
    """Every redex of t, sorted by position (lexicographic), metalanguage
    rules before user rules at equal positions."""
    combined = ml_redexes(t) + symbolic_redexes(t, list(rules))
    combined.sort(key=lambda r: (r.position, 0 if r.ml else 1, r.rule_index))
    return combined


def step(t: Term, redex: Redex) -> Term:
    """Apply a redex previously produced for exactly this term."""
    if redex.source != t:
        raise StaleRedexError(
            f"redex {redex.rule_name} @ {position_str(redex.position)} was not produced for this term"
        )
    return redex.reduct


# ---------------------------------------------------------------------------
# traces and normalisation


def position_str(pos: Position) -> str:
    return "/" + "/".join(str(i) for i in pos) if pos else "/"


@dataclass(frozen=True)
class TraceStep:
    redex: Redex
    result: Term


@dataclass(frozen=True)
class Trace:
    initial: Term
    steps: tuple[TraceStep, ...] = ()

    def export_lines(self) -> list[str]:
        """One step per line: <rule-name> @ <position-path> : <printed reduct>."""
        return [
            f"{s.redex.rule_name} @ {position_str(s.redex.position)} : {print_term(s.result)}"
            for s in self.steps
        ]

    def to_json(self) -> dict:
        return {
            "initial": print_term(self.initial),
            "steps": [
                {
                    "rule": s.redex.rule_name,
                    "position": position_str(s.redex.position),
                    "result": print_term(s.result),
                }
                for s in self.steps
            ],
        }


DEFAULT_FUEL = 10_000


def _pick(redexes: list[Redex], strategy: str, rng: Random | None) -> Redex:
    if strategy == "leftmost-outermost":
        # preorder listing is already sorted; the head is the leftmost
        # outermost redex, ml before user rules on ties
        return redexes[0]
    if strategy == "rightmost-innermost":
        deepest = max(r.position for r in redexes)
        at = [r for r in redexes if r.position == deepest]
        return min(at, key=lambda r: (0 if r.ml else 1, r.rule_index))
    if strategy == "random":
        return rng.choice(redexes)
    raise ValueError(f"unknown strategy: {strategy}")


def normalize(
    t: Term,
    rules: list[RewriteRule] = (),
    strategy: str = "leftmost-outermost",
    fuel: int = DEFAULT_FUEL,
    seed: int | None = None,
) -> tuple[Term, Trace]:
    """Rewrite to normal form under the given strategy.

    Deterministic for a fixed strategy/seed.  Raises FuelExhausted (with
    the partial trace attached) if redexes remain after `fuel` steps.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy: {strategy}")
    if (seed is None) == (strategy == "random"):
        raise ValueError("a seed is required exactly when the strategy is random")
    rng = Random(seed) if strategy == "random" else None
    rules = list(rules)
    steps: list[TraceStep] = []
    current = t
    while True:
        redexes = all_redexes(current, rules)
        if not redexes:
            return current, Trace(t, tuple(steps))
        if len(steps) >= fuel:
            raise FuelExhausted(current, Trace(t, tuple(steps)))
        chosen = _pick(redexes, strategy, rng)
        current = chosen.reduct
        steps.append(TraceStep(chosen, current))


# ---------------------------------------------------------------------------
# progress measure for let-assoc


def left_nesting_measure(t: Term) -> int:
    """Number of let nodes that sit anywhere inside the subject subtree of
    an enclosing let.  Every let-assoc step strictly decreases this on the
    rewritten subtree."""

    def go(t: Term, in_subject: bool) -> int:
        if isinstance(t, Let):
            own = 1 if in_subject else 0
            return own + go(t.subject, True) + go(t.body, in_subject)
        return sum(go(k, in_subject) for k in children(t))

    return go(t, False)

"""Arrow-style proofs and backward-chaining search for the modal calculus.

Proofs are terms over an axiomatisation with identities, composition,
monotonicity rules for every connective, evaluation/coevaluation maps for the
two slashes, the unit/counit pair for each modal family, and the two
structural arrows (alpha, sigma) that let an extraction-marked hypothesis
restructure to its use site.  Residuation is implemented as a derived rule,
so every search step compiles down to a term in the base system.

The search normalizes a goal by stripping slashes and boxes off the succedent
(all invertible), then branches over: axiom closure, direct monotonicity,
slash application at any covariant position, unlocking of a diamond-box pair,
and the structural moves.  Search is depth-first over a step budget with
memoized failures, so results are deterministic.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .formula import (
    Atom,
    Box,
    Dia,
    Formula,
    Mode,
    Over,
    Path,
    Tensor,
    Under,
    count_vector,
    format_path,
    parse_formula,
    print_formula,
    replace_at,
    size,
    subformula_at,
)


class ProverError(ValueError):
    """Raised for malformed proof terms and misused prover operations."""


@dataclass(frozen=True)
class Arrow:
    source: Formula
    target: Formula

    def __str__(self) -> str:
        return f"{print_formula(self.source)} -> {print_formula(self.target)}"


# ---------------------------------------------------------------------------
# Proof terms


class ProofTerm:
    """A proof tree; ``source`` and ``target`` are maintained by constructors
    and can be re-derived independently with :func:`validate`."""

    __slots__ = ("rule", "mode", "params", "children", "source", "target")

    def __init__(
        self,
        rule: str,
        mode: Mode | None,
        params: tuple[Formula, ...],
        children: tuple["ProofTerm", ...],
        source: Formula,
        target: Formula,
    ):
        self.rule = rule
        self.mode = mode
        self.params = params
        self.children = children
        self.source = source
        self.target = target

    @property
    def arrow(self) -> Arrow:
        return Arrow(self.source, self.target)

    def _key(self):
        return (self.rule, self.mode, self.params, self.children,
                self.source, self.target)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProofTerm):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"ProofTerm({self.rule}: {self.arrow})"

    def size(self) -> int:
        """Number of inference nodes, identities excluded."""
        own = 0 if self.rule == "id" else 1
        return own + sum(c.size() for c in self.children)


def pid(a: Formula) -> ProofTerm:
    return ProofTerm("id", None, (a,), (), a, a)


def compose(g: ProofTerm, f: ProofTerm) -> ProofTerm:
    """g after f."""
    if f.target != g.source:
        raise ProverError(
            f"cannot compose: {print_formula(f.target)} != {print_formula(g.source)}"
        )
    return ProofTerm("compose", None, (), (g, f), f.source, g.target)


def compose_opt(g: ProofTerm, f: ProofTerm) -> ProofTerm:
    """Composition that drops identity factors."""
    if f.rule == "id":
        if f.target != g.source:
            raise ProverError("endpoint mismatch in composition")
        return g
    if g.rule == "id":
        if f.target != g.source:
            raise ProverError("endpoint mismatch in composition")
        return f
    return compose(g, f)


def mon_tensor(f: ProofTerm, g: ProofTerm) -> ProofTerm:
    return ProofTerm(
        "mon_tensor",
        None,
        (),
        (f, g),
        Tensor(f.source, g.source),
        Tensor(f.target, g.target),
    )


def mon_tensor_opt(f: ProofTerm, g: ProofTerm) -> ProofTerm:
    """Product monotonicity that collapses a pair of identities."""
    if f.rule == "id" and g.rule == "id":
        return pid(Tensor(f.source, g.source))
    return mon_tensor(f, g)


def mon_over(f: ProofTerm, g: ProofTerm) -> ProofTerm:
    # f: A -> B, g: C -> D  gives  A/D -> B/C
    return ProofTerm(
        "mon_over",
        None,
        (),
        (f, g),
        Over(f.source, g.target),
        Over(f.target, g.source),
    )


def mon_under(f: ProofTerm, g: ProofTerm) -> ProofTerm:
    # f: A -> B, g: C -> D  gives  B\C -> A\D
    return ProofTerm(
        "mon_under",
        None,
        (),
        (f, g),
        Under(f.target, g.source),
        Under(f.source, g.target),
    )


def mon_dia(mode: Mode, f: ProofTerm) -> ProofTerm:
    return ProofTerm(
        "mon_dia", mode, (), (f,), Dia(mode, f.source), Dia(mode, f.target)
    )


def mon_box(mode: Mode, f: ProofTerm) -> ProofTerm:
    return ProofTerm(
        "mon_box", mode, (), (f,), Box(mode, f.source), Box(mode, f.target)
    )


def ev_over(a: Formula, b: Formula) -> ProofTerm:
    # (B/A) * A -> B
    return ProofTerm("ev_over", None, (a, b), (), Tensor(Over(b, a), a), b)


def coev_over(a: Formula, b: Formula) -> ProofTerm:
    # B -> (B*A)/A
    return ProofTerm("coev_over", None, (a, b), (), b, Over(Tensor(b, a), a))


def ev_under(a: Formula, b: Formula) -> ProofTerm:
    # A * (A\B) -> B
    return ProofTerm("ev_under", None, (a, b), (), Tensor(a, Under(a, b)), b)


def coev_under(a: Formula, b: Formula) -> ProofTerm:
    # B -> A\(A*B)
    return ProofTerm("coev_under", None, (a, b), (), b, Under(a, Tensor(a, b)))


def ev_box(mode: Mode, a: Formula) -> ProofTerm:
    return ProofTerm("ev_box", mode, (a,), (), Dia(mode, Box(mode, a)), a)


def coev_box(mode: Mode, a: Formula) -> ProofTerm:
    return ProofTerm("coev_box", mode, (a,), (), a, Box(mode, Dia(mode, a)))


def alpha(a: Formula, b: Formula, c: Formula) -> ProofTerm:
    # (A*B) * <x>C  ->  A * (B*<x>C)
    dc = Dia(Mode.X, c)
    return ProofTerm(
        "alpha",
        Mode.X,
        (a, b, c),
        (),
        Tensor(Tensor(a, b), dc),
        Tensor(a, Tensor(b, dc)),
    )


def sigma(a: Formula, b: Formula, c: Formula) -> ProofTerm:
    # (A*B) * <x>C  ->  (A*<x>C) * B
    dc = Dia(Mode.X, c)
    return ProofTerm(
        "sigma",
        Mode.X,
        (a, b, c),
        (),
        Tensor(Tensor(a, b), dc),
        Tensor(Tensor(a, dc), b),
    )


def validate(term: ProofTerm) -> Arrow:
    """Recompute the endpoints of ``term`` from scratch, checking every rule
    application; raises ProverError on any mismatch."""
    rule = term.rule
    kids = term.children
    if rule == "id":
        (a,) = term.params
        got = Arrow(a, a)
    elif rule == "compose":
        g, f = kids
        fa, ga = validate(f), validate(g)
        if fa.target != ga.source:
            raise ProverError(f"bad composition: {fa} then {ga}")
        got = Arrow(fa.source, ga.target)
    elif rule == "mon_tensor":
        f, g = kids
        fa, ga = validate(f), validate(g)
        got = Arrow(Tensor(fa.source, ga.source), Tensor(fa.target, ga.target))
    elif rule == "mon_over":
        f, g = kids
        fa, ga = validate(f), validate(g)
        got = Arrow(Over(fa.source, ga.target), Over(fa.target, ga.source))
    elif rule == "mon_under":
        f, g = kids
        fa, ga = validate(f), validate(g)
        got = Arrow(Under(fa.target, ga.source), Under(fa.source, ga.target))
    elif rule == "mon_dia":
        (f,) = kids
        fa = validate(f)
        got = Arrow(Dia(term.mode, fa.source), Dia(term.mode, fa.target))
    elif rule == "mon_box":
        (f,) = kids
        fa = validate(f)
        got = Arrow(Box(term.mode, fa.source), Box(term.mode, fa.target))
    elif rule == "ev_over":
        a, b = term.params
        got = Arrow(Tensor(Over(b, a), a), b)
    elif rule == "coev_over":
        a, b = term.params
        got = Arrow(b, Over(Tensor(b, a), a))
    elif rule == "ev_under":
        a, b = term.params
        got = Arrow(Tensor(a, Under(a, b)), b)
    elif rule == "coev_under":
        a, b = term.params
        got = Arrow(b, Under(a, Tensor(a, b)))
    elif rule == "ev_box":
        (a,) = term.params
        got = Arrow(Dia(term.mode, Box(term.mode, a)), a)
    elif rule == "coev_box":
        (a,) = term.params
        got = Arrow(a, Box(term.mode, Dia(term.mode, a)))
    elif rule == "alpha":
        a, b, c = term.params
        if term.mode is not Mode.X:
            raise ProverError("alpha is restricted to the extraction mode")
        dc = Dia(Mode.X, c)
        got = Arrow(Tensor(Tensor(a, b), dc), Tensor(a, Tensor(b, dc)))
    elif rule == "sigma":
        a, b, c = term.params
        if term.mode is not Mode.X:
            raise ProverError("sigma is restricted to the extraction mode")
        dc = Dia(Mode.X, c)
        got = Arrow(Tensor(Tensor(a, b), dc), Tensor(Tensor(a, dc), b))
    else:
        raise ProverError(f"unknown rule {rule!r}")
    if got.source != term.source or got.target != term.target:
        raise ProverError(f"stored endpoints disagree for {rule}: {got} vs {term.arrow}")
    return got


# ---------------------------------------------------------------------------
# Residuation (derived) and structural application


class ResForm(enum.Enum):
    """The six invertible residuation steps."""

    TENSOR_TO_OVER = "tensor_to_over"  # A*B -> C   =>  A -> C/B
    OVER_TO_TENSOR = "over_to_tensor"  # A -> C/B   =>  A*B -> C
    TENSOR_TO_UNDER = "tensor_to_under"  # A*B -> C  =>  B -> A\C
    UNDER_TO_TENSOR = "under_to_tensor"  # B -> A\C  =>  A*B -> C
    DIA_TO_BOX = "dia_to_box"  # <m>A -> B  =>  A -> [m]B
    BOX_TO_DIA = "box_to_dia"  # A -> [m]B  =>  <m>A -> B

    @property
    def inverse(self) -> "ResForm":
        pairs = {
            ResForm.TENSOR_TO_OVER: ResForm.OVER_TO_TENSOR,
            ResForm.OVER_TO_TENSOR: ResForm.TENSOR_TO_OVER,
            ResForm.TENSOR_TO_UNDER: ResForm.UNDER_TO_TENSOR,
            ResForm.UNDER_TO_TENSOR: ResForm.TENSOR_TO_UNDER,
            ResForm.DIA_TO_BOX: ResForm.BOX_TO_DIA,
            ResForm.BOX_TO_DIA: ResForm.DIA_TO_BOX,
        }
        return pairs[self]


def residuate(goal: Arrow, form: ResForm) -> Arrow:
    """Apply one invertible residuation step to a goal."""
    s, t = goal.source, goal.target
    match form:
        case ResForm.TENSOR_TO_OVER:
            if not isinstance(s, Tensor):
                raise ProverError(f"source of {goal} is not a product")
            return Arrow(s.left, Over(t, s.right))
        case ResForm.OVER_TO_TENSOR:
            if not isinstance(t, Over):
                raise ProverError(f"target of {goal} is not a rightward slash")
            return Arrow(Tensor(s, t.arg), t.result)
        case ResForm.TENSOR_TO_UNDER:
            if not isinstance(s, Tensor):
                raise ProverError(f"source of {goal} is not a product")
            return Arrow(s.right, Under(s.left, t))
        case ResForm.UNDER_TO_TENSOR:
            if not isinstance(t, Under):
                raise ProverError(f"target of {goal} is not a leftward slash")
            return Arrow(Tensor(t.arg, s), t.result)
        case ResForm.DIA_TO_BOX:
            if not isinstance(s, Dia):
                raise ProverError(f"source of {goal} is not a diamond formula")
            return Arrow(s.body, Box(s.mode, t))
        case ResForm.BOX_TO_DIA:
            if not isinstance(t, Box):
                raise ProverError(f"target of {goal} is not a box formula")
            return Arrow(Dia(t.mode, s), t.body)
    raise ProverError(f"unknown residuation form {form!r}")


def apply_structural(
    tree: Formula, rule: str, position: Path
) -> tuple[Formula, ProofTerm]:
    """Rewrite ``(A*B)*<x>C`` at ``position`` by alpha or sigma.

    Returns the rewritten tree together with the proof term for the move
    lifted to the whole tree.  Requesting a move on an island-mode diamond is
    an error: that family has no structural rules.
    """
    if rule not in ("alpha", "sigma"):
        raise ProverError(f"unknown structural rule {rule!r}")
    sub = subformula_at(tree, position)
    if not (
        isinstance(sub, Tensor)
        and isinstance(sub.left, Tensor)
        and isinstance(sub.right, Dia)
    ):
        raise ProverError(
            f"no (A*B)*<m>C pattern at {format_path(position)} in {print_formula(tree)}"
        )
    if sub.right.mode is not Mode.X:
        raise ProverError(
            f"structural rule {rule} requested at {format_path(position)}: the "
            f"diamond there has mode {sub.right.mode.value} (island); only mode "
            f"{Mode.X.value} has structural rules"
        )
    a, b, c = sub.left.left, sub.left.right, sub.right.body
    inner = alpha(a, b, c) if rule == "alpha" else sigma(a, b, c)
    lifted = _lift(tree, position, inner)
    return _replace_or_root(tree, position, inner.target), lifted


def _lift(ctx: Formula, path: Path, inner: ProofTerm) -> ProofTerm:
    """Lift an arrow on a covariant subformula position to the whole formula."""
    if not path:
        return inner
    step, rest = path[0], path[1:]
    match ctx:
        case Tensor(l, r):
            if step == "L":
                return mon_tensor(_lift(l, rest, inner), pid(r))
            if step == "R":
                return mon_tensor(pid(l), _lift(r, rest, inner))
        case Dia(mode, body):
            if step == "B":
                return mon_dia(mode, _lift(body, rest, inner))
        case Box(mode, body):
            if step == "B":
                return mon_box(mode, _lift(body, rest, inner))
    raise ProverError(
        f"cannot lift through {format_path(path)} in {print_formula(ctx)}: "
        "only product and modal positions are covariant"
    )


# ---------------------------------------------------------------------------
# Search


@dataclass
class SearchConfig:
    """Knobs for the backward-chaining search.

    ``max_proof_size`` counts non-invertible steps (applications,
    monotonicity splits, modal unlocks, structural moves); identities and
    residuation bookkeeping are free.  ``max_structural_per_dia`` caps
    chains of consecutive structural moves on one goal line, which bounds
    the churn any single diamond hypothesis can cause; ``None`` means twice
    the antecedent tree depth of the goal at hand.  Disabling ``memoize``
    or ``count_pruning`` is only useful for conservativity tests.
    """

    max_proof_size: int = 40
    find_all: bool = False
    max_proofs: int = 64
    max_structural_per_dia: int | None = None
    memoize: bool = True
    count_pruning: bool = True


@dataclass
class SearchStats:
    goals_expanded: int = 0
    deepest_failure: Arrow | None = None
    _deepest_size: int = 0

    def record_failure(self, lhs: Formula, rhs: Formula) -> None:
        s = size(lhs)
        if s > self._deepest_size:
            self._deepest_size = s
            self.deepest_failure = Arrow(lhs, rhs)


@dataclass
class SearchResult:
    proofs: tuple[ProofTerm, ...]
    bounded: bool
    stats: SearchStats

    @property
    def ok(self) -> bool:
        return bool(self.proofs)


def _depth(f: Formula) -> int:
    match f:
        case Atom(_):
            return 1
        case Tensor(l, r) | Over(l, r) | Under(l, r):
            return 1 + max(_depth(l), _depth(r))
        case Dia(_, b) | Box(_, b):
            return 1 + _depth(b)
    return 1


def _strip(lhs: Formula, rhs: Formula):
    """Strip slashes and boxes off the succedent (invertible steps)."""
    steps: list[tuple[str, Formula | Mode]] = []
    while True:
        match rhs:
            case Over(c, b):
                steps.append(("over", b))
                lhs, rhs = Tensor(lhs, b), c
            case Under(a, c):
                steps.append(("under", a))
                lhs, rhs = Tensor(a, lhs), c
            case Box(m, b):
                steps.append(("box", m))
                lhs, rhs = Dia(m, lhs), b
            case _:
                return lhs, rhs, steps


def _unstrip(term: ProofTerm, steps) -> ProofTerm:
    """Rebuild a proof of the unstripped goal from a proof of the stripped one."""
    for kind, param in reversed(steps):
        src = term.source
        if kind == "over":
            # term: L*B -> C  becomes  L -> C/B
            assert isinstance(src, Tensor)
            l, b = src.left, src.right
            term = compose(mon_over(term, pid(b)), coev_over(b, l))
        elif kind == "under":
            # term: A*L -> C  becomes  L -> A\C
            assert isinstance(src, Tensor)
            a, l = src.left, src.right
            term = compose(mon_under(pid(a), term), coev_under(a, l))
        else:
            # term: <m>L -> B  becomes  L -> [m]B
            assert isinstance(src, Dia)
            m, l = src.mode, src.body
            term = compose(mon_box(m, term), coev_box(m, l))
    return term


def _covariant_positions(f: Formula, path: Path = ()) -> Iterator[tuple[Path, Formula]]:
    """Preorder walk of positions reachable through products and modals."""
    yield path, f
    match f:
        case Tensor(l, r):
            yield from _covariant_positions(l, path + ("L",))
            yield from _covariant_positions(r, path + ("R",))
        case Dia(_, b) | Box(_, b):
            yield from _covariant_positions(b, path + ("B",))


class Prover:
    """Backward-chaining prover with shared memo tables.

    Reusing one instance across many goals (as the sentence search does)
    shares failure caches between them.
    """

    def __init__(self, config: SearchConfig | None = None):
        self.config = config or SearchConfig()
        self._perm_fail: set = set()
        self._fail_at: dict = {}
        self._success: dict = {}
        self.stats = SearchStats()

    # -- public API

    def prove(self, goal: Arrow) -> SearchResult:
        self.stats = SearchStats()
        proofs, cut = self._search(
            goal.source, goal.target, self.config.max_proof_size, 0
        )
        terms = []
        for term, _size in proofs:
            if term.source != goal.source or term.target != goal.target:
                raise ProverError("internal error: proof endpoints drifted")
            terms.append(term)
        return SearchResult(tuple(terms), cut, self.stats)

    # -- core search

    def _search(self, lhs0, rhs0, budget, consec):
        if lhs0 == rhs0:
            return [(pid(lhs0), 0)], False
        lhs, rhs, steps = _strip(lhs0, rhs0)
        if self.config.count_pruning and count_vector(lhs) != count_vector(rhs):
            return [], False
        key = (lhs, rhs, consec)
        if self.config.memoize:
            if key in self._perm_fail:
                return [], False
            failed_at = self._fail_at.get(key)
            if failed_at is not None and budget <= failed_at:
                return [], True
            if not self.config.find_all:
                hit = self._success.get(key)
                if hit is not None and hit[1] <= budget:
                    return [(_unstrip(hit[0], steps), hit[1])], False

        self.stats.goals_expanded += 1
        found: list[tuple[ProofTerm, int]] = []
        cut = False
        limit = 1 if not self.config.find_all else self.config.max_proofs

        if lhs == rhs:
            # close by identity, and only by identity
            found.append((pid(lhs), 0))
        else:
            for subgoals, build, new_consec in self._branches(lhs, rhs, consec):
                if budget < 1:
                    cut = True
                    break
                sols, sub_cut = self._prove_list(
                    subgoals, budget - 1, new_consec, limit - len(found)
                )
                cut = cut or sub_cut
                for terms, total in sols:
                    found.append((build(terms), total + 1))
                if len(found) >= limit:
                    break

        if not found:
            self.stats.record_failure(lhs, rhs)
            if self.config.memoize:
                if cut:
                    prev = self._fail_at.get(key, -1)
                    if budget > prev:
                        self._fail_at[key] = budget
                else:
                    self._perm_fail.add(key)
            return [], cut
        if self.config.memoize and not self.config.find_all:
            term, size_ = found[0]
            prev = self._success.get(key)
            if prev is None or size_ < prev[1]:
                self._success[key] = (term, size_)
        return [(_unstrip(t, steps), s) for t, s in found], cut

    def _prove_list(self, goals, budget, consec, limit):
        """Joint proofs of ``goals``: returns (solutions, cut) where each
        solution is (terms tuple, total size).

        The structural-chain counter applies to the first goal only; the
        rest are fresh antecedents.
        """
        if not goals:
            return [((), 0)], False
        (l0, r0), rest = goals[0], goals[1:]
        sols, cut = self._search(l0, r0, budget, consec)
        out: list[tuple[tuple[ProofTerm, ...], int]] = []
        for term, size_ in sols:
            rest_sols, rcut = self._prove_list(
                rest, budget - size_, 0, limit - len(out)
            )
            cut = cut or rcut
            for terms, total in rest_sols:
                out.append(((term,) + terms, size_ + total))
                if len(out) >= limit:
                    return out, cut
        return out, cut

    def _branches(self, lhs, rhs, consec):
        """Enumerate (subgoals, build, consec') in the documented order:
        direct monotonicity, applications, modal unlock, alpha, sigma.
        Identity closure is handled before branching.
        """
        # direct monotonicity on the (stripped) succedent
        if isinstance(rhs, Tensor) and isinstance(lhs, Tensor):
            a, b, c, d = lhs.left, lhs.right, rhs.left, rhs.right
            yield (
                [(a, c), (b, d)],
                lambda ts: mon_tensor(ts[0], ts[1]),
                0,
            )
        if (
            isinstance(rhs, Dia)
            and isinstance(lhs, Dia)
            and lhs.mode is rhs.mode
        ):
            m, a, b = lhs.mode, lhs.body, rhs.body
            yield [(a, b)], lambda ts, m=m: mon_dia(m, ts[0]), 0
        positions = list(_covariant_positions(lhs))
        # slash applications at any covariant product node
        for path, sub in positions:
            if not isinstance(sub, Tensor):
                continue
            l, r = sub.left, sub.right
            if isinstance(l, Over):
                res, arg = l.result, l.arg
                rewritten = _replace_or_root(lhs, path, res)

                def build_fwd(ts, path=path, l=l, res=res, arg=arg):
                    g, rest = ts[0], ts[1]
                    inner = compose_opt(ev_over(arg, res), mon_tensor_opt(pid(l), g))
                    return compose_opt(rest, _lift(lhs, path, inner))

                yield [(r, arg), (rewritten, rhs)], build_fwd, 0
            if isinstance(r, Under):
                arg, res = r.arg, r.result
                rewritten = _replace_or_root(lhs, path, res)

                def build_bwd(ts, path=path, r=r, res=res, arg=arg):
                    g, rest = ts[0], ts[1]
                    inner = compose_opt(ev_under(arg, res), mon_tensor_opt(g, pid(r)))
                    return compose_opt(rest, _lift(lhs, path, inner))

                yield [(l, arg), (rewritten, rhs)], build_bwd, 0
        # unlock a diamond-box pair
        for path, sub in positions:
            if (
                isinstance(sub, Dia)
                and isinstance(sub.body, Box)
                and sub.body.mode is sub.mode
            ):
                inner_f = sub.body.body
                rewritten = _replace_or_root(lhs, path, inner_f)

                def build_unlock(ts, path=path, m=sub.mode, a=inner_f):
                    return compose_opt(ts[0], _lift(lhs, path, ev_box(m, a)))

                yield [(rewritten, rhs)], build_unlock, 0
        # structural moves, alpha before sigma
        cap = self.config.max_structural_per_dia
        if cap is None:
            cap = 2 * _depth(lhs)
        if consec < cap:
            for rule in ("alpha", "sigma"):
                for path, sub in positions:
                    if not (
                        isinstance(sub, Tensor)
                        and isinstance(sub.left, Tensor)
                        and isinstance(sub.right, Dia)
                        and sub.right.mode is Mode.X
                    ):
                        continue
                    a, b, c = sub.left.left, sub.left.right, sub.right.body
                    inner = alpha(a, b, c) if rule == "alpha" else sigma(a, b, c)
                    rewritten = _replace_or_root(lhs, path, inner.target)

                    def build_struct(ts, path=path, inner=inner):
                        return compose_opt(ts[0], _lift(lhs, path, inner))

                    yield [(rewritten, rhs)], build_struct, consec + 1


def _replace_or_root(whole: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    return replace_at(whole, path, new)


def prove(goal: Arrow, config: SearchConfig | None = None) -> SearchResult:
    """One-shot proof search for a single arrow."""
    return Prover(config).prove(goal)


# ---------------------------------------------------------------------------
# Sentence-level search


@dataclass(frozen=True)
class BracketNode:
    """A binary bracketing over word indices; ``wrap`` marks island brackets."""

    left: "BracketNode | int"
    right: "BracketNode | int"
    wrap: bool = False


@dataclass(frozen=True)
class BracketLeaf:
    index: int
    wrap: bool = False


BracketTree = "BracketNode | BracketLeaf"


def bracket_leaves(tree) -> list[int]:
    if isinstance(tree, BracketLeaf):
        return [tree.index]
    return bracket_leaves(tree.left) + bracket_leaves(tree.right)


def format_bracketing(tree, words: Sequence[str]) -> str:
    if isinstance(tree, BracketLeaf):
        s = words[tree.index]
    else:
        s = f"({format_bracketing(tree.left, words)} {format_bracketing(tree.right, words)})"
    return f"i:{s}" if tree.wrap else s


def parse_bracketing(text: str, words: Sequence[str]):
    """Parse ``(w1 (w2 w3))`` style bracketings; ``i:(...)`` marks an island."""
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0
    next_word = 0

    def peek() -> str:
        if pos >= len(toks):
            raise ProverError(f"bracketing {text!r} ends unexpectedly")
        return toks[pos]

    def node():
        nonlocal pos, next_word
        wrap = False
        tok = peek()
        if tok == "i:":
            wrap = True
            pos += 1
            tok = peek()
        elif tok.startswith("i:") and tok != "i:":
            toks[pos] = tok[2:]
            wrap = True
            tok = toks[pos]
        if tok == "(":
            pos += 1
            left = node()
            right = node()
            if peek() != ")":
                raise ProverError(f"expected ')' in bracketing {text!r}")
            pos += 1
            return BracketNode(left, right, wrap)
        pos += 1
        if next_word >= len(words) or tok != words[next_word]:
            raise ProverError(
                f"bracketing word {tok!r} does not match sentence word "
                f"{words[next_word] if next_word < len(words) else '<end>'!r}"
            )
        idx = next_word
        next_word += 1
        return BracketLeaf(idx, wrap)

    tree = node()
    if pos != len(toks) or next_word != len(words):
        raise ProverError(f"bracketing {text!r} does not cover the sentence")
    return tree


def _enumerate_trees(i: int, j: int) -> Iterator:
    """All binary trees over leaves i..j-1, fully right-branching first."""
    if j - i == 1:
        yield BracketLeaf(i)
        return
    for k in range(i + 1, j):
        for left in _enumerate_trees(i, k):
            for right in _enumerate_trees(k, j):
                yield BracketNode(left, right)


def _with_wrap(tree, target) -> "BracketNode | BracketLeaf":
    if tree is target:
        if isinstance(tree, BracketLeaf):
            return BracketLeaf(tree.index, True)
        return BracketNode(tree.left, tree.right, True)
    if isinstance(tree, BracketLeaf):
        return tree
    left = _with_wrap(tree.left, target)
    right = _with_wrap(tree.right, target)
    if left is tree.left and right is tree.right:
        return tree
    return BracketNode(left, right, tree.wrap)


def _has_wrap(tree) -> bool:
    if tree.wrap:
        return True
    if isinstance(tree, BracketLeaf):
        return False
    return _has_wrap(tree.left) or _has_wrap(tree.right)


def _locked(f: Formula) -> bool:
    """True for types whose result spine is box-sealed (island-locked heads)."""
    while isinstance(f, Over):
        f = f.result
    return isinstance(f, Box)


def _leftmost_leaf(tree) -> int:
    while isinstance(tree, BracketNode):
        tree = tree.left
    return tree.index


def _subtrees(tree) -> Iterator:
    yield tree
    if isinstance(tree, BracketNode):
        yield from _subtrees(tree.left)
        yield from _subtrees(tree.right)


def _wrap_choices(tree, types: Sequence[Formula]) -> Iterator:
    """The tree unchanged, plus one island wrap over any constituent whose
    leftmost word carries a box-locked type.  At most one wrap per locked
    word is ever useful for the constructions covered here."""
    yield tree
    locked_leaves = {i for i, t in enumerate(types) if _locked(t)}
    if not locked_leaves:
        return
    for sub in _subtrees(tree):
        if _leftmost_leaf(sub) in locked_leaves:
            yield _with_wrap(tree, sub)


def _antecedent(tree, types: Sequence[Formula]) -> Formula:
    if isinstance(tree, BracketLeaf):
        f = types[tree.index]
    else:
        f = Tensor(_antecedent(tree.left, types), _antecedent(tree.right, types))
    return Dia(Mode.I, f) if tree.wrap else f


@dataclass
class SentenceParse:
    bracketing: "BracketNode | BracketLeaf"
    types: tuple[Formula, ...]
    antecedent: Formula
    proof: ProofTerm


@dataclass
class SentenceResult:
    parses: tuple[SentenceParse, ...]
    bounded: bool
    diagnostics: str

    @property
    def ok(self) -> bool:
        return bool(self.parses)


MAX_SEARCH_WORDS = 10


def derive_sentence(
    lexicon,
    words: Sequence[str],
    goal: Formula,
    bracketing=None,
    config: SearchConfig | None = None,
) -> SentenceResult:
    """Search for derivations of ``words -> goal``.

    ``lexicon`` is either a mapping from word to a sequence of type formulas
    or an object with a ``types(word)`` method.  ``bracketing`` is a
    :func:`parse_bracketing`-style tree (or its textual form); ``None``
    enumerates all binary bracketings, right-branching first, and also tries
    island brackets around constituents headed by a box-locked type.
    """
    config = config or SearchConfig()
    if hasattr(lexicon, "types"):
        lookup = lexicon.types
    else:
        lookup = lambda w: lexicon[w]
    choices: list[Sequence[Formula]] = []
    for w in words:
        try:
            entry_types = list(lookup(w))
        except KeyError:
            raise ProverError(f"word {w!r} is not in the lexicon") from None
        if not entry_types:
            raise ProverError(f"word {w!r} has no types in the lexicon")
        choices.append(entry_types)

    if bracketing is None:
        if len(words) > MAX_SEARCH_WORDS:
            raise ProverError(
                f"bracketing search is capped at {MAX_SEARCH_WORDS} words; "
                "pass an explicit bracketing"
            )
        trees = list(_enumerate_trees(0, len(words)))
        explicit = False
    else:
        if isinstance(bracketing, str):
            bracketing = parse_bracketing(bracketing, words)
        if sorted(bracket_leaves(bracketing)) != list(range(len(words))):
            raise ProverError("bracketing does not cover the sentence words")
        trees = [bracketing]
        explicit = _has_wrap(bracketing)

    prover = Prover(config)
    parses: list[SentenceParse] = []
    bounded = False
    for assignment in itertools.product(*choices):
        for tree in trees:
            candidates = [tree] if explicit else list(_wrap_choices(tree, assignment))
            for cand in candidates:
                antecedent = _antecedent(cand, assignment)
                result = prover.prove(Arrow(antecedent, goal))
                bounded = bounded or result.bounded
                for proof in result.proofs:
                    parses.append(SentenceParse(cand, tuple(assignment), antecedent, proof))
                    if not config.find_all:
                        return SentenceResult(
                            tuple(parses), bounded, "derivable"
                        )
                if config.find_all and len(parses) >= config.max_proofs:
                    return SentenceResult(tuple(parses), bounded, "derivable")
    if parses:
        return SentenceResult(tuple(parses), bounded, "derivable")
    deepest = prover.stats.deepest_failure
    diag = "no bracketing succeeded"
    if deepest is not None:
        diag += f"; deepest failed subgoal: {deepest}"
    return SentenceResult((), bounded, diag)


# ---------------------------------------------------------------------------
# Serialization


def proof_to_dict(term: ProofTerm) -> dict:
    d: dict = {"rule": term.rule}
    if term.mode is not None:
        d["mode"] = term.mode.value
    d["children"] = [proof_to_dict(c) for c in term.children]
    d["source"] = print_formula(term.source)
    d["target"] = print_formula(term.target)
    return d


def proof_to_json(term: ProofTerm) -> str:
    return json.dumps(proof_to_dict(term), indent=2)


def proof_from_dict(d: Mapping) -> ProofTerm:
    rule = d["rule"]
    mode = Mode(d["mode"]) if "mode" in d else None
    children = tuple(proof_from_dict(c) for c in d.get("children", ()))
    source = parse_formula(d["source"])
    target = parse_formula(d["target"])
    params: tuple[Formula, ...] = ()
    if rule == "id":
        params = (source,)
    elif rule == "ev_over":
        assert isinstance(source, Tensor)
        params = (source.right, target)
    elif rule == "coev_over":
        assert isinstance(target, Over)
        params = (target.arg, source)
    elif rule == "ev_under":
        assert isinstance(source, Tensor)
        params = (source.left, target)
    elif rule == "coev_under":
        assert isinstance(target, Under)
        params = (target.arg, source)
    elif rule == "ev_box":
        params = (target,)
    elif rule == "coev_box":
        params = (source,)
    elif rule in ("alpha", "sigma"):
        assert isinstance(source, Tensor) and isinstance(source.left, Tensor)
        assert isinstance(source.right, Dia)
        params = (source.left.left, source.left.right, source.right.body)
    term = ProofTerm(rule, mode, params, children, source, target)
    validate(term)
    return term


def proof_from_json(text: str) -> ProofTerm:
    return proof_from_dict(json.loads(text))

"""Lexicons: typed words, derived entries, and their Frobenius networks.

A lexicon file is line oriented.  Blank lines and ``#`` comments pass
through untouched; an entry line reads

    word :: type [:: sem=<network>] [:: derived-from=<word> steps=<list>]

Types may use the ``iv`` macro for ``np\\s``.  A derived entry records
the type-shifting steps that produce its type from a base entry of
another word (usually the same word's plain type); loading replays the
steps and refuses the file if the printed result differs.  Steps:

    geach(C)            X/Z   becomes  (X/C)/(Z/C)
    distribute          pushes a /C inside a boxed adjunct or a product
    expand(a, F)        the unique atom ``a`` becomes the formula F
    drop_modal(a, k)    strips <x>[x] off the k-th decorated ``a``
    add_modal(a, k)     wraps the k-th occurrence of ``a`` in <x>[x]

``geach``, ``expand``, ``drop_modal`` and ``add_modal`` are justified
by derivable arrows, which loading checks with the prover.  The
``distribute`` step is a lexical postulate with no underlying arrow; it
re-scopes at the meaning level instead.

Every entry owns a semantic state: either a named Frobenius network
from the registry or, by default, a single content box labelled with
the word.  The state's boundary must match the interpretation of the
entry's type, which loading also checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diagram import Diagram, box, frobenius_network, spider, tensor_par, Builder
from .formula import (
    Atom,
    Box,
    Dia,
    Formula,
    FormulaError,
    Mode,
    Over,
    Polarity,
    Tensor,
    Under,
    parse_formula,
    polarity_at,
    print_formula,
    replace_at,
    subformula_at,
    iter_atoms,
)
from .prover import Arrow, SearchConfig, prove
from .translate import interpret_type


class LexiconError(ValueError):
    pass


IV = Under(Atom("np"), Atom("s"))


def _expand_macros(f: Formula) -> Formula:
    match f:
        case Atom("iv"):
            return IV
        case Atom():
            return f
        case Tensor(l, r):
            return Tensor(_expand_macros(l), _expand_macros(r))
        case Over(res, arg):
            return Over(_expand_macros(res), _expand_macros(arg))
        case Under(arg, res):
            return Under(_expand_macros(arg), _expand_macros(res))
        case Dia(m, b):
            return Dia(m, _expand_macros(b))
        case Box(m, b):
            return Box(m, _expand_macros(b))
    raise LexiconError(f"cannot expand macros in {f!r}")


def parse_type(text: str) -> Formula:
    return _expand_macros(parse_formula(text))


# -- path-based type rewrites

Path = tuple[str, ...]


def geach_expand(t: Formula, pos: Path, c: Formula) -> Formula:
    """A/B at pos becomes (A/C)/(B/C).

    Backed by a derivable arrow when C carries the extraction marking,
    since the rebracketing it needs is then licensed."""
    match subformula_at(t, pos):
        case Over(a, b):
            return replace_at(t, pos, Over(Over(a, c), Over(b, c)))
        case sub:
            raise LexiconError(f"geach wants a slash type, got {print_formula(sub)}")


def s_distribute(t: Formula, pos: Path) -> Formula:
    """(A\\B)/C at pos, possibly with a box over the backslash, becomes
    (A/C)\\(B/C) with the box carried along.

    Directional S combinator; duplicates C, so there is no underlying
    arrow and the rewrite stands as a lexical postulate."""
    match subformula_at(t, pos):
        case Over(Box(m, Under(a, b)), c):
            new = Box(m, Under(Over(a, c), Over(b, c)))
        case Over(Under(a, b), c):
            new = Under(Over(a, c), Over(b, c))
        case sub:
            raise LexiconError(
                f"s_distribute wants (A\\B)/C, got {print_formula(sub)}"
            )
    return replace_at(t, pos, new)


def product_expand(
    t: Formula, pos: Path, replacement: Formula, witness: Arrow | None = None
) -> Formula:
    """Replace the subformula at an antitone position.

    The witness arrow replacement -> original justifies the move and is
    checked with the prover; by default it is exactly that arrow."""
    sub = subformula_at(t, pos)
    if polarity_at(t, pos) is not Polarity.NEG:
        raise LexiconError("product_expand only applies at antitone positions")
    if witness is None:
        witness = Arrow(replacement, sub)
    if not prove(witness, _CHECK_CONFIG).ok:
        raise LexiconError(
            f"expansion witness {print_formula(witness.source)} -> "
            f"{print_formula(witness.target)} is not derivable"
        )
    return replace_at(t, pos, replacement)


def prod_distribute(t: Formula, pos: Path) -> Formula:
    """(A*B)/C at an antitone position becomes (A/C)*(B/C).

    Again a postulate: the would-be justification duplicates C, which
    no linear proof can do (the atom counts of the two sides differ)."""
    if polarity_at(t, pos) is not Polarity.NEG:
        raise LexiconError("prod_distribute only applies at antitone positions")
    match subformula_at(t, pos):
        case Over(Tensor(a, b), c):
            new = Tensor(Over(a, c), Over(b, c))
        case sub:
            raise LexiconError(
                f"prod_distribute wants (A*B)/C, got {print_formula(sub)}"
            )
    return replace_at(t, pos, new)


def calibrate(t: Formula, pos: Path, edit) -> Formula:
    """Final modal adjustment: "drop" strips one diamond-box pair at
    pos, ("add", mode) wraps the subformula at pos in one."""
    sub = subformula_at(t, pos)
    match edit:
        case "drop":
            match sub:
                case Dia(m, Box(m2, body)) if m == m2:
                    return replace_at(t, pos, body)
            raise LexiconError(
                f"calibrate: no modal pair to drop at {print_formula(sub)}"
            )
        case ("add", mode):
            if isinstance(mode, str):
                mode = Mode(mode)
            return replace_at(t, pos, Dia(mode, Box(mode, sub)))
    raise LexiconError(f"unknown calibration {edit!r}")


def _decorated(inner: Formula) -> Formula:
    return Dia(Mode.X, Box(Mode.X, inner))


def _path_matches(f: Formula, atom_path, pattern: Formula) -> bool:
    if len(atom_path) < 2:
        return False
    return subformula_at(f, atom_path[:-2]) == pattern


# -- the step DSL used in lexicon files
#
# Steps name their target instead of spelling out a path; the locator
# finds the position in preorder.  Where the rewrite corresponds to a
# derivable arrow, the step emits it for the load-time prover check.


def _locate_distribute(f: Formula) -> Path:
    """First position accepting a distribution rewrite: a product under
    a slash at antitone polarity, else a boxed adjunct under a slash."""
    stack: list[tuple[Path, Formula]] = [((), f)]
    boxed: Path | None = None
    while stack:
        pos, sub = stack.pop(0)
        match sub:
            case Over(Tensor(_, _), _) if polarity_at(f, pos) is Polarity.NEG:
                return pos
            case Over(Box(_, Under(_, _)), _) if boxed is None:
                boxed = pos
        match sub:
            case Tensor(l, r) | Over(l, r) | Under(l, r):
                stack.append((pos + ("L",), l))
                stack.append((pos + ("R",), r))
            case Dia(_, b) | Box(_, b):
                stack.append((pos + ("B",), b))
    if boxed is not None:
        return boxed
    raise LexiconError(f"no distributable shape in {print_formula(f)}")


def _modal_calibration(f: Formula, name: str, k: int, add: bool):
    """Shared locator and arrow bookkeeping for drop/add steps.

    Stripping or adding a marking collapses or introduces a counit, so
    one side always derives the other; polarity decides which, and the
    emitted arrow records it for the load-time check."""
    if add:
        hits = [p for p, a, _ in iter_atoms(f) if a == name]
        kind = "occurrences of"
    else:
        target = _decorated(Atom(name))
        hits = [
            p[:-2]
            for p, a, _ in iter_atoms(f)
            if a == name and _path_matches(f, p, target)
        ]
        kind = "decorated"
    if k >= len(hits):
        raise LexiconError(
            f"only {len(hits)} {kind} {name!r} in {print_formula(f)}"
        )
    path = hits[k]
    new = calibrate(f, path, ("add", Mode.X) if add else "drop")
    stronger_first = polarity_at(f, path) is (Polarity.POS if add else Polarity.NEG)
    return new, (Arrow(new, f) if stronger_first else Arrow(f, new))


_STEP_RE = re.compile(r"^(\w+)(?:\((.*)\))?$")

_STEP_OPS = frozenset({"geach", "distribute", "expand", "drop_modal", "add_modal"})


def parse_steps(text: str):
    steps = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = _STEP_RE.match(chunk)
        if not m:
            raise LexiconError(f"cannot parse step {chunk!r}")
        op, raw_args = m.group(1), m.group(2)
        if op not in _STEP_OPS:
            raise LexiconError(f"unknown step {op!r}")
        args = [a.strip() for a in (raw_args or "").split(",") if a.strip()]
        steps.append((op, tuple(args)))
    return tuple(steps)


def run_pipeline(f: Formula, steps):
    """Run a step list and return the row after each step, paired with
    the arrow that justifies it (None for the distribution postulate)."""
    if isinstance(steps, str):
        steps = parse_steps(steps)
    rows: list[tuple[Formula, Arrow | None]] = []
    for op, args in steps:
        match op, args:
            case "geach", (c,):
                new = geach_expand(f, (), parse_type(c))
                arrow = Arrow(f, new)
            case "distribute", ():
                pos = _locate_distribute(f)
                match subformula_at(f, pos):
                    case Over(Tensor(_, _), _):
                        new = prod_distribute(f, pos)
                    case _:
                        new = s_distribute(f, pos)
                arrow = None
            case "expand", (name, repl):
                paths = [p for p, a, _ in iter_atoms(f) if a == name]
                if len(paths) != 1:
                    raise LexiconError(
                        f"expand wants exactly one {name!r} in "
                        f"{print_formula(f)}, found {len(paths)}"
                    )
                replacement = parse_type(repl)
                new = product_expand(f, paths[0], replacement)
                arrow = Arrow(f, new)
            case "drop_modal", (name, k):
                new, arrow = _modal_calibration(f, name, int(k), add=False)
            case "add_modal", (name, k):
                new, arrow = _modal_calibration(f, name, int(k), add=True)
            case _:
                raise LexiconError(f"unknown step {op}({', '.join(args)})")
        rows.append((new, arrow))
        f = new
    return rows


def apply_steps(f: Formula, steps) -> tuple[Formula, tuple[Arrow, ...]]:
    """Run a step list, collecting the arrows that justify it."""
    rows = run_pipeline(f, steps)
    final = rows[-1][0] if rows else f
    return final, tuple(a for _, a in rows if a is not None)


# -- conjoinability (for coordination)


def is_conjoinable(f: Formula) -> bool:
    """Conjoinable types: s, and any slash type whose result is."""
    match f:
        case Atom("s"):
            return True
        case Over(result, _) | Under(_, result):
            return is_conjoinable(result)
    return False


def conjoin_states(f: Formula, p: Diagram, q: Diagram) -> Diagram:
    """Pointwise meet of two word meanings of a conjoinable type.

    Implemented wire by wire with merging spiders, which on basis
    inputs reduces to the usual clause: the conjunction applied to an
    argument is the meet of the two applications.
    """
    if not is_conjoinable(f):
        raise LexiconError(f"{print_formula(f)} is not a conjoinable type")
    wtype = interpret_type(f)
    if tuple(p.outputs) != tuple(wtype) or tuple(q.outputs) != tuple(wtype):
        raise LexiconError("conjoin_states: boundary mismatch")
    both = tensor_par(p, q)
    bld = Builder()
    for sp, dl in both.outputs:
        bld.add_input(sp, dl)
    n = len(wtype)
    for k, (sp, dl) in enumerate(wtype):
        bld.add_output(sp, dl)
        nid = bld.add_node("spider", (sp, sp), (sp,))
        bld.wire(("I", k), ("i", nid, 0))
        bld.wire(("I", n + k), ("i", nid, 1))
        bld.wire(("o", nid, 0), ("O", k))
    from .diagram import compose

    return compose(both, bld.diagram())


# -- named Frobenius networks


NETWORKS: dict[str, str] = {
    # relative pronoun: merge head noun, output and gap; discard the
    # clause's sentence wire
    "relative": """
        out h o gap sv
        spider N : h o gap
        spider S : sv
    """,
    # co-argument relative pronoun: the subject factor's result feeds
    # the verb factor's subject; head, output and both gaps merge
    "relative_coarg": """
        out h o vgap vs vsubj sgap sres
        spider N : h o vgap sgap
        spider N : vsubj sres
        spider S : vs
    """,
    # two-gap relative pronoun: both gaps merge with the head; the
    # complement factor plugs into the hypothetical complement slot
    "relative_two_gap": """
        out h o cgap cs csubj pgap hypn hyps sv
        spider N : h o cgap pgap
        spider N : csubj hypn
        spider S : cs hyps
        spider S : sv
    """,
    # coordinating adjunct: one spider per space merges the host
    # phrase, the result and the adjunct complement
    "coord_adjunct": """
        out hs hsubj rsubj rs gs gsubj
        spider N : hsubj rsubj gsubj
        spider S : hs rs gs
    """,
    # the same with a shared gap threaded through all three parts
    "coord_adjunct_gap": """
        out hgap hs hsubj rsubj rs rgap ggap gs gsubj
        spider N : hsubj rsubj gsubj
        spider S : hs rs gs
        spider N : hgap rgap ggap
    """,
    # object-control wrapper: lexical content plus a copy of the object
    # into the complement's understood subject
    "control_verb": """
        out subj s cs csubj obj
        box @ : subj s cs x
        spider N : x csubj obj
    """,
}


@dataclass(frozen=True)
class LexEntry:
    word: str
    syn: Formula
    syn_text: str
    sem: str | None = None  # network name; None means a plain content box
    derived_from: str | None = None
    steps_text: str | None = None

    def state(self) -> Diagram:
        """The entry's meaning as a closed diagram."""
        wtype = interpret_type(self.syn)
        if self.sem is None:
            return box(self.word, (), wtype)
        try:
            spec = NETWORKS[self.sem]
        except KeyError:
            raise LexiconError(f"unknown network {self.sem!r}") from None
        return frobenius_network(spec, out_types=wtype, word=self.word)


_CHECK_CONFIG = SearchConfig(max_proof_size=20)


class Lexicon:
    def __init__(self):
        self.entries: list[LexEntry] = []
        self._raw: list[str] = []
        self._by_word: dict[str, list[LexEntry]] = {}

    # -- building

    def add(self, line: str, validate: bool = True) -> LexEntry | None:
        """Add one file line (entry, comment, or blank)."""
        self._raw.append(line.rstrip("\n"))
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            return None
        fields = [f.strip() for f in stripped.split("::")]
        if len(fields) < 2:
            raise LexiconError(f"cannot parse lexicon line {line!r}")
        word, syn_text = fields[0], fields[1]
        if not word or " " in word:
            raise LexiconError(f"bad word token {word!r}")
        try:
            syn = parse_type(syn_text)
        except FormulaError as err:
            raise LexiconError(f"{word}: bad type {syn_text!r}: {err}") from None
        sem = None
        derived_from = None
        steps_text = None
        for extra in fields[2:]:
            parts = extra.split()
            for part in parts:
                key, _, value = part.partition("=")
                match key:
                    case "sem":
                        sem = value
                    case "derived-from":
                        derived_from = value
                    case "steps":
                        steps_text = value
                    case _:
                        raise LexiconError(f"unknown entry field {part!r}")
        entry = LexEntry(word, syn, syn_text, sem, derived_from, steps_text)
        if validate:
            self._validate(entry)
        self.entries.append(entry)
        self._by_word.setdefault(word, []).append(entry)
        return entry

    def _validate(self, entry: LexEntry) -> None:
        # the semantic boundary must interpret the type
        entry.state().validate()
        if (entry.derived_from is None) != (entry.steps_text is None):
            raise LexiconError(
                f"{entry.word}: derived-from and steps come together"
            )
        if entry.derived_from is None:
            return
        bases = self._by_word.get(entry.derived_from)
        if not bases:
            raise LexiconError(
                f"{entry.word}: derived from unknown word {entry.derived_from!r}"
            )
        failures = []
        for base in bases:
            try:
                derived, arrows = apply_steps(base.syn, entry.steps_text)
            except LexiconError as err:
                failures.append(str(err))
                continue
            if derived == entry.syn:
                for arrow in arrows:
                    if not prove(arrow, _CHECK_CONFIG).ok:
                        raise LexiconError(
                            f"{entry.word}: step arrow "
                            f"{print_formula(arrow.source)} -> "
                            f"{print_formula(arrow.target)} is not derivable"
                        )
                return
            failures.append(f"steps give {print_formula(derived)}")
        raise LexiconError(
            f"{entry.word}: replaying steps from {entry.derived_from!r} does not "
            f"reproduce {print_formula(entry.syn)} ({'; '.join(failures)})"
        )

    # -- lookup

    def types(self, word: str) -> tuple[Formula, ...]:
        return tuple(e.syn for e in self._by_word.get(word, ()))

    def entry(self, word: str, syn: Formula) -> LexEntry:
        for e in self._by_word.get(word, ()):
            if e.syn == syn:
                return e
        raise LexiconError(f"no entry {word} :: {print_formula(syn)}")

    def state(self, word: str, syn: Formula) -> Diagram:
        return self.entry(word, syn).state()

    def states(self, words, types) -> list[Diagram]:
        return [self.state(w, t) for w, t in zip(words, types)]

    def __contains__(self, word: str) -> bool:
        return word in self._by_word

    # -- serialization

    @classmethod
    def loads(cls, text: str) -> "Lexicon":
        lex = cls()
        for line in text.splitlines():
            lex.add(line)
        return lex

    @classmethod
    def load(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def dumps(self) -> str:
        return "\n".join(self._raw) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())


def builtin_lexicon() -> Lexicon:
    """The lexicon shipped with the package."""
    from importlib.resources import files

    text = files("lambeksem").joinpath("data/english.lex").read_text(encoding="utf-8")
    return Lexicon.loads(text)

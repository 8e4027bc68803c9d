"""Formula syntax for a non-associative Lambek calculus with two modal families.

Formulas are built from atoms with the binary connectives ``*`` (product),
``/`` (rightward implication) and ``\\`` (leftward implication), plus a
residuated pair of unary modalities per mode.  Mode ``x`` licenses controlled
restructuring (its diamond marks movable hypotheses), mode ``i`` demarcates
islands and has no structural behaviour at all.

Concrete syntax::

    F ::= atom | (F) | F/F | F\\F | F*F | <m>F | [m]F      m in {x, i}

``/`` chains associate to the right, ``\\`` chains to the left, and mixed
slash chains at equal precedence are rejected; products must be bracketed
explicitly.  Modal prefixes bind tightest, slashes bind tighter than ``*``.
"""

from __future__ import annotations

import enum
from typing import Iterator


class Mode(str, enum.Enum):
    """Modal family marker: X = extraction, I = island."""

    X = "x"
    I = "i"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class Polarity(enum.Enum):
    POS = 1
    NEG = -1

    def flip(self) -> "Polarity":
        return Polarity.NEG if self is Polarity.POS else Polarity.POS


class FormulaError(ValueError):
    """Raised for lexical, parse and path errors on formulas."""


class Formula:
    """Base class; concrete nodes are Atom, Tensor, Over, Under, Dia, Box."""

    __slots__ = ("_hash",)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"{type(self).__name__}({print_formula(self)!r})"

    def __str__(self) -> str:
        return print_formula(self)


class Atom(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("a", name))

    def __eq__(self, other: object) -> bool:
        return type(other) is Atom and other.name == self.name

    __hash__ = Formula.__hash__


class Tensor(Formula):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self._hash = hash(("t", left._hash, right._hash))

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is Tensor
            and other._hash == self._hash
            and other.left == self.left
            and other.right == self.right
        )

    __hash__ = Formula.__hash__


class Over(Formula):
    """``result / arg``: seeks its argument to the right."""

    __slots__ = ("result", "arg")
    __match_args__ = ("result", "arg")

    def __init__(self, result: Formula, arg: Formula):
        self.result = result
        self.arg = arg
        self._hash = hash(("o", result._hash, arg._hash))

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is Over
            and other._hash == self._hash
            and other.result == self.result
            and other.arg == self.arg
        )

    __hash__ = Formula.__hash__


class Under(Formula):
    """``arg \\ result``: seeks its argument to the left."""

    __slots__ = ("arg", "result")
    __match_args__ = ("arg", "result")

    def __init__(self, arg: Formula, result: Formula):
        self.arg = arg
        self.result = result
        self._hash = hash(("u", arg._hash, result._hash))

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is Under
            and other._hash == self._hash
            and other.arg == self.arg
            and other.result == self.result
        )

    __hash__ = Formula.__hash__


class Dia(Formula):
    __slots__ = ("mode", "body")
    __match_args__ = ("mode", "body")

    def __init__(self, mode: Mode, body: Formula):
        self.mode = mode
        self.body = body
        self._hash = hash(("d", mode.value, body._hash))

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is Dia
            and other._hash == self._hash
            and other.mode is self.mode
            and other.body == self.body
        )

    __hash__ = Formula.__hash__


class Box(Formula):
    __slots__ = ("mode", "body")
    __match_args__ = ("mode", "body")

    def __init__(self, mode: Mode, body: Formula):
        self.mode = mode
        self.body = body
        self._hash = hash(("b", mode.value, body._hash))

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is Box
            and other._hash == self._hash
            and other.mode is self.mode
            and other.body == self.body
        )

    __hash__ = Formula.__hash__


# ---------------------------------------------------------------------------
# Lexing / parsing


_PUNCT = {"(", ")", "/", "\\", "*", "<", ">", "[", "]"}


def _lex(text: str) -> list[tuple[str, str, int]]:
    """Tokenize into (kind, value, position) triples.

    Kinds: 'ident', or one of the punctuation characters as its own kind.
    """
    out = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _PUNCT:
            out.append((c, c, i))
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(("ident", text[i:j], i))
            i = j
            continue
        raise FormulaError(f"unexpected character {c!r} at position {i}")
    return out


class _Parser:
    def __init__(self, text: str, atoms: set[str] | None):
        self.text = text
        self.toks = _lex(text)
        self.pos = 0
        self.atoms = atoms

    def peek(self) -> tuple[str, str, int] | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise FormulaError(f"unexpected end of input in {self.text!r}")
        if kind is not None and tok[0] != kind:
            raise FormulaError(
                f"expected {kind!r} but found {tok[1]!r} at position {tok[2]}"
            )
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.expr()
        tok = self.peek()
        if tok is not None:
            raise FormulaError(f"trailing input {tok[1]!r} at position {tok[2]}")
        return f

    def expr(self) -> Formula:
        left = self.slashes()
        tok = self.peek()
        if tok is not None and tok[0] == "*":
            self.take("*")
            right = self.slashes()
            nxt = self.peek()
            if nxt is not None and nxt[0] == "*":
                raise FormulaError(
                    f"ambiguous '*' chain at position {nxt[2]}; "
                    "products are non-associative, add parentheses"
                )
            return Tensor(left, right)
        return left

    def slashes(self) -> Formula:
        items = [self.prefixed()]
        ops: list[tuple[str, int]] = []
        while True:
            tok = self.peek()
            if tok is None or tok[0] not in ("/", "\\"):
                break
            ops.append((tok[0], tok[2]))
            self.take()
            items.append(self.prefixed())
        if not ops:
            return items[0]
        kinds = {op for op, _ in ops}
        if len(kinds) > 1:
            _, pos = ops[1]
            raise FormulaError(
                f"mixed '/' and '\\' chain at position {pos}; add parentheses"
            )
        if kinds == {"/"}:
            # right-associating: a/b/c = a/(b/c)
            acc = items[-1]
            for item in reversed(items[:-1]):
                acc = Over(item, acc)
            return acc
        # left-associating: a\b\c = (a\b)\c
        acc = Under(items[0], items[1])
        for item in items[2:]:
            acc = Under(acc, item)
        return acc

    def prefixed(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise FormulaError(f"unexpected end of input in {self.text!r}")
        if tok[0] == "<":
            self.take("<")
            mode = self.mode()
            self.take(">")
            return Dia(mode, self.prefixed())
        if tok[0] == "[":
            self.take("[")
            mode = self.mode()
            self.take("]")
            return Box(mode, self.prefixed())
        return self.base()

    def mode(self) -> Mode:
        kind, value, pos = self.take("ident")
        try:
            return Mode(value)
        except ValueError:
            raise FormulaError(f"unknown mode {value!r} at position {pos}") from None

    def base(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "(":
            f = self.expr()
            self.take(")")
            return f
        if kind == "ident":
            if self.atoms is not None and value not in self.atoms:
                raise FormulaError(f"unknown atom {value!r} at position {pos}")
            return Atom(value)
        raise FormulaError(f"unexpected token {value!r} at position {pos}")


def parse_formula(text: str, atoms: set[str] | None = None) -> Formula:
    """Parse concrete syntax into a Formula.

    When ``atoms`` is given, identifiers outside the set are rejected.
    """
    return _Parser(text, atoms).parse()


def _needs_parens(child: Formula, side: str, parent: str) -> bool:
    # parent in {'over','under','tensor','modal'}; side in {'l','r'}
    if isinstance(child, (Atom, Dia, Box)):
        return False
    if parent == "modal":
        return True
    if parent == "tensor":
        # slashes bind tighter than '*'; '*' chains are always bracketed
        return isinstance(child, Tensor)
    if parent == "over":
        if side == "l":
            return True  # (a/b)/c, (a\b)/c, (a*b)/c all need brackets
        return isinstance(child, (Tensor, Under))  # a/b/c reads a/(b/c)
    # parent == 'under'
    if side == "l":
        return isinstance(child, (Tensor, Over))  # a\b\c reads (a\b)\c
    return True


def print_formula(f: Formula) -> str:
    """Minimal-parenthesis rendering; ``parse_formula`` round-trips it."""

    def wrap(child: Formula, side: str, parent: str) -> str:
        s = print_formula(child)
        return f"({s})" if _needs_parens(child, side, parent) else s

    match f:
        case Atom(name):
            return name
        case Tensor(l, r):
            return f"{wrap(l, 'l', 'tensor')}*{wrap(r, 'r', 'tensor')}"
        case Over(res, arg):
            return f"{wrap(res, 'l', 'over')}/{wrap(arg, 'r', 'over')}"
        case Under(arg, res):
            return f"{wrap(arg, 'l', 'under')}\\{wrap(res, 'r', 'under')}"
        case Dia(mode, body):
            return f"<{mode.value}>{wrap(body, 'l', 'modal')}"
        case Box(mode, body):
            return f"[{mode.value}]{wrap(body, 'l', 'modal')}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Paths and polarity

# A path is a tuple of steps: 'L' / 'R' for the printed left/right child of a
# binary connective, 'B' for a modal body.

Path = tuple[str, ...]


def _children(f: Formula) -> dict[str, Formula]:
    match f:
        case Tensor(l, r):
            return {"L": l, "R": r}
        case Over(res, arg):
            return {"L": res, "R": arg}
        case Under(arg, res):
            return {"L": arg, "R": res}
        case Dia(_, body) | Box(_, body):
            return {"B": body}
    return {}


def format_path(path: Path) -> str:
    return ".".join(path) if path else "(root)"


def subformula_at(f: Formula, path: Path) -> Formula:
    cur = f
    for i, step in enumerate(path):
        kids = _children(cur)
        if step not in kids:
            raise FormulaError(
                f"no subformula at {format_path(path)}: step {step!r} fails at "
                f"{format_path(path[:i])} in {print_formula(f)}"
            )
        cur = kids[step]
    return cur


def replace_at(f: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    step, rest = path[0], path[1:]
    kids = _children(f)
    if step not in kids:
        raise FormulaError(
            f"no subformula at step {step!r} in {print_formula(f)}"
        )
    sub = replace_at(kids[step], rest, new)
    match f:
        case Tensor(l, r):
            return Tensor(sub, r) if step == "L" else Tensor(l, sub)
        case Over(res, arg):
            return Over(sub, arg) if step == "L" else Over(res, sub)
        case Under(arg, res):
            return Under(sub, res) if step == "L" else Under(arg, sub)
        case Dia(mode, _):
            return Dia(mode, sub)
        case Box(mode, _):
            return Box(mode, sub)
    raise TypeError(f"not a formula: {f!r}")


def polarity_at(f: Formula, path: Path, outer: Polarity = Polarity.POS) -> Polarity:
    """Polarity of the subformula at ``path``: arguments of / and \\ flip."""
    cur = f
    pol = outer
    for step in path:
        match cur:
            case Over(res, arg):
                if step == "R":
                    pol = pol.flip()
                cur = res if step == "L" else arg
            case Under(arg, res):
                if step == "L":
                    pol = pol.flip()
                cur = arg if step == "L" else res
            case _:
                kids = _children(cur)
                if step not in kids:
                    raise FormulaError(
                        f"no subformula at {format_path(path)} in {print_formula(f)}"
                    )
                cur = kids[step]
    return pol


def iter_atoms(
    f: Formula, outer: Polarity = Polarity.POS
) -> Iterator[tuple[Path, str, Polarity]]:
    """Yield (path, atom name, polarity) in preorder (= printed order)."""

    def walk(g: Formula, path: Path, pol: Polarity):
        match g:
            case Atom(name):
                yield path, name, pol
            case Tensor(l, r):
                yield from walk(l, path + ("L",), pol)
                yield from walk(r, path + ("R",), pol)
            case Over(res, arg):
                yield from walk(res, path + ("L",), pol)
                yield from walk(arg, path + ("R",), pol.flip())
            case Under(arg, res):
                yield from walk(arg, path + ("L",), pol.flip())
                yield from walk(res, path + ("R",), pol)
            case Dia(_, body) | Box(_, body):
                yield from walk(body, path + ("B",), pol)

    yield from walk(f, (), outer)


_COUNT_CACHE: dict[Formula, dict[str, int]] = {}


def count_vector(f: Formula) -> dict[str, int]:
    """Signed occurrence count per atom (+1 positive, -1 negative)."""
    cached = _COUNT_CACHE.get(f)
    if cached is not None:
        return cached
    counts: dict[str, int] = {}
    match f:
        case Atom(name):
            counts[name] = 1
        case Tensor(l, r):
            counts.update(count_vector(l))
            for k, v in count_vector(r).items():
                counts[k] = counts.get(k, 0) + v
        case Over(res, arg):
            counts.update(count_vector(res))
            for k, v in count_vector(arg).items():
                counts[k] = counts.get(k, 0) - v
        case Under(arg, res):
            counts.update(count_vector(res))
            for k, v in count_vector(arg).items():
                counts[k] = counts.get(k, 0) - v
        case Dia(_, body) | Box(_, body):
            counts.update(count_vector(body))
    counts = {k: v for k, v in counts.items() if v != 0}
    _COUNT_CACHE[f] = counts
    return counts


def atom_count(f: Formula, atom: str, outer: Polarity = Polarity.POS) -> int:
    """Signed count of ``atom`` in ``f`` seen at the stated outer polarity."""
    n = count_vector(f).get(atom, 0)
    return n if outer is Polarity.POS else -n


def size(f: Formula) -> int:
    """Number of connective and atom nodes."""
    match f:
        case Atom(_):
            return 1
        case Tensor(l, r) | Over(l, r) | Under(l, r):
            return 1 + size(l) + size(r)
        case Dia(_, body) | Box(_, body):
            return 1 + size(body)
    raise TypeError(f"not a formula: {f!r}")

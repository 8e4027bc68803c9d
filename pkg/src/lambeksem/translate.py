"""From syntax to vector space semantics.

Types become lists of typed wires over the spaces N (individuals) and S
(sentence meanings): slash types contribute the result wires followed by
the dualized argument wires, and both modal operators are transparent.
Proofs become string diagrams, with the evaluation and coevaluation
arrows turning into nested cups and caps, monotonicity under a slash
into a transposition, and the controlled structural rules into pure
rewiring: reassociation does not move any wire at all and the
controlled commutation is a block permutation.

The same proofs also yield their axiom linkings, the pairing-off of
atom occurrences that survives into the diagram as the pattern of cup
arcs.  ``compile_sentence`` builds a sentence meaning that way: one
Frobenius network per word, wired together along the linking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .diagram import (
    Builder,
    Diagram,
    DiagramError,
    WireType,
    compose,
    dual_type,
    identity,
    permutation,
    tensor_par,
)
from .formula import (
    Atom,
    Box,
    Dia,
    Formula,
    FormulaError,
    Over,
    Polarity,
    Tensor,
    Under,
    iter_atoms,
    print_formula,
)
from .prover import ProofTerm


ATOM_SPACES: dict[str, WireType] = {
    "s": (("S", False),),
    "np": (("N", False),),
    "n": (("N", False),),
    "pp": (("N", False),),
    "to_inf": (("N", True), ("S", False)),
    "ap": (("N", True), ("S", False)),
    "gp": (("N", True), ("S", False)),
    "wh": (("N", False), ("S", False)),
}


def interpret_type(f: Formula) -> WireType:
    """Wire list of a type.  Modalities leave no trace."""
    match f:
        case Atom(name):
            try:
                return ATOM_SPACES[name]
            except KeyError:
                raise FormulaError(f"no semantic space registered for atom {name!r}") from None
        case Tensor(left, right):
            return interpret_type(left) + interpret_type(right)
        case Over(result, arg):
            return interpret_type(result) + dual_type(interpret_type(arg))
        case Under(arg, result):
            return dual_type(interpret_type(arg)) + interpret_type(result)
        case Dia(_, body) | Box(_, body):
            return interpret_type(body)
    raise FormulaError(f"cannot interpret {f!r}")


@dataclass(frozen=True)
class AtomBlock:
    """Where one atom occurrence sits in the wire list of its formula."""

    name: str
    polarity: Polarity
    start: int
    size: int
    flipped: bool


def atom_wire_blocks(f: Formula) -> tuple[AtomBlock, ...]:
    """Atom occurrences in preorder, each with its wire span.

    Dualized positions reverse the block layout, so preorder atom order
    does not mean left-to-right wire order.
    """
    blocks, total = _blocks(f)
    if total != len(interpret_type(f)):
        raise FormulaError("internal error: wire accounting drifted")
    return tuple(blocks)


def _blocks(f: Formula):
    match f:
        case Atom(name):
            size = len(ATOM_SPACES.get(name, ())) or len(interpret_type(f))
            return [AtomBlock(name, Polarity.POS, 0, size, False)], size
        case Tensor(left, right):
            lb, lt = _blocks(left)
            rb, rt = _blocks(right)
            rb = [_shift_block(b, lt) for b in rb]
            return lb + rb, lt + rt
        case Over(result, arg):
            bb, bt = _blocks(result)
            ab, at = _blocks(arg)
            ab = [_shift_block(_dual_block(b, at), bt) for b in ab]
            return bb + ab, bt + at
        case Under(arg, result):
            ab, at = _blocks(arg)
            bb, bt = _blocks(result)
            ab = [_dual_block(b, at) for b in ab]
            bb = [_shift_block(b, at) for b in bb]
            return ab + bb, at + bt
        case Dia(_, body) | Box(_, body):
            return _blocks(body)
    raise FormulaError(f"cannot lay out {f!r}")


def _shift_block(b: AtomBlock, by: int) -> AtomBlock:
    return AtomBlock(b.name, b.polarity, b.start + by, b.size, b.flipped)


def _dual_block(b: AtomBlock, total: int) -> AtomBlock:
    return AtomBlock(
        b.name, b.polarity.flip(), total - b.start - b.size, b.size, not b.flipped
    )


# -- proofs to diagrams


def _ev_cups(bld: Builder, base: int, n: int, spaces) -> None:
    """Cup the dual block at [base, base+n) against the plain block at
    [base+n, base+2n), innermost pair first."""
    for t in range(n):
        sp = spaces[t]
        nid = bld.add_node("cup", (sp, sp), ())
        bld.wire(("I", base + n - 1 - t), ("i", nid, 0))
        bld.wire(("I", base + n + t), ("i", nid, 1))


def transpose_diagram(g: Diagram) -> Diagram:
    """The name-dual of a map: caps on the source side, cups on the
    target side, with both boundary blocks reversed and flipped."""
    bld = Builder()
    for sp, dl in dual_type(g.outputs):
        bld.add_input(sp, dl)
    for sp, dl in dual_type(g.inputs):
        bld.add_output(sp, dl)
    n_in, n_out = len(g.inputs), len(g.outputs)
    feed = []
    for k in range(n_in):
        sp = g.inputs[k][0]
        nid = bld.add_node("cap", (), (sp, sp))
        bld.wire(("o", nid, 0), ("O", n_in - 1 - k))
        feed.append(("o", nid, 1))
    deliver = []
    for k in range(n_out):
        sp = g.outputs[k][0]
        nid = bld.add_node("cup", (sp, sp), ())
        bld.wire(("I", n_out - 1 - k), ("i", nid, 0))
        deliver.append(("i", nid, 1))
    bld.inline(g, feed, deliver)
    return bld.diagram()


def interpret_proof(term: ProofTerm) -> Diagram:
    w_in = interpret_type(term.source)
    w_out = interpret_type(term.target)
    match term.rule:
        case "id" | "ev_box" | "coev_box":
            return identity(w_in)
        case "compose":
            g, f = term.children
            return compose(interpret_proof(f), interpret_proof(g))
        case "mon_tensor":
            f, g = term.children
            return tensor_par(interpret_proof(f), interpret_proof(g))
        case "mon_dia" | "mon_box":
            return interpret_proof(term.children[0])
        case "mon_over":
            f, g = term.children
            return tensor_par(interpret_proof(f), transpose_diagram(interpret_proof(g)))
        case "mon_under":
            f, g = term.children
            return tensor_par(transpose_diagram(interpret_proof(f)), interpret_proof(g))
        case "ev_over":
            # (B/A) * A -> B: keep the B wires, cup A* against A
            b = term.target
            wb, wa = interpret_type(b), interpret_type(term.source.right)
            bld = Builder()
            for sp, dl in w_in:
                bld.add_input(sp, dl)
            for k, (sp, dl) in enumerate(wb):
                bld.add_output(sp, dl)
                bld.wire(("I", k), ("O", k))
            _ev_cups(bld, len(wb), len(wa), [s for s, _ in wa])
            return bld.diagram()
        case "ev_under":
            # A * (A\B) -> B
            wa = interpret_type(term.source.left)
            wb = interpret_type(term.target)
            bld = Builder()
            for sp, dl in w_in:
                bld.add_input(sp, dl)
            n = len(wa)
            for t in range(n):
                sp = wa[t][0]
                nid = bld.add_node("cup", (sp, sp), ())
                bld.wire(("I", t), ("i", nid, 0))
                bld.wire(("I", 2 * n - 1 - t), ("i", nid, 1))
            for k, (sp, dl) in enumerate(wb):
                bld.add_output(sp, dl)
                bld.wire(("I", 2 * n + k), ("O", k))
            return bld.diagram()
        case "coev_over":
            # B -> (B*A)/A
            wb = interpret_type(term.source)
            wa = interpret_type(term.target.arg)
            bld = Builder()
            for sp, dl in w_in:
                bld.add_input(sp, dl)
            for sp, dl in w_out:
                bld.add_output(sp, dl)
            for k in range(len(wb)):
                bld.wire(("I", k), ("O", k))
            n = len(wa)
            for t in range(n):
                sp = wa[t][0]
                nid = bld.add_node("cap", (), (sp, sp))
                bld.wire(("o", nid, 0), ("O", len(wb) + t))
                bld.wire(("o", nid, 1), ("O", len(wb) + 2 * n - 1 - t))
            return bld.diagram()
        case "coev_under":
            # B -> A\(A*B)
            wb = interpret_type(term.source)
            wa = interpret_type(term.target.arg)
            bld = Builder()
            for sp, dl in w_in:
                bld.add_input(sp, dl)
            for sp, dl in w_out:
                bld.add_output(sp, dl)
            n = len(wa)
            for t in range(n):
                sp = wa[t][0]
                nid = bld.add_node("cap", (), (sp, sp))
                bld.wire(("o", nid, 0), ("O", n - 1 - t))
                bld.wire(("o", nid, 1), ("O", n + t))
            for k in range(len(wb)):
                bld.wire(("I", k), ("O", 2 * n + k))
            return bld.diagram()
        case "alpha":
            # no wire moves at all
            return identity(w_in)
        case "sigma":
            # (A*B) * <x>C -> (A*<x>C) * B: swap the B and C blocks
            a, b, c = term.params
            la = len(interpret_type(a))
            lb = len(interpret_type(b))
            lc = len(interpret_type(c))
            perm = list(range(la))
            perm += [la + lc + i for i in range(lb)]
            perm += [la + i for i in range(lc)]
            return permutation(w_in, perm)
    raise DiagramError(f"cannot interpret proof rule {term.rule!r}")


# -- axiom linkings


_NAT_CACHE: dict[Formula, int] = {}


def _n_atoms(f: Formula) -> int:
    try:
        return _NAT_CACHE[f]
    except KeyError:
        n = sum(1 for _ in iter_atoms(f))
        _NAT_CACHE[f] = n
        return n


def _straight(n: int) -> frozenset:
    return frozenset(frozenset((("s", i), ("t", i))) for i in range(n))


def _remap(links, fn) -> frozenset:
    return frozenset(frozenset(fn(tok) for tok in pair) for pair in links)


def _term_links(term: ProofTerm) -> frozenset:
    match term.rule:
        case "id" | "ev_box" | "coev_box" | "alpha":
            return _straight(_n_atoms(term.source))
        case "mon_dia" | "mon_box":
            return _term_links(term.children[0])
        case "compose":
            g, f = term.children
            return _glue(_term_links(f), _term_links(g), _n_atoms(f.target))
        case "mon_tensor":
            f, g = term.children
            ds, dt = _n_atoms(f.source), _n_atoms(f.target)

            def shift(tok):
                side, i = tok
                return (side, i + (ds if side == "s" else dt))

            return _term_links(f) | _remap(_term_links(g), shift)
        case "mon_over":
            # f: A->B, g: C->D  gives  A/D -> B/C
            f, g = term.children
            na, nb = _n_atoms(f.source), _n_atoms(f.target)

            def turn(tok):
                side, i = tok
                # g's source C sits in the composite target, its target D
                # in the composite source
                if side == "s":
                    return ("t", nb + i)
                return ("s", na + i)

            return _term_links(f) | _remap(_term_links(g), turn)
        case "mon_under":
            # f: A->B, g: C->D  gives  B\C -> A\D
            f, g = term.children
            na, nb = _n_atoms(f.source), _n_atoms(f.target)

            def turn(tok):
                side, i = tok
                if side == "s":
                    return ("t", i)
                return ("s", i)

            def shift(tok):
                side, i = tok
                return (side, i + (nb if side == "s" else na))

            return _remap(_term_links(f), turn) | _remap(_term_links(g), shift)
        case "ev_over":
            # (B/A) * A -> B
            a, b = term.params
            na, nb = _n_atoms(a), _n_atoms(b)
            links = {frozenset((("s", i), ("t", i))) for i in range(nb)}
            links |= {
                frozenset((("s", nb + i), ("s", nb + na + i))) for i in range(na)
            }
            return frozenset(links)
        case "ev_under":
            # A * (A\B) -> B
            a, b = term.params
            na, nb = _n_atoms(a), _n_atoms(b)
            links = {frozenset((("s", i), ("s", na + i))) for i in range(na)}
            links |= {
                frozenset((("s", 2 * na + i), ("t", i))) for i in range(nb)
            }
            return frozenset(links)
        case "coev_over":
            # B -> (B*A)/A
            a, b = term.params
            na, nb = _n_atoms(a), _n_atoms(b)
            links = {frozenset((("s", i), ("t", i))) for i in range(nb)}
            links |= {
                frozenset((("t", nb + i), ("t", nb + na + i))) for i in range(na)
            }
            return frozenset(links)
        case "coev_under":
            # B -> A\(A*B)
            a, b = term.params
            na, nb = _n_atoms(a), _n_atoms(b)
            links = {frozenset((("t", i), ("t", na + i))) for i in range(na)}
            links |= {
                frozenset((("s", i), ("t", 2 * na + i))) for i in range(nb)
            }
            return frozenset(links)
        case "sigma":
            a, b, c = term.params
            na, nb, nc = _n_atoms(a), _n_atoms(b), _n_atoms(c)
            links = {frozenset((("s", i), ("t", i))) for i in range(na)}
            links |= {
                frozenset((("s", na + i), ("t", na + nc + i))) for i in range(nb)
            }
            links |= {
                frozenset((("s", na + nb + i), ("t", na + i))) for i in range(nc)
            }
            return frozenset(links)
    raise DiagramError(f"cannot link proof rule {term.rule!r}")


def _glue(lf: frozenset, lg: frozenset, n_mid: int) -> frozenset:
    """Compose two linkings along the shared middle formula.

    Middle occurrences pair up twice, once per side; following the
    alternating paths joins the outer occurrences.  Paths closing on
    themselves vanish, which is what should happen to material consumed
    entirely inside the composition.
    """
    adj: dict = {}

    def add_edge(u, v):
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)

    for pair in lf:
        u, v = tuple(pair) if len(pair) == 2 else (next(iter(pair)),) * 2
        add_edge(_lift_f(u), _lift_f(v))
    for pair in lg:
        u, v = tuple(pair) if len(pair) == 2 else (next(iter(pair)),) * 2
        add_edge(_lift_g(u), _lift_g(v))

    out = set()
    visited = set()
    for node in adj:
        if node[0] == "m" or node in visited:
            continue
        visited.add(node)
        prev, cur = node, adj[node][0]
        while cur[0] == "m":
            visited.add(cur)
            step = [x for x in adj[cur] if x != prev]
            # a middle occurrence has exactly two incident edges; when
            # both lead back the path doubles on itself
            nxt = step[0] if step else prev
            prev, cur = cur, nxt
        visited.add(cur)
        out.add(frozenset((node[1], cur[1])))
    return frozenset(out)


def _lift_f(tok):
    side, i = tok
    if side == "t":
        return ("m", i)
    return ("a", ("s", i))


def _lift_g(tok):
    side, i = tok
    if side == "s":
        return ("m", i)
    return ("a", ("t", i))


@dataclass(frozen=True)
class AxiomLinking:
    """A perfect matching of the atom occurrences of an arrow.

    Occurrences are indexed over the source atoms in preorder followed
    by the target atoms, so index ``k`` for ``k < n_source`` sits in the
    source.  Every link joins occurrences that cancel: either two source
    atoms of opposite polarity or a source and a target atom of the same
    written polarity.
    """

    source: Formula
    target: Formula
    links: tuple[tuple[int, int], ...]

    @property
    def occurrences(self):
        occ = [
            ("source", name, pol) for _, name, pol in iter_atoms(self.source)
        ]
        occ += [
            ("target", name, pol) for _, name, pol in iter_atoms(self.target)
        ]
        return tuple(occ)

    def to_json(self) -> str:
        occ = [
            {"index": i, "side": side, "atom": name, "polarity": pol.value}
            for i, (side, name, pol) in enumerate(self.occurrences)
        ]
        doc = {
            "schema": "linking/1",
            "source": print_formula(self.source),
            "target": print_formula(self.target),
            "occurrences": occ,
            "links": [list(pair) for pair in self.links],
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def extract_axiom_links(term: ProofTerm) -> AxiomLinking:
    ns = _n_atoms(term.source)
    raw = _term_links(term)
    pairs = []
    seen: set[int] = set()
    for pair in raw:
        toks = tuple(pair)
        if len(toks) == 1:
            raise DiagramError("degenerate axiom link")
        idx = []
        for side, i in toks:
            idx.append(i if side == "s" else ns + i)
        a, b = sorted(idx)
        pairs.append((a, b))
        seen.update((a, b))
    if seen != set(range(ns + _n_atoms(term.target))):
        raise DiagramError("axiom linking is not a perfect matching")
    return AxiomLinking(term.source, term.target, tuple(sorted(pairs)))


# -- sentence meanings


def link_diagram(linking: AxiomLinking) -> Diagram:
    """The linking as a diagram: inputs are the source wires, outputs
    the target wires, and every link becomes a cup arc, a through wire,
    or a cap arc depending on which sides it touches."""
    src_blocks = atom_wire_blocks(linking.source)
    tgt_blocks = atom_wire_blocks(linking.target)
    w_in = interpret_type(linking.source)
    w_out = interpret_type(linking.target)
    ns = len(src_blocks)

    bld = Builder()
    for sp, dl in w_in:
        bld.add_input(sp, dl)
    for sp, dl in w_out:
        bld.add_output(sp, dl)

    for a, b in linking.links:
        a_src, b_src = a < ns, b < ns
        ba = src_blocks[a] if a_src else tgt_blocks[a - ns]
        bb = src_blocks[b] if b_src else tgt_blocks[b - ns]
        if ba.size != bb.size:
            raise DiagramError("linked atoms with different wire widths")
        for t in range(ba.size):
            wa = ba.start + t
            wb = bb.start + (t if ba.flipped == bb.flipped else ba.size - 1 - t)
            sp = (w_in if a_src else w_out)[wa][0]
            match a_src, b_src:
                case True, True:
                    nid = bld.add_node("cup", (sp, sp), ())
                    bld.wire(("I", wa), ("i", nid, 0))
                    bld.wire(("I", wb), ("i", nid, 1))
                case True, False:
                    bld.wire(("I", wa), ("O", wb))
                case False, True:
                    bld.wire(("I", wb), ("O", wa))
                case False, False:
                    nid = bld.add_node("cap", (), (sp, sp))
                    bld.wire(("o", nid, 0), ("O", wa))
                    bld.wire(("o", nid, 1), ("O", wb))
    return bld.diagram()


def compile_sentence(parse, states) -> Diagram:
    """Meaning of a parsed sentence from its axiom linking.

    ``states`` holds one Frobenius network per word, each a closed
    diagram whose outputs are the word's type wires.  The networks sit
    side by side and the proof's linking wires them together; goal wires
    come out as the boundary.
    """
    state = states[0]
    for s in states[1:]:
        state = tensor_par(state, s)
    expected = interpret_type(parse.antecedent)
    if tuple(state.outputs) != tuple(expected):
        raise DiagramError(
            "lexical networks do not line up with the parsed types"
        )
    linking = extract_axiom_links(parse.proof)
    return compose(state, link_diagram(linking))


def proof_meaning(parse, states) -> Diagram:
    """Meaning of a parsed sentence along the proof homomorphism.

    Same boundary as ``compile_sentence``; the two agree under
    evaluation, which makes them a useful cross-check of each other.
    """
    state = states[0]
    for s in states[1:]:
        state = tensor_par(state, s)
    return compose(state, interpret_proof(parse.proof))

"""String-diagram IR for compact-closed vector space semantics.

A diagram is an open graph: boxes (named tensors), cups and caps (the
evaluation and coevaluation maps of a self-dual space), swaps, and
spiders (the basis-copying Frobenius generators), wired together and to
an input/output boundary.  Wires are directed from a producer end (a
node output or a diagram input) to a consumer end (a node input or a
diagram output); this orientation is bookkeeping for composition and
evaluation, not physics, since every space here is self-dual.

Wire types carry a space name plus a dual flag.  The flag matters when
gluing diagrams along a boundary; evaluation ignores it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class DiagramError(ValueError):
    pass


# a boundary type: ((space, dual), ...)
WireType = tuple[tuple[str, bool], ...]


def dual_type(wtype: WireType) -> WireType:
    """Reverse the wire order and flip every dual flag (an involution)."""
    return tuple((space, not dual) for space, dual in reversed(wtype))


def concrete_spaces(wtype: WireType) -> tuple[str, ...]:
    return tuple(space for space, _ in wtype)


# Ports.  Producers: ("I", k) diagram input, ("o", nid, k) node output.
# Consumers: ("O", k) diagram output, ("i", nid, k) node input.
Port = tuple


def _port_ok(port: Port) -> bool:
    match port:
        case ("I" | "O", int()):
            return True
        case ("i" | "o", int(), int()):
            return True
    return False


@dataclass(frozen=True)
class Node:
    """One generator.  ``ins``/``outs`` list the port spaces in order.

    ``name`` is the box label (empty for the other kinds).  Spiders keep
    their space redundantly in every port entry.
    """

    nid: int
    kind: str  # box | cup | cap | swap | spider
    ins: tuple[str, ...]
    outs: tuple[str, ...]
    name: str = ""

    def check(self) -> None:
        match self.kind:
            case "box":
                if not self.name:
                    raise DiagramError("box node needs a name")
            case "cup":
                if len(self.ins) != 2 or self.outs or self.ins[0] != self.ins[1]:
                    raise DiagramError(f"malformed cup node {self.nid}")
            case "cap":
                if len(self.outs) != 2 or self.ins or self.outs[0] != self.outs[1]:
                    raise DiagramError(f"malformed cap node {self.nid}")
            case "swap":
                if len(self.ins) != 2 or len(self.outs) != 2:
                    raise DiagramError(f"malformed swap node {self.nid}")
                if (self.ins[0], self.ins[1]) != (self.outs[1], self.outs[0]):
                    raise DiagramError(f"swap node {self.nid} spaces do not cross")
            case "spider":
                legs = self.ins + self.outs
                if not legs:
                    raise DiagramError("spider needs at least one leg")
                if any(s != legs[0] for s in legs):
                    raise DiagramError(f"spider node {self.nid} mixes spaces")
            case _:
                raise DiagramError(f"unknown node kind {self.kind!r}")

    @property
    def space(self) -> str:
        """Space of a single-space node (cup, cap, spider)."""
        legs = self.ins + self.outs
        return legs[0]


@dataclass(frozen=True)
class Diagram:
    inputs: WireType
    outputs: WireType
    nodes: tuple[Node, ...] = ()
    wires: tuple[tuple[Port, Port], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.nid)))
        object.__setattr__(self, "wires", tuple(sorted(self.wires)))

    # -- queries

    def node(self, nid: int) -> Node:
        for n in self.nodes:
            if n.nid == nid:
                return n
        raise DiagramError(f"no node {nid}")

    def port_space(self, port: Port) -> str:
        match port:
            case ("I", k):
                return self.inputs[k][0]
            case ("O", k):
                return self.outputs[k][0]
            case ("i", nid, k):
                return self.node(nid).ins[k]
            case ("o", nid, k):
                return self.node(nid).outs[k]
        raise DiagramError(f"bad port {port!r}")

    def validate(self) -> None:
        by_id = {}
        for n in self.nodes:
            if n.nid in by_id:
                raise DiagramError(f"duplicate node id {n.nid}")
            n.check()
            by_id[n.nid] = n
        producers = {("I", k) for k in range(len(self.inputs))}
        consumers = {("O", k) for k in range(len(self.outputs))}
        for n in self.nodes:
            producers.update(("o", n.nid, k) for k in range(len(n.outs)))
            consumers.update(("i", n.nid, k) for k in range(len(n.ins)))
        seen_p: set = set()
        seen_c: set = set()
        for prod, cons in self.wires:
            if prod not in producers:
                raise DiagramError(f"wire producer {prod!r} is not a producer port")
            if cons not in consumers:
                raise DiagramError(f"wire consumer {cons!r} is not a consumer port")
            if prod in seen_p:
                raise DiagramError(f"producer {prod!r} used twice")
            if cons in seen_c:
                raise DiagramError(f"consumer {cons!r} used twice")
            if self.port_space(prod) != self.port_space(cons):
                raise DiagramError(
                    f"wire {prod!r} -> {cons!r} joins different spaces"
                )
            seen_p.add(prod)
            seen_c.add(cons)
        if seen_p != producers or seen_c != consumers:
            raise DiagramError("dangling ports")

    # -- serialization

    def to_json(self) -> str:
        doc = {
            "schema": "diagram/1",
            "inputs": [[s, d] for s, d in self.inputs],
            "outputs": [[s, d] for s, d in self.outputs],
            "nodes": [
                {
                    "id": n.nid,
                    "kind": n.kind,
                    "name": n.name,
                    "ins": list(n.ins),
                    "outs": list(n.outs),
                }
                for n in self.nodes
            ],
            "wires": [[list(p), list(c)] for p, c in self.wires],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Diagram":
        doc = json.loads(text)
        if doc.get("schema") != "diagram/1":
            raise DiagramError("unsupported diagram schema")
        nodes = tuple(
            Node(
                nid=n["id"],
                kind=n["kind"],
                ins=tuple(n["ins"]),
                outs=tuple(n["outs"]),
                name=n.get("name", ""),
            )
            for n in doc["nodes"]
        )
        wires = tuple((tuple(p), tuple(c)) for p, c in doc["wires"])
        d = Diagram(
            inputs=tuple((s, bool(f)) for s, f in doc["inputs"]),
            outputs=tuple((s, bool(f)) for s, f in doc["outputs"]),
            nodes=nodes,
            wires=wires,
        )
        d.validate()
        return d

    def to_dot(self) -> str:
        lines = ["digraph diagram {", "  rankdir=TB;"]
        for k, (space, dl) in enumerate(self.inputs):
            label = space + ("*" if dl else "")
            lines.append(f'  in{k} [shape=plaintext, label="{label}"];')
        for k, (space, dl) in enumerate(self.outputs):
            label = space + ("*" if dl else "")
            lines.append(f'  out{k} [shape=plaintext, label="{label}"];')
        for n in self.nodes:
            match n.kind:
                case "box":
                    shape, label = "box", n.name
                case "spider":
                    shape, label = "circle", n.space
                case _:
                    shape, label = "diamond", n.kind
            lines.append(f'  n{n.nid} [shape={shape}, label="{label}"];')
        def ref(port):
            match port:
                case ("I", k):
                    return f"in{k}"
                case ("O", k):
                    return f"out{k}"
                case (_, nid, _):
                    return f"n{nid}"
        for prod, cons in self.wires:
            lines.append(f"  {ref(prod)} -> {ref(cons)};")
        lines.append("}")
        return "\n".join(lines)


class Builder:
    """Mutable accumulator for assembling a diagram port by port."""

    def __init__(self):
        self.inputs: list[tuple[str, bool]] = []
        self.outputs: list[tuple[str, bool]] = []
        self.nodes: list[Node] = []
        self.wires: list[tuple[Port, Port]] = []

    def add_node(self, kind, ins, outs, name="") -> int:
        nid = len(self.nodes)
        self.nodes.append(Node(nid, kind, tuple(ins), tuple(outs), name))
        return nid

    def add_input(self, space: str, dual: bool = False) -> Port:
        self.inputs.append((space, dual))
        return ("I", len(self.inputs) - 1)

    def add_output(self, space: str, dual: bool = False) -> Port:
        self.outputs.append((space, dual))
        return ("O", len(self.outputs) - 1)

    def wire(self, prod: Port, cons: Port) -> None:
        self.wires.append((prod, cons))

    def inline(self, sub: Diagram, feed: list[Port], deliver: list[Port]) -> None:
        """Splice ``sub`` into this diagram.

        ``feed[k]`` is the producer port standing in for ``sub``'s input
        ``k``; ``deliver[k]`` the consumer port for its output ``k``.
        """
        if len(feed) != len(sub.inputs) or len(deliver) != len(sub.outputs):
            raise DiagramError("inline boundary size mismatch")
        mapping = {}
        for n in sub.nodes:
            mapping[n.nid] = self.add_node(n.kind, n.ins, n.outs, n.name)
        for prod, cons in sub.wires:
            if prod[0] == "I":
                prod = feed[prod[1]]
            else:
                prod = (prod[0], mapping[prod[1]], prod[2])
            if cons[0] == "O":
                cons = deliver[cons[1]]
            else:
                cons = (cons[0], mapping[cons[1]], cons[2])
            self.wire(prod, cons)

    def diagram(self) -> Diagram:
        d = Diagram(
            tuple(self.inputs), tuple(self.outputs), tuple(self.nodes), tuple(self.wires)
        )
        d.validate()
        return d


# -- primitive diagrams


def identity(wtype: WireType) -> Diagram:
    wires = tuple((("I", k), ("O", k)) for k in range(len(wtype)))
    return Diagram(tuple(wtype), tuple(wtype), (), wires)


def permutation(wtype: WireType, perm: list[int] | tuple[int, ...]) -> Diagram:
    """Pure rewiring: input ``k`` exits at output ``perm[k]``."""
    if sorted(perm) != list(range(len(wtype))):
        raise DiagramError("not a permutation")
    outputs = [None] * len(wtype)
    for k, target in enumerate(perm):
        outputs[target] = wtype[k]
    wires = tuple((("I", k), ("O", perm[k])) for k in range(len(wtype)))
    return Diagram(tuple(wtype), tuple(outputs), (), wires)


def box(name: str, ins: WireType, outs: WireType) -> Diagram:
    node = Node(0, "box", concrete_spaces(ins), concrete_spaces(outs), name)
    wires = [(("I", k), ("i", 0, k)) for k in range(len(ins))]
    wires += [(("o", 0, k), ("O", k)) for k in range(len(outs))]
    return Diagram(tuple(ins), tuple(outs), (node,), tuple(wires))


def cup(space: str, left_dual: bool = False) -> Diagram:
    """Evaluation map: two inputs, no outputs."""
    node = Node(0, "cup", (space, space), ())
    wires = ((("I", 0), ("i", 0, 0)), (("I", 1), ("i", 0, 1)))
    return Diagram(((space, left_dual), (space, not left_dual)), (), (node,), wires)


def cap(space: str, left_dual: bool = False) -> Diagram:
    """Coevaluation map: no inputs, two outputs."""
    node = Node(0, "cap", (), (space, space))
    wires = ((("o", 0, 0), ("O", 0)), (("o", 0, 1), ("O", 1)))
    return Diagram((), ((space, left_dual), (space, not left_dual)), (node,), wires)


def swap(a: tuple[str, bool], b: tuple[str, bool]) -> Diagram:
    node = Node(0, "swap", (a[0], b[0]), (b[0], a[0]))
    wires = (
        (("I", 0), ("i", 0, 0)),
        (("I", 1), ("i", 0, 1)),
        (("o", 0, 0), ("O", 0)),
        (("o", 0, 1), ("O", 1)),
    )
    return Diagram((a, b), (b, a), (node,), wires)


def spider(space: str, m: int, n: int, dual_ins=None, dual_outs=None) -> Diagram:
    """Frobenius spider with ``m`` inputs and ``n`` outputs."""
    node = Node(0, "spider", (space,) * m, (space,) * n)
    node.check()
    wires = [(("I", k), ("i", 0, k)) for k in range(m)]
    wires += [(("o", 0, k), ("O", k)) for k in range(n)]
    ins = tuple((space, bool(d)) for d in (dual_ins or [False] * m))
    outs = tuple((space, bool(d)) for d in (dual_outs or [False] * n))
    return Diagram(ins, outs, (node,), tuple(wires))


# -- composition


def _offset_port(port: Port, offset: int) -> Port:
    match port:
        case ("i" | "o", nid, k):
            return (port[0], nid + offset, k)
    return port


def compose(d1: Diagram, d2: Diagram) -> Diagram:
    """Plug ``d1``'s outputs into ``d2``'s inputs."""
    if d1.outputs != d2.inputs:
        raise DiagramError(
            f"cannot compose: boundary mismatch {d1.outputs} vs {d2.inputs}"
        )
    offset = max((n.nid for n in d1.nodes), default=-1) + 1
    nodes = list(d1.nodes)
    nodes += [
        Node(n.nid + offset, n.kind, n.ins, n.outs, n.name) for n in d2.nodes
    ]
    out_producer = {}
    wires = []
    for prod, cons in d1.wires:
        if cons[0] == "O":
            out_producer[cons[1]] = prod
        else:
            wires.append((prod, cons))
    for prod, cons in d2.wires:
        prod = _offset_port(prod, offset)
        cons = _offset_port(cons, offset)
        if prod[0] == "I":
            prod = out_producer[prod[1]]
        wires.append((prod, cons))
    return Diagram(d1.inputs, d2.outputs, tuple(nodes), tuple(wires))


def tensor_par(d1: Diagram, d2: Diagram) -> Diagram:
    """Place ``d2`` beside (after) ``d1``."""
    offset = max((n.nid for n in d1.nodes), default=-1) + 1
    li, lo = len(d1.inputs), len(d1.outputs)
    nodes = list(d1.nodes)
    nodes += [
        Node(n.nid + offset, n.kind, n.ins, n.outs, n.name) for n in d2.nodes
    ]
    wires = list(d1.wires)
    for prod, cons in d2.wires:
        prod = _offset_port(prod, offset)
        cons = _offset_port(cons, offset)
        if prod[0] == "I":
            prod = ("I", prod[1] + li)
        if cons[0] == "O":
            cons = ("O", cons[1] + lo)
        wires.append((prod, cons))
    return Diagram(
        d1.inputs + d2.inputs, d1.outputs + d2.outputs, tuple(nodes), tuple(wires)
    )


def compose_many(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = compose(out, d)
    return out


def tensor_many(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = tensor_par(out, d)
    return out


# -- normalization
#
# Rewrites, each of which strictly decreases nodes + wires and preserves
# the evaluated tensor: parallel swap-swap cancellation, cup/cap yanking,
# spider self-loop stripping, spider fusion, and unary spider removal.
# Closed loops (scalar factors) are deliberately left in place so that
# evaluation before and after normalization agrees exactly.


def _wire_maps(d: Diagram):
    by_prod = {}
    by_cons = {}
    for w in d.wires:
        by_prod[w[0]] = w
        by_cons[w[1]] = w
    return by_prod, by_cons


def _drop_swap_pair(d: Diagram, by_prod, by_cons):
    for n in d.nodes:
        if n.kind != "swap":
            continue
        w0 = by_prod.get(("o", n.nid, 0))
        w1 = by_prod.get(("o", n.nid, 1))
        if w0 is None or w1 is None:
            continue
        c0, c1 = w0[1], w1[1]
        if not (c0[0] == "i" and c1[0] == "i" and c0[1] == c1[1]):
            continue
        other = c0[1]
        if other == n.nid or d.node(other).kind != "swap":
            continue
        if (c0[2], c1[2]) != (0, 1):
            continue
        # swap ; swap = identity on both strands
        p0 = by_cons[("i", n.nid, 0)][0]
        p1 = by_cons[("i", n.nid, 1)][0]
        q0 = by_prod[("o", other, 0)][1]
        q1 = by_prod[("o", other, 1)][1]
        dead = {
            by_cons[("i", n.nid, 0)], by_cons[("i", n.nid, 1)],
            w0, w1,
            by_prod[("o", other, 0)], by_prod[("o", other, 1)],
        }
        nodes = tuple(x for x in d.nodes if x.nid not in (n.nid, other))
        wires = tuple(w for w in d.wires if w not in dead) + ((p0, q0), (p1, q1))
        return Diagram(d.inputs, d.outputs, nodes, wires)
    return None


def _yank(d: Diagram, by_prod, by_cons):
    for n in d.nodes:
        if n.kind != "cap":
            continue
        for a in (0, 1):
            wa = by_prod[("o", n.nid, a)]
            cons = wa[1]
            if cons[0] != "i":
                continue
            u = d.node(cons[1])
            if u.kind != "cup":
                continue
            b = cons[2]
            # if the other legs also join the same pair we have a closed
            # loop, a scalar: leave it for evaluation to count
            w_other_cap = by_prod[("o", n.nid, 1 - a)]
            if w_other_cap[1] == ("i", u.nid, 1 - b):
                continue
            w_other_cup = by_cons[("i", u.nid, 1 - b)]
            dead = {wa, w_other_cap, w_other_cup}
            nodes = tuple(x for x in d.nodes if x.nid not in (n.nid, u.nid))
            wires = tuple(w for w in d.wires if w not in dead)
            wires += ((w_other_cup[0], w_other_cap[1]),)
            return Diagram(d.inputs, d.outputs, nodes, wires)
    return None


def _strip_spider_loop(d: Diagram, by_prod, by_cons):
    for n in d.nodes:
        if n.kind != "spider":
            continue
        loop = None
        for j in range(len(n.outs)):
            cons = by_prod[("o", n.nid, j)][1]
            if cons[0] == "i" and cons[1] == n.nid:
                loop = (j, cons[2])
                break
        if loop is None:
            continue
        j, k = loop
        if len(n.ins) + len(n.outs) <= 2:
            continue  # a bare circle: scalar, keep
        new = Node(n.nid, "spider", n.ins[:k] + n.ins[k + 1:], n.outs[:j] + n.outs[j + 1:])
        wires = []
        for prod, cons in d.wires:
            if prod == ("o", n.nid, j) and cons == ("i", n.nid, k):
                continue
            if prod[0] == "o" and prod[1] == n.nid:
                prod = ("o", n.nid, prod[2] - (prod[2] > j))
            if cons[0] == "i" and cons[1] == n.nid:
                cons = ("i", n.nid, cons[2] - (cons[2] > k))
            wires.append((prod, cons))
        nodes = tuple(new if x.nid == n.nid else x for x in d.nodes)
        return Diagram(d.inputs, d.outputs, nodes, tuple(wires))
    return None


def _fuse_spiders(d: Diagram, by_prod, by_cons):
    for n in d.nodes:
        if n.kind != "spider":
            continue
        partner = None
        for j in range(len(n.outs)):
            cons = by_prod[("o", n.nid, j)][1]
            if cons[0] == "i" and cons[1] != n.nid:
                q = d.node(cons[1])
                if q.kind == "spider" and q.space == n.space:
                    partner = q
                    break
        if partner is None:
            continue
        p, q = n, partner
        shared = set()
        for prod, cons in d.wires:
            if prod[0] == "o" and cons[0] == "i":
                ends = {prod[1], cons[1]}
                if ends == {p.nid, q.nid}:
                    shared.add((prod, cons))
        legs_left = len(p.ins) + len(p.outs) + len(q.ins) + len(q.outs) - 2 * len(shared)
        if legs_left < 1:
            continue  # fully contracted pair: a scalar, keep
        nid = max(x.nid for x in d.nodes) + 1
        remap = {}
        new_ins: list[str] = []
        new_outs: list[str] = []
        shared_ports = {w[0] for w in shared} | {w[1] for w in shared}
        for node in (p, q):
            for k in range(len(node.ins)):
                port = ("i", node.nid, k)
                if port in shared_ports:
                    continue
                remap[port] = ("i", nid, len(new_ins))
                new_ins.append(node.space)
            for k in range(len(node.outs)):
                port = ("o", node.nid, k)
                if port in shared_ports:
                    continue
                remap[port] = ("o", nid, len(new_outs))
                new_outs.append(node.space)
        fused = Node(nid, "spider", tuple(new_ins), tuple(new_outs))
        nodes = tuple(x for x in d.nodes if x.nid not in (p.nid, q.nid)) + (fused,)
        wires = []
        for w in d.wires:
            if w in shared:
                continue
            prod, cons = w
            wires.append((remap.get(prod, prod), remap.get(cons, cons)))
        return Diagram(d.inputs, d.outputs, nodes, tuple(wires))
    return None


def _drop_unary_spider(d: Diagram, by_prod, by_cons):
    for n in d.nodes:
        if n.kind != "spider" or len(n.ins) != 1 or len(n.outs) != 1:
            continue
        w_in = by_cons[("i", n.nid, 0)]
        w_out = by_prod[("o", n.nid, 0)]
        if w_in[0] == ("o", n.nid, 0):
            continue  # self-looped unary spider: a circle, keep
        nodes = tuple(x for x in d.nodes if x.nid != n.nid)
        wires = tuple(w for w in d.wires if w not in (w_in, w_out))
        wires += ((w_in[0], w_out[1]),)
        return Diagram(d.inputs, d.outputs, nodes, wires)
    return None


_REWRITES = (_drop_swap_pair, _yank, _strip_spider_loop, _fuse_spiders, _drop_unary_spider)


def normalize(d: Diagram) -> Diagram:
    """Rewrite to a fixpoint.  Evaluation-preserving and idempotent."""
    while True:
        by_prod, by_cons = _wire_maps(d)
        for rule in _REWRITES:
            nxt = rule(d, by_prod, by_cons)
            if nxt is not None:
                break
        else:
            return d
        d = nxt


# -- textual Frobenius networks
#
# A tiny declaration language for lexical states.  The first line names
# the boundary output ports; each further line attaches a spider or a
# content box to named wires.  A wire name used by two statements links
# them; a name from the boundary line must be used by exactly one
# statement.  Example:
#
#     out head result subj svp
#     spider N : head result subj
#     spider S : svp
#
# Box legs are always producers (these networks are states); "@" as a
# box name is replaced by the owning word.


def frobenius_network(
    text: str, out_types: WireType | None = None, word: str | None = None
) -> Diagram:
    boundary: list[str] = []
    stmts: list[tuple[str, str, list[str]]] = []  # (kind, label, legs)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("out"):
            if boundary or stmts:
                raise DiagramError("the 'out' line must come first, and only once")
            boundary = line[3:].split()
            continue
        head, _, legs = line.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] not in ("spider", "box"):
            raise DiagramError(f"cannot parse network line {raw!r}")
        kind, label = parts
        if kind == "box" and label == "@":
            if word is None:
                raise DiagramError("network uses '@' but no word was supplied")
            label = word
        stmts.append((kind, label, legs.split()))
    if len(set(boundary)) != len(boundary):
        raise DiagramError("boundary port names must be distinct")
    if out_types is not None and len(out_types) != len(boundary):
        raise DiagramError(
            f"network has {len(boundary)} ports but the type wants {len(out_types)}"
        )

    # where does each name occur?
    occur: dict[str, list[tuple[str, int, int]]] = {}
    for name in boundary:
        occur.setdefault(name, []).append(("boundary", -1, boundary.index(name)))
    for s, (kind, label, legs) in enumerate(stmts):
        for j, name in enumerate(legs):
            occur.setdefault(name, []).append(("stmt", s, j))
    for name, places in occur.items():
        if len(places) != 2:
            raise DiagramError(f"wire {name!r} has {len(places)} ends, wants 2")

    # solve wire spaces
    space_of: dict[str, str] = {}
    if out_types is not None:
        for name, (sp, _) in zip(boundary, out_types):
            space_of[name] = sp
    for kind, label, legs in stmts:
        if kind != "spider":
            continue
        for name in legs:
            if space_of.setdefault(name, label) != label:
                raise DiagramError(
                    f"wire {name!r} is {space_of[name]} but spider wants {label}"
                )
    for name in occur:
        if name not in space_of:
            raise DiagramError(f"cannot infer the space of wire {name!r}")

    # orient: box legs and first-seen spider legs produce; boundary and
    # second-seen legs consume
    bld = Builder()
    if out_types is not None:
        for sp, dl in out_types:
            bld.outputs.append((sp, dl))
    else:
        for name in boundary:
            bld.outputs.append((space_of[name], False))

    node_ids: list[int] = []
    leg_dir: dict[tuple[int, int], str] = {}  # (stmt, leg) -> "in"/"out"
    for name, places in occur.items():
        ends = [p for p in places if p[0] == "stmt"]
        if len(ends) == 0:
            raise DiagramError(f"boundary wire {name!r} reaches no node")
        if len(ends) == 2:
            a, b = ends
            kind_a = stmts[a[1]][0]
            kind_b = stmts[b[1]][0]
            if kind_a == "box" and kind_b == "box":
                raise DiagramError("direct box-to-box wires are not supported")
            if kind_b == "box":  # boxes always produce
                a, b = b, a
            leg_dir[(a[1], a[2])] = "out"
            leg_dir[(b[1], b[2])] = "in"
        else:
            s, j = ends[0][1], ends[0][2]
            leg_dir[(s, j)] = "out"

    ports: dict[tuple[int, int], Port] = {}
    for s, (kind, label, legs) in enumerate(stmts):
        ins = [j for j in range(len(legs)) if leg_dir[(s, j)] == "in"]
        outs = [j for j in range(len(legs)) if leg_dir[(s, j)] == "out"]
        if kind == "box" and ins:
            raise DiagramError(f"box {label!r} ended up with an input leg")
        nid = bld.add_node(
            kind,
            [space_of[legs[j]] for j in ins],
            [space_of[legs[j]] for j in outs],
            label if kind == "box" else "",
        )
        node_ids.append(nid)
        for slot, j in enumerate(ins):
            ports[(s, j)] = ("i", nid, slot)
        for slot, j in enumerate(outs):
            ports[(s, j)] = ("o", nid, slot)

    for name, places in occur.items():
        ends = [p for p in places if p[0] == "stmt"]
        if len(ends) == 2:
            a = next(p for p in ends if leg_dir[(p[1], p[2])] == "out")
            b = next(p for p in ends if leg_dir[(p[1], p[2])] == "in")
            bld.wire(ports[(a[1], a[2])], ports[(b[1], b[2])])
        else:
            k = next(p[2] for p in places if p[0] == "boundary")
            bld.wire(ports[(ends[0][1], ends[0][2])], ("O", k))
    return bld.diagram()

"""Atom decomposition, series-parallel recognition and membership in the class G.

The class G is the smallest family of graphs containing the chordal and the
series-parallel graphs that is closed under clique sums and adding universal
vertices. Equivalently, every atom of a member (a piece with no clique
separator) is a complete join of a clique with a series-parallel graph. For a
member, the conical distance depends only on the chordal girth ``g``:
``eps(G) = eps(C_g)``, and zero for chordal graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .completion import cycle_epsilon
from .graph import Graph, chordal_girth, induced_subgraph, maximal_cliques


@dataclass
class AtomDecomposition:
    """Atoms (sorted vertex tuples) and the order reassembling them by clique sums.

    ``order[0]`` starts the assembly; atom ``order[k]`` is glued on along
    ``separators[k]``, which equals its intersection with the atoms placed
    before it. ``separators[0]`` is always empty, and so is the separator of
    the first atom of every further connected component.
    """

    atoms: list[tuple[int, ...]]
    separators: list[tuple[int, ...]]
    order: list[int]

    def reassemble(self, n: int, edges_of) -> set:
        """Edge set rebuilt from the atoms; raises ``ValueError`` on an invalid gluing.

        ``edges_of(atom)`` returns the edges induced on an atom.
        """
        placed: set = set()
        edges: set = set()
        for k, i in enumerate(self.order):
            atom = set(self.atoms[i])
            if placed & atom != set(self.separators[k]):
                raise ValueError(f"atom {i} meets earlier atoms outside its separator")
            sep = self.separators[k]
            sep_edges = {(a, b) for a, b in combinations(sorted(sep), 2)}
            if not sep_edges <= edges_of(self.atoms[i]):
                raise ValueError(f"separator {sep} is not a clique")
            placed |= atom
            edges |= edges_of(self.atoms[i])
        if placed != set(range(n)):
            raise ValueError("atoms do not cover every vertex")
        return edges


def _cliques_by_size(g: Graph) -> list[tuple[int, ...]]:
    found = set()
    for c in maximal_cliques(g):
        for r in range(1, len(c) + 1):
            found.update(combinations(c, r))
    return sorted(found, key=lambda c: (len(c), c))


def _neighbourhood(g: Graph, comp) -> set:
    comp = set(comp)
    return {w for v in comp for w in g.adj[v]} - comp


def _finish(atoms: list[tuple], links: dict, n: int) -> AtomDecomposition:
    """Sort atoms and produce a BFS assembly order from the parent links.

    ``links`` maps an atom index to ``(parent_index, separator)``.
    """
    perm = sorted(range(len(atoms)), key=lambda i: atoms[i])
    new = {old: k for k, old in enumerate(perm)}
    sorted_atoms = [atoms[i] for i in perm]
    children: dict = {k: [] for k in range(len(atoms))}
    roots = []
    for old in range(len(atoms)):
        if old in links:
            p, sep = links[old]
            children[new[p]].append((new[old], tuple(sorted(sep))))
        else:
            roots.append(new[old])
    order, seps = [], []
    for r in sorted(roots):
        queue = [(r, ())]
        while queue:
            k, sep = queue.pop(0)
            order.append(k)
            seps.append(sep)
            queue.extend(sorted(children[k]))
    return AtomDecomposition(sorted_atoms, seps, order)


def _decompose_reference(g: Graph) -> AtomDecomposition:
    atoms: list[tuple] = []
    links: dict = {}

    def split(vs: list[int]) -> int:
        """Decompose the connected induced subgraph on ``vs``; return the index of an atom."""
        h, mapping = induced_subgraph(g, vs)
        for c in _cliques_by_size(h):
            comps = h.components(removed=c)
            if len(comps) < 2:
                continue
            sep = {mapping[v] for v in c}
            pieces = []
            for comp in comps:
                piece = {mapping[v] for v in comp} | {mapping[v] for v in _neighbourhood(h, comp)}
                pieces.append(sorted(piece))
            # start from a full component so its atoms hold the whole separator
            full = next(k for k, p in enumerate(pieces) if sep <= set(p))
            pieces.insert(0, pieces.pop(full))
            tops = [split(p) for p in pieces]
            holders = []
            for p, top in zip(pieces, tops):
                holders.append(_atom_containing(atoms, links, top, set(p) & sep))
            first = holders[0]
            for p, hold in zip(pieces[1:], holders[1:]):
                _reroot(links, hold)
                links[hold] = (first, set(p) & sep)
            return first
        atoms.append(tuple(vs))
        return len(atoms) - 1

    for comp in g.components():
        split(comp)
    return _finish(atoms, links, g.n)


def _tree_members(links: dict, top: int, count: int) -> list[int]:
    members = {top}
    changed = True
    while changed:
        changed = False
        for i in range(count):
            if i not in members and i in links and links[i][0] in members:
                members.add(i)
                changed = True
    return sorted(members)


def _atom_containing(atoms, links, top, clique) -> int:
    root = top
    while root in links:
        root = links[root][0]
    for i in _tree_members(links, root, len(atoms)):
        if clique <= set(atoms[i]):
            return i
    raise AssertionError("clique not contained in any atom")


def _reroot(links: dict, new_root: int) -> None:
    """Reverse parent links along the path from ``new_root`` to its root."""
    path = [new_root]
    while path[-1] in links:
        path.append(links[path[-1]][0])
    for child, parent in reversed(list(zip(path, path[1:]))):
        sep = links.pop(child)[1]
        links[parent] = (child, sep)


def mcs_m(g: Graph) -> tuple[list[int], set, set]:
    """Maximum cardinality search for minimal triangulation.

    Returns the elimination order (first eliminated first), the fill edges and
    the generator set: vertices whose label did not exceed the label of the
    vertex numbered just before them.
    """
    n = g.n
    weight = [0] * n
    numbered = [False] * n
    order_rev = []
    fill: set = set()
    gens: set = set()
    prev = -1
    for _ in range(n):
        v = max((u for u in range(n) if not numbered[u]), key=lambda u: (weight[u], -u))
        if weight[v] <= prev:
            gens.add(v)
        prev = weight[v]
        numbered[v] = True
        order_rev.append(v)
        # u is reached if some path v ... u has all interior weights below weight[u]
        reach = []
        for u in range(n):
            if numbered[u]:
                continue
            limit = weight[u]
            seen = {v}
            stack = [v]
            hit = False
            while stack and not hit:
                x = stack.pop()
                for y in g.adj[x]:
                    if numbered[y] and y != v or y in seen:
                        continue
                    if y == u:
                        hit = True
                        break
                    if weight[y] < limit:
                        seen.add(y)
                        stack.append(y)
            if hit:
                reach.append(u)
        for u in reach:
            weight[u] += 1
            if not g.has_edge(u, v):
                fill.add((min(u, v), max(u, v)))
    return order_rev[::-1], fill, gens


def _decompose_fast(g: Graph) -> AtomDecomposition:
    order, fill, gens = mcs_m(g)
    pos = {v: k for k, v in enumerate(order)}
    h_adj = [set(g.adj[v]) for v in range(g.n)]
    for u, v in fill:
        h_adj[u].add(v)
        h_adj[v].add(u)
    alive = set(range(g.n))
    atoms: list[tuple] = []
    seps: list[set] = []
    for x in order:
        if x not in gens or x not in alive:
            continue
        s = {y for y in h_adj[x] if pos[y] > pos[x]}
        if not s or not g.is_clique(s):
            continue
        sub_alive = alive - s
        comp = {x}
        stack = [x]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w in sub_alive and w not in comp:
                    comp.add(w)
                    stack.append(w)
        if comp | s == alive:
            continue
        atoms.append(tuple(sorted(comp | s)))
        seps.append(s)
        alive -= comp
    atoms.append(tuple(sorted(alive)))
    links = {}
    for i, s in enumerate(seps):
        parent = next(j for j in range(i + 1, len(atoms)) if s <= set(atoms[j]))
        links[i] = (parent, s)
    # the assembly must start from the atom that is never split off
    last = len(atoms) - 1
    _reroot(links, last)
    return _finish(atoms, links, g.n)


def clique_separator_decomposition(g: Graph, method: str = "fast") -> AtomDecomposition:
    """Split ``g`` along clique minimal separators into atoms.

    ``method="reference"`` repeatedly removes the lexicographically smallest
    minimum-size clique separator; ``method="fast"`` uses a minimal
    elimination ordering. Both return the same atoms.
    """
    if method == "reference":
        return _decompose_reference(g)
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    parts = []
    for comp in g.components():
        h, mapping = induced_subgraph(g, comp)
        d = _decompose_fast(h)
        parts.append([tuple(mapping[v] for v in a) for a in d.atoms])
        parts[-1] = (parts[-1], [tuple(mapping[v] for v in s) for s in d.separators], d.order)
    atoms, links = [], {}
    for comp_atoms, comp_seps, comp_order in parts:
        base = len(atoms)
        atoms.extend(comp_atoms)
        placed = []
        for k, i in enumerate(comp_order):
            if k > 0:
                sep = set(comp_seps[k])
                parent = next(j for j in placed if sep <= set(comp_atoms[j]))
                links[base + i] = (base + parent, sep)
            placed.append(i)
    return _finish(atoms, links, g.n)


# -- series-parallel ----------------------------------------------------------

@dataclass
class SeriesParallelResult:
    series_parallel: bool
    trace: list[tuple] = field(default_factory=list)
    kernel: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.series_parallel


def is_series_parallel(g: Graph) -> SeriesParallelResult:
    """Whether ``g`` has no K_4 minor, by reduction to the empty graph.

    Works on a multigraph copy: merge parallel edges, delete vertices of
    degree at most 1 and smooth vertices of degree 2, always acting on the
    smallest eligible vertex. The trace lists ``("merge", u, v)``,
    ``("delete", v)`` and ``("smooth", v, u, w)`` steps. If the reduction
    stalls the remaining kernel has minimum degree 3, hence a K_4 minor.
    """
    mult: dict = {e: 1 for e in g.edges}
    nbrs = {v: set(g.adj[v]) for v in range(g.n)}
    trace: list[tuple] = []

    def degree(v):
        return sum(mult[(min(v, w), max(v, w))] for w in nbrs[v])

    while nbrs:
        multi = sorted(e for e, k in mult.items() if k > 1)
        if multi:
            u, v = multi[0]
            mult[(u, v)] = 1
            trace.append(("merge", u, v))
            continue
        low = [v for v in sorted(nbrs) if degree(v) <= 1]
        if low:
            v = low[0]
            for w in nbrs[v]:
                nbrs[w].discard(v)
                del mult[(min(v, w), max(v, w))]
            del nbrs[v]
            trace.append(("delete", v))
            continue
        two = [v for v in sorted(nbrs) if degree(v) == 2]
        if not two:
            return SeriesParallelResult(False, trace, sorted(nbrs))
        v = two[0]
        u, w = sorted(nbrs[v])
        for x in (u, w):
            nbrs[x].discard(v)
            del mult[(min(v, x), max(v, x))]
        del nbrs[v]
        key = (u, w)
        mult[key] = mult.get(key, 0) + 1
        nbrs[u].add(w)
        nbrs[w].add(u)
        trace.append(("smooth", v, u, w))
    return SeriesParallelResult(True, trace, [])


def peel_cone_vertices(g: Graph) -> tuple[list[int], Graph, list[int]]:
    """Remove universal vertices (smallest first) until none is left.

    Returns ``(peeled, remainder, mapping)``: vertex ``k`` of ``remainder`` is
    ``mapping[k]`` in ``g``.
    """
    rest = list(range(g.n))
    peeled = []
    while rest:
        h, _ = induced_subgraph(g, rest)
        univ = [k for k in range(h.n) if h.degree(k) == h.n - 1]
        if not univ:
            break
        v = rest[univ[0]]
        peeled.append(v)
        rest.remove(v)
    remainder, mapping = induced_subgraph(g, rest)
    return peeled, remainder, mapping


# -- membership ---------------------------------------------------------------

@dataclass
class AtomReport:
    vertices: tuple[int, ...]
    separator: tuple[int, ...]
    cone_vertices: list[int]
    remainder: list[int]
    series_parallel: bool
    trace: list[tuple]
    kernel: list[int]
    chordal_girth: float


@dataclass
class MembershipCertificate:
    member: bool
    n: int
    m: int
    decomposition: AtomDecomposition
    per_atom: list[AtomReport]
    chordal_girth: float
    epsilon: float | None = None
    refutation: tuple[int, str] | None = None

    def to_text(self) -> str:
        return format_certificate(self)


def is_in_class_G(g: Graph, method: str = "fast") -> MembershipCertificate:
    """Decide membership in the class G with per-atom evidence."""
    dec = clique_separator_decomposition(g, method)
    reports = []
    refutation = None
    for k, i in enumerate(dec.order):
        atom = dec.atoms[i]
        h, mapping = induced_subgraph(g, atom)
        peeled, rem, rem_map = peel_cone_vertices(h)
        sp = is_series_parallel(rem)
        reports.append(AtomReport(
            vertices=atom,
            separator=dec.separators[k],
            cone_vertices=[mapping[v] for v in peeled],
            remainder=[mapping[v] for v in rem_map],
            series_parallel=sp.series_parallel,
            trace=[(step[0],) + tuple(mapping[rem_map[v]] for v in step[1:]) for step in sp.trace],
            kernel=[mapping[rem_map[v]] for v in sp.kernel],
            chordal_girth=chordal_girth(h),
        ))
        if not sp and refutation is None:
            kern = " ".join(str(v) for v in reports[-1].kernel)
            refutation = (i, f"after peeling {len(peeled)} cone vertices the remainder has a K4 minor "
                             f"(reduction stalls on kernel {kern})")
    girth = min((r.chordal_girth for r in reports), default=math.inf)
    member = refutation is None
    cert = MembershipCertificate(member, g.n, g.m, dec, reports, girth, None, refutation)
    if member:
        cert.epsilon = epsilon_of_class_member(cert)
    return cert


def epsilon_of_class_member(cert: MembershipCertificate) -> float:
    """``eps(C_g)`` for the chordal girth ``g`` of a member; zero when chordal."""
    if not cert.member:
        raise ValueError("certificate does not establish membership")
    if math.isinf(cert.chordal_girth):
        return 0.0
    return cycle_epsilon(int(cert.chordal_girth))


def _fmt(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _vs(vs) -> str:
    return " ".join(str(v) for v in vs) if len(vs) else "-"


def format_certificate(cert: MembershipCertificate) -> str:
    """Key-value text, a header block followed by one block per atom in assembly order."""
    lines = [
        f"member: {'true' if cert.member else 'false'}",
        f"vertices: {cert.n}",
        f"edges: {cert.m}",
        f"chordal_girth: {_fmt(cert.chordal_girth)}",
        f"epsilon: {_fmt(cert.epsilon) if cert.member else '-'}",
        f"atoms: {len(cert.per_atom)}",
    ]
    if cert.refutation is not None:
        lines.append(f"refutation_atom: {_vs(cert.decomposition.atoms[cert.refutation[0]])}")
        lines.append(f"reason: {cert.refutation[1]}")
    for k, r in enumerate(cert.per_atom):
        steps = "; ".join(" ".join(str(x) for x in s) for s in r.trace)
        lines += [
            "",
            f"[atom {k}]",
            f"vertices: {_vs(r.vertices)}",
            f"separator: {_vs(r.separator)}",
            f"cone_vertices: {_vs(r.cone_vertices)}",
            f"remainder: {_vs(r.remainder)}",
            f"series_parallel: {'true' if r.series_parallel else 'false'}",
            f"chordal_girth: {_fmt(r.chordal_girth)}",
            f"reduction: {steps or '-'}",
        ]
        if not r.series_parallel:
            lines.append(f"kernel: {_vs(r.kernel)}")
    return "\n".join(lines) + "\n"

"""Automorphisms of the rooted m-tree presented by wreath recursion.

A machine assigns every declared state a root permutation and a tuple of m
child words (its sections); an automorphism is a reduced word over the states
of one machine.  Composite and inverse words are handled symbolically by the
section calculus

    (gh)_y = g_y h_{y^{sigma(g)}},      (g^-1)_y = (g_{y^{sigma(g)^-1}})^-1,

so elements of non-finite-state representations remain fully manipulable.

Equality of tree automorphisms is undecidable in general; everything here is
depth-bounded.  Machines are immutable once built; the memo caches they carry
are idempotent, so concurrent use may duplicate work but always agrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Sequence

from .perm_word import GroupWord, Perm

String = tuple[int, ...]


class SelfSimilarMachine:
    """Base for wreath-recursion machines.

    Subclasses provide ``_compute_entry(name) -> (sections, perm)`` where
    ``sections`` is a tuple of ``alphabet_size`` words over this machine's
    state names.  A machine may carry an exact group model (see
    ``gdata_engine``); if it does, words are canonicalised to model elements
    for caching and state deduplication.
    """

    model = None

    def __init__(self, alphabet_size: int):
        if alphabet_size < 1:
            raise ValueError("alphabet size must be at least 1")
        self.alphabet_size = alphabet_size
        self.generators: tuple[str, ...] = ()
        self._entries: dict[str, tuple[tuple[GroupWord, ...], Perm]] = {}
        # name -> (section letters, inverted section letters, images, inverse images)
        self._fast: dict[str, tuple] = {}
        # word/element -> [deepest depth proven trivial, shallowest depth seen nontrivial]
        self._triv: dict[object, list] = {}
        # word/element -> (root_is_identity, section letter tuples) | (False, None)
        self._expand: dict[object, tuple] = {}

    def entry(self, name: str) -> tuple[tuple[GroupWord, ...], Perm]:
        got = self._entries.get(name)
        if got is None:
            got = self._entries[name] = self._compute_entry(name)
        return got

    def _fast_entry(self, name: str) -> tuple:
        got = self._fast.get(name)
        if got is None:
            sections, perm = self.entry(name)
            inv = perm.inverse()
            neg = tuple(
                tuple((n, -s) for n, s in reversed(sections[inv(y)].letters))
                for y in range(self.alphabet_size)
            )
            got = self._fast[name] = (
                tuple(w.letters for w in sections),
                neg,
                perm.images,
                inv.images,
            )
        return got

    def _compute_entry(self, name: str) -> tuple[tuple[GroupWord, ...], Perm]:
        raise NotImplementedError

    def element_of(self, word: GroupWord):
        """Exact model element of a word, when the machine carries a model."""
        if self.model is None:
            raise ValueError("machine carries no group model")
        elem = self.model.identity()
        for name, sign in word:
            g = self._state_elements[name]
            if sign < 0:
                g = self.model.invert(g)
            elem = self.model.multiply(elem, g)
        return elem

    def cache_key(self, letters: tuple) -> object:
        if self.model is None:
            return letters
        return self.element_of(GroupWord(letters, reduced=True))

    def automorphism(self, word) -> "Automorphism":
        if isinstance(word, str):
            from .perm_word import parse_word

            word = parse_word(word)
        return Automorphism(self, word)


class TableMachine(SelfSimilarMachine):
    """A machine given by an explicit finite recursion table."""

    def __init__(self, alphabet_size: int, table: dict[str, tuple[Sequence[GroupWord], Perm]]):
        super().__init__(alphabet_size)
        self.generators = tuple(table)
        names = set(table)
        for name, (sections, perm) in table.items():
            sections = tuple(sections)
            if len(sections) != alphabet_size:
                raise ValueError(f"state {name}: expected {alphabet_size} sections")
            if perm.degree != alphabet_size:
                raise ValueError(f"state {name}: root permutation degree mismatch")
            for w in sections:
                for sym, _ in w:
                    if sym not in names:
                        raise ValueError(f"state {name}: undeclared state {sym!r} in section")
            self._entries[name] = (sections, perm)

    def _compute_entry(self, name: str):
        raise ValueError(f"undeclared state: {name!r}")


class Automorphism:
    """A tree automorphism: a reduced word over the states of one machine."""

    __slots__ = ("machine", "word")

    def __init__(self, machine: SelfSimilarMachine, word: GroupWord = GroupWord.identity()):
        self.machine = machine
        self.word = word

    def root_perm(self) -> Perm:
        return root_perm(self.machine, self.word)

    def section(self, y: int) -> "Automorphism":
        return Automorphism(self.machine, section_word(self.machine, self.word, y))

    def apply(self, string: Iterable[int]) -> String:
        return apply_word(self.machine, self.word, tuple(string))

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        if self.machine is not other.machine:
            raise ValueError("cannot multiply automorphisms of different machines")
        return Automorphism(self.machine, self.word * other.word)

    def inverse(self) -> "Automorphism":
        return Automorphism(self.machine, self.word.inverse())

    def __pow__(self, n: int) -> "Automorphism":
        return Automorphism(self.machine, self.word**n)

    def __repr__(self) -> str:
        return f"Automorphism({self.word!s})"


@dataclass
class Portrait:
    """Root permutations of all sections down to (but excluding) a depth."""

    depth: int
    labels: dict[String, Perm]


@dataclass
class StateSet:
    """Result of a depth-bounded state enumeration."""

    states: list[Automorphism]
    truncated: bool

    def __len__(self) -> int:
        return len(self.states)


def root_perm(machine: SelfSimilarMachine, word: GroupWord) -> Perm:
    images = tuple(range(machine.alphabet_size))
    fast = machine._fast_entry
    for name, sign in word:
        qi = fast(name)[2 if sign > 0 else 3]
        images = tuple(qi[i] for i in images)
    return Perm(images)


def section_word(machine: SelfSimilarMachine, word: GroupWord, y: int) -> GroupWord:
    if not 0 <= y < machine.alphabet_size:
        raise ValueError(f"letter {y} out of range for alphabet of {machine.alphabet_size}")
    out: list = []
    push = out.append
    pop = out.pop
    cur = y
    fast = machine._fast_entry
    for name, sign in word:
        pos, neg, images, inv_images = fast(name)
        if sign > 0:
            part = pos[cur]
            cur = images[cur]
        else:
            part = neg[cur]
            cur = inv_images[cur]
        for sym in part:
            if out and out[-1][0] == sym[0] and out[-1][1] == -sym[1]:
                pop()
            else:
                push(sym)
    return GroupWord(tuple(out), reduced=True)


def apply_word(machine: SelfSimilarMachine, word: GroupWord, string: String) -> String:
    out = []
    for y in string:
        if not 0 <= y < machine.alphabet_size:
            raise ValueError(f"letter {y} out of range")
        out.append(root_perm(machine, word)(y))
        word = section_word(machine, word, y)
    return tuple(out)


def _expansion(machine: SelfSimilarMachine, letters: tuple, key: object):
    got = machine._expand.get(key)
    if got is None:
        word = GroupWord(letters, reduced=True)
        if root_perm(machine, word).is_identity():
            secs = tuple(
                section_word(machine, word, y).letters for y in range(machine.alphabet_size)
            )
            got = (True, secs)
        else:
            got = (False, None)
        machine._expand[key] = got
    return got


def trivial_to_depth(machine: SelfSimilarMachine, word, depth: int) -> bool:
    """True iff the word fixes every string of length <= depth.

    Synchronised recursive descent with a per-machine memo keyed on reduced
    words (or exact model elements, when available), rather than enumeration
    of all m^depth strings.
    """
    if isinstance(word, Automorphism):
        word = word.word

    def visit(letters: tuple, d: int) -> bool:
        if d <= 0 or not letters:
            return True
        key = machine.cache_key(letters)
        status = machine._triv.get(key)
        if status is None:
            status = machine._triv[key] = [0, None]
        if status[1] is not None and d >= status[1]:
            return False
        if status[0] >= d:
            return True
        root_id, secs = _expansion(machine, letters, key)
        if not root_id:
            status[1] = 1
            return False
        for sec in secs:
            if not visit(sec, d - 1):
                if status[1] is None or d < status[1]:
                    status[1] = d
                return False
        if d > status[0]:
            status[0] = d
        return True

    return visit(word.letters, depth)


def equal_to_depth(a: Automorphism, b: Automorphism, depth: int) -> bool:
    """True iff a and b act identically on all strings of length <= depth."""
    if a.machine is b.machine:
        return trivial_to_depth(a.machine, a.word * b.word.inverse(), depth)
    if a.machine.alphabet_size != b.machine.alphabet_size:
        raise ValueError("cannot compare automorphisms over different alphabets")
    m = a.machine.alphabet_size
    memo: dict[tuple, bool] = {}

    def eq(u: tuple, v: tuple, d: int) -> bool:
        if d <= 0:
            return True
        key = (a.machine.cache_key(u), b.machine.cache_key(v), d)
        got = memo.get(key)
        if got is not None:
            return got
        wu = GroupWord(u, reduced=True)
        wv = GroupWord(v, reduced=True)
        result = root_perm(a.machine, wu) == root_perm(b.machine, wv) and all(
            eq(
                section_word(a.machine, wu, y).letters,
                section_word(b.machine, wv, y).letters,
                d - 1,
            )
            for y in range(m)
        )
        memo[key] = result
        return result

    return eq(a.word.letters, b.word.letters, depth)


def portrait(a: Automorphism, depth: int) -> Portrait:
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    labels: dict[String, Perm] = {}
    frontier: list[tuple[String, GroupWord]] = [((), a.word)]
    for _ in range(depth):
        next_frontier = []
        for path, word in frontier:
            labels[path] = root_perm(a.machine, word)
            for y in range(a.machine.alphabet_size):
                next_frontier.append((path + (y,), section_word(a.machine, word, y)))
        frontier = next_frontier
    return Portrait(depth, labels)


def states(a: Automorphism, max_states: int, sep_depth: int) -> StateSet:
    """BFS closure of ``a`` under sections, deduplicated exactly (model) or to depth.

    Stops with ``truncated=True`` once more than ``max_states`` classes appear;
    a truncated result is expected for non-finite-state automorphisms.
    """
    if max_states < 1:
        raise ValueError("max_states must be at least 1")
    machine = a.machine
    reps: list[Automorphism] = []
    keys: set = set()
    queue: list[GroupWord] = [a.word]
    while queue:
        word = queue.pop(0)
        if machine.model is not None:
            key = machine.cache_key(word.letters)
            if key in keys:
                continue
            keys.add(key)
        else:
            if any(
                trivial_to_depth(machine, word * r.word.inverse(), sep_depth) for r in reps
            ):
                continue
        if len(reps) == max_states:
            return StateSet(reps, True)
        reps.append(Automorphism(machine, word))
        for y in range(machine.alphabet_size):
            queue.append(section_word(machine, word, y))
    return StateSet(reps, False)


def orbit_type(
    machine: SelfSimilarMachine, gens: Optional[Sequence[Automorphism]] = None
) -> tuple[int, ...]:
    """Orbit sizes of the group generated by the root permutations, ordered by
    each orbit's minimal letter."""
    if gens is None:
        gens = [machine.automorphism(GroupWord.gen(name)) for name in machine.generators]
    if not gens:
        raise ValueError("orbit_type needs at least one generator")
    m = machine.alphabet_size
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in gens:
        p = g.root_perm()
        for i in range(m):
            ri, rj = find(i), find(p(i))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    orbits: dict[int, int] = {}
    for i in range(m):
        orbits[find(i)] = orbits.get(find(i), 0) + 1
    return tuple(size for _, size in sorted(orbits.items()))


def format_orbit_type(sizes: Sequence[int]) -> str:
    return "(" + ",".join(str(s) for s in sizes) + ")"


def inflate(machine: SelfSimilarMachine, k: int) -> TableMachine:
    """Re-read a degree-m machine as a machine on length-k blocks (degree m^k).

    Blocks are ordered big-endian: block (y_1..y_k) is letter sum(y_i * m^(k-i)).
    """
    if k < 1:
        raise ValueError("inflation level must be at least 1")
    m = machine.alphabet_size
    blocks = list(product(range(m), repeat=k))
    index = {b: i for i, b in enumerate(blocks)}
    table: dict[str, tuple[list[GroupWord], Perm]] = {}
    for name in machine.generators:
        word = GroupWord.gen(name)
        images = [index[apply_word(machine, word, b)] for b in blocks]
        sections = []
        for b in blocks:
            w = word
            for y in b:
                w = section_word(machine, w, y)
            sections.append(w)
        table[name] = (sections, Perm(images))
    return TableMachine(m**k, table)


def find_moving_string(a: Automorphism, max_depth: int) -> Optional[String]:
    """A shortest string moved by ``a``, or None if trivial to ``max_depth``."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    machine = a.machine
    for k in range(1, max_depth + 1):
        if not trivial_to_depth(machine, a.word, k):
            return _extract_witness(machine, a.word, k)
    return None


def _extract_witness(machine: SelfSimilarMachine, word: GroupWord, k: int) -> String:
    p = root_perm(machine, word)
    if not p.is_identity():
        return (min(i for i in range(p.degree) if p(i) != i),)
    for y in range(machine.alphabet_size):
        sec = section_word(machine, word, y)
        if not trivial_to_depth(machine, sec, k - 1):
            return (y,) + _extract_witness(machine, sec, k - 1)
    raise AssertionError("witness extraction reached a trivial subtree")

"""Deterministic command line for building and probing tree representations.

Exit codes: 0 success, 1 a requested check failed, 2 usage or input error.
Identical inputs always produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import mealy, wreath_models
from .gdata_engine import EngineMachine, build_representation
from .perm_word import GroupWord, parse_word
from .tree_core import (
    Automorphism,
    SelfSimilarMachine,
    find_moving_string,
    format_orbit_type,
    inflate,
    orbit_type,
    portrait,
    states,
    trivial_to_depth,
)


def _load_machine(spec: str) -> SelfSimilarMachine:
    if spec.startswith("builtin:"):
        return mealy.builtin_machine(spec[len("builtin:") :])
    return mealy.to_machine(mealy.parse(Path(spec).read_text(encoding="utf-8")))


def _parse_string(text: str, m: int) -> tuple[int, ...]:
    text = text.strip()
    if not text or text == "-":
        return ()
    if "," in text:
        letters = tuple(int(tok) for tok in text.split(","))
    else:
        if m > 10:
            raise ValueError("alphabets beyond 10 letters need comma-separated strings")
        letters = tuple(int(ch) for ch in text)
    for y in letters:
        if not 0 <= y < m:
            raise ValueError(f"letter {y} out of range for alphabet of {m}")
    return letters


def _format_string(letters: tuple[int, ...], m: int) -> str:
    if not letters:
        return "-"
    if m <= 10:
        return "".join(str(y) for y in letters)
    return ",".join(str(y) for y in letters)


# ---------------------------------------------------------------------------
# Recursion printing: express engine sections as short generator words.
# ---------------------------------------------------------------------------


def _word_table(machine: EngineMachine, max_len: int):
    table = getattr(machine, "_expr_table", None)
    if table is not None:
        return table
    model = machine.model
    table = {model.identity(): GroupWord.identity()}
    frontier = [model.identity()]
    gens = [(name, machine._state_elements[name]) for name in machine.generators]
    for _ in range(max_len):
        new = []
        for elem in frontier:
            for name, g in gens:
                for sign in (1, -1):
                    nxt = model.multiply(elem, g if sign > 0 else model.invert(g))
                    if nxt not in table:
                        table[nxt] = table[elem] * GroupWord.gen(name, sign)
                        new.append(nxt)
        frontier = new
    machine._expr_table = table
    return table


def _express(machine: SelfSimilarMachine, word: GroupWord, todo: list, search_len: int) -> str:
    if not word:
        return "e"
    if machine.model is None:
        return str(word)
    elem = machine.element_of(word)
    if machine.model.is_identity(elem):
        return "e"
    name = machine._state_names.get(elem)
    if name in machine.generators:
        return name
    short = _word_table(machine, search_len).get(elem)
    if short is not None:
        return str(short)
    name = machine.state_of(elem)
    todo.append(name)
    return name


def recursion_lines(
    machine: SelfSimilarMachine, search_len: int = 5, max_lines: int = 512
) -> list[str]:
    """Tuple-notation recursion, one line per state: ``name = (w0, .., w(m-1)) cycles``.

    Sections outside the generator ball get states of their own, printed after
    the generators; a machine that keeps spawning such states past
    ``max_lines`` has no finite listing and raises instead.
    """
    lines = []
    printed = set()
    todo = list(machine.generators)
    while todo:
        name = todo.pop(0)
        if name in printed:
            continue
        if len(printed) >= max_lines:
            raise ValueError(f"state closure exceeded {max_lines} states; not printable")
        printed.add(name)
        sections, perm = machine.entry(name)
        parts = [_express(machine, w, todo, search_len) for w in sections]
        suffix = "" if perm.is_identity() else f" {perm}"
        lines.append(f"{name} = ({', '.join(parts)}){suffix}")
    return lines


def _emit_machine(machine: SelfSimilarMachine, mode: str, out_path) -> None:
    if mode == "recursions":
        text = "\n".join(recursion_lines(machine)) + "\n"
    elif mode == "file":
        text = mealy.emit(mealy.machine_to_mealy(machine))
    elif mode == "dot":
        text = mealy.to_dot(mealy.machine_to_mealy(machine))
    else:
        raise ValueError(f"unknown emit mode {mode!r}")
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def _cmd_act(args) -> int:
    machine = _load_machine(args.machine)
    word = parse_word(args.word)
    string = _parse_string(args.string, machine.alphabet_size)
    moved = Automorphism(machine, word).apply(string)
    print(_format_string(moved, machine.alphabet_size))
    return 0


def _cmd_orbit_type(args) -> int:
    machine = _load_machine(args.machine)
    print(format_orbit_type(orbit_type(machine)))
    return 0


def _cmd_portrait(args) -> int:
    machine = _load_machine(args.machine)
    a = Automorphism(machine, parse_word(args.word))
    result = portrait(a, args.depth)
    for path in sorted(result.labels, key=lambda p: (len(p), p)):
        indent = "  " * len(path)
        print(f"{indent}{_format_string(path, machine.alphabet_size)} {result.labels[path]}")
    return 0


def _cmd_states(args) -> int:
    machine = _load_machine(args.machine)
    a = Automorphism(machine, parse_word(args.word))
    result = states(a, args.max, args.sep_depth)
    for aut in result.states:
        print(aut.word)
    print(f"# states: {len(result)} ({'truncated' if result.truncated else 'complete'})")
    return 0


def _cmd_check(args) -> int:
    machine = _load_machine(args.machine)
    failed = 0
    for raw in Path(args.relations).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word = parse_word(line)
        ok = trivial_to_depth(machine, word, args.depth)
        if not ok:
            failed += 1
        print(f"{'PASS' if ok else 'FAIL'} {line}")
    return 1 if failed else 0


def _cmd_witness(args) -> int:
    data = wreath_models.data_by_selector(args.model)
    machine = build_representation(data)
    a = Automorphism(machine, parse_word(args.word))
    moved = find_moving_string(a, args.max_depth)
    if moved is None:
        print(f"trivial-to-depth {args.max_depth}")
    else:
        print(_format_string(moved, machine.alphabet_size))
    return 0


def _cmd_build(args) -> int:
    data = wreath_models.data_by_selector(args.data)
    _emit_machine(build_representation(data), args.emit, args.output)
    return 0


def _cmd_inflate(args) -> int:
    machine = _load_machine(args.machine)
    _emit_machine(inflate(machine, args.k), args.emit, args.output)
    return 0


def _cmd_concat(args) -> int:
    selector = args.data if args.data.startswith("concat:") else f"concat:{args.data}"
    data = wreath_models.data_by_selector(selector)
    _emit_machine(build_representation(data), args.emit, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfsim",
        description="Build and probe self-similar group actions on rooted m-trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def machine_flag(p):
        p.add_argument("--machine", required=True, help="automaton file or builtin:NAME")

    p = sub.add_parser("act", help="apply a word to a string")
    machine_flag(p)
    p.add_argument("--word", required=True)
    p.add_argument("--string", required=True)
    p.set_defaults(func=_cmd_act)

    p = sub.add_parser("orbit-type", help="orbit sizes on the first level")
    machine_flag(p)
    p.set_defaults(func=_cmd_orbit_type)

    p = sub.add_parser("portrait", help="root permutations down to a depth")
    machine_flag(p)
    p.add_argument("--word", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=_cmd_portrait)

    p = sub.add_parser("states", help="closure of a word under sections")
    machine_flag(p)
    p.add_argument("--word", required=True)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--sep-depth", type=int, required=True)
    p.set_defaults(func=_cmd_states)

    p = sub.add_parser("check", help="verify one expected-trivial word per line")
    machine_flag(p)
    p.add_argument("--relations", required=True, help="file with one word per line")
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("witness", help="find a string moved by a model word")
    p.add_argument("--model", required=True, help="data selector, e.g. zwrz")
    p.add_argument("--word", required=True)
    p.add_argument("--max-depth", type=int, required=True)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("build", help="build the machine of a data selector")
    p.add_argument("--data", required=True)
    p.add_argument("--emit", choices=("recursions", "file", "dot"), default="recursions")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("inflate", help="re-read a machine on length-k blocks")
    machine_flag(p)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--emit", choices=("recursions", "file", "dot"), default="recursions")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_inflate)

    p = sub.add_parser("concat", help="concatenate two data selectors over one top group")
    p.add_argument("--data", required=True, help="<selector>+<selector>")
    p.add_argument("--emit", choices=("recursions", "file", "dot"), default="recursions")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_concat)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

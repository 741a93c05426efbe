"""The Bell expression: a product of four-way block choices, expanded.

Every block contributes one of four signed product terms,

    +(X1 X2 z2)   -(Y1 Y2 z2)   +(X1 x1 Y2 y2)   +(Y1 x1 X2 y2)

and the Bell expression is the product over blocks of (choice1 + choice2 +
choice3 + choice4), expanded into 4**N signed correlation terms.  On the
block-structured state every signed term takes the value +1, so the quantum
value is exactly 4**N.

Terms are streamed in lexicographic choice order (block 1 is the most
significant base-4 digit) and never materialized as a whole.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .pauli import Observable, PauliOp, _xz_exponent, pauli_to_string
from .state import (
    DENSE_BLOCK_CAP,
    LetterPair,
    StabilizerState,
    _expect_xz,
    block_operator,
    build_state,
    dense_expectation,
    dense_state,
)


@dataclass(frozen=True, slots=True)
class BlockTerm:
    """One entry of the per-block menu: a label, a sign, and its observables."""

    label: str
    sign: int
    observables: tuple[LetterPair, ...]

    def particle_observables(self, particle: int) -> tuple[str, ...]:
        return tuple(letter for letter, p in self.observables if p == particle)


BLOCK_TERM_MENU: tuple[BlockTerm, ...] = (
    BlockTerm("XXz", +1, (("X", 1), ("X", 2), ("z", 2))),
    BlockTerm("YYz", -1, (("Y", 1), ("Y", 2), ("z", 2))),
    BlockTerm("XxYy", +1, (("X", 1), ("x", 1), ("Y", 2), ("y", 2))),
    BlockTerm("YxXy", +1, (("Y", 1), ("x", 1), ("X", 2), ("y", 2))),
)


@dataclass(frozen=True, slots=True)
class BellTerm:
    """One expanded term: per-block menu choices, overall sign, its operator."""

    n_blocks: int
    index: int
    choices: tuple[int, ...]
    sign: int
    operator: PauliOp

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(BLOCK_TERM_MENU[c].label for c in self.choices)

    def observables(self) -> Iterator[Observable]:
        for block, c in enumerate(self.choices, start=1):
            for letter, particle in BLOCK_TERM_MENU[c].observables:
                yield Observable(letter, particle, block)


@dataclass(frozen=True, slots=True)
class MeasurementSetting:
    """One observer's local setting: the observables it measures, per block."""

    particle: int
    blocks: tuple[tuple[Observable, ...], ...]

    def all_observables(self) -> Iterator[Observable]:
        for group in self.blocks:
            yield from group


def n_terms(n_blocks: int) -> int:
    return 4**n_blocks


def _block_tables(n_blocks: int) -> list[list[tuple[int, int, int]]]:
    """Raw (x, z, e) of every menu choice placed on every block.

    Blocks occupy disjoint qubits, so a term's operator is the OR of its
    block masks and its phase exponent is the sum of the block exponents.
    """
    tables = []
    for block in range(1, n_blocks + 1):
        ops = [
            block_operator(+1, t.observables, block, n_blocks) for t in BLOCK_TERM_MENU
        ]
        tables.append([(op.x, op.z, _xz_exponent(op)) for op in ops])
    return tables


def term_at(n_blocks: int, index: int) -> BellTerm:
    """The index-th term of the lexicographic stream (base-4 decode)."""
    if not 0 <= index < n_terms(n_blocks):
        raise ValueError(f"term index {index} out of range for {n_blocks} blocks")
    digits = []
    rest = index
    for _ in range(n_blocks):
        rest, d = divmod(rest, 4)
        digits.append(d)
    choices = tuple(reversed(digits))
    return _make_term(n_blocks, index, choices, _block_tables(n_blocks))


def _make_term(
    n_blocks: int,
    index: int,
    choices: tuple[int, ...],
    tables: list[list[tuple[int, int, int]]],
) -> BellTerm:
    x = z = e = 0
    sign = 1
    for block, c in enumerate(choices):
        bx, bz, be = tables[block][c]
        x |= bx
        z |= bz
        e += be
        sign *= BLOCK_TERM_MENU[c].sign
    e %= 4
    op = PauliOp(4 * n_blocks, x, z, (e - (x & z).bit_count()) % 4)
    return BellTerm(n_blocks, index, choices, sign, op)


def enumerate_terms(
    n_blocks: int, start: int = 0, stop: int | None = None
) -> Iterator[BellTerm]:
    """Stream the expanded terms for indices [start, stop), never materialized."""
    total = n_terms(n_blocks)
    if stop is None:
        stop = total
    if not (0 <= start <= stop <= total):
        raise ValueError(f"bad term range [{start}, {stop}) for {n_blocks} blocks")
    tables = _block_tables(n_blocks)
    rest = start
    digits = []
    for _ in range(n_blocks):
        rest, d = divmod(rest, 4)
        digits.append(d)
    choices = list(reversed(digits))
    for index in range(start, stop):
        yield _make_term(n_blocks, index, tuple(choices), tables)
        for pos in range(n_blocks - 1, -1, -1):  # base-4 increment
            choices[pos] += 1
            if choices[pos] < 4:
                break
            choices[pos] = 0


def settings_for_term(term: BellTerm) -> tuple[MeasurementSetting, MeasurementSetting]:
    """Split a term into the two observers' local measurement settings."""
    settings = []
    for particle in (1, 2):
        blocks = tuple(
            tuple(
                Observable(letter, particle, block)
                for letter, p in BLOCK_TERM_MENU[c].observables
                if p == particle
            )
            for block, c in zip(range(1, term.n_blocks + 1), term.choices)
        )
        settings.append(MeasurementSetting(particle, blocks))
    return settings[0], settings[1]


def _evaluate_range(
    n_blocks: int,
    start: int,
    stop: int,
    rows: list[tuple[int, int, int, int, int]],
    tables: list[list[tuple[int, int, int]]],
) -> tuple[int, list[tuple[int, int]]]:
    """Sum of signed expectations over a term-index range, plus any non-+1 terms.

    Works in X^x Z^z normal form throughout; blocks sit on disjoint qubits,
    so masks OR together and exponents add with no cross phase.
    """
    signs = [t.sign for t in BLOCK_TERM_MENU]
    rest = start
    digits = []
    for _ in range(n_blocks):
        rest, d = divmod(rest, 4)
        digits.append(d)
    choices = list(reversed(digits))
    total = 0
    bad: list[tuple[int, int]] = []
    for index in range(start, stop):
        x = z = e = 0
        sign = 1
        for block, c in enumerate(choices):
            bx, bz, be = tables[block][c]
            x |= bx
            z |= bz
            e += be
            sign *= signs[c]
        signed = sign * _expect_xz(rows, x, z, e % 4)
        total += signed
        if signed != 1:
            bad.append((index, signed))
        for pos in range(n_blocks - 1, -1, -1):
            choices[pos] += 1
            if choices[pos] < 4:
                break
            choices[pos] = 0
    return total, bad


def quantum_value(n_blocks: int, backend: str = "stabilizer", threads: int = 1) -> int:
    """Exact value of the Bell expression on the state: 4**N.

    Evaluates every expanded term individually and requires each signed
    expectation to be +1; any other value is a hard failure.
    """
    if backend not in ("stabilizer", "dense"):
        raise ValueError(f"unknown backend {backend!r}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    total_terms = n_terms(n_blocks)
    if backend == "dense":
        if n_blocks > DENSE_BLOCK_CAP:
            raise ValueError(f"dense backend capped at {DENSE_BLOCK_CAP} blocks")
        psi = dense_state(n_blocks)
        total = 0
        bad = []
        for term in enumerate_terms(n_blocks):
            val = dense_expectation(psi, term.operator)
            signed = term.sign * val
            if abs(signed - round(signed)) > 1e-12:
                raise AssertionError(f"non-integer term expectation: {signed}")
            signed = int(round(signed))
            total += signed
            if signed != 1:
                bad.append((term.index, signed))
        _raise_if_bad(bad)
        return total

    state = build_state(n_blocks)
    tables = _block_tables(n_blocks)
    if threads == 1:
        total, bad = _evaluate_range(n_blocks, 0, total_terms, state._rows, tables)
    else:
        chunk = math.ceil(total_terms / threads)
        ranges = [
            (lo, min(lo + chunk, total_terms)) for lo in range(0, total_terms, chunk)
        ]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(
                    lambda r: _evaluate_range(n_blocks, r[0], r[1], state._rows, tables),
                    ranges,
                )
            )
        total = sum(p[0] for p in parts)
        bad = [b for p in parts for b in p[1]]
    _raise_if_bad(bad)
    return total


def _raise_if_bad(bad: list[tuple[int, int]]) -> None:
    if bad:
        head = ", ".join(f"term {i} -> {v:+d}" for i, v in bad[:5])
        raise ValueError(
            f"{len(bad)} expanded terms do not contribute +1 ({head}{', ...' if len(bad) > 5 else ''})"
        )

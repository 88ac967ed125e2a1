"""Radix-positional codes for tape words and whole machine configurations.

A tape side is stored as a single nonnegative integer: the symbol adjacent
to the head contributes the lowest digit, the outermost symbol the highest.
Symbols are coded starting at 1, never 0, so a code of 0 always means "this
side of the working zone is empty" and edge detection is a zero test.

The canonical 4-symbol alphabet is written ``0 1 Z O`` (Z and O are the
slashed variants of 0 and 1) with codes 1..4; the two machine states carry
codes 0 and 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .turing import TmConfig, TmMachine

SYMBOL_RADIX = 5
STATE_RADIX = 2

SYMBOL_CODES = {"0": 1, "1": 2, "Z": 3, "O": 4}
SYMBOL_GLYPHS = {code: glyph for glyph, code in SYMBOL_CODES.items()}
STATE_CODES = {"u1": 0, "u2": 1}
STATE_NAMES = {code: name for name, code in STATE_CODES.items()}

# Periodic filler words of the weak tape, written left-to-right as they
# appear on the tape.
BLANK_LEFT_WORD = ("0", "0", "Z", "1")
BLANK_RIGHT_WORD = ("0", "O", "Z", "Z", "0", "O")


class MalformedWordError(ValueError):
    """A symbol code of 0 appeared inside a word, or a glyph is unknown."""


def encode_word(codes: Iterable[int], radix: int = SYMBOL_RADIX) -> int:
    """Encode a word of symbol codes, head-adjacent symbol first.

    Returns sum(codes[i] * radix**i); the empty word encodes to 0.
    """
    value = 0
    scale = 1
    for i, code in enumerate(codes):
        if not 1 <= code < radix:
            raise MalformedWordError(f"symbol code {code} at position {i} not in 1..{radix - 1}")
        value += code * scale
        scale *= radix
    return value


def decode_word(value: int, radix: int = SYMBOL_RADIX) -> list[int]:
    """Invert encode_word: split a code into symbol codes, head-adjacent first."""
    if value < 0:
        raise MalformedWordError(f"negative word code {value}")
    codes = []
    while value:
        value, digit = divmod(value, radix)
        if digit == 0:
            raise MalformedWordError("digit 0 inside a nonempty word code")
        codes.append(digit)
    return codes


def blank_codes() -> tuple[int, int]:
    """Codes of the left and right blank words, computed from their symbols.

    The left word is encoded from its right end (the symbol that lands next
    to the head), the right word from its left end.
    """
    left = encode_word([SYMBOL_CODES[g] for g in reversed(BLANK_LEFT_WORD)])
    right = encode_word([SYMBOL_CODES[g] for g in BLANK_RIGHT_WORD])
    return left, right


def trim_blank_copies(code: int, blank_code: int) -> int:
    """Drop whole copies of a blank word from the outer end of a side code.

    Both sides of a lazily extended tape and of an eagerly extended one
    reduce to the same value under this normalisation, which is what makes
    configurations from different simulators comparable.
    """
    if blank_code <= 0:
        raise ValueError("blank code must be positive")
    pattern = decode_word(blank_code)
    word = decode_word(code)
    size = len(pattern)
    while len(word) >= size and word[-size:] == pattern:
        del word[-size:]
    return encode_word(word)


@dataclass(frozen=True)
class TapeCodes:
    """Numeric snapshot of a machine configuration: L, X, R side/cell codes plus the state code U."""

    left: int
    symbol: int
    right: int
    state: int


def encode_config(config: "TmConfig") -> TapeCodes:
    """Encode a machine configuration over the canonical alphabet into tape codes."""
    try:
        left = encode_word([SYMBOL_CODES[g] for g in reversed(config.left)])
        right = encode_word([SYMBOL_CODES[g] for g in config.right])
        symbol = SYMBOL_CODES[config.current]
        state = STATE_CODES[config.state]
    except KeyError as exc:
        raise MalformedWordError(f"unknown glyph or state {exc.args[0]!r}") from None
    return TapeCodes(left=left, symbol=symbol, right=right, state=state)


def decode_config(codes: TapeCodes, machine: "TmMachine") -> "TmConfig":
    """Rebuild a configuration of `machine` from tape codes."""
    from .turing import TmConfig

    left = tuple(SYMBOL_GLYPHS[c] for c in reversed(decode_word(codes.left)))
    right = tuple(SYMBOL_GLYPHS[c] for c in decode_word(codes.right))
    current = SYMBOL_GLYPHS.get(codes.symbol)
    if current is None:
        raise MalformedWordError(f"current-cell code {codes.symbol} has no glyph")
    state = STATE_NAMES.get(codes.state)
    if state is None:
        raise MalformedWordError(f"state code {codes.state} has no name")
    for glyph in left + (current,) + right:
        if glyph not in machine.symbols:
            raise MalformedWordError(f"glyph {glyph!r} not in machine alphabet")
    if state not in machine.states:
        raise MalformedWordError(f"state {state!r} not in machine state set")
    return TmConfig(left=left, current=current, right=right, state=state)

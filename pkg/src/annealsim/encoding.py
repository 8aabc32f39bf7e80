"""Conversions between computational basis-state labels.

A basis state of ``n`` qubits has four interchangeable representations:

* binary vector, e.g. ``[0, 0, 1]``
* spin vector, e.g. ``[1, 1, -1]``
* integer index, e.g. ``4``
* bra-ket string, e.g. ``"|100⟩"`` or ``"|↓↑↑⟩"``

Vectors are little-endian: element 1 of the sequence is qubit 1 and occupies
the least significant position of the integer index.  Bra-ket strings display
the reverse (big-endian) order, so the leftmost glyph is the highest qubit.
All functions are pure and raise ``ValueError`` on malformed input, reporting
positions 1-based.
"""

from collections.abc import Sequence

UP_GLYPH = "↑"
DOWN_GLYPH = "↓"
RKET_GLYPH = "⟩"


def _check_nonempty(values: Sequence, kind: str) -> None:
    if len(values) == 0:
        raise ValueError(f"{kind} vector must contain at least one element")


def _check_bits(bits: Sequence[int]) -> None:
    _check_nonempty(bits, "binary")
    for pos, b in enumerate(bits, start=1):
        if b not in (0, 1):
            raise ValueError(f"binary vector element {pos} is {b!r}, expected 0 or 1")


def _check_spins(spins: Sequence[int]) -> None:
    _check_nonempty(spins, "spin")
    for pos, s in enumerate(spins, start=1):
        if s not in (1, -1):
            raise ValueError(f"spin vector element {pos} is {s!r}, expected +1 or -1")


def binary_to_spin(bits: Sequence[int]) -> list[int]:
    """Map bits to spins element-wise: 0 -> +1, 1 -> -1."""
    _check_bits(bits)
    return [1 - 2 * int(b) for b in bits]


def spin_to_binary(spins: Sequence[int]) -> list[int]:
    """Map spins to bits element-wise: +1 -> 0, -1 -> 1."""
    _check_spins(spins)
    return [(1 - int(s)) // 2 for s in spins]


def binary_to_int(bits: Sequence[int]) -> int:
    """Little-endian positional value of a binary vector."""
    _check_bits(bits)
    return sum(int(b) << k for k, b in enumerate(bits))


def int_to_binary(value: int, n_qubits: int) -> list[int]:
    """Binary vector of fixed length ``n_qubits`` for a state index."""
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    if not 0 <= value < (1 << n_qubits):
        raise ValueError(
            f"state index {value} out of range for {n_qubits} qubits "
            f"(expected 0 <= value < {1 << n_qubits})"
        )
    return [(value >> k) & 1 for k in range(n_qubits)]


def spin_to_int(spins: Sequence[int]) -> int:
    """State index of a spin vector."""
    return binary_to_int(spin_to_binary(spins))


def int_to_spin(value: int, n_qubits: int) -> list[int]:
    """Spin vector of fixed length ``n_qubits`` for a state index."""
    return binary_to_spin(int_to_binary(value, n_qubits))


def spin_to_braket(spins: Sequence[int], ascii_glyphs: bool = False) -> str:
    """Bra-ket string for a spin vector, +1 as an up arrow and -1 as down.

    The glyph order is reversed relative to the input (big-endian display).
    ``ascii_glyphs`` replaces the arrows with "u"/"d" and the closing angle
    bracket with ">" for terminals without Unicode support.
    """
    _check_spins(spins)
    up, down, rket = ("u", "d", ">") if ascii_glyphs else (UP_GLYPH, DOWN_GLYPH, RKET_GLYPH)
    body = "".join(up if s == 1 else down for s in reversed(spins))
    return "|" + body + rket


def binary_to_braket(bits: Sequence[int], ascii_glyphs: bool = False) -> str:
    """Bra-ket string of binary digits, reversed to big-endian display."""
    _check_bits(bits)
    rket = ">" if ascii_glyphs else RKET_GLYPH
    body = "".join(str(int(b)) for b in reversed(bits))
    return "|" + body + rket


def int_to_braket(value: int, n_qubits: int, ascii_glyphs: bool = False) -> str:
    """Spin-arrow bra-ket string for a state index."""
    return spin_to_braket(int_to_spin(value, n_qubits), ascii_glyphs=ascii_glyphs)

"""Zernike mode indices (n, m) and the OSA/ANSI single-index ordering."""

from dataclasses import dataclass
from math import isqrt

from ..errors import InvalidMode

# Highest radial order the evaluation paths are validated for.
MAX_ORDER = 50


@dataclass(frozen=True, slots=True)
class ModeIndex:
    """Radial order n and azimuthal frequency m of Z_n^m."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0:
            raise InvalidMode(f"radial order must be non-negative, got n={self.n}")
        if abs(self.m) > self.n:
            raise InvalidMode(f"|m| must not exceed n, got (n={self.n}, m={self.m})")
        if (self.n - abs(self.m)) % 2:
            raise InvalidMode(f"n - |m| must be even, got (n={self.n}, m={self.m})")

    @property
    def j(self) -> int:
        return to_single_index(self)

    def __str__(self) -> str:
        return f"({self.n},{self.m})"


def validate(n: int, m: int) -> ModeIndex:
    return ModeIndex(int(n), int(m))


def parse_mode(text: str) -> ModeIndex:
    """Parse the CLI form ``"n,m"``."""
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidMode(f"expected 'n,m', got {text!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise InvalidMode(f"expected integers in 'n,m', got {text!r}") from None
    return validate(n, m)


def to_single_index(idx: ModeIndex) -> int:
    return (idx.n * (idx.n + 2) + idx.m) // 2


def from_single_index(j: int) -> ModeIndex:
    if j < 0:
        raise InvalidMode(f"single index must be non-negative, got {j}")
    # order n starts at the triangular number n(n+1)/2
    n = (isqrt(8 * j + 1) - 1) // 2
    return ModeIndex(n, 2 * j - n * (n + 2))


def mode_count(n_max: int) -> int:
    return (n_max + 1) * (n_max + 2) // 2


def enumerate_up_to(n_max: int) -> list[ModeIndex]:
    if n_max < 0:
        raise InvalidMode(f"n_max must be non-negative, got {n_max}")
    return [from_single_index(j) for j in range(mode_count(n_max))]

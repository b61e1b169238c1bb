"""Network depth: a finite integer N >= 2 or the infinite-depth limit."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DlnError


@dataclass(frozen=True)
class Depth:
    """Finite depth N >= 2 when ``n`` is an int, infinite depth when ``n`` is None."""

    n: int | None

    def __post_init__(self):
        if self.n is not None:
            if not isinstance(self.n, int) or self.n < 2:
                raise DlnError(f"finite depth must be an integer >= 2, got {self.n!r}")

    @classmethod
    def finite(cls, n: int) -> "Depth":
        return cls(n)

    @classmethod
    def infinite(cls) -> "Depth":
        return cls(None)

    @classmethod
    def parse(cls, text: str | int) -> "Depth":
        """Accepts an int or the strings 'inf'/'infinity' (case-insensitive)."""
        if isinstance(text, int):
            return cls(text)
        s = str(text).strip().lower()
        if s in ("inf", "infinity", "oo"):
            return cls.infinite()
        return cls(int(s))

    @property
    def is_finite(self) -> bool:
        return self.n is not None

    @property
    def value(self) -> int:
        if self.n is None:
            raise DlnError("finite depth required")
        return self.n

    def __str__(self) -> str:
        return "inf" if self.n is None else str(self.n)

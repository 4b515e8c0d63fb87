"""Needle-in-a-haystack landscape and trial-count fitness (lower is better)."""

from __future__ import annotations

from dataclasses import dataclass, field

#: Trials value for a phenome whose learning never expressed the target.
NOT_FOUND = None


class TrialOverflow(ValueError):
    pass


@dataclass(frozen=True)
class FitnessParams:
    L: int = 20
    T: int = 1000
    target: str = field(default="")

    def __post_init__(self):
        if self.L < 1 or self.T < 1:
            raise ValueError("L and T must be positive")
        if not self.target:
            object.__setattr__(self, "target", "1" * self.L)
        if len(self.target) != self.L or set(self.target) - {"0", "1"}:
            raise ValueError("target must be a 0/1 string of length L")

    @property
    def worst(self) -> float:
        return float(self.L)


@dataclass(frozen=True)
class Phenotype:
    bits: str

    def __post_init__(self):
        if set(self.bits) - {"0", "1"}:
            raise ValueError(f"phenotype must be over {{0,1}}, got {self.bits!r}")

    @property
    def length(self) -> int:
        return len(self.bits)


def is_perfect(p: Phenotype | str, params: FitnessParams) -> bool:
    bits = p.bits if isinstance(p, Phenotype) else p
    return bits == params.target


def fitness_from_trials(t: int | None, params: FitnessParams) -> float:
    """``1 + (L - 1) * t / T``, or the worst value ``L`` when not found."""
    if t is NOT_FOUND:
        return params.worst
    if t < 0:
        raise ValueError("trial count cannot be negative")
    if t > params.T:
        raise TrialOverflow(f"{t} trials exceeds the budget of {params.T}")
    return 1.0 + (params.L - 1) * (t / params.T)

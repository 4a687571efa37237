"""Tolerance and search settings shared by the analysis pipeline."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.  ``None`` means "derive from the data".

    structural     max-entry deviation for Hermitian/unitary predicates
    gap            eigenvalue clustering gap (default 1e-9 * max|x_k|)
    coeff_bound    integer-relation coefficient bound B
    independence   integer-relation tolerance tau
    edge           coupling-graph threshold (default 1e-12 * max ||H_l||)
    rank           span-membership threshold for Lie closures
    max_passes     bracket passes before a closure gives up
    certificate    acceptance threshold for re-evaluated bracket words
    """

    structural: float = DEFAULT_TOL
    gap: float | None = None
    coeff_bound: int = 20
    independence: float = 1e-9
    edge: float | None = None
    rank: float = 1e-9
    max_passes: int = 50
    certificate: float = 1e-9

    def with_overrides(self, overrides: dict[str, str | float | int]) -> "Tolerances":
        known = {f.name: f for f in fields(self)}
        updates = {}
        for key, value in overrides.items():
            if key not in known:
                raise KeyError(f"unknown tolerance {key!r}; expected one of {sorted(known)}")
            if key in ("coeff_bound", "max_passes"):
                updates[key] = int(value)
            elif value is None or (isinstance(value, str) and value.lower() == "none"):
                updates[key] = None
            else:
                updates[key] = float(value)
        return replace(self, **updates)

    def as_dict(self) -> dict:
        return asdict(self)


def max_workers() -> int:
    """Thread cap from ``LARCKIT_THREADS`` (defaults to the CPU count)."""
    raw = os.environ.get("LARCKIT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1

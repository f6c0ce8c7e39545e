"""Numerical tolerances and iteration budgets, kept in one record.

Every optimizer and predicate in the package reads its cutoffs from
:data:`TOL`, so an acceptance run is reproducible from the seed alone.
"""
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields, replace


@dataclass
class Tolerances:
    # geometry predicates
    geom: float = 1e-9            # dedup / collinearity / rank decisions
    direction_norm: float = 1e-12
    # transforms
    similarity: float = 1e-8
    invertible_det: float = 1e-12
    # optimizers
    lowner_gap: float = 1e-7
    lowner_max_iter: int = 100_000
    john_grad: float = 1e-7
    john_max_newton: int = 500
    # symmetry
    vertex_match: float = 1e-8
    fixed_point: float = 1e-7
    max_stabilizer_vertices: int = 16
    # orbit alignment
    rotation_starts: int = 720
    golden_bracket: float = 1e-10
    refine_candidates: int = 6


TOL = Tolerances()


def tolerance_names():
    return [f.name for f in fields(Tolerances)]


def with_overrides(base, overrides):
    """Return a copy of ``base`` with named fields replaced."""
    unknown = set(overrides) - set(tolerance_names())
    if unknown:
        raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
    return replace(base, **overrides)


@contextmanager
def overridden(**values):
    """Temporarily change fields of the shared :data:`TOL` in place."""
    unknown = set(values) - set(tolerance_names())
    if unknown:
        raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
    old = asdict(TOL)
    for k, v in values.items():
        setattr(TOL, k, type(old[k])(v))
    try:
        yield TOL
    finally:
        for k in values:
            setattr(TOL, k, old[k])

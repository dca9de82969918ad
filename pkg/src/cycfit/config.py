"""Run-wide defaults and convention flags."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

# Fields F_{q^k} are rejected above this size so element arithmetic stays in
# machine words whenever the platform allows it.  Overridable per call.
DEFAULT_FIELD_BUDGET = 2**62

# Hard cap on the number of multi-indices in a derivative-operator expansion.
DEFAULT_DERIVATIVE_CAP = 2**22

# Matrices above this size are rejected by the minor enumerator.
MAX_PRESENTATION_SIZE = 12

DEFAULT_STABILIZATION_WINDOW = 50
DEFAULT_SAMPLE_BUDGET = 500
DEFAULT_PRIME_SEARCH_BUDGET = 200_000

CACHE_ENV_VAR = "CYCFIT_CACHE_DIR"


def cache_dir() -> str:
    return os.environ.get(CACHE_ENV_VAR, os.path.join(os.path.expanduser("~"), ".cache", "cycfit"))


@dataclass(frozen=True)
class Conventions:
    """Normalization switches that pin the residue-side conventions.

    flip_sigma: replace every tame generator s_ell by its inverse.  This is the
        *rejected* convention; it exists so the discrimination harness can show
        the verification suite has power against it.
    phi_sign: overall sign of the reciprocity coordinate relative to the
        discrete logarithm (+1 = dlog-aligned, -1 = inverse-unit normalization
        of local class field theory).  Both produce identical ideals,
        annihilation verdicts and invariance results; +1 is frozen as default.
    """

    flip_sigma: bool = False
    phi_sign: int = 1


DEFAULT_CONVENTIONS = Conventions()


@dataclass
class RunConfig:
    """Configuration for the verification pipeline (CLI surface)."""

    p: int = 3
    D: int | None = 257
    external_field: str | None = None
    m: int = 0
    N: int | None = None  # None = auto: least N with p^N > |A| plus one
    i_max: int = 2
    sample_budget: int = DEFAULT_SAMPLE_BUDGET
    window: int = DEFAULT_STABILIZATION_WINDOW
    seed: int = 0
    cache: str = field(default_factory=cache_dir)
    conventions: Conventions = DEFAULT_CONVENTIONS
    field_budget: int = DEFAULT_FIELD_BUDGET
    derivative_cap: int = DEFAULT_DERIVATIVE_CAP

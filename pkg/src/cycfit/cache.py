"""Validated on-disk cache for auxiliary-prime lists.

Entries are keyed by (p, D, N, convention flags, extra modulus) through a
content hash; every load re-validates the cached primes against the defining
congruence + splitting conditions, so a stale or corrupted cache can only
cause recomputation, never wrong data.
"""

from __future__ import annotations

import hashlib
import json
import os

from .arith import is_prime
from .config import cache_dir
from .fields import AbelianFieldCtx


def _key_path(parts: tuple) -> str:
    digest = hashlib.sha256(repr(parts).encode()).hexdigest()[:24]
    return os.path.join(cache_dir(), f"{parts[0]}-{digest}.json")


def _validate_primes(ctx: AbelianFieldCtx, level: int, extra: int, ells) -> bool:
    step = ctx.p**level * extra
    return all(
        isinstance(ell, int)
        and ell % step == 1
        and is_prime(ell)
        and ctx.splits_in_K(ell)
        for ell in ells
    )


def cached_kolyvagin_primes(ctx: AbelianFieldCtx, count: int, extra: int = 1,
                            level: int | None = None, budget: int = 200_000) -> list[int]:
    """First `count` auxiliary primes for (ctx, extra, level), cached."""
    from .fields import kolyvagin_primes

    level = ctx.N if level is None else level
    parts = ("kprimes", ctx.p, ctx.D, level, extra, ctx.conventions.flip_sigma)
    path = _key_path(parts)
    if os.path.exists(path):
        try:
            with open(path) as fh:
                doc = json.load(fh)
            ells = doc.get("ells", [])
            if doc.get("key") == list(parts[:-1]) + [bool(parts[-1])] and len(ells) >= count \
                    and _validate_primes(ctx, level, extra, ells[:count]):
                return ells[:count]
        except (OSError, json.JSONDecodeError, ValueError):
            pass
    gen = kolyvagin_primes(ctx, extra_modulus=extra, budget=budget, level=level)
    ells = [next(gen).ell for _ in range(count)]
    os.makedirs(cache_dir(), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"key": list(parts[:-1]) + [bool(parts[-1])], "ells": ells}, fh)
    os.replace(tmp, path)
    return ells

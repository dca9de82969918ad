import json

from cycfit.cache import cached_kolyvagin_primes
from cycfit.config import CACHE_ENV_VAR
from cycfit.fields import build_field


def test_cache_roundtrip_and_revalidation(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV_VAR, str(tmp_path))
    ctx = build_field(3, 257, 0, 1)
    ells = cached_kolyvagin_primes(ctx, 4)
    assert ells == [13, 31, 61, 67]
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1
    # cache hit returns the same list
    assert cached_kolyvagin_primes(ctx, 4) == ells
    assert cached_kolyvagin_primes(ctx, 3) == ells[:3]

    # poisoned cache fails revalidation (15 is not prime) and is recomputed
    doc = json.loads(files[0].read_text())
    doc["ells"][0] = 15
    files[0].write_text(json.dumps(doc))
    assert cached_kolyvagin_primes(ctx, 4) == ells

    # corrupted file is ignored, not fatal
    files[0].write_text("{broken")
    assert cached_kolyvagin_primes(ctx, 4) == ells


def test_cache_keys_isolate_levels(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV_VAR, str(tmp_path))
    ctx1 = build_field(3, 257, 0, 1)
    ctx3 = build_field(3, 257, 0, 3)
    a = cached_kolyvagin_primes(ctx1, 2)
    b = cached_kolyvagin_primes(ctx3, 2)
    assert a == [13, 31]
    assert b == [379, 433]
    assert len(list(tmp_path.glob("*.json"))) == 2

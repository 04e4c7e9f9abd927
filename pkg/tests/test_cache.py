import pytest

from recapture.cache import FORMAT, cache_path, cached_snapshot, dumps, loads, write_atomic
from recapture.errors import CacheCorruption
from recapture.syntax import Bounds, Signature
from recapture.systems import J, K, LP_SYSTEM, fragment, snapshot

B = Bounds(1, 1, 1)


def test_round_trip():
    snap = snapshot(fragment(K, Signature.of("not", "and")), B)
    text = dumps(snap)
    assert text.startswith(FORMAT + "\nchecksum: sha256:")
    back = loads(text)
    assert back == snap
    assert dumps(back) == text


def test_warm_cache_is_read_only(tmp_path):
    snap, path, written = cached_snapshot(LP_SYSTEM, B, tmp_path)
    assert written and path.parent == tmp_path
    before = (path.read_bytes(), path.stat().st_mtime_ns)
    again, path2, written2 = cached_snapshot(LP_SYSTEM, B, tmp_path)
    assert not written2 and path2 == path and again == snap
    assert (path.read_bytes(), path.stat().st_mtime_ns) == before
    assert list(tmp_path.iterdir()) == [path]  # no temporary files left behind


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("RECAPTURE_CACHE_DIR", str(tmp_path / "env"))
    _, path, _ = cached_snapshot(J, B)
    assert path.parent == tmp_path / "env"


@pytest.mark.parametrize("damage", [
    lambda t: t.replace("valid: ", "valid: 1", 1),
    lambda t: t[: len(t) // 2],
    lambda t: t.replace("bitmap: ", "bitmap: ff", 1),
    lambda t: "recapture-snapshot/0" + t[len(FORMAT):],
    lambda t: "\n".join(t.split("\n")[:1] + t.split("\n")[2:]),
])
def test_corruption_is_detected(tmp_path, damage):
    _, path, _ = cached_snapshot(K, B, tmp_path)
    path.write_text(damage(path.read_text()))
    with pytest.raises(CacheCorruption):
        cached_snapshot(K, B, tmp_path)


def test_mismatched_file_is_rejected(tmp_path):
    lp = snapshot(LP_SYSTEM, B)
    write_atomic(cache_path(K, B, tmp_path), dumps(lp))
    with pytest.raises(CacheCorruption):
        cached_snapshot(K, B, tmp_path)

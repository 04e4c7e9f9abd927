"""Snapshot cache files.

A cache file is plain text: a versioned header, one rendered formula per
line, then the validity bitmap in hex. The header carries a SHA-256 over
every other line, so truncation or tampering is detected on read. Files are
written to a temporary name and renamed into place, so readers never see a
partial file.
"""

from __future__ import annotations

import hashlib
import os
import re
import tempfile
from pathlib import Path

from .errors import CacheCorruption
from .syntax import Bounds, Signature, parse_formula
from .systems import ConsequenceSystem, Snapshot, snapshot
from .engines.intuitionistic import Budget

FORMAT = "recapture-snapshot/1"
CACHE_ENV = "RECAPTURE_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "recapture"


def _body(snap: Snapshot) -> list[str]:
    head = [
        f"system: {snap.system}",
        f"signature: {snap.signature}",
        f"bounds: {snap.bounds}",
        f"wffs: {len(snap.wffs)}",
        f"sequents: {snap.sequent_count}",
        f"valid: {snap.valid_count}",
    ]
    return head + [f"wff: {f}" for f in snap.wffs] + [f"bitmap: {snap.bits.hex()}"]


def _digest(lines: list[str]) -> str:
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def dumps(snap: Snapshot) -> str:
    body = _body(snap)
    return "\n".join([FORMAT, f"checksum: sha256:{_digest(body)}", *body]) + "\n"


_BOUNDS = re.compile(r"atoms<=(\d+), depth<=(\d+), ante<=(\d+)\Z")


def loads(text: str) -> Snapshot:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 9 or lines[0] != FORMAT:
        raise CacheCorruption(f"not a {FORMAT} file")
    if not lines[1].startswith("checksum: sha256:"):
        raise CacheCorruption("missing checksum line")
    body = lines[2:]
    if lines[1].split("sha256:", 1)[1] != _digest(body):
        raise CacheCorruption("checksum mismatch")
    fields = dict(line.split(": ", 1) for line in body[:6])
    m = _BOUNDS.match(fields.get("bounds", ""))
    if m is None:
        raise CacheCorruption("unreadable bounds line")
    sig = Signature.parse(fields["signature"])
    n = int(fields["wffs"])
    wff_lines = body[6:6 + n]
    if len(wff_lines) != n or not all(w.startswith("wff: ") for w in wff_lines):
        raise CacheCorruption("formula list does not match its count")
    bitmap = body[6 + n:]
    if len(bitmap) != 1 or not bitmap[0].startswith("bitmap: "):
        raise CacheCorruption("missing bitmap line")
    snap = Snapshot(
        fields["system"], sig, Bounds(*(int(x) for x in m.groups())),
        tuple(parse_formula(w[5:], sig) for w in wff_lines), bytes.fromhex(bitmap[0][8:]),
    )
    if snap.sequent_count != int(fields["sequents"]) or snap.valid_count != int(fields["valid"]):
        raise CacheCorruption("header counts disagree with the bitmap")
    return snap


def cache_path(sys: ConsequenceSystem, bounds: Bounds, cache_dir: Path) -> Path:
    slug = re.sub(r"[^A-Za-z0-9_.+-]+", "_", sys.name)
    sig = hashlib.sha256(str(sys.signature).encode()).hexdigest()[:8]
    return cache_dir / f"{slug}-{sig}-a{bounds.atoms}d{bounds.depth}n{bounds.ante}.snap"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def cached_snapshot(sys: ConsequenceSystem, bounds: Bounds, cache_dir: Path | None = None,
                    budget: Budget = Budget()) -> tuple[Snapshot, Path, bool]:
    """Load the snapshot from the cache, or build and store it.

    Returns ``(snapshot, path, written)``. A warm cache is only read.
    """
    path = cache_path(sys, bounds, cache_dir or default_cache_dir())
    if path.exists():
        snap = loads(path.read_text(encoding="utf-8"))
        if snap.system != sys.name or snap.bounds != bounds or snap.signature != sys.signature:
            raise CacheCorruption(f"{path} holds a different snapshot")
        return snap, path, False
    snap = snapshot(sys, bounds, budget)
    write_atomic(path, dumps(snap))
    return snap, path, True

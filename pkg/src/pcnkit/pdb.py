"""Fetching PDB entries and reading their C-alpha traces."""

from __future__ import annotations

import logging
import math
import os
import re
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CacheUnwritable,
    FetchFailed,
    InvalidId,
    MalformedRecord,
    NoCalphaAtoms,
    SizeMismatch,
)

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://files.rcsb.org/download"
DEFAULT_CACHE = Path.home() / ".cache" / "pcnkit"
DEFAULT_DENSITY_LIMIT = 0.1

_ID_RE = re.compile(r"^[0-9A-Za-z]{4}$")


@dataclass(frozen=True)
class ResidueRecord:
    node_index: int
    chain_id: str
    res_seq: int
    insertion_code: str
    position: tuple[float, float, float]
    res_name: str = "UNK"


@dataclass(frozen=True)
class CalphaTrace:
    source_id: str
    residues: tuple[ResidueRecord, ...]
    model_number: int = 1

    def __len__(self):
        return len(self.residues)

    def positions(self) -> np.ndarray:
        """(N, 3) float array of coordinates in node order."""
        return np.array([r.position for r in self.residues], dtype=float).reshape(-1, 3)


@dataclass(frozen=True)
class ValidationVerdict:
    disconnected: bool
    excessive_density: bool
    components: int
    density: float
    density_limit: float = DEFAULT_DENSITY_LIMIT
    # Residue count from an external secondary-structure run, if the caller has one.
    external_residue_count: int | None = None
    reasons: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not (self.disconnected or self.excessive_density)


def default_cache_dir() -> Path:
    return Path(os.environ.get("PCNKIT_CACHE", DEFAULT_CACHE))


def check_id(pdb_id: str) -> str:
    if not isinstance(pdb_id, str) or not _ID_RE.match(pdb_id):
        raise InvalidId(f"not a 4-character PDB identifier: {pdb_id!r}")
    return pdb_id.lower()


def fetch_pdb(pdb_id: str, cache_dir=None, base_url: str | None = None, timeout: float = 30.0) -> Path:
    """Return the path of a local copy of ``<id>.pdb``, downloading it if needed.

    A cached file that exists and is non-empty is returned without touching the
    network. Downloads land in a temporary file that is renamed into place, so
    concurrent fetchers never observe a partial file.
    """
    pid = check_id(pdb_id)
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    target = cache / f"{pid}.pdb"
    if target.is_file() and target.stat().st_size > 0:
        return target

    try:
        cache.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CacheUnwritable(f"cannot create cache directory {cache}: {exc}") from exc
    if not os.access(cache, os.W_OK):
        raise CacheUnwritable(f"cache directory {cache} is not writable")

    base = base_url or os.environ.get("PCNKIT_PDB_BASE", DEFAULT_BASE_URL)
    url = f"{base.rstrip('/')}/{pid.upper()}.pdb"
    log.info("downloading %s", url)
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            payload = resp.read()
    except urllib.error.HTTPError as exc:
        raise FetchFailed(pid, exc.code, str(exc.reason)) from exc
    except (urllib.error.URLError, TimeoutError, OSError) as exc:
        reason = getattr(exc, "reason", exc)
        raise FetchFailed(pid, None, str(reason)) from exc
    if not payload:
        raise FetchFailed(pid, None, "empty response")

    try:
        fd, tmp = tempfile.mkstemp(dir=cache, prefix=f".{pid}.", suffix=".part")
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, target)
    except OSError as exc:
        raise CacheUnwritable(f"cannot write {target}: {exc}") from exc
    return target


def _altloc_rank(altloc: str) -> tuple[int, str]:
    # blank sorts before any letter
    return (0, "") if altloc == " " else (1, altloc)


def parse_calpha_trace(pdb_text, source_id: str = "") -> CalphaTrace:
    """Read the C-alpha atoms of the first MODEL from PDB-format text.

    Uses fixed columns (atom name 13-16, altLoc 17, chain 22, resSeq 23-26,
    iCode 27, x/y/z 31-54). HETATM records are ignored. When a residue carries
    several alternate CA locations the blank or alphabetically first one wins,
    and the residue keeps the node slot of its first appearance.
    """
    if isinstance(pdb_text, (bytes, bytearray)):
        pdb_text = pdb_text.decode("latin-1")
    if not source_id:
        source_id = _header_id(pdb_text)

    slots: dict[tuple[str, int, str], int] = {}
    picked: list[tuple[tuple[int, str], tuple]] = []
    model = None
    for line_no, raw in enumerate(pdb_text.splitlines(), start=1):
        rec = raw[:6]
        if rec == "MODEL ":
            if model is not None:
                break
            try:
                model = int(raw[10:14])
            except ValueError:
                model = 1
            continue
        if rec == "ENDMDL":
            break
        if rec != "ATOM  ":
            continue
        line = raw.rstrip("\r\n")
        if len(line) < 54:
            raise MalformedRecord(line_no, f"ATOM record has {len(line)} columns, need 54")
        if line[12:16].strip() != "CA" or line[76:78].strip() not in ("", "C"):
            continue
        altloc = line[16]
        chain = line[21]
        icode = line[26]
        try:
            res_seq = int(line[22:26])
            xyz = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
        except ValueError as exc:
            raise MalformedRecord(line_no, f"bad numeric field ({exc})") from exc
        if not all(math.isfinite(c) for c in xyz):
            raise MalformedRecord(line_no, "non-finite coordinate")
        key = (chain, res_seq, icode)
        entry = (_altloc_rank(altloc), (chain, res_seq, icode, xyz, line[17:20].strip() or "UNK"))
        slot = slots.get(key)
        if slot is None:
            slots[key] = len(picked)
            picked.append(entry)
        elif entry[0] < picked[slot][0]:
            picked[slot] = entry

    if not picked:
        raise NoCalphaAtoms(f"no CA ATOM records in {source_id or 'input'}")
    residues = tuple(
        ResidueRecord(i, chain, seq, icode, xyz, name)
        for i, (_, (chain, seq, icode, xyz, name)) in enumerate(picked)
    )
    return CalphaTrace(source_id=source_id, residues=residues, model_number=model or 1)


def _header_id(text: str) -> str:
    for line in text.splitlines()[:5]:
        if line.startswith("HEADER") and len(line) >= 66:
            code = line[62:66].strip()
            if _ID_RE.match(code):
                return code.lower()
    return ""


def read_trace(path) -> CalphaTrace:
    path = Path(path)
    stem = path.stem.lower()
    return parse_calpha_trace(path.read_bytes(), source_id=stem if _ID_RE.match(stem) else "")


def format_trace(trace: CalphaTrace) -> str:
    """Render a trace as minimal PDB text (one CA ATOM line per residue)."""
    lines = []
    for serial, r in enumerate(trace.residues, start=1):
        x, y, z = r.position
        lines.append(
            f"ATOM  {serial:5d}  CA  {r.res_name:>3s} {r.chain_id:1s}{r.res_seq:4d}{r.insertion_code:1s}"
            f"   {x:8.3f}{y:8.3f}{z:8.3f}  1.00  0.00           C  "
        )
    lines.append("END")
    return "\n".join(lines) + "\n"


def validate_trace(trace: CalphaTrace, network, density_limit: float = DEFAULT_DENSITY_LIMIT,
                   external_residue_count: int | None = None) -> ValidationVerdict:
    """Apply the dataset exclusion rules to a built network."""
    from .network import connected_components, link_density

    if len(trace) != network.n:
        raise SizeMismatch(f"trace has {len(trace)} residues, network has {network.n} nodes")
    comps = connected_components(network)
    density = link_density(network) if network.n >= 2 else 0.0
    reasons = []
    if comps > 1:
        reasons.append(f"disconnected ({comps} components)")
    if density > density_limit:
        reasons.append(f"link density {density:.4f} > {density_limit}")
    return ValidationVerdict(
        disconnected=comps > 1,
        excessive_density=density > density_limit,
        components=comps,
        density=density,
        density_limit=density_limit,
        external_residue_count=external_residue_count,
        reasons=tuple(reasons),
    )

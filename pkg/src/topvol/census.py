"""Census of non-hyperbolic closed manifolds of small topological volume.

Four tab-separated tables ship with the package:

table1.tsv  manifold, volume, realisation1, realisation2
table2.tsv  child, m129_slope, m125_slope_a, m125_slope_b
table3.tsv  knot, ambient, realisation
table4.tsv  ambient, ambient_homology, minimiser, minimiser_homology, knot, knot_homology

Each file is UTF-8 with a header line.  Slopes are written "m003(-1,1)" and an
absent entry as "none" or an empty cell.  SHA256SUMS next to the tables holds
their digests, checked at load.  Volumes stay the decimal strings they were
printed as; comparisons round the longer one to the shorter one's digits.

The directory is the bundled ``data/census`` unless ``TOPVOL_CENSUS_DIR`` is set.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import os
import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from importlib import resources
from pathlib import Path

from .errors import (
    CensusFormatError,
    ChecksumError,
    MalformedNameError,
    NotFoundError,
    NotInVError,
)
from .lens import Slope

ENV_VAR = "TOPVOL_CENSUS_DIR"
CHECKSUM_FILE = "SHA256SUMS"

TABLES = {
    "table1.tsv": ("manifold", "volume", "realisation1", "realisation2"),
    "table2.tsv": ("child", "m129_slope", "m125_slope_a", "m125_slope_b"),
    "table3.tsv": ("knot", "ambient", "realisation"),
    "table4.tsv": (
        "ambient",
        "ambient_homology",
        "minimiser",
        "minimiser_homology",
        "knot",
        "knot_homology",
    ),
}

# the one-cusped manifolds that can be minimisers below 3.07, in volume order
V = (
    "m003", "m004", "m006", "m007", "m009", "m010", "m011",
    "m015", "m016", "m017", "m019", "m022", "m023", "m026",
)  # fmt: skip

# parents known to share a hyperbolic volume; the classes are strictly increasing
VOLUME_CLASSES = (
    ("m003", "m004"),
    ("m006", "m007"),
    ("m009", "m010"),
    ("m011",),
    ("m015", "m016", "m017"),
    ("m019",),
    ("m022", "m023"),
    ("m026",),
)

_REALISATION = re.compile(r"(m\d{3})\((-?\d+),(-?\d+)\)")
_NAME_HEADS = ("S^3", "S3", "L(", "SFS [", "T x I", "T \\times I")


class Family(str, enum.Enum):
    S3 = "S3"
    LENS = "LENS"
    SFS = "SFS"
    TORUS_BUNDLE = "TORUS_BUNDLE"
    GRAPH = "GRAPH"
    CONNECTED_SUM = "CONNECTED_SUM"


def name_key(name):
    """Lookup key: spacing, TeX escapes and a dangling ']' do not matter."""
    key = name.replace("$", "").replace("\\times", "x").replace("\\#", "#")
    key = key.replace("S^3", "S3").replace("^", "")
    key = re.sub(r"\s+", "", key)
    if key.endswith("]") and key.count("]") > key.count("["):
        key = key[:-1]
    return key


def check_name(name):
    if not isinstance(name, str) or not name.strip():
        raise MalformedNameError("manifold name must be a non-empty string")
    key = name_key(name)
    if re.fullmatch(r"m\d{3}", key):
        return key
    if not any(name_key(h) and key.startswith(name_key(h)) for h in _NAME_HEADS):
        raise MalformedNameError(f"unrecognised manifold name {name!r}")
    if key.count("(") != key.count(")") or key.count("[") != key.count("]"):
        raise MalformedNameError(f"unbalanced brackets in {name!r}")
    m = re.fullmatch(r"L\((-?\d+),(-?\d+)\)", key)
    if key.startswith("L(") and "#" not in key and not m:
        raise MalformedNameError(f"lens space name {name!r} is not L(p,q)")
    return key


def classify(name):
    key = name_key(name)
    if key == "S3":
        return Family.S3
    if "#" in key:
        return Family.CONNECTED_SUM
    if key.startswith("L("):
        return Family.LENS
    if key.startswith("TxI"):
        return Family.TORUS_BUNDLE
    if key.startswith("SFS["):
        if "\\cup" in key or "/" in key:
            return Family.GRAPH
        return Family.SFS
    raise MalformedNameError(f"cannot classify {name!r}")


@dataclass(frozen=True)
class Realisation:
    parent: str
    slope: Slope

    def __str__(self):
        return f"{self.parent}({self.slope.p},{self.slope.q})"


@dataclass(frozen=True)
class Homology:
    """Finitely generated abelian group Z^rank + Z_t1 + ... + Z_tk."""

    rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0 or any(t <= 1 for t in self.torsion):
            raise ValueError(f"bad homology descriptor {self.rank}, {self.torsion}")

    @classmethod
    def parse(cls, text):
        rank, torsion = 0, []
        for part in text.split("+"):
            part = part.strip()
            if part == "Z":
                rank += 1
            elif m := re.fullmatch(r"Z_\{?(\d+)\}?", part):
                torsion.append(int(m.group(1)))
            elif part != "0":
                raise ValueError(f"cannot parse homology group {text!r}")
        return cls(rank, tuple(torsion))

    def __str__(self):
        parts = [f"Z_{t}" for t in self.torsion] + ["Z"] * self.rank
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class CensusEntry:
    manifold: str
    volume: str
    realisations: tuple
    family: Family

    @property
    def volume_decimal(self):
        return Decimal(self.volume)


@dataclass(frozen=True)
class ParenthoodRow:
    child: str
    via_m129: Slope | None
    via_m125: tuple | None  # two slopes, related by the symmetry of m125


@dataclass(frozen=True)
class KnotRecord:
    knot: str
    ambient: str
    realisation: Realisation
    homology: Homology | None = None
    ambient_homology: Homology | None = None
    minimiser: str | None = None
    minimiser_homology: Homology | None = None


@dataclass(frozen=True)
class CensusDB:
    entries: tuple
    parenthood_rows: tuple
    knots: tuple
    homology_rows: tuple
    source: str = ""
    _by_key: dict = field(default_factory=dict, repr=False, compare=False)

    def entry(self, name):
        return self._by_key.get(name_key(name))

    def volumes(self):
        """Distinct volume strings in table order."""
        return list(dict.fromkeys(e.volume for e in self.entries))


# -- loading -----------------------------------------------------------------


def data_dir():
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return resources.files("topvol").joinpath("data").joinpath("census")


def digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_checksums(directory):
    """Regenerate SHA256SUMS for the tables in ``directory``."""
    directory = Path(directory)
    lines = [f"{digest(directory / name)}  {name}\n" for name in TABLES]
    (directory / CHECKSUM_FILE).write_text("".join(lines), encoding="utf-8")


def _verify_checksums(directory):
    sums = directory / CHECKSUM_FILE
    if not sums.is_file():
        raise ChecksumError(f"{sums} is missing")
    expected = {}
    for line in sums.read_text(encoding="utf-8").splitlines():
        if line.strip():
            hexdigest, name = line.split(None, 1)
            expected[name.strip().lstrip("*")] = hexdigest
    for name in TABLES:
        if name not in expected:
            raise ChecksumError(f"{CHECKSUM_FILE} has no digest for {name}")
        actual = digest(directory / name)
        if actual != expected[name]:
            raise ChecksumError(
                f"{name} does not match its recorded digest "
                f"(expected {expected[name]}, got {actual})"
            )


def _read_table(path, columns):
    if not path.is_file():
        raise CensusFormatError("file not found", path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE))
    if not rows:
        raise CensusFormatError("empty file, expected a header line", path, 1)
    header = tuple(c.strip() for c in rows[0])
    if header != columns:
        raise CensusFormatError(
            f"header {header} does not match {columns}", path, 1
        )
    out = []
    for number, row in enumerate(rows[1:], start=2):
        if not any(c.strip() for c in row):
            continue
        if len(row) != len(columns):
            raise CensusFormatError(
                f"expected {len(columns)} columns, found {len(row)}", path, number
            )
        out.append((number, [c.strip() for c in row]))
    if not out:
        raise CensusFormatError("table has no data rows", path, 2)
    return out


def _absent(cell):
    return cell in ("", "none")


def _realisation(cell, path, row):
    m = _REALISATION.fullmatch(cell.replace(" ", ""))
    if not m:
        raise CensusFormatError(f"bad realisation {cell!r}", path, row)
    try:
        slope = Slope(int(m.group(2)), int(m.group(3)))
    except ValueError as exc:
        raise CensusFormatError(str(exc), path, row) from exc
    return Realisation(m.group(1), slope)


def _volume(cell, path, row):
    try:
        v = Decimal(cell)
    except InvalidOperation:
        v = None
    if v is None or not v.is_finite() or v <= 0:
        raise CensusFormatError(f"volume {cell!r} is not a positive decimal", path, row)
    return cell


def _homology(cell, path, row):
    try:
        return Homology.parse(cell)
    except ValueError as exc:
        raise CensusFormatError(str(exc), path, row) from exc


def load_census(path=None, verify=True):
    """Read the four tables from ``path`` (default: :func:`data_dir`)."""
    directory = Path(path) if path is not None else Path(str(data_dir()))
    if not directory.is_dir():
        raise CensusFormatError("census directory not found", directory)
    if verify:
        _verify_checksums(directory)

    p1 = directory / "table1.tsv"
    entries, by_key = [], {}
    for row, (name, vol, r1, r2) in _read_table(p1, TABLES["table1.tsv"]):
        if not name:
            raise CensusFormatError("empty manifold name", p1, row)
        reals = tuple(_realisation(c, p1, row) for c in (r1, r2) if not _absent(c))
        if not reals:
            raise CensusFormatError(f"{name} has no realisation", p1, row)
        try:
            family = classify(name)
        except MalformedNameError as exc:
            raise CensusFormatError(str(exc), p1, row) from exc
        entry = CensusEntry(name, _volume(vol, p1, row), reals, family)
        key = name_key(name)
        if key in by_key:
            raise CensusFormatError(f"duplicate manifold {name!r}", p1, row)
        by_key[key] = entry
        entries.append(entry)

    p2 = directory / "table2.tsv"
    parenthood_rows = []
    for row, (child, s129, sa, sb) in _read_table(p2, TABLES["table2.tsv"]):
        via129 = None if _absent(s129) else _realisation(s129, p2, row)
        if via129 is not None and via129.parent != "m129":
            raise CensusFormatError(f"{s129!r} is not a filling of m129", p2, row)
        if _absent(sa) != _absent(sb):
            raise CensusFormatError("m125 fillings come in pairs", p2, row)
        via125 = None
        if not _absent(sa):
            via125 = tuple(_realisation(c, p2, row) for c in (sa, sb))
            if any(r.parent != "m125" for r in via125):
                raise CensusFormatError("expected fillings of m125", p2, row)
        if via129 is None and via125 is None:
            raise CensusFormatError(f"{child} has no parent", p2, row)
        parenthood_rows.append(
            ParenthoodRow(
                child,
                via129.slope if via129 else None,
                tuple(r.slope for r in via125) if via125 else None,
            )
        )

    p3 = directory / "table3.tsv"
    knots = []
    for row, (knot, ambient, real) in _read_table(p3, TABLES["table3.tsv"]):
        knots.append(KnotRecord(knot, ambient, _realisation(real, p3, row)))

    p4 = directory / "table4.tsv"
    homology_rows = []
    for row, cells in _read_table(p4, TABLES["table4.tsv"]):
        amb, amb_h, mini, mini_h, knot, knot_h = cells
        homology_rows.append(
            (
                amb,
                _homology(amb_h, p4, row),
                mini,
                _homology(mini_h, p4, row),
                knot,
                _homology(knot_h, p4, row),
            )
        )

    return CensusDB(
        tuple(entries),
        tuple(parenthood_rows),
        tuple(knots),
        tuple(homology_rows),
        str(directory),
        by_key,
    )


_default_db = None


def default_census():
    """The census from :func:`data_dir`, loaded once."""
    global _default_db
    if _default_db is None or _default_db.source != str(data_dir()):
        _default_db = load_census()
    return _default_db


# -- queries -----------------------------------------------------------------


def volt_lookup(name, db=None):
    """(volume string, realisations) of a Table 1 manifold."""
    db = db or default_census()
    check_name(name)
    entry = db.entry(name)
    if entry is None:
        raise NotFoundError(
            f"{name} is not in the census: it is hyperbolic or its topological "
            f"volume exceeds the census bound"
        )
    return entry.volume, entry.realisations


def manifolds_at_volume(v, db=None):
    db = db or default_census()
    v = str(v).strip()
    return [e for e in db.entries if e.volume == v]


def parenthood(child, db=None):
    db = db or default_census()
    key = name_key(child)
    if key not in V:
        raise NotInVError(f"{child} is not one of the candidate parents {', '.join(V)}")
    for row in db.parenthood_rows:
        if row.child == key:
            return row
    raise NotFoundError(f"no parenthood row for {child}")


def second_minimisers(ambient, db=None):
    """Non-minimising knots in ``ambient``, joined with their homology data."""
    db = db or default_census()
    key = name_key(ambient)
    homology = {}
    for amb, amb_h, mini, mini_h, knot, knot_h in db.homology_rows:
        homology[(name_key(amb), knot)] = (amb_h, mini, mini_h, knot_h)
    out = []
    for rec in db.knots:
        if name_key(rec.ambient) != key:
            continue
        joined = homology.get((key, rec.knot))
        if joined:
            amb_h, mini, mini_h, knot_h = joined
            rec = KnotRecord(rec.knot, rec.ambient, rec.realisation, knot_h, amb_h, mini, mini_h)
        out.append(rec)
    return out


# -- audit -------------------------------------------------------------------


def compare_volumes(a, b):
    """Compare decimal strings after rounding the longer to the shorter's digits."""
    da, db_ = Decimal(a), Decimal(b)
    quantum = max(da.as_tuple().exponent, db_.as_tuple().exponent)
    q = Decimal(1).scaleb(quantum)
    da = da.quantize(q, rounding=ROUND_HALF_EVEN)
    db_ = db_.quantize(q, rounding=ROUND_HALF_EVEN)
    return (da > db_) - (da < db_)


@dataclass(frozen=True)
class AuditFailure:
    check: str
    message: str


@dataclass(frozen=True)
class AuditReport:
    failures: tuple

    @property
    def clean(self):
        return not self.failures

    def checks_failed(self):
        return sorted({f.check for f in self.failures})


def parent_volumes(db):
    """Volume string of each parent, read off the Table 1 rows it fills."""
    seen = {}
    for e in db.entries:
        for r in e.realisations:
            seen.setdefault(r.parent, set()).add(e.volume)
    return seen


def consistency_audit(db=None):
    db = db or default_census()
    failures = []

    # (a) parents of Table 1 rows lie in V
    for e in db.entries:
        for r in e.realisations:
            if r.parent not in V:
                failures.append(AuditFailure("a", f"{e.manifold}: parent {r} not in V"))

    # (b) one volume per parent, equal within a class, increasing across classes
    seen = parent_volumes(db)
    for parent, vols in sorted(seen.items()):
        if len(vols) > 1:
            failures.append(
                AuditFailure("b", f"{parent} appears at volumes {sorted(vols)}")
            )
    class_volume = []
    for cls in VOLUME_CLASSES:
        vols = set().union(*(seen.get(p, set()) for p in cls))
        if len(vols) != 1:
            failures.append(
                AuditFailure("b", f"class {'/'.join(cls)} has volumes {sorted(vols)}")
            )
        class_volume.append(min(vols, key=Decimal) if vols else None)
    for (c1, v1), (c2, v2) in zip(
        zip(VOLUME_CLASSES, class_volume), zip(VOLUME_CLASSES[1:], class_volume[1:])
    ):
        if v1 and v2 and compare_volumes(v1, v2) >= 0:
            failures.append(
                AuditFailure("b", f"class {'/'.join(c1)} is not below {'/'.join(c2)}")
            )
    blocks = db.volumes()
    for v1, v2 in zip(blocks, blocks[1:]):
        if compare_volumes(v1, v2) > 0:
            failures.append(AuditFailure("b", f"volume {v1} listed before {v2}"))

    # (c) a non-minimising knot is never cheaper than the Table 1 minimiser
    for rec in db.knots:
        entry = db.entry(rec.ambient)
        if entry is None:
            continue
        vols = seen.get(rec.realisation.parent)
        if not vols:
            failures.append(
                AuditFailure("c", f"{rec.knot}: parent {rec.realisation.parent} has no volume")
            )
            continue
        for v in vols:
            if compare_volumes(v, entry.volume) < 0:
                failures.append(
                    AuditFailure(
                        "c",
                        f"{rec.knot} in {rec.ambient}: volume {v} below "
                        f"census volume {entry.volume}",
                    )
                )
    return AuditReport(tuple(failures))

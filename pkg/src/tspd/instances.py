"""Instance generation, the native text format, and the Murray-style reader.

The native format is a versioned plain-text layout: a header of scalar
parameters, one node row per node (id, x, y, drone-eligible flag), then
optional explicit matrix blocks.  When matrix blocks are absent, distances
are Euclidean over the node coordinates and times are distance / speed.
Floats are serialized with repr() so write -> parse reproduces an Instance
bit for bit.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from .model import Instance

__all__ = [
    "InstanceFormatError",
    "generate_instance",
    "parse_instance",
    "write_instance",
    "instances_equal",
    "euclidean_matrices",
]

FORMAT_TAG = "tspd-instance"
FORMAT_VERSION = 1

_HEADER_FIELDS = (
    "endurance",
    "launch_time",
    "retrieve_time",
    "truck_cost_rate",
    "drone_cost_rate",
    "truck_wait_fee",
    "drone_wait_fee",
    "truck_speed",
    "drone_speed",
)
_MATRIX_FIELDS = ("truck_dist", "truck_time", "drone_dist", "drone_time")

# Murray-style instances flag a parcel too heavy for the drone; anything at
# or under this weight is drone-eligible.
MURRAY_WEIGHT_LIMIT = 5.0


class InstanceFormatError(ValueError):
    """Malformed instance file; message names the offending line."""


def euclidean_matrices(coords: np.ndarray, speed: float) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise Euclidean distances of coords plus times at a constant speed."""
    delta = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt((delta**2).sum(axis=2))
    np.fill_diagonal(dist, 0.0)
    return dist, dist / speed


def generate_instance(
    n: int,
    seed: int,
    *,
    area: float = 10.0,
    drone_eligible_frac: float = 0.8,
    endurance: float = 20.0,
    launch_time: float = 1.0,
    retrieve_time: float = 1.0,
    truck_cost_rate: float = 1.0,
    drone_cost_rate: float = 0.25,
    truck_wait_fee: float = 0.5,
    drone_wait_fee: float = 0.25,
    truck_speed: float = 2.0 / 3.0,
    drone_speed: float = 2.0 / 3.0,
    name: str | None = None,
) -> Instance:
    """Random Euclidean instance on the [0, area]^2 square, deterministic in seed.

    ceil(drone_eligible_frac * n) customers are drawn drone-eligible.  Node
    n+1 duplicates the depot.  Distances are kilometres, times minutes; the
    default speeds encode 40 km/h.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, area, size=(n + 1, 2))
    coords = np.vstack([pts, pts[0]])
    n_elig = math.ceil(drone_eligible_frac * n)
    eligible = frozenset(int(c) + 1 for c in rng.choice(n, size=n_elig, replace=False))
    truck_dist, truck_time = euclidean_matrices(coords, truck_speed)
    drone_dist, drone_time = euclidean_matrices(coords, drone_speed)
    return Instance(
        n=n,
        truck_dist=truck_dist,
        truck_time=truck_time,
        drone_dist=drone_dist,
        drone_time=drone_time,
        drone_eligible=eligible,
        endurance=endurance,
        launch_time=launch_time,
        retrieve_time=retrieve_time,
        truck_cost_rate=truck_cost_rate,
        drone_cost_rate=drone_cost_rate,
        truck_wait_fee=truck_wait_fee,
        drone_wait_fee=drone_wait_fee,
        truck_speed=truck_speed,
        drone_speed=drone_speed,
        name=name if name is not None else f"rnd-n{n}-s{seed}",
    )


# ---------------------------------------------------------------------------
# native format


def write_instance(inst: Instance, path: str | os.PathLike) -> None:
    """Serialize an Instance to the native format with full matrix blocks."""
    lines = [f"{FORMAT_TAG} {FORMAT_VERSION}", f"n {inst.n}"]
    for key in _HEADER_FIELDS:
        lines.append(f"{key} {getattr(inst, key)!r}")
    if inst.name:
        lines.append(f"name {inst.name}")
    lines.append("nodes")
    for node in range(inst.n + 2):
        flag = 1 if node in inst.drone_eligible else 0
        lines.append(f"{node} 0.0 0.0 {flag}")
    for key in _MATRIX_FIELDS:
        lines.append(f"matrix {key}")
        m = getattr(inst, key)
        for row in m:
            lines.append(" ".join(repr(float(x)) for x in row))
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_float(token: str, lineno: int, field: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise InstanceFormatError(f"line {lineno}: field {field}: not a number: {token!r}") from None


def _parse_native(lines: list[str], source: str) -> Instance:
    idx = 0

    def peek_line() -> str | None:
        nonlocal idx
        while idx < len(lines):
            raw = lines[idx].strip()
            if raw and not raw.startswith("#"):
                return raw
            idx += 1
        return None

    def next_line() -> tuple[int, str]:
        nonlocal idx
        raw = peek_line()
        if raw is None:
            raise InstanceFormatError(f"{source}: unexpected end of file")
        idx += 1
        return idx, raw

    lineno, head = next_line()
    parts = head.split()
    if parts[0] != FORMAT_TAG:
        raise InstanceFormatError(f"line {lineno}: field header: expected {FORMAT_TAG!r}")
    if int(parts[1]) != FORMAT_VERSION:
        raise InstanceFormatError(f"line {lineno}: field version: unsupported version {parts[1]}")

    n: int | None = None
    header: dict[str, float] = {
        "endurance": 20.0,
        "launch_time": 1.0,
        "retrieve_time": 1.0,
        "truck_cost_rate": 1.0,
        "drone_cost_rate": 1.0,
        "truck_wait_fee": 0.0,
        "drone_wait_fee": 0.0,
        "truck_speed": 2.0 / 3.0,
        "drone_speed": 2.0 / 3.0,
    }
    name = ""

    while True:
        lineno, line = next_line()
        key, _, rest = line.partition(" ")
        if key == "nodes":
            break
        if key == "n":
            n = int(rest)
        elif key == "name":
            name = rest.strip()
        elif key in header:
            header[key] = _parse_float(rest.strip(), lineno, key)
        else:
            raise InstanceFormatError(f"line {lineno}: field {key}: unknown header key")
    if n is None or n < 1:
        raise InstanceFormatError(f"{source}: field n: missing or < 1")

    coords = np.zeros((n + 2, 2))
    flags = np.zeros(n + 2, dtype=bool)
    seen: set[int] = set()
    for _ in range(n + 2):
        ahead = peek_line()
        if ahead is None or ahead.startswith("matrix") or ahead == "end":
            break
        lineno, line = next_line()
        toks = line.split()
        if len(toks) != 4:
            raise InstanceFormatError(f"line {lineno}: field node: expected 'id x y flag', got {len(toks)} tokens")
        node = int(toks[0])
        if not (0 <= node <= n + 1) or node in seen:
            raise InstanceFormatError(f"line {lineno}: field node: bad or duplicate id {node}")
        seen.add(node)
        coords[node, 0] = _parse_float(toks[1], lineno, "x")
        coords[node, 1] = _parse_float(toks[2], lineno, "y")
        flags[node] = toks[3] == "1"
    if seen != set(range(n + 2)):
        if seen == set(range(n + 1)):
            coords[n + 1] = coords[0]  # closing depot row may be omitted
        else:
            raise InstanceFormatError(f"{source}: field nodes: need rows for ids 0..{n} or 0..{n + 1}")

    matrices: dict[str, np.ndarray] = {}
    while idx < len(lines):
        lineno, line = next_line()
        if line == "end":
            break
        key, _, rest = line.partition(" ")
        if key != "matrix" or rest.strip() not in _MATRIX_FIELDS:
            raise InstanceFormatError(f"line {lineno}: field matrix: expected one of {_MATRIX_FIELDS}")
        mname = rest.strip()
        m = np.zeros((n + 2, n + 2))
        for r in range(n + 2):
            lineno, row = next_line()
            toks = row.split()
            if len(toks) != n + 2:
                raise InstanceFormatError(f"line {lineno}: field {mname}: expected {n + 2} entries, got {len(toks)}")
            for c, tok in enumerate(toks):
                m[r, c] = _parse_float(tok, lineno, mname)
        matrices[mname] = m

    if "truck_dist" not in matrices:
        matrices["truck_dist"], derived_tt = euclidean_matrices(coords, header["truck_speed"])
        matrices.setdefault("truck_time", derived_tt)
    elif "truck_time" not in matrices:
        matrices["truck_time"] = matrices["truck_dist"] / header["truck_speed"]
    if "drone_dist" not in matrices:
        matrices["drone_dist"], derived_dt = euclidean_matrices(coords, header["drone_speed"])
        matrices.setdefault("drone_time", derived_dt)
    elif "drone_time" not in matrices:
        matrices["drone_time"] = matrices["drone_dist"] / header["drone_speed"]

    eligible = frozenset(int(c) for c in range(1, n + 1) if flags[c])
    try:
        return Instance(
            n=n,
            truck_dist=matrices["truck_dist"],
            truck_time=matrices["truck_time"],
            drone_dist=matrices["drone_dist"],
            drone_time=matrices["drone_time"],
            drone_eligible=eligible,
            endurance=header["endurance"],
            launch_time=header["launch_time"],
            retrieve_time=header["retrieve_time"],
            truck_cost_rate=header["truck_cost_rate"],
            drone_cost_rate=header["drone_cost_rate"],
            truck_wait_fee=header["truck_wait_fee"],
            drone_wait_fee=header["drone_wait_fee"],
            truck_speed=header["truck_speed"],
            drone_speed=header["drone_speed"],
            name=name,
        )
    except ValueError as exc:
        raise InstanceFormatError(f"{source}: {exc}") from exc


# ---------------------------------------------------------------------------
# murray-style directories (nodes.csv + tau.csv + tauprime.csv)


def _read_csv_matrix(path: Path) -> np.ndarray:
    rows = []
    for raw in path.read_text(encoding="utf-8-sig").splitlines():
        raw = raw.strip()
        if raw:
            rows.append([t for t in raw.replace(",", " ").split()])
    size = len(rows)
    # some archives prepend a row-index column
    if rows and all(len(r) == size + 1 for r in rows):
        rows = [r[1:] for r in rows]
    m = np.zeros((size, size))
    for r, row in enumerate(rows):
        if len(row) != size:
            raise InstanceFormatError(f"{path}: row {r + 1}: expected {size} entries, got {len(row)}")
        for c, tok in enumerate(row):
            m[r, c] = _parse_float(tok, r + 1, path.name)
    return m


def _parse_murray(direc: Path, endurance: float) -> Instance:
    nodes_file = direc / "nodes.csv"
    tau_file = direc / "tau.csv"
    tauprime_file = direc / "tauprime.csv"
    for f in (nodes_file, tau_file, tauprime_file):
        if not f.exists():
            raise InstanceFormatError(f"{direc}: missing {f.name}")

    weights: dict[int, float] = {}
    node_ids = []
    for ln, raw in enumerate(nodes_file.read_text(encoding="utf-8-sig").splitlines(), start=1):
        raw = raw.strip()
        if not raw:
            continue
        toks = raw.replace(",", " ").split()
        try:
            nid = int(float(toks[0]))
        except ValueError:
            continue  # header row
        node_ids.append(nid)
        if len(toks) >= 6:
            weights[nid] = _parse_float(toks[5], ln, "parcel-weight")
    if not node_ids:
        raise InstanceFormatError(f"{nodes_file}: no node rows")

    tau = _read_csv_matrix(tau_file)
    tauprime = _read_csv_matrix(tauprime_file)
    n = tau.shape[0] - 2
    if n < 1 or tauprime.shape != tau.shape:
        raise InstanceFormatError(f"{direc}: matrix shapes disagree: {tau.shape} vs {tauprime.shape}")
    np.fill_diagonal(tau, 0.0)
    np.fill_diagonal(tauprime, 0.0)

    speed = 2.0 / 3.0  # 40 km/h in km per minute
    eligible = frozenset(
        c for c in range(1, n + 1) if weights.get(c, 0.0) <= MURRAY_WEIGHT_LIMIT
    )
    return Instance(
        n=n,
        truck_dist=tau * speed,
        truck_time=tau,
        drone_dist=tauprime * speed,
        drone_time=tauprime,
        drone_eligible=eligible,
        endurance=endurance,
        launch_time=1.0,
        retrieve_time=1.0,
        truck_speed=speed,
        drone_speed=speed,
        name=direc.name,
    )


def parse_instance(path: str | os.PathLike, fmt: str = "native", endurance: float = 20.0) -> Instance:
    """Parse an instance file.

    fmt 'native' reads the header+blocks layout written by write_instance;
    fmt 'murray' reads a directory containing nodes.csv, tau.csv and
    tauprime.csv with times in minutes (endurance is not stored in those
    files, so it is a parameter here).
    """
    p = Path(path)
    if fmt == "native":
        if not p.is_file():
            raise InstanceFormatError(f"{p}: no such file")
        return _parse_native(p.read_text(encoding="utf-8").splitlines(), str(p))
    if fmt == "murray":
        if not p.is_dir():
            raise InstanceFormatError(f"{p}: murray format expects a directory")
        return _parse_murray(p, endurance)
    raise InstanceFormatError(f"unknown instance format {fmt!r}")


def instances_equal(a: Instance, b: Instance) -> bool:
    """Bit-exact field-wise equality (numpy fields compared elementwise)."""
    if a.n != b.n or a.drone_eligible != b.drone_eligible:
        return False
    for key in _MATRIX_FIELDS:
        if not np.array_equal(getattr(a, key), getattr(b, key)):
            return False
    scalars = _HEADER_FIELDS + ("name",)
    return all(getattr(a, key) == getattr(b, key) for key in scalars)

"""JSON system files and result files.

System files carry the block matrices, the coupling matrix and optional
sweep-option overrides; matrix entries are plain numbers, or ``[re, im]``
pairs for complex data (applied uniformly per matrix). Result files embed
the input hash, tool version, echoed options and wall-clock timings so a
run can be reproduced from the file alone. Sweep traces are exported as
CSV, not JSON (see :func:`stabrad.radius.write_trace_csv`).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .errors import InputError
from .interconnect import BlockPerturbation, CompositeSystem, validate
from .radius import RadiusReport, SweepOptions
from .system import StateSpaceBlock
from .verify import MonteCarloReport
from .worstcase import WorstCaseCertificate

SYSTEM_FILE_VERSION = "1"


def _entry_from_json(v, where: str):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                    for x in v)):
        return complex(float(v[0]), float(v[1]))
    raise InputError(f"{where}: expected a number or an [re, im] pair, got {v!r}")


def matrix_from_json(data, where: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise InputError(f"{where}: expected a non-empty list of rows")
    rows = []
    width = None
    for i, row in enumerate(data):
        if not isinstance(row, list) or not row:
            raise InputError(f"{where}[{i}]: expected a non-empty row")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{where}[{i}]: row length {len(row)} != {width}")
        rows.append([_entry_from_json(v, f"{where}[{i}][{j}]")
                     for j, v in enumerate(row)])
    arr = np.array(rows)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: entries must be finite")
    if np.iscomplexobj(arr) and not np.any(arr.imag != 0.0):
        arr = arr.real
    return arr


def matrix_to_json(m: np.ndarray):
    a = np.asarray(m)
    if np.iscomplexobj(a) and np.any(a.imag != 0.0):
        return [[[float(v.real), float(v.imag)] for v in row] for row in a]
    return [[float(v.real) for v in row] for row in a]


def _complex_to_json(z: complex):
    return [float(z.real), float(z.imag)]


def _vector_to_json(v: np.ndarray):
    return [_complex_to_json(complex(x)) for x in np.asarray(v)]


@dataclass(frozen=True)
class SystemFile:
    """A parsed system file: the validated composite plus metadata."""

    system: CompositeSystem
    options: SweepOptions | None
    version: str
    path: str
    sha256: str


def system_to_dict(sys: CompositeSystem, options: SweepOptions | None = None) -> dict:
    doc = {
        "version": SYSTEM_FILE_VERSION,
        "blocks": [{"label": b.label,
                    "A": matrix_to_json(b.A),
                    "B": matrix_to_json(b.B),
                    "C": matrix_to_json(b.C)} for b in sys.blocks],
        "E": matrix_to_json(sys.E),
    }
    if options is not None:
        doc["options"] = asdict(options)
    return doc


def system_from_dict(doc: dict) -> tuple[CompositeSystem, SweepOptions | None, str]:
    if not isinstance(doc, dict):
        raise InputError("system file: top-level value must be an object")
    version = str(doc.get("version", SYSTEM_FILE_VERSION))
    raw_blocks = doc.get("blocks")
    if not isinstance(raw_blocks, list) or not raw_blocks:
        raise InputError("blocks: N >= 1 required (empty or missing blocks list)")
    blocks = []
    for k, entry in enumerate(raw_blocks):
        if not isinstance(entry, dict):
            raise InputError(f"blocks[{k}]: expected an object")
        missing = [key for key in ("A", "B", "C") if key not in entry]
        if missing:
            raise InputError(f"blocks[{k}]: missing field(s) {missing}")
        blocks.append(StateSpaceBlock(
            matrix_from_json(entry["A"], f"blocks[{k}].A"),
            matrix_from_json(entry["B"], f"blocks[{k}].B"),
            matrix_from_json(entry["C"], f"blocks[{k}].C"),
            label=str(entry.get("label", f"block_{k}"))))
    if "E" not in doc:
        raise InputError("E: missing coupling matrix")
    e = matrix_from_json(doc["E"], "E")
    if np.iscomplexobj(e):
        raise InputError("E: must be real")
    sys = CompositeSystem(tuple(blocks), e)

    options = None
    raw_opts = doc.get("options")
    if raw_opts is not None:
        if not isinstance(raw_opts, dict):
            raise InputError("options: expected an object")
        known = {"grid_points", "tail_epsilon", "refine_tol", "objective_tol"}
        unknown = set(raw_opts) - known
        if unknown:
            raise InputError(f"options: unknown key(s) {sorted(unknown)}")
        kwargs = dict(raw_opts)
        if "grid_points" in kwargs:
            kwargs["grid_points"] = int(kwargs["grid_points"])
        options = SweepOptions(**kwargs)
    return sys, options, version


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def load_system_file(path) -> SystemFile:
    """Parse and validate a system file; parse errors carry the location,
    validation failures are itemized."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: parse error at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from None
    sys, options, version = system_from_dict(doc)
    validate(sys).raise_if_invalid()
    return SystemFile(system=sys, options=options, version=version,
                      path=str(path), sha256=sha256_of(path))


def parse_system_file(path) -> CompositeSystem:
    """Validated composite system from a JSON system file."""
    return load_system_file(path).system


def write_system_file(sys: CompositeSystem, path,
                      options: SweepOptions | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_dict(sys, options), fh, indent=2)
        fh.write("\n")


def radius_report_to_dict(report: RadiusReport) -> dict:
    return {
        "theta": report.theta,
        "radius": None if report.radius_is_infinite else report.radius,
        "radius_infinite": report.radius_is_infinite,
        "omega_star": report.omega_star,
        "mu_star": report.mu_star,
        "lower_bound_theta2": report.lower_bound_theta2,
        "upper_bound_theta2": report.upper_bound_theta2,
        "gains_at_peak": [float(g) for g in report.gains_at_peak],
        "flags": list(report.flags),
        "trace_points": int(report.trace.shape[0]),
    }


def delta_to_json(delta: BlockPerturbation):
    return [[matrix_to_json(blk) for blk in row] for row in delta.blocks]


def certificate_to_dict(cert: WorstCaseCertificate) -> dict:
    return {
        "omega0": cert.omega0,
        "norm_2inf": cert.norm_2inf,
        "norm_opnorm": cert.norm_opnorm,
        "target_radius": (None if math.isinf(cert.target_radius)
                          else cert.target_radius),
        "closed_loop_eig": _complex_to_json(cert.closed_loop_eig),
        "eig_residual": cert.eig_residual,
        "closed_loop_abscissa": cert.closed_loop_abscissa,
        "certified": cert.certified,
        "eigvec": _vector_to_json(cert.eigvec),
        "delta": delta_to_json(cert.delta),
    }


def monte_carlo_to_dict(mc: MonteCarloReport) -> dict:
    return asdict(mc)


def result_file_dict(command: str, system_file: SystemFile, options: SweepOptions,
                     timings: dict, radius_report: RadiusReport | None = None,
                     worst_case: WorstCaseCertificate | None = None,
                     monte_carlo: MonteCarloReport | None = None,
                     extra: dict | None = None) -> dict:
    doc = {
        "tool": {"name": "stabrad", "version": __version__},
        "command": command,
        "input": {"path": system_file.path, "sha256": system_file.sha256},
        "options": asdict(options),
        "timings": timings,
    }
    if radius_report is not None:
        doc["radius_report"] = radius_report_to_dict(radius_report)
    if worst_case is not None:
        doc["worst_case"] = certificate_to_dict(worst_case)
    if monte_carlo is not None:
        doc["monte_carlo"] = monte_carlo_to_dict(monte_carlo)
    if extra:
        doc.update(extra)
    return doc


def write_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

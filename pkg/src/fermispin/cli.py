"""Command-line front end: ``fermispin <command> [options]``.

Every command writes one document to stdout.  Exit status is 0 on success,
2 for bad arguments, 3 when a size limit is hit and 1 for anything else; on
failure a single JSON line describing the error goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bell, entanglement, reduction, rho as rho_mod
from .cache import MatrixCache, default_cache_dir
from .errors import InvalidArgumentError, ResourceLimitError
from .report import reproduction_checks
from .spin_core import DEFAULT_MAX_N, check_particle_count

COMMANDS = ("build", "reduce", "correlate", "negativity", "witness", "chsh", "entropy", "report")
FORMATS = ("json", "csv", "pretty")
EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int | None = None
    split: str | None = None
    mask: str | None = None
    fmt: str = "json"
    cache_dir: str | None = None
    max_n: int = DEFAULT_MAX_N
    route: str = "full"
    builder: str = "pairing"
    pair: str | None = None
    alice: int = 0


def parse_index_list(text):
    text = text.strip()
    if not text:
        raise InvalidArgumentError("empty index list")
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise InvalidArgumentError(f"bad index list {text!r}") from None


def parse_split(text):
    """``"0,1|2,3"`` -> ([0, 1], [2, 3])."""
    if text.count("|") != 1:
        raise InvalidArgumentError(f"bipartition must look like 'i,j|k,l', got {text!r}")
    left, right = text.split("|")
    return parse_index_list(left), parse_index_list(right)


def parse_mask(text, n):
    """``"keep=0,1"`` -> SubsystemMask."""
    if not text.startswith("keep="):
        raise InvalidArgumentError(f"mask must look like 'keep=i,j,...', got {text!r}")
    keep = parse_index_list(text[len("keep="):])
    if len(set(keep)) != len(keep):
        raise InvalidArgumentError(f"repeated index in mask {text!r}")
    return reduction.SubsystemMask.of(keep, n)


def frac(x):
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.15g}") if math.isfinite(obj) else obj
    if isinstance(obj, (np.floating,)):
        return _round_floats(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Fraction):
        return frac(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _matrix_record(m):
    return [[frac(m.entry(i, j)) for j in range(m.dim)] for i in range(m.dim)]


class _Runner:
    def __init__(self, config):
        self.config = config
        self.cache = MatrixCache(
            config.cache_dir if config.cache_dir is not None else default_cache_dir(),
            max_n=config.max_n,
        )

    def rho(self, builder=None):
        return self.cache.get_or_build(builder or self.config.builder, self.config.n)

    def mask(self):
        return parse_mask(self.config.mask, self.config.n) if self.config.mask else None

    def subsystem(self):
        """Ground state, optionally reduced to ``--mask``; returns (matrix, kept spins)."""
        rho = self.rho()
        mask = self.mask()
        if mask is None:
            return rho, list(range(self.config.n))
        return reduction.partial_trace(rho, mask), list(mask.keep)

    def split(self, kept):
        if not self.config.split:
            raise InvalidArgumentError("--split is required for this command")
        a, b = parse_split(self.config.split)
        pos = {s: i for i, s in enumerate(kept)}
        missing = [s for s in a + b if s not in pos]
        if missing:
            raise InvalidArgumentError(f"split spins {missing} are not in the subsystem {kept}")
        return entanglement.Bipartition(
            tuple(pos[s] for s in a), tuple(pos[s] for s in b), len(kept)
        )

    # commands ------------------------------------------------------------

    def build(self):
        rho = self.rho()
        return {
            "n": self.config.n,
            "builder": self.config.builder,
            "denom": str(rho.denom),
            "dimension": rho.dim,
            "trace": frac(rho.trace()),
            "rank": rho.rank(),
            "nonzero_entries": int(np.count_nonzero(rho.numerators)),
            "checksum": rho.checksum(),
            "cache": self.cache.last_status,
        }

    def reduce(self):
        if not self.config.mask:
            raise InvalidArgumentError("--mask keep=... is required for reduce")
        red, kept = self.subsystem()
        weights = None
        if red.n == 2:
            try:
                w = reduction.two_spin_weights_from_matrix(red)
                weights = {"singlet": frac(w.w_singlet), "triplet_each": frac(w.w_triplet_each)}
            except InvalidArgumentError:
                weights = None
        return {
            "n": self.config.n,
            "keep": kept,
            "dimension": red.dim,
            "denom": str(red.denom),
            "trace": frac(red.trace()),
            "matrix": _matrix_record(red) if red.n <= 6 else None,
            "two_spin_weights": weights,
        }

    def correlate(self):
        n = self.config.n
        pair = parse_index_list(self.config.pair) if self.config.pair else [0, 1]
        if len(pair) != 2:
            raise InvalidArgumentError(f"--pair needs exactly two spins, got {self.config.pair!r}")
        i, j = pair
        analytic = reduction.pair_correlation(n)
        numeric = None
        if n <= self.config.max_n:
            numeric = reduction.pair_correlation_numeric(self.rho(), i, j)
        return {
            "n": n,
            "pair": [i, j],
            "correlation": frac(analytic),
            "correlation_float": float(analytic),
            "numeric": None if numeric is None else frac(numeric),
            "agree": None if numeric is None else numeric == analytic,
        }

    def negativity(self):
        red, kept = self.subsystem()
        bp = self.split(kept)
        res = entanglement.negativity_measure(red, bp, max_n=self.config.max_n)
        return {
            "n": self.config.n,
            "keep": kept,
            "split": self.config.split,
            "eigenvalues": [float(x) for x in res.eigenvalues],
            "negativity": res.negativity,
            "entangled": res.entangled,
        }

    def witness(self):
        red, kept = self.subsystem()
        bp = self.split(kept)
        w = entanglement.sylvester_witness(red, bp)
        return {
            "n": self.config.n,
            "keep": kept,
            "split": self.config.split,
            "found": w is not None,
            "witness": None if w is None else w.to_record(),
        }

    def chsh(self):
        rep = bell.chsh_classical_bound_check(
            self.config.n, route=self.config.route, alice=self.config.alice, max_n=self.config.max_n
        )
        return rep.to_record()

    def entropy(self):
        red, kept = self.subsystem()
        return {
            "n": self.config.n,
            "builder": self.config.builder,
            "keep": kept,
            "entropy_nats": rho_mod.von_neumann_entropy(red),
            "rank": red.rank(),
        }

    def report(self):
        checks = reproduction_checks(self.cache)
        return {
            "checks": [
                {"name": c.name, "expected": c.expected, "computed": c.computed, "passed": bool(c.passed)}
                for c in checks
            ],
            "all_passed": all(c.passed for c in checks),
        }


def run(config):
    """Execute one command; returns ``(exit_status, document)``."""
    if config.command not in COMMANDS:
        raise InvalidArgumentError(f"unknown command {config.command!r}")
    if config.command != "report":
        if config.n is None:
            raise InvalidArgumentError("--n is required")
        # closed-form routes have no size limit
        closed_form = config.command == "correlate" or (
            config.command == "chsh" and config.route == "reduced"
        )
        check_particle_count(config.n, None if closed_form else config.max_n)
    runner = _Runner(config)
    doc = {"command": config.command}
    doc.update(getattr(runner, config.command)())
    status = EXIT_OK
    if config.command == "report" and not doc["all_passed"]:
        status = EXIT_ERROR
    return status, _round_floats(doc)


def render(doc, fmt):
    if fmt == "json":
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if "checks" in doc:
            w.writerow(["name", "expected", "computed", "passed"])
            for c in doc["checks"]:
                w.writerow([c["name"], json.dumps(c["expected"]), json.dumps(c["computed"]), c["passed"]])
        else:
            w.writerow(["key", "value"])
            for k, v in doc.items():
                w.writerow([k, v if isinstance(v, (str, int, float, bool)) else json.dumps(v, ensure_ascii=False)])
        return buf.getvalue()
    lines = []
    if "checks" in doc:
        for c in doc["checks"]:
            flag = "PASS" if c["passed"] else "FAIL"
            lines.append(f"[{flag}] {c['name']}: expected {_pretty(c['expected'])}, computed {_pretty(c['computed'])}")
        lines.append(f"all passed: {doc['all_passed']}")
    else:
        for k, v in doc.items():
            lines.append(f"{k}: {_pretty(v)}")
    return "\n".join(lines) + "\n"


def _pretty(v):
    if isinstance(v, dict) and set(v) == {"num", "den"}:
        return v["num"] if v["den"] == "1" else f"{v['num']}/{v['den']}"
    if isinstance(v, list):
        return "[" + ", ".join(_pretty(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_pretty(x)}" for k, x in v.items()) + "}"
    return str(v)


class _Parser(argparse.ArgumentParser):
    """Raise instead of printing usage so errors stay a single JSON line."""

    def error(self, message):
        raise InvalidArgumentError(message)


def build_parser():
    p = _Parser(
        prog="fermispin",
        description="Spin density matrices, entanglement and CHSH for N paired spin-1/2 fermions.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--n", type=int, help="even particle count")
    p.add_argument("--split", help="bipartition 'i,j,...|k,l,...'")
    p.add_argument("--mask", help="subsystem 'keep=i,j,...'")
    p.add_argument("--pair", help="spin pair 'i,j' for correlate (default 0,1)")
    p.add_argument("--builder", choices=sorted(rho_mod.BUILDERS), default="pairing")
    p.add_argument("--route", choices=("full", "reduced"), default="full")
    p.add_argument("--alice", type=int, default=0, help="spin measured by Alice (chsh)")
    p.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    p.add_argument("--cache-dir", help="matrix cache directory (default: $FERMISPIN_CACHE_DIR)")
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="largest n for dense matrices")
    return p


def _error_line(exc, status):
    return json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": status})


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except InvalidArgumentError as exc:
        stderr.write(_error_line(exc, EXIT_USAGE) + "\n")
        return EXIT_USAGE
    config = RunConfig(**{k: getattr(args, k) for k in RunConfig.__dataclass_fields__})
    try:
        status, doc = run(config)
    except InvalidArgumentError as exc:
        stderr.write(_error_line(exc, EXIT_USAGE) + "\n")
        return EXIT_USAGE
    except ResourceLimitError as exc:
        stderr.write(_error_line(exc, EXIT_RESOURCE) + "\n")
        return EXIT_RESOURCE
    except Exception as exc:  # noqa: BLE001
        stderr.write(_error_line(exc, EXIT_ERROR) + "\n")
        return EXIT_ERROR
    stdout.write(render(doc, config.fmt))
    return status


if __name__ == "__main__":
    sys.exit(main())

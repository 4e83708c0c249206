"""Command-line front end: ``qcr analyze | certify | verify | gap | solve``.

Every command loads a quadric spec (JSON), runs one pipeline and writes a
report, as JSON by default or as CSV for ``gap``. Exit status is 0 when all
checks pass, 1 when a mathematical check fails and 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from random import Random

import numpy as np
from scipy.stats import norm, qmc

from . import __version__
from .errors import QCRError
from .fock import TruncatedBasis, adjointness_defect, commutator_defect
from .quadric import (QuadricSpec, certify_pseudoconcavity, levi_matrix, levi_spectrum,
                      load_spec)
from .rational import as_qqi, as_rational
from .reports import spectral_csv, to_json
from .spectral import (apply_dbar, gap_scan, is_monotone, reference_bounds,
                       solve_dbar_min_norm)
from .weyl import (WeylAlgebra, check_integrability, formal_adjoint, reduced_dbar,
                   verify_paper_identities)

COMMANDS = ("analyze", "certify", "verify", "gap", "solve")


class ConfigError(QCRError):
    """Invalid command-line configuration; carries every problem found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


# -- conormal grids --------------------------------------------------------

def sphere_points(d: int, m: int, seed: int = 0) -> list[tuple]:
    """``m`` deterministic points on the unit sphere of ``R^d``.

    ``d == 1`` alternates ``+1, -1``; ``d == 2`` uses equally spaced angles
    (rotated by a seeded offset when ``seed != 0``); higher ``d`` maps a
    scrambled Sobol sequence through the normal quantile and normalizes.
    """
    if m <= 0:
        return []
    if d == 1:
        return [(1.0,) if i % 2 == 0 else (-1.0,) for i in range(m)]
    if d == 2:
        offset = 0.0 if seed == 0 else Random(seed).random() * 2 * math.pi / m
        return [(math.cos(offset + 2 * math.pi * i / m), math.sin(offset + 2 * math.pi * i / m))
                for i in range(m)]
    # draw a power-of-two block and keep its prefix
    u = qmc.Sobol(d, scramble=True, seed=seed).random_base2(max(0, (m - 1).bit_length()))[:m]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return [tuple(float(x) for x in row) for row in g]


def parse_xi(text: str, d: int, seed: int = 0) -> list[tuple]:
    """Parse ``--xi``: ``sphere:m`` or points separated by ``;``.

    Components within a point are comma separated. For ``d == 1`` a plain comma
    list such as ``-1,0,1`` is read as several points. Entries may be integers,
    decimals or fractions ``a/b``; they are kept exact.
    """
    text = text.strip()
    if text.startswith("sphere:"):
        m = int(text.split(":", 1)[1])
        if m < 0:
            raise ValueError("sphere point count must be nonnegative")
        return sphere_points(d, m, seed)
    points = [p for p in text.split(";") if p.strip()]
    parsed = [tuple(as_rational(c.strip()) for c in p.split(",")) for p in points]
    if d == 1 and len(parsed) == 1 and len(parsed[0]) > 1:
        parsed = [(c,) for c in parsed[0]]
    for p in parsed:
        if len(p) != d:
            raise ValueError(f"conormal {p} has {len(p)} components, spec has d={d}")
    return parsed


def _parse_int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


# -- configuration ---------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    spec_path: str
    xi: str | None = None
    q: int = 2
    spacing: float = 0.05
    N: str | None = None
    degree: str = "both"
    mode: str | None = None
    seed: int = 0
    out: str | None = None
    format: str = "json"
    timing: bool = True
    element: str | None = None
    zero: bool = False
    g_degree: int | None = None
    trials: int = 1
    threads: int = 1
    q_explicit: bool = False
    # filled by validate()
    spec: QuadricSpec | None = field(default=None, repr=False)
    xi_points: list = field(default_factory=list, repr=False)
    N_list: list = field(default_factory=list, repr=False)
    degrees: tuple = ()

    def echo(self) -> dict:
        return {"command": self.command, "spec": self.spec_path, "xi": self.xi, "q": self.q,
                "spacing": self.spacing, "N": self.N_list, "degrees": list(self.degrees),
                "mode": self.mode, "seed": self.seed, "format": self.format,
                "element": self.element, "zero": self.zero, "g_degree": self.g_degree, "trials": self.trials}

    def validate(self) -> "RunConfig":
        """Check every field before computing; raise one aggregated error."""
        problems = []
        try:
            self.spec = load_spec(self.spec_path)
        except FileNotFoundError:
            problems.append(f"--spec: file not found: {self.spec_path}")
        except json.JSONDecodeError as exc:
            problems.append(f"--spec: {self.spec_path}:{exc.lineno}:{exc.colno}: {exc.msg}")
        except (QCRError, ValueError) as exc:
            problems.append(f"--spec: {self.spec_path}: {exc}")
        if self.format not in ("json", "csv"):
            problems.append(f"--format must be json or csv, got {self.format!r}")
        elif self.format == "csv" and self.command != "gap":
            problems.append("--format csv is only available for gap")
        if self.mode not in (None, "exact", "float"):
            problems.append(f"--mode must be exact or float, got {self.mode!r}")
        if self.degree not in ("0", "1", "both"):
            problems.append(f"--degree must be 0, 1 or both, got {self.degree!r}")
        else:
            self.degrees = (0, 1) if self.degree == "both" else (int(self.degree),)
        if self.q < 0:
            problems.append("--q must be nonnegative")
        if not self.spacing > 0:
            problems.append("--spacing must be positive")
        if self.trials < 1:
            problems.append("--trials must be positive")
        default_N = {"verify": "2", "gap": "2,3,4", "solve": "4"}.get(self.command, "")
        try:
            self.N_list = _parse_int_list(self.N or default_N)
            if any(N < 0 for N in self.N_list):
                problems.append("--N entries must be nonnegative")
            if self.command in ("verify", "gap", "solve") and not self.N_list:
                problems.append("--N must name at least one truncation")
        except ValueError:
            problems.append(f"--N must be a comma-separated list of integers, got {self.N!r}")
        if self.spec is not None:
            d = self.spec.d
            default_xi = "1,-1" if d == 1 else "sphere:16"
            if self.command == "solve":
                default_xi = "1" if d == 1 else ",".join(["1"] + ["0"] * (d - 1))
            try:
                self.xi_points = parse_xi(self.xi or default_xi, d, self.seed)
            except (ValueError, ZeroDivisionError) as exc:
                problems.append(f"--xi: {exc}")
            if self.command == "solve" and len(self.xi_points) > 1:
                problems.append("solve takes a single conormal in --xi")
            if self.command in ("verify", "solve") and self.mode == "exact" and \
                    any(isinstance(c, float) for p in self.xi_points for c in p):
                problems.append("exact mode needs rational --xi entries (not sphere:m)")
            if self.command == "verify" and not self.spec.is_exact:
                problems.append("verify needs a spec with rational entries")
            if self.element is not None:
                try:
                    idx = tuple(int(t) for t in self.element.split(","))
                    if len(idx) != 2 * self.spec.n or min(idx) < 0:
                        problems.append(f"--element needs {2 * self.spec.n} nonnegative integers")
                    elif self.N_list and sum(idx) > self.N_list[0]:
                        problems.append(f"--element has degree {sum(idx)} > N={self.N_list[0]}")
                except ValueError:
                    problems.append(f"--element must be comma-separated integers, got {self.element!r}")
            if self.g_degree is not None and self.N_list and not 0 <= self.g_degree <= self.N_list[0]:
                problems.append("--g-degree must lie between 0 and N")
        if problems:
            raise ConfigError(problems)
        return self


# -- commands --------------------------------------------------------------

def _floats(p) -> list[float]:
    return [float(c) for c in p]


def _xi_text(p) -> list[str]:
    return [str(c) if isinstance(c, Fraction) else repr(float(c)) for c in p]


def cmd_analyze(cfg: RunConfig) -> tuple[list, bool]:
    """Levi spectra and pseudoconcavity order at each requested conormal."""
    results = []
    for p in cfg.xi_points:
        s = levi_spectrum(cfg.spec, _floats(p))
        results.append({"xi": _xi_text(p), "eigenvalues": [round(x, 12) + 0.0 for x in s.eigenvalues],
                        "n_pos": s.n_pos, "n_zero": s.n_zero, "n_neg": s.n_neg, "q": s.q})
    q_min = min((r["q"] for r in results), default=None)
    # analyze only fails when an explicit --q threshold is not met
    passed = not cfg.q_explicit or q_min is None or q_min >= cfg.q
    return [{"points": results, "q_min": q_min}], passed


def cmd_certify(cfg: RunConfig) -> tuple[list, bool]:
    cert = certify_pseudoconcavity(cfg.spec, cfg.q, cfg.spacing)
    return [cert.to_dict()], bool(cert.certified)


def cmd_verify(cfg: RunConfig) -> tuple[list, bool]:
    """Integrability, symbolic identities and matrix-level checks."""
    spec, mode = cfg.spec, cfg.mode or "exact"
    out = [{"check": "integrability", "pass": check_integrability(spec)}]
    rep = verify_paper_identities(spec)
    out.append({"check": "identities", "xi": "symbolic", "pass": rep.passed,
                "identities": [c.to_dict() for c in rep.checks]})
    A = WeylAlgebra(spec.n, spec.d)
    dbar = [reduced_dbar(spec, k, None, A) for k in range(spec.n)]
    delta = [formal_adjoint(op) for op in dbar]
    tol = 0.0 if mode == "exact" else 1e-12
    for p in cfg.xi_points:
        if all(isinstance(c, Fraction) for c in p):
            rep = verify_paper_identities(spec, xi=list(p))
            out.append({"check": "identities", "xi": _xi_text(p), "pass": rep.passed,
                        "identities": [c.to_dict() for c in rep.checks]})
        xi = list(p) if mode == "exact" else _floats(p)
        h = levi_matrix(spec, xi).entries
        for N in cfg.N_list:
            adj = max(adjointness_defect(dbar[j], delta[j], N, mode, xi=xi) for j in range(spec.n))
            comm = max(
                commutator_defect(dbar[k], delta[j],
                                  A.scalar(2 * as_qqi(h[j, k]) - (1 if j == k else 0)),
                                  N, mode, xi=xi)
                for k in range(spec.n) for j in range(spec.n))
            out.append({"check": "matrix", "xi": _xi_text(p), "N": N, "mode": mode,
                        "adjointness_defect": adj, "commutator_defect": comm,
                        "pass": adj <= tol and comm <= tol * 100})
    return out, all(r["pass"] for r in out)


def cmd_gap(cfg: RunConfig):
    bounds = reference_bounds(cfg.spec)
    reports = gap_scan(cfg.spec, [_floats(p) for p in cfg.xi_points], cfg.N_list, cfg.degrees,
                       threads=cfg.threads, bounds=bounds)
    monotone = is_monotone(reports)
    passed = monotone and all(r.passed is not False for r in reports)
    return reports, monotone, passed


def cmd_solve(cfg: RunConfig) -> tuple[list, bool]:
    """Minimal-norm solution of ``dbar u = dbar g`` for named or random ``g``."""
    spec, N = cfg.spec, cfg.N_list[0]
    xi = _floats(cfg.xi_points[0])
    basis = TruncatedBasis(spec.n, N)
    bounds = reference_bounds(spec)
    g_deg = N - 1 if cfg.g_degree is None else cfg.g_degree
    rng = np.random.default_rng(cfg.seed)
    results = []
    for t in range(cfg.trials):
        g = np.zeros(basis.dim, dtype=complex)
        if cfg.zero:
            source = {"zero": True}
        elif cfg.element is not None:
            g[basis.index(tuple(int(c) for c in cfg.element.split(",")))] = 1.0
            source = {"element": cfg.element}
        else:
            m = TruncatedBasis(spec.n, max(g_deg, 0)).dim if g_deg >= 0 else 0
            g[:m] = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            source = {"random": True, "g_degree": g_deg, "trial": t}
        f = apply_dbar(spec, xi, N, g)
        u, diag = solve_dbar_min_norm(spec, xi, N, f)
        row = {"source": source, **diag.to_dict(), "norm_g": float(np.linalg.norm(g))}
        ok = diag.residual <= 1e-10 * diag.norm_f and \
            diag.norm_u * math.sqrt(diag.lambda_min) <= diag.norm_f * (1 + 1e-9)
        if bounds is not None:
            limit = diag.norm_f / math.sqrt(bounds[0]) + 1e-9
            row["paper_bound"] = bounds[0]
            row["limit"] = limit
            ok = ok and diag.norm_u <= limit
        row["pass"] = bool(ok)
        results.append(row)
    return results, all(r["pass"] for r in results)


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcr", description="Checks for quadric CR submanifolds.")
    p.add_argument("--version", action="version", version=f"qcr {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {"analyze": "Levi spectra and pseudoconcavity order at given conormals",
             "certify": "certify q-pseudoconcavity on the whole conormal sphere",
             "verify": "symbolic and matrix-level operator identities",
             "gap": "scan lower bounds of the reduced quadratic forms",
             "solve": "minimal-norm solution of the reduced dbar equation"}
    for name in COMMANDS:
        s = sub.add_parser(name, help=helps[name])
        s.add_argument("--spec", required=True, metavar="PATH", help="quadric spec JSON")
        s.add_argument("--xi", metavar="LIST|sphere:m",
                       help="conormals: '1,-1' (d=1), '0.6,0.8;1,0', or sphere:m")
        s.add_argument("--q", type=int, default=None, help="pseudoconcavity order (default 2)")
        s.add_argument("--spacing", type=float, default=0.05, help="certification grid spacing")
        s.add_argument("--N", metavar="LIST", help="truncation degrees, e.g. 2,3,4")
        s.add_argument("--degree", default="both", help="form degree: 0, 1 or both")
        s.add_argument("--mode", default=None, help="exact or float")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out", metavar="PATH", help="report file (default stdout)")
        s.add_argument("--format", default="json", help="json or csv (csv for gap)")
        s.add_argument("--no-timing", dest="timing", action="store_false",
                       help="omit wall-clock fields from the report")
        if name == "solve":
            s.add_argument("--element", metavar="P1,Q1,...",
                           help="use g = this basis element (multi-index)")
            s.add_argument("--zero", action="store_true", help="use g = 0 (so f = 0)")
            s.add_argument("--g-degree", type=int, default=None,
                           help="degree of random g (default N-1)")
            s.add_argument("--trials", type=int, default=1, help="number of random g")
    return p


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QCR_THREADS", "1")))
    except ValueError:
        return 1


def run(argv=None) -> tuple[int, str, str | None]:
    """Run the CLI without printing; return ``(exit_code, text, out_path)``."""
    args = build_parser().parse_args(argv)
    kw = {k: v for k, v in vars(args).items() if k != "command"}
    q_explicit = kw.get("q") is not None
    kw["q"] = 2 if kw["q"] is None else kw["q"]
    kw["spec_path"] = kw.pop("spec")
    cfg = RunConfig(command=args.command, threads=_threads(), q_explicit=q_explicit, **kw)
    try:
        cfg.validate()
    except ConfigError as exc:
        return 2, str(exc) + "\n", None

    t0 = time.perf_counter()
    try:
        if cfg.command == "gap":
            reports, monotone, passed = cmd_gap(cfg)
            if cfg.format == "csv":
                return (0 if passed else 1), spectral_csv(reports, cfg.spec.d, cfg.timing), cfg.out
            results = [r.to_dict() for r in reports]
            extra = {"monotone": monotone}
        else:
            fn = {"analyze": cmd_analyze, "certify": cmd_certify,
                  "verify": cmd_verify, "solve": cmd_solve}[cfg.command]
            results, passed = fn(cfg)
            extra = {}
    except QCRError as exc:
        results, passed, extra = [{"error": str(exc)}], False, {}
    report = {"tool": "qcr", "version": __version__, "config": cfg.echo(),
              "results": results, "pass": bool(passed), **extra}
    if cfg.timing:
        report["timing"] = {"wall_ms": round(1e3 * (time.perf_counter() - t0), 3)}
    else:
        report = _drop_wall(report)
    return (0 if passed else 1), to_json(report), cfg.out


def _drop_wall(obj):
    if isinstance(obj, dict):
        return {k: _drop_wall(v) for k, v in obj.items() if k != "wall_ms"}
    if isinstance(obj, list):
        return [_drop_wall(v) for v in obj]
    return obj


def main(argv=None) -> int:
    code, text, out = run(argv)
    if out:
        Path(out).write_text(text)
    else:
        (sys.stderr if code == 2 else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

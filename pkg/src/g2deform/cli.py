"""
Command line entry points.

    g2deform identities [--samples 1000] [--seed 0] [--out report.json]
    g2deform table
    g2deform kernel --n 8 [--twist C] [--tol 1e-8] [--out eig.csv]
    g2deform flow   --n 16 --eps 0.01 --dt 0.05 --steps 200 [--out flow.csv]
    g2deform sw     --n 8 --eps 0.1 --steps 200 --seed 0 [--out sw.csv]
    g2deform deform --trials 100 --seed 0 [--out deform.csv]

Exit status: 0 success, 1 failed check or solver failure, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fields, frames
from .g2core import G2Structure, cross
from .identities import CROSS_TABLE, run_suite

log = logging.getLogger("g2deform")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 8
    dt: float = 0.05
    steps: int = 200
    eps: float = 0.01
    seed: int = 0
    tol: float = 1e-8
    out: Optional[str] = None
    samples: int = 1000
    trials: int = 100
    twist: float = 0.0
    q_max: float = 0.45

    def validate(self) -> "RunConfig":
        if self.n < 4 or self.n % 2:
            raise ConfigError(f"--n must be even and >= 4 (got {self.n})")
        if not self.dt > 0:
            raise ConfigError(f"--dt must be positive (got {self.dt})")
        if self.steps < 0:
            raise ConfigError(f"--steps must be >= 0 (got {self.steps})")
        if self.samples < 0 or self.trials < 0:
            raise ConfigError("--samples and --trials must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("--seed must fit in 64 unsigned bits")
        if not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if not 0 < self.q_max < 0.5:
            raise ConfigError("--q-max must lie in (0, 1/2)")
        return self


def _write_text(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def cmd_identities(cfg: RunConfig) -> int:
    report = run_suite(cfg.samples, cfg.seed)
    _write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", cfg.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _vec_name(v: np.ndarray) -> str:
    parts = []
    for i, c in enumerate(v):
        if c == 0:
            continue
        if c == 1:
            parts.append(f"+e{i + 1}")
        elif c == -1:
            parts.append(f"-e{i + 1}")
        else:
            parts.append(f"{c:+g}e{i + 1}")
    text = "".join(parts) if parts else "0"
    return text[1:] if text.startswith("+") else text


def table_text(G: Optional[G2Structure] = None) -> str:
    """Cross table of E = <e1, e2, e3> on V = <e4..e7> and the J tables for u = e2, v = e3."""
    G = G2Structure.model() if G is None else G
    e = np.eye(7)
    lines = ["x  | " + " | ".join(f"{'e%d' % c:>4}" for c in range(4, 8))]
    for r in range(1, 4):
        row = [_vec_name(cross(G, e[r - 1], e[c - 1])) for c in range(4, 8)]
        lines.append(f"e{r} | " + " | ".join(f"{x:>4}" for x in row))
    S = frames.split(e[1], e[2], G, e[3])
    for name, xi in (("J1", S.e3), ("J2", S.u), ("J3", S.v)):
        maps = [f"e{c} -> {_vec_name(frames.J_xi(xi, e[c - 1], G))}" for c in range(4, 8)]
        lines.append(f"{name}: " + ", ".join(maps))
    return "\n".join(lines) + "\n"


def cmd_table(cfg: RunConfig) -> int:
    G = G2Structure.model()
    text = table_text(G)
    _write_text(text, cfg.out)
    e = np.eye(7)
    ok = all(np.array_equal(cross(G, e[a - 1], e[b - 1]), s * e[c - 1]) for (a, b), (c, s) in CROSS_TABLE.items())
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kernel(cfg: RunConfig) -> int:
    S = fields.standard_splitting()
    if cfg.twist:
        a = np.zeros((cfg.n,) * 3 + (3,))
        a[..., 0] = cfg.twist
        res = fields.kernel_dim(lambda x: fields.dirac_form_twist(x, a, S), cfg.n, cfg.tol, symmetric=False)
        values = np.sort(res.values)
    else:
        res = fields.kernel_dim(lambda x: fields.dirac(x, S), cfg.n, cfg.tol)
        values = np.sort(res.values)
    if cfg.out:
        _write_text(_csv_text(["index", "lambda"], enumerate(values)), cfg.out)
    smallest = " ".join(f"{v:.6e}" for v in res.smallest)
    print(f"kernel_dim={res.dim} n={cfg.n} twist={cfg.twist:g} smallest=[{smallest}]")
    return EXIT_OK


def cmd_flow(cfg: RunConfig) -> int:
    G = G2Structure.model()
    d0 = fields.perturbed_inclusion(cfg.n, cfg.eps)
    res = fields.chi_flow(d0, cfg.dt, cfg.steps, G)
    rows = [(k, df.L2, df.max, df.calib_min) for k, df in enumerate(res.defects)]
    _write_text(_csv_text(["step", "defect_L2", "defect_max", "calib_min"], rows), cfg.out)
    first, last = res.defects[0], res.defects[-1]
    print(f"status={res.status} steps={len(res.defects) - 1} defect_L2 {first.L2:.6e} -> {last.L2:.6e}",
          file=sys.stderr)
    if res.status != "ok":
        log.error("flow stopped: %s", res.error)
        return EXIT_FAIL
    return EXIT_OK


def random_sw_start(n: int, eps: float, seed: int):
    rng = np.random.default_rng(seed)
    x = eps * (rng.standard_normal((n, n, n, 2)) + 1j * rng.standard_normal((n, n, n, 2)))
    A = eps * rng.standard_normal((3, n, n, n))
    return x, A


def cmd_sw(cfg: RunConfig) -> int:
    S = fields.standard_splitting()
    x0, A0 = random_sw_start(cfg.n, cfg.eps, cfg.seed)
    res = fields.sw_descent(x0, A0, S, steps=cfg.steps)
    _write_text(_csv_text(["step", "residual_norm"], enumerate(res.norms)), cfg.out)
    print(f"status={res.status} residual {res.norms[0]:.6e} -> {res.norms[-1]:.6e}", file=sys.stderr)
    return EXIT_FAIL if res.status == "line_search_failed" else EXIT_OK


def random_deformation_target(rng: np.random.Generator, G: G2Structure, q_max: float):
    """Random orthonormal (u, v) and unit w orthogonal to both with |q| <= q_max."""
    S = frames.split(*rng.standard_normal((2, 7)), G)
    # |q| = sqrt(1 - c^2) / 2 for c = <w, u x v>
    c_min = np.sqrt(1.0 - 4.0 * q_max ** 2)
    c = rng.uniform(c_min, 1.0) * rng.choice([-1.0, 1.0])
    n = rng.standard_normal(4)
    w = c * S.e3 + np.sqrt(1.0 - c * c) * S.from_v(n / np.linalg.norm(n))
    return S, w


def deform_trials(trials: int, seed: int, q_max: float = 0.45):
    G = G2Structure.model()
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(trials):
        S, w = random_deformation_target(rng, G, q_max)
        q = frames.deformation_target_q(G, S.u, S.v, w)
        lam = frames.solve_alpha_for_w(G, S.u, S.v, w)
        err = float(np.abs(frames.cross_lambda(G, S.u, S.v, lam) - w).max())
        eig = float(np.linalg.eigvalsh(frames.deformed_structure(G, lam).g).min())
        rows.append((k, lam.a, float(np.linalg.norm(lam.alpha)), float(np.linalg.norm(q)), err, eig))
    return rows


def cmd_deform(cfg: RunConfig) -> int:
    rows = deform_trials(cfg.trials, cfg.seed, cfg.q_max)
    _write_text(_csv_text(["trial", "a", "alpha_norm", "q_norm", "roundtrip_error", "min_metric_eig"], rows), cfg.out)
    worst = max((r[4] for r in rows), default=0.0)
    pd = all(r[5] > 0 for r in rows)
    print(f"trials={len(rows)} max_roundtrip_error={worst:.3e} metrics_positive={pd}", file=sys.stderr)
    return EXIT_OK if worst < frames.ROUNDTRIP_TOL and pd else EXIT_FAIL


COMMANDS = {
    "identities": cmd_identities,
    "table": cmd_table,
    "kernel": cmd_kernel,
    "flow": cmd_flow,
    "sw": cmd_sw,
    "deform": cmd_deform,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="g2deform", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--n", type=int, default=None, help="grid size per axis (even, >= 4)")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--eps", type=float, default=None, help="perturbation amplitude")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default=None, help="output file (stdout if omitted)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--twist", type=float, default=0.0, help="constant 1-form twist c e^1 for kernel")
    p.add_argument("--q-max", dest="q_max", type=float, default=0.45)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_DEFAULT_N = {"flow": 16}
_DEFAULT_EPS = {"flow": 0.01, "sw": 0.1}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = vars(args)
    opts.pop("verbose")
    if opts["n"] is None:
        opts["n"] = _DEFAULT_N.get(args.command, 8)
    if opts["eps"] is None:
        opts["eps"] = _DEFAULT_EPS.get(args.command, 0.01)
    try:
        cfg = RunConfig(**opts).validate()
    except ConfigError as exc:
        print(f"g2deform: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.command](cfg)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"g2deform: {cfg.command} failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

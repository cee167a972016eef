"""Command-line front end: ``inls-lab <subcommand> [flags]``.

Subcommands: exponents, simulate, norms, split, global-run, corpus, replay.
Every run that writes files also writes ``manifest.json`` recording the
effective configuration and sha256 checksums of its outputs; ``replay``
re-executes a manifest and compares checksums.

Configuration precedence is flags, then ``--config`` JSON, then defaults.
Exit codes: 0 ok, 2 hypothesis violation, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import corpus, default_grid, entries, random_corpus
from .exponents import Constants, HypothesisError, ProblemParams, derive_all
from .grid import SpectralField, dump_field, load_field, lp_norm, make_grid
from .highlow import WindowConditionError, global_run, split, sum_space_norm
from .modspace import ModulationParams, WindowFamily, mod_norm, stft_norm
from .solver import (NonContractionError, PicardOptions, SolverConfig, picard_solve,
                     splitstep_solve)

EXIT_OK, EXIT_HYPOTHESIS, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


class BlowupError(RuntimeError):
    pass


DEFAULTS = {
    "n": 1, "alpha": 1.0, "b": 0.1, "mu": 1, "p": None, "N": None,
    "m": None, "L": None, "dt": 1e-3, "T": 1.0, "method": "splitstep",
    "substeps": 64, "max_iters": 60, "tol": 1e-12, "weight_mode": "average",
    "blowup_threshold": 1e3, "save_every": 1, "init": "corpus:gauss0", "amplitude": 1.0,
    "dump_times": [], "horizon": None, "escalate": False,
    "ps": [2.0], "qs": [2.0], "s": 0.0, "ids": None, "version": "1",
    "seed": 0, "random": 0, "stft_stride": 1, "block_width": 2 * math.pi,
    "C_local": 1.0, "C_ball": 1.0, "C_window": 1.0, "C_split": 1.0,
    "out": None, "table": False,
}


# --------------------------------------------------------------------- parsing

def _add(p, *names, **kw):
    p.add_argument(*names, default=argparse.SUPPRESS, **kw)


def _problem_flags(p):
    _add(p, "--n", type=int)
    _add(p, "--alpha", type=float)
    _add(p, "--b", type=float)
    _add(p, "--mu", type=int, choices=(1, -1))
    _add(p, "--p", type=float)
    _add(p, "--N", type=float)
    for c in ("local", "ball", "window", "split"):
        _add(p, f"--C-{c}", dest=f"C_{c}", type=float)


def _grid_flags(p):
    _add(p, "--m", type=int)
    _add(p, "--L", type=float)


def _solver_flags(p):
    _add(p, "--dt", type=float)
    _add(p, "--T", type=float)
    _add(p, "--substeps", type=int)
    _add(p, "--max-iters", dest="max_iters", type=int)
    _add(p, "--tol", type=float)
    _add(p, "--weight-mode", dest="weight_mode", choices=("average", "cap", "unit", "zero"))
    _add(p, "--blowup-threshold", dest="blowup_threshold", type=float)
    _add(p, "--save-every", dest="save_every", type=int)
    _add(p, "--init", help="corpus:<id> or a field dump path")
    _add(p, "--amplitude", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="inls-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        _add(p, "--config", help="JSON file of defaults")
        _add(p, "--out", help="output directory (file for exponents)")
        return p

    p = cmd("exponents", "print the exponent report")
    _problem_flags(p)
    _add(p, "--table", action="store_true")

    p = cmd("simulate", "solve INLS from initial data")
    _problem_flags(p)
    _grid_flags(p)
    _solver_flags(p)
    _add(p, "--method", choices=("splitstep", "picard"))
    _add(p, "--dump-times", dest="dump_times", type=float, nargs="*")

    p = cmd("norms", "modulation, STFT and Lebesgue norms over the corpus")
    _add(p, "--n", type=int)
    _grid_flags(p)
    _add(p, "--p", dest="ps", type=float, nargs="+")
    _add(p, "--q", dest="qs", type=float, nargs="+")
    _add(p, "--s", type=float)
    _add(p, "--ids", nargs="+")
    _add(p, "--corpus-version", dest="version")
    _add(p, "--stft-stride", dest="stft_stride", type=int)
    _add(p, "--block-width", dest="block_width", type=float)

    p = cmd("split", "high-low split of initial data")
    _problem_flags(p)
    _grid_flags(p)
    _add(p, "--init")
    _add(p, "--amplitude", type=float)

    p = cmd("global-run", "windowed high-low global iteration")
    _problem_flags(p)
    _grid_flags(p)
    _solver_flags(p)
    _add(p, "--horizon", type=float)
    _add(p, "--escalate", action="store_true")

    p = cmd("corpus", "write the test-function corpus as field dumps")
    _add(p, "--n", type=int)
    _grid_flags(p)
    _add(p, "--corpus-version", dest="version")
    _add(p, "--seed", type=int)
    _add(p, "--random", type=int, help="extra seeded random members")

    p = sub.add_parser("replay", help="re-run a manifest and compare checksums")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    return ap


def effective_config(ns: argparse.Namespace) -> dict:
    given = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    cfg = dict(DEFAULTS)
    if hasattr(ns, "config"):
        with open(ns.config) as fh:
            cfg.update({k.replace("-", "_"): v for k, v in json.load(fh).items()})
    cfg.update(given)
    cfg["command"] = ns.command
    return cfg


# ------------------------------------------------------------------- helpers

class Outputs:
    """Tracks written files so a failed run can remove them."""

    def __init__(self, root: str | None, default: str):
        self.root = Path(root or default)
        self.created_root = not self.root.exists()
        self.files: list[Path] = []

    def path(self, name: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        p = self.root / name
        self.files.append(p)
        return p

    def cleanup(self):
        for f in self.files:
            if f.exists():
                f.unlink()
        if self.created_root and self.root.exists() and not any(self.root.iterdir()):
            self.root.rmdir()

    def checksums(self) -> dict:
        return {f.name: hashlib.sha256(f.read_bytes()).hexdigest() for f in self.files}


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for r in rows:
            wr.writerow([_fmt(r[c]) for c in columns])


def _params(cfg: dict) -> ProblemParams:
    return ProblemParams(int(cfg["n"]), float(cfg["alpha"]), float(cfg["b"]), int(cfg["mu"]),
                         cfg["p"], cfg["N"])


def _constants(cfg: dict) -> Constants:
    return Constants(cfg["C_local"], cfg["C_ball"], cfg["C_window"], cfg["C_split"])


def _grid(cfg: dict):
    g = default_grid(int(cfg["n"]))
    return make_grid(g.n, cfg["m"] or g.m, cfg["L"] or g.L)


def _initial(cfg: dict, grid) -> SpectralField:
    spec = cfg["init"]
    if spec.startswith("corpus:"):
        cid = spec.split(":", 1)[1]
        for e in entries(cfg["version"]):
            if e.id == cid:
                from .corpus import build
                f = build(e, grid)
                break
        else:
            raise ValueError(f"no corpus member {cid!r}")
    else:
        f = load_field(spec)
        if f.grid != grid:
            raise ValueError(f"field grid {f.grid} differs from run grid {grid}")
    return f * float(cfg["amplitude"])


def _solver_config(cfg: dict, params: ProblemParams, grid) -> SolverConfig:
    return SolverConfig(params, grid, float(cfg["dt"]), float(cfg["T"]),
                        PicardOptions(int(cfg["max_iters"]), float(cfg["tol"]), int(cfg["substeps"])),
                        blowup_threshold=float(cfg["blowup_threshold"]),
                        weight_mode=cfg["weight_mode"], save_every=int(cfg["save_every"]),
                        constants=_constants(cfg))


def _preamble(params: ProblemParams, cfg: dict) -> None:
    rep = derive_all(params.replace(N=None) if params.p is None else params, constants=_constants(cfg))
    print(rep.table(), file=sys.stderr)
    print("# |x|^-b origin regularization: " + cfg.get("weight_mode", "average"), file=sys.stderr)


# --------------------------------------------------------------- subcommands

def cmd_exponents(cfg: dict, out: Outputs | None):
    params = _params(cfg)
    rep = derive_all(params, constants=_constants(cfg))
    text = json.dumps(rep.to_dict(), indent=2, sort_keys=True)
    if cfg["out"]:
        p = Path(cfg["out"])
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text + "\n")
    else:
        print(text)
    if cfg["table"]:
        print(rep.table())


def cmd_simulate(cfg: dict, out: Outputs):
    params = _params(cfg)
    _preamble(params, cfg)
    grid = _grid(cfg)
    u0 = _initial(cfg, grid)
    sc = _solver_config(cfg, params, grid)
    if cfg["method"] == "picard":
        traj, hist = picard_solve(u0, sc)
        write_csv(out.path("contraction.csv"), ("iter", "diff", "ratio"),
                  [dict(h, ratio=h["ratio"] if h["ratio"] is not None else float("nan"))
                   for h in hist])
    else:
        traj = splitstep_solve(u0, sc)
        if traj.blowup:
            raise BlowupError(f"blow-up flag raised at t = {traj.blowup_time:.6g}")
    led = traj.ledger
    r = params.alpha + 2
    m0 = led["mass"][0]
    rows = []
    for i, t in enumerate(traj.times):
        rows.append({"t": t, "mass": led["mass"][i],
                     "mass_drift": abs(led["mass"][i] - m0) / m0 if m0 else 0.0,
                     "energy": led["energy"][i], "lr_norm": led[f"l{r:g}"][i]})
    write_csv(out.path("ledger.csv"), ("t", "mass", "mass_drift", "energy", "lr_norm"), rows)
    for t in cfg["dump_times"] or []:
        i = int(np.argmin(np.abs(traj.times - t)))
        dump_field(traj.field(i), out.path(f"field_t{traj.times[i]:.6g}.bin"))


def cmd_norms(cfg: dict, out: Outputs):
    grid = _grid(cfg)
    w = WindowFamily(grid, cfg["block_width"])
    members = corpus(grid, cfg["version"])
    if cfg["ids"]:
        members = [(i, f) for i, f in members if i in set(cfg["ids"])]
    rows = []
    for fid, f in members:
        for p in cfg["ps"]:
            for q in cfg["qs"]:
                mp = ModulationParams(p, q, cfg["s"])
                rows.append({"function_id": fid, "p": p, "q": q, "s": cfg["s"],
                             "mod_norm": mod_norm(f, mp, w),
                             "stft_norm": stft_norm(f, mp, stride=cfg["stft_stride"]),
                             "lp_norm": lp_norm(f, p)})
    write_csv(out.path("norms.csv"),
              ("function_id", "p", "q", "s", "mod_norm", "stft_norm", "lp_norm"), rows)


def cmd_split(cfg: dict, out: Outputs):
    params = _params(cfg)
    if params.N is None:
        raise HypothesisError(["split parameter N is required"])
    grid = _grid(cfg)
    u = _initial(cfg, grid)
    w = WindowFamily(grid)
    res = split(u, params.N, params, w, cfg["C_split"])
    row = res.summary()
    row["sum_space_norm"] = sum_space_norm(u, params, w)
    write_csv(out.path("split.csv"), tuple(row), [row])
    dump_field(res.phi, out.path("phi.bin"))
    dump_field(res.psi, out.path("psi.bin"))


def cmd_global_run(cfg: dict, out: Outputs):
    params = _params(cfg)
    if params.p is None or params.N is None:
        raise HypothesisError(["global-run needs both p and N"])
    _preamble(params, cfg)
    grid = _grid(cfg)
    u0 = _initial(cfg, grid)
    sc = _solver_config(cfg, params, grid)
    horizon = cfg["horizon"]
    if horizon is None:
        horizon = derive_all(params, constants=_constants(cfg)).T_N
    traj, led = global_run(u0, params.N, float(horizon), sc, escalate=bool(cfg["escalate"]))
    write_csv(out.path("windows.csv"), led.columns, led.rows)
    meta = {"N": led.N, "T": led.T, "beta": led.beta, "split": led.split, "events": led.events}
    out.path("run.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=_fmt) + "\n")
    dump_field(traj.final, out.path("final.bin"))


def cmd_corpus(cfg: dict, out: Outputs):
    grid = _grid(cfg)
    members = corpus(grid, cfg["version"])
    if cfg["random"]:
        members += random_corpus(grid, int(cfg["random"]), int(cfg["seed"]))
    rows = []
    for fid, f in members:
        name = f"{fid}.bin"
        dump_field(f, out.path(name))
        rows.append({"function_id": fid, "file": name, "l2": lp_norm(f, 2), "linf": lp_norm(f, math.inf)})
    write_csv(out.path("index.csv"), ("function_id", "file", "l2", "linf"), rows)


COMMANDS = {
    "exponents": cmd_exponents,
    "simulate": cmd_simulate,
    "norms": cmd_norms,
    "split": cmd_split,
    "global-run": cmd_global_run,
    "corpus": cmd_corpus,
}


def execute(cfg: dict) -> int:
    """Run one subcommand from an effective configuration dict."""
    command = cfg["command"]
    out = None if command == "exponents" else Outputs(cfg["out"], f"runs/{command}")
    t0 = time.perf_counter()
    try:
        COMMANDS[command](cfg, out)
        if out is not None:
            manifest = {
                "subcommand": command,
                "params": {k: v for k, v in cfg.items() if k != "out"},
                "seed": cfg["seed"],
                "version": __version__,
                "inputs": [cfg["init"]] if command in ("simulate", "split", "global-run") else [],
                "outputs": out.checksums(),
                "output_dir": str(out.root),
                "wall_clock_s": time.perf_counter() - t0,
            }
            (out.root / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    except (HypothesisError, WindowConditionError) as exc:
        _fail(out, exc)
        return EXIT_HYPOTHESIS
    except (NonContractionError, BlowupError, FloatingPointError) as exc:
        _fail(out, exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        _fail(out, exc)
        return EXIT_IO


def _fail(out: Outputs | None, exc: Exception) -> None:
    if out is not None:
        out.cleanup()
    diags = getattr(exc, "diagnostics", None) or [str(exc)]
    for d in diags:
        print(f"error: {d}", file=sys.stderr)


def replay(manifest_path: str, out_dir: str | None = None) -> int:
    man = json.loads(Path(manifest_path).read_text())
    cfg = dict(DEFAULTS)
    cfg.update(man["params"])
    cfg["out"] = out_dir or man["output_dir"] + "_replay"
    code = execute(cfg)
    if code:
        return code
    new = json.loads((Path(cfg["out"]) / "manifest.json").read_text())["outputs"]
    ok = True
    for name, digest in sorted(man["outputs"].items()):
        same = new.get(name) == digest
        ok &= same
        print(f"{'match   ' if same else 'MISMATCH'} {name}")
    return EXIT_OK if ok else 1


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.command == "replay":
        try:
            return replay(ns.manifest, ns.out)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    try:
        cfg = effective_config(ns)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return execute(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())

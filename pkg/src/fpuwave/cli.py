"""Command-line front end: ``fpuwave {base,solve,sweep,kinetics,simulate,verify}``."""
import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .basewave import build_causal_wave, extend_family
from .chainsim import validate
from .corrector import SolveConfig, random_start, solve_with_shift
from .errors import ValidationError, WaveError
from .kinetics import kinetic_report
from .potentials import parse_potential, sign_family
from .spectral import find_kc

DEFAULTS = {
    "c": 0.95,
    "delta": 0.02,
    "alpha": 0.0,
    "beta": 0.0,
    "potential": "cubic",
    "L": 80.0,
    "h": 1 / 256,
    "tol": 1e-10,
    "out": "out",
    "threads": 1,
    "seed": None,
    "deltas": "0.04,0.02,0.01,0.005",
    "N": 400,
    "T": 40.0,
    "dt": 0.01,
    "svg": False,
    "table": None,
}

COMMANDS = ("base", "solve", "sweep", "kinetics", "simulate", "verify")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--potential", help="cubic | biased:<eps> | file:<path>")
    common.add_argument("--L", type=float)
    common.add_argument("--h", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--out")
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="JSON file with default values")
    p = argparse.ArgumentParser(prog="fpuwave", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sweep":
            sp.add_argument("--deltas", help="comma separated list")
            sp.add_argument("--svg", action="store_true", default=None)
        if name == "kinetics":
            sp.add_argument("--table", help="append a row to this table")
        if name == "simulate":
            sp.add_argument("--N", type=int)
            sp.add_argument("--T", type=float)
            sp.add_argument("--dt", type=float)
    return p


def resolve_config(args):
    """Flags override the config file, which overrides the defaults."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            cfg.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
    for k, v in vars(args).items():
        if v is not None and k != "config":
            cfg[k] = v
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    find_kc(cfg["c"])
    if cfg["delta"] < 0:
        raise ValidationError("delta must be non-negative")
    if cfg["tol"] <= 0:
        raise ValidationError("tol must be positive")
    if cfg["threads"] < 1:
        raise ValidationError("threads must be at least 1")
    parse_potential(cfg["potential"], cfg["delta"]) if cfg["delta"] > 0 else None


def _provenance(cfg):
    keys = ("command", "c", "delta", "alpha", "beta", "potential", "L", "h", "tol", "seed")
    return {k: cfg.get(k) for k in keys}


def make_base(cfg):
    ctx = find_kc(cfg["c"])
    base = build_causal_wave(ctx, cfg["L"], cfg["h"])
    return extend_family(base, cfg["alpha"], cfg["beta"])


def make_solution(cfg, base=None, seed=None):
    base = base or make_base(cfg)
    P = parse_potential(cfg["potential"], cfg["delta"])
    scfg = SolveConfig(tol=cfg["tol"])
    if seed is not None and cfg["delta"] > 0:
        scfg = replace(scfg, S0=random_start(seed, cfg["delta"]))
    log = []
    sol = solve_with_shift(base, P, scfg, log=log.append)
    return base, P, sol, log


def cmd_base(cfg, out):
    base = make_base(cfg)
    io.write_profile(out / "base_profile.csv", base.R0, c=cfg["c"])
    io.write_json(out / "base_meta.json", {"config": _provenance(cfg), **base.metadata()})
    print(f"base wave c={cfg['c']}: residual {base.residual:.3e}, mu0 {base.mu0:.10g}")
    return 0


def cmd_solve(cfg, out):
    base, P, sol, log = make_solution(cfg, seed=cfg["seed"])
    io.write_profile(out / "wave_profile.csv", sol.R, c=cfg["c"], delta=cfg["delta"])
    io.write_profile(out / "corrector_profile.csv", sol.S, c=cfg["c"], delta=cfg["delta"])
    meta = {"config": _provenance(cfg), "potential": P.name, "shift": sol.I_delta,
            "C_psi": P.C_psi, **sol.metadata(), "increments": sol.history}
    io.write_json(out / "solve_meta.json", meta)
    (out / "iterations.log").write_text("\n".join(log) + ("\n" if log else ""))
    print(f"solved c={cfg['c']} delta={cfg['delta']}: {sol.iterations} iterations, "
          f"|S|={sol.norms[0]:.4e}, residual {sol.residual:.3e}")
    return 0


def _sweep_point(args):
    cfg, delta = args
    cfg = dict(cfg, delta=delta)
    base, P, sol, _ = make_solution(cfg)
    rep = kinetic_report(sol.R, base.ctx, P, base.R0, sign_family())
    return delta, [sol.norms[0], sol.norms[1], sol.norms[2], abs(rep.upsilon - rep.upsilon_0)]


def slopes(deltas, rows):
    """Least-squares log-log slope of every column against ``delta``."""
    ld = np.log(np.asarray(deltas, float))
    out = []
    for col in np.asarray(rows, float).T:
        ok = col > 0
        out.append(float(np.polyfit(ld[ok], np.log(col[ok]), 1)[0]) if ok.sum() >= 2
                   else float("nan"))
    return out


def cmd_sweep(cfg, out):
    deltas = sorted({float(d) for d in str(cfg["deltas"]).split(",") if d.strip()},
                    reverse=True)
    if len(deltas) < 2 or min(deltas) <= 0:
        raise ValidationError("a sweep needs at least two positive deltas")
    jobs = [(cfg, d) for d in deltas]
    if cfg["threads"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["threads"]) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    results.sort(key=lambda r: -r[0])
    for d, row in results:
        io.write_json(out / "points" / f"delta_{d:.6g}.json",
                      dict(zip(("delta", "normS", "normS1", "normS2", "upsilon"), [d, *row])))
    cols = ["delta", "normS", "normS1", "normS2", "upsilon"]
    rows = [[d, *row] for d, row in results]
    sl = slopes([r[0] for r in rows], [r[1:] for r in rows])
    io.write_table(out / "sweep_table.csv", cols, rows + [["slope", *sl]])
    for i, name in enumerate(cols[1:], start=1):
        io.write_series(out / f"series_{name}.csv", [r[0] for r in rows], [r[i] for r in rows],
                        ("delta", name))
    if cfg["svg"]:
        io.render_svg(out / "sweep.svg",
                      [(n, [r[0] for r in rows], [r[i] for r in rows])
                       for i, n in enumerate(cols[1:], start=1)],
                      title=f"c = {cfg['c']}", xlabel="log10 delta", ylabel="log10 norm",
                      loglog=True)
    print("slopes " + " ".join(f"{n}={s:.3f}" for n, s in zip(cols[1:], sl)))
    return 0


def cmd_kinetics(cfg, out):
    base, P, sol, _ = make_solution(cfg)
    rep = kinetic_report(sol.R, base.ctx, P, base.R0, sign_family())
    data = {"config": _provenance(cfg), **rep.as_dict()}
    io.write_json(out / "kinetics.json", data)
    for k, v in rep.as_dict().items():
        print(f"{k} = {v:.17g}")
    if cfg["table"]:
        cols = ["c", "delta", "r_bar_plus", "r_bar_minus", "upsilon", "upsilon_0"]
        io.write_table(cfg["table"], cols, [[cfg["c"], cfg["delta"], rep.r_bar_plus,
                                             rep.r_bar_minus, rep.upsilon, rep.upsilon_0]],
                       mode="a")
    return 0


def cmd_simulate(cfg, out):
    base, P, sol, _ = make_solution(cfg)
    rep = validate(sol.R_field, cfg["c"], sol.mu, P, N=cfg["N"], T=cfg["T"], dt=cfg["dt"],
                   domain=0.5 * _spectral_extent(cfg), r_max=float(np.max(np.abs(sol.R.values))))
    io.write_json(out / "simulate_meta.json", {
        "config": _provenance(cfg), "N": cfg["N"], "T": cfg["T"], "dt": cfg["dt"],
        "speed": rep.speed, "speed_error": rep.speed_error,
        "profile_error": rep.profile_error})
    io.write_series(out / "interface.csv", rep.times, rep.positions, ("t", "position"))
    print(f"speed {rep.speed:.6f} (rel. error {rep.speed_error:.2e}), "
          f"profile error {rep.profile_error:.2e}")
    return 0 if rep.speed_error <= 0.02 and rep.profile_error <= 0.05 else 3


def _spectral_extent(cfg):
    from .minv import fft_size

    n = 2 * round(cfg["L"] / cfg["h"]) + 1
    return fft_size(n) * cfg["h"] - 8.0


def cmd_verify(cfg, out):
    base, P, sol, _ = make_solution(cfg)
    seed = cfg["seed"] if cfg["seed"] is not None else 0
    _, _, sol2, _ = make_solution(cfg, base=base, seed=seed)
    gap = float(np.max(np.abs(sol.S.values - sol2.S.values)))
    ok = base.residual <= 1e-5 and sol.residual <= 1e-5 and gap <= 10 * cfg["tol"]
    data = {"config": _provenance(cfg), "base_residual": base.residual,
            "wave_residual": sol.residual, "uniqueness_gap": gap, "passed": ok}
    io.write_json(out / "verify.json", data)
    print(f"base residual {base.residual:.2e}, wave residual {sol.residual:.2e}, "
          f"random-start gap {gap:.2e} -> {'ok' if ok else 'FAILED'}")
    return 0 if ok else 3


HANDLERS = {"base": cmd_base, "solve": cmd_solve, "sweep": cmd_sweep,
            "kinetics": cmd_kinetics, "simulate": cmd_simulate, "verify": cmd_verify}


def digest(directory):
    """SHA-256 of every file below ``directory`` (sorted by path)."""
    h = hashlib.sha256()
    for p in sorted(Path(directory).rglob("*")):
        if p.is_file():
            h.update(str(p.relative_to(directory)).encode())
            h.update(p.read_bytes())
    return h.hexdigest()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[cfg["command"]](cfg, out)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except WaveError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every subcommand reads an optional JSON config (``--config``) with a
``problem`` section and one section per subcommand; flags override file
values.  Tables are written as CSV with 15 significant digits.

Invalid input exits with status 1; a numerical failure exits with 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle, spectrum, twostate
from .closedform import DenominatorZero
from .potential import REFERENCE_PRESET, DomainError, PhysicalParams, potential_value
from .specfun import NoConvergence, SpecfunError, hermite_nu, kummer_1f1

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

NUMERIC_ERRORS = (
    spectrum.RootNotFound,
    spectrum.NormalizationError,
    oracle.NotConverged,
    twostate.StepFailure,
    twostate.BlowUp,
    twostate.NoPhysicalRoot,
    NoConvergence,
    DenominatorZero,
)

DEFAULTS = {
    "potential": {"x_min": 0.05, "x_max": 6.0, "n_points": 200},
    "spectrum": {"levels": 5, "verify": False},
    "wavefunctions": {"levels": 3, "n_points": 4001},
    "twostate": {"tol": 1e-10, "lambdas": {"start": 10.0, "stop": 400.0, "num": 12}},
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: PhysicalParams = field(default_factory=PhysicalParams)
    sections: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        merged = json.loads(json.dumps(DEFAULTS.get(name, {})))
        merged.update(self.sections.get(name, {}))
        return merged

    def to_dict(self) -> dict:
        return {"problem": self.problem.to_dict(), **self.sections}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        prob = d.pop("problem", {})
        if not isinstance(prob, dict):
            raise UsageError("'problem' must be an object")
        unknown = set(prob) - {"m", "hbar", "v0", "v1"}
        if unknown:
            raise UsageError(f"unknown problem keys: {sorted(unknown)}")
        return cls(problem=PhysicalParams.from_dict(prob), sections=d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.15g}"


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def thread_cap() -> int:
    raw = os.environ.get("HEUNWELL_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"HEUNWELL_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("HEUNWELL_THREADS must be at least 1")
    return n


# commands whose --out names a directory of CSV files
DIRECTORY_OUTPUT = {"wavefunctions", "twostate"}


def _emit(tables: dict[str, str], out: str | None, as_directory: bool):
    """Write tables to stdout, to the file ``out``, or into the directory ``out``."""
    if out is None:
        sys.stdout.write("\n".join(tables.values()))
        return
    path = Path(out)
    if not as_directory:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(next(iter(tables.values())), newline="")
        return
    path.mkdir(parents=True, exist_ok=True)
    for name, text in tables.items():
        (path / f"{name}.csv").write_text(text, newline="")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_potential(cfg: RunConfig, args) -> dict[str, str]:
    s = cfg.section("potential")
    n = int(s["n_points"])
    lo, hi = float(s["x_min"]), float(s["x_max"])
    if n < 2 or not 0 < lo < hi:
        raise UsageError("need n_points >= 2 and 0 < x_min < x_max")
    x = np.linspace(lo, hi, n)
    base = PhysicalParams(m=cfg.problem.m, hbar=cfg.problem.hbar, v0=cfg.problem.v0, v1=0.0)
    v, vb = potential_value(cfg.problem, x), potential_value(base, x)
    return {"potential": render_csv(["x", "V", "V_v1_zero"], zip(x, v, vb))}


def _levels(s) -> int:
    n = int(s["levels"])
    if n < 1:
        raise UsageError("--levels must be at least 1")
    return n


def cmd_spectrum(cfg: RunConfig, args) -> dict[str, str]:
    s = cfg.section("spectrum")
    n = _levels(s)
    cfg.problem.require_bound()
    levels = spectrum.solve_levels_parallel(cfg.problem, n, workers=min(thread_cap(), n))
    header = ["n", "a_exact", "e_exact", "e_approx14", "rel_err_approx14", "e_semiclassical",
              "rel_err_semiclassical", "a_transcendental_b0", "a_transcendental_b0_fifth"]
    rows = [[l.n, l.a_exact, l.e_exact, l.e_approx14, l.rel_err_approx14, l.e_semiclassical,
             l.rel_err_semiclassical, spectrum.solve_transcendental(l.n, spectrum.B0_EXACT),
             spectrum.solve_transcendental(l.n, spectrum.B0_ROUNDED)] for l in levels]
    if s.get("verify"):
        ref = oracle.numerov_eigenvalues(cfg.problem, n_max=n)
        header += ["e_oracle", "abs_diff", "rel_diff"]
        for r, e in zip(rows, ref):
            r += [e, abs(r[2] - e), abs(r[2] - e) / abs(e)]
    return {"spectrum": render_csv(header, rows)}


def cmd_wavefunctions(cfg: RunConfig, args) -> dict[str, str]:
    s = cfg.section("wavefunctions")
    n = _levels(s)
    npts = int(s["n_points"])
    if npts < 3:
        raise UsageError("wavefunction grid needs at least 3 points")
    cfg.problem.require_bound()
    levels = spectrum.solve_levels_exact(cfg.problem, n)
    if "x_max" in s:
        x_max = float(s["x_max"])
        if not x_max > 0:
            raise UsageError("x_max must be positive")
        grid = np.linspace(x_max / npts, x_max, npts)
    else:
        grid = spectrum.default_grid(cfg.problem, levels[-1].e_exact, n_points=npts)
    tables = [spectrum.bound_state_wavefunction(cfg.problem, lv, grid) for lv in levels]
    psi = render_csv(["x"] + [f"psi_{lv.n}" for lv in levels],
                     zip(grid, *[t.psi for t in tables]))
    summary = []
    for lv, t in zip(levels, tables):
        norm, _ = spectrum._norm_integral(t.x, t.psi**2)
        summary.append([lv.n, lv.e_exact, norm, spectrum.count_nodes(t.psi), t.tail_fraction])
    return {
        "wavefunctions": psi,
        "normalization": render_csv(["n", "energy", "norm", "nodes", "tail_fraction"], summary),
    }


def _pulse(s) -> twostate.PulseConfig:
    desc = s.get("pulse")
    if not isinstance(desc, dict):
        raise UsageError("twostate needs a pulse description (config 'twostate.pulse' or --u0)")
    shape = desc.get("shape", "sech")
    u0 = float(desc.get("u0", 1.0))
    if not u0 > 0:
        raise UsageError("pulse u0 must be positive")
    if shape == "sech":
        span = tuple(desc.get("t_span", (-20.0, 20.0)))
        return twostate.PulseConfig(u0=u0, delta0=float(desc.get("delta0", 40.0)), t_span=span)
    if shape == "constant":
        span = tuple(desc.get("t_span", (0.0, 10.0)))
        return twostate.PulseConfig.constant(u0, float(desc.get("delta0", 0.0)), span)
    raise UsageError(f"unknown pulse shape {shape!r}")


def cmd_twostate(cfg: RunConfig, args) -> dict[str, str]:
    s = cfg.section("twostate")
    pulse = _pulse(s)
    tol = float(s["tol"])
    if not twostate.TOL_RANGE[0] <= tol <= twostate.TOL_RANGE[1]:
        raise UsageError(f"tol must lie in {twostate.TOL_RANGE}")
    n_samples = s.get("n_samples")
    traj = twostate.simulate_nonlinear(pulse, tol=tol, n_samples=int(n_samples) if n_samples else None)
    out = {
        "trajectory": render_csv(
            ["t", "re_a1", "im_a1", "re_a2", "im_a2", "p", "norm_drift"],
            zip(traj.t, traj.a1.real, traj.a1.imag, traj.a2.real, traj.a2.imag, traj.p, traj.norm_drift),
        )
    }
    lam = s.get("lambdas")
    if lam and pulse.name == "sech":
        lambdas = np.linspace(float(lam["start"]), float(lam["stop"]), int(lam["num"]))
        if lambdas.size < 2 or lambdas[0] <= 0:
            raise UsageError("lambda sweep needs at least 2 positive values")
        rows = twostate.sweep_lambda(pulse, lambdas, tol=tol, workers=thread_cap())
        a0 = twostate.fit_a0(rows)
        twostate.complete_sweep(rows, a0)
        out["sweep"] = render_csv(
            ["lambda", "p_inf_numeric", "p_inf_cubic", "p_inf_asymptotic", "p_l_inf", "a0_fit"],
            [[r.lam, r.p_inf, r.p_cubic, r.p_asymptotic, r.pl_inf, a0] for r in rows],
        )
    return out


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def cmd_specfun(cfg: RunConfig, args) -> dict[str, str]:
    if args.function == "hermite":
        if args.nu is None:
            raise UsageError("hermite needs --nu")
        r = hermite_nu(_complex(args.nu), _complex(args.z))
    else:
        if args.a is None or args.b is None:
            raise UsageError("kummer needs --a and --b")
        r = kummer_1f1(_complex(args.a), _complex(args.b), _complex(args.z))
    v = complex(r.value)
    return {"specfun": render_csv(["re", "im", "abs_error_estimate", "terms_used"],
                                  [[v.real, v.imag, float(r.abs_error_estimate), int(r.terms_used)]])}


COMMANDS = {
    "potential": cmd_potential,
    "spectrum": cmd_spectrum,
    "wavefunctions": cmd_wavefunctions,
    "twostate": cmd_twostate,
    "specfun-eval": cmd_specfun,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output file (a directory for wavefunctions and twostate)")
    common.add_argument("--preset", choices=["paper"], help="m = hbar = v1 = 1 with v0 = 0")
    for k in ("m", "hbar", "v0", "v1"):
        common.add_argument(f"--{k}", type=float)

    p = _Parser(prog="heunwell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = sub.add_parser("potential", parents=[common])
    sp.add_argument("--x-min", type=float)
    sp.add_argument("--x-max", type=float)
    sp.add_argument("--n-points", type=int)
    for name in ("spectrum", "wavefunctions"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--levels", type=int)
        if name == "spectrum":
            sp.add_argument("--verify", action="store_true", default=None)
        else:
            sp.add_argument("--n-points", type=int)
            sp.add_argument("--x-max", type=float)
    sp = sub.add_parser("twostate", parents=[common])
    sp.add_argument("--shape", choices=["sech", "constant"])
    sp.add_argument("--u0", type=float)
    sp.add_argument("--delta0", type=float)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--no-sweep", action="store_true")
    sp = sub.add_parser("specfun-eval", parents=[common])
    sp.add_argument("function", choices=["hermite", "kummer"])
    sp.add_argument("--nu")
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.add_argument("--z", required=True)
    return p


def config_from_args(args) -> RunConfig:
    if args.config:
        try:
            cfg = RunConfig.from_json(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    else:
        cfg = RunConfig()
    prob = cfg.problem.to_dict()
    if args.preset == "paper":
        prob = REFERENCE_PRESET.to_dict()
    for k in ("m", "hbar", "v0", "v1"):
        if getattr(args, k) is not None:
            prob[k] = getattr(args, k)
    cfg.problem = PhysicalParams.from_dict(prob)

    name = args.command if args.command != "specfun-eval" else "specfun"
    sec = dict(cfg.sections.get(name, {}))
    for flag, key in (("levels", "levels"), ("verify", "verify"), ("x_min", "x_min"),
                      ("x_max", "x_max"), ("n_points", "n_points"), ("tol", "tol")):
        if getattr(args, flag, None) is not None:
            sec[key] = getattr(args, flag)
    if name == "twostate":
        if any(getattr(args, k) is not None for k in ("shape", "u0", "delta0")):
            pulse = dict(sec.get("pulse", {}))
            for k in ("shape", "u0", "delta0"):
                if getattr(args, k) is not None:
                    pulse[k] = getattr(args, k)
            sec["pulse"] = pulse
        if args.no_sweep:
            sec["lambdas"] = None
    cfg.sections[name] = sec
    return cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        tables = COMMANDS[args.command](cfg, args)
        _emit(tables, args.out, args.command in DIRECTORY_OUTPUT)
    except NUMERIC_ERRORS as exc:
        print(f"heunwell: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, SpecfunError, ValueError, TypeError, KeyError) as exc:
        print(f"heunwell: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Declarative experiment runner.

One experiment per invocation: parse a JSON config (or inline flags),
build the kernel and initial signal, run the requested pipeline, and
write CSV / JSON / gnuplot outputs atomically.  Exit codes: 0 success,
1 usage or config error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

from .errors import SupershiftError
from .evolve import (
    WaveField,
    initial_limit_check,
    schrodinger_residual_field,
    supershift_experiment,
    wavefield,
    wavefunction,
)
from .greens import (
    AuditSampleSpec,
    Electric,
    Free,
    Harmonic,
    PoschlTeller,
    audit_kernel,
    make_kernel,
)
from .initial_data import (
    combine_signals,
    default_weight,
    disk_samples,
    plane_wave,
    superosc_signal,
    weighted_sup_distance,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for
    # verification failures, so remap
    def error(self, message):
        raise _UsageError(message)


DEFAULTS = {
    "quadrature": {"tol": 1e-9, "max_panels": 4000, "angle": None},
    "grid": {"t": [0.1, 0.5, 5], "x": [-2.0, 2.0, 9]},
    "verify": {
        "residual_threshold": 1e-3,
        "initial_limit_threshold": 1e-2,
        "t_sequence": [1e-2, 1e-3, 1e-4],
    },
    "supershift": {"n_values": [10, 20, 40], "kappa": 3.0},
    "threads": 1,
    "output": {"dir": "out", "prefix": "run"},
}


def _lambda_from_spec(spec) -> tuple:
    kind = spec.get("kind")
    if kind == "constant":
        c = float(spec["c"])
        return (lambda t: c), f"const:{c:g}"
    if kind == "sinusoid":
        a, b, om = float(spec["a"]), float(spec["b"]), float(spec["omega"])
        return (lambda t: a + b * np.sin(om * t)), f"sin:{a:g},{b:g},{om:g}"
    if kind == "table":
        from scipy.interpolate import CubicSpline

        ts = np.asarray(spec["t"], dtype=float)
        vs = np.asarray(spec["values"], dtype=float)
        if len(ts) != len(vs) or len(ts) < 2:
            raise _UsageError("lambda table needs matching t/values arrays")
        sp = CubicSpline(ts, vs)
        return (lambda t: float(sp(t))), f"table:{len(ts)}pts"
    raise _UsageError(f"unknown lambda kind {kind!r} (constant|sinusoid|table)")


def _potential_from_config(spec) -> object:
    kind = spec.get("kind")
    if kind == "free":
        return Free()
    if kind == "electric":
        lam, lab = _lambda_from_spec(spec.get("lambda", {"kind": "constant", "c": 1.0}))
        return Electric(lam, lab)
    if kind == "harmonic":
        if "omega" in spec:
            om = float(spec["omega"])
            return Harmonic(lambda t: om * om, f"omega={om:g}")
        lam, lab = _lambda_from_spec(spec.get("lambda", {"kind": "constant", "c": 1.0}))
        return Harmonic(lam, lab)
    if kind in ("poschl_teller", "poschl-teller"):
        return PoschlTeller(int(spec["l"]))
    raise _UsageError(f"config field 'potential.kind' missing or unknown: {kind!r}")


def _potential_from_inline(text: str) -> dict:
    """Parse 'free', 'harmonic:omega=1', 'electric:lambda=1', 'poschl-teller:l=2'."""
    head, _, rest = text.partition(":")
    head = head.strip().lower().replace("_", "-")
    opts = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        opts[key.strip()] = val.strip()
    if head == "free":
        return {"kind": "free"}
    if head == "electric":
        lam = float(opts.get("lambda", 1.0))
        return {"kind": "electric", "lambda": {"kind": "constant", "c": lam}}
    if head == "harmonic":
        if "omega" in opts:
            return {"kind": "harmonic", "omega": float(opts["omega"])}
        return {
            "kind": "harmonic",
            "lambda": {"kind": "constant", "c": float(opts.get("lambda", 1.0))},
        }
    if head in ("poschl-teller", "poschlteller", "pt"):
        return {"kind": "poschl_teller", "l": int(opts.get("l", 1))}
    raise _UsageError(f"cannot parse potential {text!r}")


def _initial_from_config(spec):
    kind = spec.get("kind")
    if kind == "plane_wave":
        k = spec["k"]
        kappa = complex(k[0], k[1]) if isinstance(k, (list, tuple)) else float(k)
        return plane_wave(kappa)
    if kind == "superosc":
        return superosc_signal(int(spec["n"]), float(spec["k"]))
    if kind == "linear_combination":
        terms = []
        for item in spec["terms"]:
            c = item["coeff"]
            coeff = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
            terms.append((coeff, _initial_from_config(item["signal"])))
        return combine_signals(terms)
    raise _UsageError(f"config field 'initial.kind' missing or unknown: {kind!r}")


def _initial_from_inline(text: str) -> dict:
    head, _, rest = text.partition(":")
    head = head.strip().lower()
    opts = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        opts[key.strip()] = val.strip()
    if head in ("plane", "plane_wave"):
        return {"kind": "plane_wave", "k": float(opts.get("k", 1.0))}
    if head == "superosc":
        return {"kind": "superosc", "n": int(opts.get("n", 10)), "k": float(opts.get("k", 3.0))}
    raise _UsageError(f"cannot parse initial condition {text!r}")


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except FileNotFoundError:
            raise _UsageError(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise _UsageError(f"config parse error at line {exc.lineno}: {exc.msg}")
    cfg = _merge(DEFAULTS, cfg)
    if getattr(args, "potential", None):
        cfg["potential"] = _potential_from_inline(args.potential)
    if getattr(args, "initial", None):
        cfg["initial"] = _initial_from_inline(args.initial)
    if getattr(args, "kappa", None) is not None:
        cfg.setdefault("supershift", {})
        cfg["supershift"]["kappa"] = float(args.kappa)
    if getattr(args, "n_values", None):
        cfg["supershift"]["n_values"] = [int(v) for v in args.n_values.split(",")]
    if getattr(args, "tol", None) is not None:
        cfg["quadrature"]["tol"] = float(args.tol)
    if getattr(args, "output", None):
        cfg["output"]["dir"] = args.output
    if getattr(args, "prefix", None):
        cfg["output"]["prefix"] = args.prefix
    if "potential" not in cfg:
        raise _UsageError("missing required field: potential")
    return cfg


def _grid_axis(spec) -> np.ndarray:
    lo, hi, n = float(spec[0]), float(spec[1]), int(spec[2])
    return np.linspace(lo, hi, n)


def _atomic_write(path: str, data: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def field_csv(field: WaveField) -> str:
    lines = ["t,x,re_psi,im_psi,abs_psi,quad_err"]
    for i, t in enumerate(field.ts):
        for j, x in enumerate(field.xs):
            v = field.values[i, j]
            lines.append(
                ",".join(
                    _fmt(w)
                    for w in (t, x, v.real, v.imag, abs(v), field.quad_errors[i, j])
                )
            )
    return "\n".join(lines) + "\n"


def emit_plotdata(field: WaveField, path: str):
    """Gnuplot-ready blocks (one per time slice), byte-stable per input."""
    chunks = []
    for i, t in enumerate(field.ts):
        chunks.append(f"# t = {_fmt(t)}")
        for j, x in enumerate(field.xs):
            v = field.values[i, j]
            chunks.append(f"{_fmt(x)} {_fmt(v.real)} {_fmt(v.imag)} {_fmt(abs(v))}")
        chunks.append("")
    _atomic_write(path, "\n".join(chunks) + "\n")


def _manifest(cfg: dict, extra: dict) -> str:
    digest = hashlib.sha256(
        json.dumps(cfg, sort_keys=True, default=str).encode()
    ).hexdigest()
    doc = {
        "experiment": cfg.get("experiment"),
        "potential": cfg.get("potential"),
        "initial": cfg.get("initial"),
        "grid": cfg.get("grid"),
        "tol": cfg["quadrature"]["tol"],
        "config_digest": digest,
        **extra,
        "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    return json.dumps(doc, indent=2, default=str) + "\n"


def _out_path(cfg: dict, suffix: str) -> str:
    out = cfg["output"]
    return os.path.join(out["dir"], f"{out['prefix']}_{suffix}")


def _build_kernel(cfg: dict):
    pot = _potential_from_config(cfg["potential"])
    t_hint = cfg.get("grid", DEFAULTS["grid"])["t"]
    t_max = max(2.0 * float(t_hint[1]), 1.0)
    angle = cfg["quadrature"].get("angle")
    return make_kernel(pot, t_max=t_max, angle=angle)


def _check_grid(kernel, ts):
    if ts[0] <= 0 or ts[-1] >= kernel.horizon:
        raise _UsageError(
            f"grid times must lie in (0, {kernel.horizon:g}) for "
            f"{kernel.potential.label()}"
        )


def run_evolve(cfg: dict) -> int:
    kernel = _build_kernel(cfg)
    signal = _initial_from_config(cfg.get("initial", {"kind": "plane_wave", "k": 3.0}))
    ts = _grid_axis(cfg["grid"]["t"])
    xs = _grid_axis(cfg["grid"]["x"])
    _check_grid(kernel, ts)
    field = wavefield(
        kernel,
        signal,
        ts,
        xs,
        tol=cfg["quadrature"]["tol"],
        max_panels=cfg["quadrature"]["max_panels"],
        workers=cfg.get("threads", 1),
    )
    _atomic_write(_out_path(cfg, "field.csv"), field_csv(field))
    emit_plotdata(field, _out_path(cfg, "plot.dat"))
    _atomic_write(
        _out_path(cfg, "manifest.json"),
        _manifest(cfg, {"failures": len(field.failures)}),
    )
    print(f"wrote {_out_path(cfg, 'field.csv')} ({field.values.size} points)")
    return 0


def run_supershift(cfg: dict) -> int:
    kernel = _build_kernel(cfg)
    ss = cfg["supershift"]
    kappa = float(ss["kappa"])
    n_values = [int(n) for n in ss["n_values"]]
    ts = _grid_axis(cfg["grid"]["t"])
    xs = _grid_axis(cfg["grid"]["x"])
    _check_grid(kernel, ts)
    report = supershift_experiment(
        kernel, n_values, kappa, ts, xs, tol=cfg["quadrature"]["tol"]
    )
    c_weight = float(ss.get("weight_C") or default_weight(kappa))
    samples = disk_samples(float(ss.get("sample_radius", 3.0)))
    target = plane_wave(kappa)
    lines = ["n,d_n,metric_n"]
    for n, d in zip(report.n_values, report.distances):
        m = weighted_sup_distance(superosc_signal(n, kappa), target, c_weight, samples)
        lines.append(f"{n},{_fmt(d)},{_fmt(m)}")
    _atomic_write(_out_path(cfg, "supershift.csv"), "\n".join(lines) + "\n")
    _atomic_write(
        _out_path(cfg, "manifest.json"),
        _manifest(cfg, {"kappa": kappa, "weight_C": c_weight}),
    )
    print(f"wrote {_out_path(cfg, 'supershift.csv')}; decreasing={report.strictly_decreasing}")
    return 0


def run_verify(cfg: dict) -> int:
    kernel = _build_kernel(cfg)
    signal = _initial_from_config(cfg.get("initial", {"kind": "plane_wave", "k": 3.0}))
    vf = cfg["verify"]
    tol = cfg["quadrature"]["tol"]
    checks = []

    t_mid = min(0.5, 0.5 * kernel.horizon)
    h = 2e-3
    ts = t_mid + h * np.arange(5)
    xs = 0.3 + h * np.arange(5)
    fld = wavefield(kernel, signal, ts, xs, tol=min(tol, 1e-9))
    res = schrodinger_residual_field(fld, kernel)
    checks.append(
        {
            "name": "schrodinger_residual",
            "value": res,
            "threshold": vf["residual_threshold"],
            "pass": bool(res <= vf["residual_threshold"]),
        }
    )

    x_win = np.linspace(-2.0, 2.0, 9)
    rep = initial_limit_check(
        kernel, signal, x_win, vf["t_sequence"], tol=min(tol, 1e-8),
        threshold=vf["initial_limit_threshold"],
    )
    checks.append(
        {
            "name": "initial_value_limit",
            "value": rep.final_error,
            "errors": rep.errors,
            "threshold": vf["initial_limit_threshold"],
            "pass": bool(rep.passed),
        }
    )

    if cfg["potential"]["kind"] == "free" and cfg.get("initial", {}).get("kind") == "plane_wave":
        kappa = float(cfg["initial"]["k"])
        worst = 0.0
        for t in np.linspace(0.1, 1.0, 5):
            for x in np.linspace(-3.0, 3.0, 7):
                v = wavefunction(kernel, signal, float(t), float(x), tol=1e-10)
                worst = max(worst, abs(v - np.exp(1j * kappa * x - 1j * kappa**2 * t)))
        checks.append(
            {
                "name": "free_plane_wave_closed_form",
                "value": worst,
                "threshold": 1e-8,
                "pass": bool(worst <= 1e-8),
            }
        )

    passed = all(c["pass"] for c in checks)
    doc = {"potential": kernel.potential.label(), "initial": signal.label,
           "checks": checks, "pass": passed}
    _atomic_write(_out_path(cfg, "verify.json"), json.dumps(doc, indent=2) + "\n")
    print(f"verify: {'PASS' if passed else 'FAIL'} -> {_out_path(cfg, 'verify.json')}")
    return 0 if passed else 2


def run_greens_audit(cfg: dict) -> int:
    kernel = _build_kernel(cfg)
    report = audit_kernel(kernel, AuditSampleSpec())
    _atomic_write(_out_path(cfg, "audit.json"), report.to_json() + "\n")
    print(f"greens-audit: {'PASS' if report.passed else 'FAIL'} -> {_out_path(cfg, 'audit.json')}")
    return 0 if report.passed else 2


def _build_parser() -> _Parser:
    parser = _Parser(prog="supershift-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("evolve", "evaluate a wave field on a grid"),
        ("supershift", "measure supershift persistence distances"),
        ("verify", "run Schrodinger-residual and initial-value checks"),
        ("greens-audit", "audit the Green's kernel contract"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config path")
        p.add_argument("--potential", help="inline potential, e.g. harmonic:omega=1")
        p.add_argument("--initial", help="inline initial datum, e.g. plane:k=3")
        p.add_argument("--tol", type=float, help="quadrature tolerance")
        p.add_argument("--output", help="output directory")
        p.add_argument("--prefix", help="output file prefix")
        if name == "supershift":
            p.add_argument("--k", dest="kappa", type=float, help="target frequency")
            p.add_argument("--n", dest="n_values", help="comma list of orders")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(args)
        cfg["experiment"] = args.command
        runner = {
            "evolve": run_evolve,
            "supershift": run_supershift,
            "verify": run_verify,
            "greens-audit": run_greens_audit,
        }[args.command]
        return runner(cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SupershiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

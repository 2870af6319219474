"""Command-line front end: ``build``, ``verify`` and ``report``.

Settings come from flags, an optional ``key=value`` file (``--config``)
and the ``YBX_SEED`` environment variable. Precedence is flag, then
environment, then file, then the built-in default.

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid
configuration, 3 numerical guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from . import elliptic as ell
from . import rational as rat
from . import trig
from .errors import ConfigError, NumericalGuard, YbxError
from .operators import BasisDescriptor, BlockOp, LinOp
from .special import (
    EllipticParams,
    ModularParams,
    TruncationConfig,
    format_scalar,
    parse_scalar,
)
from .verification import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3

CONVENTIONS = {
    "rational": rat.SpectralConvention.describe(),
    "trig": trig.TrigSpectral.describe(),
    "elliptic": "no shift; u1 = (u + g)/2, u2 = (u - g)/2",
}

FACTORS = {
    "rational": ("R", "Z", "D", "Uplus", "Uminus"),
    "trig": ("R", "M"),
    "elliptic": ("R", "V", "beta"),
}


# ------------------------------------------------------------------ config


def read_config_file(path):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _parser():
    p = argparse.ArgumentParser(prog="ybx", description="Build and verify factorized Yang-Baxter solutions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key=value file; flags override it")
        sp.add_argument("--model", choices=("rational", "trig", "elliptic"))
        sp.add_argument("--mode", choices=("exact", "float"))
        sp.add_argument("--seed", type=int)
        sp.add_argument("--omega")
        sp.add_argument("--tau")
        sp.add_argument("--eta")
        sp.add_argument("--theta-terms", type=int)
        sp.add_argument("--gamma-terms", type=int)
        sp.add_argument("--target-tol", type=float)
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("-v", "--verbose", action="store_true")

    b = sub.add_parser("build", help="emit a restricted R-matrix or one of its factors as JSON")
    common(b)
    b.add_argument("--n", type=int, help="first spin (dimension n+1)")
    b.add_argument("--m", type=int, help="second finite spin (dimension m+1)")
    b.add_argument("--spins", help="comma-separated spins, alternative to --n/--m")
    b.add_argument("--ell", help="generic second spin (rational model)")
    b.add_argument("--s", help="generic second spin (trig model)")
    b.add_argument("--g", help="generic second spin (elliptic model)")
    b.add_argument("--truncation", type=int, help="degree cut for a generic rational second space")
    b.add_argument("--u")
    b.add_argument("--z", help="evaluation point for z-dependent factors (V, beta)")
    b.add_argument("--factor", choices=("R", "Z", "D", "Uplus", "Uminus", "M", "V", "beta"))

    v = sub.add_parser("verify", help="run verification checks and emit JSON reports")
    common(v)
    v.add_argument("--suite", action="append", choices=SUITES + ("all",))
    v.add_argument("--models", help="comma-separated subset of models")
    v.add_argument("--check", action="append", help="run only the named check (repeatable)")

    r = sub.add_parser("report", help="render JSON reports as a table")
    r.add_argument("input", nargs="?", help="reports JSON (default stdin)")
    r.add_argument("--out")
    return p


DEFAULTS = {
    "mode": None,
    "seed": 0,
    "factor": "R",
    "u": "1/2",
    "z": "0.23+0.04j",
}


def resolve(args):
    """Merge defaults, config file, environment and flags into one dict."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config_file(args.config))
    env = os.environ.get("YBX_SEED")
    if env is not None:
        try:
            cfg["seed"] = int(env)
        except ValueError as exc:
            raise ConfigError(f"YBX_SEED must be an integer, got {env!r}") from exc
    for key, val in vars(args).items():
        if val is not None and key not in ("command", "config"):
            cfg[key] = val
    if cfg.get("spins"):
        parts = [int(x) for x in str(cfg["spins"]).split(",") if x.strip()]
        if parts:
            cfg["n"] = parts[0]
            if len(parts) > 1:
                cfg["m"] = parts[1]
    cfg["model_given"] = "model" in cfg
    cfg.setdefault("model", "rational")
    cfg["seed"] = int(cfg["seed"])
    if cfg["mode"] is None:
        cfg["mode"] = "exact" if cfg["model"] == "rational" else "float"
    if cfg["mode"] == "exact" and cfg["model"] != "rational":
        raise ConfigError("exact mode is only available for the rational model")
    return cfg


def _int(cfg, key, default=None):
    val = cfg.get(key, default)
    if val is None:
        raise ConfigError(f"missing --{key}")
    try:
        out = int(val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"--{key} must be an integer") from exc
    if out < 0:
        raise ConfigError(f"--{key} must be nonnegative")
    return out


def _complex(cfg, key, default=None):
    val = cfg.get(key, default)
    if val is None:
        raise ConfigError(f"missing --{key}")
    return complex(parse_scalar(val, exact=False))


def _trunc(cfg):
    t = TruncationConfig()
    return TruncationConfig(
        int(cfg.get("theta_terms") or t.theta_terms),
        int(cfg.get("gamma_terms") or t.gamma_terms),
        float(cfg.get("target_tol") or t.target_tol),
    )


def modular_params(cfg):
    if cfg.get("omega") is None:
        return ModularParams()
    return ModularParams(_complex(cfg, "omega"))


def elliptic_params(cfg):
    base = EllipticParams(trunc=_trunc(cfg))
    tau = _complex(cfg, "tau") if cfg.get("tau") is not None else base.tau
    eta = _complex(cfg, "eta") if cfg.get("eta") is not None else base.eta
    return EllipticParams(tau, eta, _trunc(cfg))


# ------------------------------------------------------------------ output


def _cell(x, exact):
    if exact:
        return format_scalar(Fraction(x))
    return format_scalar(complex(x))


def _matrix(entries, exact):
    return [[_cell(x, exact) for x in row] for row in np.asarray(entries)]


def matrix_document(model, spins, u, entries, basis, exact, factor="R", extra=None, inner_basis=None):
    """JSON document for a scalar or operator-valued matrix."""
    if inner_basis is None:
        rows = [[_cell(x, exact) for x in row] for row in entries]
        shape = np.asarray(entries).shape
    else:
        rows = [[{"basis": list(inner_basis), "entries": _matrix(blk, exact)} for blk in row] for row in entries]
        shape = (len(entries), len(entries[0]) if entries else 0)
    doc = {
        "model": model,
        "factor": factor,
        "spins": spins,
        "u": None if u is None else (_cell(u, True) if exact else _cell(u, False)),
        "shift_convention": CONVENTIONS[model],
        "field": "rational" if exact else "complex",
        "rows": int(shape[0]),
        "cols": int(shape[1]),
        "basis": list(basis),
        "entries": rows,
    }
    if extra:
        doc.update(extra)
    return doc


def load_matrix(doc):
    """Inverse of :func:`matrix_document` for scalar matrices."""
    exact = doc["field"] == "rational"
    conv = Fraction if exact else (lambda v: complex(v[0], v[1]))
    return np.array([[conv(x) for x in row] for row in doc["entries"]], dtype=object if exact else complex)


def _block_doc(model, spins, u, block, exact, factor, extra=None):
    entries = [[block[i, j].entries for j in range(block.d)] for i in range(block.d)]
    if not exact:
        entries = [[np.asarray(e, dtype=complex) for e in row] for row in entries]
    return matrix_document(
        model, spins, u, entries, block.outer.labels, exact, factor, extra, inner_basis=block.inner_domain.labels
    )


def _as_field(op, exact):
    return op.entries if exact else op.to_complex().entries


def build_rational(cfg):
    exact = cfg["mode"] == "exact"
    n = _int(cfg, "n", 1)
    u = parse_scalar(cfg["u"], exact=True)
    if not isinstance(u, Fraction):
        raise ConfigError("the rational model needs a rational --u")
    factor = cfg["factor"]
    if factor in ("Uplus", "Uminus"):
        vals = rat.uplus_values(n, u) if factor == "Uplus" else rat.uminus_values(n, u)
        basis = rat.outer_basis(n)
        op = LinOp.diagonal(basis, vals)
        return matrix_document("rational", [n], u, _as_field(op, exact), basis.labels, exact, factor, {"argument": "u"})
    if cfg.get("m") is not None:
        m = _int(cfg, "m")
        pair = rat.RationalSpinPair(n, m=m)
    else:
        if cfg.get("ell") is None:
            raise ConfigError("give --m (finite) or --ell (generic) for the second space")
        ell_ = parse_scalar(cfg["ell"], exact=True)
        pair = rat.RationalSpinPair(n, ell=ell_, N=_int(cfg, "truncation", n + 2))
    spins = [n, pair.m if pair.finite else format_scalar(pair.ell)]
    basis = BasisDescriptor.monomial(pair.degree)
    if factor == "Z":
        from .operators import mult_by_coordinate

        return _block_doc("rational", spins, None, rat.build_Z(n, mult_by_coordinate(basis)), exact, "Z")
    if factor == "D":
        from .operators import derivative

        return _block_doc("rational", spins, None, rat.build_Dmat(n, derivative(basis)), exact, "D")
    if factor != "R":
        raise ConfigError(f"factor {factor} is not available for the rational model")
    if pair.finite:
        op = rat.restrict_second(n, pair.m, u)
        return matrix_document("rational", spins, u, _as_field(op, exact), op.domain.labels, exact)
    block = rat.build_R_factorized(pair, u)
    flagged = sorted({int(c) for i in range(block.d) for j in range(block.d) for c in np.flatnonzero(block[i, j].tainted)})
    return _block_doc("rational", spins, u, block, exact, "R", {"truncated_columns": flagged})


def build_trig(cfg):
    P = modular_params(cfg)
    m = _int(cfg, "m" if cfg.get("n") is None else "n", 1)
    u = _complex(cfg, "u")
    factor = cfg["factor"]
    if factor == "M":
        M = trig.build_M(m, u + m * P.omega_prime, P)
        return matrix_document(
            "trig", [m], u, M.entries, M.domain.labels, False, "M", {"argument": "u + m omega'"}
        )
    if factor != "R":
        raise ConfigError(f"factor {factor} is not available for the trig model")
    n = _int(cfg, "n", 1)
    if cfg.get("m") is not None:
        m2 = _int(cfg, "m")
        op = trig.restrict_second_trig(n, m2, u, P)
        return matrix_document("trig", [n, m2], u, op.entries, op.domain.labels, False)
    if cfg.get("s") is None:
        raise ConfigError("give --m (finite) or --s (generic) for the second space")
    pair = trig.TrigSpinPair(n, s=_complex(cfg, "s"))
    block = trig.build_R_trig_factorized(pair, u, P)
    return _block_doc("trig", [n, cfg["s"]], u, block, False, "R")


def build_elliptic(cfg):
    P = elliptic_params(cfg)
    n = _int(cfg, "n", 1)
    u = _complex(cfg, "u")
    factor = cfg["factor"]
    z = _complex(cfg, "z")
    if factor == "V":
        arg = ell.reference_V_argument(n, u, P) if n in (1, 2) else u
        V = ell.build_V(n, arg, P)(np.array([z]))[0]
        extra = {"z": format_scalar(z), "argument": "u + tau/4" if n == 1 else "u - eta/2 + tau/4" if n == 2 else "u"}
        if n in (1, 2):
            # rescale to the closed-form normalization
            V = np.linalg.inv(ell.reference_V_normalization(n)) @ V
            extra["normalization"] = "2^n diag(row signs) V"
        labels = [f"phi_{j}" for j in range(1, n + 2)]
        return matrix_document("elliptic", [n], u, V, labels, False, "V", extra)
    if factor == "beta":
        beta = ell.build_intertwiner(n, P).beta(np.array([z]))
        labels = [f"beta_{l}" for l in range(n + 1)]
        return matrix_document(
            "elliptic", [n], None, beta, labels, False, "beta",
            {"z": format_scalar(z), "columns": "evaluation points z", "shifts": [n - 2 * l for l in range(n + 1)]},
        )
    if factor != "R":
        raise ConfigError(f"factor {factor} is not available for the elliptic model")
    if cfg.get("m") is None:
        raise ConfigError("the elliptic build needs a finite second spin --m")
    m = _int(cfg, "m")
    op, res = ell.restrict_second_elliptic(n, m, u, P)
    return matrix_document("elliptic", [n, m], u, op.entries, op.domain.labels, False, "R", {"membership_residual": res})


def cmd_build(cfg):
    builder = {"rational": build_rational, "trig": build_trig, "elliptic": build_elliptic}[cfg["model"]]
    if cfg["factor"] not in FACTORS[cfg["model"]]:
        raise ConfigError(f"factor {cfg['factor']} is not available for the {cfg['model']} model")
    return builder(cfg), EXIT_OK


def cmd_verify(cfg):
    suites = cfg.get("suite") or ["all"]
    if isinstance(suites, str):
        suites = [s.strip() for s in suites.split(",")]
    models = cfg.get("models")
    if isinstance(models, str):
        models = [s.strip() for s in models.split(",") if s.strip()]
    elif models is None and cfg.get("model_given"):
        models = [cfg["model"]]
    run_cfg = {"suites": suites, "models": models, "seed": cfg["seed"], "names": cfg.get("check")}
    if cfg.get("omega") is not None:
        run_cfg["modular"] = modular_params(cfg)
    if any(cfg.get(k) is not None for k in ("tau", "eta", "theta_terms", "gamma_terms", "target_tol")):
        run_cfg["elliptic"] = elliptic_params(cfg)
    reports = run_suite(run_cfg)
    doc = {"seed": cfg["seed"], "suites": suites, "reports": [r.to_dict() for r in reports]}
    return doc, EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def render_report(doc):
    """Plain-text table of reports followed by the convention ledger."""
    reports = doc.get("reports", []) if isinstance(doc, dict) else doc
    lines = [f"{'check':32s} {'result':6s} {'relative':>10s} {'max_abs':>10s} {'time[s]':>8s}"]
    for r in reports:
        lines.append(
            f"{r['name']:32s} {'pass' if r['passed'] else 'FAIL':6s} "
            f"{r['relative']:10.2e} {r['max_abs']:10.2e} {r.get('runtime', 0.0):8.2f}"
        )
        if not r["passed"]:
            echo = {k: v for k, v in r.get("context", {}).items()}
            lines.append(f"    seed={r.get('seed')} context={json.dumps(echo, default=str)}")
    if reports:
        lines.append("")
        lines.append("spectral conventions:")
        for model in sorted({r.get("context", {}).get("model") for r in reports} - {None}):
            lines.append(f"  {model}: {CONVENTIONS[model]}")
    return "\n".join(lines) + "\n"


def cmd_report(args):
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(sys.stdin)
    return render_report(doc)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING)
    try:
        if args.command == "report":
            _emit(cmd_report(args), args.out)
            return EXIT_OK
        cfg = resolve(args)
        doc, code = cmd_build(cfg) if args.command == "build" else cmd_verify(cfg)
        _emit(json.dumps(doc, indent=1) + "\n", cfg.get("out"))
        return code
    except NumericalGuard as exc:
        print(f"ybx: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, ValueError, OSError) as exc:
        print(f"ybx: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except YbxError as exc:
        print(f"ybx: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``tlfloquet {relations,charges,bch,spectrum,classify}``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or config error.
Files are written to a temporary sibling and renamed into place, so a failed
run never leaves partial output behind.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import TLError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_N = 16
DEFAULT_TAU = 0.5
DEFAULT_MAX_ORDER = 7
DEFAULT_S_MAX = 12
CHARGE_TOL = 1e-11


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_sites: int = DEFAULT_N
    t1: float = DEFAULT_TAU
    t2: float = DEFAULT_TAU
    max_order: int = DEFAULT_MAX_ORDER
    s_max: int = DEFAULT_S_MAX
    output: str | None = None
    fmt: str | None = None
    seed: int = 0
    samples: int = 200
    backend: str = "auto"
    inject_fault: bool = False
    tol: float | None = None
    tau_text: str | None = None

    @property
    def tau(self) -> float:
        return math.sqrt(self.t1 * self.t2)

    def tau_fraction(self) -> Fraction:
        """Exact value of tau used for symbolic coefficients."""
        if self.tau_text is not None:
            return Fraction(self.tau_text)
        return Fraction(repr(self.tau))


# ---------------------------------------------------------------------------
# argument handling


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tlfloquet", description="Temperley-Lieb Floquet toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, drive=True, n_default=DEFAULT_N, n_help="number of sites (even, >= 4)"):
        sp.add_argument("--n", type=int, default=n_default, help=n_help)
        if drive:
            sp.add_argument("--tau", type=str, default=None, help="tau = sqrt(T1 T2)")
            sp.add_argument("--t1", type=float, default=None)
            sp.add_argument("--t2", type=float, default=None)
        sp.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("relations", help="exact TL, Lie-algebra and loop-algebra identity suites")
    common(r, drive=False, n_default=8)
    r.add_argument("--backend", choices=["auto", "word", "fock", "single", "all"], default="auto")
    r.add_argument("--inject-fault", action="store_true", help="corrupt e_0 to exercise the failure path")

    c = sub.add_parser("charges", help="Floquet charges Q_m and their commutators with U_F")
    common(c)
    c.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER)
    c.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    c.add_argument("--tol", type=float, default=None)

    b = sub.add_parser("bch", help="exact BCH coefficients and series-vs-log residuals")
    common(b)
    b.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER)
    b.add_argument("--s-max", type=int, default=DEFAULT_S_MAX)
    b.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")

    s = sub.add_parser("spectrum", help="closed-form single-particle spectrum table")
    common(s)
    s.add_argument("--format", dest="fmt", choices=["json", "csv"], default="csv")

    k = sub.add_parser("classify", help="brute-force classification of quadratic representations")
    common(k, drive=False, n_default=4, n_help="number of TL generators; the open chain has n+1 sites")
    k.add_argument("--samples", type=int, default=200)
    k.add_argument("--format", dest="fmt", choices=["json"], default="json")
    return p


def _config(args: argparse.Namespace) -> RunConfig:
    n = args.n
    if args.command != "classify" and (n < 4 or n % 2):
        raise UsageError(f"--n must be an even integer >= 4, got {n}")
    kw = dict(command=args.command, n_sites=n, output=args.output, seed=args.seed)
    if hasattr(args, "tau"):
        if args.tau is not None and (args.t1 is not None or args.t2 is not None):
            raise UsageError("give either --tau or --t1/--t2, not both")
        if (args.t1 is None) != (args.t2 is None):
            raise UsageError("--t1 and --t2 must be given together")
        if args.t1 is not None:
            if args.t1 < 0 or args.t2 < 0:
                raise UsageError("durations must be non-negative")
            kw.update(t1=args.t1, t2=args.t2)
        else:
            text = args.tau if args.tau is not None else repr(DEFAULT_TAU)
            try:
                tau = float(text)
                Fraction(text)
            except ValueError:
                raise UsageError(f"--tau must be a decimal number, got {text!r}") from None
            if not math.isfinite(tau) or tau < 0:
                raise UsageError("--tau must be finite and non-negative")
            kw.update(t1=tau, t2=tau, tau_text=text)
    for name in ("max_order", "s_max", "samples", "backend", "inject_fault", "tol", "fmt"):
        if hasattr(args, name) and getattr(args, name) is not None:
            kw[name] = getattr(args, name)
    if kw.get("samples", 0) < 0:
        raise UsageError("--samples must be >= 0")
    return RunConfig(**kw)


# ---------------------------------------------------------------------------
# output


def atomic_write(path: str, text: str) -> None:
    """Write UTF-8 text via a temporary file in the target directory, then rename."""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=directory)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)


def _sig(x: float, digits: int = 6) -> float:
    # diagnostics near rounding noise: keep only stable digits so reruns match byte for byte
    return x if not math.isfinite(x) else float(f"{x:.{digits - 1}e}")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_relations(cfg: RunConfig) -> int:
    from .fock_rep import MAX_EXACT_N
    from .suites import make_backend, run_all

    if cfg.backend == "auto":
        backends = ["fock", "single"] if cfg.n_sites <= MAX_EXACT_N else ["single"]
    elif cfg.backend == "all":
        backends = ["word", "fock", "single"]
    else:
        backends = [cfg.backend]
    if cfg.n_sites > MAX_EXACT_N and any(b in ("word", "fock") for b in backends):
        raise UsageError(f"Fock-backed suites need --n <= {MAX_EXACT_N}")
    reports = []
    for kind in backends:
        R = make_backend(kind, cfg.n_sites, fault=cfg.inject_fault)
        reports.extend(run_all(R, kind))
    failed = [f"{r.backend}/{r.suite}: {name}" for r in reports for name in r.failed]
    out = {
        "n": cfg.n_sites,
        "fault_injected": cfg.inject_fault,
        "suites": [r.to_dict() for r in reports],
        "ok": not failed,
    }
    _emit(cfg, _dumps(out))
    for line in failed[:20]:
        print(f"FAILED {line}", file=sys.stderr)
    if len(failed) > 20:
        print(f"... {len(failed) - 20} more failures", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_charges(cfg: RunConfig) -> int:
    from .errors import DomainError
    from .floquet_spectral import FloquetParams, charge_commutation_residual
    from .scalar import Scalar
    from .word_algebra import Chain, floquet_charge

    if not 1 <= cfg.max_order < cfg.n_sites - 1:
        raise DomainError(f"--max-order must satisfy 1 <= m < N-1 = {cfg.n_sites - 1}, got {cfg.max_order}")
    params = FloquetParams(cfg.t1, cfg.t2)
    chain = Chain(cfg.n_sites)
    tau_q = cfg.tau_fraction()
    z = Scalar(0, -tau_q)
    tol = cfg.tol if cfg.tol is not None else CHARGE_TOL
    rows = []
    for m in range(1, cfg.max_order + 1):
        Q = floquet_charge(chain, m, z)
        res = charge_commutation_residual(m, params, cfg.n_sites)
        rows.append({"m": m, "residual": _sig(res, 3), "terms": len(Q.terms), "element": Q.to_dict()})
    worst = max(r["residual"] for r in rows)
    if cfg.fmt == "csv":
        lines = ["m,terms,residual"] + [f"{r['m']},{r['terms']},{r['residual']:.2e}" for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = _dumps(
            {
                "n": cfg.n_sites,
                "t1": cfg.t1,
                "t2": cfg.t2,
                "tau": cfg.tau,
                "tau_exact": f"{tau_q.numerator}/{tau_q.denominator}",
                "z": ["0/1", f"{-tau_q.numerator}/{tau_q.denominator}"],
                "tolerance": tol,
                "max_residual": worst,
                "charges": rows,
            }
        )
    _emit(cfg, text)
    return EXIT_OK if worst < tol else EXIT_FAIL


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def cmd_bch(cfg: RunConfig) -> int:
    from .errors import DomainError
    from .floquet_spectral import (
        DivergentSeriesWarning,
        FloquetParams,
        closed_form_bch_coefficients,
        exact_bch_coefficients,
        partial_sum_norms,
        series_error_curve,
    )

    if cfg.max_order < 1:
        raise DomainError("--max-order must be >= 1")
    if cfg.s_max < 0:
        raise DomainError("--s-max must be >= 0")
    params = FloquetParams(cfg.t1, cfg.t2)
    exact = exact_bch_coefficients(cfg.max_order)
    closed = closed_form_bch_coefficients(cfg.max_order)
    coeffs = [{"k": k, "exact": _frac(a), "closed_form": _frac(b), "match": a == b} for k, (a, b) in enumerate(zip(exact, closed), 1)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergentSeriesWarning)
        warnings.simplefilter("ignore", RuntimeWarning)  # logm accuracy notes beyond the radius
        curve = series_error_curve(params, cfg.n_sites, cfg.s_max)
        norms = partial_sum_norms(params, cfg.n_sites, cfg.s_max)
    ratios = [_sig(b / a) if a > 0 else math.nan for a, b in zip(curve, curve[1:])]
    curve, norms = [_sig(e) for e in curve], [_sig(m) for m in norms]
    divergent = params.tau >= 1 and norms[-1] > norms[0]
    ok = all(c["match"] for c in coeffs)
    if cfg.fmt == "csv":
        lines = ["k,exact,closed_form,match"] + [f"{c['k']},{c['exact']},{c['closed_form']},{int(c['match'])}" for c in coeffs]
        lines += ["", "s,error,partial_sum_norm"] + [f"{s},{e:.5e},{m:.5e}" for s, (e, m) in enumerate(zip(curve, norms))]
        text = "\n".join(lines) + "\n"
    else:
        text = _dumps(
            {
                "n": cfg.n_sites,
                "tau": params.tau,
                "s_max": cfg.s_max,
                "coefficients": coeffs,
                "error_curve": curve,
                "error_ratios": ratios,
                "partial_sum_norms": norms,
                "divergent": divergent,
            }
        )
    _emit(cfg, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spectrum(cfg: RunConfig) -> int:
    from .floquet_spectral import FloquetParams, region_spectrum

    table = region_spectrum(FloquetParams(cfg.t1, cfg.t2), cfg.n_sites)
    if cfg.fmt == "json":
        rows = [
            {
                "p": r.p,
                "eps_plus": [r.eps_plus.real, r.eps_plus.imag],
                "eps_minus": [r.eps_minus.real, r.eps_minus.imag],
                "interval": r.interval,
                "t_p": None if math.isnan(r.t_p) else r.t_p,
                "hf_coeff": [r.hf_coeff.real, r.hf_coeff.imag],
            }
            for r in table.rows
        ]
        text = _dumps({"n": cfg.n_sites, "tau": table.tau, "rows": rows})
    else:
        text = table.to_csv()
    _emit(cfg, text)
    return EXIT_OK


def _family_checks(seed: int, count: int = 2) -> list[dict]:
    """Exact relation suite plus gauge fixing for random rational family members."""
    import numpy as np

    from .rep_classification import SolutionFamily, constraint_residual, normalize_to_symplectic

    rng = np.random.default_rng(seed)

    def rational():
        while True:
            num, den = int(rng.integers(-9, 10)), int(rng.integers(1, 10))
            if num:
                return Fraction(num, den)

    out = []
    for case, orientation in ((1, "odd"), (2, "odd"), (2, "even")):
        for _ in range(count):
            fam = SolutionFamily(case, rational(), rational(), rational(), orientation)
            res = constraint_residual(fam, 6)
            gauge = normalize_to_symplectic(fam, 6)
            out.append(
                {
                    "case": case,
                    "orientation": orientation,
                    "alpha_e": _frac(fam.alpha_e),
                    "t_e": _frac(fam.t_e),
                    "t_o": _frac(fam.t_o),
                    "relations_exact": max(res.values()) == 0,
                    "gauge_verified": bool(gauge.verified),
                }
            )
    return out


def cmd_classify(cfg: RunConfig) -> int:
    from .rep_classification import brute_force_classify

    report = brute_force_classify(cfg.n_sites, cfg.samples, cfg.seed)
    checks = _family_checks(cfg.seed)
    out = report.to_dict()
    out["family_checks"] = checks
    ok = report.unclassified == 0 and all(c["relations_exact"] and c["gauge_verified"] for c in checks)
    out["ok"] = ok
    _emit(cfg, _dumps(out))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "relations": cmd_relations,
    "charges": cmd_charges,
    "bch": cmd_bch,
    "spectrum": cmd_spectrum,
    "classify": cmd_classify,
}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with exit code 2
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = _config(args)
        t0 = time.perf_counter()
        code = COMMANDS[cfg.command](cfg)
        if os.environ.get("TLF_VERBOSE"):
            print(f"{cfg.command}: {time.perf_counter() - t0:.2f}s", file=sys.stderr)
        return code
    except UsageError as exc:
        print(f"tlfloquet {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TLError, ValueError) as exc:
        print(f"tlfloquet {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tlfloquet {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())

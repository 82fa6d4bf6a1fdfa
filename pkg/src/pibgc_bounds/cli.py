"""Command-line front end: `bound`, `sweep` and `verify`."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import random
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import channel_core
from .baselines import ci_tmsv, npj_bound, plob_upper, rci_tmsv
from .bell_algebra import conditional_is_distillable
from .channel_core import ChannelKind, PiBGC, is_entanglement_breaking, to_composition
from .gaussian_cov import choi_cov, simon_f
from .rate_multirail import MultirailBudget, multirail_best, p_F, p_F_alt
from .rate_qubit import EB_FLAG, OptBudget, optimize

log = logging.getLogger("pibgc_bounds")

THREADS_ENV = "PIBGC_THREADS"
METHODS = ("new", "multirail", "plob", "ci", "rci", "npj")
CSV_HEADER = ["channel", "fixed_name", "fixed_value", "swept_name", "swept_value", "ns", "method",
              "value", "opt_M", "opt_c", "opt_k", "opt_N", "opt_K", "flags"]
SWEPT = {ChannelKind.ATTENUATOR: ("lambda", "nu"), ChannelKind.AMPLIFIER: ("g", "nu"),
         ChannelKind.ADDITIVE: ("xi", None)}


class UsageError(Exception):
    pass


@dataclass
class Config:
    M_max: int = 5
    k_max: int = 30
    c_step: float = 0.005
    c_tol: float = 1e-4
    mr_k_max: int = 30
    tail_tol: float = 1e-9
    F_max: int = 60
    matrix_cap: int = 4096
    qudit_cap: int = 64
    N_max: int = 3
    K_max: int = 4
    threads: int = 1

    @classmethod
    def load(cls, path: str | None, threads: int | None) -> "Config":
        cfg = cls()
        env = os.environ.get(THREADS_ENV)
        if env:
            cfg.threads = int(env)
        if path:
            with open(path) as fh:
                data = json.load(fh)
            known = {f.name for f in fields(cls)}
            bad = set(data) - known
            if bad:
                raise UsageError(f"unknown config keys: {sorted(bad)}")
            for k, v in data.items():
                setattr(cfg, k, type(getattr(cfg, k))(v))
        if threads is not None:
            cfg.threads = threads
        if cfg.threads < 1:
            raise UsageError("threads must be >= 1")
        return cfg

    def qubit_budget(self) -> OptBudget:
        return OptBudget(self.M_max, self.k_max, self.c_step, self.c_tol, self.threads)

    def multirail_budget(self) -> MultirailBudget:
        return MultirailBudget(self.mr_k_max, self.tail_tol, self.F_max, self.matrix_cap,
                               self.qudit_cap, self.N_max, self.K_max, self.threads)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


def make_channel(kind: ChannelKind, p: dict) -> PiBGC:
    try:
        if kind is ChannelKind.ATTENUATOR:
            return PiBGC.attenuator(p["lambda"], p["nu"])
        if kind is ChannelKind.AMPLIFIER:
            return PiBGC.amplifier(p["g"], p["nu"])
        return PiBGC.additive(p["xi"])
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{kind.value} needs parameter {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def evaluate(ch: PiBGC, method: str, ns: float | None, cfg: Config) -> dict:
    """One record: value plus optimizer metadata."""
    rec = {"method": method, "value": 0.0, "opt_M": None, "opt_c": None, "opt_k": None,
           "opt_N": None, "opt_K": None, "flags": []}
    cf = to_composition(ch)
    if method == "new":
        r = optimize(cf, ns, cfg.qubit_budget())
        rec.update(value=r.rate, opt_M=r.M, opt_c=r.c, opt_k=r.k, flags=list(r.flags))
    elif method == "multirail":
        r = multirail_best(cf, cfg.multirail_budget())
        extra = [] if not r.tail else [f"tail={fmt(r.tail)}"]
        rec.update(value=r.rate, opt_N=r.N, opt_K=r.K, flags=sorted(set(
            f for f in r.flags if not f.startswith("F="))) + extra)
        if any(f.startswith("F=") for f in r.flags):
            rec["flags"].append("size-capped")
    elif method == "plob":
        rec.update(value=plob_upper(ch).value)
    elif method == "ci":
        rec.update(value=ci_tmsv(ch, ns).value)
    elif method == "rci":
        if ch.kind is not ChannelKind.ATTENUATOR:
            raise UsageError("rci is available for the attenuator only")
        rec.update(value=rci_tmsv(ch, ns).value)
    elif method == "npj":
        if ns is None:
            raise UsageError("npj needs --ns")
        rec.update(value=npj_bound(ch, ns).value)
    else:
        raise UsageError(f"unknown method {method!r}")
    if is_entanglement_breaking(cf) and EB_FLAG not in rec["flags"]:
        rec["flags"].append(EB_FLAG)
    return rec


def expand_methods(raw: list[str], ch_kind: ChannelKind, ns: float | None) -> list[str]:
    out = []
    for item in raw:
        for m in item.split(","):
            m = m.strip()
            if m == "all":
                out.extend(x for x in METHODS
                           if not (x == "rci" and ch_kind is not ChannelKind.ATTENUATOR)
                           and not (x == "npj" and ns is None))
            elif m in METHODS:
                out.append(m)
            else:
                raise UsageError(f"unknown method {m!r}")
    if not out:
        raise UsageError("no method selected")
    return sorted(set(out), key=out.index)


def _params_from_args(args) -> dict:
    return {k: v for k, v in (("lambda", args.lam), ("nu", args.nu), ("g", args.g), ("xi", args.xi))
            if v is not None}


def _row(ch_kind, fixed_name, fixed_value, swept_name, swept_value, ns, rec) -> dict:
    return {"channel": ch_kind.value, "fixed_name": fixed_name or "", "fixed_value": fixed_value,
            "swept_name": swept_name, "swept_value": swept_value, "ns": ns, **rec}


def render(rows: list[dict], form: str) -> str:
    if form == "json":
        clean = [{k: (";".join(v) if k == "flags" else v) for k, v in r.items()} for r in rows]
        return json.dumps(clean, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([fmt(r[k]) if k not in ("channel", "fixed_name", "swept_name", "method", "flags")
                    else (";".join(r[k]) if k == "flags" else r[k]) for k in CSV_HEADER])
    return buf.getvalue()


def atomic_write(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_bound(args, cfg: Config) -> list[dict]:
    kind = ChannelKind(args.channel)
    params = _params_from_args(args)
    ch = make_channel(kind, params)
    swept_name, fixed_name = SWEPT[kind]
    methods = expand_methods(args.method, kind, args.ns)
    rows = [_row(kind, fixed_name, params.get(fixed_name), swept_name, params[swept_name], args.ns,
                 evaluate(ch, m, args.ns, cfg)) for m in methods]
    return rows


@dataclass(frozen=True)
class SweepSpec:
    kind: ChannelKind
    fixed: float | None
    start: float
    stop: float
    step: float
    ns: float | None
    methods: tuple

    def points(self) -> list[float]:
        if self.step <= 0:
            raise UsageError("step must be > 0")
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        if n < 0:
            raise UsageError("empty sweep range")
        return [round(self.start + j * self.step, 12) for j in range(n + 1)]


def cmd_sweep(spec: SweepSpec, cfg: Config) -> list[dict]:
    swept_name, fixed_name = SWEPT[spec.kind]
    pts = spec.points()
    chans = []
    for x in pts:
        p = {swept_name: x}
        if fixed_name:
            p[fixed_name] = spec.fixed
        chans.append(make_channel(spec.kind, p))
    jobs = [(x, ch, m) for x, ch in zip(pts, chans) for m in spec.methods]
    # the pool parallelizes over points; inner optimizers run single-threaded
    inner = Config(**{**asdict(cfg), "threads": 1})

    def run(job):
        x, ch, m = job
        return _row(spec.kind, fixed_name, spec.fixed, swept_name, x, spec.ns,
                    evaluate(ch, m, spec.ns, inner))

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = []
        for j, job in enumerate(jobs):
            rows.append(run(job))
            log.info("sweep %d/%d", j + 1, len(jobs))
    rows.sort(key=lambda r: (r["swept_value"], r["method"]))
    return rows


# invariant suite ---------------------------------------------------------

def run_checks(perturb_f: float = 0.0) -> list[dict]:
    rng = random.Random(7)
    original = channel_core.f_coeff
    if perturb_f:
        def bumped(n, i, l, cf):
            return original(n, i, l, cf) * (1.0 + perturb_f)
        channel_core.f_coeff = bumped
    try:
        return _checks(rng)
    finally:
        channel_core.f_coeff = original


def _checks(rng) -> list[dict]:
    f = channel_core.f_coeff
    out = []

    def record(name, worst, tol):
        out.append({"check": name, "worst": worst, "tol": tol, "ok": bool(worst <= tol)})

    worst = 0.0
    for _ in range(5):
        cf = channel_core.CompositionForm(rng.uniform(1.0, 3.0), rng.uniform(0.0, 1.0))
        for n in range(4):
            worst = max(worst, abs(math.fsum(f(n, n, l, cf) for l in range(201)) - 1.0))
    record("trace_preservation", worst, 1e-10)

    worst = 0.0
    for _ in range(5):
        cf = channel_core.CompositionForm(rng.uniform(1.0, 3.0), rng.uniform(0.0, 1.0))
        for N in range(1, 5):
            for K in range(1, 5):
                for F in range(6):
                    worst = max(worst, abs(p_F(cf, N, K, F) - p_F_alt(cf, N, K, F)))
    record("dual_p_F", worst, 1e-12)

    worst = 0.0
    for _ in range(20):
        cf = channel_core.CompositionForm(rng.uniform(1.0, 3.0), rng.uniform(0.0, 1.0))
        ns = rng.uniform(0.1, 5.0)
        ref = -16 * ns * (1 + ns) * cf.g * (1 - (1 - cf.lam) * cf.g)
        worst = max(worst, abs(simon_f(choi_cov(cf, ns)) - ref))
    record("simon_closed_form", worst, 1e-9)

    bad = 0
    for g in np.linspace(1.0, 3.0, 9):
        for lam in np.linspace(0.05, 1.0, 9):
            cf = channel_core.CompositionForm(float(g), float(lam))
            eb = is_entanglement_breaking(cf)
            try:
                dist = conditional_is_distillable(cf, M=1)
            except AssertionError:
                dist = eb
            gauss = simon_f(choi_cov(cf, 1.0)) < 0
            bad += int(dist == eb or gauss == eb)
    record("eb_region_consistency", float(bad), 0.0)
    return out


# argument parsing --------------------------------------------------------

def _add_channel_args(p):
    p.add_argument("channel", choices=[k.value for k in ChannelKind])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--xi", type=float)


def _add_common(p):
    p.add_argument("--ns", type=float, help="energy constraint (mean photon number)")
    p.add_argument("--method", action="append", default=None,
                   help="new, multirail, plob, ci, rci, npj or all; comma lists allowed")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--config", help="JSON file with optimizer budgets")
    p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--print-config", action="store_true", help="print effective config and exit")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pibgc-bounds",
                                 description="Capacity bounds for phase-insensitive bosonic Gaussian channels.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("bound", help="bounds at one channel point")
    _add_channel_args(b)
    _add_common(b)

    s = sub.add_parser("sweep", help="bounds along a parameter range")
    s.add_argument("channel", choices=[k.value for k in ChannelKind])
    s.add_argument("--nu", type=float, help="fixed thermal noise (attenuator, amplifier)")
    s.add_argument("--range", nargs=3, type=float, required=True, metavar=("START", "STOP", "STEP"),
                   help="range of lambda, g or xi depending on the channel")
    _add_common(s)

    v = sub.add_parser("verify", help="run the fast invariant suite")
    v.add_argument("--json", action="store_true")
    v.add_argument("--perturb-f", type=float, default=0.0, help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)  # argparse exits with 2 on malformed flags
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        if args.cmd == "verify":
            t0 = time.perf_counter()
            res = run_checks(args.perturb_f)
            ok = all(r["ok"] for r in res)
            if args.json:
                print(json.dumps({"ok": ok, "seconds": round(time.perf_counter() - t0, 3),
                                  "checks": res, "failures": [r["check"] for r in res if not r["ok"]]},
                                 indent=2))
            else:
                for r in res:
                    print(f"{'PASS' if r['ok'] else 'FAIL'} {r['check']} worst={r['worst']:.3g} tol={r['tol']:g}")
            return 0 if ok else 1

        cfg = Config.load(args.config, args.threads)
        if args.print_config:
            print(json.dumps(asdict(cfg), indent=2))
            return 0
        if args.ns is not None and args.ns <= 0:
            raise UsageError("--ns must be > 0")
        methods = args.method or ["all"]
        if args.cmd == "bound":
            args.method = methods
            rows = cmd_bound(args, cfg)
            form = args.format or "json"
        else:
            kind = ChannelKind(args.channel)
            if SWEPT[kind][1] and args.nu is None:
                raise UsageError(f"{kind.value} sweep needs --nu")
            spec = SweepSpec(kind, args.nu if SWEPT[kind][1] else None, *args.range, args.ns,
                             tuple(expand_methods(methods, kind, args.ns)))
            rows = cmd_sweep(spec, cfg)
            form = args.format or "csv"
        text = render(rows, form)
        if args.out:
            atomic_write(args.out, text)
        else:
            sys.stdout.write(text)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``qmetro {bound,sweep,freq,oracle,verify}``.

Exit codes: 0 when the result is exact or a valid upper bound, 2 when the
requested bound does not exist for the channel, 1 on any error.
"""
import argparse
import csv
from concurrent.futures import ProcessPoolExecutor
import io
import json
import math
import sys

import numpy as np

from . import bounds as B
from . import oracle as O
from .channels import catalog, load_channel, validate
from .errors import BetaZeroInfeasible, ParseError, QMetroError
from .frequency import freq_bound, freq_crlb

EXIT_OK, EXIT_ERROR, EXIT_NA = 0, 1, 2

STATUS_LABELS = {
    B.EXACT: "exact",
    B.UPPER: "upper-bound",
    B.NOT_APPLICABLE: "not-applicable",
    B.INFEASIBLE: "infeasible",
}
BOUND_METHODS = ("qfi", "ext-qfi", "cs", "qs", "rld", "ce-asymptotic", "ce-finite", "ghz", "noon", "oracle")
FREQ_METHODS = {
    "qfi": "channel_qfi",
    "channel-qfi": "channel_qfi",
    "ext-qfi": "extended_qfi",
    "extended-qfi": "extended_qfi",
    "ce-finite": "ce_finite",
    "ce-asymptotic": "ce_asymptotic",
}
# whole-state strategies report the total QFI of N probes, not a per-use value
TOTAL_METHODS = ("ghz", "noon", "oracle")


def _range(text, parts):
    try:
        vals = text.split(":")
        if len(vals) != parts:
            raise ValueError
        return vals
    except ValueError:
        raise ParseError(f"expected {parts} colon-separated fields, got {text!r}") from None


def _channel(args, eta=None):
    if (args.channel is None) == (args.channel_file is None):
        raise ParseError("give exactly one of --channel and --channel-file")
    if args.channel_file:
        ch = load_channel(args.channel_file)
        problems = validate(ch)
        if problems:
            raise ParseError("invalid channel file: " + "; ".join(problems))
        return ch
    e = args.eta if eta is None else eta
    if e is None:
        raise ParseError("--eta is required for catalog channels")
    return catalog(args.channel, args.param, args.phi, e)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return _jsonable([[float(z.real), float(z.imag)] for z in x.ravel()]) if x.ndim == 1 else [
                _jsonable(row) for row in x
            ]
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    return x


def _strategy_value(method, ch, kind, eta, n, args):
    """Total QFI of N probes for a whole-state strategy."""
    if method == "oracle":
        _, val = O.optimize_input(O.NChannelInstance(ch, n, args.extended), args.restarts, args.seed)
        return val
    if method == "ghz" and kind == "dephasing" and ch.param == "phase":
        return O.ghz_qfi(n, eta)
    if method == "noon" and kind == "loss" and ch.param == "phase":
        return O.noon_qfi(n, eta)
    # other channels: evaluate the state directly
    return O.brute_qfi(O.NChannelInstance(ch, n), O.ghz_state(n, ch.d_in))


def evaluate(method, ch, n=1, args=None, eta=None):
    """Run one bound; returns a :class:`BoundResult` (value per use, or total for strategies)."""
    if method == "qfi":
        return B.channel_qfi(ch)
    if method == "ext-qfi":
        return B.extended_qfi(ch)
    if method == "cs":
        return B.cs_bound(ch)
    if method == "qs":
        return B.qs_bound(ch, restarts=args.restarts if args else 16, seed=args.seed if args else 0)
    if method == "rld":
        return B.rld_bound(ch)
    if method == "ce-asymptotic":
        try:
            return B.ce_asymptotic(ch)
        except BetaZeroInfeasible as exc:
            return B.BoundResult(float("nan"), B.INFEASIBLE, None, {"reason": str(exc)})
    if method == "ce-finite":
        return B.ce_finite(ch, n)
    if method in TOTAL_METHODS:
        val = _strategy_value(method, ch, ch.kind, eta if eta is not None else ch.noise_value, n, args)
        return B.BoundResult(val, B.EXACT, None, {"total": True})
    raise ParseError(f"unknown method {method!r}")


def _uncertainty(method, n, value):
    total = value if method in TOTAL_METHODS else n * value
    return 1.0 / math.sqrt(total) if total > 0 else float("inf")


def _emit(text, args):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.9g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_bound(args):
    ch = _channel(args)
    res = evaluate(args.method, ch, args.n, args)
    record = {
        "method": args.method,
        "value": res.value,
        "status": STATUS_LABELS[res.status],
        "witness": res.witness,
        "diagnostics": res.diagnostics,
    }
    if args.format == "csv":
        _emit(_csv([[args.method, float(res.value), record["status"]]], ["method", "value", "status"]), args)
    else:
        _emit(json.dumps(_jsonable(record), sort_keys=True) + "\n", args)
    return EXIT_OK if res.ok else EXIT_NA


def _sweep_point(task):
    method, ch, n, args, eta = task
    res = evaluate(method, ch, n, args, eta)
    return float(res.value), _uncertainty(method, n, res.value)


def cmd_sweep(args):
    if args.eta_range:
        a, b, k = _range(args.eta_range, 3)
        etas = [float(e) for e in np.linspace(float(a), float(b), int(k))]
        tasks = [(args.method, _channel(args, e), args.n, args, e) for e in etas]
        keys = [[e, args.n, args.method] for e in etas]
        header = ["eta", "N", "method", "value", "uncertainty"]
    else:
        if not args.n_range:
            raise ParseError("sweep needs --n-range or --eta-range")
        a, b = (int(v) for v in _range(args.n_range, 2))
        if a < 1 or b < a:
            raise ParseError("--n-range needs 1 <= A <= B")
        ch = _channel(args)
        tasks = [(args.method, ch, n, args, None) for n in range(a, b + 1)]
        keys = [[n, args.method] for n in range(a, b + 1)]
        header = ["N", "method", "value", "uncertainty"]
    if args.workers > 1 and len(tasks) > 1:
        # map keeps submission order, so output does not depend on scheduling
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    rows = [key + list(res) for key, res in zip(keys, results)]
    if args.format == "json":
        _emit(json.dumps([dict(zip(header, _jsonable(r))) for r in rows], sort_keys=True) + "\n", args)
    else:
        _emit(_csv(rows, header), args)
    return EXIT_OK


def cmd_freq(args):
    if args.channel is None:
        raise ParseError("freq needs a catalog --channel")
    if args.gamma is None or args.gamma <= 0:
        raise ParseError("freq needs --gamma > 0")
    method = FREQ_METHODS.get(args.method)
    if method is None:
        raise ParseError(f"method {args.method!r} is not available for frequency estimation")
    res = freq_bound(args.channel, method, args.gamma, args.n, args.t_max)
    record = {"method": args.method, "value": res.value, "t_opt": res.t_opt, "N": args.n, "diagnostics": res.diagnostics}
    if args.t_total is not None:
        record["delta_omega"] = freq_crlb(res, args.t_total)
    if args.format == "csv":
        cols = ["method", "value", "t_opt"] + (["delta_omega"] if "delta_omega" in record else [])
        _emit(_csv([[record[c] for c in cols]], cols), args)
    else:
        _emit(json.dumps(_jsonable(record), sort_keys=True) + "\n", args)
    return EXIT_OK


def cmd_oracle(args):
    ch = _channel(args)
    inst = O.NChannelInstance(ch, args.n, args.extended)
    psi, val = O.optimize_input(inst, args.restarts, args.seed)
    record = {"N": args.n, "extended": args.extended, "value": val, "per_use": val / args.n, "restarts": args.restarts}
    if args.format == "csv":
        _emit(_csv([[args.n, float(val), float(val / args.n)]], ["N", "value", "per_use"]), args)
    else:
        record["input"] = psi
        _emit(json.dumps(_jsonable(record), sort_keys=True) + "\n", args)
    return EXIT_OK


def cmd_verify(args):
    from .verify import SECTIONS, run

    sections = None
    if args.section:
        bad = [s for s in args.section if s not in SECTIONS]
        if bad:
            raise ParseError(f"unknown section(s) {bad}; choose from {list(SECTIONS)}")
        sections = args.section
    report = run(sections)
    if args.format == "csv":
        rows = [[c["section"], c["name"], c["outcome"]] for c in report["checks"]]
        _emit(_csv(rows, ["section", "check", "outcome"]), args)
    else:
        _emit(json.dumps(_jsonable(report), sort_keys=True) + "\n", args)
    return EXIT_OK if report["passed"] else EXIT_ERROR


def build_parser():
    p = argparse.ArgumentParser(prog="qmetro", description="Precision bounds for noisy parameter estimation.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, method_choices=BOUND_METHODS, default_method="qfi"):
        sp.add_argument("--channel", choices=["dephasing", "depolarization", "loss", "spontaneous-emission", "spontaneous_emission"])
        sp.add_argument("--channel-file")
        sp.add_argument("--param", choices=["phase", "strength"], default="phase")
        sp.add_argument("--eta", type=float)
        sp.add_argument("--phi", type=float, default=0.0)
        sp.add_argument("--method", choices=method_choices, default=default_method)
        sp.add_argument("--n", type=int, default=1)
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--restarts", type=int, default=32)
        sp.add_argument("--extended", action="store_true", help="append one ancilla per probe (oracle)")
        sp.add_argument("--out")

    common(sub.add_parser("bound", help="single bound at one channel point"))
    sw = sub.add_parser("sweep", help="bound over a range of N or eta (CSV by default)")
    common(sw)
    sw.add_argument("--n-range")
    sw.add_argument("--eta-range", help="A:B:K, K evenly spaced values")
    sw.add_argument("--workers", type=int, default=1, help="evaluate grid points in this many processes")
    sw.set_defaults(format="csv")
    fr = sub.add_parser("freq", help="time-optimised frequency estimation")
    common(fr, tuple(FREQ_METHODS), "channel-qfi")
    fr.add_argument("--gamma", type=float)
    fr.add_argument("--t-max", type=float)
    fr.add_argument("--t-total", type=float)
    common(sub.add_parser("oracle", help="brute-force optimised N-probe QFI"))
    vf = sub.add_parser("verify", help="reproduce reference values")
    vf.add_argument("--section", action="append")
    vf.add_argument("--format", choices=["json", "csv"], default="json")
    vf.add_argument("--out")
    return p


COMMANDS = {"bound": cmd_bound, "sweep": cmd_sweep, "freq": cmd_freq, "oracle": cmd_oracle, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", 1) < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (QMetroError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

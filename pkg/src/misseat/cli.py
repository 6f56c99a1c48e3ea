"""Command line interface.

Exit codes: 0 ok, 2 usage or domain error, 3 internal consistency
failure, 4 verification failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from xml.sax.saxutils import escape

from . import __version__
from .checks import run_all
from .distribution import METHODS, ConsistencyError, distribution_full, moments
from .oracle import DEFAULT_BOUND, enumerate_process
from .process import BoardingConfig, compare_empirical, monte_carlo

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONSISTENCY = 3
EXIT_VERIFY = 4
EXIT_IO = 5

MAX_N = 2000


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _manifest(command: str, params: dict, seed: int | None = None) -> dict:
    out = {"command": command, "params": params, "version": __version__}
    if seed is not None:
        out["seed"] = seed
    return out


def _fraction(p: Fraction) -> dict:
    return {"num": str(p.numerator), "den": str(p.denominator), "approx": float(p)}


def _emit(text: str, out: str | None, manifest: dict) -> None:
    """Write ``text`` to ``out`` (or stdout).

    File outputs get a sidecar ``<out>.manifest.json`` carrying the
    manifest plus a timestamp; the main output stays byte-reproducible.
    """
    if out is None:
        sys.stdout.write(text)
        return
    stamped = dict(manifest, timestamp=datetime.now(timezone.utc).isoformat())
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(stamped, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {out}: {exc}") from exc


def _check_nk(n: int, k: int, lo: int = 0) -> None:
    if not 1 <= n <= MAX_N:
        raise CliError(EXIT_USAGE, f"n must be in 1..{MAX_N}, got {n}")
    if not lo <= k <= n:
        raise CliError(EXIT_USAGE, f"k must be in {lo}..n, got k={k}")


def _exact(n: int, k: int, method: str):
    try:
        return distribution_full(n, k, method)
    except ConsistencyError as exc:
        raise CliError(EXIT_CONSISTENCY, str(exc)) from exc


def pmf_rows(pmf) -> list[dict]:
    return [{"m": m, **_fraction(p)} for m, p in enumerate(pmf.probs)]


# -- commands --------------------------------------------------------------


def cmd_dist(args) -> None:
    _check_nk(args.n, args.k)
    pmf = _exact(args.n, args.k, args.method)
    manifest = _manifest("dist", {"n": args.n, "k": args.k, "method": args.method, "format": args.format})
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["m", "num", "den", "approx"])
        for row in pmf_rows(pmf):
            writer.writerow([row["m"], row["num"], row["den"], repr(row["approx"])])
        text = buf.getvalue()
    else:
        doc = {"n": pmf.n, "k": pmf.k, "method": pmf.method, "pmf": pmf_rows(pmf), "manifest": manifest}
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.out, manifest)


def cmd_moments(args) -> None:
    _check_nk(args.n, args.k)
    summary = moments(_exact(args.n, args.k, args.method))
    manifest = _manifest("moments", {"n": args.n, "k": args.k, "method": args.method})
    doc = {
        "n": args.n,
        "k": args.k,
        "mean": _fraction(summary.mean),
        "variance": _fraction(summary.variance),
        "manifest": manifest,
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out, manifest)


def cmd_simulate(args) -> None:
    _check_nk(args.n, args.k)
    if args.trials < 1:
        raise CliError(EXIT_USAGE, f"trials must be positive, got {args.trials}")
    if not 0 <= args.seed < 1 << 64:
        raise CliError(EXIT_USAGE, f"seed must fit in 64 unsigned bits, got {args.seed}")
    if args.workers < 1:
        raise CliError(EXIT_USAGE, f"workers must be positive, got {args.workers}")
    config = BoardingConfig(args.n, args.k)
    emp = monte_carlo(config, args.trials, args.seed, workers=args.workers, collect_threads=args.threads_report)
    report = compare_empirical(emp, _exact(args.n, args.k, "theorem1"), args.z_threshold)
    params = {"n": args.n, "k": args.k, "trials": args.trials, "z_threshold": args.z_threshold}
    manifest = _manifest("simulate", params, seed=args.seed)
    doc = {
        "n": args.n,
        "k": args.k,
        "trials": args.trials,
        "seed": args.seed,
        "counts": list(emp.counts),
        "comparison": {
            "z_scores": list(report.z_scores),
            "max_abs_z": report.max_abs_z,
            "threshold": report.threshold,
            "impossible": list(report.impossible),
            "passed": report.passed,
        },
    }
    if args.threads_report:
        doc["threads"] = [{"s": s, "r": r, "t": t, "count": c} for (s, r, t), c in emp.thread_tallies.items()]
    doc["manifest"] = manifest
    _emit(json.dumps(doc, indent=2) + "\n", args.out, manifest)
    if not report.passed:
        raise CliError(EXIT_VERIFY, f"empirical pmf disagrees with exact pmf (max |z| = {report.max_abs_z:.3f})")


def cmd_oracle(args) -> None:
    if not 1 <= args.n or not 1 <= args.k <= args.n:
        raise CliError(EXIT_USAGE, f"need 1 <= k <= n, got n={args.n}, k={args.k}")
    if args.n > args.bound:
        raise CliError(EXIT_USAGE, f"n={args.n} exceeds the enumeration bound {args.bound}")
    if args.bound > DEFAULT_BOUND:
        print(f"warning: enumeration bound {args.bound} above {DEFAULT_BOUND} may take very long", file=sys.stderr)
    brute = enumerate_process(args.n, args.k, bound=args.bound)
    closed = {method: _exact(args.n, args.k, method) for method in METHODS}
    verdicts = [
        {"m": m, **{method: closed[method][m] == p for method in METHODS}} for m, p in enumerate(brute.probs)
    ]
    agree = all(v[method] for v in verdicts for method in METHODS)
    manifest = _manifest("oracle", {"n": args.n, "k": args.k, "bound": args.bound})
    doc = {
        "n": args.n,
        "k": args.k,
        "oracle": pmf_rows(brute),
        **{method: pmf_rows(closed[method]) for method in METHODS},
        "verdicts": verdicts,
        "agree": agree,
        "manifest": manifest,
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out, manifest)
    if not agree:
        raise CliError(EXIT_VERIFY, "brute-force enumeration disagrees with the closed forms")


def cmd_check(args) -> None:
    if args.max_n < 2:
        raise CliError(EXIT_USAGE, f"--max-n must be at least 2, got {args.max_n}")
    results = run_all(args.max_n)
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
    failed = [name for name, ok, _ in results if not ok]
    lines.append(f"{len(results) - len(failed)}/{len(results)} suites passed")
    manifest = _manifest("check", {"max_n": args.max_n})
    _emit("\n".join(lines) + "\n", args.out, manifest)
    if failed:
        raise CliError(EXIT_VERIFY, f"first failing identity: {failed[0]}")


def _parse_k_list(text: str, n: int) -> list[int]:
    try:
        ks = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CliError(EXIT_USAGE, f"invalid k list {text!r}") from None
    if not ks or any(not 1 <= k <= n for k in ks):
        raise CliError(EXIT_USAGE, f"every k must be in 1..{n}, got {text!r}")
    return ks


def render_dat(n: int, ks: list[int], heights: dict[int, list[float]], manifest: dict) -> str:
    lines = [f"# manifest: {json.dumps(manifest, sort_keys=True)}", "# m " + " ".join(f"k={k}" for k in ks)]
    for m in range(n + 1):
        lines.append(" ".join([str(m)] + [repr(heights[k][m]) for k in ks]))
    return "\n".join(lines) + "\n"


def render_svg(n: int, ks: list[int], heights: dict[int, list[float]], manifest: dict) -> str:
    width, panel_h, margin = 640, 220, 40
    plot_w = width - 2 * margin
    bar_w = plot_w / (n + 1)
    total_h = panel_h * len(ks)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{total_h}" '
        f'viewBox="0 0 {width} {total_h}">',
        f"<metadata>{escape(json.dumps(manifest, sort_keys=True))}</metadata>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for i, k in enumerate(ks):
        top = i * panel_h
        base = top + panel_h - margin
        plot_h = panel_h - 2 * margin
        peak = max(heights[k]) or 1.0
        parts.append(
            f'<text x="{width / 2:.1f}" y="{top + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">n={n}, k={k}</text>'
        )
        parts.append(f'<line x1="{margin}" y1="{base}" x2="{width - margin}" y2="{base}" stroke="black"/>')
        parts.append(f'<line x1="{margin}" y1="{base}" x2="{margin}" y2="{base - plot_h}" stroke="black"/>')
        parts.append(
            f'<text x="{margin - 4}" y="{base - plot_h + 4}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{peak:.3g}</text>'
        )
        for m, h in enumerate(heights[k]):
            if h <= 0:
                continue
            bh = plot_h * h / peak
            x = margin + m * bar_w
            parts.append(
                f'<rect x="{x:.2f}" y="{base - bh:.2f}" width="{max(bar_w - 0.5, 0.5):.2f}" '
                f'height="{bh:.2f}" fill="steelblue"><title>m={m}: {h!r}</title></rect>'
            )
        for m in range(0, n + 1, max(1, n // 10)):
            parts.append(
                f'<text x="{margin + (m + 0.5) * bar_w:.1f}" y="{base + 14}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="10">{m}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> None:
    if not 1 <= args.n <= MAX_N:
        raise CliError(EXIT_USAGE, f"n must be in 1..{MAX_N}, got {args.n}")
    ks = _parse_k_list(args.k, args.n)
    heights = {k: [float(p) for p in _exact(args.n, k, args.method).probs] for k in ks}
    manifest = _manifest("plot", {"n": args.n, "k": ks, "method": args.method, "format": args.format})
    render = render_svg if args.format == "svg" else render_dat
    _emit(render(args.n, ks, heights, manifest), args.out, manifest)


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="misseat", description="Exact distribution of misseated passengers with absent-minded boarders."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k_type=int):
        p.add_argument("--n", type=int, required=True, help="number of passengers and seats")
        p.add_argument("--k", type=k_type, required=True, help="number of absent-minded passengers")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("dist", help="exact pmf of the misseated count")
    common(p)
    p.add_argument("--method", choices=METHODS, default="theorem1")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("moments", help="exact mean and variance")
    common(p)
    p.add_argument("--method", choices=METHODS, default="theorem1")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("simulate", help="seeded Monte Carlo run compared against the exact pmf")
    common(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="processes to split trials across")
    p.add_argument("--z-threshold", type=float, default=4.0)
    p.add_argument(
        "--threads-report", "--report-threads", dest="threads_report", action="store_true",
        help="tally (s, r, t) thread decompositions",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="brute-force enumeration vs the closed forms")
    common(p)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="largest n to enumerate")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="run every identity suite")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plot", help="histogram of P(m) for one or more k")
    common(p, k_type=str)
    p.add_argument("--method", choices=METHODS, default="theorem1")
    p.add_argument("--format", choices=("dat", "svg"), default="dat")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

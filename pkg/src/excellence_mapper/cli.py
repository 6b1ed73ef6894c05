"""Command line entry points: fit, simulate, serve.

Exit codes: 0 on success, 1 on input errors, 2 when every requested
subject failed (the diagnostics explain why on stderr).
"""

from __future__ import annotations

import argparse
import functools
import http.server
import json
import sys
from pathlib import Path

from .errors import InputError
from .pipeline import PipelineConfig, export_results, run_pipeline
from .simulate import simulate_corpus

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_ALL_SUBJECTS_FAILED = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excellence-mapper",
        description="Identify institutions publishing more top-decile "
                    "papers than expected, per subject area.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="run the full pipeline and export results")
    fit.add_argument("--papers", required=True, help="papers JSONL file")
    fit.add_argument("--institutions", required=True, help="institutions CSV file")
    fit.add_argument("--subjects", default="all",
                     help="comma-separated subject codes, or 'all'")
    fit.add_argument("--year-min", type=int, default=2005)
    fit.add_argument("--year-max", type=int, default=2009)
    fit.add_argument("--min-papers", type=int, default=500)
    fit.add_argument("--min-institutions", type=int, default=50)
    fit.add_argument("--quad-nodes", type=int, default=20)
    fit.add_argument("--out", required=True, help="results JSON output path")
    fit.add_argument("--dump-percentiles", default=None, metavar="FILE",
                     help="also dump per-paper percentile assignments as CSV "
                          "(covers subjects that were fitted)")
    fit.add_argument("--generated-at", default=None, metavar="ISO8601",
                     help="timestamp recorded in the export; defaults to "
                          "SOURCE_DATE_EPOCH when set, else current UTC time")
    fit.add_argument("--jobs", type=int, default=1,
                     help="subjects processed concurrently")

    sim = sub.add_parser("simulate", help="generate a synthetic corpus")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--institutions", type=int, required=True)
    sim.add_argument("--papers", type=int, required=True,
                     help="papers per institution")
    sim.add_argument("--beta0", type=float, required=True)
    sim.add_argument("--sigma", type=float, required=True)
    sim.add_argument("--collaboration-rate", type=float, default=0.0)
    sim.add_argument("--subject", default="SIM")
    sim.add_argument("--year-min", type=int, default=2005)
    sim.add_argument("--year-max", type=int, default=2009)
    sim.add_argument("--out-dir", required=True)

    serve = sub.add_parser("serve", help="serve the UI bundle and results file")
    serve.add_argument("--results", required=True, help="results JSON file")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ui-dir", default=None,
                       help="directory with the built UI (default: ./frontend/dist)")
    serve.add_argument("--bind", default="127.0.0.1")
    return parser


def _cmd_fit(args: argparse.Namespace) -> int:
    subjects = None
    if args.subjects != "all":
        subjects = tuple(s for s in args.subjects.split(",") if s)
        if not subjects:
            print("error: --subjects must name at least one code", file=sys.stderr)
            return EXIT_INPUT_ERROR
    config = PipelineConfig(
        papers_path=args.papers,
        institutions_path=args.institutions,
        subjects=subjects,
        year_min=args.year_min,
        year_max=args.year_max,
        min_papers=args.min_papers,
        min_institutions=args.min_institutions,
        quad_nodes=args.quad_nodes,
        generated_at=args.generated_at,
        jobs=args.jobs,
        dump_percentiles=args.dump_percentiles,
    )
    try:
        document, diagnostics = run_pipeline(config)
        export_results(document, args.out)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    for diag in diagnostics:
        print(f"subject {diag.subject}: {diag.message}", file=sys.stderr)
    fitted = len(document.subjects)
    print(f"wrote {args.out}: {fitted} subject(s) fitted, "
          f"{len(diagnostics)} skipped")
    if fitted == 0:
        return EXIT_ALL_SUBJECTS_FAILED
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        paths = simulate_corpus(
            args.out_dir,
            seed=args.seed,
            n_institutions=args.institutions,
            papers_per_institution=args.papers,
            beta0=args.beta0,
            sigma=args.sigma,
            collaboration_rate=args.collaboration_rate,
            subject=args.subject,
            year_min=args.year_min,
            year_max=args.year_max,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return EXIT_OK


class _ResultsHandler(http.server.SimpleHTTPRequestHandler):
    """Static file handler that also exposes the results file at a
    fixed URL regardless of where it lives on disk."""

    results_path: str = ""

    def do_GET(self):  # noqa: N802 (http.server API)
        if self.path.split("?")[0] == "/results.json":
            try:
                payload = Path(self.results_path).read_bytes()
            except OSError:
                self.send_error(404, "results file not found")
                return
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)
            return
        super().do_GET()

    def log_message(self, fmt, *args):
        sys.stderr.write("%s - %s\n" % (self.address_string(), fmt % args))


def _cmd_serve(args: argparse.Namespace) -> int:
    results = Path(args.results)
    if not results.is_file():
        print(f"error: results file {results} not found", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        json.loads(results.read_text(encoding="utf-8"))
    except (ValueError, OSError) as exc:
        print(f"error: {results} is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    ui_dir = Path(args.ui_dir) if args.ui_dir else Path("frontend/dist")
    if not ui_dir.is_dir():
        print(f"warning: UI directory {ui_dir} not found; "
              "serving results.json only", file=sys.stderr)
        ui_dir = results.parent

    _ResultsHandler.results_path = str(results)
    handler = functools.partial(_ResultsHandler, directory=str(ui_dir))
    server = http.server.ThreadingHTTPServer((args.bind, args.port), handler)
    print(f"serving {ui_dir} and {results} at http://{args.bind}:{args.port}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "fit":
        return _cmd_fit(args)
    if args.command == "simulate":
        return _cmd_simulate(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())

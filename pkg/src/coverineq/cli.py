"""Command line front end.

Every run writes its reports as JSONL to ``--out`` (stdout when omitted) and
one manifest next to it.  Reports carry the manifest id, which is a hash of
the command and its effective configuration, so repeated invocations produce
byte-identical report files; only the manifest holds wall-clock timestamps.

Exit codes: 0 pass, 1 theorem check failed, 2 environment or config error,
3 conjecture counterexample.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__

log = logging.getLogger("coverineq")

EXIT_OK, EXIT_FAIL, EXIT_ENV, EXIT_COUNTER = 0, 1, 2, 3
SUITES = ("core", "functional", "equality", "all")
NMAX_LIMIT = 100


class _Sink:
    """Single-writer JSONL output plus the sibling manifest and summary paths."""

    def __init__(self, out: str | None, command: str, config: dict):
        self.command = command
        self.config = config
        blob = json.dumps({"command": command, "config": config}, sort_keys=True)
        self.id = hashlib.sha256(blob.encode()).hexdigest()[:16]
        self.started = _now()
        self.path = Path(out) if out else None
        if self.path is None:
            self.fh = sys.stdout
            self.manifest_path = None
            self.summary_path = None
        else:
            self.fh = open(self.path, "w", encoding="utf-8")
            stem = self.path.name[: -len(self.path.suffix)] if self.path.suffix else self.path.name
            self.manifest_path = self.path.with_name(stem + ".manifest.json")
            self.summary_path = self.path.with_name(stem + ".summary.json")

    def write(self, record: dict):
        record = {"manifest": self.id, **record}
        self.fh.write(json.dumps(record, sort_keys=True) + "\n")
        self.fh.flush()

    def write_summary(self, text: str):
        if self.summary_path is None:
            sys.stderr.write(text + "\n")
        else:
            self.summary_path.write_text(text + "\n", encoding="utf-8")

    def close(self, exit_code: int):
        if self.fh is not sys.stdout:
            self.fh.close()
        manifest = {
            "id": self.id,
            "command": self.command,
            "config": self.config,
            "version": __version__,
            "seed": self.config.get("seed"),
            "started": self.started,
            "finished": _now(),
            "exit_code": exit_code,
            "outputs": {
                "reports": str(self.path) if self.path else "-",
                "summary": str(self.summary_path) if self.summary_path else None,
            },
        }
        text = json.dumps(manifest, sort_keys=True, indent=2)
        if self.manifest_path is None:
            sys.stderr.write(text + "\n")
        else:
            self.manifest_path.write_text(text + "\n", encoding="utf-8")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _open_sink(out, command, config):
    try:
        return _Sink(out, command, config)
    except OSError as exc:
        log.error("cannot open output %s: %s", out, exc)
        return None


# ---------------------------------------------------------------------------
# verify


def _suite_reports(name: str):
    from .harness import core_suite, equality_witness_suite, functional_suite

    if name == "core":
        return core_suite()
    if name == "functional":
        return functional_suite()
    if name == "equality":
        return equality_witness_suite()
    return core_suite() + functional_suite() + equality_witness_suite()


def cmd_verify(args) -> int:
    sink = _open_sink(args.out, "verify", {"suite": args.suite})
    if sink is None:
        return EXIT_ENV
    code = EXIT_OK
    try:
        reports = _suite_reports(args.suite)
        failed = 0
        for rep in reports:
            sink.write({"suite": args.suite, **rep.to_json(), "holds": rep.holds})
            if not rep.holds:
                failed += 1
        if args.suite == "equality":
            failed += sum(1 for rep in reports if not rep.equality)
        log.info("%d reports, %d failed", len(reports), failed)
        sink.write_summary(json.dumps({"reports": len(reports), "failed": failed}, sort_keys=True))
        code = EXIT_FAIL if failed else EXIT_OK
    except OSError as exc:
        log.error("I/O error: %s", exc)
        code = EXIT_ENV
    finally:
        sink.close(code)
    return code


# ---------------------------------------------------------------------------
# constants


def constant_rows(nmax: int):
    from .inequalities import unconditional_constant_ratio, codim_one_constant_ratio

    if nmax >= 4:
        yield "unconditional_p", codim_one_constant_ratio(4)
    for n in range(8, nmax + 1):
        for p in range(2, n // 4 + 1):
            yield "unconditional_p", unconditional_constant_ratio(n, p)
    for n in range(5, nmax + 1):
        yield "unconditional_n_minus_1", codim_one_constant_ratio(n)


def cmd_constants(args) -> int:
    if not 1 <= args.nmax <= NMAX_LIMIT:
        log.error("--nmax must lie in 1..%d", NMAX_LIMIT)
        return EXIT_ENV
    sink = _open_sink(args.out, "constants", {"nmax": args.nmax})
    if sink is None:
        return EXIT_ENV
    code = EXIT_OK
    try:
        rows = bad = 0
        for table, row in constant_rows(args.nmax):
            sink.write({"table": table, **row.to_json()})
            rows += 1
            bad += not row.holds
        sink.write_summary(json.dumps({"rows": rows, "violations": bad}, sort_keys=True))
        code = EXIT_FAIL if bad else EXIT_OK
    except OSError as exc:
        log.error("I/O error: %s", exc)
        code = EXIT_ENV
    finally:
        sink.close(code)
    return code


# ---------------------------------------------------------------------------
# search


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.replace("-", ",").split(",")
    vals = [int(p) for p in parts if p.strip()]
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) != 2:
        raise ValueError(f"bad --dims {text!r}, expected N or LO,HI")
    return vals[0], vals[1]


def load_search_config(args):
    from .harness import SearchConfig

    obj = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict):
            raise ValueError("config must be a JSON object")
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.trials is not None:
        obj["trials"] = args.trials
    if args.dims is not None:
        obj["dims"] = list(_parse_dims(args.dims))
    return SearchConfig.from_json(obj)


def cmd_search(args) -> int:
    from .harness import search_conjecture

    try:
        cfg = load_search_config(args)
    except (OSError, ValueError, TypeError) as exc:
        log.error("bad config: %s", exc)
        return EXIT_ENV
    sink = _open_sink(args.out, "search", cfg.to_json())
    if sink is None:
        return EXIT_ENV
    code = EXIT_OK
    try:
        summary = search_conjecture(cfg, log=sink.write)
        sink.write_summary(summary.dumps())
        if any(w["regime"] != "conjecture" for w in summary.counterexamples):
            code = EXIT_FAIL
        elif summary.counterexamples:
            code = EXIT_COUNTER
        log.info("%d/%d trials, min ratio %s, %d counterexamples", summary.completed,
                 summary.trials, summary.to_json()["min_ratio"], len(summary.counterexamples))
    except OSError as exc:
        log.error("I/O error: %s", exc)
        code = EXIT_ENV
    finally:
        sink.close(code)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coverineq", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a fixed verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--out", help="JSONL report file (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constants", help="tabulate constant comparisons")
    p.add_argument("--nmax", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("search", help="randomized search against the conjectured bound")
    p.add_argument("--config", help="JSON search config")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--dims", help="N or LO,HI")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

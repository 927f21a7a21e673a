"""Command-line front end.

Three subcommands: analyze a capture, synthesize a scenario trace, and
summarize an alert log.  Exit codes are scripting-friendly: 0 clean,
1 alerts were raised, 2 something went wrong.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .csvio import write_csv
from .detect import DetectorConfig, load_config, read_alert_log
from .errors import WidsError
from .pcapio import write_pcap
from .pipeline import analyze_file, render_report, summarize_alerts
from .synth import Scenario, gen, load_scenario

CONFIG_ENV = "WIDS_CONFIG"

EXIT_CLEAN = 0
EXIT_ALERTS = 1
EXIT_ERROR = 2


def _load_cfg(path: str | None) -> tuple[DetectorConfig, dict]:
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        return DetectorConfig(), {}
    return load_config(path)


def cmd_analyze(args) -> int:
    cfg, extras = _load_cfg(args.config)
    nms = extras.get("nms_source")
    report = analyze_file(args.input, cfg, nms_path=nms)
    if args.output:
        with open(args.output, "w") as fh:
            for alert in report.alerts:
                fh.write(alert.to_json_line() + "\n")
    print(render_report(report))
    return EXIT_ALERTS if report.alerts else EXIT_CLEAN


def cmd_synth(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    frames = gen(scenario)
    out = Path(args.out)
    if args.format == "pcap":
        with open(out, "wb") as fh:
            write_pcap(frames, fh)
    else:
        with open(out, "w", newline="") as fh:
            write_csv(frames, fh)
    span = (frames[-1].ts_us - frames[0].ts_us) / 1e6 if frames else 0.0
    print(f"{scenario.kind.value}: {len(frames)} frames over {span:.3f}s "
          f"-> {out}")
    return EXIT_CLEAN


def cmd_report(args) -> int:
    with open(args.log) as fh:
        alerts = read_alert_log(fh)
    print(summarize_alerts(alerts))
    return EXIT_ALERTS if alerts else EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wids",
        description="Signature-based WPA3 intrusion detection on packet "
                    "captures, plus attack-trace synthesis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run detection over a pcap/CSV capture")
    p.add_argument("--input", required=True, help="capture file (pcap or CSV)")
    p.add_argument("--config",
                   help=f"detector config file (default: ${CONFIG_ENV} "
                        "or built-in values)")
    p.add_argument("--output", help="write alert records here (JSON lines)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="generate a scenario trace")
    p.add_argument("--scenario", required=True, help="scenario spec file")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", required=True, help="output trace path")
    p.add_argument("--format", choices=("pcap", "csv"), default="pcap")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="summarize an alert log")
    p.add_argument("--log", required=True, help="alert log (JSON lines)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (WidsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

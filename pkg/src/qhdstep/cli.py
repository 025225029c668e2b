"""Command line: ``qhdstep run | sweep | validate``.

Exit codes: 0 converged (or validation passed), 1 usage/config/I-O error,
2 not converged (or validation failed), 3 numerical blow-up.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .config import Config, ConfigError, load_config
from .io import RunRecorder, write_summary
from .timestepper import Simulation

logger = logging.getLogger("qhdstep")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_BLOW_UP = 3

# channel lengths used for each step Reynolds number in the laminar benchmark
SWEEP_LENGTHS = {100.0: 7.5, 200.0: 5.0, 300.0: 7.5, 400.0: 10.0}


def _setup_logging() -> None:
    level = os.environ.get("QHDSTEP_LOG", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format="%(levelname)s %(name)s: %(message)s")


def _prepare_out(out: Path) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-test"
    probe.write_text("")
    probe.unlink()
    return out


def execute(config: Config, out: Path) -> tuple[int, dict]:
    """Run one configuration, writing all artifacts into ``out``."""
    out = _prepare_out(out)
    sim = Simulation(config)
    recorder = RunRecorder(out, sim)
    try:
        summary, state = sim.run([recorder])
        if state.n > 0 and config.snapshot_every and state.n % config.snapshot_every != 0:
            recorder.snapshot(state)
    finally:
        recorder.close()
    summary.message = summary.message or ("converged" if summary.converged else "t_max reached")
    write_summary(out / "summary.json", config, summary)
    if summary.blew_up:
        code = EXIT_BLOW_UP
    elif summary.converged:
        code = EXIT_OK
    else:
        code = EXIT_NOT_CONVERGED
    logger.info(
        "n=%d converged=%s L_s/h=%.3f dp=%.3e", summary.n_steps, summary.converged,
        summary.separation_over_h, summary.final_delta_p,
    )
    return code, {"summary": summary, "snapshots": recorder.snapshots}


def cmd_run(config_path: Path, out: Path) -> int:
    config = load_config(config_path)
    code, _ = execute(config, out)
    return code


def sweep_config(base: Config, re: float) -> Config:
    """Per-Re configuration: ``tau0 = 0.5 / re`` and the benchmark channel length."""
    changes = {"re": float(re), "tau0": 0.5 / float(re)}
    if float(re) in SWEEP_LENGTHS:
        changes["length"] = SWEEP_LENGTHS[float(re)]
    return base.replace(**changes)


def cmd_sweep(config_path: Path, re_values: list[float], out: Path) -> int:
    base = load_config(config_path)
    out = _prepare_out(out)
    rows = []
    for re in re_values:
        run_dir = out / f"re_{re:g}"
        try:
            code, result = execute(sweep_config(base, re), run_dir)
            s = result["summary"]
            status = {EXIT_OK: "converged", EXIT_NOT_CONVERGED: "not_converged", EXIT_BLOW_UP: "failed"}[code]
            rows.append([f"{re:g}", status, repr(s.separation_over_h), s.n_steps])
        except (ConfigError, ArithmeticError, RuntimeError) as exc:
            logger.error("Re=%g failed: %s", re, exc)
            rows.append([f"{re:g}", "failed", "nan", 0])
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "status", "separation_over_h", "n_steps"])
        writer.writerows(rows)
    return EXIT_OK if all(r[1] == "converged" for r in rows) else EXIT_NOT_CONVERGED


def cmd_validate(case: str, out: Path) -> int:
    from . import validation

    out = _prepare_out(out)
    report = validation.CASES[case]()
    with open(out / f"validate_{case}.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("validation %s: %s", case, "passed" if report["passed"] else "FAILED")
    return EXIT_OK if report["passed"] else EXIT_NOT_CONVERGED


def _re_list(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhdstep", description="QHD solver for laminar flow over a backward-facing step"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one configuration to steady state")
    p_run.add_argument("--config", required=True, type=Path)
    p_run.add_argument("--out", required=True, type=Path)
    p_sweep = sub.add_parser("sweep", help="run a list of Reynolds numbers")
    p_sweep.add_argument("--config", required=True, type=Path)
    p_sweep.add_argument("--re", required=True, type=_re_list, help="comma separated, may be empty")
    p_sweep.add_argument("--out", required=True, type=Path)
    p_val = sub.add_parser("validate", help="verification cases")
    p_val.add_argument("--case", required=True, choices=["poiseuille", "manufactured"])
    p_val.add_argument("--out", required=True, type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging()
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out)
        if args.command == "sweep":
            return cmd_sweep(args.config, args.re, args.out)
        return cmd_validate(args.case, args.out)
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_ERROR
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_ERROR
    except (RuntimeError, ArithmeticError) as exc:
        logger.error("run failed: %s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

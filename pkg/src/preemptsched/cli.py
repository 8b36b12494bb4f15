"""Command-line front end.

Exit codes: 0 success, 1 input error (bad flags, unreadable or malformed
scenario), 2 scheduling failure (a replayed request found no host, or a
fixture replay diverged from its expected outcome).
"""

import argparse
import os
import sys
from importlib import resources

from .bench import (DEFAULT_CALLS, DEFAULT_HOSTS, format_kernel_table,
                    format_table, run_bench, run_kernel_bench, write_csv)
from .errors import ScenarioError, SchedulingError
from .scenario import ReplayWorkload, load_scenario
from .simulator import render_snapshot, run, write_terminations_csv

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SCHED = 2

FIXTURE_LABELS = ("test1", "test2", "test3", "test4")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 means scheduling failure here,
    # so usage errors are remapped to the input-error code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, "%s: error: %s\n" % (self.prog, message))


def _env_seed():
    raw = os.environ.get("PREEMPTSCHED_SEED")
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ScenarioError(
            "PREEMPTSCHED_SEED must be an integer, got %r" % raw)


def _build_parser():
    parser = _Parser(
        prog="preemptsched",
        description="Scheduler simulator and benchmark for clusters mixing "
                    "normal and preemptible instances.")
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed; overrides PREEMPTSCHED_SEED")
    parser.add_argument("--deterministic-ties", action="store_true",
                        help="break weight ties by lowest host id instead of "
                             "at random")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate",
                         help="run a scenario file and emit its report")
    sim.add_argument("scenario", help="path to a scenario JSON file")
    sim.add_argument("-o", "--out", default=None,
                     help="write the report JSON here instead of stdout")
    sim.add_argument("--terminations-csv", default=None,
                     help="also write termination events as CSV")
    sim.add_argument("--render", action="store_true",
                     help="print snapshot tables to stderr")

    rep = sub.add_parser("replay-tables",
                         help="run the bundled snapshot fixtures and check "
                              "their expected outcomes")
    rep.add_argument("--fixtures", default=None,
                     help="directory holding test1.json .. test4.json "
                          "(default: bundled fixtures)")

    ben = sub.add_parser("bench", help="time the scheduling pipelines")
    ben.add_argument("--hosts", type=int, default=DEFAULT_HOSTS)
    ben.add_argument("--calls", type=int, default=DEFAULT_CALLS)
    ben.add_argument("--seed", type=int, default=None, dest="bench_seed")
    ben.add_argument("--csv", default=None, help="write results as CSV")
    ben.add_argument("--calibrate", action="store_true",
                     help="append a timing-overhead calibration row")
    ben.add_argument("--parallel-cells", action="store_true",
                     help="run cells on threads; quick but noisy")

    ker = sub.add_parser("kernel-bench",
                         help="compare the compiled and pure-Python victim "
                              "search kernels")
    ker.add_argument("--items", type=int, default=12)
    ker.add_argument("--calls", type=int, default=200)
    ker.add_argument("--seed", type=int, default=None, dest="bench_seed")

    return parser


def _cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        seed = args.seed
    elif scenario.seed is not None:
        seed = None  # the scenario's own seed wins over the environment
    else:
        seed = _env_seed()
    ties = True if args.deterministic_ties else None
    report = run(scenario, seed=seed, deterministic_ties=ties)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.terminations_csv:
        with open(args.terminations_csv, "w", encoding="utf-8",
                  newline="") as fh:
            write_terminations_csv(report, fh)
    if args.render:
        for snapshot in report.snapshots:
            sys.stderr.write(render_snapshot(snapshot))
    if isinstance(scenario.workload, ReplayWorkload):
        outcome = report.replay_outcome
        if outcome is None or "failure" in outcome:
            return EXIT_SCHED
    return EXIT_OK


def _fixture_paths(fixtures_dir):
    if fixtures_dir is not None:
        base = fixtures_dir
        paths = [os.path.join(base, label + ".json")
                 for label in FIXTURE_LABELS]
    else:
        root = resources.files("preemptsched").joinpath("fixtures")
        paths = [str(root.joinpath(label + ".json"))
                 for label in FIXTURE_LABELS]
    missing = [p for p in paths if not os.path.isfile(p)]
    if missing:
        raise ScenarioError("missing fixture file(s): %s" % ", ".join(missing))
    return paths


def _cmd_replay_tables(args):
    paths = _fixture_paths(args.fixtures)
    all_ok = True
    for label, path in zip(FIXTURE_LABELS, paths):
        scenario = load_scenario(path)
        if scenario.expected is None:
            raise ScenarioError("%s: fixture lacks an 'expected' block" % path)
        report = run(scenario, deterministic_ties=True)
        outcome = report.replay_outcome
        expected = scenario.expected
        if outcome is None or "failure" in outcome:
            actual = "no valid host"
            ok = False
        else:
            actual = "host=%s victims=%s cost=%s" % (
                outcome["host"], ",".join(outcome["victims"]) or "-",
                outcome["victim_cost"])
            ok = (outcome["host"] == expected["host"]
                  and outcome["victims"] == expected["victims"])
            if "cost" in expected:
                ok = ok and outcome["victim_cost"] == expected["cost"]
        wanted = "host=%s victims=%s" % (expected["host"],
                                         ",".join(expected["victims"]) or "-")
        if "cost" in expected:
            wanted += " cost=%s" % expected["cost"]
        status = "ok" if ok else "MISMATCH"
        print("%s: expected %s | actual %s | %s"
              % (scenario.label or label, wanted, actual, status))
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_SCHED


def _cmd_bench(args):
    seed = args.bench_seed
    if seed is None:
        seed = args.seed
    if seed is None:
        seed = _env_seed()
    if seed is None:
        seed = 0
    results = run_bench(hosts=args.hosts, calls=args.calls, seed=seed,
                        calibrate=args.calibrate,
                        parallel=args.parallel_cells)
    sys.stdout.write(format_table(results))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(results, fh)
    return EXIT_OK


def _cmd_kernel_bench(args):
    seed = args.bench_seed
    if seed is None:
        seed = args.seed
    if seed is None:
        seed = _env_seed()
    if seed is None:
        seed = 0
    results, agree = run_kernel_bench(items=args.items, calls=args.calls,
                                      seed=seed)
    sys.stdout.write(format_kernel_table(results, agree))
    return EXIT_OK if agree else EXIT_SCHED


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "replay-tables":
            return _cmd_replay_tables(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_kernel_bench(args)
    except ScenarioError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except SchedulingError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

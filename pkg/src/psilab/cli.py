"""Command-line scenario runner.

Subcommands:
    run <scenario-file-or-bundled-name>   execute one scenario
    suite [directory]                     execute every *.scn (default: bundled)
    list-scenarios                        list the bundled scenario names

Exit code is 0 iff every executed check passed.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .errors import PsilabError
from .runner import run, write_report
from .scenario import parse_scenario


def _bundled_dir():
    return resources.files("psilab") / "scenarios"


def _bundled_names():
    return sorted(p.name[:-len(".scn")] for p in _bundled_dir().iterdir()
                  if p.name.endswith(".scn"))


def _load_text(target: str) -> str:
    path = Path(target)
    if path.exists():
        return path.read_text()
    bundled = _bundled_dir() / f"{target}.scn"
    if bundled.is_file():
        return bundled.read_text()
    raise PsilabError(f"no scenario file or bundled scenario named {target!r}")


def _print_report(report, verbose: bool = True):
    if verbose:
        for line in report.summary_lines():
            print(f"  {line}")
    mark = "PASS" if report.passed else "FAIL"
    print(f"{mark} {report.name}  ({report.provenance['wall_clock']:.2f}s)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="psilab", description="wave-mechanics scenario runner")
    parser.add_argument("--out", default="psilab_out",
                        help="output directory for reports and series files")
    parser.add_argument("--scheme", choices=("split", "cn"), default="split",
                        help="propagation scheme")
    strict = parser.add_mutually_exclusive_group()
    strict.add_argument("--strict", dest="strict", action="store_true",
                        default=True, help="reject unknown scenario keys (default)")
    strict.add_argument("--no-strict", dest="strict", action="store_false",
                        help=argparse.SUPPRESS)
    parser.add_argument("--plot", action="store_true",
                        help="also render density series to SVG (needs matplotlib)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("scenario", help="path to a .scn file or a bundled name")

    p_suite = sub.add_parser("suite", help="run every scenario in a directory")
    p_suite.add_argument("directory", nargs="?", default=None,
                         help="directory of .scn files (default: bundled suite)")

    sub.add_parser("list-scenarios", help="list bundled scenarios")

    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        for name in _bundled_names():
            print(name)
        return 0

    try:
        if args.command == "run":
            report = _run_one(args.scenario, args)
            _print_report(report)
            return 0 if report.passed else 1

        targets = []
        if args.directory is None:
            targets = _bundled_names()
        else:
            targets = sorted(str(p) for p in Path(args.directory).glob("*.scn"))
            if not targets:
                print(f"no *.scn files in {args.directory}", file=sys.stderr)
                return 2
        reports = [_run_one(t, args) for t in targets]
        for report in reports:
            _print_report(report, verbose=False)
        failed = [r.name for r in reports if not r.passed]
        print(f"suite: {len(reports) - len(failed)}/{len(reports)} scenarios passed")
        return 0 if not failed else 1
    except PsilabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _run_one(target: str, args):
    scenario = parse_scenario(_load_text(target), strict=args.strict)
    for warning in scenario.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    report = run(scenario, out_dir=args.out, scheme=args.scheme)
    if args.plot:
        _render_plot(scenario, args)
    return report


def _render_plot(scenario, args):
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    from .propagators import evolve
    from .states import sample

    psi0 = sample(scenario.state, scenario.grid, tail_tol=scenario.tail_tol)
    s = scenario.schedule
    traj = evolve(psi0, scenario.potential, s.t0, s.t1, s.dt,
                  scheme=args.scheme, snapshot_every=s.snapshot_every)
    fig, ax = plt.subplots(figsize=(7, 4))
    for psi, t in zip(traj.snapshots, traj.times):
        ax.plot(scenario.grid.x, psi.density(), label=f"t = {t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title(scenario.name)
    if len(traj.snapshots) <= 8:
        ax.legend(fontsize=8)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fig.savefig(out / f"{scenario.name}__density.svg")
    plt.close(fig)


if __name__ == "__main__":
    raise SystemExit(main())

"""
Randomized Suite Runner
Runs the laminar, detachment and audit suites and prints their summaries
"""

import argparse
import logging
import os
import sys

# Repo root on the path so the script runs standalone.
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from hyperdetach.suites import run_audit_suite, run_detachment_suite, run_laminar_suite, summarize

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SUITES = {
    'laminar': (run_laminar_suite, ['valid', 'oracle_feasible']),
    'detachment': (run_detachment_suite, ['verified', 'reamalgamates']),
    'audit': (run_audit_suite, ['verified', 'audits_passed']),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Run the randomized detachment suites")
    parser.add_argument('suites', nargs='*', help=f"any of {', '.join(sorted(SUITES))} (default: all)")
    parser.add_argument('--size', type=int, default=None, help="cases per suite")
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--jobs', type=int, default=None, help="joblib worker count")
    args = parser.parse_args(argv)
    unknown = [name for name in args.suites if name not in SUITES]
    if unknown:
        parser.error(f"unknown suites: {', '.join(unknown)}")
    names = args.suites or sorted(SUITES)

    ok = True
    for name in names:
        runner, required = SUITES[name]
        frame = runner(size=args.size, seed=args.seed, n_jobs=args.jobs)
        summary = summarize(frame)
        print(f"\n{name}: {summary}")
        failing = frame[~frame[required].all(axis=1)]
        if not failing.empty:
            ok = False
            print(failing.to_string(index=False))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

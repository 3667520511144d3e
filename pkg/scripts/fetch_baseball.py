"""Check or fetch a copy of the baseball hitters' salary table.

The package already bundles ``src/dreamtest/data/hitters.csv`` (the ISLP
``Hitters`` table, 322 players, 263 with a salary).  Other copies can be used
with ``dreamtest baseball --input PATH`` as long as they are a headed CSV
with at least these columns (extra columns are ignored):

    AtBat Hits HmRun Runs RBI Walks            1986 season hitting
    Years CAtBat CHits CHmRun CRuns CRBI CWalks career totals
    PutOuts Assists Errors                     1986 fielding
    Salary                                     1987 salary, thousands; blank or NA when missing

The original distribution URL is not stable, so no download is attempted
unless ``--url`` is given explicitly.

    python3 scripts/fetch_baseball.py --check path/to/hitters.csv
    python3 scripts/fetch_baseball.py --url https://... --out hitters.csv
"""

import argparse
import csv
import sys
import urllib.request

from dreamtest.baseball import REQUIRED_COLUMNS


def check(path):
    with open(path, newline="", encoding="utf-8-sig") as fh:
        header = next(csv.reader(fh))
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        print(f"{path}: missing columns {missing}", file=sys.stderr)
        return 1
    print(f"{path}: all {len(REQUIRED_COLUMNS)} required columns present")
    return 0


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--check", metavar="PATH")
    p.add_argument("--url")
    p.add_argument("--out", default="hitters.csv")
    args = p.parse_args(argv)
    if args.check:
        return check(args.check)
    if not args.url:
        p.error("nothing to do: pass --check PATH or --url URL")
    urllib.request.urlretrieve(args.url, args.out)
    return check(args.out)


if __name__ == "__main__":
    sys.exit(main())

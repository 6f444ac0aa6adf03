#!/usr/bin/env python3
"""Turn the GeoLife 1.3 PLT tree into a raw CSV for `trajrec preprocess`.

Output rows are user_id,timestamp,lat,lon. See docs/recipes/geolife.md.
"""

import argparse
import csv
import math
import sys
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path

# Rough Beijing box; points outside are dropped.
BEIJING = (39.4, 41.1, 115.4, 117.5)
EPOCH_OFFSET_DAYS = 25569  # PLT day count of 1970-01-01


def read_plt(path):
    points = []
    with open(path, encoding="utf-8", errors="replace") as f:
        for i, line in enumerate(f):
            if i < 6:
                continue
            fields = line.strip().split(",")
            if len(fields) < 5:
                continue
            try:
                lat, lon, days = float(fields[0]), float(fields[1]), float(fields[4])
            except ValueError:
                continue
            ts = int(round((days - EPOCH_OFFSET_DAYS) * 86400))
            points.append((ts, lat, lon))
    points.sort()
    return points


def haversine(a, b):
    r = 6371008.8
    p1, p2 = math.radians(a[0]), math.radians(b[0])
    dp, dl = p2 - p1, math.radians(b[1] - a[1])
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * r * math.asin(min(1.0, math.sqrt(h)))


def month_of(ts):
    d = datetime.fromtimestamp(ts, tz=timezone.utc)
    return d.year, d.month


def floor_dedupe(points, interval):
    by_step = {}
    for ts, lat, lon in points:
        by_step[ts - ts % interval] = (lat, lon)
    return [(ts, *by_step[ts]) for ts in sorted(by_step)]


def chain(trajectories, interval, max_gap, merge_distance):
    """Shifts each trajectory back so it starts at most `max_gap` seconds
    after the previous one ends, and merges the two when the jump between
    them is within `merge_distance` meters. Returns the merged chains."""
    chains = []
    current = []
    for t in trajectories:
        if not t:
            continue
        if current:
            gap = t[0][0] - current[-1][0]
            shift = int(max(0, gap - max_gap))
            shift -= shift % interval
            moved = [(ts - shift, lat, lon) for ts, lat, lon in t]
            close = haversine(current[-1][1:], moved[0][1:]) <= merge_distance
            if close and moved[0][0] > current[-1][0]:
                current.extend(moved)
                continue
            chains.append(current)
        current = list(t)
    if current:
        chains.append(current)
    return chains


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("data_dir", type=Path, help="GeoLife 'Data' directory (one folder per user)")
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--interval", type=int, default=120, help="seconds; timestamps are floored to it")
    ap.add_argument("--top-months", type=int, default=1, help="keep each user's k most active months")
    ap.add_argument("--max-gap", type=float, default=3600.0,
                    help="seconds; later trajectories are shifted back to at most this gap")
    ap.add_argument("--merge-distance", type=float, default=1000.0,
                    help="meters; shifted neighbours closer than this are merged")
    ap.add_argument("--users", type=int, default=37, help="keep the N longest merged trajectories")
    ap.add_argument("--align-date", default="2008-10-20",
                    help="every trajectory is moved to start on this UTC date, keeping its time of day")
    args = ap.parse_args(argv)

    lat0, lat1, lon0, lon1 = BEIJING
    candidates = []
    for user_dir in sorted(p for p in args.data_dir.iterdir() if p.is_dir()):
        files = sorted((user_dir / "Trajectory").glob("*.plt"))
        trajectories = []
        for f in files:
            pts = [p for p in read_plt(f) if lat0 <= p[1] <= lat1 and lon0 <= p[2] <= lon1]
            if pts:
                trajectories.append(pts)
        if len(trajectories) < 2:
            continue
        activity = Counter()
        for t in trajectories:
            for p in t:
                activity[month_of(p[0])] += 1
        keep = {m for m, _ in activity.most_common(args.top_months)}
        trajectories = [[p for p in t if month_of(p[0]) in keep] for t in trajectories]
        trajectories = [floor_dedupe(t, args.interval) for t in trajectories if t]
        trajectories.sort(key=lambda t: t[0][0])
        chains = chain(trajectories, args.interval, args.max_gap, args.merge_distance)
        longest = max(chains, key=lambda c: c[-1][0] - c[0][0])
        candidates.append((user_dir.name, longest))

    candidates.sort(key=lambda c: (-(c[1][-1][0] - c[1][0][0]), c[0]))
    chosen = candidates[: args.users]
    if not chosen:
        print("no user survived the filters", file=sys.stderr)
        return 2

    day = int(datetime.strptime(args.align_date, "%Y-%m-%d").replace(tzinfo=timezone.utc).timestamp())
    aligned = []
    for user, t in chosen:
        first = t[0][0]
        offset = day + first % 86400 - first
        aligned.append((user, [(ts + offset, lat, lon) for ts, lat, lon in t]))
    end = min(t[-1][0] for _, t in aligned)

    rows = 0
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["user_id", "timestamp", "lat", "lon"])
        for user, t in aligned:
            for ts, lat, lon in t:
                if ts <= end:
                    w.writerow([user, ts, repr(lat), repr(lon)])
                    rows += 1
    print(f"{len(aligned)} users, {rows} points, window {day} .. {end}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

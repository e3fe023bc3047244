#!/usr/bin/env python3
"""Generate the bundled synthetic head-motion and bandwidth traces.

Head motion: random-waypoint yaw/pitch with dwell periods (perfect linear
prediction) and movement segments with jitter (prediction misses scale with
portion slack). Bandwidth: throughput capped at the sending rate with
multiplicative noise and occasional fades.
"""
import csv
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
ASSETS = os.path.join(HERE, "..", "crates", "adaport", "assets")
T = 3000


def wrap(a):
    a = math.fmod(a, 360.0)
    if a >= 180.0:
        a -= 360.0
    if a < -180.0:
        a += 360.0
    return a


def gen_pose(rng):
    rows = []
    yaw, pitch = 30.0, 0.0
    t = 0
    while t < T:
        if rng.random() < 0.55:
            # dwell: hold pose exactly
            for _ in range(min(rng.randint(8, 40), T - t)):
                rows.append((t + 1, wrap(yaw), pitch))
                t += 1
                if t >= T:
                    break
        else:
            # move toward a waypoint with jitter
            dyaw = rng.uniform(-120.0, 120.0)
            dpitch = rng.uniform(-30.0, 30.0)
            steps = rng.randint(10, 30)
            vy, vp = dyaw / steps, dpitch / steps
            for _ in range(min(steps, T - t)):
                yaw = wrap(yaw + vy + rng.gauss(0.0, 0.8))
                pitch = max(-60.0, min(60.0, pitch + vp + rng.gauss(0.0, 0.3)))
                rows.append((t + 1, yaw, pitch))
                t += 1
                if t >= T:
                    break
    return rows


def gen_bw(rng, rate):
    rows = []
    for t in range(T):
        mult = min(1.0, max(0.3, 1.0 + rng.gauss(0.0, 0.04)))
        if rng.random() < 0.03:
            mult = min(mult, rng.uniform(0.5, 0.85))
        rows.append((t, rate * mult))
    return rows


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for r in rows:
            w.writerow([r[0]] + [f"{v:.4f}" for v in r[1:]])
    print("wrote", path, len(rows), "rows")


def main():
    os.makedirs(ASSETS, exist_ok=True)
    write(
        os.path.join(ASSETS, "head_pose.csv"),
        ["t", "yaw_deg", "pitch_deg"],
        gen_pose(random.Random(20240521)),
    )
    write(
        os.path.join(ASSETS, "bandwidth_100mbps.csv"),
        ["t", "throughput_mbps"],
        gen_bw(random.Random(100), 100.0),
    )
    write(
        os.path.join(ASSETS, "bandwidth_150mbps.csv"),
        ["t", "throughput_mbps"],
        gen_bw(random.Random(150), 150.0),
    )


if __name__ == "__main__":
    main()

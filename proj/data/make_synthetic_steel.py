"""Generate the synthetic steel-market trade fixture.

The file is SYNTHETIC. It is built so that ten-minute windows over the ten
tracked traders give pair sums T with class counts (2, 13, 4, 1) over the
classes {-5}, {-3}, {3}, {13..45}. Every tracked trader trades in every
window and no window ends with a zero net position, so the result does not
depend on the inactive-trader or tie rules.
"""

import datetime as dt
import random

TRACKED = ["AVA", "CSB", "DBL", "ENS", "EVL", "MSI", "NDS", "NON", "SHB", "SWB"]
EXTRA = ["HQB", "LSB"]
N = len(TRACKED)

rng = random.Random(20081022)
abs_sums = [0] * 2 + [2] * 13 + [4] * 4 + [6] * 1
rng.shuffle(abs_sums)

start = dt.datetime(2008, 10, 22, 9, 0, 0, tzinfo=dt.timezone.utc)
rows = []
for w, s in enumerate(abs_sums):
    signed = s if rng.random() < 0.5 else -s
    buyers = set(rng.sample(TRACKED, (N + signed) // 2))
    t0 = start + dt.timedelta(minutes=10 * w)
    for trader in TRACKED:
        side = "buy" if trader in buyers else "sell"
        other = "sell" if side == "buy" else "buy"
        trades = [(side, rng.randint(300, 900))]
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.4:
                trades.append((other, rng.randint(10, 90)))
            else:
                trades.append((side, rng.randint(10, 200)))
        for side_i, qty in trades:
            ts = t0 + dt.timedelta(seconds=rng.randint(1, 598), microseconds=rng.randint(0, 999) * 1000)
            rows.append((ts, trader, side_i, qty))
    for trader in EXTRA:
        if rng.random() < 0.5:
            ts = t0 + dt.timedelta(seconds=rng.randint(1, 598))
            rows.append((ts, trader, rng.choice(["buy", "sell"]), rng.randint(100, 500)))

rows.sort(key=lambda r: (r[0], r[1]))
with open("steel_synthetic_2008-10-22.csv", "w", newline="\n") as f:
    f.write("# SYNTHETIC trade data: constructed to give the class counts (2, 13, 4, 1);\n")
    f.write("# not real market data. Regenerate with make_synthetic_steel.py.\n")
    f.write("trader_id,timestamp,side,quantity\n")
    for ts, trader, side, qty in rows:
        f.write(f"{trader},{ts.strftime('%Y-%m-%dT%H:%M:%S.%f')[:-3]}Z,{side},{qty}\n")

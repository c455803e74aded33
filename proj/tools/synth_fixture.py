#!/usr/bin/env python3
"""Generate the offline OHLCV fixtures under data/.

The build environment has no route to the chart API, so the fixtures are
synthetic: a seeded log-space Brownian bridge through hand-picked price
anchors that follow the coarse shape of each coin's real daily history
(2017-11-09 through 2022-01-13). Daily log-volatility is set per regime to
roughly match observed crypto volatility. Output is the standard Yahoo CSV
export layout.

Usage: python3 tools/synth_fixture.py [outdir]
"""

import datetime as dt
import json
import os
import sys

import numpy as np

START = dt.date(2017, 11, 9)
END = dt.date(2022, 1, 13)

# (date, close) anchors. Values are approximate monthly landmarks.
ANCHORS = {
    "EOS-USD": [
        ("2017-11-09", 0.90), ("2017-12-20", 9.5), ("2018-01-13", 19.0),
        ("2018-02-06", 6.5), ("2018-04-29", 21.5), ("2018-06-30", 8.3),
        ("2018-09-30", 5.6), ("2018-12-15", 1.75), ("2019-01-31", 2.4),
        ("2019-05-31", 8.0), ("2019-06-26", 7.5), ("2019-09-30", 2.8),
        ("2019-12-31", 2.6), ("2020-02-14", 4.7), ("2020-03-13", 1.80),
        ("2020-06-30", 2.35), ("2020-08-15", 3.3), ("2020-12-31", 2.6),
        ("2021-02-20", 4.8), ("2021-04-01", 6.0), ("2021-05-12", 13.5),
        ("2021-05-23", 4.5), ("2021-06-22", 3.3), ("2021-07-20", 3.2),
        ("2021-09-06", 5.8), ("2021-09-30", 4.2), ("2021-11-09", 5.0),
        ("2021-12-14", 3.0), ("2022-01-13", 3.2),
    ],
    "DOGE-USD": [
        ("2017-11-09", 0.0012), ("2018-01-07", 0.017), ("2018-02-06", 0.004),
        ("2018-12-15", 0.0021), ("2019-06-30", 0.0035), ("2020-03-13", 0.0016),
        ("2020-12-31", 0.0047), ("2021-01-29", 0.035), ("2021-04-16", 0.36),
        ("2021-05-08", 0.68), ("2021-06-22", 0.19), ("2021-09-06", 0.30),
        ("2021-10-28", 0.29), ("2022-01-13", 0.17),
    ],
    "ETH-USD": [
        ("2017-11-09", 320.0), ("2018-01-13", 1390.0), ("2018-04-06", 380.0),
        ("2018-05-05", 810.0), ("2018-12-15", 84.0), ("2019-06-26", 330.0),
        ("2019-12-18", 122.0), ("2020-03-13", 110.0), ("2020-09-01", 475.0),
        ("2020-12-31", 737.0), ("2021-05-12", 4100.0), ("2021-06-22", 1880.0),
        ("2021-11-09", 4810.0), ("2022-01-13", 3240.0),
    ],
    "BTC-USD": [
        ("2017-11-09", 7140.0), ("2017-12-17", 19500.0), ("2018-02-06", 6950.0),
        ("2018-12-15", 3240.0), ("2019-06-26", 12900.0), ("2019-12-18", 6640.0),
        ("2020-03-13", 4970.0), ("2020-12-31", 29000.0), ("2021-04-13", 63500.0),
        ("2021-07-20", 29800.0), ("2021-11-09", 67500.0), ("2022-01-13", 42600.0),
    ],
}

# Daily log-return volatility per calendar year.
VOL = {2017: 0.070, 2018: 0.060, 2019: 0.045, 2020: 0.045, 2021: 0.055, 2022: 0.045}


def bridge(rng, log_a, log_b, n, sigmas):
    """Brownian bridge of n steps from log_a to log_b with per-step sigma."""
    steps = rng.standard_normal(n) * sigmas
    walk = np.concatenate([[0.0], np.cumsum(steps)])
    t = np.linspace(0.0, 1.0, n + 1)
    walk = walk - t * walk[-1]
    return log_a + (log_b - log_a) * t + walk


def synth(ticker, seed):
    rng = np.random.default_rng(seed)
    anchors = [(dt.date.fromisoformat(d), v) for d, v in ANCHORS[ticker]]
    assert anchors[0][0] == START and anchors[-1][0] == END
    days = [START + dt.timedelta(days=k) for k in range((END - START).days + 1)]
    log_close = np.empty(len(days))
    for (d0, v0), (d1, v1) in zip(anchors, anchors[1:]):
        i0, i1 = (d0 - START).days, (d1 - START).days
        sig = np.array([VOL[(START + dt.timedelta(days=k)).year] for k in range(i0 + 1, i1 + 1)])
        log_close[i0:i1 + 1] = bridge(rng, np.log(v0), np.log(v1), i1 - i0, sig)
    close = np.exp(log_close)
    opens = np.concatenate([[close[0] * np.exp(rng.normal(0, 0.02))], close[:-1]])
    wick = np.abs(rng.normal(0.0, 0.02, size=(2, len(days))))
    high = np.maximum(opens, close) * (1.0 + wick[0])
    low = np.minimum(opens, close) * (1.0 - wick[1])
    base_volume = 1.0e9 / np.sqrt(close[0])
    volume = np.round(base_volume * np.exp(rng.normal(0, 0.5, len(days)))).astype(np.int64)
    return days, opens, high, low, close, volume


def fmt(x):
    # Yahoo exports carry six decimals.
    return f"{x:.6f}"


def write_csv(path, rows):
    days, opens, high, low, close, volume = rows
    with open(path, "w", newline="\n") as f:
        f.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
        for k, d in enumerate(days):
            c = fmt(close[k])
            f.write(f"{d.isoformat()},{fmt(opens[k])},{fmt(high[k])},{fmt(low[k])},{c},{c},{volume[k]}\n")


def chart_json(ticker, rows, first, count):
    """A chart-API shaped response covering rows[first:first+count]."""
    days, opens, high, low, close, volume = rows
    sl = slice(first, first + count)
    epoch = dt.datetime(1970, 1, 1)
    ts = [int((dt.datetime.combine(d, dt.time()) - epoch).total_seconds()) for d in days[sl]]
    r6 = lambda a: [round(float(x), 6) for x in a[sl]]
    return {
        "chart": {
            "result": [{
                "meta": {"currency": "USD", "symbol": ticker, "dataGranularity": "1d", "range": "max"},
                "timestamp": ts,
                "indicators": {
                    "quote": [{
                        "open": r6(opens), "high": r6(high), "low": r6(low),
                        "close": r6(close), "volume": [int(v) for v in volume[sl]],
                    }],
                    "adjclose": [{"adjclose": r6(close)}],
                },
            }],
            "error": None,
        }
    }


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(root, "data")
    for seed, ticker in enumerate(ANCHORS, start=2017):
        rows = synth(ticker, seed)
        write_csv(f"{out}/{ticker}.csv", rows)
        if ticker == "EOS-USD":
            with open(os.path.join(root, "tests", "fixtures", "eos_chart_response.json"), "w") as f:
                json.dump(chart_json(ticker, rows, 0, 3), f, indent=1)
                f.write("\n")


if __name__ == "__main__":
    main()

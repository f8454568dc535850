#!/usr/bin/env python3
"""Generate the bundled reference weather files.

The files are synthetic typical years built from monthly climate normals:
smooth seasonal temperature and dew-point curves, a diurnal cycle, an AR(1)
synoptic anomaly, and clear-sky irradiance (Haurwitz) scaled by a daily
cloudiness draw and split into beam/diffuse with the Erbs correlation.
Output follows the simulator's weather CSV schema. Deterministic (fixed seed).

    python3 scripts/gen_weather.py data/weather
"""
import math
import sys
from pathlib import Path

import numpy as np

YEAR = 2023
SOLAR_CONSTANT = 1367.0

SITES = {
    "trondheim": dict(
        lat=63.43, lon=10.40, utc=1, seed=11,
        t=[-2.5, -2.0, 0.5, 4.5, 9.0, 12.5, 15.0, 14.5, 10.5, 5.5, 1.5, -1.5],
        amp=[1.5, 2.0, 3.0, 4.0, 4.5, 4.5, 4.0, 4.0, 3.5, 2.5, 1.5, 1.5],
        dep=[2.5, 3.0, 4.0, 5.0, 5.5, 5.0, 4.5, 4.0, 3.5, 3.0, 2.5, 2.5],
        cloud=[0.40, 0.45, 0.52, 0.56, 0.60, 0.60, 0.60, 0.57, 0.53, 0.46, 0.40, 0.37],
        synoptic=2.5,
    ),
    "shanghai": dict(
        lat=31.23, lon=121.47, utc=8, seed=23,
        t=[4.5, 6.0, 10.0, 15.5, 20.5, 24.5, 28.5, 28.5, 24.5, 19.5, 13.5, 7.0],
        amp=[3.5, 3.5, 3.5, 4.0, 4.0, 3.5, 3.5, 3.5, 3.5, 4.0, 4.0, 3.5],
        dep=[5.0, 5.0, 5.0, 5.0, 4.5, 3.0, 3.0, 3.0, 4.0, 5.0, 5.5, 5.5],
        cloud=[0.53, 0.53, 0.56, 0.60, 0.60, 0.53, 0.64, 0.66, 0.60, 0.62, 0.57, 0.56],
        synoptic=1.8,
    ),
    "dubai": dict(
        lat=25.20, lon=55.27, utc=4, seed=37,
        t=[19.5, 20.5, 23.0, 27.0, 31.5, 33.5, 35.5, 35.5, 33.0, 29.5, 25.0, 21.0],
        amp=[4.0, 4.5, 5.0, 6.0, 6.5, 6.0, 5.5, 5.0, 5.5, 5.5, 5.0, 4.5],
        dep=[7.5, 7.5, 9.0, 12.0, 14.5, 12.5, 11.5, 10.5, 10.0, 9.5, 9.0, 7.0],
        cloud=[0.80, 0.83, 0.83, 0.87, 0.91, 0.89, 0.84, 0.83, 0.85, 0.87, 0.83, 0.80],
        synoptic=1.0,
    ),
}


def monthly_curve(values, doy):
    """Periodic cosine interpolation between mid-month values."""
    mids = [15.0 + 30.42 * m for m in range(12)]
    x = doy
    for m in range(12):
        a, b = mids[m], mids[(m + 1) % 12] + (365.0 if m == 11 else 0.0)
        xx = x if x >= mids[0] else x + 365.0
        if a <= xx < b:
            w = (1 - math.cos(math.pi * (xx - a) / (b - a))) / 2
            return values[m] * (1 - w) + values[(m + 1) % 12] * w
    return values[0]


def sun(lat, lon, utc, doy, hour):
    g = 2 * math.pi / 365 * (doy - 1 + (hour - 12) / 24)
    eot = 229.18 * (0.000075 + 0.001868 * math.cos(g) - 0.032077 * math.sin(g)
                    - 0.014615 * math.cos(2 * g) - 0.040849 * math.sin(2 * g))
    decl = (0.006918 - 0.399912 * math.cos(g) + 0.070257 * math.sin(g)
            - 0.006758 * math.cos(2 * g) + 0.000907 * math.sin(2 * g)
            - 0.002697 * math.cos(3 * g) + 0.00148 * math.sin(3 * g))
    tst = hour * 60 + eot + 4 * lon - 60 * utc
    ha = math.radians(tst / 4 - 180)
    la = math.radians(lat)
    cosz = math.sin(la) * math.sin(decl) + math.cos(la) * math.cos(decl) * math.cos(ha)
    e0 = 1 + 0.033 * math.cos(2 * math.pi * doy / 365)
    return cosz, e0


def magnus(t):
    return 0.6108 * math.exp(17.27 * t / (t + 237.3))


def erbs(kt):
    if kt <= 0.22:
        return 1 - 0.09 * kt
    if kt <= 0.80:
        return 0.9511 - 0.1604 * kt + 4.388 * kt**2 - 16.638 * kt**3 + 12.336 * kt**4
    return 0.165


def generate(name, site, out):
    rng = np.random.default_rng(site["seed"])
    days = 365
    anomaly = np.zeros(days + 1)
    for d in range(1, days + 1):
        anomaly[d] = 0.8 * anomaly[d - 1] + rng.normal(0, site["synoptic"] * 0.6)
    cloud = []
    for d in range(days):
        m = monthly_curve(site["cloud"], d + 1)
        a = 6.0 * m
        b = 6.0 * (1 - m)
        cloud.append(float(np.clip(rng.beta(a, b), 0.08, 1.0)))
    lines = ["timestamp,t_ext_c,rh_ext,ghi_wm2,dni_wm2,dhi_wm2"]
    for d in range(days):
        doy = d + 1
        tm = monthly_curve(site["t"], doy)
        amp = monthly_curve(site["amp"], doy)
        dep = monthly_curve(site["dep"], doy)
        for h in range(24):
            frac = h / 24.0
            anom = anomaly[d] * (1 - frac) + anomaly[d + 1] * frac
            t = tm + anom - amp * math.cos(2 * math.pi * (h - 4) / 24)
            td = tm + anom - dep
            rh = min(1.0, magnus(td) / magnus(t))
            cosz, e0 = sun(site["lat"], site["lon"], site["utc"], doy, h + 0.5)
            if cosz > 0.01:
                clear = 1098 * cosz * math.exp(-0.057 / cosz)
                ghi = clear * cloud[d]
                kt = min(ghi / (SOLAR_CONSTANT * e0 * cosz), 1.0)
                dhi = ghi * erbs(kt)
                dni = (ghi - dhi) / cosz
            else:
                ghi = dni = dhi = 0.0
            lines.append(
                f"{timestamp(doy, h)},{t:.2f},{rh:.3f},{ghi:.1f},{dni:.1f},{dhi:.1f}"
            )
    (out / f"{name}.csv").write_text("\n".join(lines) + "\n")


def timestamp(doy, hour):
    import datetime
    d = datetime.date(YEAR, 1, 1) + datetime.timedelta(days=doy - 1)
    return f"{d.isoformat()}T{hour:02d}:00"


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/weather")
    out.mkdir(parents=True, exist_ok=True)
    for name, site in SITES.items():
        generate(name, site, out)

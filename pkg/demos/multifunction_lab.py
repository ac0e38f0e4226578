"""Sampled moduli of one-dimensional set-valued maps.

Each fixture is estimated on nested neighborhoods; a modulus that keeps
exceeding the cap on the last two levels is reported as diverged.  Run
with ``python3 demos/multifunction_lab.py``.
"""
from hoffman import Schedule, estimate_moduli, fixture, polygon_fixture

cases = [("staircase", 0.0, dict(R=1e10), Schedule(radii=(1e-1, 1e-2, 1e-3), cap=1e6)),
         ("step", 0.0, {}, Schedule(cap=1e6)),
         ("interval", -1.0, {}, Schedule(cap=1e6)),
         ("truncated-halfline", -0.5, {}, Schedule()),
         ("truncated-halfline", 0.5, {}, Schedule())]

print(f"{'fixture':<20}{'y_bar':>7}{'sup_clm':>12}{'uclm':>12}{'lipusc':>12}{'hof':>12}  diverged")
for name, y_bar, kw, sched in cases:
    est = estimate_moduli(fixture(name, y_bar, **kw), sched)
    div = [k for k, v in est.diverged.items() if v]
    print(f"{name:<20}{y_bar:>7.2f}{float(est.sup_clm):>12.4g}{float(est.uclm):>12.4g}"
          f"{float(est.lipusc):>12.4g}{float(est.hof):>12.4g}  {', '.join(div) or '-'}")

# polyhedral maps: all four moduli agree
est = estimate_moduli(polygon_fixture(0))
print("polygon fixture:", [round(float(v), 4) for v in (est.sup_clm, est.uclm, est.lipusc, est.hof)])

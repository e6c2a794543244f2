"""
Fault injection and replay cost
===============================

Inject single-bit faults at four pipeline stages and measure how far the
garbled stream and the digest move. A single flipped bit should move the
digest by about half its bits at every stage. The replay brute-force cost
grows with the garbled length.
"""

from safesip.harness import complexity_report, hd_sweep

report = hd_sweep(kappas=[16, 64], widths=[64], trials=1000, seed=3, stage="all")
print(f"{'kappa':>5} {'width':>5} {'stage':15} {'garbled %':>10} {'digest %':>9}")
for r in report.rows:
    print(f"{r.kappa:5} {r.width:5} {r.stage:15} {r.mean_hd_garbled_pct:10.3f} "
          f"{r.mean_hd_digest_pct:9.2f}")

print()
for row in complexity_report([(64, 64), (32, 32), (64, 16)]):
    print(f"W={row['width']:3} kappa={row['kappa']:3} g={row['g']:5} log2(TC)={row['log2_tc']}")

"""One chain, two fillings, two different spectral limits
=========================================================

The same two-state chain fills two matrices: along diagonals, the spectrum
converges to the semicircle; row by row, the fourth moment stays bounded
away from the semicircle value 2.  This is the package's headline
experiment; the CLI's reproduce-fig1 mode writes the same comparison to
CSV for rendering.
"""

from specfill import BinaryChain, fourth_moment_margin

spec = BinaryChain(0.7)
sizes = [200, 400, 800]
trials = 16

print(f"E[(1/N) tr A^4] for the two-state chain p=0.7, {trials} trials per size")
print("      N     diagonal (margin, z)          rowwise (margin, z)")
rows = {
    kind: fourth_moment_margin(spec, kind, sizes, trials=trials, seed=42)
    for kind in ("diagonal", "rowwise")
}
for d_est, r_est in zip(rows["diagonal"], rows["rowwise"]):
    print(
        f"  {d_est.n:5d}   {d_est.mean:.4f} ({d_est.margin:+.4f}, z={d_est.zscore:+6.1f})"
        f"     {r_est.mean:.4f} ({r_est.margin:+.4f}, z={r_est.zscore:+6.1f})"
    )

print(
    "\nThe diagonal margins hover near zero while the row-wise margins sit"
    "\nmany standard errors above it: only the diagonal filling keeps the"
    "\nsemicircle's fourth moment.  To reproduce the figure-style output:"
    "\n\n    specfill reproduce-fig1 --n 2000 --trials 5 --out fig1"
    "\n    python plots/render.py --hist fig1/histogram_diagonal.csv \\"
    "\n        --curve fig1/semicircle.csv --out fig1/diagonal.png"
)

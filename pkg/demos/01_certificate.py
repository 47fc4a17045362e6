"""Which convex functions break additivity for two copies of the 3-dimensional Werner-Holevo channel?

The quick test compares the maximally entangled output spectrum {1/3, 1/12 x8}
against the best product output spectrum {1/4 x4, 0 x5}. When the entangled
side wins, the pair is certified non-additive for that function.
"""

from addlab.experiments import exhw_certificate
from addlab.functions import Kink, Power, XLogX

print(f"{'function':<12}{'entangled':>14}{'product':>14}  verdict")
for f in [Power(2), Power(4), Power(4.8), Power(5), Power(8), XLogX(), Kink(0.2), Kink(0.3)]:
    cert = exhw_certificate(f)
    verdict = "non-additive" if cert.non_additive else "inconclusive"
    print(f"{f.spec:<12}{cert.lhs:>14.6g}{cert.rhs:>14.6g}  {verdict}")

print("\nThe power family flips between p = 4.75 and p = 4.8:")
for p in (4.7, 4.75, 4.8, 4.85, 4.9):
    print(f"  p = {p:<5} non_additive = {exhw_certificate(Power(p)).non_additive}")

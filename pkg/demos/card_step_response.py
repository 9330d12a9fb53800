"""
Step response of the sensor card
================================

A black-body enclosure jumps from 25 °C to 100 °C and we watch pixel B2.
The card has no controller in the loop, so its single-exponential fit
gives the card's own time constant and the settling time into a ±1 %
band. The first-generation 4×4 card with 10 mm plates is much slower.
"""

from irchamber import builtin_scenario, run_scenario

for name in ("blackbody100", "legacy44"):
    art = run_scenario(builtin_scenario(name))
    fit = art.settling
    print(f"{name:13s} tau {fit.tau:5.1f} s   settling {fit.settling_time:5.0f} s   "
          f"T_inf {fit.t_infinity:6.2f} °C")

###############################################################################
# The pixel is read back through the full chain (diode, amplifier, 10 bit
# ADC, serial frame, calibration), so the curve is quantised in steps of
# about 0.24 °C. The fit does not care:

art = run_scenario(builtin_scenario("blackbody100"))
t, pix = art.series["t"], art.series["pixel"]
fit = art.settling
for k in (0, 10, 30, 60, 120, 240):
    print(f"t = {t[k]:4.0f} s  measured {pix[k]:7.2f}  fitted {float(fit(t[k])):7.2f}")

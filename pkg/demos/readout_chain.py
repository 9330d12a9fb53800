"""
From junction temperature to calibrated map
===========================================

Walk one frame through the readout: the diode law, the amplifier and
ADC, the 67-byte serial frame, a noisy link and the host decoder.
"""

import numpy as np

from irchamber import (
    DiodeModel,
    SensorCardGeometry,
    SignalChainModel,
    calibrate,
    codes_to_map,
    encode_frame,
    forward_voltage,
    adc_quantize,
    scan_frame,
)
from irchamber.frames import FrameDecoder

card, chain, diode = SensorCardGeometry(), SignalChainModel(), DiodeModel()

for temp in (20.0, 25.0, 26.0, 100.0, 120.0):
    v = forward_voltage(diode, temp)
    print(f"{temp:6.1f} °C -> {v:.4f} V -> code {adc_quantize(chain, v)}")

###############################################################################
# Calibrate against two uniform plateaus, then scan a card with a gentle
# gradient across it.

n = card.n_pixels
low = scan_frame(card, chain, diode, np.full(n, 20.0), 0)
high = scan_frame(card, chain, diode, np.full(n, 120.0), 1)
table = calibrate((low, 20.0), (high, 120.0), card)
print(f"\ngain {table.gain[0]:.4f} °C/code, offset {table.offset[0]:.2f} °C")

truth = 80.0 + np.linspace(0, 3, n)
wire = encode_frame(scan_frame(card, chain, diode, truth, 2))
print("frame:", wire[:8].hex(" "), "...", wire[-3:].hex(" "), f"({len(wire)} bytes)")

###############################################################################
# Prepend some line noise (with a stray sync byte) and split the stream
# into odd-sized chunks; the decoder resynchronises and recovers the frame.

rng = np.random.default_rng(0)
noisy = bytes([0x13, 0xAA, 0x00, 0x7F]) + wire
dec = FrameDecoder()
frames = []
for i in range(0, len(noisy), 23):
    frames += dec.feed(noisy[i : i + 23])
print(f"decoded {len(frames)} frame, skipped {dec.skipped} bytes")

tmap = codes_to_map(frames[0], table, card, reference=81.5)
err = tmap.grid.ravel() - truth
print(f"map error: max {np.abs(err).max():.3f} °C (one code is {abs(table.gain[0]):.3f} °C)")

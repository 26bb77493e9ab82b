#!/usr/bin/env python3
"""Generates assets/speech.wav, the deterministic speech-like test signal.

Synthetic "vowel babble": a pitch-modulated pulse train shaped by slowly
morphing formant resonators, grouped into syllables and words, with
fricative noise bursts at some syllable onsets and a low breath-noise
floor so every third-octave band up to 16 kHz carries energy. Entirely
seeded; rerunning this script reproduces the checked-in file bit for bit.
"""

import struct
import numpy as np

RATE = 48000
SECONDS = 3.26
N = int(RATE * SECONDS)
rng = np.random.default_rng(48151623)

# ---- syllable/word timing grid ----------------------------------------
events = []  # (start, length, vowel index, fricative?, plosive?, base pitch)
t = int(0.08 * RATE)
vowel_count = 5
while t < N - int(0.3 * RATE):
    word_syllables = int(rng.integers(2, 5))
    for s in range(word_syllables):
        length = int(RATE * (0.12 + 0.08 * rng.random()))
        if t + length > N - int(0.05 * RATE):
            break
        vowel = int(rng.integers(0, vowel_count))
        fric = bool(rng.random() < 0.45)
        plos = bool(rng.random() < 0.55)
        # log-uniform base pitch so low bands see several distinct harmonics
        base = 95.0 * (215.0 / 95.0) ** rng.random()
        events.append((t, length, vowel, fric, plos, base))
        t += length + int(RATE * (0.02 + 0.02 * rng.random()))
    t += int(RATE * (0.08 + 0.08 * rng.random()))  # word gap

# ---- voiced excitation: per-syllable pulse train -----------------------
# Each syllable gets its own declining pitch contour plus vibrato, so the
# first harmonic sweeps about a fifth of an octave per syllable and the
# ensemble covers 90..240 Hz instead of clustering around one pitch.
excitation = np.zeros(N)
vib = 4.8  # Hz
for start, length, _, _, _, base in events:
    seg = np.arange(length)
    contour = base * (1.12 - 0.20 * seg / length) \
        * (1.0 + 0.015 * np.sin(2 * np.pi * vib * seg / RATE))
    phase = np.cumsum(contour / RATE)
    pulse_at = np.flatnonzero(np.diff(np.floor(phase)) > 0)
    jitter = (rng.random(pulse_at.size) * 3).astype(int)
    pulse_at = np.clip(pulse_at + jitter, 0, length - 1)
    excitation[start + pulse_at] = 1.0
# soften the pulses (one-pole lowpass twice)
for _ in range(2):
    excitation = np.append(excitation[0], excitation[1:] + 0.7 * excitation[:-1])
    excitation = excitation[:N]

# ---- formant targets (Hz, bandwidth Hz) per vowel ----------------------
formants = {
    0: [(730, 90), (1090, 110), (2440, 160), (3400, 250)],  # a
    1: [(530, 80), (1840, 120), (2480, 160), (3500, 250)],  # e
    2: [(270, 70), (2290, 130), (3010, 170), (3700, 260)],  # i
    3: [(570, 80), (840, 100), (2410, 160), (3300, 250)],   # o
    4: [(300, 70), (870, 100), (2240, 160), (3280, 250)],   # u
}

voiced = np.zeros(N)
envelope = np.zeros(N)
for start, length, vowel, _, _, _ in events:
    seg = np.arange(length)
    attack = int(0.015 * RATE)
    release = int(0.035 * RATE)
    env = np.ones(length)
    env[:attack] = np.linspace(0, 1, attack)
    env[-release:] *= np.linspace(1, 0, release)
    envelope[start:start + length] = np.maximum(
        envelope[start:start + length], env)
    block = excitation[start:start + length] * env
    out = np.zeros(length)
    for fc, bw in formants[vowel]:
        r = np.exp(-np.pi * bw / RATE)
        theta = 2 * np.pi * fc / RATE
        a1, a2 = 2 * r * np.cos(theta), -r * r
        y = np.zeros(length)
        y1 = y2 = 0.0
        for i in range(length):
            y0 = block[i] + a1 * y1 + a2 * y2
            y[i] = y0
            y2, y1 = y1, y0
        out += y * (1.0 / (1.0 - r))
    voiced[start:start + length] += out * (0.8 + 0.4 * rng.random())

# ---- fricative bursts: shaped high noise at syllable onsets ------------
fric = np.zeros(N)
for start, length, _, has_fric, _, _ in events:
    if not has_fric:
        continue
    flen = int(0.05 * RATE)
    if start < flen:
        continue
    noise = rng.standard_normal(flen)
    spec = np.fft.rfft(noise)
    f = np.fft.rfftfreq(flen, 1 / RATE)
    shape = np.where(f < 2500, 0.05, 1.0) * np.exp(-((f - 6500) / 6000) ** 2)
    noise = np.fft.irfft(spec * shape, flen)
    ramp = np.minimum(np.linspace(0, 4, flen), np.linspace(4, 0, flen))
    fric[start - flen // 2:start - flen // 2 + flen] += \
        noise * np.clip(ramp, 0, 1) * 2.2

# ---- plosive thumps: broadband low bursts at voiced onsets -------------
# Stops (b/d/g) put genuinely wideband energy under 1 kHz; without them
# the low bands would carry nothing but isolated harmonic clusters.
plos = np.zeros(N)
for start, length, _, _, has_plos, _ in events:
    if not has_plos:
        continue
    plen = int(0.030 * RATE)
    if start < plen:
        continue
    noise = rng.standard_normal(plen)
    spec = np.fft.rfft(noise)
    f = np.fft.rfftfreq(plen, 1 / RATE)
    shape = np.exp(-((f - 220.0) / 420.0) ** 2)
    shape[f < 55.0] = 0.0
    noise = np.fft.irfft(spec * shape, plen)
    env = np.hanning(plen) ** 0.6
    plos[start - plen // 3:start - plen // 3 + plen] += noise * env

# ---- breath floor: pink-tilted noise, keeps every band alive ----------
noise = rng.standard_normal(N)
spec = np.fft.rfft(noise)
f = np.fft.rfftfreq(N, 1 / RATE)
tilt = 1.0 / np.sqrt(np.maximum(f, 45.0))
tilt *= 1.0 + 1.5 * np.exp(-((f - 160.0) / 220.0) ** 2)  # chest resonance
tilt[f < 40.0] = 0.0
breath = np.fft.irfft(spec * tilt, N)
breath /= np.max(np.abs(breath))

signal = voiced / np.max(np.abs(voiced))
signal += fric / max(np.max(np.abs(fric)), 1e-12) * 0.35
signal += plos / max(np.max(np.abs(plos)), 1e-12) * 0.55
signal += breath * 0.012

# final band edge: microphone chains roll off below 40 Hz anyway, and the
# renderer's equalizer deliberately leaves that region untouched
spec = np.fft.rfft(signal)
f = np.fft.rfftfreq(N, 1 / RATE)
spec[f < 40.0] = 0.0
signal = np.fft.irfft(spec, N)
signal *= 0.9 / np.max(np.abs(signal))

# ---- 16-bit mono WAV ----------------------------------------------------
pcm = np.clip(np.rint(signal * 32767.0), -32768, 32767).astype("<i2")
data = pcm.tobytes()
with open("assets/speech.wav", "wb") as out:
    out.write(b"RIFF" + struct.pack("<I", 36 + len(data)) + b"WAVE")
    out.write(b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, RATE,
                                    RATE * 2, 2, 16))
    out.write(b"data" + struct.pack("<I", len(data)))
    out.write(data)
print(f"assets/speech.wav: {N} samples, {N / RATE:.2f} s")

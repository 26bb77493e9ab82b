#!/usr/bin/env python3
"""Generates assets/hrtf.dat, the checked-in dummy-head receiver set.

Acoustically plausible stand-in for a measured database: sound pressure on
a rigid sphere (radius 8.75 cm) with ear points at azimuth +/-100 degrees,
evaluated analytically per direction and sampled as 128-tap impulse
responses at 48 kHz. The construction gives the set the spatial statistics
that matter downstream: interaural delay and level cues, head shadowing,
and spherical-harmonic content that decays with order at low frequencies
instead of being spectrally white. Directions lie on a Gauss-Legendre x
uniform-azimuth grid (31 x 62 = 1922 points) so an order-30 fit is well
conditioned. Deterministic; rerunning reproduces the file bit for bit.
"""

import struct
import numpy as np

RATE = 48000
NTAP = 128
NFFT = 256
RADIUS = 0.0875  # m
SPEED = 343.0    # m/s
NMAX = 70        # series terms; plenty for ka <= 40

# ---- direction grid: Gauss-Legendre colatitudes x uniform azimuths -----
gl_nodes, _ = np.polynomial.legendre.leggauss(31)
thetas = np.arccos(gl_nodes)          # colatitude in (0, pi)
azs = 2 * np.pi * np.arange(62) / 62.0
azs = np.where(azs >= np.pi, azs - 2 * np.pi, azs)  # [-pi, pi)
th, az = np.meshgrid(thetas, azs, indexing='ij')
th = th.ravel(); az = az.ravel()
dirs = np.stack([np.sin(th) * np.cos(az),
                 np.sin(th) * np.sin(az),
                 np.cos(th)], axis=1)

EAR_AZ = np.deg2rad(100.0)
ears = {
    'left':  np.array([np.cos(EAR_AZ),  np.sin(EAR_AZ), 0.0]),
    'right': np.array([np.cos(-EAR_AZ), np.sin(-EAR_AZ), 0.0]),
}

# ---- rigid-sphere surface pressure for plane-wave incidence ------------
# H(ka, theta) = 1/(ka)^2 * sum_n (2n+1) i^(n-1) P_n(cos theta) / h_n'(ka),
# normalized so the free-field incident wave has unit amplitude; h_n is the
# spherical Hankel function of the first kind. Terms with n much larger
# than ka vanish; the loop drops them once the Hankel magnitude overflows
# the useful range.
def sphere_response(ka, costheta):
    if ka <= 0.0:
        return np.ones_like(costheta, dtype=complex)
    x = ka
    # spherical Hankel h_n(x) by upward recurrence (stable: y_n dominates)
    h = np.empty(NMAX + 2, dtype=complex)
    h[0] = -1j * np.exp(1j * x) / x
    h[1] = -(1.0 / x + 1j / (x * x)) * np.exp(1j * x)
    for n in range(1, NMAX + 1):
        h[n + 1] = (2 * n + 1) / x * h[n] - h[n - 1]
    acc = np.zeros_like(costheta, dtype=complex)
    p_prev = np.ones_like(costheta)          # P_{n-1}
    p_cur = costheta.copy()                  # P_n (from n = 1 on)
    for n in range(0, NMAX + 1):
        hd = -h[1] if n == 0 else h[n - 1] - (n + 1) / x * h[n]
        if not np.isfinite(hd) or abs(hd) > 1e120:
            break
        if n == 0:
            pn = p_prev
        elif n == 1:
            pn = p_cur
        else:
            pn = ((2 * n - 1) * costheta * p_cur - (n - 1) * p_prev) / n
            p_prev, p_cur = p_cur, pn
        acc += (2 * n + 1) * (1j ** (n - 1)) * pn / hd
    # minus sign fixes the series' phase reference so H -> +1 as ka -> 0,
    # matching the hand-set DC bin
    return -acc / (x * x)

freqs = np.arange(NFFT // 2 + 1) * RATE / NFFT
irs = {}
for ear, evec in ears.items():
    # series angle runs from the propagation direction (= minus the source
    # direction), and its e^{-iwt} time convention needs a conjugate to
    # match the FFT's delay sign
    cosang = -(dirs @ evec)
    spec = np.empty((len(dirs), NFFT // 2 + 1), dtype=complex)
    spec[:, 0] = 1.0
    for k, f in enumerate(freqs):
        if k == 0:
            continue
        ka = 2 * np.pi * f * RADIUS / SPEED
        spec[:, k] = np.conj(sphere_response(ka, cosang))
    # time alignment: the series references the sphere centre, so arrivals
    # span +/- a/c around zero; delay by 1 ms to make every IR causal
    delay = 0.001
    spec *= np.exp(-2j * np.pi * freqs * delay)
    ir = np.fft.irfft(spec, NFFT, axis=1)[:, :NTAP]
    # fade the tail so truncation at 128 taps is inaudible in the fit
    fade = 0.5 * (1 + np.cos(np.pi * np.arange(16) / 16.0))
    ir[:, -16:] *= fade
    irs[ear] = ir

# sanity: interaural delay sign (source at left ear azimuth hits left first)
probe = np.argmin(np.abs(th - np.pi / 2) + np.abs(az - EAR_AZ))
tl = np.argmax(np.abs(irs['left'][probe]))
tr = np.argmax(np.abs(irs['right'][probe]))
assert tl < tr, (tl, tr)

# ---- native container ---------------------------------------------------
with open('assets/hrtf.dat', 'wb') as out:
    header = ['SFRHRTF1',
              f'directions {len(dirs)}',
              f'irLength {NTAP}',
              'rate 48000',
              'table']
    rows = [f'{t:.17g} {a:.17g}' for t, a in zip(th, az)]
    out.write(('\n'.join(header + rows) + '\ndata\n').encode())
    out.write(irs['left'].astype('<f4').tobytes())
    out.write(irs['right'].astype('<f4').tobytes())
print(f"assets/hrtf.dat: {len(dirs)} directions, {NTAP} taps")

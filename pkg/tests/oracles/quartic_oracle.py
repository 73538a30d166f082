"""Independent high-precision oracle for the quartic well ``U = lam x**4/4``.

Run once to regenerate ``tests/data/quartic_golden.json``; the library's own
quadrature is never used here. Closed form for the action:
``J(E) = (2/pi) sqrt(2 m E) a B(1/4, 3/2)/4`` with ``a = (4E/lam)**(1/4)``.
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

M, LAM, HBAR = mp.mpf(1), mp.mpf(1), mp.mpf(1)
N_WAVE = 3
X_TABLE = [mp.mpf(i) / 4 for i in range(-16, 17)]


def U(x):
    return LAM * x ** 4 / 4


def action(E):
    a = (4 * E / LAM) ** mp.mpf(0.25)
    return 2 / mp.pi * mp.sqrt(2 * M * E) * a * mp.beta(mp.mpf(1) / 4, mp.mpf(3) / 2) / 4


def energy(J):
    # J is proportional to E**(3/4)
    return (J / action(mp.mpf(1))) ** (mp.mpf(4) / 3)


def omega(E):
    dJdE = mp.diff(action, E)
    return 1 / dJdE


def turning(E):
    return (4 * E / LAM) ** mp.mpf(0.25)


def w_plus(E, x):
    xi = turning(E)
    return mp.quad(lambda y: mp.sqrt(max(2 * M * (E - U(y)), 0)), [x, xi])


def w_tilde(E, x):
    xi = turning(E)
    return mp.quad(lambda y: mp.sqrt(max(2 * M * (U(y) - E), 0)), [xi, abs(x)])


def airy(E):
    xi = turning(E)
    return (HBAR ** 2 / (M * LAM * xi ** 3)) ** (mp.mpf(1) / 3)


def waveform(n, xs, window=2):
    J = HBAR * (n + mp.mpf(1) / 2)
    E = energy(J)
    w = omega(E)
    xi = turning(E)
    d = airy(E)
    a = 1 / mp.sqrt(2 * mp.pi)
    rows = []
    for x in xs:
        if abs(abs(x) - xi) <= window * d:
            continue
        if abs(x) < xi:
            p = mp.sqrt(2 * M * (E - U(x)))
            val = 2 * a * mp.cos(w_plus(E, x) / HBAR - mp.pi / 4) * mp.sqrt(M * w / p)
        else:
            q = mp.sqrt(2 * M * (U(x) - E))
            side = 1 if x > 0 else (-1) ** n
            val = side * a * mp.exp(-w_tilde(E, x) / HBAR) * mp.sqrt(M * w / q)
        rows.append([float(x), float(val)])
    return rows


def main():
    J1 = action(mp.mpf(1))
    E0 = energy(HBAR / 2)
    xi0 = turning(E0)
    data = {
        "params": {"m": 1.0, "lambda": 1.0, "hbar": 1.0},
        "J_of_E1": float(J1),
        "ebk_E0": float(E0),
        "ebk_omega0": float(omega(E0)),
        "ebk0_W_minus_at_0": float(mp.pi * HBAR / 4),
        "ebk0_Wtilde_at_1p5_xi": float(w_tilde(E0, mp.mpf(1.5) * xi0)),
        "ebk3_E": float(energy(HBAR * mp.mpf(3.5))),
        "ebk3_waveform": waveform(N_WAVE, X_TABLE),
    }
    out = Path(__file__).resolve().parents[1] / "data" / "quartic_golden.json"
    out.write_text(json.dumps(data, indent=1) + "\n")
    print(json.dumps({k: v for k, v in data.items() if k != "ebk3_waveform"}, indent=1))


if __name__ == "__main__":
    main()

"""High-precision reference computations, independent of the package code."""

import mpmath as mp

mp.mp.dps = 40


def weight(k, alpha, beta, jain=False):
    """Direct formula for one weight in 40-digit arithmetic (0**0 = 1)."""
    a, b, k = mp.mpf(alpha), mp.mpf(beta), int(k)
    c = a + b * k
    if jain:
        if k == 0:
            return mp.e ** (-a)
        if a == 0:
            return mp.mpf(0)
        return a * c ** (k - 1) * mp.e ** (-c) / mp.factorial(k)
    ck = mp.mpf(1) if k == 0 else c ** k
    return (1 - b) * ck * mp.e ** (-c) / mp.factorial(k)


def series(g, alpha, beta, jain=False, tol=mp.mpf(10) ** -30):
    """Brute-force sum_k weight(k) g(k), stopping well past the bulk."""
    a, b = mp.mpf(alpha), mp.mpf(beta)
    mean = a / (1 - b) + b / (1 - b) ** 2
    total, k = mp.mpf(0), 0
    while True:
        w = weight(k, a, b, jain)
        total += w * g(k)
        if k > mean + 20 and abs(w * g(k)) < tol and w < tol:
            return total
        k += 1


def p_exp_decay(n, beta, x):
    """P_n^[beta](e^-t, x) in closed form through the Lambert W function."""
    a, b = mp.mpf(n) * x, mp.mpf(beta)
    if b == 0:
        return mp.e ** (a * (mp.e ** (-mp.mpf(1) / n) - 1))
    z = -mp.lambertw(-b * mp.e ** (-b - mp.mpf(1) / n)).real / b
    return (1 - b) * mp.e ** (a * (z - 1)) / (1 - b * z)


def jain_exp_decay(n, beta, x):
    """J_n^[beta](e^-t, x) in closed form through the Lambert W function."""
    a, b = mp.mpf(n) * x, mp.mpf(beta)
    if b == 0:
        return mp.e ** (a * (mp.e ** (-mp.mpf(1) / n) - 1))
    z = -mp.lambertw(-b * mp.e ** (-b - mp.mpf(1) / n)).real / b
    return mp.e ** (a * (z - 1))

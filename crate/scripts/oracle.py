"""Independent high-precision reference values for the test suite.

Plain mpmath at 256+ bits, no shared code with the Rust crates. Run with
`python3 scripts/oracle.py`; the printed values are frozen into tests.
"""
from mpmath import mp, mpf, exp, pi, sqrt, nsum, inf, quad, diff, log

mp.prec = 512


def theta4(y, nu=0, K=200):
    s = mpf(0)
    for k in range(-K, K + 1):
        s += (-1) ** k * (-pi * k * k) ** nu * exp(-pi * k * k * y)
    return s


def theta2(y, nu=0, K=200):
    s = mpf(0)
    for n in range(-K, K):
        m = n + mpf(1) / 2
        s += (-pi * m * m) ** nu * exp(-pi * m * m * y)
    return s


def f(y):
    return y * y * theta4(y, 1) / theta4(y, 0)


def f1(y):
    return diff(f, y)


def f2(y):
    return diff(f, y, 2)


def fa2(a, y):
    return diff(lambda t: t ** a * theta4(t, 1) / theta4(t, 0), y, 2)


def g(y):
    E = exp(pi * y)
    return 2 * (E - 1) ** 2 - 4 * y * pi * E * (E - 1) + pi ** 2 * y ** 2 * E * (E + 1)


def envelope(nu, y, c=0):
    return 2 * pi ** nu * exp(-pi * y / 4) / 4 ** nu + 2 * (1 + c) * 9 ** nu * pi ** nu * exp(-9 * pi * y / 4) / 4 ** nu


def tail_integral(nu, y):
    return quad(lambda t: t ** nu * exp(-pi * t * y / 4), [24, 100, inf])


if __name__ == "__main__":
    mp.dps = 60
    print("pi", pi)
    for y in [mpf(1), mpf(10), mpf("0.5"), mpf(2), mpf(5), mpf("0.1")]:
        print("theta4", y, [theta4(y, nu) for nu in range(4)])
    print("theta2(2)", theta2(2), "two-term", 2 * exp(-pi / 2), 2 * exp(-pi / 2) + 2 * exp(-9 * pi / 2) * mpf("1.001"))
    print("theta2(1)", theta2(1))
    print("f(1)", f(1), "f(10)", f(10), "f(0.01)", f(mpf("0.01")), "pi/4", pi / 4)
    print("f'(1)", f1(1), "f''(1)", f2(1), "f''(2)", f2(2))
    print("g(1)", g(1), "g'(1)", diff(g, 1), "g''(1)", diff(g, 1, 2))
    print("root", (1 + sqrt(3)) / pi)
    for nu in range(4):
        print("lower(1,%d)" % nu, envelope(nu, 1), "theta2^(nu)(1)", (-1) ** nu * theta2(1, nu))
    for nu in range(4):
        ti = tail_integral(nu, 1)
        fac = exp(9 * pi / 4) / 9 ** nu * ti
        print("tail_integral", nu, ti, "factor", fac)
    print("tail_integral(1,1) closed", (4 / pi) ** 2 * exp(-6 * pi) * (1 + 6 * pi))
    print("lower(50,0)", envelope(0, 50))
    print("bracket y=1 final", exp(2 * pi) * (1057472 - 337488) - 2 - mpf("0.08"))
    print("e^{2pi}", exp(2 * pi))
    # h values
    def h(y):
        t0, t1, t2, t3 = [theta4(y, k) for k in range(4)]
        return (2 * t1 * t0 ** 2 + 4 * y * t2 * t0 ** 2 + y ** 2 * t3 * t0 ** 2
                - 4 * y * t1 ** 2 * t0 - 3 * y ** 2 * t2 * t1 * t0 + 2 * y ** 2 * t1 ** 3)

    def hrec(y):
        s0, s1, s2, s3 = [theta2(y, k) for k in range(4)]
        return (2 * y ** mpf(4.5) * s1 ** 2 * s0 - 2 * y ** mpf(4.5) * s2 * s0 ** 2 - 2 * y ** mpf(5.5) * s1 ** 3
                + 3 * y ** mpf(5.5) * s2 * s1 * s0 - y ** mpf(5.5) * s3 * s0 ** 2)
    for y in [mpf(1), mpf(2), mpf("0.5")]:
        print("h(1/y) direct", y, h(1 / y), "hrec", hrec(y), "f''/theta^3", f2(1/y) * theta4(1/y) ** 3)


def greek():
    """Collect the five envelope products into the e^{k pi y/4} bracket."""
    import sympy as sp
    y, P = sp.symbols("y P", positive=True)
    q = sp.symbols("q", positive=True)  # q = e^{pi y/4}
    c = [sp.Rational(1, 100000), sp.Rational(3, 100000), sp.Rational(8, 100000), sp.Rational(3, 10000)]

    def env(nu, upper):
        k = (1 + c[nu]) if upper else 1
        return 2 * P ** nu / 4 ** nu * q ** -1 + 2 * k * 9 ** nu * P ** nu / 4 ** nu * q ** -9

    lo = [env(n, False) for n in range(4)]
    up = [env(n, True) for n in range(4)]
    expr = (2 * lo[1] ** 2 * lo[0] - 2 * up[2] * up[0] ** 2
            + y * (2 * lo[1] ** 3 - 3 * up[2] * up[1] * up[0] + lo[3] * lo[0] ** 2))
    br = sp.expand(expr * q ** 27)
    poly = sp.Poly(br, q)
    out = {}
    for k in (24, 16, 8, 0):
        co = sp.expand(poly.coeff_monomial(q ** k))
        a = co.coeff(y, 1)
        b = co.coeff(y, 0)
        out[k] = (a, b)
    return out, P


if __name__ == "__main__":
    out, P = greek()
    for k, (a, b) in out.items():
        print("k", k, "a", mp.mpf(a.subs(P, pi).evalf(40)), "b", mp.mpf(b.subs(P, pi).evalf(40)))
    from mpmath import findroot
    for a in [mpf("2.1"), mpf(3), mpf(2)]:
        ys = [mpf("0.05") * (mpf(100) ** (mpf(i) / 400)) for i in range(401)]
        vals = [(fa2(a, t), t) for t in ys]
        m = min(vals)
        print("a", a, "min f_a''", m[0], "at", m[1], "first positive y",
              next((t for v, t in vals if v > 0), None))

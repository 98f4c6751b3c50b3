"""Smoke test for the siegelpy extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml --release`.
"""

import json
import math

import siegelpy as sp

I = 1j


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # rho(i) = 1 and K(i, i) = n! / (4 pi^n) in every dimension.
    for n in (1, 2, 3):
        base = [0j] * (n - 1) + [I]
        assert close(sp.rho(base), 1.0, 1e-14)
        assert close(sp.bergman_kernel(base, base), math.factorial(n) / (4 * math.pi**n), 1e-12)

    # Cayley round trip and the metric from the origin: beta(0, xi) = atanh|xi|.
    xi = [0.3 - 0.1j, -0.2 + 0.4j]
    z = sp.cayley(xi)
    back = sp.cayley_inv(z)
    assert all(abs(a - b) < 1e-12 for a, b in zip(xi, back))
    r = math.sqrt(sum(abs(c) ** 2 for c in xi))
    assert close(sp.bergman_metric([0j, I], z), math.atanh(r), 1e-10)

    # Berezin transform of a constant is the constant; log(z_n + i) has |grad~| = sqrt 2 at i.
    value, err = sp.berezin("const", [0.5 + 1.2j], params={"c": 3.0}, nodes=2000)
    assert close(value, 3.0, 1e-12) and err >= 0.0
    assert close(sp.invariant_gradient("log-kernel", [I]), math.sqrt(2.0), 1e-10)

    mo, mo_err = sp.mean_oscillation("beta-dist", [I], nodes=4000)
    assert 0.0 < mo < 1.0 and mo_err >= 0.0
    assert sp.hankel_norm("log-kernel", n=1, degree_cap=6, nodes=4000) < 1e-3

    rows = [json.loads(line) for line in sp.report("bloch", "log-kernel").splitlines()]
    assert rows and all(row["citation"] for row in rows)

    for bad in (lambda: sp.berezin("no-such-symbol", [I]), lambda: sp.rho([1.0 + 0j])):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print(f"siegelpy smoke test passed ({len(sp.corpus())} corpus symbols)")


if __name__ == "__main__":
    main()

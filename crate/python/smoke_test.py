"""Build the extension module with cargo and exercise it from Python.

Usage: python3 python/smoke_test.py [--no-build]
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "disclosure-games-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )


def load(tmp):
    lib = ROOT / "target" / "release" / "libdisclosure_py.so"
    shutil.copy(lib, Path(tmp) / "disclosure_py.so")
    sys.path.insert(0, tmp)
    import disclosure_py

    return disclosure_py


def main():
    if "--no-build" not in sys.argv:
        build()
    with tempfile.TemporaryDirectory() as tmp:
        dg = load(tmp)

        g = dg.Game(4.0, 0.5, [1.0, 1.9, 3.0])
        assert g.n == 3
        assert g.threshold_equilibrium() == [1.0, 0.0, 0.0]
        assert [1, 0, 0] in g.pure_equilibria()
        report = g.solve()
        xs = [c["x"] for c in report["certificates"]]
        assert [1.0, 0.0, 0.0] in xs, xs
        for c in report["certificates"]:
            assert g.verify_kkt(c["x"], c["lambda"], c["mu"])

        g2 = dg.Game(2.0, 0.5, [1.0, 1.0])
        assert abs(g2.pure_payoff([1, 1], 0) - (2 * math.sqrt(2) - 1)) < 1e-12
        c1, c0 = g2.contraction_coefficients([0.3], 0)
        u = g2.expected_utility([0.6, 0.3], 0)
        assert abs(u - ((c1 - c0) * 0.6 + c0)) < 1e-12
        assert dg.Game.from_json(g2.to_json()).beta == [1.0, 1.0]

        s = list(range(1, 101))
        r = [round(math.exp(2.2) * k**0.71) for k in s]
        fit = dg.fit_power_law(r, s)
        assert abs(fit["log_a"] - 2.2) < 0.01 and abs(fit["gamma"] - 0.71) < 0.01

        beta = dg.estimate_beta(0.4, [0.2, None, 0.5], math.exp(2.2), 0.71, 0.3)
        assert beta > 0

        fit = dg.fit_constrained([0.2, 0.7, 0.4], 3.0, 0.71)
        assert fit["objective"] == 0.0 and fit["certified"]

        rows = dg.simulate(seed=1, n_articles=50)
        aggs = dg.aggregate(rows)
        assert len(aggs) == 50 and sum(a[1] for a in aggs) == len(rows)

        try:
            dg.Game(-1.0, 0.5, [1.0])
        except ValueError:
            pass
        else:
            raise AssertionError("negative A accepted")

    print(f"disclosure_py {dg.__version__}: smoke test passed")


if __name__ == "__main__":
    main()

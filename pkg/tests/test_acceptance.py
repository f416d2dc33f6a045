"""End-to-end acceptance checks at full numerical parameters.

Each test records one PASS/FAIL line (shown in the terminal summary and on
stdout with ``-s``) and then asserts the same condition.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from saddlenode.algebra import BiSeries, CoeffTable
from saddlenode.geometry import FormalClass, sigma_for
from saddlenode.leaf import DulacField
from saddlenode.normalform import integrability_test, realize_orbital, realize_temporal, roundtrip_check
from saddlenode.period import CauchyConfig, Settings, model_coeff, monomial_periods, orbital_modulus, temporal_modulus

GRID = Settings(radius=1.0, cauchy=CauchyConfig(0.1, 1000))


def _record(tag: str, ok: bool, detail: str) -> None:
    line = f"[{tag}] {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_c1_model_coefficient_oracle():
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for k in (1, 2, 3):
        for mu in (0.5, 1 + 1j, -0.25 + 0.6j):
            sigma = sigma_for(mu)
            monos = [(m, n) for n in (1, 2, 3) for m in range(n * sigma + 1, n * sigma + k + 1)]
            per = monomial_periods(DulacField(FormalClass(k, mu)), monos, 3, GRID)
            for j in range(k):
                for i, (m, n) in enumerate(monos):
                    ref = np.zeros(4, dtype=complex)
                    ref[n] = model_coeff(k, mu, m, n, j)
                    err = np.max(np.abs(per[j, i] - ref)) / abs(ref[n])
                    worst = max(worst, err)
                    cases += 1
    elapsed = time.perf_counter() - start
    ok = worst < 1e-5 and elapsed < 300
    _record("C1", ok, f"model periods, {cases} cases, worst relative error {worst:.2e} (< 1e-5), {elapsed:.0f} s (< 300 s)")
    assert ok


BERNOULLI = DulacField(FormalClass(1, 0), BiSeries({(0, 1): 1.0}))


def test_c2_bernoulli_table():
    start = time.perf_counter()
    alpha = orbital_modulus(BERNOULLI, 4, Settings.modulus_defaults()).entries[0]
    elapsed = time.perf_counter() - start
    errs = [abs(alpha[n - 1] + (2j * math.pi) ** n / n) for n in range(1, 5)]
    ok = all(e <= 10.0 ** -(9 - n) for n, e in zip(range(1, 5), errs)) and elapsed < 60
    detail = ", ".join(f"n={n}: {e:.1e} (<= 1e-{9 - n})" for n, e in zip(range(1, 5), errs))
    _record("C2", ok, f"Bernoulli modulus errors {detail}, {elapsed:.0f} s (< 60 s)")
    assert ok


# reference values, orders 2..4, with one unit of the second-to-last digit given
REFERENCE_ALPHA = {
    2: (-19.73920883 - 6.28318531j, 1e-7),
    3: (59.2176264 + 78.3282319j, 1e-6),
    4: (-295.429240 + 447.039460j, 1e-5),
}


def test_c3_non_integrable_table():
    start = time.perf_counter()
    field = DulacField(FormalClass(1, 0), BiSeries({(0, 1): 1.0, (0, 2): 1.0}))
    table = orbital_modulus(field, 4, Settings.modulus_defaults())
    elapsed = time.perf_counter() - start
    alpha = table.entries[0]
    parts, ok = [], elapsed < 60
    for n, (ref, tol) in REFERENCE_ALPHA.items():
        err = abs(alpha[n - 1] - ref)
        ok &= err <= tol
        parts.append(f"n={n}: got {alpha[n - 1]:.8f}, err {err:.1e} (<= {tol:.0e})")
    verdict = integrability_test(table)
    ok &= not verdict.integrable_form
    parts.append(f"integrable_form={verdict.integrable_form}")
    _record("C3", ok, f"{'; '.join(parts)}; {elapsed:.0f} s (< 60 s)")
    assert ok


@pytest.fixture(scope="module")
def identity_roundtrip():
    start = time.perf_counter()
    nf, res = roundtrip_check(1, 0, CoeffTable(1, [[1, 0, 0, 0, 0]]), 5, Settings.normal_form_defaults(), payload_offset=0)
    return nf, res, time.perf_counter() - start


# reference values with one unit of the last digit given (they are truncated)
REFERENCE_R = [
    (0.159154943092j, 1e-11),
    (-0.0397887357j, 1e-10),
    (-2.27086e-3 + 1.473657e-2j, 1e-8),
    (2.223e-3 - 6.239e-3j, 1e-6),
    (-1.7e-3 + 2.8e-3j, 1e-4),
]


def test_c4_normal_form_table(identity_roundtrip):
    nf, _, elapsed = identity_roundtrip
    ok, parts = elapsed < 600, []
    for n, (ref, tol) in enumerate(REFERENCE_R, start=1):
        got = nf.R[0, n - 1]
        err = max(abs(got.real - ref.real), abs(got.imag - ref.imag))
        ok &= err <= tol
        parts.append(f"R{n} err {err:.1e} (<= {tol:.0e})")
    _record("C4", ok, f"normal form of phi(h) = h: {', '.join(parts)}; {elapsed:.0f} s with round trip (< 600 s)")
    assert ok


def test_c5_roundtrip(identity_roundtrip):
    _, res, _ = identity_roundtrip
    worst = float(res.max())
    ok = worst < 1e-6
    _record("C5", ok, f"round-trip residuals up to order 5: max {worst:.1e} (< 1e-6)")
    assert ok


PROPERTY_TESTS = [
    "tests/test_period.py::test_triangularity",
    "tests/test_period.py::test_leading_block_independent_of_R",
    "tests/test_period.py::test_linearity",
    "tests/test_period.py::test_base_point_invariance",
    "tests/test_period.py::test_path_invariance",
    "tests/test_period.py::test_truncation_property",
    "tests/test_leaf.py::test_step_halving_is_fourth_order",
    "tests/test_normalform.py::test_temporal_linearity",
    "tests/test_normalform.py::test_block_locality",
]


def test_c6_property_suites():
    root = Path(__file__).resolve().parent.parent
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_TESTS],
        cwd=root, capture_output=True, text=True,
    )
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    ok = proc.returncode == 0
    _record("C6", ok, f"property suites ({len(PROPERTY_TESTS)} groups): {summary}")
    assert ok, proc.stdout[-4000:]


@pytest.mark.parametrize("k,mu", [(1, 0.5 + 0.5j), (2, 0.4 + 0.2j)])
def test_c7_temporal_pipeline(k, mu):
    rng = np.random.default_rng(20 + k)
    D = 3
    orb = CoeffTable(k, 0.2 * (rng.normal(size=(k, D)) + 1j * rng.normal(size=(k, D))))
    target = CoeffTable(k, 0.3 * (rng.normal(size=(k, D)) + 1j * rng.normal(size=(k, D))))
    nf = realize_orbital(k, mu, orb, D, GRID)
    nf = realize_temporal(nf, target, D, GRID)
    back = temporal_modulus(nf.field(), D, GRID)
    err = float(np.max(np.abs(back.entries - target.entries)))
    ok = err < 1e-6
    _record("C7", ok, f"temporal round trip k={k}: max error {err:.1e} (< 1e-6)")
    assert ok

"""Acceptance suite: one test per criterion over the desk catalog, exact arithmetic.

Each test prints a single ``criterion N: PASS|FAIL`` line.
"""

import json
from math import comb

import pytest

from kpdixmier.cli import main
from kpdixmier.config import CACHE_ENV
from kpdixmier.dixmier import (
    NotScalar,
    SplitFailure,
    b_computation,
    casimir_scalar,
    dixmier_axioms,
    enveloping_image,
    gram_form,
    random_change_of_basis,
    trace_split,
    verify_quotient_dims,
)
from kpdixmier.model import verify_moment_identities
from kpdixmier.oracle import SamplePlan, orbit_coordinate_dim
from kpdixmier.orbits import orbit_dimension, validate
from kpdixmier.reduction import complete_intersection_check, koszul_homology_window, reduced_hilbert
from kpdixmier.weyl import filtration_dims

from conftest import DESK, model_of, spec_id, weyl_of


def kp_window(t):
    return 2 if t[1] == 4 else 3


def b_window(t):
    return 3 if t in (("GL", 2, (2,)), ("Sp", 2, (2,))) else 2


@pytest.fixture
def verdict(capsys):
    def emit(n, title, failures):
        line = f"criterion {n:2d}: {'PASS' if not failures else 'FAIL'}  {title}"
        if failures:
            line += f"  {failures}"
        with capsys.disabled():
            print("\n" + line)
        assert not failures, failures
    return emit


_ORACLE = {}


def oracle_dim(t, p):
    key = (t, p)
    if key not in _ORACLE:
        _ORACLE[key] = orbit_coordinate_dim(SamplePlan(validate(*t)), p)
    return _ORACLE[key]


def test_reduced_hilbert_equals_orbit_coordinate_ring(verdict):
    bad = []
    for t in DESK:
        table = reduced_hilbert(model_of(*t), kp_window(t), oracle=lambda p, t=t: oracle_dim(t, p))
        for r in table.rows:
            if not r.matches:
                bad.append((spec_id(t), r.j, r.quotient, r.oracle))
    verdict(1, "dim (P^inv/I^inv)^p equals the sampled orbit coordinate ring", bad)


def test_coinvariant_quotient_matches_reduction(verdict):
    bad = []
    for t in DESK:
        rep = verify_quotient_dims(weyl_of(*t), b_window(t), max_slack=1)
        if not rep.passed:
            bad.append((spec_id(t), [r.to_json() for r in rep.rows]))
    verdict(2, "dim gr^d B equals dim (P^inv/I^inv)^d, slack <= 1", bad)


def test_complete_intersection(verdict):
    bad = []
    for t in DESK:
        m = model_of(*t)
        ci = complete_intersection_check(m, 3)
        if not ci["passed"]:
            bad.append((spec_id(t), "series"))
        for row in koszul_homology_window(m, 3):
            if any(row["H"][s] for s in row["H"] if s > 0):
                bad.append((spec_id(t), "homology", row["k"], row["H"]))
    verdict(3, "P/I has the complete-intersection series; Koszul H1 = H2 = 0", bad)


def test_moment_identities(verdict):
    bad = [spec_id(t) for t in DESK if not verify_moment_identities(model_of(*t))["passed"]]
    verdict(4, "moment maps are bracket homomorphisms and Poisson commute", bad)


def test_quantization_identities(verdict):
    bad = []
    for t in DESK:
        wm = weyl_of(*t)
        res = wm.verify()
        if not res["passed"]:
            bad.append((spec_id(t), res["failures"][:3]))
        n = wm.frame.n
        dims = filtration_dims(wm.frame, 2)
        for k in range(len(dims)):
            if dims[k] - (dims[k - 1] if k else 0) != comb(n + k - 1, k):
                bad.append((spec_id(t), "filtration", k))
    verdict(5, "quantized moment maps, symbols and filtration dimensions", bad)


def test_dimension_bookkeeping(verdict):
    bad = []
    for t in DESK:
        m = model_of(*t)
        if m.dim_L - 2 * m.dim_s != orbit_dimension(validate(*t)):
            bad.append(spec_id(t))
    verdict(6, "dim L - 2 dim s equals the orbit dimension", bad)


def test_dixmier_axioms(verdict):
    bad = []
    for t in DESK:
        res = dixmier_axioms(weyl_of(*t), pairs=20, seed=0)
        if not res["passed"]:
            bad.append((spec_id(t), res["failures"]))
    verdict(7, "tau_B and theta_B satisfy the Dixmier-algebra axioms on 20 pairs", bad)


def test_trace_and_hermitian_form(verdict):
    bad = []
    for t in DESK:
        wm = weyl_of(*t)
        for d in (1, 2):
            split = trace_split(b_computation(wm, d), d)
            if split.codim != 1:
                bad.append((spec_id(t), "split", d))
        if dixmier_axioms(wm, pairs=20, seed=1)["failures"]["trace"]:
            bad.append((spec_id(t), "T(AB) != T(BA)"))
        g = gram_form(wm, 1, samples=6)
        if not g.hermitian or g.unit_norm != 1 or g.invariance_failures:
            bad.append((spec_id(t), "gram", g.hermitian, g.unit_norm, g.invariance_failures))
        if wm.model.dim_g and not g.invariance_samples:
            bad.append((spec_id(t), "no invariance samples"))
    verdict(8, "trace split, trace property, Hermitian invariant form with (1|1) = 1", bad)


def test_gl_form_positive_definite(verdict):
    bad = []
    for t, dmax in ((("GL", 2, (2,)), 2), (("GL", 3, (2, 1)), 1)):
        for d in range(dmax + 1):
            g = gram_form(weyl_of(*t), d)
            if not g.positive_definite:
                bad.append((spec_id(t), d, g.signature))
    verdict(9, "Gram form positive definite for the GL specs", bad)


def test_casimir_scalar(verdict):
    bad = []
    for t in DESK:
        wm = weyl_of(*t)
        try:
            c1 = casimir_scalar(wm)
            c2 = casimir_scalar(wm, random_change_of_basis(wm.model.dim_g, seed=11))
        except (NotScalar, SplitFailure) as exc:
            bad.append((spec_id(t), str(exc)))
            continue
        if c1 != c2:
            bad.append((spec_id(t), c1, c2))
    verdict(10, "Casimir acts by a basis-independent scalar", bad)


def test_enveloping_surjective(verdict):
    bad = []
    for t in DESK:
        rows = enveloping_image(weyl_of(*t), 2, oracle=lambda p, t=t: oracle_dim(t, p))
        for r in rows:
            if not r.surjective or r.gr_J != r.dim_Sg - r.dim_R:
                bad.append((spec_id(t), r.p, r.image_rank, r.dim_B, r.gr_J))
    verdict(11, "U(g) maps onto B_d; gr J dims equal dim S(g)[p] - dim R[p]", bad)


def test_cache_and_batch(verdict, tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    cold, warm = tmp_path / "cold.json", tmp_path / "warm.json"
    bad = []
    rc1 = main(["batch", "--json", str(cold), "--stable"])
    rc2 = main(["batch", "--json", str(warm), "--stable"])
    if (rc1, rc2) != (0, 0):
        bad.append(("exit", rc1, rc2))
    if cold.read_bytes() != warm.read_bytes():
        bad.append("warm report differs from cold")
    if not json.loads(cold.read_text())["passed"]:
        bad.append("batch reported a mismatch")
    verdict(12, "desk batch exits 0; warm cache reproduces the cold report byte for byte", bad)

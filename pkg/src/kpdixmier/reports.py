"""Report objects and the computations behind each CLI command.

Every runner returns a :class:`VerificationReport` whose rows are plain JSON
values (integers, booleans and exact scalars rendered as strings).
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

from . import __version__
from .cache import ResultCache
from .config import Config
from .model import build_model
from .orbits import ladder, list_orbits, orbit_dimension
from .scalars import fmt_scalar


@dataclass
class VerificationReport:
    spec: dict | None
    command: str
    window: dict
    rows: list
    passed: bool
    conventions: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    timing: float = 0.0
    cache_hits: int = 0
    cache_misses: int = 0

    def to_json(self, stable: bool = False) -> dict:
        d = {"tool_version": __version__, "spec": self.spec, "command": self.command,
             "window": self.window, "rows": self.rows, "passed": self.passed,
             "conventions": self.conventions}
        if self.extra:
            d["extra"] = self.extra
        if not stable:
            d["timing_seconds"] = round(self.timing, 3)
            d["cache"] = {"hits": self.cache_hits, "misses": self.cache_misses}
        return d

    def dumps(self, stable: bool = False) -> str:
        return json.dumps(self.to_json(stable), indent=2, sort_keys=True) + "\n"

    def csv_text(self) -> str:
        buf = io.StringIO()
        if self.rows and isinstance(self.rows[0], dict):
            cols = []
            for r in self.rows:
                for k in r:
                    if k not in cols:
                        cols.append(k)
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for r in self.rows:
                w.writerow([_csv_cell(r.get(c)) for c in cols])
        return buf.getvalue()

    def table_text(self) -> str:
        head = f"{self.command}"
        if self.spec:
            head += f"  {self.spec['label']}"
        lines = [head]
        if self.rows and isinstance(self.rows[0], dict):
            cols = []
            for r in self.rows:
                for k, v in r.items():
                    if k not in cols and not isinstance(v, (dict, list)):
                        cols.append(k)
            widths = {c: max(len(c), *(len(_csv_cell(r.get(c))) for r in self.rows)) for c in cols}
            lines.append("  ".join(c.rjust(widths[c]) for c in cols))
            for r in self.rows:
                lines.append("  ".join(_csv_cell(r.get(c)).rjust(widths[c]) for c in cols))
        for k, v in self.extra.items():
            if not isinstance(v, (dict, list)):
                lines.append(f"{k}: {v}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


class Session:
    """Shared state for one CLI invocation: config, cache and built models."""

    def __init__(self, config: Config | None = None, cache: ResultCache | None = None):
        self.config = config or Config()
        self.cache = cache or ResultCache(self.config.resolved_cache_dir())
        self._models = {}
        self._weyl = {}

    def model(self, spec):
        if spec not in self._models:
            self._models[spec] = build_model(spec)
        return self._models[spec]

    def weyl(self, spec):
        from .weyl import WeylModel
        if spec not in self._weyl:
            self._weyl[spec] = WeylModel(self.model(spec))
        return self._weyl[spec]

    def cached(self, spec, module, degree, params, compute):
        conv = self.model(spec).metadata
        return self.cache.get_or_compute(spec.label, module, degree, params, conv, compute)

    def dmax(self, spec, dmax):
        return dmax if dmax is not None else self.config.default_dmax(self.model(spec).dim_L)


def _finish(report: VerificationReport, session: Session, start: float) -> VerificationReport:
    report.timing = time.perf_counter() - start
    report.cache_hits = session.cache.hits
    report.cache_misses = session.cache.misses
    return report


# --- orbit catalog ---------------------------------------------------------------

def run_orbits_list(group: str, n: int) -> VerificationReport:
    rows = []
    for o in list_orbits(group, n):
        rows.append({"partition": ",".join(map(str, o["partition"])), "valid": o["valid"],
                     "components": o["components"]})
    return VerificationReport(None, f"orbits list {group} {n}", {}, rows, True)


def run_orbits_info(spec) -> VerificationReport:
    lad = ladder(spec)
    dim_orbit = orbit_dimension(spec)
    model = build_model(spec)
    factors = [""] + [f"{k}({d})" for k, d in zip(lad.s_factors, lad.dims[1:])]
    rows = [{"level": e, "dim": d, "form": k or "none", "s_factor": f}
            for e, (d, k, f) in enumerate(zip(lad.dims, lad.form_kinds, factors))]
    extra = {"orbit_dimension": dim_orbit, "dim_L": model.dim_L, "dim_s": model.dim_s,
             "dim_L_minus_2dim_s": model.dim_L - 2 * model.dim_s, "components": spec.components}
    passed = dim_orbit == model.dim_L - 2 * model.dim_s
    return VerificationReport(spec.to_json(), "orbits info", {}, rows, passed, model.metadata, extra)


# --- model ---------------------------------------------------------------------------

def run_model_build(session: Session, spec) -> VerificationReport:
    from .model import verify_moment_identities
    start = time.perf_counter()
    m = session.model(spec)
    ident = verify_moment_identities(m)
    rows = []
    for i, f in enumerate(m.gamma_polys):
        rows.append({"kind": "gamma", "index": i, "poly": f.to_text()})
    for i, f in enumerate(m.sigma_polys):
        rows.append({"kind": "sigma", "index": i, "level": m.s_elements[i][0], "poly": f.to_text()})
    extra = {
        "coordinates": list(m.registry.names),
        "omega": [[fmt_scalar(x) for x in row] for row in m.omega.matrix],
        "g_basis": [[[fmt_scalar(x) for x in r] for r in b] for b in m.g_basis.elements],
        "s_basis": [{"level": lv, "matrix": [[fmt_scalar(x) for x in r] for r in m.s_matrix(i)[1]]}
                    for i, (lv, _) in enumerate(m.s_elements)],
        "dim_L": m.dim_L, "dim_s": m.dim_s,
        "moment_identity_pairs": ident["pairs_checked"],
    }
    rep = VerificationReport(spec.to_json(), "model build", {}, rows, ident["passed"], m.metadata, extra)
    return _finish(rep, session, start)


# --- classical side ------------------------------------------------------------------

def hilbert_rows(session: Session, spec, dmax: int) -> list[dict]:
    from .reduction import hilbert_row
    m = session.model(spec)
    return [session.cached(spec, "hilbert", j, {}, lambda j=j: hilbert_row(m, j).to_json())
            for j in range(dmax + 1)]


def oracle_rows(session: Session, spec, dmax: int) -> list[dict]:
    from .oracle import SamplePlan, oracle_details
    cfg = session.config
    plan = SamplePlan(spec, seed=cfg.sample_seed, height=cfg.sample_height)
    params = {"seed": cfg.sample_seed, "height": cfg.sample_height}
    return [session.cached(spec, "oracle", p, params, lambda p=p: oracle_details(plan, p))
            for p in range(dmax + 1)]


def run_hilbert(session: Session, spec, dmax=None, with_oracle=False) -> VerificationReport:
    start = time.perf_counter()
    dmax = session.dmax(spec, dmax)
    rows = [dict(r) for r in hilbert_rows(session, spec, dmax)]
    passed = all(r["quotient"] == r["dim_Pinv"] - r["dim_Iinv"] for r in rows)
    if with_oracle:
        for r, o in zip(rows, oracle_rows(session, spec, dmax)):
            r["oracle"] = o["rank"]
            r["match"] = o["rank"] == r["quotient"]
        passed = passed and all(r["match"] for r in rows)
    rep = VerificationReport(spec.to_json(), "hilbert", {"dmax": dmax}, rows, passed,
                             session.model(spec).metadata)
    return _finish(rep, session, start)


def run_koszul(session: Session, spec, dmax=None, tmax=None) -> VerificationReport:
    from .reduction import ci_series, koszul_homology_window
    start = time.perf_counter()
    m = session.model(spec)
    dmax = session.dmax(spec, dmax)
    tmax = min(2, m.dim_s) if tmax is None else tmax
    if tmax > m.dim_s:
        raise ValueError(f"tmax {tmax} exceeds dim s = {m.dim_s}")

    def compute():
        out = []
        series = ci_series(m.dim_s, m.dim_L, 2 * dmax)
        for r in koszul_homology_window(m, dmax, tmax):
            out.append({"k": r["k"], "degree": r["degree"],
                        **{f"H{t}": h for t, h in r["H"].items()},
                        "dim_P_over_I": r["dim_P_over_I"], "series": series[r["k"]]})
        return out

    rows = session.cached(spec, "koszul", dmax, {"tmax": tmax}, compute)
    passed = all(r["dim_P_over_I"] == r["series"] and r["H0"] == r["dim_P_over_I"]
                 and all(r[f"H{t}"] == 0 for t in range(1, tmax + 1)) for r in rows)
    rep = VerificationReport(spec.to_json(), "koszul", {"dmax": dmax, "tmax": tmax}, rows, passed,
                             m.metadata)
    return _finish(rep, session, start)


def run_oracle(session: Session, spec, dmax=None) -> VerificationReport:
    start = time.perf_counter()
    dmax = session.dmax(spec, dmax)
    rows = [{"p": o["p"], "dim_R": o["rank"], "counts": o["counts"], "ranks": o["ranks"],
             "dim_Sg": o["dim_Sg"]} for o in oracle_rows(session, spec, dmax)]
    cfg = session.config
    rep = VerificationReport(spec.to_json(), "oracle dim", {"dmax": dmax}, rows, True,
                             session.model(spec).metadata,
                             {"seed": cfg.sample_seed, "height": cfg.sample_height})
    return _finish(rep, session, start)


def run_verify_kp(session: Session, spec, dmax=None) -> VerificationReport:
    from .model import verify_moment_identities
    start = time.perf_counter()
    dmax = session.dmax(spec, dmax)
    rep = run_hilbert(session, spec, dmax, with_oracle=True)
    m = session.model(spec)
    ident = verify_moment_identities(m)
    bookkeeping = orbit_dimension(spec) == m.dim_L - 2 * m.dim_s
    rep.command = "verify kp"
    rep.extra = {"moment_identities": ident["passed"], "dimension_bookkeeping": bookkeeping}
    rep.passed = rep.passed and ident["passed"] and bookkeeping
    return _finish(rep, session, start)


# --- noncommutative side --------------------------------------------------------------

def run_verify_dixmier(session: Session, spec, dmax=None, slack=0) -> VerificationReport:
    from .dixmier import coinvariant_quotient
    start = time.perf_counter()
    dmax = session.dmax(spec, dmax)
    max_slack = session.config.max_slack
    hil = hilbert_rows(session, spec, dmax)

    def compute(d):
        wm = session.weyl(spec)
        want = hil[d]["quotient"]
        s = slack
        row = coinvariant_quotient(wm, d, s, want)
        while not row.match and s < max_slack:
            s += 1
            row = coinvariant_quotient(wm, d, s, want)
        return row.to_json()

    rows = [session.cached(spec, "dixmier", d, {"slack": slack, "max_slack": max_slack},
                           lambda d=d: compute(d)) for d in range(dmax + 1)]
    passed = all(r["match"] and r["inv_route_rank"] == r["dim_B"] for r in rows)
    rep = VerificationReport(spec.to_json(), "verify dixmier", {"dmax": dmax, "slack": slack}, rows,
                             passed, session.model(spec).metadata)
    return _finish(rep, session, start)


def run_form(session: Session, spec, d=1) -> VerificationReport:
    from .dixmier import gram_form
    start = time.perf_counter()
    g = gram_form(session.weyl(spec), d, seed=session.config.sample_seed)
    row = g.to_json()
    passed = g.hermitian and g.unit_norm == 1 and g.invariance_failures == 0
    extra = {}
    if spec.group == "GL":
        extra["positive_definite"] = g.positive_definite
        passed = passed and g.positive_definite
    rep = VerificationReport(spec.to_json(), "form", {"d": d}, [row], passed,
                             session.model(spec).metadata, extra)
    return _finish(rep, session, start)


def run_casimir(session: Session, spec) -> VerificationReport:
    from .dixmier import NotScalar, casimir_scalar, random_change_of_basis
    start = time.perf_counter()
    wm = session.weyl(spec)
    try:
        c1 = casimir_scalar(wm)
        c2 = casimir_scalar(wm, random_change_of_basis(wm.model.dim_g, session.config.sample_seed + 1))
        rows = [{"basis": "standard", "scalar": fmt_scalar(c1)},
                {"basis": "random change", "scalar": fmt_scalar(c2)}]
        passed = c1 == c2
    except NotScalar as exc:
        rows = [{"basis": "standard", "error": str(exc)}]
        passed = False
    rep = VerificationReport(spec.to_json(), "casimir", {}, rows, passed, wm.model.metadata)
    return _finish(rep, session, start)

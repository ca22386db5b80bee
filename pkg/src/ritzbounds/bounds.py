"""Relative and absolute a-posteriori eigenvalue bounds.

The functions here turn the defect spectrum and gap information into
two-sided estimates for the relative eigenvalue errors ``(mu_i -
lambda_i)/mu_i`` of a Ritz cluster:

* first-order localization from the largest defect,
* the quadratic cluster bound ``(eta_m / g_q) |||diag(eta)|||`` in any
  unitary-invariant norm,
* the two-sided sandwich ``|||diag(eta^2)||| <= |||I - lambda Xi^{-1}|||
  <= (1/g_1) |||diag(eta^2)|||`` together with its trace form,
* the diagonal-residual sandwich for ``sum eta_i^2``,
* the trace lower bound built from the per-vector residual quotients,
* the classical residual/gap inequalities in the unscaled geometry
  (single-vector lower bound and the absolute cluster bound), kept for
  comparison, and
* the exactness ratio, which quantifies how close the sandwich lower end
  sits to the true error aggregate.

Every evaluator is a pure formula; hypothesis checking is the caller's
business.  ``build_report`` is that caller: it assembles all bounds for a
given operator/test-subspace pair, records one validity flag per checked
hypothesis, and never refuses to evaluate a formula just because a
hypothesis failed (the flag records it instead).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .defect import (
    DefectSpectrum,
    RitzData,
    SplitOperator,
    TestSubspace,
    _resolvent_factors,
    dl_measure,
    etas_moments,
    etas_schur,
    moment_matrices,
    p_diagonal_split,
    ritz,
)
from .densela import NormKind, as_symmetric, sym_eig, ui_norm
from .errors import HypothesisError, SingularOperatorError

INF = float("inf")


# ---------------------------------------------------------------------------
# Gap quantities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapData:
    """Relative gap data for the q-th target eigenvalue.

    ``g_q`` is the relative distance from lambda_q to the unwanted part of
    the split operator spectrum (+inf when that part is empty); ``gamma_s``
    is the two-sided relative separation between the Ritz cluster and its
    neighboring reference eigenvalues.
    """

    q: int
    g_q: float
    gamma_s: float
    lambda_qm1: float
    lambda_qpm: float
    mu_1: float
    mu_m: float

    def __post_init__(self):
        if self.g_q < 0:
            raise ValueError(f"relative gap must be nonnegative, got {self.g_q}")
        if self.gamma_s > 1.0 + 1e-12:
            raise ValueError(f"gamma_s cannot exceed 1, got {self.gamma_s}")


def relative_gap_gq(spec_rest, lambda_q: float) -> float:
    """min over mu in the unwanted spectrum of |lambda_q - mu| / mu.

    ``spec_rest`` holds the positive spectrum of the split operator with
    the m Ritz values removed; an empty collection returns +inf.
    """
    rest = np.asarray(spec_rest, dtype=float)
    if rest.size == 0:
        return INF
    if np.any(rest <= 0):
        raise ValueError("unwanted spectrum must be positive")
    return float(np.min(np.abs(lambda_q - rest) / rest))


def gamma_s(lambda_qm1: float, lambda_qpm: float, mu1: float, mum: float) -> float:
    """Two-sided relative separation of the cluster from its neighbors.

    With the formal convention lambda_0 = 0 the left branch degenerates to
    1 for the lowest cluster; an infinite right neighbor also contributes 1.
    """
    if min(lambda_qm1, lambda_qpm, mu1, mum) < 0:
        raise ValueError("gamma_s arguments must be nonnegative")
    left = 1.0 if lambda_qm1 == 0.0 else (mu1 - lambda_qm1) / (mu1 + lambda_qm1)
    right = 1.0 if math.isinf(lambda_qpm) else (lambda_qpm - mum) / (lambda_qpm + mum)
    return min(left, right)


def gq_lower_bound_lemma(
    eta_m: float, mu1: float, mum: float, lambda_qm1: float, lambda_qpm: float
) -> float:
    """Computable lower bound for g_q from the largest defect.

    Valid under eta_m / (1 - eta_m) < gamma_s; the caller flags that.  The
    lowest-cluster case lambda_{q-1} = 0 sends the left branch to +inf.
    """
    if not 0.0 <= eta_m < 1.0:
        raise ValueError(f"need 0 <= eta_m < 1, got {eta_m}")
    f = eta_m / (1.0 - eta_m)
    if lambda_qm1 == 0.0:
        left = INF
    else:
        left = (mu1 * (1.0 - eta_m) - (1.0 + f) * lambda_qm1) / ((1.0 + f) * lambda_qm1)
    if math.isinf(lambda_qpm):
        right = 1.0
    else:
        right = ((1.0 - f) * lambda_qpm - (1.0 + eta_m) * mum) / ((1.0 - f) * lambda_qpm)
    return min(left, right)


def g1_from_spectral_gap(lambda_mp1: float, mum: float) -> float:
    """Relative-gap lower bound (lambda_{m+1} - mu_m) / (lambda_{m+1} + mu_m)."""
    if lambda_mp1 <= mum:
        raise HypothesisError(
            f"spectral gap hypothesis fails: lambda_(m+1) = {lambda_mp1!r} "
            f"<= mu_m = {mum!r}"
        )
    if math.isinf(lambda_mp1):
        return 1.0
    return (lambda_mp1 - mum) / (lambda_mp1 + mum)


# ---------------------------------------------------------------------------
# Bound evaluators
# ---------------------------------------------------------------------------


def classical_temple_kato(mu: float, res_norm_sq: float, lambda2_lb: float) -> float:
    """Classical second-order lower bound mu - ||r||^2 / (lambda_2 - mu)."""
    if res_norm_sq < 0:
        raise ValueError("squared residual norm must be nonnegative")
    if lambda2_lb <= mu:
        raise HypothesisError(
            f"gap hypothesis fails: lambda_2 lower bound {lambda2_lb!r} <= mu = {mu!r}"
        )
    return mu - res_norm_sq / (lambda2_lb - mu)


def first_order_bounds(mu: float, eta: float):
    """First-order localization ((1 - eta) mu, (1 + eta) mu)."""
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"need 0 <= eta < 1, got {eta}")
    return (1.0 - eta) * mu, (1.0 + eta) * mu


def cluster_upper_bound(etas: DefectSpectrum, g_q: float, kind) -> float:
    """Quadratic cluster bound (eta_m / g_q) |||diag(eta_1..eta_m)|||.

    In the Frobenius norm this dominates [sum_i (lambda_q - mu_i)^2 /
    mu_i^2]^(1/2).  Uses the convention c / inf = 0.
    """
    if g_q <= 0:
        raise HypothesisError(f"relative gap must be positive, got {g_q!r}")
    if math.isinf(g_q):
        return 0.0
    return etas.eta_max / g_q * ui_norm(np.diag(etas.etas), kind)


def sandwich_bounds(etas: DefectSpectrum, g1: float, kind):
    """Two-sided bound for |||I - lambda_q Xi^{-1}|||.

    Returns (|||diag(eta^2)|||, |||diag(eta^2)||| / g_1).
    """
    if g1 <= 0:
        raise HypothesisError(f"relative gap must be positive, got {g1!r}")
    lower = ui_norm(np.diag(etas.etas**2), kind)
    upper = 0.0 if math.isinf(g1) and lower == 0.0 else lower / g1
    return lower, upper


def trace_sandwich(etas: DefectSpectrum, g1: float):
    """Two-sided bound for sum_i (mu_i - lambda_i) / mu_i.

    Returns (sum eta_i^2, (1/g_1) sum eta_i^2).
    """
    if g1 <= 0:
        raise HypothesisError(f"relative gap must be positive, got {g1!r}")
    total = etas.sum_squares()
    upper = 0.0 if math.isinf(g1) and total == 0.0 else total / g1
    return total, upper


def prop_lower_bound(mu, residual_ratios) -> float:
    """Residual-quotient lower bound (mu_1 / (2 mu_m)) sum_i ratios_i.

    ``ratios_i`` are the relative residual quotients
    ``||H u_i - mu_i u_i||^2_{H^{-1}} / ||H u_i||^2_{H^{-1}}``; the result
    bounds sum_i (mu_i - lambda_i) / mu_i from below (under 2 eta_m < 1,
    flagged by the caller).
    """
    mu = np.asarray(mu, dtype=float)
    ratios = np.asarray(residual_ratios, dtype=float)
    if np.any(ratios < 0):
        raise ValueError("residual quotients must be nonnegative")
    return float(mu[0] / (2.0 * mu[-1]) * ratios.sum())


def residual_eta_sandwich(omega_diag_mu, dl: float):
    """Sandwich for sum eta_i^2 from the diagonal residual quotients.

    ``omega_diag_mu`` holds the per-vector quotients Omega_ii mu_i; the
    result is (sum / (1 + dl), sum).
    """
    if dl < 0:
        raise ValueError("deviation measure must be nonnegative")
    total = float(np.sum(np.asarray(omega_diag_mu, dtype=float)))
    return total / (1.0 + dl), total


def abs_cluster_bounds(k_block, mu, lambda_mp1: float, kind) -> float:
    """Absolute cluster bound in the unscaled geometry.

    For the coupling block K of H in the adapted basis,
    ``|||diag(mu_i - lambda)||| <= |||K||| ||K|| / (lambda_{m+1} - mu_m -
    ||K||)``.  The trace variant uses the residual sum ||K||_F^2 in place
    of |||K||| ||K||.  Requires ||K|| < lambda_{m+1} - mu_m.
    """
    kind = NormKind.coerce(kind)
    k = np.asarray(k_block, dtype=float)
    mu = np.asarray(mu, dtype=float)
    norm_k = ui_norm(k, NormKind.SPECTRAL)
    gap = lambda_mp1 - mu[-1]
    if norm_k >= gap:
        raise HypothesisError(
            f"absolute gap hypothesis fails: ||K|| = {norm_k:.6e} >= "
            f"lambda_(m+1) - mu_m = {gap:.6e}"
        )
    if math.isinf(gap):
        return 0.0
    if kind is NormKind.TRACE:
        return float((k * k).sum() / (gap - norm_k))
    return ui_norm(k, kind) * norm_k / (gap - norm_k)


def exactness_ratio(split: SplitOperator, rd: RitzData, lambda_q: float) -> float:
    """Ratio of the true error aggregate to the defect aggregate.

    Evaluates ``1 + tr(lambda_q K_s^T (W - lambda_q)^{-1} K_s) / sum
    eta_i^2``, which equals ``[sum_i (mu_i - lambda_q)/mu_i] / [sum
    eta_i^2]`` when lambda_q is the exact cluster eigenvalue of full
    multiplicity.  Tends to 1 as the complement block grows away from
    lambda_q.
    """
    lam = float(lambda_q)
    sum_sq = float((split.k_s**2).sum())
    if sum_sq <= 1e-28:
        # defects at rounding level: the subspace is invariant for all
        # practical purposes and the quotient is pure noise
        raise SingularOperatorError(
            "exactness ratio is undefined for an invariant subspace "
            "(zero defect)"
        )
    _resolvent_factors(split, lam)  # collision check against spec(W)
    z = split.w_vectors.T @ split.k_s
    correction = lam * float(((z * z) / (split.w_values - lam)[:, None]).sum())
    return 1.0 + correction / sum_sq


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

THEOREM_TAGS = (
    "first_order",
    "cluster_T33",
    "sandwich_T34",
    "trace_T34",
    "prop_36",
    "classical_TK",
    "abs_cluster",
)


@dataclass(frozen=True)
class BoundEntry:
    """One per-eigenvalue interval for (mu_i - lambda_i)/mu_i."""

    index: int
    theorem: str
    lower: float
    upper: float
    valid: bool

    def __post_init__(self):
        if self.theorem not in THEOREM_TAGS:
            raise ValueError(f"unknown theorem tag {self.theorem!r}")
        if self.lower > self.upper:
            raise ValueError(
                f"empty bound interval [{self.lower}, {self.upper}] for "
                f"{self.theorem}"
            )


@dataclass(frozen=True)
class BoundReport:
    """Full record of one bound evaluation run.

    ``flags`` records which hypotheses were checked and whether they hold;
    every formula is evaluated regardless (or stored as None when it is
    not even computable), so the report distinguishes "bound proven" from
    "formula evaluated".
    """

    n: int
    m: int
    q: int
    norm_kind: str
    mu: tuple
    etas: tuple
    eta_route: str
    lambda_ref: tuple
    gaps: GapData
    flags: dict
    entries: tuple
    aggregates: dict


def _finite_or_none(x):
    return None if x is None or not math.isfinite(x) else float(x)


def build_report(h, subspace: TestSubspace, norm_kind="frobenius", lambda_ref=None, q: int = 1) -> BoundReport:
    """Run the full defect/bound pipeline for one operator and subspace.

    ``lambda_ref`` supplies the reference eigenvalues (exact values where a
    model provides them); by default they are computed from ``h``.  ``q``
    is the 1-based index of the target eigenvalue cluster.
    """
    kind = NormKind.coerce(norm_kind)
    hm = as_symmetric(h)
    rd = ritz(hm, subspace)
    split = p_diagonal_split(hm, subspace)
    ds = etas_schur(split)
    psi, omega = moment_matrices(hm, rd)
    ds_moments = etas_moments(psi, omega)
    m = subspace.dim
    mu = rd.mu

    if lambda_ref is None:
        lambda_ref, _ = sym_eig(hm)
    lambda_ref = np.asarray(lambda_ref, dtype=float)
    if q < 1 or q + m - 1 > len(lambda_ref):
        raise ValueError(
            f"target index q={q} with cluster size m={m} needs at least "
            f"{q + m - 1} reference eigenvalues"
        )
    lam_q = float(lambda_ref[q - 1])
    lam_qm1 = float(lambda_ref[q - 2]) if q >= 2 else 0.0
    lam_qpm = float(lambda_ref[q + m - 1]) if q + m - 1 < len(lambda_ref) else INF
    lam_mp1 = float(lambda_ref[m]) if m < len(lambda_ref) else INF

    g_q = relative_gap_gq(split.w_values, lam_q)
    g_1 = g_q if q == 1 else relative_gap_gq(split.w_values, float(lambda_ref[0]))
    gam = gamma_s(lam_qm1, lam_qpm, float(mu[0]), float(mu[-1]))
    gaps = GapData(
        q=q,
        g_q=g_q,
        gamma_s=gam,
        lambda_qm1=lam_qm1,
        lambda_qpm=lam_qpm,
        mu_1=float(mu[0]),
        mu_m=float(mu[-1]),
    )

    eta_m = ds.eta_max
    rel_tol = 1e-8
    cluster_is_multiple = abs(float(lambda_ref[q + m - 2]) - lam_q) <= rel_tol * abs(lam_q)
    flags = {
        "routes_agree": bool(np.max(np.abs(ds.etas - ds_moments.etas)) <= 1e-9),
        "cluster_multiplicity": bool(
            cluster_is_multiple and lam_qm1 < lam_q and lam_q < lam_qpm
        ),
        "eta_vs_gamma": bool(eta_m / (1.0 - eta_m) < gam),
        "mu_below_next": bool(q == 1 and float(mu[-1]) < lam_mp1),
        "two_eta_below_one": bool(2.0 * eta_m < 1.0),
        "tk_gap": bool(len(lambda_ref) > 1 and float(lambda_ref[1]) > float(mu[0])),
    }

    # unscaled coupling block for the absolute bounds
    u = split.basis[:, :m]
    v = split.basis[:, m:]
    k_raw = v.T @ hm.entries @ u
    abs_gap_ok = ui_norm(k_raw, NormKind.SPECTRAL) < lam_mp1 - float(mu[-1])
    flags["abs_gap"] = bool(abs_gap_ok)

    aggregates: dict = {
        "g_q": _finite_or_none(g_q),
        "g_1": _finite_or_none(g_1),
        "gamma_s": gam,
        "g_q_lemma23": _finite_or_none(
            gq_lower_bound_lemma(eta_m, float(mu[0]), float(mu[-1]), lam_qm1, lam_qpm)
        ),
        "dl": dl_measure(psi, mu),
        "eta_sum_squares": ds.sum_squares(),
    }
    aggregates["g1_cor35"] = (
        g1_from_spectral_gap(lam_mp1, float(mu[-1])) if flags["mu_below_next"] else None
    )

    c33 = cluster_upper_bound(ds, g_q, kind) if g_q > 0 else None
    aggregates["cluster_T33"] = c33
    if g_1 > 0:
        s_lo, s_hi = sandwich_bounds(ds, g_1, kind)
        t_lo, t_hi = trace_sandwich(ds, g_1)
    else:
        s_lo, s_hi = sandwich_bounds(ds, INF, kind)[0], None
        t_lo, t_hi = ds.sum_squares(), None
    aggregates["sandwich_lower"] = s_lo
    aggregates["sandwich_upper"] = _finite_or_none(s_hi) if s_hi is not None else None
    aggregates["trace_lower"] = t_lo
    aggregates["trace_upper"] = _finite_or_none(t_hi) if t_hi is not None else None

    ratios = mu * np.diag(omega.entries)
    aggregates["prop36_lower"] = prop_lower_bound(mu, ratios)
    r_lo, r_hi = residual_eta_sandwich(ratios, aggregates["dl"])
    aggregates["residual_eta_lower"] = r_lo
    aggregates["residual_eta_upper"] = r_hi

    if flags["abs_gap"] and not math.isinf(lam_mp1):
        aggregates["abs_cluster"] = abs_cluster_bounds(k_raw, mu, lam_mp1, kind)
    else:
        aggregates["abs_cluster"] = None

    if flags["tk_gap"]:
        u1 = rd.vectors[:, 0]
        res = hm.entries @ u1 - float(mu[0]) * u1
        aggregates["classical_tk_lower"] = classical_temple_kato(
            float(mu[0]), float(res @ res), float(lambda_ref[1])
        )
    else:
        aggregates["classical_tk_lower"] = None

    try:
        aggregates["exactness_ratio"] = exactness_ratio(split, rd, lam_q)
    except SingularOperatorError:
        aggregates["exactness_ratio"] = None

    entries = []
    fo_valid = flags["eta_vs_gamma"] and flags["cluster_multiplicity"]
    per_index_valid = fo_valid and flags["routes_agree"]
    for i in range(m):
        entries.append(
            BoundEntry(
                index=i + 1,
                theorem="first_order",
                lower=-eta_m,
                upper=eta_m,
                valid=per_index_valid,
            )
        )
        if c33 is not None:
            entries.append(
                BoundEntry(
                    index=i + 1,
                    theorem="cluster_T33",
                    lower=-c33,
                    upper=c33,
                    valid=flags["cluster_multiplicity"] and flags["eta_vs_gamma"],
                )
            )
        if s_hi is not None and math.isfinite(s_hi):
            entries.append(
                BoundEntry(
                    index=i + 1,
                    theorem="sandwich_T34",
                    lower=-s_hi,
                    upper=s_hi,
                    valid=flags["mu_below_next"] and flags["cluster_multiplicity"],
                )
            )
        if t_hi is not None and math.isfinite(t_hi):
            entries.append(
                BoundEntry(
                    index=i + 1,
                    theorem="trace_T34",
                    lower=0.0,
                    upper=t_hi,
                    valid=flags["mu_below_next"] and flags["cluster_multiplicity"],
                )
            )
    if aggregates["classical_tk_lower"] is not None:
        tk_rel = (float(mu[0]) - aggregates["classical_tk_lower"]) / float(mu[0])
        entries.append(
            BoundEntry(index=1, theorem="classical_TK", lower=0.0, upper=tk_rel, valid=flags["tk_gap"])
        )
    if aggregates["abs_cluster"] is not None:
        for i in range(m):
            rel = aggregates["abs_cluster"] / float(mu[i])
            entries.append(
                BoundEntry(
                    index=i + 1,
                    theorem="abs_cluster",
                    lower=-rel,
                    upper=rel,
                    valid=flags["abs_gap"],
                )
            )

    return BoundReport(
        n=hm.n,
        m=m,
        q=q,
        norm_kind=kind.value,
        mu=tuple(float(x) for x in mu),
        etas=tuple(float(x) for x in ds.etas),
        eta_route=ds.route,
        lambda_ref=tuple(float(x) for x in lambda_ref[: q + m + 1]),
        gaps=gaps,
        flags=flags,
        entries=tuple(entries),
        aggregates=aggregates,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def report_to_dict(report: BoundReport) -> dict:
    """Flat JSON-ready dictionary view of a report."""
    return {
        "n": report.n,
        "m": report.m,
        "q": report.q,
        "norm_kind": report.norm_kind,
        "mu": list(report.mu),
        "etas": list(report.etas),
        "eta_route": report.eta_route,
        "lambda_ref": list(report.lambda_ref),
        "gaps": {
            "q": report.gaps.q,
            "g_q": _finite_or_none(report.gaps.g_q),
            "gamma_s": report.gaps.gamma_s,
            "lambda_qm1": report.gaps.lambda_qm1,
            "lambda_qpm": _finite_or_none(report.gaps.lambda_qpm),
            "mu_1": report.gaps.mu_1,
            "mu_m": report.gaps.mu_m,
        },
        "flags": dict(report.flags),
        "aggregates": dict(report.aggregates),
        "entries": [
            {
                "index": e.index,
                "theorem": e.theorem,
                "lower": e.lower,
                "upper": e.upper,
                "valid": e.valid,
            }
            for e in report.entries
        ],
    }


def report_to_json(report_or_dict) -> str:
    """Canonical JSON serialization (sorted keys, stable float text)."""
    d = report_or_dict if isinstance(report_or_dict, dict) else report_to_dict(report_or_dict)
    return json.dumps(d, sort_keys=True, indent=2) + "\n"


CSV_COLUMNS = ("index", "theorem", "lower", "upper", "valid")


def report_to_csv(report_or_rows) -> str:
    """Entries table as CSV with a fixed column set."""
    if isinstance(report_or_rows, BoundReport):
        rows = [
            (e.index, e.theorem, e.lower, e.upper, e.valid) for e in report_or_rows.entries
        ]
    else:
        rows = report_or_rows
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for index, theorem, lower, upper, valid in rows:
        writer.writerow(
            [index, theorem, f"{float(lower):.17g}", f"{float(upper):.17g}",
             "true" if valid in (True, "true") else "false"]
        )
    return buf.getvalue()


def csv_to_rows(text: str):
    """Parse an entries CSV back into typed rows."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    return [
        (int(index), theorem, float(lower), float(upper), valid == "true")
        for index, theorem, lower, upper, valid in reader
    ]


def format_report_table(report: BoundReport) -> str:
    """Human-readable summary, scientific notation with 4 digits."""

    def fmt(x):
        if x is None:
            return "-"
        if math.isinf(x):
            return "inf"
        return f"{x:.4e}"

    lines = [
        f"operator size n={report.n}, subspace dim m={report.m}, target q={report.q}, "
        f"norm={report.norm_kind}",
        "",
        "Ritz values and defects:",
        "  i        mu_i          eta_i",
    ]
    for i, (mu_i, eta_i) in enumerate(zip(report.mu, report.etas), start=1):
        lines.append(f"  {i:<3d}  {fmt(mu_i)}  {fmt(eta_i)}")
    lines.append("")
    lines.append("gap data:")
    lines.append(
        f"  g_q={fmt(report.gaps.g_q)}  gamma_s={fmt(report.gaps.gamma_s)}  "
        f"lambda_(q-1)={fmt(report.gaps.lambda_qm1)}  "
        f"lambda_(q+m)={fmt(report.gaps.lambda_qpm)}"
    )
    lines.append("")
    lines.append("aggregates:")
    for key in sorted(report.aggregates):
        lines.append(f"  {key:<22s} {fmt(report.aggregates[key])}")
    lines.append("")
    lines.append("hypothesis flags:")
    for key in sorted(report.flags):
        lines.append(f"  {key:<22s} {'ok' if report.flags[key] else 'FAILED'}")
    lines.append("")
    lines.append("per-eigenvalue intervals for (mu_i - lambda_i)/mu_i:")
    lines.append("  i    theorem        lower         upper        valid")
    for e in report.entries:
        lines.append(
            f"  {e.index:<3d}  {e.theorem:<12s} {fmt(e.lower):>12s}  "
            f"{fmt(e.upper):>12s}  {'ok' if e.valid else 'FAILED'}"
        )
    return "\n".join(lines) + "\n"

"""Exact cost accounting: thresholds, normalized uploads, server traffic, download.

All quantities are Fractions.  Uploads are normalized per source entry
(L*lam*kappa resp. L*kappa*mu), server traffic and download per product
entry (L*lam*mu).
"""

import csv
from dataclasses import dataclass
from fractions import Fraction

from .errors import IncompleteTrace, ShapeError

CSV_COLUMNS = [
    "scheme", "p", "m", "n", "ell", "Kc", "L", "X", "S", "R",
    "UA_num", "UA_den", "UB_num", "UB_den",
    "CC_num", "CC_den", "D_num", "D_den",
]


@dataclass(frozen=True)
class CostReport:
    scheme: str
    p: int
    m: int
    n: int
    ell: int
    Kc: int
    X: int
    S: int
    R: int
    UA: Fraction
    UB: Fraction
    CC: Fraction
    D: Fraction

    @property
    def L(self):
        return self.ell * self.Kc

    def row(self):
        return {
            "scheme": self.scheme, "p": self.p, "m": self.m, "n": self.n,
            "ell": self.ell, "Kc": self.Kc, "L": self.L, "X": self.X,
            "S": self.S, "R": self.R,
            "UA_num": self.UA.numerator, "UA_den": self.UA.denominator,
            "UB_num": self.UB.numerator, "UB_den": self.UB.denominator,
            "CC_num": self.CC.numerator, "CC_den": self.CC.denominator,
            "D_num": self.D.numerator, "D_den": self.D.denominator,
        }


def gcsa_na_costs(p, m, n, ell, Kc, X, S=None):
    """Aligned-scheme costs; S defaults to the threshold."""
    R = p * m * n * (ell + 1) * Kc + 2 * X - 1
    if S is None:
        S = R
    if S < R:
        raise ValueError(f"S={S} below threshold R={R}")
    L = ell * Kc
    return CostReport(
        scheme="gcsa-na", p=p, m=m, n=n, ell=ell, Kc=Kc, X=X, S=S, R=R,
        UA=Fraction(S, Kc * p * m),
        UB=Fraction(S, Kc * p * n),
        CC=Fraction(S - 1, L * m * n),
        D=Fraction(R, L * m * n),
    )


def ps_costs(p, m, n, X):
    """Baseline costs; batching is plain repetition, so L drops out."""
    R = 2 * p * m * n + 2 * X - 1
    S = R
    return CostReport(
        scheme="ps", p=p, m=m, n=n, ell=1, Kc=1, X=X, S=S, R=R,
        UA=Fraction(S, p * m),
        UB=Fraction(S, p * n),
        CC=Fraction(S * (S - 1), m * n),
        D=Fraction(m * n + X, m * n),
    )


def theoretical_costs(scheme, p, m, n, X, ell=1, Kc=1, S=None):
    if scheme == "gcsa-na":
        return gcsa_na_costs(p, m, n, ell, Kc, X, S=S)
    if scheme == "ps":
        return ps_costs(p, m, n, X)
    raise ValueError(f"no cost formulas for scheme {scheme!r}")


def measured_costs(trace, params):
    """Pull normalized costs out of a simulation trace, as exact Fractions."""
    if trace.decode_ok is None:
        raise IncompleteTrace("trace has no decode outcome")
    answers = trace.phase_messages("answer")
    if not answers:
        raise IncompleteTrace("trace has no answer messages")
    L = params.L
    up_a = trace.symbols(phase="sharing", sender="source-A")
    up_b = trace.symbols(phase="sharing", sender="source-B")
    server = trace.symbols(phase="offline-noise") + trace.symbols(phase="exchange")
    down = trace.symbols(phase="answer")
    return CostReport(
        scheme=trace.scheme, p=params.p, m=params.m, n=params.n,
        ell=params.ell, Kc=params.Kc, X=params.X, S=params.S, R=params.R,
        UA=Fraction(up_a, L * params.lam * params.kappa),
        UB=Fraction(up_b, L * params.kappa * params.mu),
        CC=Fraction(server, L * params.lam * params.mu),
        D=Fraction(down, L * params.lam * params.mu),
    )


def sweep(axis, X=5, values=None):
    """Cost-comparison rows for both schemes along one axis.

    axis "partition": p = m = n over `values` (default 1..5), batch size 1.
    axis "batch":     L = Kc over `values` (default 1..8) with ell = 1 and
                      p = m = n = 2.
    """
    rows = []
    if axis == "partition":
        values = list(values or range(1, 6))
        for p in values:
            rows.append(gcsa_na_costs(p, p, p, 1, 1, X).row())
            rows.append(ps_costs(p, p, p, X).row())
    elif axis == "batch":
        values = list(values or range(1, 9))
        for L in values:
            rows.append(gcsa_na_costs(2, 2, 2, 1, L, X).row())
            ps_row = ps_costs(2, 2, 2, X).row()
            ps_row["Kc"] = L  # repetition count; normalized costs unchanged
            ps_row["L"] = L
            rows.append(ps_row)
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    return rows


def write_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in rows:
        if set(row) != set(CSV_COLUMNS):
            raise ShapeError("sweep row does not match the CSV schema")
        writer.writerow(row)

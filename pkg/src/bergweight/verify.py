"""Desk-scale experiments probing the derivative-norm equivalences.

Each experiment samples a ratio that the theory predicts is bounded (or
unbounded) and reports the curve, its bracket [min, max], and a qualitative
verdict.  "Bounded" is operationalized as: the running maximum grew by less
than 5% over the last decade of grid points; divergence verdicts are
likewise qualitative.  No constants are estimated rigorously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .norms import DEFAULT_SETTINGS, bergman_norm, block_norm, hardy_norm, integral_mean
from .series import TaylorSeries, frac_deriv_mu, geometric_series, lacunary_series
from .weights import classify, scaled_weight

DEFAULT_SEED = 20250401
BOUNDED_GROWTH_FACTOR = 1.05


@dataclass
class ExperimentReport:
    """Tabular experiment record: parameter columns, ratio columns, summary."""

    experiment: str
    params: dict
    columns: dict           # name -> list (parameter and ratio columns)
    ratio_names: list
    verdict: str = ""
    passed: bool | None = None
    skipped: int = 0
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        sizes = {len(col) for col in self.columns.values()}
        if not self.columns or sizes == {0}:
            raise DomainError(f"experiment {self.experiment} produced no rows")
        if len(sizes) != 1:
            raise DomainError("ragged experiment columns")
        for name in self.ratio_names:
            vals = np.asarray(self.columns[name], dtype=float)
            if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
                raise DomainError(f"ratio column {name} must be positive and finite")
            self.summary[name] = {
                "min": float(np.min(vals)),
                "max": float(np.max(vals)),
                "max_over_min": float(np.max(vals) / np.min(vals)),
            }

    def header(self):
        return list(self.columns)

    def rows(self):
        names = self.header()
        count = len(self.columns[names[0]])
        return [[self.columns[n][i] for n in names] for i in range(count)]

    def to_json_dict(self):
        return {
            "kind": "experiment-report",
            "experiment": self.experiment,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "columns": {k: [_jsonable(v) for v in vals] for k, vals in self.columns.items()},
            "summary": self.summary,
            "verdict": self.verdict,
            "passed": self.passed,
            "skipped": self.skipped,
        }

    @property
    def verdict_line(self):
        return f"{self.experiment}: {self.verdict}"


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def stability_verdict(values, window=10, factor=BOUNDED_GROWTH_FACTOR):
    """('bounded'|'growing', growth of the running max over the last window).

    ``window`` should cover one decade of a geometric grid, or one parameter
    doubling (window=2) when successive entries already double the range.
    """
    vals = np.asarray(values, dtype=float)
    rm = np.maximum.accumulate(vals)
    w = min(window, max(1, vals.size - 1))
    growth = float(rm[-1] / rm[-1 - w])
    return ("bounded" if growth < factor else "growing"), growth


# ---------------------------------------------------------------------------
# test families


def default_family(
    n_max=2048,
    geometric_degree=1024,
    random_degree=512,
    n_random=10,
    seed=DEFAULT_SEED,
):
    """The standard suite: dyadic monomials, truncated geometric kernels,
    a lacunary series, and seeded random-coefficient polynomials."""
    family = [("monomial:0", TaylorSeries.monomial(0))]
    n = 1
    while n <= n_max:
        family.append((f"monomial:{n}", TaylorSeries.monomial(n)))
        n *= 2
    for lam in (0.5, 0.9, 0.99):
        for s in (1, 2):
            family.append((f"geometric:{lam},{s}", geometric_series(lam, s, geometric_degree)))
    family.append((f"lacunary:2,{geometric_degree}", lacunary_series(2, geometric_degree)))
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        coeffs = rng.standard_normal(random_degree + 1) + 1j * rng.standard_normal(random_degree + 1)
        family.append((f"random:{i}", TaylorSeries(coeffs)))
    return family


def monomial_family(n_max):
    family = [("monomial:0", TaylorSeries.monomial(0))]
    n = 1
    while n <= n_max:
        family.append((f"monomial:{n}", TaylorSeries.monomial(n)))
        n *= 2
    return family


def geometric_int_grid(n_max, per_decade=8, start=1):
    """Distinct integers, geometrically spaced from ``start`` to ``n_max``."""
    if n_max < start:
        raise DomainError(f"n_max must be >= {start}, got {n_max}")
    decades = math.log10(n_max / start)
    count = int(math.ceil(per_decade * decades)) + 1
    grid = start * 10.0 ** (np.arange(count) / per_decade)
    return np.unique(np.round(grid).astype(int))


# ---------------------------------------------------------------------------
# experiments


def lp_ratio(f, omega, mu, p, settings=DEFAULT_SETTINGS, nu=None, check=True):
    """Ratio of the derivative-side weighted norm to the plain weighted norm.

    Numerator: ||D_mu f||^p in the Bergman space of omega * tail_mu^p.
    Denominator: ||f||^p in the Bergman space of omega.
    """
    if f.is_zero:
        raise DomainError("lp_ratio needs a nonzero series")
    if nu is None:
        nu = scaled_weight(omega, mu, p)
    df = frac_deriv_mu(f, mu, check=check)
    num = bergman_norm(df, nu, p, settings) ** p
    den = bergman_norm(f, omega, p, settings) ** p
    if den == 0.0:
        raise DomainError("zero denominator norm in lp_ratio")
    return num / den


def equivalence_sweep(family, omega, mu, p, settings=DEFAULT_SETTINGS, check=True):
    """lp_ratio across a function family; max/min is the empirical constant.

    Boundedness verdicts are read off the monomial rows (the canonical
    witnesses, whose index doubles row to row); the bracket covers the whole
    family.
    """
    if not family:
        raise DomainError("equivalence_sweep needs a non-empty family")
    nu = scaled_weight(omega, mu, p)
    labels = []
    ratios = []
    for label, f in family:
        labels.append(label)
        ratios.append(lp_ratio(f, omega, mu, p, settings, nu=nu, check=check))
    witness = [r for lab, r in zip(labels, ratios) if lab.startswith("monomial:")]
    if len(witness) < 3:
        witness = ratios
    upper_verdict, upper_growth = stability_verdict(witness, window=2)
    lower_verdict, lower_growth = stability_verdict([1.0 / r for r in witness], window=2)
    report = ExperimentReport(
        experiment="lp-sweep",
        params={"omega": omega.label, "mu": mu.label, "p": p, "family_size": len(family)},
        columns={"f": labels, "ratio": ratios, "inverse_ratio": [1.0 / r for r in ratios]},
        ratio_names=["ratio", "inverse_ratio"],
        verdict=(
            f"upper {upper_verdict} (running-max growth {upper_growth:.4f}), "
            f"lower {lower_verdict} (running-max growth {lower_growth:.4f})"
        ),
    )
    report.params["upper_verdict"] = upper_verdict
    report.params["lower_verdict"] = lower_verdict
    return report


def monomial_necessity_curve(omega, mu, p, n_max, settings=DEFAULT_SETTINGS, per_decade=8):
    """The reverse-inequality diagnostic on monomials, from moments alone.

    Row n carries R_n = omega_{np+1} * mu_{2n+1}^p / (omega*tail_mu^p)_{np+1};
    the equivalence forces R_n to stay bounded, and the monomials are the
    canonical witnesses when it fails.
    """
    if n_max < 8:
        raise DomainError(f"n_max must be >= 8, got {n_max}")
    nu = scaled_weight(omega, mu, p)
    grid = geometric_int_grid(n_max, per_decade)
    rows = []
    for n in grid:
        num = omega.moment(n * p + 1.0) * mu.moment(2.0 * n + 1.0) ** p
        den = nu.moment(n * p + 1.0)
        rows.append(num / den)
    verdict, growth = stability_verdict(rows)
    return ExperimentReport(
        experiment="monomial-curve",
        params={"omega": omega.label, "mu": mu.label, "p": p, "n_max": n_max,
                "bounded_verdict": verdict},
        columns={"n": [int(n) for n in grid], "reverse_ratio": rows},
        ratio_names=["reverse_ratio"],
        verdict=f"{verdict} (running-max growth {growth:.4f} over last decade)",
    )


def integral_means_check(family, mu, p, r_grid=None, rho_grid=None, settings=DEFAULT_SETTINGS):
    """Ratio M_p(r, D_mu f) * tail_mu(r/rho) / M_p(rho, f) over pairs r < rho.

    The derivative-means bound predicts a uniform constant; the summary max
    is the empirical one.  Rows with a vanishing denominator are skipped and
    counted.
    """
    if not family:
        raise DomainError("integral_means_check needs a non-empty family")
    r_grid = np.linspace(0.1, 0.9, 9) if r_grid is None else np.asarray(r_grid, dtype=float)
    rho_grid = np.linspace(0.1, 0.9, 9) if rho_grid is None else np.asarray(rho_grid, dtype=float)
    if np.any(r_grid < 0) or np.any(r_grid >= 1) or np.any(rho_grid < 0) or np.any(rho_grid >= 1):
        raise DomainError("grids must lie inside [0, 1)")
    pairs = [(r, rho) for rho in rho_grid for r in r_grid if r < rho]
    if not pairs:
        raise DomainError("no pairs with r < rho in the supplied grids")
    labels = []
    col_r = []
    col_rho = []
    quotients = []
    skipped = 0
    for label, f in family:
        df = frac_deriv_mu(f, mu)
        mean_cache = {}
        dmean_cache = {}
        for r, rho in pairs:
            denom = mean_cache.get(rho)
            if denom is None:
                denom = mean_cache[rho] = integral_mean(f, rho, p, settings)
            if denom == 0.0:
                skipped += 1
                continue
            numer = dmean_cache.get(r)
            if numer is None:
                numer = dmean_cache[r] = integral_mean(df, r, p, settings)
            if numer == 0.0:
                skipped += 1  # zero rows carry no bound information
                continue
            quotients.append(numer * mu.tail(r / rho) / denom)
            labels.append(label)
            col_r.append(float(r))
            col_rho.append(float(rho))
    if not quotients:
        raise DomainError("all rows were skipped (vanishing means)")
    return ExperimentReport(
        experiment="means-check",
        params={"mu": mu.label, "p": p, "pairs": len(pairs), "family_size": len(family)},
        columns={"f": labels, "r": col_r, "rho": col_rho, "bound_quotient": quotients},
        ratio_names=["bound_quotient"],
        verdict=f"empirical constant {max(quotients):.6g} over {len(quotients)} rows",
        skipped=skipped,
    )


def suma_check(mu, gamma, k, r_grid=None, settings=DEFAULT_SETTINGS, check=True,
               term_floor=1e-16, max_terms=200):
    """Lacunary-sum vs tail-power comparison on a dyadic radius grid.

    Row r carries (1 + sum_n r^(k^n) / mu_{k^n}^gamma) * tail_mu(r)^gamma;
    for weights in the doubling intersection the curve stays in a bracket.
    Terms are truncated once they fall below ``term_floor`` of the running
    sum (after the peak).
    """
    if not (gamma > 0.0) or not math.isfinite(gamma):
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    k = int(k)
    if check and classify(mu).verdicts["d"] == "out":
        raise DomainError(
            f"weight {mu.label} looks outside the doubling intersection; "
            "pass check=False to run the comparison anyway"
        )
    if r_grid is None:
        r_grid = np.array([1.0 - 2.0 ** (-i) for i in range(26)])
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid < 0) or np.any(r_grid >= 1):
        raise DomainError("r_grid must lie inside [0, 1)")
    ratios = []
    for r in r_grid:
        total = 1.0
        log_r = math.log(r) if r > 0 else -math.inf
        previous = math.inf
        for n in range(max_terms):
            power = float(k) ** n
            term = math.exp(power * log_r) if r > 0 else (1.0 if power == 0 else 0.0)
            term /= mu.moment(power) ** gamma
            total += term
            if term < previous and term < term_floor * total:
                break
            previous = term
        ratios.append(total * mu.tail(float(r)) ** gamma)
    verdict, growth = stability_verdict(ratios)
    return ExperimentReport(
        experiment="suma-check",
        params={"mu": mu.label, "gamma": gamma, "k": k, "depth": len(r_grid) - 1},
        columns={"r": [float(r) for r in r_grid], "sum_ratio": ratios},
        ratio_names=["sum_ratio"],
        verdict=f"bracket max/min {max(ratios)/min(ratios):.6g}, running-max {verdict}",
    )


def norm_equivalence_check(family, eta, k, p, settings=DEFAULT_SETTINGS, check=True):
    """Bergman-to-block norm ratio across a family; the bracket is reported."""
    if not family:
        raise DomainError("norm_equivalence_check needs a non-empty family")
    if check and classify(eta).verdicts["d"] == "out":
        raise DomainError(
            f"weight {eta.label} looks outside the doubling intersection; "
            "pass check=False to run the comparison anyway"
        )
    labels = []
    ratios = []
    for label, f in family:
        if f.is_zero:
            continue
        bn = bergman_norm(f, eta, p, settings) ** p
        blk = block_norm(f, eta, k, p, settings, check=check) ** p
        labels.append(label)
        ratios.append(bn / blk)
    return ExperimentReport(
        experiment="norm-equiv",
        params={"eta": eta.label, "k": k, "p": p, "family_size": len(labels)},
        columns={"f": labels, "norm_ratio": ratios},
        ratio_names=["norm_ratio"],
        verdict=f"bracket [{min(ratios):.6g}, {max(ratios):.6g}], "
                f"max/min {max(ratios)/min(ratios):.6g}",
    )


# ---------------------------------------------------------------------------
# config-driven dispatch


def _family_from_config(cfg, settings):
    kind = cfg.family or "default"
    if kind == "default":
        return default_family(n_max=cfg.n_max or 2048,
                              geometric_degree=cfg.degree or 1024,
                              random_degree=cfg.degree or 512,
                              seed=cfg.seed)
    if kind == "monomials":
        return monomial_family(cfg.n_max or 2048)
    raise ConfigError(f"unknown family {kind!r}", key="family")


def run_experiment(cfg, settings=DEFAULT_SETTINGS):
    """Dispatch a parsed RunConfig to the experiment it names."""
    name = cfg.experiment
    if name == "classify":
        weight = cfg.require_weight("weight")
        return classify(weight)
    if name == "lp-sweep":
        return equivalence_sweep(
            _family_from_config(cfg, settings),
            cfg.require_weight("omega"),
            cfg.require_weight("mu"),
            cfg.require("p"),
            settings,
            check=not cfg.force,
        )
    if name == "monomial-curve":
        return monomial_necessity_curve(
            cfg.require_weight("omega"),
            cfg.require_weight("mu"),
            cfg.require("p"),
            int(cfg.n_max or 10_000),
            settings,
        )
    if name == "means-check":
        grids = {}
        if cfg.depth:
            grid = np.linspace(0.05, 0.95, int(cfg.depth))
            grids = {"r_grid": grid, "rho_grid": grid}
        return integral_means_check(
            _family_from_config(cfg, settings),
            cfg.require_weight("mu"),
            cfg.require("p"),
            settings=settings,
            **grids,
        )
    if name == "suma-check":
        depth = int(cfg.depth or 25)
        return suma_check(
            cfg.require_weight("mu"),
            cfg.require("gamma"),
            int(cfg.require("k")),
            r_grid=np.array([1.0 - 2.0 ** (-i) for i in range(depth + 1)]),
            settings=settings,
            check=not cfg.force,
        )
    if name == "norm-equiv":
        return norm_equivalence_check(
            _family_from_config(cfg, settings),
            cfg.require_weight("eta"),
            int(cfg.require("k")),
            cfg.require("p"),
            settings,
            check=not cfg.force,
        )
    raise ConfigError(f"unknown experiment {name!r}", key="experiment")

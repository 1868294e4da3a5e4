"""Both directions of the Lipschitz / Fourier-tail equivalence on a dyadic grid.

"Bounded for all small t" is tested as: the sup of the ratio over
``[t_max 2^-J, t_max]`` changes by less than 10% when J grows by 4.
"""

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateModulusError, FitError, ParameterError, TitchmarshError
from .functionals import dyadic_grid, lipschitz_curve, tail_curve
from .modulus import ZygmundKind, power, tail_assumptions_check, zygmund_check
from .profiles import power_profile
from .spaces import SpectralSpace

DEFAULT_J = 20
REFINE_STEP = 4
STABILITY = 0.10
FIT_DROP = 2


class Verdict(str, enum.Enum):
    EQUIVALENT = "EquivalentWithinConstants"
    FORWARD_ONLY = "ForwardOnly"
    BACKWARD_ONLY = "BackwardOnly"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RatioReport:
    ratio_sup: float
    ratio_sup_refined: float
    stable: bool
    J: int
    t_values: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)
    curve: object = field(repr=False, default=None)

    @property
    def finite(self):
        return math.isfinite(self.ratio_sup) and math.isfinite(self.ratio_sup_refined)

    @property
    def bounded(self):
        return self.finite and self.stable

    def summary(self):
        return {"ratio_sup": self.ratio_sup, "ratio_sup_refined": self.ratio_sup_refined,
                "stable": self.stable, "J": self.J}


def _stable(sup, sup_refined):
    if not (math.isfinite(sup) and math.isfinite(sup_refined)):
        return False
    if sup == 0.0:
        return sup_refined == 0.0
    return abs(sup_refined - sup) < STABILITY * abs(sup)


def _grid_and_omega(m, t_max, J, refine):
    t_max = m.delta0 / 2.0 if t_max is None else float(t_max)
    if not 0 < t_max <= m.delta0:
        raise ParameterError("t_max must lie in (0, delta0]")
    grid = dyadic_grid(t_max, J + refine)
    w = np.asarray(m(grid), dtype=float)
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise DegenerateModulusError("modulus vanishes or is not finite on the grid")
    return grid, w


def _ratio_report(grid, ratios, J, curve):
    sup = float(np.max(ratios[:J + 1]))
    sup_r = float(np.max(ratios))
    return RatioReport(sup, sup_r, _stable(sup, sup_r), J, grid, ratios, curve)


def forward_check(space, profile, m, J=DEFAULT_J, t_max=None, refine=REFINE_STEP, rtol=1e-11):
    """sup_t T(t) / (omega(t)^2 t^(n-1)) and its stability under J -> J + refine."""
    grid, w = _grid_and_omega(m, t_max, J, refine)
    T = tail_curve(space, profile, grid, rtol)
    ratios = T.values / (w * w * grid ** (space.n - 1))
    return _ratio_report(grid, ratios, J, T)


def backward_check(space, profile, m, J=DEFAULT_J, t_max=None, refine=REFINE_STEP, rtol=1e-11):
    """sup_t L(t) / omega(t) and its stability under J -> J + refine."""
    grid, w = _grid_and_omega(m, t_max, J, refine)
    L = lipschitz_curve(space, profile, grid, rtol)
    return _ratio_report(grid, L.values / w, J, L)


# -- exponent fits -----------------------------------------------------------------

@dataclass(frozen=True)
class SlopeFit:
    slope: float
    half_width: float
    intercept: float
    points: int


def fit_slope(t_values, values, drop=FIT_DROP, confidence=0.95):
    """Least-squares slope of log(value) against log(t), dropping ``drop``
    points at each end; half-width from the Student t quantile."""
    t = np.asarray(t_values, dtype=float)
    v = np.asarray(values, dtype=float)
    order = np.argsort(t)
    t, v = t[order], v[order]
    if drop:
        t, v = t[drop:-drop], v[drop:-drop]
    if t.size < 3:
        raise FitError("need at least three points to fit")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise FitError("curve values must be positive and finite on the fit range")
    x, y = np.log(t), np.log(v)
    res = stats.linregress(x, y)
    q = stats.t.ppf(0.5 + 0.5 * confidence, t.size - 2)
    return SlopeFit(float(res.slope), float(q * res.stderr), float(res.intercept), int(t.size))


@dataclass(frozen=True)
class FittedExponents:
    L: SlopeFit
    T: SlopeFit


NO_FIT = SlopeFit(float("nan"), float("nan"), float("nan"), 0)


def fit_exponents(L_curve, T_curve, drop=FIT_DROP, J=None, strict=True):
    """Slopes of L and T on the base grid (the first J+1 points when given).

    With ``strict=False`` a curve that cannot be fitted (e.g. T vanishing for
    a compactly supported spectrum) yields a NaN slope instead of an error.
    """
    def fit(c):
        n = c.t_values.size if J is None else J + 1
        try:
            return fit_slope(c.t_values[:n], c.values[:n], drop)
        except FitError:
            if strict:
                raise
            return NO_FIT

    return FittedExponents(fit(L_curve), fit(T_curve))


# -- hypotheses --------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisAudit:
    k_at_most_2: bool
    zygmund_z0: object
    zygmund_zk: object
    tail_assumptions: bool
    side_condition_sup: float
    side_condition_bounded: bool

    @property
    def passed(self):
        return (self.k_at_most_2 and self.zygmund_z0 is True and self.zygmund_zk is True
                and self.tail_assumptions and self.side_condition_bounded)

    @property
    def backward_applicable(self):
        return self.k_at_most_2

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def hypothesis_audit(m, J=DEFAULT_J, refine=REFINE_STEP):
    """Checks k <= 2, Z0, Zk, the tail assumptions and sup t^2/omega(t) < inf."""
    z0 = zygmund_check(m, ZygmundKind.Z0).holds
    zk = zygmund_check(m, ZygmundKind.ZK).holds
    try:
        tail_ok = bool(tail_assumptions_check(m).holds)
    except TitchmarshError:
        tail_ok = False
    grid = dyadic_grid(m.delta0, J + refine)
    side = grid ** 2 / np.asarray(m(grid), dtype=float)
    sup, sup_r = float(np.max(side[:J + 1])), float(np.max(side))
    return HypothesisAudit(m.order_k <= 2, z0, zk, tail_ok, sup, _stable(sup, sup_r))


# -- report ------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceReport:
    space: dict
    profile: dict
    modulus: dict
    direction_forward: RatioReport
    direction_backward: RatioReport
    hypothesis_audit: HypothesisAudit
    fitted_exponents: FittedExponents
    verdict: Verdict
    notes: tuple = ()

    def to_dict(self):
        fe = self.fitted_exponents
        return {
            "space": self.space,
            "profile": self.profile,
            "modulus": self.modulus,
            "direction_forward": self.direction_forward.summary(),
            "direction_backward": self.direction_backward.summary(),
            "hypothesis_audit": self.hypothesis_audit.to_dict(),
            "fitted_exponents": {
                "L_slope": fe.L.slope, "L_half_width": fe.L.half_width,
                "T_slope": fe.T.slope, "T_half_width": fe.T.half_width,
            },
            "verdict": self.verdict.value,
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(_plain(self.to_dict()), indent=2, sort_keys=True) + "\n"

    def summary_csv(self):
        fe = self.fitted_exponents
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["verdict", "forward_ratio_sup", "backward_ratio_sup", "L_slope",
                    "L_half_width", "T_slope", "T_half_width"])
        w.writerow([self.verdict.value] + [format(x, ".17g") for x in (
            self.direction_forward.ratio_sup, self.direction_backward.ratio_sup,
            fe.L.slope, fe.L.half_width, fe.T.slope, fe.T.half_width)])
        return buf.getvalue()


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, enum.Enum):
        return x.value
    return x


def decide(forward, backward, audit):
    if not audit.passed:
        return Verdict.INCONCLUSIVE
    if forward.bounded and backward.bounded:
        return Verdict.EQUIVALENT
    if forward.bounded:
        return Verdict.FORWARD_ONLY
    if backward.bounded:
        return Verdict.BACKWARD_ONLY
    return Verdict.INCONCLUSIVE


def equivalence_report(space, profile, m, J=DEFAULT_J, t_max=None, refine=REFINE_STEP,
                       rtol=1e-11):
    audit = hypothesis_audit(m, J, refine)
    fwd = forward_check(space, profile, m, J, t_max, refine, rtol)
    bwd = backward_check(space, profile, m, J, t_max, refine, rtol)
    notes = []
    if not audit.passed:
        notes.append("outside theorem hypotheses: verdict capped at Inconclusive")
    if bwd.curve.flagged.any():
        notes.append("some L(t) values exceed the error budget")
    fits = fit_exponents(bwd.curve, fwd.curve, J=J, strict=False)
    for name, f in (("L", fits.L), ("T", fits.T)):
        if f.points == 0:
            notes.append(f"{name} not fitted: nonpositive values on the fit range")
    return EquivalenceReport(space.to_dict(), profile.describe(), m.to_dict(), fwd, bwd, audit,
                             fits, decide(fwd, bwd, audit), tuple(notes))


def power_family(space, alpha, k=2, cut="hard", delta0=1.0):
    """omega = t^alpha paired with H = lam^-(2 alpha + n) on [1, inf)."""
    return power_profile(alpha, space.n, cut), power(alpha, k=k, delta0=delta0)


def titchmarsh_n1(profile, alpha, J=DEFAULT_J, t_max=0.5, refine=REFINE_STEP):
    """The one-dimensional case with omega(t) = t^alpha, 0 < alpha < 2."""
    if not 0 < alpha < 2:
        raise ParameterError("alpha must lie in (0, 2)")
    space = SpectralSpace.euclidean(1)
    return equivalence_report(space, profile, power(alpha, k=2, delta0=1.0), J, t_max, refine)


__all__ = [
    "Verdict", "RatioReport", "SlopeFit", "FittedExponents", "HypothesisAudit",
    "EquivalenceReport", "forward_check", "backward_check", "fit_slope", "fit_exponents",
    "hypothesis_audit", "equivalence_report", "decide", "power_family", "titchmarsh_n1",
]

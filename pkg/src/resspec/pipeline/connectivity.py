"""Pairwise two-group connectivity screening with a four-color summary.

Every ordered region pair ``(i, j)``, ``i != j``, is tested in both groups
with region ``i`` as response and region ``j`` as covariate.  The color says
which groups reject: white (neither), blue (A only), red (B only), purple
(both).  Group A is the reference (e.g. controls), B the comparison group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..core import EstimationConfig, MultiSeries
from ..errors import InvalidArgumentError, ResSpecError
from ..joint import run_joint_test
from ..residual import check_alpha, run_test
from .io import Dataset

COLORS = ("white", "blue", "red", "purple")
SCENARIOS = ("linear", "joint-quadratic")
DEFAULT_LAGS = tuple(range(6))


def color_for(reject_a: bool, reject_b: bool) -> str:
    return COLORS[int(bool(reject_a)) + 2 * int(bool(reject_b))]


@dataclass(frozen=True)
class PairResult:
    source: str
    target: str
    reject_a: Optional[bool]
    reject_b: Optional[bool]
    p_a: Optional[float]
    p_b: Optional[float]
    color: Optional[str]

    @property
    def testable(self) -> bool:
        return self.color is not None


@dataclass(frozen=True)
class ConnectivityGrid:
    """Per ordered pair results. ``source`` is the response region, ``target`` the covariate."""

    regions: tuple
    scenario: str
    alpha: float
    pairs: tuple
    untestable: tuple = ()
    bonferroni: bool = False
    lags: tuple = field(default=())

    @property
    def counts(self) -> dict:
        out = {c: 0 for c in COLORS}
        for p in self.pairs:
            if p.color is not None:
                out[p.color] += 1
        return out

    def pair(self, source, target) -> PairResult:
        for p in self.pairs:
            if (p.source, p.target) == (source, target):
                return p
        raise KeyError((source, target))

    def to_dict(self) -> dict:
        return {
            "regions": list(self.regions),
            "scenario": self.scenario,
            "alpha": self.alpha,
            "bonferroni": self.bonferroni,
            "lags": list(self.lags),
            "counts": self.counts,
            "pairs": [{"source": p.source, "target": p.target, "reject_a": p.reject_a,
                       "reject_b": p.reject_b, "p_a": p.p_a, "p_b": p.p_b, "color": p.color}
                      for p in self.pairs],
            "untestable": [dict(u) for u in self.untestable],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConnectivityGrid":
        pairs = tuple(PairResult(p["source"], p["target"], p["reject_a"], p["reject_b"],
                                 p["p_a"], p["p_b"], p["color"]) for p in d["pairs"])
        untestable = tuple(tuple(sorted(u.items())) for u in d.get("untestable", []))
        return cls(tuple(d["regions"]), d["scenario"], d["alpha"], pairs, untestable,
                   d.get("bonferroni", False), tuple(d.get("lags", ())))


def _one(data: Dataset, i: int, j: int, scenario, alpha, config, lags):
    xi, xj = data.data[:, i], data.data[:, j]
    if scenario == "linear":
        return run_test(MultiSeries.from_columns(xi, xj), alpha, config)
    return run_joint_test(xi, [xj], lags, alpha, config)


def _pair_task(a, b, i, j, scenario, alpha, config, lags):
    si, sj = a.labels[i], a.labels[j]
    out, errors = [], []
    for name, data in (("A", a), ("B", b)):
        try:
            rep = _one(data, i, j, scenario, alpha, config, lags)
            out.append((rep.reject, rep.p_value))
        except ResSpecError as exc:
            out.append((None, None))
            errors.append((("error", str(exc)), ("group", name), ("source", si), ("target", sj)))
    (ra, pa), (rb, pb) = out
    color = None if errors else color_for(ra, rb)
    return PairResult(si, sj, ra, rb, pa, pb, color), errors


def connectivity(group_a: Dataset, group_b: Dataset, regions: Optional[Sequence] = None,
                 scenario: str = "linear", alpha: float = 0.05,
                 config: Optional[EstimationConfig] = None, lags: Sequence[int] = DEFAULT_LAGS,
                 bonferroni: bool = False, workers: int = 1) -> ConnectivityGrid:
    """Test every ordered pair of ``regions`` in both groups.

    Parameters
    ----------
    regions : sequence, optional
        Region labels or positions; all regions by default.
    scenario : {"linear", "joint-quadratic"}
        ``linear`` runs the single test with one covariate; ``joint-quadratic``
        runs the joint test over ``X_j(t) X_j(t-u)``, ``u`` in ``lags``.
    bonferroni : bool
        Divide ``alpha`` by the number of ordered pairs.

    Pairs whose test fails numerically are listed in ``untestable`` and get
    no color; the sweep continues.
    """
    if scenario not in SCENARIOS:
        raise InvalidArgumentError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    check_alpha(alpha)
    if group_a.labels != group_b.labels:
        raise InvalidArgumentError("groups must share the same region set")
    keys = list(range(group_a.regions)) if regions is None else list(regions)
    idx = [group_a.index(k) for k in keys]
    if len(set(idx)) != len(idx):
        raise InvalidArgumentError("duplicate regions requested")
    if len(idx) < 2:
        raise InvalidArgumentError("need at least 2 regions")
    config = config or EstimationConfig()
    lags = tuple(int(u) for u in lags) if scenario == "joint-quadratic" else ()
    todo = [(i, j) for i in idx for j in idx if i != j]
    level = alpha / len(todo) if bonferroni else alpha
    args = (scenario, level, config, lags)
    if workers > 1:
        from joblib import Parallel, delayed
        results = Parallel(n_jobs=workers)(
            delayed(_pair_task)(group_a, group_b, i, j, *args) for i, j in todo)
    else:
        results = [_pair_task(group_a, group_b, i, j, *args) for i, j in todo]
    pairs = tuple(r[0] for r in results)
    untestable = tuple(e for r in results for e in r[1])
    return ConnectivityGrid(tuple(group_a.labels[i] for i in idx), scenario, float(alpha),
                            pairs, untestable, bool(bonferroni), lags)

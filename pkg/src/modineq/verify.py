"""Random and equality-structured states, trial runners and counterexample searches.

Every trial is driven by its own integer seed ``cfg.seed + i``, so any trial
can be replayed alone and results do not depend on thread scheduling.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import builders as B
from .errors import DimensionError, ParameterError, UnknownIdError
from .gfuncs import GFunction, parse_g
from .spectral import (
    FLOOR_EPS,
    TOL_EQUALITY,
    TOL_INEQUALITY,
    entropy,
    floor_state,
    quasi_entropy,
    relative_entropy,
)
from .tensor import SpaceDims, embed, marginal, partial_trace

SeedLike = Union[int, np.random.Generator]

SEARCH_BUDGET = 100
PERTURB_EPS = 1e-3


def _rng(seed: SeedLike) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(dim: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def random_state(dim: int, seed: SeedLike) -> np.ndarray:
    """Ginibre density matrix ``G G^dag / Tr``, floored to full rank."""
    if dim < 1:
        raise DimensionError(f"dim must be positive, got {dim}")
    G = ginibre(dim, _rng(seed))
    rho = G @ G.conj().T
    rho = floor_state(rho / np.trace(rho).real, FLOOR_EPS)
    return (rho + rho.conj().T) / 2


def random_pd(dim: int, seed: SeedLike, normalize: bool = True) -> np.ndarray:
    """Positive definite matrix; a state when ``normalize``, else ``G G^dag`` unscaled."""
    rng = _rng(seed)
    if normalize:
        return random_state(dim, rng)
    G = ginibre(dim, rng)
    M = G @ G.conj().T
    M = floor_state(M, FLOOR_EPS)
    return (M + M.conj().T) / 2


# -- equality-structured states ----------------------------------------------


@dataclass(frozen=True)
class EqualityState:
    """``rho_ABC = sum_k p_k rho_AB'^k (x) rho_B''C^k`` on ``H_B = (+)_k H_B'^k (x) H_B''^k``."""

    matrix: np.ndarray
    dims: SpaceDims
    blocks: tuple  # ((dB', dB''), ...)
    weights: np.ndarray
    ab_blocks: tuple
    bc_blocks: tuple


def _block_sum(dims: SpaceDims, blocks, weights, left, right) -> np.ndarray:
    """Place ``w_k L_k (x) R_k`` into the full space; L on A(x)B'_k, R on B''_k(x)C.

    With ``dC = 1`` and ``dA`` taken as given this also builds operators on AB.
    """
    dA, dB, dC = dims.as_tuple()
    out = np.zeros((dA, dB, dC, dA, dB, dC), dtype=complex)
    offset = 0
    for (d1, d2), w, L, R in zip(blocks, weights, left, right):
        L4 = L.reshape(dA, d1, dA, d1)
        R4 = R.reshape(d2, dC, d2, dC)
        T = w * np.einsum("aibj,kcld->aikcbjld", L4, R4)
        T = T.reshape(dA, d1 * d2, dC, dA, d1 * d2, dC)
        sl = slice(offset, offset + d1 * d2)
        out[:, sl, :, :, sl, :] = T
        offset += d1 * d2
    n = dims.total
    return out.reshape(n, n)


def _parse_blocks(dims_blocks) -> tuple[SpaceDims, tuple]:
    dims_blocks = [tuple(int(v) for v in b) for b in dims_blocks]
    if not dims_blocks:
        raise DimensionError("need at least one block")
    dAs = {b[0] for b in dims_blocks}
    dCs = {b[3] for b in dims_blocks}
    if len(dAs) != 1 or len(dCs) != 1:
        raise DimensionError("all blocks must share dA and dC")
    if any(min(b) < 1 for b in dims_blocks):
        raise DimensionError("block dimensions must be positive")
    blocks = tuple((b[1], b[2]) for b in dims_blocks)
    dB = sum(d1 * d2 for d1, d2 in blocks)
    return SpaceDims(dAs.pop(), dB, dCs.pop()), blocks


def equality_state(dims_blocks: Sequence[tuple], seed: SeedLike, dB: Optional[int] = None) -> EqualityState:
    """Random state with the direct-sum-of-products structure.

    ``dims_blocks`` lists ``(dA, dB'_k, dB''_k, dC)`` per block.  If ``dB`` is
    given it must equal ``sum_k dB'_k dB''_k``.
    """
    dims, blocks = _parse_blocks(dims_blocks)
    if dB is not None and dB != dims.dB:
        raise DimensionError(f"blocks span dB = {dims.dB}, expected {dB}")
    rng = _rng(seed)
    ab = tuple(random_state(dims.dA * d1, rng) for d1, _ in blocks)
    bc = tuple(random_state(d2 * dims.dC, rng) for _, d2 in blocks)
    weights = rng.dirichlet(np.ones(len(blocks))) if len(blocks) > 1 else np.ones(1)
    rho = _block_sum(dims, blocks, weights, ab, bc)
    return EqualityState((rho + rho.conj().T) / 2, dims, blocks, weights, ab, bc)


def matched_gamma(state: EqualityState, seed: SeedLike, match: bool = True) -> np.ndarray:
    """gamma_AB sharing the block structure, with the same AB' blocks when ``match``.

    The B'' parts and block weights are random; with ``match=False`` the AB'
    blocks are replaced by fresh random states as well.
    """
    rng = _rng(seed)
    dims = state.dims
    omegas = tuple(random_state(d2, rng) for _, d2 in state.blocks)
    weights = rng.dirichlet(np.ones(len(state.blocks))) if len(state.blocks) > 1 else np.ones(1)
    ab = state.ab_blocks if match else tuple(random_state(dims.dA * d1, rng) for d1, _ in state.blocks)
    gamma = _block_sum(dims.ab, state.blocks, weights, ab, omegas)
    return (gamma + gamma.conj().T) / 2


def block_layouts(dims: SpaceDims) -> list[tuple]:
    """One- and two-block decompositions of ``dB`` used by equality trials."""
    dA, dB, dC = dims.as_tuple()
    layouts = []
    for d1 in range(1, dB + 1):
        if dB % d1 == 0:
            layouts.append(((dA, d1, dB // d1, dC),))
    for first in range(1, dB):
        rest = dB - first
        layouts.append(((dA, first, 1, dC), (dA, 1, rest, dC)))
    return layouts


# -- configuration and reports -------------------------------------------------


@dataclass(frozen=True)
class TrialConfig:
    dims: SpaceDims = SpaceDims(2, 2, 2)
    trials: int = 100
    seed: int = 42
    tol_psd: float = TOL_INEQUALITY
    tol_eq: float = TOL_EQUALITY
    builders: tuple = ()
    gs: tuple = ()
    normalize: bool = True
    threads: Optional[int] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not (self.tol_psd > 0 and self.tol_eq > 0):
            raise ParameterError("tolerances must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims.as_tuple())
        d["builders"] = list(self.builders)
        d["gs"] = list(self.gs)
        d.pop("threads")
        return d


@dataclass
class TrialRecord:
    builder_id: str
    seed: int
    min_eig: float
    herm_defect: float
    norm: float = 0.0
    identities: dict = field(default_factory=dict)
    verdict: bool = True


@dataclass
class VerificationReport:
    """Per-trial records plus aggregate verdict.

    ``kind`` is ``"psd"`` (every trial must pass), ``"search"`` (passes when
    some trial witnesses the violation), ``"equality"`` or ``"convexity"``.
    ``wall_time`` is kept out of :meth:`to_dict` so reports stay byte-stable.
    """

    name: str
    kind: str
    tol: float
    records: list
    note: str = ""
    wall_time: float = 0.0

    @property
    def pass_count(self) -> int:
        return sum(r.verdict for r in self.records)

    @property
    def worst_min_eig(self) -> float:
        return min(r.min_eig for r in self.records)

    @property
    def witness_seed(self) -> Optional[int]:
        if self.kind != "search":
            return None
        hits = [r.seed for r in self.records if r.verdict]
        return min(hits) if hits else None

    @property
    def passed(self) -> bool:
        if self.kind == "search":
            return self.pass_count > 0
        return self.pass_count == len(self.records)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "tol": self.tol,
            "note": self.note,
            "passed": self.passed,
            "pass_count": self.pass_count,
            "trials": len(self.records),
            "worst_min_eig": self.worst_min_eig,
            "witness_seed": self.witness_seed,
            "records": [asdict(r) for r in sorted(self.records, key=lambda r: (r.seed, r.builder_id))],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        records = [TrialRecord(**r) for r in d["records"]]
        return cls(d["name"], d["kind"], d["tol"], records, d.get("note", ""))

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" witness_seed={self.witness_seed}" if self.kind == "search" else ""
        return (
            f"{status} {self.name:<28} {self.kind:<10} {self.pass_count}/{len(self.records)}"
            f" worst={self.worst_min_eig:+.3e}{extra} ({self.wall_time:.2f}s)"
        )


def thread_count(requested: Optional[int] = None) -> int:
    cap = os.environ.get("MODINEQ_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _run_trials(fn: Callable[[int], object], seeds: Sequence[int], threads: Optional[int]) -> list:
    n = thread_count(threads)
    if n == 1 or len(seeds) < 2:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, seeds))


def _psd_record(op: B.BuiltOperator, bid: str, seed: int, tol: float, identities=None) -> TrialRecord:
    min_eig, defect = op.min_eig, op.herm_defect
    return TrialRecord(
        bid, seed, min_eig, defect, op.norm, identities or {}, bool(min_eig >= -tol and defect <= tol)
    )


# -- builder registry ------------------------------------------------------------


def ssa_gap(rho, dims: SpaceDims) -> float:
    """``S_AB + S_BC - S_ABC - S_B`` from eigenvalues."""
    return (
        entropy(marginal(rho, dims, "AB"))
        + entropy(marginal(rho, dims, "BC"))
        - entropy(rho)
        - entropy(marginal(rho, dims, "B"))
    )


def _trace(op: B.BuiltOperator) -> float:
    return op.trace.real


@dataclass(frozen=True)
class BuilderSpec:
    id: str
    kind: str  # "psd" or "search"
    run: Callable[[SpaceDims, int, "TrialConfig"], TrialRecord]
    note: str = ""


def _run_ssa(fn, bid):
    def run(dims, seed, cfg):
        rho = random_state(dims.total, seed)
        op = fn(rho, dims)
        return _psd_record(op, bid, seed, cfg.tol_psd, {"trace": _trace(op), "ssa_gap": ssa_gap(rho, dims)})

    return run


def _run_ssa_rev(dims, seed, cfg):
    rho = random_state(dims.total, seed)
    op = B.ssa_rev_operator(rho, dims)
    rho_AB = marginal(rho, dims, "AB")
    rho_B = marginal(rho, dims, "B")
    direct = relative_entropy(embed(rho_AB, dims, "AB"), rho) - relative_entropy(
        embed(rho_B, dims.bc, "B"), marginal(rho, dims, "BC")
    )
    ids = {"trace": _trace(op), "ssa_gap": ssa_gap(rho, dims), "direct_trace": direct}
    return _psd_record(op, "ssa_rev", seed, cfg.tol_psd, ids)


def _run_subadd(dims, seed, cfg):
    d2 = dims.merged_ab
    rho = random_state(d2.total, seed)
    op = B.subadditivity_operator(rho, d2)
    gap = entropy(marginal(rho, d2, "A")) + entropy(marginal(rho, d2, "C")) - entropy(rho)
    return _psd_record(op, "subadd", seed, cfg.tol_psd, {"trace": _trace(op), "mutual_info": gap})


def _run_mpt(dims, seed, cfg):
    rng = np.random.default_rng(seed)
    rho = random_state(dims.total, rng)
    gamma = random_pd(dims.dA * dims.dB, rng, cfg.normalize)
    op = B.mpt_operator(rho, gamma, dims, normalize=cfg.normalize)
    g = gamma / np.trace(gamma).real if cfg.normalize else gamma
    g_B = partial_trace(g, dims.ab, "A")
    direct = relative_entropy(rho, embed(g, dims, "AB")) - relative_entropy(
        marginal(rho, dims, "BC"), embed(g_B, dims.bc, "B")
    )
    return _psd_record(op, "mpt", seed, cfg.tol_psd, {"trace": _trace(op), "rel_entropy_drop": direct})


def _run_cond_info(dims, seed, cfg):
    d2 = dims.merged_ab
    rho = random_state(d2.total, seed)
    op = B.cond_info_bound(rho, d2)
    cond = entropy(rho) - entropy(marginal(rho, d2, "C"))
    return _psd_record(op, "cond_info_bound", seed, cfg.tol_psd, {"trace": _trace(op), "log_dA_minus_cond": np.log(d2.dA) - cond})


def _run_wyd(t):
    bid = f"wyd:{t:g}"

    def run(dims, seed, cfg):
        rng = np.random.default_rng(seed)
        rho = random_state(dims.total, rng)
        gamma = random_pd(dims.dA * dims.dB, rng, cfg.normalize)
        op = B.wyd_operator(t, rho, gamma, dims, normalize=cfg.normalize)
        return _psd_record(op, bid, seed, cfg.tol_psd, {"trace": _trace(op)})

    return run


def _run_cs(dims, seed, cfg):
    rng = np.random.default_rng(seed)
    Q = random_state(dims.total, rng)
    P = random_pd(dims.dA * dims.dB, rng, cfg.normalize)
    op = B.cs_operator(P, Q, dims)
    return _psd_record(op, "cs", seed, cfg.tol_psd, {"trace": _trace(op)})


def _run_lr_cs(dims, seed, cfg):
    d2 = dims.merged_ab
    rng = np.random.default_rng(seed)
    X = ginibre(d2.total, rng)
    Q = random_state(d2.total, rng)
    op = B.lieb_ruskai_cs(X, Q, d2)
    return _psd_record(op, "lr_cs", seed, cfg.tol_psd, {"trace": _trace(op)})


def _run_xhalf(dims, seed, cfg):
    rng = np.random.default_rng(seed)
    rho = random_state(dims.total, rng)
    gamma = random_pd(dims.dA * dims.dB, rng, cfg.normalize)
    op = B.xhalf_operator(rho, gamma, dims, normalize=cfg.normalize)
    return _psd_record(op, "xhalf", seed, cfg.tol_psd, {"trace": _trace(op)})


def _run_general(g: GFunction):
    bid = f"general:{g.id}"

    def run(dims, seed, cfg):
        rng = np.random.default_rng(seed)
        Q = random_state(dims.total, rng)
        P = random_pd(dims.dA * dims.dB, rng, cfg.normalize)
        op = B.build_general(g, P, Q, dims)
        return _psd_record(op, bid, seed, cfg.tol_psd, {"trace": _trace(op)})

    return run


def _xpq_pair(d: int, rng, same_pq: bool):
    X = (ginibre(d, rng), ginibre(d, rng))
    P = (random_state(d, rng), random_state(d, rng))
    Q = P if same_pq else (random_state(d, rng), random_state(d, rng))
    return X, P, Q


def _run_xpq(dims, seed, cfg):
    """Midpoint convexity of the traced map; the 'eigenvalue' is the scalar slack."""
    rng = np.random.default_rng(seed)
    X, P, Q = _xpq_pair(dims.dC, rng, same_pq=False)
    t = float(np.exp(rng.uniform(-2, 2)))
    mid = B.xpq_value((X[0] + X[1]) / 2, (P[0] + P[1]) / 2, (Q[0] + Q[1]) / 2, t)
    slack = (B.xpq_value(X[0], P[0], Q[0], t) + B.xpq_value(X[1], P[1], Q[1], t)) / 2 - mid
    return TrialRecord("xpq", seed, slack, 0.0, abs(slack), {"t": t}, bool(slack >= -cfg.tol_psd))


WITNESS_EIG = 1e-8
WITNESS_DEFECT = 1e-6


def _run_xpq_probe(dims, seed, cfg):
    """Search trial: verdict is True when the operator midpoint defect has a negative eigenvalue."""
    rng = np.random.default_rng(seed)
    X, P, Q = _xpq_pair(dims.dC, rng, same_pq=True)
    D = B.xpq_operator_probe(X, P, Q, 1.0)
    op = B.BuiltOperator(D, "xpq_probe", B.digest(*X, *P))
    return TrialRecord(
        "xpq_probe", seed, op.min_eig, op.herm_defect, op.norm, {"trace": _trace(op)}, bool(op.min_eig < -WITNESS_EIG)
    )


def _run_nonherm(dims, seed, cfg):
    d2 = dims.merged_ab
    rng = np.random.default_rng(seed)
    rho = random_state(d2.total, rng)
    gamma = random_pd(d2.total, rng, cfg.normalize)
    op = B.non_hermitian_probe(rho, gamma, d2, normalize=cfg.normalize)
    return TrialRecord(
        "nonherm_probe", seed, op.min_eig, op.herm_defect, op.norm, {"trace": _trace(op)}, bool(op.herm_defect > WITNESS_DEFECT)
    )


_FIXED = {
    "ssa": BuilderSpec("ssa", "psd", _run_ssa(B.ssa_operator, "ssa")),
    "ssa_kim": BuilderSpec("ssa_kim", "psd", _run_ssa(B.ssa_operator_kim, "ssa_kim")),
    "ssa_rev": BuilderSpec("ssa_rev", "psd", _run_ssa_rev, note="Tr of ssa_rev is not the SSA gap"),
    "subadd": BuilderSpec("subadd", "psd", _run_subadd, note="A and B merged into one factor"),
    "mpt": BuilderSpec("mpt", "psd", _run_mpt),
    "cond_info_bound": BuilderSpec("cond_info_bound", "psd", _run_cond_info, note="A and B merged into one factor"),
    "cs": BuilderSpec("cs", "psd", _run_cs),
    "lr_cs": BuilderSpec("lr_cs", "psd", _run_lr_cs, note="A and B merged into one factor"),
    "xpq": BuilderSpec("xpq", "psd", _run_xpq, note="scalar midpoint-convexity slack on dC x dC"),
    "xpq_probe": BuilderSpec("xpq_probe", "search", _run_xpq_probe, note="operator midpoint defect, P = Q"),
    "xhalf": BuilderSpec("xhalf", "psd", _run_xhalf),
    "nonherm_probe": BuilderSpec("nonherm_probe", "search", _run_nonherm, note="A and B merged into one factor"),
}

BUILDER_IDS = tuple(_FIXED) + ("wyd:<t>", "general:<g-id>")


def builder_spec(bid: str) -> BuilderSpec:
    """Resolve a builder id; raises UnknownIdError / ParameterError."""
    bid = bid.strip()
    if bid in _FIXED:
        return _FIXED[bid]
    if bid.startswith("wyd:"):
        g = parse_g(bid)  # validates t
        return BuilderSpec(f"wyd:{g.param:g}", "psd", _run_wyd(g.param))
    if bid.startswith("general:"):
        g = parse_g(bid[len("general:"):])
        return BuilderSpec(f"general:{g.id}", "psd", _run_general(g))
    raise UnknownIdError(f"unknown builder id {bid!r}; valid: {', '.join(BUILDER_IDS)}")


def verify_psd(builder_id: str, cfg: TrialConfig) -> VerificationReport:
    """Run one builder on ``cfg.trials`` random instances."""
    spec = builder_spec(builder_id)
    seeds = [cfg.seed + i for i in range(cfg.trials)]
    start = time.perf_counter()
    records = _run_trials(lambda s: spec.run(cfg.dims, s, cfg), seeds, cfg.threads)
    rep = VerificationReport(f"{spec.id}@{cfg.dims}", spec.kind, cfg.tol_psd, records, spec.note)
    rep.wall_time = time.perf_counter() - start
    return rep


# -- equality conditions -------------------------------------------------------------


def _equality_ops(rho, gamma, dims: SpaceDims) -> dict:
    """All builders that reduce to equality on structured input with matched gamma."""
    rho_AB = marginal(rho, dims, "AB")
    ops = {
        "ssa": B.ssa_operator(rho, dims),
        "ssa_kim": B.ssa_operator_kim(rho, dims),
        "ssa_rev": B.ssa_rev_operator(rho, dims),
        "mpt": B.mpt_operator(rho, gamma, dims),
        "xhalf": B.xhalf_operator(rho, gamma, dims),
        "cs": B.cs_operator(gamma, rho, dims),
    }
    for t in (-1.0, 0.5, 2.0):
        ops[f"wyd:{t:g}"] = B.wyd_operator(t, rho, gamma, dims)
    ops["general:bures"] = B.build_general(parse_g("bures"), gamma, rho, dims)
    ops["mpt[gamma=rho_AB]"] = B.mpt_operator(rho, rho_AB, dims)
    return ops


def _eq_record(op: B.BuiltOperator, bid: str, seed: int, tol_eq: float) -> TrialRecord:
    ids = {"trace": _trace(op)}
    return TrialRecord(bid, seed, op.min_eig, op.herm_defect, op.norm, ids, bool(op.norm <= tol_eq))


def verify_equality_gamma(cfg: TrialConfig) -> list[VerificationReport]:
    """Equality on block-structured states, plus two strictness checks.

    Returns three reports: ``equality`` (matched gamma, every operator norm
    <= tol_eq), ``mismatch`` (search: some trial with a different AB' block
    gives norm > 1e-4) and ``perturbed`` (every eps-perturbed state stays PSD
    and has norm > 1e-5).
    """
    layouts = block_layouts(cfg.dims)
    start = time.perf_counter()

    def one(seed):
        rng = np.random.default_rng(seed)
        layout = layouts[(seed - cfg.seed) % len(layouts)]
        st = equality_state(layout, rng)
        gamma = matched_gamma(st, rng, match=True)
        eq = [_eq_record(op, bid, seed, cfg.tol_eq) for bid, op in _equality_ops(st.matrix, gamma, st.dims).items()]

        bad_gamma = matched_gamma(st, rng, match=False)
        mm = B.mpt_operator(st.matrix, bad_gamma, st.dims)
        mis = TrialRecord("mpt[mismatched]", seed, mm.min_eig, mm.herm_defect, mm.norm, {}, bool(mm.norm > 1e-4))

        sigma = random_state(st.dims.total, rng)
        pert = (1 - PERTURB_EPS) * st.matrix + PERTURB_EPS * sigma
        po = B.ssa_operator(pert, st.dims)
        ok = po.min_eig >= -cfg.tol_psd and po.herm_defect <= cfg.tol_psd and po.norm > 1e-5
        per = TrialRecord("ssa[perturbed]", seed, po.min_eig, po.herm_defect, po.norm, {"trace": _trace(po)}, bool(ok))
        return eq, mis, per

    seeds = [cfg.seed + i for i in range(cfg.trials)]
    results = _run_trials(one, seeds, cfg.threads)
    wall = time.perf_counter() - start
    reports = [
        VerificationReport(f"equality@{cfg.dims}", "equality", cfg.tol_eq, [r for eq, _, _ in results for r in eq]),
        VerificationReport(f"mismatch@{cfg.dims}", "search", 1e-4, [m for _, m, _ in results]),
        VerificationReport(
            f"perturbed@{cfg.dims}", "psd", cfg.tol_psd, [p for _, _, p in results], note=f"eps={PERTURB_EPS:g}, norm > 1e-5"
        ),
    ]
    for r in reports:
        r.wall_time = wall / len(reports)
    return reports


# -- counterexample searches ---------------------------------------------------------


def h_nonconvexity_probe(seed: int = 42, budget: int = SEARCH_BUDGET, dim: int = 2) -> VerificationReport:
    """Search for a midpoint-convexity violation of ``h(rho, gamma)``.

    A trial witnesses when the defect has an eigenvalue below ``-1e-8``.
    The traced defect (relative entropy, jointly convex) is recorded as
    ``trace_slack``; the search fails if it is ever below ``-1e-9``.
    """
    start = time.perf_counter()
    records = []
    convex_ok = True
    for s in range(seed, seed + budget):
        rng = np.random.default_rng(s)
        rhos = (random_state(dim, rng), random_state(dim, rng))
        gammas = (random_state(dim, rng), random_state(dim, rng))
        D = B.h_midpoint_defect(rhos, gammas)
        op = B.BuiltOperator(D, "h_probe", B.digest(*rhos, *gammas))
        slack = _trace(op)
        convex_ok &= slack >= -TOL_INEQUALITY
        records.append(
            TrialRecord("h_probe", s, op.min_eig, op.herm_defect, op.norm, {"trace_slack": slack}, bool(op.min_eig < -WITNESS_EIG))
        )
    rep = VerificationReport(f"h_probe@{dim}", "search", WITNESS_EIG, records)
    if not convex_ok:
        # relative-entropy convexity failing would be a bug, not a witness
        for r in rep.records:
            r.verdict = False
        rep.note = "traced defect negative"
    rep.wall_time = time.perf_counter() - start
    return rep


def counterexample_search(name: str, seed: int = 42, budget: int = SEARCH_BUDGET, dims: SpaceDims = SpaceDims(2, 1, 2)) -> VerificationReport:
    """Run one of ``nonherm_probe``, ``xpq_probe``, ``h_probe`` with a fixed budget."""
    if name == "h_probe":
        return h_nonconvexity_probe(seed, budget, dims.dC)
    spec = builder_spec(name)
    if spec.kind != "search":
        raise UnknownIdError(f"{name!r} is not a counterexample search; valid: nonherm_probe, xpq_probe, h_probe")
    cfg = TrialConfig(dims=dims, trials=budget, seed=seed, threads=1)
    rep = verify_psd(name, cfg)
    if name == "xpq_probe":
        bad = [r for r in rep.records if r.identities["trace"] < -TOL_INEQUALITY]
        if bad:
            for r in rep.records:
                r.verdict = False
            rep.note = "traced defect negative"
    return rep


SEARCHES = ("nonherm_probe", "xpq_probe", "h_probe")


# -- joint convexity and monotonicity of H_g ---------------------------------------------


N_MIXTURES = 20


def convexity_trials(g_id: str, cfg: TrialConfig) -> VerificationReport:
    """Joint convexity of ``(P, Q) -> H_g(K, P, Q)`` along random segments.

    Each trial draws two pairs of states and a fixed K on the full space and
    records the worst slack over 20 random mixing weights.
    """
    g = parse_g(g_id)
    d = cfg.dims.total
    start = time.perf_counter()

    def one(seed):
        rng = np.random.default_rng(seed)
        P1, Q1, P2, Q2 = (random_state(d, rng) for _ in range(4))
        K = ginibre(d, rng)
        h1, h2 = quasi_entropy(g, K, P1, Q1), quasi_entropy(g, K, P2, Q2)
        slacks = []
        for s in rng.uniform(0, 1, N_MIXTURES):
            mixed = quasi_entropy(g, K, s * P1 + (1 - s) * P2, s * Q1 + (1 - s) * Q2)
            slacks.append(s * h1 + (1 - s) * h2 - mixed)
        worst = float(min(slacks))
        return TrialRecord(f"convexity:{g.id}", seed, worst, 0.0, 0.0, {}, bool(worst >= -cfg.tol_psd))

    records = _run_trials(one, [cfg.seed + i for i in range(cfg.trials)], cfg.threads)
    rep = VerificationReport(f"convexity:{g.id}@{cfg.dims}", "convexity", cfg.tol_psd, records)
    rep.wall_time = time.perf_counter() - start
    return rep


def monotonicity_trials(g_id: str, cfg: TrialConfig) -> VerificationReport:
    """``H_g(I_A (x) K_BC, P_ABC, Q_ABC) >= H_g(K_BC, P_BC, Q_BC)`` on random input."""
    g = parse_g(g_id)
    dims = cfg.dims
    start = time.perf_counter()

    def one(seed):
        rng = np.random.default_rng(seed)
        P, Q = random_state(dims.total, rng), random_state(dims.total, rng)
        K = ginibre(dims.dB * dims.dC, rng)
        full = quasi_entropy(g, embed(K, dims, "BC"), P, Q)
        reduced = quasi_entropy(g, K, partial_trace(P, dims, "A"), partial_trace(Q, dims, "A"))
        slack = full - reduced
        return TrialRecord(f"monotonicity:{g.id}", seed, slack, 0.0, 0.0, {}, bool(slack >= -cfg.tol_psd))

    records = _run_trials(one, [cfg.seed + i for i in range(cfg.trials)], cfg.threads)
    rep = VerificationReport(f"monotonicity:{g.id}@{cfg.dims}", "convexity", cfg.tol_psd, records)
    rep.wall_time = time.perf_counter() - start
    return rep

"""Truncated Fock-space simulation of the clone/uncloning experiment.

This is the independent reference for :mod:`clone_invert.analytic`: states
are evolved in the Schroedinger picture through explicit squeezing unitaries
and Kraus loss channels, and the witness is read off as operator traces.
Nothing in this module uses the closed-form results.

State layout
------------
The Hilbert space is ``(A-mode a) x (A-mode a_perp) x (B qubit)`` where
``a = a_phi`` and ``a_perp = a_{phi+pi}`` are equatorial polarization modes
and the qubit basis is {photon in b_phi, photon in b_{phi+pi}}.  Every
channel used here acts on a single A-mode, so a density operator that starts
as a short sum of tensor products stays one.  :class:`FockState` stores that
sum exactly::

    rho = sum_t  coef_t * op_a_t (x) op_ap_t (x) |beta_t><beta'_t|

which keeps each step at single-mode cost and lets the cutoff reach the
~200 levels a squeezed state at g ~ 1 needs.  ``FockState.to_dense`` builds
the full ``2 (n_max+1)^2`` square matrix for checks at small cutoffs.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln, xlogy

from .core import ExperimentParams, TruncationExceeded, WitnessReport, validate_params

__all__ = [
    "TruncationPolicy",
    "Term",
    "FockState",
    "FockReport",
    "N_CEILING",
    "annihilation",
    "squeeze_matrix",
    "loss_weights",
    "stokes_matrix",
    "build_initial_state",
    "product_state",
    "apply_squeezer",
    "apply_loss",
    "apply_cloner",
    "measure_witness",
    "measure_witness_dense",
    "photon_marginals",
    "marginals_csv",
    "run_pipeline",
]

#: Hard upper bound on the per-mode cutoff reachable through auto-growth.
N_CEILING = 400

MODES = {"a": 0, "a_perp": 1}


@dataclass(frozen=True)
class TruncationPolicy:
    """Per-mode Fock cutoff and the tail population tolerated at its edge.

    ``tail_tol`` bounds the population of the two highest Fock levels of each
    A-mode marginal after a squeezer.  With ``auto_grow`` the cutoff doubles
    (up to ``n_ceiling``) until that bound holds.
    """

    n_max: int = 24
    tail_tol: float = 1e-10
    auto_grow: bool = True
    margin: int = 8
    n_ceiling: int = N_CEILING

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max}")
        if not self.tail_tol > 0:
            raise ValueError(f"tail_tol must be > 0, got {self.tail_tol}")
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        if self.n_ceiling < self.n_max:
            raise ValueError("n_ceiling must be >= n_max")

    @classmethod
    def for_gain(cls, g: float, tail_tol: float = 1e-10, **kwargs) -> "TruncationPolicy":
        """Cutoff sized from the squeezed-vacuum tail ratio ``tanh(g)^2``.

        Cropping drops *amplitudes*, and an inverse squeeze feeds them back
        into the low levels, so the edge population is pushed to
        ``(tail_tol / 100)^2`` rather than ``tail_tol``.
        """
        ceiling = kwargs.get("n_ceiling", N_CEILING)
        t2 = math.tanh(abs(g)) ** 2
        if t2 == 0.0:
            n = 4
        elif t2 >= 1.0:
            n = ceiling
        else:
            n = 2 * math.ceil(2.0 * math.log(tail_tol * 1e-2) / math.log(t2)) + 4
        return cls(n_max=int(min(max(n, 4), ceiling)), tail_tol=tail_tol, **kwargs)


@dataclass(frozen=True)
class Term:
    coef: complex
    beta: int
    beta_p: int
    op_a: np.ndarray
    op_ap: np.ndarray


@dataclass
class FockState:
    terms: List[Term]
    policy: TruncationPolicy
    phi: float = 0.0
    trace_drift: float = 0.0

    @property
    def n_max(self) -> int:
        return self.terms[0].op_a.shape[0] - 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1) ** 2

    def trace(self) -> float:
        t = sum(
            term.coef * np.trace(term.op_a) * np.trace(term.op_ap)
            for term in self.terms
            if term.beta == term.beta_p
        )
        return float(np.real(t))

    def to_dense(self) -> np.ndarray:
        """Full density matrix, index order ``(a, a_perp, B)``."""
        d = self.n_max + 1
        rho = np.zeros((d * d * 2, d * d * 2), dtype=complex)
        for t in self.terms:
            e = np.zeros((2, 2))
            e[t.beta, t.beta_p] = 1.0
            rho += t.coef * np.kron(np.kron(t.op_a, t.op_ap), e)
        return rho

    def padded(self, n_max: int) -> "FockState":
        """Same state embedded in a larger per-mode cutoff."""
        d_old = self.n_max + 1
        if n_max + 1 < d_old:
            raise ValueError("cannot shrink a state by padding")

        def pad(op):
            out = np.zeros((n_max + 1, n_max + 1), dtype=complex)
            out[:d_old, :d_old] = op
            return out

        terms = [replace(t, op_a=pad(t.op_a), op_ap=pad(t.op_ap)) for t in self.terms]
        return replace(self, terms=terms, policy=replace(self.policy, n_max=n_max))


@dataclass(frozen=True)
class FockReport:
    corr_xx: float
    corr_yy: float
    corr_zz: float
    n_a: float
    witness: float
    n_clones_measured: float
    n_max: int
    trace: float
    trace_drift: float
    max_tail: float
    stage_tails: dict = field(default_factory=dict)

    def as_witness_report(self) -> WitnessReport:
        return WitnessReport(self.corr_xx, self.corr_yy, self.corr_zz, self.n_a, self.witness)


# ---------------------------------------------------------------------------
# single-mode building blocks


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def squeeze_matrix(r: float, n_max: int, margin: int = 8) -> np.ndarray:
    """``exp[(r/2)(a^dag^2 - a^2)]`` on ``n_max + 1 + margin`` levels, cropped."""
    big = n_max + margin
    a = annihilation(big)
    gen = 0.5 * (a.T @ a.T - a @ a)
    return expm(r * gen)[: n_max + 1, : n_max + 1]


def loss_weights(eta: float, n_max: int) -> np.ndarray:
    """``w[k, m] = <m| K_k |m+k>`` for the pure-loss Kraus operators ``K_k``."""
    m = np.arange(n_max + 1, dtype=float)
    w = np.zeros((n_max + 1, n_max + 1))
    for k in range(n_max + 1):
        mm = m[: n_max + 1 - k]
        logw = 0.5 * (
            gammaln(mm + k + 1) - gammaln(mm + 1) - gammaln(k + 1) + xlogy(mm, eta) + xlogy(k, 1.0 - eta)
        )
        w[k, : n_max + 1 - k] = np.exp(logw)
    return w


def _loss_op(op: np.ndarray, w: np.ndarray) -> np.ndarray:
    d = op.shape[0]
    out = np.zeros_like(op)
    for k in range(d):
        wk = w[k, : d - k]
        if not wk.any():
            continue
        out[: d - k, : d - k] += np.outer(wk, wk) * op[k:, k:]
    return out


# ---------------------------------------------------------------------------
# polarization bookkeeping


def _equatorial_row(phi: float) -> np.ndarray:
    """Coefficients of ``a_phi`` on ``(a_h, a_v)``."""
    return np.array([np.exp(0.5j * phi), np.exp(-0.5j * phi)]) / np.sqrt(2.0)


def _basis(phi: float) -> np.ndarray:
    return np.vstack([_equatorial_row(phi), _equatorial_row(phi + np.pi)])


_MEASURED_PAIRS = {
    "x": _basis(0.0),
    "y": _basis(0.5 * np.pi),
    "z": np.eye(2, dtype=complex),
}


def stokes_matrix(axis: str, phi: float = 0.0) -> np.ndarray:
    """2x2 matrix ``M`` with ``J_axis = sum_jk M[j,k] a_j^dag a_k`` over the
    simulation modes ``(a_phi, a_{phi+pi})``.

    The same matrix is the single-photon Stokes operator of the B qubit.
    """
    # measured modes = P (h,v);  (h,v) = T^dag (sim modes)
    r = _MEASURED_PAIRS[axis] @ _basis(phi).conj().T
    return r.conj().T @ np.diag([1.0, -1.0]) @ r


# ---------------------------------------------------------------------------
# states


def build_initial_state(policy: Optional[TruncationPolicy] = None, phi: float = 0.0) -> FockState:
    """Polarization singlet ``(a^dag b_perp^dag - a_perp^dag b^dag)/sqrt2 |vac>``."""
    policy = policy or TruncationPolicy()
    d = policy.n_max + 1
    ket = [np.zeros(d), np.zeros(d)]
    ket[0][0] = 1.0
    ket[1][1] = 1.0

    def proj(i, j):
        return np.outer(ket[i], ket[j]).astype(complex)

    # component 0: a in |1>, a_perp in |0>, B = b_perp (qubit 1), amplitude +1/sqrt2
    # component 1: a in |0>, a_perp in |1>, B = b (qubit 0),      amplitude -1/sqrt2
    comps = [(+1.0, 1, 0, 1), (-1.0, 0, 1, 0)]
    terms = []
    for s, na, nap, beta in comps:
        for s2, na2, nap2, beta2 in comps:
            terms.append(Term(0.5 * s * s2, beta, beta2, proj(na, na2), proj(nap, nap2)))
    return FockState(terms, policy, phi=phi)


def product_state(
    op_a: np.ndarray, op_ap: np.ndarray, qubit: np.ndarray, policy: Optional[TruncationPolicy] = None, phi: float = 0.0
) -> FockState:
    """``op_a (x) op_ap (x) qubit`` as a :class:`FockState`."""
    op_a = np.asarray(op_a, dtype=complex)
    op_ap = np.asarray(op_ap, dtype=complex)
    n_max = op_a.shape[0] - 1
    policy = replace(policy or TruncationPolicy(n_max=n_max), n_max=n_max)
    terms = [
        Term(complex(qubit[i, j]), i, j, op_a, op_ap)
        for i in range(2)
        for j in range(2)
        if qubit[i, j] != 0
    ]
    return FockState(terms, policy, phi=phi)


# ---------------------------------------------------------------------------
# channels


def _mode_marginal(state: FockState, mode: int) -> np.ndarray:
    d = state.n_max + 1
    out = np.zeros((d, d), dtype=complex)
    for t in state.terms:
        if t.beta != t.beta_p:
            continue
        if mode == 0:
            out += t.coef * np.trace(t.op_ap) * t.op_a
        else:
            out += t.coef * np.trace(t.op_a) * t.op_ap
    return out


def _tail(state: FockState, mode: int) -> float:
    p = np.real(np.diag(_mode_marginal(state, mode)))
    return float(abs(p[-2:]).sum())


def _map_mode(state: FockState, mode: int, fn) -> FockState:
    if mode == 0:
        terms = [replace(t, op_a=fn(t.op_a)) for t in state.terms]
    else:
        terms = [replace(t, op_ap=fn(t.op_ap)) for t in state.terms]
    return replace(state, terms=terms)


def _mode_index(mode) -> int:
    if mode in (0, 1):
        return int(mode)
    try:
        return MODES[mode]
    except KeyError:
        raise ValueError(f"mode must be 'a' or 'a_perp', got {mode!r}") from None


def apply_squeezer(r: float, state: FockState, mode="a", stage: Optional[str] = None) -> FockState:
    """Single-mode squeeze ``exp[(r/2)(a^dag^2 - a^2)]`` on one A-mode.

    Raises :class:`TruncationExceeded` if the top-two-level population of the
    mode exceeds ``tail_tol`` and the cutoff may not (or can no longer) grow.
    """
    m = _mode_index(mode)
    policy = state.policy
    while True:
        s = squeeze_matrix(r, state.n_max, policy.margin)
        before = state.trace()
        out = _map_mode(state, m, lambda op: s @ op @ s.conj().T)
        tail = _tail(out, m)
        if tail <= policy.tail_tol:
            out.trace_drift = state.trace_drift + abs(out.trace() - before)
            return out
        if policy.auto_grow and state.n_max < policy.n_ceiling:
            state = state.padded(min(2 * state.n_max, policy.n_ceiling))
            continue
        where = f" at stage {stage!r}" if stage else ""
        raise TruncationExceeded(
            f"squeezer r={r} on mode {mode!r}{where}: top-level population {tail:.3e} "
            f"exceeds tail_tol={policy.tail_tol:.1e} with n_max={state.n_max}",
            stage=stage,
            tail=tail,
        )


def apply_loss(eta: float, state: FockState, mode="a") -> FockState:
    """Pure-loss channel (beam splitter of transmission ``eta`` with vacuum)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    if eta == 1.0:
        return replace(state)
    w = loss_weights(eta, state.n_max)
    return _map_mode(state, _mode_index(mode), lambda op: _loss_op(op, w))


def apply_cloner(g: float, state: FockState, stage: Optional[str] = None) -> FockState:
    """Phase-covariant cloner: the same squeezer on both equatorial A-modes."""
    state = apply_squeezer(g, state, "a", stage)
    state = apply_squeezer(g, state, "a_perp", stage)
    if state.policy.n_max != state.n_max:
        state = replace(state, policy=replace(state.policy, n_max=state.n_max))
    return state


def _apply_loss_both(eta: float, state: FockState) -> FockState:
    return apply_loss(eta, apply_loss(eta, state, "a"), "a_perp")


# ---------------------------------------------------------------------------
# measurement


def _mode_moments(op: np.ndarray) -> tuple:
    """``Tr[op]``, ``Tr[op n]``, ``Tr[op a^dag]``, ``Tr[op a]``."""
    d = op.shape[0]
    sq = np.sqrt(np.arange(1, d, dtype=float))
    n = np.arange(d, dtype=float)
    tr = np.trace(op)
    tr_n = np.dot(np.diag(op), n)
    # Tr[op a^dag] = sum_m op[m, m+1] sqrt(m+1); Tr[op a] = sum_m op[m+1, m] sqrt(m+1)
    tr_ad = np.dot(np.diag(op, 1), sq)
    tr_a = np.dot(np.diag(op, -1), sq)
    return tr, tr_n, tr_ad, tr_a


def measure_witness(state: FockState, phi: Optional[float] = None) -> WitnessReport:
    """Correlators ``<J_k^A sigma_k^B>``, ``<N^A>`` and the witness, as traces."""
    phi = state.phi if phi is None else phi
    mats = {k: stokes_matrix(k, phi) for k in "xyz"}
    corr = {k: 0.0j for k in "xyz"}
    n_a = 0.0j
    for t in state.terms:
        tra, na, ada, aa = _mode_moments(t.op_a)
        trb, nb, adb, ab = _mode_moments(t.op_ap)
        # Tr[(A x B) a_j^dag a_k] for j,k in {a, a_perp}
        pair = np.array([[na * trb, ada * ab], [aa * adb, tra * nb]])
        if t.beta == t.beta_p:
            n_a += t.coef * (na * trb + tra * nb)
        for k, m in mats.items():
            corr[k] += t.coef * m[t.beta_p, t.beta] * np.sum(m * pair)
    xx, yy, zz = (float(np.real(corr[k])) for k in "xyz")
    return WitnessReport.from_parts(xx, yy, zz, float(np.real(n_a)))


def measure_witness_dense(rho: np.ndarray, n_max: int, phi: float = 0.0) -> WitnessReport:
    """Same measurement built from full operators on the dense space."""
    d = n_max + 1
    a = annihilation(n_max)
    eye = np.eye(d)
    modes = [np.kron(np.kron(a, eye), np.eye(2)), np.kron(np.kron(eye, a), np.eye(2))]
    corr = []
    for axis in "xyz":
        m = stokes_matrix(axis, phi)
        j = sum(m[p, q] * modes[p].conj().T @ modes[q] for p in range(2) for q in range(2))
        sigma = np.kron(np.eye(d * d), m)
        corr.append(float(np.real(np.trace(rho @ j @ sigma))))
    n_op = modes[0].conj().T @ modes[0] + modes[1].conj().T @ modes[1]
    return WitnessReport.from_parts(*corr, float(np.real(np.trace(rho @ n_op))))


def photon_marginals(state: FockState) -> tuple:
    """Photon-number distributions of the two A-modes."""
    return tuple(np.real(np.diag(_mode_marginal(state, m))) for m in (0, 1))


def marginals_csv(state: FockState) -> str:
    pa, pap = photon_marginals(state)
    buf = io.StringIO()
    buf.write("n,p_a,p_a_perp\n")
    for n, (x, y) in enumerate(zip(pa, pap)):
        buf.write(f"{n},{x:.12g},{y:.12g}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# full experiment


def _n_total(state: FockState) -> float:
    return measure_witness(state).n_a


def run_pipeline(params, policy: Optional[TruncationPolicy] = None, phi: float = 0.0) -> FockReport:
    """loss eta1 -> cloner +g1 -> loss eta2 -> cloner -g2 -> loss eta3, then measure."""
    p = params if isinstance(params, ExperimentParams) else validate_params(params)
    if policy is None:
        policy = TruncationPolicy.for_gain(max(p.g1, p.g2))
    state = build_initial_state(policy, phi=phi)
    tails = {}

    state = _apply_loss_both(p.eta1, state)
    state = apply_cloner(p.g1, state, stage="cloner (+g1)")
    tails["cloner (+g1)"] = max(_tail(state, 0), _tail(state, 1))
    n_clones = _n_total(state)
    state = _apply_loss_both(p.eta2, state)
    state = apply_cloner(-p.g2, state, stage="inverse cloner (-g2)")
    tails["inverse cloner (-g2)"] = max(_tail(state, 0), _tail(state, 1))
    state = _apply_loss_both(p.eta3, state)

    rep = measure_witness(state)
    return FockReport(
        corr_xx=rep.corr_xx,
        corr_yy=rep.corr_yy,
        corr_zz=rep.corr_zz,
        n_a=rep.n_a,
        witness=rep.witness,
        n_clones_measured=n_clones,
        n_max=state.n_max,
        trace=state.trace(),
        trace_drift=state.trace_drift,
        max_tail=max(tails.values()),
        stage_tails=tails,
    )

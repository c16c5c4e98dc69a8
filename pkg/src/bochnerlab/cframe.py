"""J-adapted orthonormal frames, diagonalization of Q, and complex frame vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CLUSTER_GAP = 1e-7


class FrameError(ValueError):
    pass


@dataclass(frozen=True)
class AdaptedFrame:
    """Orthonormal ``{e_a, J e_a}`` with eigenvalues ``mu_a`` of ``Q^1`` on each J-plane.

    ``e`` and ``Je`` have shape ``(n, 2n)``: one row per frame vector.
    """

    e: np.ndarray
    Je: np.ndarray
    mu: np.ndarray

    @property
    def n(self) -> int:
        return self.e.shape[0]

    @property
    def Z(self) -> np.ndarray:
        """``Z_a = e_a - i J e_a``, one per row."""
        return self.e - 1j * self.Je

    @property
    def Zbar(self) -> np.ndarray:
        return self.e + 1j * self.Je

    @property
    def basis(self) -> np.ndarray:
        """Columns ``e_1 .. e_n, Je_1 .. Je_n``."""
        return np.vstack([self.e, self.Je]).T


def adapted_frame(g, J, candidates=None, tol: float = 1e-8) -> AdaptedFrame:
    """Greedy J-orthonormalization of ``candidates`` (default: coordinate vectors).

    Each accepted candidate ``v`` is made g-orthogonal to the J-invariant span
    built so far, normalized to ``e``, and ``J e`` is adjoined.  Candidates
    that fall (numerically) in the current span are skipped.
    """
    g, J = np.asarray(g, dtype=float), np.asarray(J, dtype=float)
    d = g.shape[0]
    if d % 2:
        raise FrameError("odd dimension")
    n = d // 2
    if candidates is None:
        candidates = np.eye(d)
    span: list[np.ndarray] = []
    es, jes = [], []
    for v in np.asarray(candidates, dtype=float):
        scale = np.sqrt(abs(v @ g @ v))
        w = v - sum((f @ g @ v) * f for f in span) if span else v.copy()
        # second pass guards against cancellation
        w = w - sum((f @ g @ w) * f for f in span) if span else w
        length = np.sqrt(abs(w @ g @ w))
        if scale == 0 or length <= tol * scale:
            continue
        e = w / length
        je = J @ e
        es.append(e)
        jes.append(je)
        span += [e, je]
        if len(es) == n:
            return AdaptedFrame(np.array(es), np.array(jes), np.zeros(n))
    raise FrameError(f"could not complete an adapted frame: {len(es)} of {n} pairs after "
                     f"{len(candidates)} candidates")


def hermitian_matrix(Q, frame: AdaptedFrame) -> np.ndarray:
    """``H = A + iK`` with ``Q`` restricted to the frame equal to ``[[A, -K], [K, A]]``."""
    n = frame.n
    Qf = frame.basis.T @ np.asarray(Q) @ frame.basis
    A = Qf[:n, :n]
    K = Qf[n:, :n]
    return A + 1j * K


def diagonalize_q(Q, frame: AdaptedFrame, g, J, tol: float = 1e-8) -> AdaptedFrame:
    """Rotate ``frame`` inside the eigenspaces of ``Q^1`` so that Q is diagonal.

    ``mu`` is returned in descending order; equal eigenvalues keep the order of
    the incoming frame.  Raises :class:`FrameError` if Q is not hybrid.
    """
    Q, g, J = (np.asarray(a, dtype=float) for a in (Q, g, J))
    scale = 1.0 + float(np.max(np.abs(Q)))
    Q1 = np.linalg.solve(g, Q)
    comm = float(np.max(np.abs(Q1 @ J - J @ Q1)))
    if comm > tol * scale * (1.0 + float(np.max(np.abs(J)))) ** 2:
        raise FrameError(f"Q is not hybrid: |Q1 J - J Q1| = {comm:.3e}")
    if float(np.max(np.abs(Q - Q.T))) > tol * scale:
        raise FrameError("Q is not symmetric")

    n = frame.n
    H = hermitian_matrix(Q, frame)
    H = (H + H.conj().T) / 2
    vals, vecs = np.linalg.eigh(H)

    # cluster eigenvalues, largest first
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    clusters: list[list[int]] = []
    for i, v in enumerate(vals):
        if clusters and abs(vals[clusters[-1][0]] - v) <= CLUSTER_GAP * max(1.0, abs(v)):
            clusters[-1].append(i)
        else:
            clusters.append([i])

    columns = []
    for cl in clusters:
        V = vecs[:, cl]
        P = V @ V.conj().T
        # pick the basis of this eigenspace closest to the incoming frame order
        picked: list[np.ndarray] = []
        for k in range(n):
            w = P[:, k].copy()
            for u in picked:
                w -= (u.conj() @ w) * u
            nw = np.linalg.norm(w)
            if nw > 1e-6:
                picked.append(w / nw)
            if len(picked) == len(cl):
                break
        columns.extend(picked)
    U = np.array(columns).T  # complex coordinates in the incoming frame

    mu = np.real(np.einsum("ia,ij,ja->a", U.conj(), H, U))
    e_new = (U.real.T @ frame.e) + (U.imag.T @ frame.Je)
    je_new = np.array([J @ v for v in e_new])
    return AdaptedFrame(e_new, je_new, mu)


def complexify(frame: AdaptedFrame, J=None, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """``(Z, Zbar)``; with ``J`` given, checks ``J Z = i Z`` and ``J Zbar = -i Zbar``."""
    Z, Zb = frame.Z, frame.Zbar
    if J is not None:
        J = np.asarray(J)
        defect = max(float(np.max(np.abs(Z @ J.T - 1j * Z))), float(np.max(np.abs(Zb @ J.T + 1j * Zb))))
        if defect > tol * (1.0 + float(np.max(np.abs(J)))):
            raise FrameError(f"J Z = iZ fails by {defect:.3e}")
    return Z, Zb


def frame_for(pkg, Q) -> AdaptedFrame:
    """Adapted frame diagonalizing ``Q`` at the point of a curvature package."""
    return diagonalize_q(Q, adapted_frame(pkg.g, pkg.J), pkg.g, pkg.J)


def reconstruct_q(frame: AdaptedFrame, g) -> np.ndarray:
    """``Q = g (sum mu_a (e_a e_a^T + Je_a Je_a^T)) g`` from the frame data."""
    g = np.asarray(g)
    S = sum(m * (np.outer(e, e) + np.outer(je, je)) for m, e, je in zip(frame.mu, frame.e, frame.Je))
    return g @ S @ g

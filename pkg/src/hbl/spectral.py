"""Dense eigen-analysis kernels.

Everything downstream — condition checks, symmetrizer constructions,
eigenvalue expansions — reduces to a handful of primitives on small dense
matrices: grouping eigenvalues into clusters with right/left projectors,
deciding real semi-simplicity at a numerical tolerance, solving Lyapunov
equations for Hurwitz matrices, and searching for a common block-diagonal
symmetrizer of a family of flux matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize

from .errors import InconclusiveError, NotHurwitzError, NotSemisimpleError

__all__ = [
    "EigenGroup",
    "SemisimpleReport",
    "eig_grouped",
    "is_real_semisimple",
    "lyapunov_symmetrizer",
    "common_block_symmetrizer",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenGroup:
    """One eigenvalue cluster with dual projector bases.

    Columns of ``J_R`` span the cluster's invariant subspace; rows of
    ``J_L`` are the dual basis, so ``J_L @ J_R = I`` and the total
    projection is ``J_R @ J_L``.
    """

    value: complex
    multiplicity: int
    J_R: np.ndarray
    J_L: np.ndarray
    residual: float

    @property
    def projection(self) -> np.ndarray:
        return self.J_R @ self.J_L


def _cluster_indices(values: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage clustering of complex values at distance ``tol``."""
    order = sorted(range(len(values)), key=lambda i: (values[i].imag, values[i].real))
    parent = list(range(len(values)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            if abs(values[a] - values[b]) <= tol:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for i in order:
        groups.setdefault(find(i), []).append(i)
    out = list(groups.values())
    out.sort(key=lambda idx: (np.mean([values[i] for i in idx]).imag,
                              np.mean([values[i] for i in idx]).real))
    return out


def eig_grouped(M: np.ndarray, cluster_tol: float | None = None) -> list[EigenGroup]:
    """Eigen-decompose ``M`` and cluster its spectrum.

    Left projectors come from one inversion of the full eigenvector matrix,
    which enforces exact duality ``J_L @ J_R = I`` up to that inversion's
    error.  Groups are sorted by (imag, real) of the cluster mean so the
    ordering is deterministic.

    Raises :class:`NotSemisimpleError` when the eigenvector matrix is
    numerically singular (condition number above 1e10).
    """
    M = np.asarray(M, dtype=complex)
    N = M.shape[0]
    if cluster_tol is None:
        cluster_tol = 1e-6 * (1.0 + np.linalg.norm(M, "fro"))
    w, V = np.linalg.eig(M)
    condV = np.linalg.cond(V)
    if not np.isfinite(condV) or condV > 1e10:
        gaps = np.abs(w[:, None] - w[None, :]) + np.diag(np.full(N, np.inf))
        worst = int(np.argmin(gaps.min(axis=1)))
        raise NotSemisimpleError(
            f"matrix is not semi-simple at working precision "
            f"(eigenvector condition {condV:.2e})", eigenvalue=complex(w[worst]))
    Vinv = np.linalg.inv(V)
    groups = []
    for idx in _cluster_indices(w, cluster_tol):
        J_R = V[:, idx]
        J_L = Vinv[idx, :]
        block = J_L @ M @ J_R
        residual = float(np.max(np.linalg.norm(M @ J_R - J_R @ block, axis=0)))
        groups.append(EigenGroup(value=complex(np.mean(w[idx])),
                                 multiplicity=len(idx),
                                 J_R=J_R, J_L=J_L, residual=residual))
    return groups


@dataclass(frozen=True)
class SemisimpleReport:
    """Outcome of a real-semisimplicity test.

    ``margin`` is positive with distance-to-threshold semantics when the
    test passes and non-positive when it fails; borderline rank decisions
    (singular values within a decade of the rank threshold) are reported as
    ``inconclusive`` rather than ok.
    """

    ok: bool
    inconclusive: bool
    witness: complex | None
    margin: float
    detail: str = ""


def is_real_semisimple(M: np.ndarray, tol: float | None = None) -> SemisimpleReport:
    """Test whether all eigenvalues of ``M`` are real and semi-simple.

    Geometric multiplicity is measured as the rank deficiency of
    ``M - mu I`` at numerical rank tolerance ``N eps sigma_max``, widened to
    the cluster diameter when nearby eigenvalues are grouped.
    """
    M = np.asarray(M, dtype=float)
    N = M.shape[0]
    scale = 1.0 + np.linalg.norm(M, 2)
    if tol is None:
        tol = 1e-8 * scale
    w = np.linalg.eigvals(M)
    im_max = float(np.max(np.abs(w.imag)))
    if im_max >= tol:
        worst = w[int(np.argmax(np.abs(w.imag)))]
        return SemisimpleReport(False, False, complex(worst),
                                margin=(tol - im_max) / scale,
                                detail="non-real eigenvalue")
    margin = np.inf
    inconclusive = False
    for idx in _cluster_indices(w, max(tol, 1e3 * _EPS * scale)):
        mu = complex(np.mean(w[idx]))
        alpha = len(idx)
        sv = np.linalg.svd(M - mu.real * np.eye(N), compute_uv=False)
        diameter = max((abs(w[i] - mu) for i in idx), default=0.0)
        thresh = max(N * _EPS * max(sv[0], scale), 10.0 * diameter)
        geo = int(np.sum(sv <= thresh))
        if geo < alpha:
            # the alpha-th smallest singular value should have been zero
            gap = sv[N - alpha] if alpha <= N else 0.0
            return SemisimpleReport(False, False, mu,
                                    margin=-(gap / scale),
                                    detail=f"defective eigenvalue (alpha={alpha}, geo={geo})")
        borderline = np.sum((sv > thresh) & (sv <= 10.0 * thresh))
        if borderline:
            inconclusive = True
        nonzero = sv[sv > thresh]
        slack = (nonzero.min() / scale) if nonzero.size else 1.0
        margin = min(margin, slack, (tol - im_max) / scale)
    return SemisimpleReport(not inconclusive, inconclusive, None,
                            margin=float(margin) if np.isfinite(margin) else 1.0)


def lyapunov_symmetrizer(M: np.ndarray) -> np.ndarray:
    """Hermitian positive definite ``D`` with ``M* D + D M = -I``.

    For a Hurwitz ``M`` this is the canonical quadratic Lyapunov function;
    by construction ``Re(D M) = -I/2`` exactly.  Raises
    :class:`NotHurwitzError` when the spectrum touches the imaginary axis
    (real part above -1e-10).
    """
    M = np.asarray(M, dtype=complex)
    N = M.shape[0]
    abscissa = float(np.max(np.linalg.eigvals(M).real))
    if abscissa >= -1e-10:
        raise NotHurwitzError(
            f"spectral abscissa {abscissa:.3e} is not below -1e-10",
            abscissa=abscissa)
    D = sla.solve_continuous_lyapunov(M.conj().T, -np.eye(N, dtype=complex))
    D = 0.5 * (D + D.conj().T)
    resid = np.linalg.norm(M.conj().T @ D + D @ M + np.eye(N), "fro")
    lam_min = float(np.min(np.linalg.eigvalsh(D)))
    if resid > 1e-8 * (1 + np.linalg.norm(D, "fro")) or lam_min <= 0:
        raise ArithmeticError(
            f"Lyapunov solve failed certification (residual {resid:.2e}, "
            f"lambda_min {lam_min:.2e})")
    return D


# ---------------------------------------------------------------------------
# common block-diagonal symmetrizer search
# ---------------------------------------------------------------------------

def _sym_basis(k: int) -> list[np.ndarray]:
    out = []
    for i in range(k):
        for j in range(i, k):
            E = np.zeros((k, k))
            E[i, j] = 1.0
            E[j, i] = 1.0
            out.append(E)
    return out


def common_block_symmetrizer(A: list[np.ndarray] | tuple[np.ndarray, ...],
                             block_sizes: tuple[int, int],
                             definiteness_tol: float = 1e-8,
                             max_nullspace: int = 10) -> np.ndarray | None:
    """Search for ``S = diag(S1, S2) > 0`` symmetric with every ``S A^j`` symmetric.

    The constraints ``S A^j - (A^j)^t S = 0`` are linear in the block
    entries, so candidates live in a nullspace computed by SVD.  Positive
    definite elements are then sought by maximizing the smallest eigenvalue
    of normalized nullspace combinations (a concave function of the
    combination) over a coarse direction grid with local refinement.

    Returns a positive definite solution scaled to unit spectral norm, or
    ``None`` when the nullspace contains no such element at the searched
    resolution.  Absence is a sound certificate only in combination with a
    structural argument; see the condition-report caveats upstream.
    """
    m, r = block_sizes
    As = [np.asarray(Aj, dtype=float) for Aj in A]
    n = As[0].shape[0]
    if n != m + r:
        raise ValueError("block sizes do not sum to the matrix dimension")
    basis = []
    for S1 in _sym_basis(m):
        S = np.zeros((n, n))
        S[:m, :m] = S1
        basis.append(S)
    for S2 in _sym_basis(r):
        S = np.zeros((n, n))
        S[m:, m:] = S2
        basis.append(S)
    cols = []
    for S in basis:
        cols.append(np.concatenate([(S @ Aj - Aj.T @ S).ravel() for Aj in As]))
    Mat = np.array(cols).T  # (d n^2) x n_params
    scale = max(np.linalg.norm(Aj, 2) for Aj in As) + 1.0
    _, sv, Vt = np.linalg.svd(Mat)
    rank_tol = 1e-10 * scale * max(Mat.shape)
    rank = int(np.sum(sv > rank_tol))
    ns_dim = Mat.shape[1] - rank
    if ns_dim == 0:
        return None
    if ns_dim > max_nullspace:
        raise InconclusiveError(
            f"nullspace dimension {ns_dim} exceeds the supported search size "
            f"{max_nullspace}")
    null = Vt[rank:]

    def assemble(c: np.ndarray) -> np.ndarray:
        coeffs = c @ null
        S = np.zeros((n, n))
        for ci, Bi in zip(coeffs, basis):
            S += ci * Bi
        return S

    def neg_min_eig(c: np.ndarray) -> float:
        S = assemble(c)
        nrm = np.linalg.norm(S, "fro")
        if nrm < 1e-300:
            return 0.0
        return -float(np.min(np.linalg.eigvalsh(S / nrm)))

    # coarse deterministic direction scan, then local refinement
    candidates = []
    eye = np.eye(ns_dim)
    for i in range(ns_dim):
        candidates.append(eye[i])
        candidates.append(-eye[i])
    rng = np.random.default_rng(0)
    for _ in range(200 * ns_dim):
        c = rng.standard_normal(ns_dim)
        candidates.append(c / np.linalg.norm(c))
    best_c = min(candidates, key=neg_min_eig)
    if ns_dim > 1:
        res = minimize(neg_min_eig, best_c, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
        if res.fun < neg_min_eig(best_c):
            best_c = res.x
    S = assemble(best_c)
    S /= np.linalg.norm(S, 2)
    lam_min = float(np.min(np.linalg.eigvalsh(S)))
    if lam_min <= definiteness_tol:
        return None
    return S

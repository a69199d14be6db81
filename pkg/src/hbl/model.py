"""System descriptions for hyperbolic balance laws.

A balance law ``U_t + sum_j f^j(U)_{x_j} = Q(U)`` acts on a state split as
``U = (u, v)`` with ``u`` the m conserved components and ``v`` the r = n - m
components seen by the source.  Everything in this package works with the
constant-coefficient linearization at an equilibrium state, represented by
:class:`LinearSystem`: flux Jacobians ``A^1..A^d`` and a block source
``diag(0, L)``.  Jin-Xin relaxation enlargements of a conservation law are
described by :class:`JinXinSpec` and assembled/normalized here.

Fluxes may optionally carry an exact polynomial representation
(:class:`PolynomialMap`); Jacobians of polynomial fluxes are obtained by
exact term-wise differentiation, never by finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotTransformableError, ValidationError

__all__ = [
    "PolynomialMap",
    "BalanceLawSpec",
    "LinearSystem",
    "JinXinSpec",
    "WaveSystem",
    "linearize",
    "to_normal_form",
    "build_jinxin",
    "jinxin_normal_form",
    "second_order_reduction",
]

MAX_POLY_DEGREE = 4


# ---------------------------------------------------------------------------
# polynomial maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialMap:
    """A polynomial map R^nvars -> R^ncomp stored as explicit terms.

    ``terms[i]`` is a tuple of ``(powers, coef)`` pairs for component ``i``,
    where ``powers`` is an exponent tuple of length ``nvars``.  Total degree
    is capped at 4 so that condition checks never rely on numerically
    differentiated fluxes.
    """

    nvars: int
    ncomp: int
    terms: tuple[tuple[tuple[tuple[int, ...], float], ...], ...]

    def __post_init__(self):
        if len(self.terms) != self.ncomp:
            raise ValidationError("one term list per component required")
        for comp in self.terms:
            for powers, coef in comp:
                if len(powers) != self.nvars:
                    raise ValidationError("exponent tuple length != nvars")
                if any(p < 0 for p in powers):
                    raise ValidationError("negative exponent")
                if sum(powers) > MAX_POLY_DEGREE:
                    raise ValidationError(
                        f"total degree > {MAX_POLY_DEGREE} not supported")
                if not np.isfinite(coef):
                    raise ValidationError("non-finite polynomial coefficient")

    @classmethod
    def from_lists(cls, nvars: int,
                   comps: Sequence[Sequence[tuple[Sequence[int], float]]]) -> "PolynomialMap":
        terms = tuple(
            tuple((tuple(int(p) for p in powers), float(coef)) for powers, coef in comp)
            for comp in comps)
        return cls(nvars=nvars, ncomp=len(terms), terms=terms)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        """Evaluate at ``u`` of shape (nvars,) or (nvars, ...)."""
        u = np.asarray(u, dtype=float)
        out = np.zeros((self.ncomp,) + u.shape[1:])
        for i, comp in enumerate(self.terms):
            for powers, coef in comp:
                mon = np.full(u.shape[1:], coef) if u.ndim > 1 else coef
                for k, p in enumerate(powers):
                    if p:
                        mon = mon * u[k] ** p
                out[i] += mon
        return out

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        """Exact Jacobian at a single point ``u`` of shape (nvars,)."""
        u = np.asarray(u, dtype=float)
        J = np.zeros((self.ncomp, self.nvars))
        for i, comp in enumerate(self.terms):
            for powers, coef in comp:
                for k, p in enumerate(powers):
                    if p == 0:
                        continue
                    mon = coef * p
                    for kk, pp in enumerate(powers):
                        q = pp - 1 if kk == k else pp
                        if q:
                            mon = mon * u[kk] ** q
                    J[i, k] += mon
        return J

    def to_jsonable(self) -> list:
        return [[{"powers": list(p), "coef": c} for p, c in comp] for comp in self.terms]

    @classmethod
    def from_jsonable(cls, nvars: int, data: Iterable) -> "PolynomialMap":
        comps = [[(term["powers"], term["coef"]) for term in comp] for comp in data]
        return cls.from_lists(nvars, comps)


# ---------------------------------------------------------------------------
# balance laws
# ---------------------------------------------------------------------------

def _as_square(M, n: int, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.shape != (n, n):
        raise ValidationError(f"{name} must be {n}x{n}, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class BalanceLawSpec:
    """A balance law at a fixed equilibrium state.

    ``flux_jacobians[j] = Df^j(equilibrium)`` and ``source_jacobian =
    DQ(equilibrium)``; the first ``m`` rows of the source Jacobian vanish
    because the source acts only on the last ``r`` components.
    """

    d: int
    n: int
    m: int
    equilibrium: np.ndarray
    flux_jacobians: tuple[np.ndarray, ...]
    source_jacobian: np.ndarray
    flux_poly: tuple[PolynomialMap, ...] | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("spatial dimension must be >= 1")
        if not (1 <= self.m < self.n):
            raise ValidationError("need 1 <= m < n")
        eq = np.asarray(self.equilibrium, dtype=float)
        if eq.shape != (self.n,):
            raise ValidationError(f"equilibrium must have length {self.n}")
        object.__setattr__(self, "equilibrium", eq)
        if len(self.flux_jacobians) != self.d:
            raise ValidationError(f"expected {self.d} flux Jacobians")
        object.__setattr__(self, "flux_jacobians", tuple(
            _as_square(A, self.n, f"flux_jacobians[{j}]")
            for j, A in enumerate(self.flux_jacobians)))
        DQ = _as_square(self.source_jacobian, self.n, "source_jacobian")
        if np.any(DQ[: self.m] != 0.0):
            raise ValidationError(
                "first m rows of source_jacobian must vanish exactly")
        object.__setattr__(self, "source_jacobian", DQ)
        if self.flux_poly is not None:
            if len(self.flux_poly) != self.d:
                raise ValidationError("flux_poly needs one map per direction")
            for j, poly in enumerate(self.flux_poly):
                if poly.nvars != self.n or poly.ncomp != self.n:
                    raise ValidationError("flux_poly dimensions mismatch")
                J = poly.jacobian(self.equilibrium)
                if np.max(np.abs(J - self.flux_jacobians[j])) > 1e-10:
                    raise ValidationError(
                        f"flux_poly[{j}] Jacobian at equilibrium deviates from "
                        "flux_jacobians by more than 1e-10")

    @property
    def r(self) -> int:
        return self.n - self.m

    @property
    def q_v(self) -> np.ndarray:
        """Lower-right r x r block of the source Jacobian."""
        return self.source_jacobian[self.m:, self.m:]

    @property
    def q_u(self) -> np.ndarray:
        """Lower-left r x m block of the source Jacobian."""
        return self.source_jacobian[self.m:, : self.m]


@dataclass(frozen=True)
class LinearSystem:
    """Constant-coefficient linearization ``U_t + sum A^j U_{x_j} = source U``.

    The source is block diagonal, ``diag(0_{m x m}, L)``; systems whose
    source Jacobian couples into the conserved block must be brought to this
    form first (see :func:`to_normal_form`).
    """

    d: int
    n: int
    m: int
    A: tuple[np.ndarray, ...]
    L_block: np.ndarray
    source: np.ndarray

    def __post_init__(self):
        if len(self.A) != self.d:
            raise ValidationError(f"expected {self.d} flux matrices")
        object.__setattr__(self, "A", tuple(
            _as_square(Aj, self.n, f"A[{j}]") for j, Aj in enumerate(self.A)))
        r = self.n - self.m
        L = np.asarray(self.L_block, dtype=float)
        if L.shape != (r, r):
            raise ValidationError(f"L_block must be {r}x{r}")
        object.__setattr__(self, "L_block", L)
        src = _as_square(self.source, self.n, "source")
        expected = np.zeros((self.n, self.n))
        expected[self.m:, self.m:] = L
        if np.max(np.abs(src - expected)) > 0:
            raise ValidationError(
                "source must equal diag(0, L_block) exactly")
        object.__setattr__(self, "source", src)

    @classmethod
    def from_blocks(cls, d: int, m: int, A: Sequence[np.ndarray],
                    L_block: np.ndarray) -> "LinearSystem":
        A = tuple(np.asarray(Aj, dtype=float) for Aj in A)
        n = A[0].shape[0]
        L = np.asarray(L_block, dtype=float)
        src = np.zeros((n, n))
        src[m:, m:] = L
        return cls(d=d, n=n, m=m, A=A, L_block=L, source=src)

    @property
    def r(self) -> int:
        return self.n - self.m

    def A_of(self, omega: np.ndarray) -> np.ndarray:
        """Flux symbol ``sum_j A^j omega_j`` (linear in omega)."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        if omega.shape != (self.d,):
            raise ValidationError(f"direction must have length {self.d}")
        out = np.zeros((self.n, self.n))
        for Aj, wj in zip(self.A, omega):
            out += wj * Aj
        return out

    def symbol(self, xi: np.ndarray) -> np.ndarray:
        """Fourier symbol ``-i A(xi) + source`` of the linearized equation."""
        return -1j * self.A_of(xi) + self.source

    def blocks(self, omega: np.ndarray) -> tuple[np.ndarray, np.ndarray,
                                                 np.ndarray, np.ndarray]:
        """(A11, A12, A21, A22)(omega) with the m/r split."""
        Aw = self.A_of(omega)
        m = self.m
        return Aw[:m, :m], Aw[:m, m:], Aw[m:, :m], Aw[m:, m:]


# ---------------------------------------------------------------------------
# operations on balance laws
# ---------------------------------------------------------------------------

def linearize(spec: BalanceLawSpec) -> LinearSystem:
    """Package the equilibrium Jacobians of ``spec`` as a LinearSystem.

    No change of variables is applied, so the source Jacobian must already
    be block diagonal; otherwise use :func:`to_normal_form`.
    """
    if np.max(np.abs(spec.q_u)) > 0:
        raise ValidationError(
            "source Jacobian couples into the conserved block; "
            "apply to_normal_form first")
    return LinearSystem.from_blocks(spec.d, spec.m, spec.flux_jacobians, spec.q_v)


def to_normal_form(spec: BalanceLawSpec) -> LinearSystem:
    """Linearization in the variables ``(u, q(u, v))``.

    With ``T`` the inverse Jacobian of that change of variables at the
    equilibrium, the flux matrices become ``T^-1 A^j T`` and the source
    becomes ``diag(0, q_v)``.  Requires an invertible ``q_v`` (condition
    number below 1e12); this is exactly the invertibility guaranteed by a
    source with spectrally stable relaxation block.
    """
    qv = spec.q_v
    if np.linalg.cond(qv) > 1e12:
        raise NotTransformableError(
            "q_v at the equilibrium is numerically singular; the system has "
            "no normal form (source-block condition (RH) fails)")
    n, m = spec.n, spec.m
    dphi = np.eye(n)
    dphi[m:] = spec.source_jacobian[m:]
    T = np.linalg.inv(dphi)  # T = Dphi^{-1}
    A_t = tuple(dphi @ Aj @ T for Aj in spec.flux_jacobians)
    return LinearSystem.from_blocks(spec.d, m, A_t, qv)


# ---------------------------------------------------------------------------
# Jin-Xin relaxation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JinXinSpec:
    """Relaxation enlargement of ``u_t + sum_j F^j(u)_{x_j} = 0``.

    Auxiliary fields ``v^j`` travel with free wave-speed matrices ``b^j``
    (symmetric positive definite) and relax to ``F^j(u)`` at rate ``1/eps``.
    ``flux_jac[j] = D_u F^j`` at the rest state; ``flux_poly`` optionally
    carries the full polynomial fluxes for nonlinear simulation.
    """

    d: int
    m: int
    b: tuple[np.ndarray, ...]
    flux_jac: tuple[np.ndarray, ...]
    eps: float = 1.0
    flux_poly: tuple[PolynomialMap, ...] | None = None

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise ValidationError("need d >= 1 and m >= 1")
        if not (self.eps > 0):
            raise ValidationError("relaxation rate eps must be positive")
        if len(self.b) != self.d or len(self.flux_jac) != self.d:
            raise ValidationError("need one b^j and one K^j per direction")
        bs = []
        for j, bj in enumerate(self.b):
            bj = _as_square(bj, self.m, f"b[{j}]")
            if np.max(np.abs(bj - bj.T)) > 1e-12:
                raise ValidationError(f"b[{j}] is not symmetric within 1e-12")
            try:
                np.linalg.cholesky(bj)
            except np.linalg.LinAlgError:
                raise ValidationError(f"b[{j}] is not positive definite") from None
            bs.append(bj)
        object.__setattr__(self, "b", tuple(bs))
        object.__setattr__(self, "flux_jac", tuple(
            _as_square(Kj, self.m, f"flux_jac[{j}]") for j, Kj in enumerate(self.flux_jac)))
        if self.flux_poly is not None:
            if len(self.flux_poly) != self.d:
                raise ValidationError("flux_poly needs one map per direction")
            for j, poly in enumerate(self.flux_poly):
                if poly.nvars != self.m or poly.ncomp != self.m:
                    raise ValidationError("flux_poly dimensions mismatch")
                J = poly.jacobian(np.zeros(self.m))
                if np.max(np.abs(J - self.flux_jac[j])) > 1e-10:
                    raise ValidationError(
                        f"flux_poly[{j}] Jacobian at the rest state deviates "
                        "from flux_jac by more than 1e-10")

    @property
    def n(self) -> int:
        return self.m * (self.d + 1)

    def K_of(self, omega: np.ndarray) -> np.ndarray:
        """Convection symbol ``sum_j K^j omega_j`` of the underlying law."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.zeros((self.m, self.m))
        for Kj, wj in zip(self.flux_jac, omega):
            out += wj * Kj
        return out

    def B_of(self, omega: np.ndarray) -> np.ndarray:
        """Stacked (m d) x m column of the blocks ``omega_j b^j``."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        return np.vstack([wj * bj for bj, wj in zip(self.b, omega)])

    def calB(self, xi: np.ndarray) -> np.ndarray:
        """Wave-operator symbol ``sum_j b^j xi_j^2`` (positive definite)."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.zeros((self.m, self.m))
        for bj, xj in zip(self.b, xi):
            out += xj * xj * bj
        return out

    def F(self, u: np.ndarray) -> np.ndarray:
        """Stacked nonlinear flux (F^1; ...; F^d)(u); needs flux_poly."""
        if self.flux_poly is None:
            raise ValidationError("flux_poly not provided")
        return np.concatenate([poly(u) for poly in self.flux_poly], axis=0)


def build_jinxin(jx: JinXinSpec) -> BalanceLawSpec:
    """Assemble the n = m(d+1) dimensional balance law of a Jin-Xin system.

    The flux matrices have the off-diagonal two-block shape
    ``[[0, (E^j)^t], [B^j, 0]]`` and the source Jacobian is
    ``[[0, 0], [DF/eps, -I/eps]]``; its symbol satisfies
    ``A(omega) = [[0, Omega^t], [B(omega), 0]]``.
    """
    m, d, n = jx.m, jx.d, jx.n
    A = []
    for j in range(d):
        Aj = np.zeros((n, n))
        Aj[:m, m + j * m: m + (j + 1) * m] = np.eye(m)       # (E^j)^t block
        Aj[m + j * m: m + (j + 1) * m, :m] = jx.b[j]          # B^j block
        A.append(Aj)
    DF = np.vstack(jx.flux_jac)                               # (m d) x m
    DQ = np.zeros((n, n))
    DQ[m:, :m] = DF / jx.eps
    DQ[m:, m:] = -np.eye(m * d) / jx.eps
    poly = None
    if jx.flux_poly is not None:
        # assembled fluxes are linear in the enlarged state
        comps = []
        for j in range(d):
            comp = []
            for i in range(n):
                row = []
                for k in range(n):
                    if A[j][i, k] != 0.0:
                        powers = [0] * n
                        powers[k] = 1
                        row.append((powers, A[j][i, k]))
                comp.append(row)
            comps.append(comp)
        poly = tuple(PolynomialMap.from_lists(n, comp) for comp in comps)
    return BalanceLawSpec(d=d, n=n, m=m, equilibrium=np.zeros(n),
                          flux_jacobians=tuple(A), source_jacobian=DQ,
                          flux_poly=poly)


def jinxin_normal_form(jx: JinXinSpec) -> LinearSystem:
    """Linearized Jin-Xin system in the variables ``(u, v - corrections)``.

    Applies the unipotent transformation ``[[I, 0], [DF, I]]``; the result
    has ``A11(omega) = K(omega)``, satisfies the block identity
    ``A12 L^-1 A21 = eps (-calB(omega) + K(omega)^2)`` and carries the source
    ``diag(0, -I/eps)``.  The identity is verified on assembly.
    """
    spec = build_jinxin(jx)
    m, d, n = jx.m, jx.d, jx.n
    DF = np.vstack(jx.flux_jac)
    T = np.eye(n)
    T[m:, :m] = DF
    Tinv = np.eye(n)
    Tinv[m:, :m] = -DF
    A_t = tuple(Tinv @ Aj @ T for Aj in spec.flux_jacobians)
    L = -np.eye(m * d) / jx.eps
    sys = LinearSystem.from_blocks(d, m, A_t, L)

    # internal consistency of the assembled blocks
    rng = np.random.default_rng(12345)
    for _ in range(3):
        w = rng.standard_normal(d)
        w /= np.linalg.norm(w)
        A11, A12, A21, _ = sys.blocks(w)
        K = jx.K_of(w)
        if np.max(np.abs(A11 - K)) > 1e-12 * (1 + np.abs(K).max()):
            raise ValidationError("normal form block A11 != K(omega)")
        lhs = A12 @ np.linalg.solve(L, A21)
        rhs = jx.eps * (-jx.calB(w) + K @ K)
        if np.max(np.abs(lhs - rhs)) > 1e-12 * (1 + np.abs(rhs).max()):
            raise ValidationError(
                "normal form identity A12 L^-1 A21 = eps(-calB + K^2) violated")
    return sys


@dataclass(frozen=True)
class WaveSystem:
    """Coefficients of the damped second-order reduction of a Jin-Xin system.

    The conserved block satisfies
    ``u_tt - sum_j b^j u_{x_j x_j} + damping u_t + damping sum_j K^j u_{x_j} = 0``
    at the linear level; used only to cross-validate dispersion roots.
    """

    d: int
    m: int
    b: tuple[np.ndarray, ...]
    damping: np.ndarray
    convection: tuple[np.ndarray, ...]

    def pencil(self, lam: complex, xi: np.ndarray) -> np.ndarray:
        """Quadratic pencil ``lam^2 I + lam damping + calB(xi) + i damping K(xi)``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        calB = np.zeros((self.m, self.m))
        K = np.zeros((self.m, self.m))
        for bj, Kj, xj in zip(self.b, self.convection, xi):
            calB += xj * xj * bj
            K += xj * Kj
        I = np.eye(self.m)
        return lam * lam * I + lam * self.damping + calB + 1j * self.damping @ K

    def pencil_roots(self, xi: np.ndarray) -> np.ndarray:
        """All 2m solutions of ``det(pencil(lam, xi)) = 0`` via companion form."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        calB = np.zeros((self.m, self.m))
        K = np.zeros((self.m, self.m))
        for bj, Kj, xj in zip(self.b, self.convection, xi):
            calB += xj * xj * bj
            K += xj * Kj
        m = self.m
        comp = np.zeros((2 * m, 2 * m), dtype=complex)
        comp[:m, m:] = np.eye(m)
        comp[m:, :m] = -(calB + 1j * self.damping @ K)
        comp[m:, m:] = -self.damping
        return np.linalg.eigvals(comp)


def second_order_reduction(jx: JinXinSpec) -> WaveSystem:
    """Damped-wave coefficients of the conserved block of a Jin-Xin system."""
    return WaveSystem(d=jx.d, m=jx.m, b=jx.b,
                      damping=np.eye(jx.m) / jx.eps,
                      convection=jx.flux_jac)

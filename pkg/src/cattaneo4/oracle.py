"""Independent numerical routes used to validate the closed forms.

Three oracles, deliberately disjoint from the spectral machinery:

* ``integrate_mode`` / ``integrate_mode_batch``: embedded adaptive
  Runge-Kutta on the per-mode ODE with cubic Hermite dense output,
* ``fd_solve``: Crank-Nicolson finite differences for the full PDE on a
  uniform grid, boundary signal included,
* ``quad_integrate``: composite Simpson with compensated accumulation.

The RK max step is capped so the cubic Hermite interpolation error stays
below the requested tolerance: per step it is ~ rho^4 h^4 / 384 where rho
bounds the characteristic roots, so h <= (384 rtol)^(1/4) / rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse import csr_matrix, diags, identity
from scipy.sparse.linalg import splu

from .errors import DiscreteExceptionalError, StiffnessError

_HERMITE_CAP = 384.0


@dataclass(frozen=True)
class OdeProblem:
    """Scalar IVP: leading y'' + damping y' + stiffness y = 0, y(0), y'(0).

    ``leading`` may be exactly 0.0, in which case the problem is first order
    and the data must satisfy beta = -(stiffness/damping) alpha.
    """

    leading: float
    damping: float
    stiffness: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("leading", "damping", "stiffness", "alpha", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.damping > 0.0:
            raise ValueError("damping must be positive")
        if not self.stiffness > 0.0:
            raise ValueError("stiffness must be positive")

    def root_bound(self) -> float:
        """Upper bound on the characteristic root magnitudes."""
        if self.leading == 0.0:
            return self.stiffness / self.damping
        d = self.damping
        disc = d * d + 4.0 * abs(self.stiffness * self.leading)
        return (d + math.sqrt(disc)) / (2.0 * abs(self.leading))


class ModeTrajectory:
    """Dense-output sampler over adaptive accept points, one mode.

    Value and derivative are each interpolated by cubic Hermite using their
    own stored slopes (y' for y, y'' for y').
    """

    def __init__(self, ts, ys, slopes, t_end):
        self._ts = ts
        self._ys = ys          # (2, n) rows: value, derivative
        self._slopes = slopes  # (2, n) rows: derivative, second derivative
        self.t_end = t_end

    def __call__(self, t: float) -> tuple[float, float]:
        v = self._eval_batch(t)
        return float(v[0, 0]), float(v[1, 0])

    def _eval_batch(self, t: float):
        ts = self._ts
        if not (ts[0] - 1e-12 <= t <= self.t_end * (1 + 1e-12) + 1e-12):
            raise ValueError(f"t={t} outside integrated range [0, {self.t_end}]")
        t = min(max(t, ts[0]), ts[-1])
        i = int(np.searchsorted(ts, t, side="right")) - 1
        i = min(max(i, 0), len(ts) - 2)
        h = ts[i + 1] - ts[i]
        s = (t - ts[i]) / h
        y0, y1 = self._ys[..., i], self._ys[..., i + 1]
        d0, d1 = self._slopes[..., i] * h, self._slopes[..., i + 1] * h
        s2, s3 = s * s, s * s * s
        val = ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0
               + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1)
        return val


class BatchTrajectory(ModeTrajectory):
    """Sampler for a batch of independent modes integrated together."""

    def __call__(self, t: float):
        v = self._eval_batch(t)
        return v[0], v[1]


def _check_tols(rel_tol: float, abs_tol: float):
    for name, v in (("rel_tol", rel_tol), ("abs_tol", abs_tol)):
        if not (0.0 < v <= 1e-2):
            raise ValueError(f"{name} must lie in (0, 1e-2]")


def integrate_mode_batch(problems, t_end: float, rel_tol: float = 1e-10,
                         abs_tol: float = 1e-12) -> BatchTrajectory:
    """Integrate independent second-order problems as one stacked system.

    All ``leading`` coefficients must be nonzero; a batch shares the adaptive
    step, so its cost is set by the stiffest member.
    """
    _check_tols(rel_tol, abs_tol)
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    problems = list(problems)
    if not problems:
        raise ValueError("empty batch")
    if any(p.leading == 0.0 for p in problems):
        raise ValueError("batch integration requires nonzero leading coefficients")
    lead = np.array([p.leading for p in problems])
    damp = np.array([p.damping for p in problems])
    stiff = np.array([p.stiffness for p in problems])
    y0 = np.concatenate([[p.alpha for p in problems], [p.beta for p in problems]])
    n = len(problems)

    def rhs(_t, y):
        v = y[n:]
        acc = -(damp * v + stiff * y[:n]) / lead
        return np.concatenate([v, acc])

    rho = max(p.root_bound() for p in problems)
    max_step = (_HERMITE_CAP * rel_tol) ** 0.25 / max(rho, 1e-12)
    if max_step < 1e-12 * t_end:
        raise StiffnessError(
            f"root bound {rho:.3e} forces step below resolvable size at rel_tol={rel_tol}")
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="RK45",
                    rtol=rel_tol, atol=abs_tol,
                    max_step=min(max_step, t_end))
    if sol.status != 0:
        raise StiffnessError(f"integrator failed: {sol.message}")
    ys = np.stack([sol.y[:n], sol.y[n:]])            # (2, n, nt)
    slopes = np.empty_like(ys)
    slopes[0] = ys[1]
    slopes[1] = -(damp[:, None] * ys[1] + stiff[:, None] * ys[0]) / lead[:, None]
    return BatchTrajectory(sol.t, ys, slopes, t_end)


def integrate_mode(prob: OdeProblem, t_end: float, rel_tol: float = 1e-10,
                   abs_tol: float = 1e-12) -> ModeTrajectory:
    """Adaptive RK45 trajectory of one mode with cubic Hermite dense output.

    Degenerate problems (leading exactly 0.0) require compatible data and
    integrate the first-order reduction instead.
    """
    _check_tols(rel_tol, abs_tol)
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    if prob.leading == 0.0:
        required = -(prob.stiffness / prob.damping) * prob.alpha
        if abs(prob.beta - required) > 1e-9 * max(1.0, abs(required)):
            raise ValueError(
                "first-order fallback needs compatible data: "
                f"beta={prob.beta} but -(s/d) alpha = {required}")
        rate = -prob.stiffness / prob.damping

        def rhs1(_t, y):
            return rate * y

        max_step = (_HERMITE_CAP * rel_tol) ** 0.25 / max(abs(rate), 1e-12)
        sol = solve_ivp(rhs1, (0.0, t_end), [prob.alpha], method="RK45",
                        rtol=rel_tol, atol=abs_tol, max_step=min(max_step, t_end))
        if sol.status != 0:
            raise StiffnessError(f"integrator failed: {sol.message}")
        ys = np.stack([sol.y, rate * sol.y])
        slopes = np.stack([rate * sol.y, rate * rate * sol.y])
        return ModeTrajectory(sol.t, ys, slopes, t_end)
    batch = integrate_mode_batch([prob], t_end, rel_tol, abs_tol)
    return ModeTrajectory(batch._ts, batch._ys, batch._slopes, t_end)


def quad_integrate(values, h: float, rule: str = "simpson") -> float:
    """Composite quadrature of uniformly spaced samples with spacing h."""
    if rule != "simpson":
        raise ValueError(f"unknown quadrature rule {rule!r}")
    if not h > 0.0:
        raise ValueError("h must be positive")
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 3 or n % 2 == 0:
        raise ValueError("composite Simpson needs an odd sample count >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    total = math.fsum(w[i] * values[i] for i in range(n))
    return total * h / 3.0


def discrete_laplacian_eigenvalues(L: float, nx: int) -> np.ndarray:
    """Eigenvalues mu_k of -Delta_h on (0, L) with nx cells, k = 1..nx-1."""
    if not L > 0.0:
        raise ValueError("L must be positive")
    if nx < 2:
        raise ValueError("nx must be >= 2")
    h = L / nx
    k = np.arange(1, nx)
    return (4.0 / (h * h)) * np.sin(k * math.pi / (2 * nx)) ** 2


@dataclass(frozen=True)
class GridSolution:
    """Finite-difference trajectory snapshots on the full grid (boundaries included)."""

    nx: int
    dt: float
    x: np.ndarray
    times: np.ndarray
    theta: np.ndarray        # (len(times), nx+1)
    theta_prime: np.ndarray  # (len(times), nx+1)
    scheme: str


def fd_solve(p, L: float, nx: int, dt: float, T: float,
             theta0_samples, theta1_samples,
             signal=None, g: tuple[float, float] = (0.0, 0.0),
             snapshot_times=None) -> GridSolution:
    """Crank-Nicolson solve of the full equation on a uniform grid.

    The pre-integration form (I + c D) v' = -a v + b D u + b beta_g f(t)
    - c beta_g f''(t) is stepped with the trapezoidal rule in both u and v;
    the resulting tridiagonal system is factorized once.  Dirichlet values
    are g * f(t) (zero when no signal is given).

    Raises DiscreteExceptionalError when c collides with an eigenvalue
    1/mu_k of the discrete Laplacian, mirroring the continuous gate.
    """
    if nx < 64:
        raise ValueError("nx must be >= 64 for a meaningful comparison grid")
    if not (dt > 0.0 and T > 0.0):
        raise ValueError("dt and T must be positive")
    n_steps = int(round(T / dt))
    if n_steps < 1 or abs(n_steps * dt - T) > 1e-8 * T:
        raise ValueError("dt must divide T evenly")
    theta0 = np.asarray(theta0_samples, dtype=float)
    theta1 = np.asarray(theta1_samples, dtype=float)
    if theta0.shape != (nx + 1,) or theta1.shape != (nx + 1,):
        raise ValueError("initial samples must live on the full (nx+1)-point grid")

    mu = discrete_laplacian_eigenvalues(L, nx)
    gap = np.min(np.abs(1.0 - p.c * mu))
    if gap <= 1e-9:
        k_bad = int(np.argmin(np.abs(1.0 - p.c * mu))) + 1
        raise DiscreteExceptionalError(
            f"c={p.c} collides with discrete eigenvalue 1/mu_{k_bad} at nx={nx}",
            value=p.c, nearest=1.0 / mu[k_bad - 1])
    # time-step resonance of the CN system matrix
    cn_eig = (1.0 - p.c * mu) + 0.5 * p.a * dt + 0.25 * p.b * dt * dt * mu
    if np.min(np.abs(cn_eig)) <= 1e-9:
        raise DiscreteExceptionalError(
            f"CN system matrix nearly singular at dt={dt}, nx={nx}", value=p.c)

    h = L / nx
    if signal is None:
        def f_of(_t):
            return 0.0

        def fpp_of(_t):
            return 0.0
    else:
        f_of, fpp_of = signal.value, signal.second_derivative

    g0, g1 = g
    # boundary consistency of the initial data
    for edge, gval in ((0, g0), (nx, g1)):
        want = gval * f_of(0.0)
        if abs(theta0[edge] - want) > 1e-6 * max(1.0, abs(want)):
            raise ValueError("theta0 samples disagree with the boundary signal at t=0")

    m = nx - 1
    lap = diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(m, m)) / (h * h)
    eye = identity(m)
    mass = eye + p.c * lap
    a_plus = (mass + (0.5 * p.a * dt) * eye - (0.25 * p.b * dt * dt) * lap).tocsc()
    a_minus = csr_matrix(mass - (0.5 * p.a * dt) * eye + (0.25 * p.b * dt * dt) * lap)
    lap = csr_matrix(lap)
    lu = splu(a_plus)

    bvec = np.zeros(m)
    bvec[0] = g0 / (h * h)
    bvec[-1] = g1 / (h * h)

    u = theta0[1:-1].copy()
    v = theta1[1:-1].copy()

    if snapshot_times is None:
        snapshot_times = [T]
    snap_steps = sorted({min(max(int(round(ts / dt)), 0), n_steps) for ts in snapshot_times})
    records = {}

    def record(step):
        t = step * dt
        ft = f_of(t)
        full_u = np.concatenate([[g0 * ft], u, [g1 * ft]])
        dft = 0.0 if signal is None else signal.derivative(t)
        full_v = np.concatenate([[g0 * dft], v, [g1 * dft]])
        records[step] = (t, full_u, full_v)

    if 0 in snap_steps:
        record(0)
    t = 0.0
    for step in range(1, n_steps + 1):
        t_next = step * dt
        forcing = (0.5 * p.b * (f_of(t) + f_of(t_next))
                   - 0.5 * p.c * (fpp_of(t) + fpp_of(t_next)))
        rhs = a_minus @ v + dt * (p.b * (lap @ u) + forcing * bvec)
        v_new = lu.solve(rhs)
        u += 0.5 * dt * (v + v_new)
        v = v_new
        t = t_next
        if step in snap_steps:
            record(step)

    steps = sorted(records)
    times = np.array([records[s][0] for s in steps])
    theta = np.stack([records[s][1] for s in steps])
    theta_prime = np.stack([records[s][2] for s in steps])
    return GridSolution(nx=nx, dt=dt, x=np.linspace(0.0, L, nx + 1),
                        times=times, theta=theta, theta_prime=theta_prime,
                        scheme="crank-nicolson tridiagonal, factorized once")

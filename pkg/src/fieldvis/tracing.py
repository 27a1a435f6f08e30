"""Particle tracing and probe kernels over vector fields.

Four families of operations live here:

* streamlines (``trace_streamline``): forward-time integral curves carrying
  cumulative time, so playback speed encodes field strength;
* field lines (``trace_field_line``): amplitude-normalized curves traced in
  both directions, parameterized by signed arc length;
* ensembles (``advect_ensemble_euler``, ``seed_cone``, ``scatter_ensemble``):
  cheap first-order advection of many particles with deterministic seeding;
* probes (``local_arrows``): a rigid bunch of sample offsets that follows a
  moving center.

All operations are pure functions over immutable fields; independent traces
and ensembles are safe to run concurrently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConeOutsideDomainError, DegenerateSeedError, OutOfDomainError
from .fields import VectorField, _trilinear_many, sample_vector_many
from .geometry import clip_segment_to_box, orthonormal_frame

# 7-stage explicit Runge-Kutta scheme of order 6 (Butcher's classical tableau).
# Any explicit order-6 scheme is acceptable; the convergence-order test in the
# acceptance suite pins correctness without pinning the coefficients.
_RK6_A = (
    (),
    (1 / 3,),
    (0.0, 2 / 3),
    (1 / 12, 1 / 3, -1 / 12),
    (-1 / 16, 9 / 8, -3 / 16, -3 / 8),
    (0.0, 9 / 8, -3 / 8, -3 / 4, 1 / 2),
    (9 / 44, -9 / 11, 63 / 44, 18 / 11, 0.0, -16 / 11),
)
_RK6_B = np.array([11 / 120, 0.0, 27 / 40, 27 / 40, -4 / 15, -4 / 15, 11 / 120])


class Termination(enum.Enum):
    """Why a trace stopped."""

    OUT_OF_DOMAIN = "out_of_domain"
    MAX_STEPS = "max_steps"
    STAGNATION = "stagnation"
    TIME_LIMIT = "time_limit"


@dataclass(frozen=True)
class Polyline:
    """Ordered vertices with a per-vertex parameter (time or arc length)."""

    vertices: np.ndarray  # (n, 3) world-space points
    params: np.ndarray  # (n,) strictly monotone
    termination: Termination | None = None

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        p = np.asarray(self.params, dtype=np.float64).reshape(-1)
        if len(v) != len(p) or len(v) < 1:
            raise ValueError("vertices and params must have equal length >= 1")
        if len(p) > 1:
            d = np.diff(p)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ValueError("params must be strictly monotone")
        v.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "params", p)

    def __len__(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class TraceOptions:
    """Step-size and termination controls for the tracers.

    ``step_factor`` scales the spatial step to ``step_factor * min(spacing)``;
    ``stagnation_eps`` is relative to the field's RMS magnitude.  ``max_time``
    (streamlines only) ends the integration exactly at that cumulative time.
    """

    step_factor: float = 0.2
    max_steps: int = 10000
    stagnation_eps: float = 1e-7
    max_time: float | None = None

    def __post_init__(self):
        if not self.step_factor > 0:
            raise ValueError("step_factor must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not self.stagnation_eps > 0:
            raise ValueError("stagnation_eps must be > 0")


def _rk6_step(sample, x: np.ndarray, f0: np.ndarray, dt: float):
    """One explicit RK6 step of dx/dt = f(x); f0 = f(x) already evaluated.

    ``sample(p)`` returns f at p, or None when p is invalid (outside the
    domain, or below the stagnation threshold for normalized fields); any
    invalid stage aborts the step and returns None.
    """
    k = np.empty((7, 3), dtype=np.float64)
    k[0] = f0
    for i in range(1, 7):
        a = _RK6_A[i]
        xi = x + dt * np.dot(a, k[:i])
        fi = sample(xi)
        if fi is None:
            return None
        k[i] = fi
    return x + dt * np.dot(_RK6_B, k)


def _fast_vec(vec: VectorField, p: np.ndarray):
    if not vec.grid.contains(p):
        return None
    return _trilinear_many(vec.grid, vec.values, p[None, :])[0]


def trace_streamline(vec: VectorField, seed, opts: TraceOptions | None = None) -> Polyline:
    """Integrate dx/dt = v(x) forward from a seed point.

    The time step is chosen per step so the spatial advance is
    ``step_factor * min(spacing)``; vertex params carry cumulative time.
    Stops on domain exit (final vertex clipped to the boundary), step budget,
    stagnation, or ``opts.max_time``.
    """
    opts = opts or TraceOptions()
    x = np.asarray(seed, dtype=np.float64)
    if not vec.grid.contains(x):
        raise OutOfDomainError(x)

    grid = vec.grid
    lo, hi = grid.bounds_min, grid.bounds_max
    stag = opts.stagnation_eps * vec.rms_magnitude
    h_space = opts.step_factor * grid.min_spacing

    verts = [x.copy()]
    params = [0.0]
    t = 0.0
    termination = Termination.MAX_STEPS
    for _ in range(opts.max_steps):
        v0 = _fast_vec(vec, x)
        speed = float(np.linalg.norm(v0))
        if speed <= stag:
            termination = Termination.STAGNATION
            break
        dt = h_space / speed
        last = False
        if opts.max_time is not None and t + dt >= opts.max_time:
            dt = opts.max_time - t
            last = True
            if dt <= 0.0:
                termination = Termination.TIME_LIMIT
                break
        x_new = _rk6_step(lambda p: _fast_vec(vec, p), x, v0, dt)
        if x_new is None:
            x_new = x + dt * v0  # clip along the Euler segment instead
        if not grid.contains(x_new):
            q, lam = clip_segment_to_box(x, x_new, lo, hi)
            t_exit = t + lam * dt
            if t_exit > t:
                verts.append(q)
                params.append(t_exit)
            termination = Termination.OUT_OF_DOMAIN
            break
        x = x_new
        t += dt
        verts.append(x.copy())
        params.append(t)
        if last:
            termination = Termination.TIME_LIMIT
            break
    return Polyline(np.array(verts), np.array(params), termination)


def _trace_direction_branch(vec, seed, sign, ds, stag, max_steps):
    """March the unit direction field sign * v/|v| from seed; returns
    (vertices beyond the seed, termination)."""
    grid = vec.grid
    lo, hi = grid.bounds_min, grid.bounds_max

    def sample_dir(p):
        v = _fast_vec(vec, p)
        if v is None:
            return None
        m = np.linalg.norm(v)
        if m <= stag:
            return None
        return (sign / m) * v

    verts = []
    x = np.asarray(seed, dtype=np.float64)
    termination = Termination.MAX_STEPS
    for _ in range(max_steps):
        u0 = sample_dir(x)
        if u0 is None:
            termination = Termination.STAGNATION
            break
        x_new = _rk6_step(sample_dir, x, u0, ds)
        if x_new is None:
            x_new = x + ds * u0
        if not grid.contains(x_new):
            q, lam = clip_segment_to_box(x, x_new, lo, hi)
            if lam > 0:
                verts.append((q, lam * ds))
            termination = Termination.OUT_OF_DOMAIN
            break
        x = x_new
        verts.append((x.copy(), ds))
    return verts, termination


def trace_field_line(vec: VectorField, seed, opts: TraceOptions | None = None) -> Polyline:
    """Trace the direction field v/|v| through a seed in both directions.

    Amplitude is discarded: only the direction distribution matters, so the
    result is invariant under any positive rescaling of the field.  Params
    are signed arc length with the seed at 0; termination reports the
    forward branch.
    """
    opts = opts or TraceOptions()
    x0 = np.asarray(seed, dtype=np.float64)
    if not vec.grid.contains(x0):
        raise OutOfDomainError(x0)
    stag = opts.stagnation_eps * vec.rms_magnitude
    v0 = _fast_vec(vec, x0)
    if np.linalg.norm(v0) <= stag:
        raise DegenerateSeedError(
            f"|v| = {np.linalg.norm(v0):.3e} at seed is below the stagnation threshold"
        )
    ds = opts.step_factor * vec.grid.min_spacing

    fwd, fwd_term = _trace_direction_branch(vec, x0, +1.0, ds, stag, opts.max_steps)
    bwd, _ = _trace_direction_branch(vec, x0, -1.0, ds, stag, opts.max_steps)

    verts = [p for p, _ in reversed(bwd)] + [x0] + [p for p, _ in fwd]
    s = 0.0
    back_params = []
    for _, step in bwd:
        s -= step
        back_params.append(s)
    s = 0.0
    fwd_params = []
    for _, step in fwd:
        s += step
        fwd_params.append(s)
    params = back_params[::-1] + [0.0] + fwd_params
    return Polyline(np.array(verts), np.array(params), fwd_term)


# ---------------------------------------------------------------------------
# Ensembles


@dataclass(frozen=True)
class Ensemble:
    """A crowd of tracer particles with per-particle age.

    ``generation`` advances on every advection so re-seeding draws from a
    fresh, reproducible RNG stream.
    """

    positions: np.ndarray  # (n, 3), all inside the domain
    ages: np.ndarray  # (n,)
    rng_seed: int
    grid_bounds: tuple  # ((lo), (hi)) world box used for re-seeding
    generation: int = 0

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        a = np.asarray(self.ages, dtype=np.float64).reshape(-1)
        if len(p) != len(a):
            raise ValueError("positions and ages must have equal length")
        lo, hi = (np.asarray(b, dtype=np.float64) for b in self.grid_bounds)
        if len(p) and not (np.all(p >= lo) and np.all(p <= hi)):
            raise ValueError("ensemble positions must lie inside the domain")
        p.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "ages", a)

    def __len__(self) -> int:
        return len(self.ages)


def scatter_ensemble(grid, n: int = 2000, rng_seed: int = 0) -> Ensemble:
    """Scatter n particles uniformly over the whole domain."""
    rng = np.random.default_rng(rng_seed)
    lo, hi = grid.bounds_min, grid.bounds_max
    pos = lo + rng.random((n, 3)) * (hi - lo)
    return Ensemble(pos, np.zeros(n), rng_seed, (tuple(lo), tuple(hi)))


def advect_ensemble_euler(vec: VectorField, ens: Ensemble, dt: float) -> Ensemble:
    """One first-order Euler step p <- p + dt*v(p) for every particle.

    Particles that leave the domain are re-seeded uniformly at random inside
    it from the ensemble's deterministic RNG stream, with age reset to 0.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    v, _ = sample_vector_many(vec, ens.positions)
    new_pos = ens.positions + dt * v
    new_ages = ens.ages + dt
    inside = vec.grid.contains_many(new_pos)
    n_out = int((~inside).sum())
    if n_out:
        rng = np.random.default_rng([ens.rng_seed, ens.generation])
        lo, hi = vec.grid.bounds_min, vec.grid.bounds_max
        new_pos = new_pos.copy()
        new_ages = new_ages.copy()
        new_pos[~inside] = lo + rng.random((n_out, 3)) * (hi - lo)
        new_ages[~inside] = 0.0
    return replace(ens, positions=new_pos, ages=new_ages, generation=ens.generation + 1)


def seed_cone(apex, direction, half_angle: float, length: float, n: int, rng_seed: int,
              grid) -> np.ndarray:
    """Seed n points inside a cone from apex along direction, all in-domain.

    Points are uniform over the cone volume; draws landing outside the data
    domain are rejected and re-drawn.  Raises ConeOutsideDomainError after
    1000*n consecutive rejections.
    """
    if not (0 < half_angle < np.pi / 2):
        raise ValueError("half_angle must be in (0, pi/2)")
    if not length > 0:
        raise ValueError("length must be > 0")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return np.empty((0, 3), dtype=np.float64)

    apex = np.asarray(apex, dtype=np.float64)
    u, v, w = orthonormal_frame(direction)
    tan_half = np.tan(half_angle)
    rng = np.random.default_rng(rng_seed)

    out = np.empty((n, 3), dtype=np.float64)
    got = 0
    consecutive_misses = 0
    limit = 1000 * n
    while got < n:
        m = max(n - got, 64)
        axial = length * np.cbrt(rng.random(m))
        radial = axial * tan_half * np.sqrt(rng.random(m))
        theta = 2 * np.pi * rng.random(m)
        pts = (
            apex
            + axial[:, None] * w
            + (radial * np.cos(theta))[:, None] * u
            + (radial * np.sin(theta))[:, None] * v
        )
        ok = grid.contains_many(pts)
        for i in range(m):
            if ok[i]:
                out[got] = pts[i]
                got += 1
                consecutive_misses = 0
                if got == n:
                    break
            else:
                consecutive_misses += 1
                if consecutive_misses >= limit:
                    raise ConeOutsideDomainError(
                        f"no in-domain cone point after {limit} consecutive draws"
                    )
    return out


# ---------------------------------------------------------------------------
# Local arrow probe


@dataclass(frozen=True)
class ArrowSet:
    """Field samples at rigid offsets within a sphere around a probe center.

    ``valid[i]`` is False (and the vector null) when center+offset falls
    outside the domain.
    """

    center: np.ndarray
    radius: float
    offsets: np.ndarray  # (n, 3), |offset| <= radius
    vectors: np.ndarray  # (n, 3) sampled field values
    valid: np.ndarray  # (n,) bool

    def positions(self) -> np.ndarray:
        return self.center + self.offsets

    def moved(self, vec: VectorField, new_center) -> "ArrowSet":
        """Re-sample the same rigid offsets around a new center."""
        return _sample_arrows(vec, np.asarray(new_center, dtype=np.float64),
                              self.radius, self.offsets)


def _sample_arrows(vec, center, radius, offsets):
    if not vec.grid.contains(center):
        raise OutOfDomainError(center)
    pos = center + offsets
    vectors, valid = sample_vector_many(vec, pos)
    vectors = vectors.copy()
    vectors[~valid] = 0.0
    return ArrowSet(center=center, radius=radius, offsets=offsets,
                    vectors=vectors, valid=valid)


def local_arrows(vec: VectorField, center, radius: float | None = None,
                 n: int = 20, rng_seed: int = 0) -> ArrowSet:
    """Sample the field at n random offsets within a sphere around center.

    Offsets are drawn once (uniform in the ball) and stay rigid; move the
    probe with :meth:`ArrowSet.moved`.  Default radius is 5% of the domain
    diagonal.
    """
    center = np.asarray(center, dtype=np.float64)
    if radius is None:
        radius = 0.05 * vec.grid.diagonal
    if not radius > 0:
        raise ValueError("radius must be > 0")
    rng = np.random.default_rng(rng_seed)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = radius * np.cbrt(rng.random(n))
    offsets = dirs * r[:, None]
    return _sample_arrows(vec, center, float(radius), offsets)

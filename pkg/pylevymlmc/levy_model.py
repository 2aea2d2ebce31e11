'''Levy models: triplet (nu, Sigma Sigma^*, b) plus every analytic quantity of the level scheduler

Jump measures are given by concrete families with closed-form integrals:

    - TruncatedStable : isotropic c |x|^(-alpha-d) dx on 0 < |x| <= radius
    - AxisStable : independent one-dimensional truncated stable jumps along the axes
    - FiniteActivity : finitely many atoms (compound Poisson jumps)
    - TabulatedRadial : isotropic radial density tabulated on a log grid,
      log-log linear between nodes and power-law extrapolated below the first node

"log" means the natural logarithm throughout the package. B(0, h) is the open
ball, so the tail B(0, h)^c contains jumps of size exactly h.
'''
import logging

import numpy as np
import scipy.linalg
import scipy.special

import pylevymlmc
from .errors import AssumptionViolation, DimensionMismatchError, UnsupportedMeasureError, \
    EmptyTailError, DegenerateSmallJumpsError, NonSymmetricError, IndefiniteMatrixError, \
    ConfigError

logger = logging.getLogger(__name__)


def sphere_surface(dim):
    """Surface area of the unit sphere in R^dim (s_1 = 2)"""
    return 2. * np.pi ** (dim / 2.) / scipy.special.gamma(dim / 2.)


def _check_h(h):
    if not h > 0:
        raise ValueError("Truncation level h must be positive, got %r" % h)


def _power_integral(e, a, b):
    """Integral of r^e over [a, b] (a may be 0 if e > -1)"""
    if b <= a:
        return 0.
    if e == -1:
        return np.log(b / a)
    if a == 0 and e <= -1:
        return np.inf
    return (b ** (e + 1) - a ** (e + 1)) / (e + 1)


def _power_quantile(e, a, b, u):
    """Inverse CDF of the density proportional to r^e on [a, b]"""
    u = np.asarray(u, dtype=float)
    e = np.asarray(e, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast(u, e, a, b).shape)
    log_case = np.broadcast_to(e == -1, out.shape)
    u_b, e_b, a_b, b_b = np.broadcast_arrays(u, e, a, b)
    if np.any(log_case):
        out[log_case] = a_b[log_case] * (b_b[log_case] / a_b[log_case]) ** u_b[log_case]
    pw = ~log_case
    if np.any(pw):
        ep = e_b[pw] + 1
        lo = a_b[pw] ** ep
        hi = b_b[pw] ** ep
        out[pw] = (lo + u_b[pw] * (hi - lo)) ** (1. / ep)
    return out


def _uniform_directions(rng, size, dim):
    """Uniformly distributed unit vectors, shape (size, dim)"""
    if dim == 1:
        return np.where(rng.random(size) < 0.5, -1., 1.).reshape(size, 1)
    v = rng.standard_normal((size, dim))
    return v / np.linalg.norm(v, axis=1)[:, None]


class JumpMeasure(object):
    """Base class for Levy measures on R^d without atom at 0

    Subclasses implement the radial integrals; a registered power-law dominating
    function g(h) = g_constant * h^(-g_exponent) overrides the family's canonical g.
    """
    kind = None

    def __init__(self, dim, **kwds):
        """Jump measure

        **Arguments**:
            - *dim* = int : dimension d_X of the jump space

        **Optional Keywords**:
            - *g_constant* = float : constant of a user-registered g
            - *g_exponent* = float : exponent of a user-registered g (default: bg index)
        """
        if int(dim) != dim or dim < 1:
            raise ValueError("Dimension must be a positive integer, got %r" % dim)
        self.dim = int(dim)
        self.g_constant = kwds.get("g_constant", None)
        self.g_exponent = kwds.get("g_exponent", None)

    def tail_mass(self, h):
        raise NotImplementedError

    def f_small(self, h):
        raise NotImplementedError

    def f_zero(self, h):
        return np.zeros(self.dim)

    def small_jump_cov(self, h):
        return self.f_small(h) / self.dim * np.eye(self.dim)

    def sample_tail(self, h, rng, size):
        raise NotImplementedError

    def canonical_g(self):
        """(constant, exponent) of the family's dominating power law, or None"""
        return None

    def bg_index(self):
        raise NotImplementedError

    def breakpoints(self):
        """Radii at which the radial density is not smooth (for quadrature)"""
        return []

    def g_power_law(self):
        """(constant, exponent) of the dominating power law used by the scheduler"""
        if self.g_constant is not None:
            exponent = self.g_exponent
            if exponent is None:
                exponent = self.bg_index()
            if not (self.g_constant > 0 and exponent > 0):
                raise UnsupportedMeasureError("Registered g needs positive constant and exponent")
            return float(self.g_constant), float(exponent)
        canonical = self.canonical_g()
        if canonical is None:
            raise UnsupportedMeasureError("No dominating function g registered for %s measure "
                                          "(set 'g_constant' and 'g_exponent')" % self.kind)
        return canonical

    def _g_json(self):
        out = {}
        if self.g_constant is not None:
            out["g_constant"] = self.g_constant
        if self.g_exponent is not None:
            out["g_exponent"] = self.g_exponent
        return out


class _PowerLawRadial(object):
    """Integrals of the radial measure r^(-1-alpha) dr on (0, radius], per unit intensity"""

    def __init__(self, alpha, radius):
        if not 0 < alpha < 2:
            raise ValueError("Stability index alpha must lie in (0, 2), got %r" % alpha)
        if not radius > 0:
            raise ValueError("Support radius must be positive, got %r" % radius)
        self.alpha = float(alpha)
        self.radius = float(radius)

    def tail(self, h):
        if h >= self.radius:
            return 0.
        return (h ** -self.alpha - self.radius ** -self.alpha) / self.alpha

    def second(self, h):
        m = min(h, self.radius)
        return m ** (2 - self.alpha) / (2 - self.alpha)

    def first_tail(self, h):
        if h >= self.radius:
            return 0.
        if self.alpha == 1:
            return np.log(self.radius / h)
        return (self.radius ** (1 - self.alpha) - h ** (1 - self.alpha)) / (1 - self.alpha)

    def quantile(self, h, u):
        """Radius r with tail-normalized CDF u; u = 0 gives h, u = 1 the support edge"""
        ha = h ** -self.alpha
        return (ha - np.asarray(u) * (ha - self.radius ** -self.alpha)) ** (-1. / self.alpha)

    def g_factor(self):
        return 1. / (2 - self.alpha) + 1. / self.alpha


class TruncatedStable(JumpMeasure):
    """Isotropic truncated stable measure nu(dx) = c |x|^(-alpha-d) dx on 0 < |x| <= radius"""
    kind = "truncated_stable"

    def __init__(self, alpha, intensity, dim=1, radius=1., **kwds):
        """Isotropic truncated stable measure

        **Arguments**:
            - *alpha* = float in (0, 2) : stability (= Blumenthal-Getoor) index
            - *intensity* = float : constant c of the density

        **Optional Keywords**:
            - *dim* = int : dimension (default: 1)
            - *radius* = float : support radius (default: 1)
        """
        super(TruncatedStable, self).__init__(dim, **kwds)
        if not intensity > 0:
            raise ValueError("Intensity must be positive, got %r" % intensity)
        self.intensity = float(intensity)
        self.radial = _PowerLawRadial(alpha, radius)
        self.alpha = self.radial.alpha
        self.radius = self.radial.radius
        # total radial intensity c * s_d
        self.total = self.intensity * sphere_surface(self.dim)

    def tail_mass(self, h):
        return self.total * self.radial.tail(h)

    def f_small(self, h):
        return self.total * self.radial.second(h)

    def radial_density(self, r):
        """Density of |x| under nu (for quadrature cross-checks)"""
        r = np.asarray(r, dtype=float)
        return np.where((r > 0) & (r <= self.radius), self.total * r ** (-1 - self.alpha), 0.)

    def tail_radius_quantile(self, h, u):
        return self.radial.quantile(h, u)

    def sample_tail(self, h, rng, size):
        r = self.radial.quantile(h, rng.random(size))
        return r[:, None] * _uniform_directions(rng, size, self.dim)

    def canonical_g(self):
        return self.total * self.radial.g_factor(), self.alpha

    def bg_index(self):
        return self.alpha

    def to_json(self):
        out = {"kind": self.kind, "alpha": self.alpha, "intensity": self.intensity,
               "dim": self.dim, "radius": self.radius}
        out.update(self._g_json())
        return out


class AxisStable(JumpMeasure):
    """Independent truncated stable jumps along each coordinate axis

    On axis i the measure has density c+_i x^(-1-alpha) on (0, radius] and
    c-_i |x|^(-1-alpha) on [-radius, 0).
    """
    kind = "axis_stable"

    def __init__(self, alpha, intensity_positive, intensity_negative=None, radius=1., **kwds):
        """Axis-wise truncated stable measure

        **Arguments**:
            - *alpha* = float in (0, 2) : stability index shared by all axes
            - *intensity_positive* = list of floats : c+ per axis

        **Optional Keywords**:
            - *intensity_negative* = list of floats : c- per axis (default: symmetric, = c+)
            - *radius* = float : support radius (default: 1)
        """
        pos = np.atleast_1d(np.asarray(intensity_positive, dtype=float))
        neg = pos.copy() if intensity_negative is None else \
            np.atleast_1d(np.asarray(intensity_negative, dtype=float))
        if pos.shape != neg.shape:
            raise DimensionMismatchError("Positive and negative intensities differ in length")
        if np.any(pos < 0) or np.any(neg < 0) or not np.any(pos + neg > 0):
            raise ValueError("Axis intensities must be nonnegative and not all zero")
        super(AxisStable, self).__init__(len(pos), **kwds)
        self.intensity_positive = pos
        self.intensity_negative = neg
        self.radial = _PowerLawRadial(alpha, radius)
        self.alpha = self.radial.alpha
        self.radius = self.radial.radius
        self.axis_weight = pos + neg

    def tail_mass(self, h):
        return float(np.sum(self.axis_weight)) * self.radial.tail(h)

    def f_small(self, h):
        return float(np.sum(self.axis_weight)) * self.radial.second(h)

    def f_zero(self, h):
        return (self.intensity_positive - self.intensity_negative) * self.radial.first_tail(h)

    def small_jump_cov(self, h):
        return np.diag(self.axis_weight * self.radial.second(h))

    def tail_radius_quantile(self, h, u):
        return self.radial.quantile(h, u)

    def sample_tail(self, h, rng, size):
        # pick (axis, side) with probability proportional to its intensity
        weights = np.concatenate([self.intensity_positive, self.intensity_negative])
        idx = rng.choice(len(weights), size=size, p=weights / weights.sum())
        r = self.radial.quantile(h, rng.random(size))
        out = np.zeros((size, self.dim))
        axis = idx % self.dim
        sign = np.where(idx < self.dim, 1., -1.)
        out[np.arange(size), axis] = sign * r
        return out

    def canonical_g(self):
        return float(np.sum(self.axis_weight)) * self.radial.g_factor(), self.alpha

    def bg_index(self):
        return self.alpha

    def to_json(self):
        out = {"kind": self.kind, "alpha": self.alpha, "radius": self.radius,
               "intensity_positive": self.intensity_positive.tolist(),
               "intensity_negative": self.intensity_negative.tolist()}
        out.update(self._g_json())
        return out


class FiniteActivity(JumpMeasure):
    """Finite Levy measure given by atoms x_i with masses m_i (total mass lambda_0)"""
    kind = "finite_activity"

    def __init__(self, atoms, masses, **kwds):
        """Finite activity measure

        **Arguments**:
            - *atoms* = array (n, d) : atom locations (nonzero)
            - *masses* = array (n,) : positive atom masses

        **Optional Keywords**:
            - *g_constant*, *g_exponent* = float : dominating power law (required for scheduling)
        """
        atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
        masses = np.atleast_1d(np.asarray(masses, dtype=float))
        if atoms.shape[0] != masses.shape[0]:
            raise DimensionMismatchError("Need one mass per atom")
        if np.any(masses <= 0):
            raise ValueError("Atom masses must be positive")
        norms = np.linalg.norm(atoms, axis=1)
        if np.any(norms == 0):
            raise ValueError("Levy measure cannot charge the origin")
        super(FiniteActivity, self).__init__(atoms.shape[1], **kwds)
        self.atoms = atoms
        self.masses = masses
        self.norms = norms
        self.total_mass = float(masses.sum())

    def tail_mass(self, h):
        return float(np.sum(self.masses[self.norms >= h]))

    def f_small(self, h):
        sel = self.norms < h
        return float(np.sum(self.masses[sel] * self.norms[sel] ** 2))

    def f_zero(self, h):
        sel = self.norms >= h
        return np.sum(self.masses[sel, None] * self.atoms[sel], axis=0) + np.zeros(self.dim)

    def small_jump_cov(self, h):
        sel = self.norms < h
        x = self.atoms[sel]
        return np.einsum("n,ni,nj->ij", self.masses[sel], x, x) + np.zeros((self.dim, self.dim))

    def sample_tail(self, h, rng, size):
        sel = np.flatnonzero(self.norms >= h)
        p = self.masses[sel] / self.masses[sel].sum()
        return self.atoms[sel[rng.choice(len(sel), size=size, p=p)]]

    def bg_index(self):
        return 0.

    def to_json(self):
        out = {"kind": self.kind,
               "atoms": [{"x": x.tolist(), "mass": float(m)} for x, m in zip(self.atoms, self.masses)]}
        out.update(self._g_json())
        return out


class TabulatedRadial(JumpMeasure):
    """Isotropic measure nu(dx) = rho(|x|) dx with rho tabulated on a log grid

    rho is log-log linear between nodes, extends below the first node with the
    first segment's power law and vanishes beyond the last node (the support radius).
    """
    kind = "tabulated_radial"

    def __init__(self, radii, density, dim=1, **kwds):
        """Tabulated radial measure

        **Arguments**:
            - *radii* = array : strictly increasing positive radii (at least two)
            - *density* = array : positive values rho(r_i) of the Lebesgue density

        **Optional Keywords**:
            - *dim* = int : dimension (default: 1)
        """
        super(TabulatedRadial, self).__init__(dim, **kwds)
        radii = np.asarray(radii, dtype=float)
        density = np.asarray(density, dtype=float)
        if radii.ndim != 1 or radii.shape != density.shape or len(radii) < 2:
            raise DimensionMismatchError("Need matching radii and density arrays of length >= 2")
        if radii[0] <= 0 or np.any(np.diff(radii) <= 0) or np.any(density <= 0):
            raise ValueError("Radii must be positive increasing and densities positive")
        self.radii = radii
        self.density = density
        self.radius = float(radii[-1])
        slopes = np.diff(np.log(density)) / np.diff(np.log(radii))
        # segments (a, b, coef, p): rho(r) = coef * r^p on [a, b]
        lo = np.concatenate([[0.], radii[:-1]])
        hi = radii.copy()
        p = np.concatenate([[slopes[0]], slopes])
        ref = np.concatenate([[radii[0]], radii[:-1]])
        ref_rho = np.concatenate([[density[0]], density[:-1]])
        self.seg_lo = lo
        self.seg_hi = hi
        self.seg_p = p
        self.seg_coef = ref_rho * ref ** (-p)
        self.s_d = sphere_surface(self.dim)
        # small-radius exponent: radial measure ~ r^(-1-beta)
        self.beta = -(p[0] + self.dim)
        if self.beta >= 2:
            raise AssumptionViolation("Tabulated density has infinite second moment near 0 "
                                      "(small-radius index %.3f >= 2)" % self.beta)
        self._g_cache = None

    def _moment(self, k, lo, hi):
        """Integral of r^k over the radial measure on [lo, hi]"""
        total = 0.
        for a, b, c, p in zip(self.seg_lo, self.seg_hi, self.seg_coef, self.seg_p):
            a2, b2 = max(a, lo), min(b, hi)
            if b2 > a2:
                total += self.s_d * c * _power_integral(k + p + self.dim - 1, a2, b2)
        return total

    def tail_mass(self, h):
        if h >= self.radius:
            return 0.
        return self._moment(0, h, self.radius)

    def f_small(self, h):
        return self._moment(2, 0., min(h, self.radius))

    def radial_density(self, r):
        r = np.asarray(r, dtype=float)
        idx = np.clip(np.searchsorted(self.seg_hi, r), 0, len(self.seg_hi) - 1)
        val = self.s_d * self.seg_coef[idx] * r ** (self.seg_p[idx] + self.dim - 1)
        return np.where((r > 0) & (r <= self.radius), val, 0.)

    def breakpoints(self):
        return list(self.radii[:-1])

    def _tail_segments(self, h):
        a = np.maximum(self.seg_lo, h)
        b = self.seg_hi
        keep = b > a
        e = self.seg_p[keep] + self.dim - 1
        a, b = a[keep], b[keep]
        mass = np.array([self.s_d * c * _power_integral(ee, aa, bb) for c, ee, aa, bb in
                         zip(self.seg_coef[keep], e, a, b)])
        return a, b, e, mass

    def tail_radius_quantile(self, h, u):
        """Radius with tail-normalized CDF u (piecewise power-law inversion)"""
        a, b, e, mass = self._tail_segments(h)
        cum = np.concatenate([[0.], np.cumsum(mass)]) / mass.sum()
        u = np.asarray(u, dtype=float)
        idx = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(mass) - 1)
        w = (u - cum[idx]) / (cum[idx + 1] - cum[idx])
        return _power_quantile(e[idx], a[idx], b[idx], np.clip(w, 0., 1.))

    def sample_tail(self, h, rng, size):
        r = self.tail_radius_quantile(h, rng.random(size))
        return r[:, None] * _uniform_directions(rng, size, self.dim)

    def bg_index(self):
        """Blumenthal-Getoor index fitted from the growth of F(h) ~ h^(2 - beta) near 0"""
        nodes = self.radii[:min(5, len(self.radii))]
        hs = np.geomspace(nodes[0] * 1e-2, nodes[-1], 12)
        f = np.array([self.f_small(h) for h in hs])
        slope = np.polyfit(np.log(hs), np.log(f), 1)[0]
        return float(max(0., 2. - slope))

    def canonical_g(self):
        if self.beta <= 0:
            return None
        if self._g_cache is None:
            beta = self.beta
            amp = self.s_d * self.seg_coef[0]
            r0 = self.radii[0]
            # exact supremum of barg(h) h^beta on (0, r0]
            excess = r0 ** beta * (self.tail_mass(r0) - amp * r0 ** -beta / beta)
            sup_small = amp / (2 - beta) + amp / beta + max(0., excess)
            hs = np.geomspace(r0, self.radius, 4000)
            sup_grid = max(h ** beta * (self.f_small(h) / h ** 2 + self.tail_mass(h)) for h in hs)
            # 0.1% headroom over the sampled supremum between nodes
            self._g_cache = (max(sup_small, sup_grid) * 1.001, beta)
        return self._g_cache

    def to_json(self):
        out = {"kind": self.kind, "dim": self.dim, "radii": self.radii.tolist(),
               "density": self.density.tolist()}
        out.update(self._g_json())
        return out


class LevyModel(object):
    """(nu, Sigma Sigma^*, b)-Levy process with the analytic accessors of the algorithm

    Instances are immutable after construction and safe to share between workers.
    """

    def __init__(self, measure, sigma=None, drift=None, lipschitz_budget=None):
        """Levy model

        **Arguments**:
            - *measure* = JumpMeasure : Levy measure nu

        **Optional Keywords**:
            - *sigma* = array (d_X, d_X) : factor of the Gaussian part (default: 0)
            - *drift* = array (d_X,) : drift b (default: 0)
            - *lipschitz_budget* = float : constant K; |Sigma|, |b| <= K and
              int |x|^2 nu(dx) <= K^2 are checked (default: smallest admissible K)
        """
        self.measure = measure
        self.dim_x = measure.dim
        d = self.dim_x
        self.sigma = np.zeros((d, d)) if sigma is None else np.atleast_2d(np.asarray(sigma, dtype=float))
        self.drift = np.zeros(d) if drift is None else np.atleast_1d(np.asarray(drift, dtype=float))
        if self.sigma.shape != (d, d):
            raise DimensionMismatchError("sigma must be %dx%d, got %s" % (d, d, self.sigma.shape))
        if self.drift.shape != (d,):
            raise DimensionMismatchError("drift must have length %d, got %s" % (d, self.drift.shape))
        self.second_moment = measure.f_small(np.inf)
        if not np.isfinite(self.second_moment):
            raise AssumptionViolation("Levy measure must have finite second moment")
        sig_norm = np.linalg.norm(self.sigma)
        drift_norm = np.linalg.norm(self.drift)
        if lipschitz_budget is None:
            lipschitz_budget = max(sig_norm, drift_norm, np.sqrt(self.second_moment))
        self.lipschitz_budget = float(lipschitz_budget)
        K = self.lipschitz_budget
        if sig_norm > K or drift_norm > K or self.second_moment > K ** 2 * (1 + 1e-12):
            raise AssumptionViolation("Model exceeds budget K = %g: |Sigma| = %g, |b| = %g, "
                                      "int |x|^2 nu = %g" % (K, sig_norm, drift_norm, self.second_moment))
        self.sigma.setflags(write=False)
        self.drift.setflags(write=False)

    def __repr__(self):
        return "LevyModel(%s, dim_x=%d)" % (self.measure.kind, self.dim_x)

    def tail_mass(self, h):
        """nu(B(0, h)^c), the rate of jumps of size at least h"""
        _check_h(h)
        return self.measure.tail_mass(h)

    def f_small(self, h):
        """F(h) = int_{B(0,h)} |x|^2 nu(dx)"""
        _check_h(h)
        return self.measure.f_small(h)

    def f_zero(self, h):
        """F_0(h) = int_{B(0,h)^c} x nu(dx), the compensator drift of jumps >= h"""
        _check_h(h)
        return np.asarray(self.measure.f_zero(h), dtype=float)

    def small_jump_cov(self, h):
        """C(h)_ij = int_{B(0,h)} x_i x_j nu(dx)"""
        _check_h(h)
        return np.asarray(self.measure.small_jump_cov(h), dtype=float)

    def bar_g(self, h):
        """int (|x|^2/h^2 ^ 1) nu(dx) = F(h)/h^2 + nu(B(0,h)^c)"""
        return self.f_small(h) / h ** 2 + self.tail_mass(h)

    def g_bound(self, h):
        """Dominating function g(h) >= int (|x|^2/h^2 ^ 1) nu(dx)"""
        _check_h(h)
        c, p = self.measure.g_power_law()
        return c * h ** -p

    def g_inverse(self, x):
        """Inverse of g_bound"""
        if not x > 0:
            raise ValueError("g_inverse needs a positive argument, got %r" % x)
        c, p = self.measure.g_power_law()
        return (c / x) ** (1. / p)

    def bg_index(self, **kwds):
        """Blumenthal-Getoor index

        **Optional Keywords**:
            - *with_flag* = bool : also return True if the value is a numerical fit (default: False)
        """
        value = float(self.measure.bg_index())
        if kwds.get("with_flag", False):
            return value, isinstance(self.measure, TabulatedRadial)
        return value

    def tail_radius_quantile(self, h, u):
        """Size |x| of a tail jump at tail-normalized CDF level u (continuous families)"""
        if not hasattr(self.measure, "tail_radius_quantile"):
            raise UnsupportedMeasureError("No radial quantile for %s measure" % self.measure.kind)
        return self.measure.tail_radius_quantile(h, u)

    def sample_tail_jumps(self, h, rng, size):
        """Draw size i.i.d. jumps from nu restricted to B(0,h)^c and normalized

        **Arguments**:
            - *h* = float : truncation level
            - *rng* = numpy.random.Generator : random source
            - *size* = int : number of jumps
        """
        _check_h(h)
        if self.tail_mass(h) <= 0:
            raise EmptyTailError("Tail of nu beyond h = %g has zero mass" % h)
        return np.asarray(self.measure.sample_tail(h, rng, size), dtype=float).reshape(size, self.dim_x)

    def sample_tail_jump(self, h, rng_stream):
        """Draw one jump from nu restricted to B(0,h)^c and normalized

        **Arguments**:
            - *h* = float : truncation level
            - *rng_stream* = RngStream or numpy.random.Generator : random source
        """
        rng = rng_stream.generator() if hasattr(rng_stream, "generator") else rng_stream
        return self.sample_tail_jumps(h, rng, 1)[0]

    def to_json(self):
        return {"dim_x": self.dim_x, "sigma": self.sigma.tolist(), "drift": self.drift.tolist(),
                "measure": self.measure.to_json(), "lipschitz_budget": self.lipschitz_budget}


class UEReport(object):
    """Result of the uniform ellipticity check

    **Attributes**:
        - *h_max* = float : largest probed h
        - *theta* = float : estimated ellipticity ratio (>= 1)
        - *subspace_dim* = int : dimension of the support subspace of small jumps
        - *passed* = bool : theta finite, within the bound and stable over the grid
        - *theta_by_h* = list of floats : ratio at each probed h
        - *axes* = list of ints : coordinate axes spanning the subspace
    """

    def __init__(self, h_max, theta, subspace_dim, passed, theta_by_h=None, axes=None):
        self.h_max = h_max
        self.theta = theta
        self.subspace_dim = subspace_dim
        self.passed = passed
        self.theta_by_h = theta_by_h or []
        self.axes = axes or []

    def __repr__(self):
        return "UEReport(h_max=%g, theta=%g, subspace_dim=%d, passed=%s)" % \
               (self.h_max, self.theta, self.subspace_dim, self.passed)


class DoublingReport(object):
    """Result of validate_doubling; truthy iff g(gamma h/2) >= 2 g(h) on the whole grid"""

    def __init__(self, passed, gamma, gamma_star, failures):
        self.passed = passed
        self.gamma = gamma
        self.gamma_star = gamma_star
        self.failures = failures

    def __bool__(self):
        return self.passed

    __nonzero__ = __bool__

    def __repr__(self):
        return "DoublingReport(passed=%s, gamma=%g, gamma_star=%s)" % \
               (self.passed, self.gamma, self.gamma_star)


def cov_factor(cov):
    """Symmetric PSD square root S of a covariance, S S^T = cov

    Negative eigenvalues within tolerance are clamped to zero, so rank-deficient
    covariances are fine.

    **Arguments**:
        - *cov* = array (d, d) : symmetric positive semi-definite matrix
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape[0] != cov.shape[1]:
        raise DimensionMismatchError("Covariance must be square, got %s" % (cov.shape,))
    scale = np.linalg.norm(cov)
    if np.linalg.norm(cov - cov.T) > pylevymlmc.sym_tol * (1 + scale):
        raise NonSymmetricError("Covariance is not symmetric")
    w, v = scipy.linalg.eigh(0.5 * (cov + cov.T))
    if w.size and w.min() < -pylevymlmc.eig_tol * scale:
        raise IndefiniteMatrixError("Covariance has negative eigenvalue %g" % w.min())
    root = (v * np.sqrt(np.clip(w, 0., None))) @ v.T
    return 0.5 * (root + root.T)


def gamma_star(model):
    """Exact doubling threshold 2^(1 - 1/p) of a power-law g(h) = c h^(-p)"""
    _, p = model.measure.g_power_law()
    return 2. ** (1. - 1. / p)


def validate_doubling(model, gamma, h_grid):
    """Check g(gamma h / 2) >= 2 g(h) at every grid point

    **Arguments**:
        - *model* = LevyModel : model with a dominating function g
        - *gamma* = float in (1, 2)
        - *h_grid* = array : positive truncation levels

    **Returns**:
        - DoublingReport (truthy iff the doubling property holds on the grid)
    """
    if not 1 < gamma < 2:
        raise ValueError("gamma must lie in (1, 2), got %r" % gamma)
    failures = []
    for h in np.atleast_1d(h_grid):
        lhs = model.g_bound(gamma * h / 2.)
        rhs = 2. * model.g_bound(h)
        # relative slack so that the boundary gamma = gamma_star passes
        if lhs < rhs * (1 - 1e-12):
            failures.append(float(h))
    return DoublingReport(not failures, gamma, gamma_star(model), failures)


def case_advisory(model, **kwds):
    """Suggest the scheduling case by comparing g^-1(x) with x^(-3/4) at large x

    Case I applies when Sigma = 0 or g^-1(x) decays no faster than x^(-3/4).

    **Optional Keywords**:
        - *x_large* = float : probe point (default: 2^40)
    """
    if not np.any(model.sigma):
        return "case1"
    x1 = kwds.get("x_large", 2. ** 40)
    x0 = np.sqrt(x1)
    growth = (model.g_inverse(x1) * x1 ** 0.75) / (model.g_inverse(x0) * x0 ** 0.75)
    return "case1" if growth >= 1 else "case2"


def check_ue(model, h_grid, direction_samples=64, **kwds):
    """Check uniform ellipticity: directional second moments of small jumps are comparable

    For each h the ratio max/min of int_{B(0,h)} <y, x>^2 nu(dx) over unit y in the
    support subspace equals the eigenvalue ratio of C(h); probed random directions
    are recorded as a consistency check. Only axis-aligned support subspaces are
    detected.

    **Arguments**:
        - *model* = LevyModel
        - *h_grid* = array : probed levels in (0, support radius]
        - *direction_samples* = int : number of random probe directions

    **Optional Keywords**:
        - *theta_bound* = float : largest acceptable ratio (default: 100)
        - *seed* = int : seed of the probe directions (default: 0)

    **Returns**:
        - UEReport
    """
    theta_bound = kwds.get("theta_bound", 100.)
    rng = np.random.default_rng(kwds.get("seed", 0))
    h_grid = np.atleast_1d(np.asarray(h_grid, dtype=float))
    thetas = []
    axes_seen = None
    stable = True
    for h in h_grid:
        cov = model.small_jump_cov(h)
        trace = np.trace(cov)
        if trace <= 0:
            continue
        axes = np.flatnonzero(np.diag(cov) > pylevymlmc.eig_tol * trace)
        sub = cov[np.ix_(axes, axes)]
        w = scipy.linalg.eigvalsh(sub)
        if w.min() <= pylevymlmc.eig_tol * w.max():
            raise DegenerateSmallJumpsError("Small-jump covariance at h = %g is singular on a "
                                            "subspace that is not axis-aligned" % h)
        theta = w.max() / w.min()
        y = rng.standard_normal((direction_samples, len(axes)))
        y = np.vstack([y / np.linalg.norm(y, axis=1)[:, None], np.eye(len(axes))])
        probed = np.einsum("ni,ij,nj->n", y, sub, y)
        if probed.max() / probed.min() > theta * (1 + 1e-9):
            logger.warning("Probed directional ratio exceeds eigenvalue ratio at h = %g", h)
        if axes_seen is not None and not np.array_equal(axes, axes_seen):
            logger.warning("Support subspace of small jumps changes across the h-grid")
            stable = False
        axes_seen = axes
        thetas.append(float(theta))
    if not thetas:
        # no small jumps below any probed h: vacuous
        return UEReport(float(h_grid.max()), 1., 0, True, [], [])
    theta = max(thetas)
    passed = bool(np.isfinite(theta) and theta <= theta_bound and stable)
    return UEReport(float(h_grid.max()), theta, len(axes_seen), passed, thetas, axes_seen.tolist())


_MEASURE_FIELDS = {
    "truncated_stable": {"kind", "alpha", "intensity", "dim", "radius", "g_constant", "g_exponent"},
    "axis_stable": {"kind", "alpha", "radius", "intensity_positive", "intensity_negative",
                    "g_constant", "g_exponent"},
    "finite_activity": {"kind", "atoms", "g_constant", "g_exponent"},
    "tabulated_radial": {"kind", "dim", "radii", "density", "g_constant", "g_exponent"},
}


def measure_from_json(spec):
    """Build a JumpMeasure from its JSON description"""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("Measure needs a 'kind' field")
    kind = spec["kind"]
    if kind not in _MEASURE_FIELDS:
        raise ConfigError("Unknown measure kind '%s'" % kind)
    unknown = set(spec) - _MEASURE_FIELDS[kind]
    if unknown:
        raise ConfigError("Unknown keys in %s measure: %s" % (kind, ", ".join(sorted(unknown))))
    g = {k: spec[k] for k in ("g_constant", "g_exponent") if k in spec}
    try:
        if kind == "truncated_stable":
            return TruncatedStable(spec["alpha"], spec["intensity"], dim=spec.get("dim", 1),
                                   radius=spec.get("radius", 1.), **g)
        if kind == "axis_stable":
            return AxisStable(spec["alpha"], spec["intensity_positive"],
                              spec.get("intensity_negative", None), radius=spec.get("radius", 1.), **g)
        if kind == "finite_activity":
            atoms = spec["atoms"]
            for atom in atoms:
                if set(atom) - {"x", "mass"}:
                    raise ConfigError("Atoms have fields 'x' and 'mass' only")
            return FiniteActivity([a["x"] for a in atoms], [a["mass"] for a in atoms], **g)
        return TabulatedRadial(spec["radii"], spec["density"], dim=spec.get("dim", 1), **g)
    except KeyError as e:
        raise ConfigError("Missing field %s in %s measure" % (e, kind))


def model_from_json(spec):
    """Build a LevyModel from {"dim_x", "sigma", "drift", "measure", "lipschitz_budget"}"""
    if not isinstance(spec, dict):
        raise ConfigError("Model specification must be a JSON object")
    unknown = set(spec) - {"dim_x", "sigma", "drift", "measure", "lipschitz_budget"}
    if unknown:
        raise ConfigError("Unknown keys in model: %s" % ", ".join(sorted(unknown)))
    if "measure" not in spec or "dim_x" not in spec:
        raise ConfigError("Model needs 'dim_x' and 'measure'")
    measure = measure_from_json(spec["measure"])
    if measure.dim != spec["dim_x"]:
        raise ConfigError("Measure dimension %d differs from dim_x = %s" % (measure.dim, spec["dim_x"]))
    return LevyModel(measure, sigma=spec.get("sigma"), drift=spec.get("drift"),
                     lipschitz_budget=spec.get("lipschitz_budget"))

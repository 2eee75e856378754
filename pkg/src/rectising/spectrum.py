"""Transfer-matrix family and its joint spectrum.

Builds the four real symmetric M x M matrices (the tridiagonal half-sum,
the anti-tridiagonal half-difference, the transfer matrix itself and the
shifted tridiagonal core), diagonalizes them on a common eigenbasis, and
maps every eigenvalue to its full angle set on the u-torus.

The closed characteristic-polynomial forms are evaluated branch-free: a
consistent Jacobi triple is reconstructed algebraically from the argument,
and all trigonometric factors reduce to integer powers of the unimodular
vertical eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .elliptic import carlson_rf
from .errors import (
    CriticalModulusError,
    DomainError,
    JointDiagonalizationError,
    PoleError,
)
from .params import Couplings, EllipticFrame, Weights
from .precision import FLOAT64, Precision, as_precision

#: eigenvalue gap below which eigenvectors are re-orthogonalized as a cluster
DEGENERACY_GAP = 1e-12

#: joint-diagonalization residual tolerance (relative to matrix scale)
JOINT_TOL = 1e-9


# ----------------------------------------------------------------------
# matrix construction
# ----------------------------------------------------------------------

@dataclass
class MatrixBundle:
    """The four symmetric matrices of one system, as context scalars.

    ``rows_*`` are plain nested lists usable at any precision; the
    uppercase properties give binary64 numpy copies.
    """

    M: int
    rows_T_plus: list
    rows_T_minus: list
    rows_T: list
    rows_C: list
    prec: Precision

    def _np(self, rows):
        return np.array([[float(x) for x in r] for r in rows], dtype=float)

    @property
    def T_plus(self):
        return self._np(self.rows_T_plus)

    @property
    def T_minus(self):
        return self._np(self.rows_T_minus)

    @property
    def T(self):
        return self._np(self.rows_T)

    @property
    def C(self):
        return self._np(self.rows_C)


def build_matrices(w: Weights, M: int, prec: Precision | None = None) -> MatrixBundle:
    """Assemble the transfer-matrix family for even M >= 2.

    The tridiagonal core carries 2 on the diagonal with the two boundary
    corners shifted by the dual-weight ratios; the anti-tridiagonal part
    carries the dual weights on three anti-bands.  Symmetry is exact by
    construction.
    """
    if M < 2 or M % 2:
        raise DomainError("matrix construction requires even M >= 2")
    prec = as_precision(prec if prec is not None else w.prec)
    ctx = prec.ctx
    zero = ctx.mpf(0)
    ts, zs = w.t_star, w.z_star
    tzm = w.t_minus * w.z_minus
    pref = -tzm / 2

    C = [[zero for _ in range(M)] for _ in range(M)]
    for i in range(M):
        C[i][i] = ctx.mpf(2)
        if i + 1 < M:
            C[i][i + 1] = ctx.mpf(1)
            C[i + 1][i] = ctx.mpf(1)
    C[0][0] = 2 + ts / zs
    C[M - 1][M - 1] = 2 + ts * zs

    shift = w.t_plus * w.z_plus + tzm
    Tp = [[pref * C[i][j] + (shift if i == j else zero) for j in range(M)]
          for i in range(M)]

    A = [[zero for _ in range(M)] for _ in range(M)]
    # anti-band i + j = M + 1 (main): interior -2 t*_plus, corners -1/t*
    tsp = (ts + 1 / ts) / 2
    for i in range(1, M + 1):
        j = M + 1 - i
        A[i - 1][j - 1] = -2 * tsp
    A[0][M - 1] = -1 / ts
    A[M - 1][0] = -1 / ts
    # anti-band i + j = M: z*
    for i in range(1, M):
        j = M - i
        A[i - 1][j - 1] = zs
    # anti-band i + j = M + 2: 1/z*
    for i in range(2, M + 1):
        j = M + 2 - i
        A[i - 1][j - 1] = 1 / zs
    Tm = [[pref * A[i][j] for j in range(M)] for i in range(M)]

    T = [[Tp[i][j] + Tm[i][j] for j in range(M)] for i in range(M)]
    return MatrixBundle(M=M, rows_T_plus=Tp, rows_T_minus=Tm, rows_T=T,
                        rows_C=C, prec=prec)


# ----------------------------------------------------------------------
# joint diagonalization
# ----------------------------------------------------------------------

def _matvec(rows, v):
    return [sum(rows[i][j] * v[j] for j in range(len(v)))
            for i in range(len(v))]


def _rayleigh(rows, v):
    Av = _matvec(rows, v)
    return sum(v[i] * Av[i] for i in range(len(v)))


def _sym_eig(rows, prec: Precision):
    """Eigen-decomposition of a real symmetric matrix in the given
    precision; returns (values ascending, eigenvectors as list of lists)."""
    M = len(rows)
    if prec.is_float:
        try:
            vals, vecs = np.linalg.eigh(np.array(rows, dtype=float))
        except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
            raise JointDiagonalizationError(
                f"eigensolver failed: {exc}; matrix = {rows!r}") from exc
        return [float(v) for v in vals], [list(map(float, vecs[:, j]))
                                          for j in range(M)]
    ctx = prec.ctx
    A = ctx.matrix(M, M)
    for i in range(M):
        for j in range(M):
            A[i, j] = rows[i][j]
    E, Q = ctx.eigsy(A)
    order = sorted(range(M), key=lambda j: E[j])
    vals = [E[j] for j in order]
    vecs = [[Q[i, j] for i in range(M)] for j in order]
    return vals, vecs


def _reorthogonalize_clusters(vals, vecs, rows_T, prec):
    """Rotate eigenvectors inside near-degenerate clusters so that the
    transfer matrix is diagonal there too.  Defensive: generic couplings
    have a simple spectrum."""
    M = len(vals)
    scale = max(1.0, max(abs(float(v)) for v in vals))
    i = 0
    while i < M:
        j = i + 1
        while j < M and abs(float(vals[j] - vals[j - 1])) < DEGENERACY_GAP * scale:
            j += 1
        if j - i > 1:
            sub = [[_rayleigh_pair(rows_T, vecs[a], vecs[b])
                    for b in range(i, j)] for a in range(i, j)]
            _e, q = _sym_eig(sub, FLOAT64 if prec.is_float else prec)
            new = []
            for col in range(j - i):
                v = [sum(q[col][r] * vecs[i + r][m] for r in range(j - i))
                     for m in range(M)]
                new.append(v)
            vecs[i:j] = new
        i = j
    return vecs


def _rayleigh_pair(rows, va, vb):
    Av = _matvec(rows, vb)
    return sum(va[i] * Av[i] for i in range(len(va)))


@dataclass
class SpectrumPoint:
    """One eigenvalue with its full angle set.

    ``lam`` is the positive transfer-matrix eigenvalue; the angle fields
    are filled by the enrichment pass.  The Jacobi triple at the point is
    kept for downstream reuse (matrix-element assembly, identities).
    """

    mu: int
    lam: float
    lam_plus: float
    lam_minus: float
    gamma: float
    chi: float
    eigvec: list
    zeta: complex = None
    phi: complex = None
    u: complex = None
    omega: complex = None
    theta: complex = None
    psi: complex = None
    branch: str = ""
    quant_residual: float = None
    sn_u: complex = field(default=None, repr=False)
    cn_u: complex = field(default=None, repr=False)
    dn_u: complex = field(default=None, repr=False)

    def exp_theta(self):
        """e^theta = k sn u cn u / (i dn u), single-valued in the triple."""
        return self._k * self.sn_u * self.cn_u / (self._ctx.mpc(0, 1)
                                                  * self.dn_u)

    def exp_minus_theta(self):
        return 1 / self.exp_theta()

    def exp_psi(self):
        """e^psi = -cot(phi/2), single-valued given the angle branch."""
        ctx = self._ctx
        return -ctx.cos(self.phi / 2) / ctx.sin(self.phi / 2)


def joint_spectrum(bundle: MatrixBundle, w: Weights,
                   prec: Precision | None = None) -> list:
    """Simultaneous spectrum of the transfer-matrix family.

    Eigenvectors come from the stable symmetric tridiagonal half-sum; the
    branch between an eigenvalue and its reciprocal is fixed by the
    Rayleigh quotient against the full transfer matrix.  Cross-residuals
    against every family member are enforced.
    """
    prec = as_precision(prec if prec is not None else bundle.prec)
    k = float(w.t_minus / w.z_minus)
    if abs(k - 1) < 1e-12:
        raise CriticalModulusError(
            "joint spectrum undefined at the critical modulus")
    pts = _family_spectrum(bundle, w, prec)
    _check_joint(bundle, w, pts, prec)
    return pts


def _family_spectrum(bundle, w, prec):
    """Shared eigensystem without the angle enrichment (also used by the
    block-transfer route, which must run at the critical modulus)."""
    ctx = prec.ctx
    M = bundle.M
    vals, vecs = _sym_eig(bundle.rows_T_plus, prec)
    vecs = _reorthogonalize_clusters(vals, vecs, bundle.rows_T, prec)
    tzp = w.t_plus * w.z_plus
    tzm = w.t_minus * w.z_minus
    pts = []
    for idx in range(M):
        lp = vals[idx]
        v = vecs[idx]
        lam_r = _rayleigh(bundle.rows_T, v)
        root = ctx.sqrt(max(lp * lp - 1, ctx.mpf(0)) if not prec.is_float
                        else max(lp * lp - 1, 0.0))
        lam = lp + root if lam_r >= lp else lp - root
        lm = lam - lp
        chi = 2 * (tzp + tzm - lp) / tzm
        pts.append(SpectrumPoint(
            mu=0, lam=lam, lam_plus=lp, lam_minus=lm,
            gamma=ctx.log(lam), chi=chi, eigvec=v))
    pts.sort(key=lambda p: -float(p.gamma))
    for i, p in enumerate(pts):
        p.mu = i + 1
        p._ctx = ctx
        p._k = w.t_minus / w.z_minus
    return pts


def _check_joint(bundle, w, pts, prec):
    scale = max(1.0, max(abs(float(x)) for r in bundle.rows_T for x in r))
    worst = 0.0
    for p in pts:
        for rows, val in ((bundle.rows_T, p.lam),
                          (bundle.rows_T_plus, p.lam_plus),
                          (bundle.rows_T_minus, p.lam_minus),
                          (bundle.rows_C, p.chi)):
            Av = _matvec(rows, p.eigvec)
            r = max(abs(float(Av[i] - val * p.eigvec[i]))
                    for i in range(bundle.M))
            worst = max(worst, r / scale)
    if worst > JOINT_TOL:
        raise JointDiagonalizationError(
            f"joint diagonalization failure: residual {worst:.3e}")


def chi_poly_derivative(points, index):
    """Derivative of the shifted-core characteristic polynomial at one of
    its own roots, as the pairwise product of eigenvalue differences."""
    chi_mu = points[index].chi
    out = 1
    for j, q in enumerate(points):
        if j != index:
            out = out * (chi_mu - q.chi)
    return out


# ----------------------------------------------------------------------
# angle enrichment
# ----------------------------------------------------------------------

def _eta_triple(frame: EllipticFrame):
    return frame.sncndn(frame.eta)


def _acos_upper(ctx, x):
    """Principal arccos continued with nonnegative imaginary part."""
    v = ctx.acos(ctx.mpc(x))
    if ctx.im(v) < 0:
        v = ctx.conj(v)
    return v


def triple_from_lambda(lam, w: Weights, frame: EllipticFrame):
    """Consistent Jacobi triple (sn, cn, dn) of some preimage of the
    horizontal eigenvalue, reconstructed from the four spectral bounds.

    Every closed-form expression used downstream is invariant under the
    choice of preimage, so principal square roots suffice.
    """
    ctx = frame.prec.ctx
    sn_e, cn_e, dn_e = _eta_triple(frame)
    q_n = ctx.sqrt(ctx.mpc(w.lambda_n - lam))
    sn_u = sn_e * ctx.sqrt(ctx.mpc(w.lambda_s - lam)) / q_n
    cn_u = cn_e * ctx.sqrt(ctx.mpc(w.lambda_c - lam)) / q_n
    dn_u = dn_e * ctx.sqrt(ctx.mpc(w.lambda_d - lam)) / q_n
    return sn_u, cn_u, dn_u


def sn_shift_eta(triple, frame, sign=+1):
    """sn(u + sign*eta) from the triple at u, by the addition formula."""
    ctx = frame.prec.ctx
    sn_u, cn_u, dn_u = triple
    sn_e, cn_e, dn_e = _eta_triple(frame)
    k = frame.k
    den = 1 - (k * sn_u * sn_e) ** 2
    if abs(den) < 1e-14:
        raise PoleError("addition formula pole", where=None)
    return (sn_u * cn_e * dn_e + sign * sn_e * cn_u * dn_u) / den


def zeta_from_triple(triple, frame):
    return sn_shift_eta(triple, frame, +1) / sn_shift_eta(triple, frame, -1)


def double_argument(triple, k):
    """(sn 2u, cn 2u, dn 2u) from the triple at u."""
    sn, cn, dn = triple
    den = 1 - (k * sn * sn) ** 2
    sn2 = 2 * sn * cn * dn / den
    cn2 = (cn * cn - (sn * dn) ** 2) / den
    dn2 = (dn * dn - (k * sn * cn) ** 2) / den
    return sn2, cn2, dn2


def lambda_zeta(u, frame: EllipticFrame):
    """Horizontal and vertical eigenvalue functions at a torus point."""
    sp = frame.sn(u + frame.eta)
    sm = frame.sn(u - frame.eta)
    lam = 1 / (frame.k * sp * sm)
    return lam, sp / sm


def dispersion_residual(gamma, phi, w: Weights):
    """Residual of the dispersion relation linking the two angle families:
    cosh(gamma) + t_minus z_minus cos(phi) - t_plus z_plus."""
    ctx = w.prec.ctx
    return ctx.cosh(ctx.mpc(gamma)) + w.tz_minus * ctx.cos(ctx.mpc(phi)) \
        - w.tz_plus


def _arcsn(ctx, s, k, prec):
    s2 = s * s
    return s * carlson_rf(1 - s2, 1 - k * k * s2, 1, prec)


def spectral_angles(p: SpectrumPoint, frame: EllipticFrame, w: Weights,
                    M: int) -> SpectrumPoint:
    """Fill the angle set of one spectrum point (in place, returned).

    The angle branch is the principal arccos with nonnegative imaginary
    part; the torus point is reconstructed from the Jacobi triple, verified
    against the eigenvalue pair, and reduced so that reciprocal-eigenvalue
    points sit on the upper torus line.
    """
    ctx = frame.prec.ctx
    prec = frame.prec
    k = frame.k
    p.phi = _acos_upper(ctx, p.chi / 2 - 1)
    p.zeta = ctx.exp(ctx.mpc(0, 1) * p.phi)

    sn_u, cn_u, dn_u = triple_from_lambda(p.lam, w, frame)
    zeta_t = zeta_from_triple((sn_u, cn_u, dn_u), frame)
    if abs(zeta_t - p.zeta) > abs(1 / zeta_t - p.zeta):
        sn_u = -sn_u
        zeta_t = 1 / zeta_t
    p.sn_u, p.cn_u, p.dn_u = sn_u, cn_u, dn_u

    complex_phi = abs(float(ctx.im(p.phi))) > 1e-9
    tol = 1e-6 if complex_phi else 1e-9
    if abs(zeta_t - p.zeta) > tol * max(1.0, abs(p.zeta)):
        raise JointDiagonalizationError(
            f"branch inconsistency: vertical eigenvalue mismatch "
            f"{abs(zeta_t - p.zeta):.3e} at mu={p.mu}")

    p.u = _locate_u(p, frame, tol)
    p.branch = ("complex" if complex_phi else
                ("shifted_iKprime"
                 if abs(float(ctx.im(p.u))) > float(frame.K_prime) / 2
                 else "real_axis"))

    p.omega = frame.am(2 * p.u)
    p.theta = ctx.log(p.exp_theta())
    p.psi = -ctx.log(-ctx.tan(p.phi / 2))
    two_pi = 2 * ctx.pi
    r = ctx.re(M * p.phi - p.omega)
    r = r - two_pi * ctx.floor(r / two_pi + 0.5)
    p.quant_residual = abs(complex(r + ctx.mpc(0, 1) * ctx.im(M * p.phi - p.omega)))
    return p


def _locate_u(p, frame, tol):
    """Torus point with the point's eigenvalue pair, from its triple."""
    ctx = frame.prec.ctx
    u0 = _arcsn(ctx, p.sn_u, frame.k, frame.prec)
    best = None
    for cand in (u0, -u0, ctx.conj(u0), -ctx.conj(u0)):
        try:
            lam_c, zeta_c = lambda_zeta(cand, frame)
        except PoleError:
            continue
        err = abs(lam_c - p.lam) / max(1.0, abs(p.lam)) + abs(zeta_c - p.zeta)
        if best is None or err < best[0]:
            best = (err, cand)
    if best is None or best[0] > tol:
        raise JointDiagonalizationError(
            f"branch inconsistency: no torus point matches mu={p.mu} "
            f"(best residual {best[0] if best else float('inf'):.3e})")
    u = best[1]
    K, Kp = frame.K, frame.K_prime
    re = ctx.re(u) - 2 * K * int(ctx.floor((ctx.re(u) + K) / (2 * K)))
    im = ctx.im(u) - 2 * Kp * int(ctx.floor((ctx.im(u) + Kp) / (2 * Kp)))
    if im < -float(Kp) / 2:
        im = im + 2 * Kp  # present reciprocal-line points at +iK'
    return ctx.mpc(re, im)


def enrich_spectrum(points, frame: EllipticFrame, w: Weights, M: int):
    """Angle enrichment for a whole spectrum; returns the same list."""
    for p in points:
        spectral_angles(p, frame, w, M)
    return points


def spectrum_for(c: Couplings, prec: Precision = FLOAT64):
    """Convenience pipeline: weights, frame, matrices, enriched spectrum."""
    from .params import elliptic_frame, weights_from_couplings
    w = weights_from_couplings(c, prec)
    frame = elliptic_frame(w, prec)
    bundle = build_matrices(w, c.M, prec)
    pts = joint_spectrum(bundle, w, prec)
    enrich_spectrum(pts, frame, w, c.M)
    return w, frame, bundle, pts


# ----------------------------------------------------------------------
# closed characteristic polynomials
# ----------------------------------------------------------------------

@dataclass
class CharPolyContext:
    """Everything the closed-form evaluators need."""

    weights: Weights
    frame: EllipticFrame
    M: int
    points: list = None

    @property
    def prec(self):
        return self.frame.prec


CP_KINDS = ("lambda_plus", "chi", "lambda", "lambda_at_inverse",
            "lambda_minus", "zeta", "zeta_at_inverse")


def char_poly_eval(kind: str, x, cpc: CharPolyContext):
    """Closed-form characteristic polynomial values.

    ``lambda_at_inverse`` (``zeta_at_inverse``) evaluates the polynomial at
    the reciprocal of the eigenvalue function while sharing the torus point
    of the plain kind, matching the factorized forms they appear in.
    """
    if kind not in CP_KINDS:
        raise DomainError(f"unknown characteristic polynomial kind {kind!r}")
    ctx = cpc.prec.ctx
    x = ctx.mpc(x)
    try:
        return _cp_dispatch(kind, x, cpc)
    except (ZeroDivisionError, PoleError):
        # measure-zero degeneracy of the parametrization: evaluate by limit
        h = ctx.mpf("1e-7") * max(1.0, abs(x))
        return (_cp_dispatch(kind, x + h, cpc)
                + _cp_dispatch(kind, x - h, cpc)) / 2


def _cp_dispatch(kind, x, cpc):
    ctx = cpc.prec.ctx
    w, M = cpc.weights, cpc.M
    if kind == "lambda_plus":
        lam = x + ctx.sqrt(x * x - 1)
        pref = (1 - w.t_star ** 2) * (w.tz_minus / 2) ** M
        return pref * _full_angle_ratio(lam, cpc)
    if kind == "chi":
        lam_plus = w.tz_plus + w.tz_minus * (1 - x / 2)
        lam = lam_plus + ctx.sqrt(lam_plus * lam_plus - 1)
        return (1 - w.t_star ** 2) * _full_angle_ratio(lam, cpc)
    if kind == "lambda":
        return _cp_lambda(x, cpc, inverse=False)
    if kind == "lambda_at_inverse":
        return _cp_lambda(x, cpc, inverse=True)
    if kind == "lambda_minus":
        lam = x + ctx.sqrt(x * x + 1)
        a = _cp_lambda(lam, cpc, inverse=False)
        b = _cp_lambda(-1 / lam, cpc, inverse=False)
        return a * b / (2 ** M * w.t)
    if kind == "zeta":
        return _cp_zeta(x, cpc, inverse=False)
    if kind == "zeta_at_inverse":
        return _cp_zeta(x, cpc, inverse=True)
    raise AssertionError(kind)


def _angle_data(lam, cpc):
    """Triple, vertical eigenvalue and double-argument values for a
    preimage of ``lam``."""
    triple = triple_from_lambda(lam, cpc.weights, cpc.frame)
    zeta = zeta_from_triple(triple, cpc.frame)
    sn2, cn2, dn2 = double_argument(triple, cpc.frame.k)
    return triple, zeta, sn2, cn2, dn2


def _full_angle_ratio(lam, cpc):
    """[sin(M phi) cos w - cos(M phi) sin w] / (-sin w) at the preimage."""
    ctx = cpc.prec.ctx
    _t, zeta, sn2, cn2, _d = _angle_data(lam, cpc)
    zM = zeta ** cpc.M
    sin_m = (zM - 1 / zM) / ctx.mpc(0, 2)
    cos_m = (zM + 1 / zM) / 2
    if abs(sn2) < 1e-13:
        raise ZeroDivisionError("vanishing sine of the boundary phase")
    return (sin_m * cn2 - cos_m * sn2) / (-sn2)


def _cp_lambda(x, cpc, inverse):
    ctx = cpc.prec.ctx
    w, M = cpc.weights, cpc.M
    triple, zeta, _s2, _c2, _d2 = _angle_data(x, cpc)
    sn_u, cn_u, dn_u = triple
    zh = zeta ** (M // 2)
    cos_h = (zh + 1 / zh) / 2
    sin_h = (zh - 1 / zh) / ctx.mpc(0, 2)
    if inverse:
        tan_half = sn_u * dn_u / cn_u
        bracket = cos_h + tan_half * sin_h
        pref = (-w.tz_minus / x) ** (M // 2)
    else:
        cot_half = cn_u / (sn_u * dn_u)
        bracket = cos_h - cot_half * sin_h
        pref = (-w.tz_minus * x) ** (M // 2)
    return (1 - w.t_star) * pref * bracket


def _cp_zeta(x, cpc, inverse):
    if cpc.points is None:
        raise DomainError("vertical characteristic polynomials need the "
                          "enriched spectrum in the context")
    ctx = cpc.prec.ctx
    w, M, frame = cpc.weights, cpc.M, cpc.frame
    cos_phi = (x + 1 / x) / 2
    lam_plus = w.tz_plus - w.tz_minus * cos_phi
    lam = lam_plus + ctx.sqrt(lam_plus * lam_plus - 1)
    triple = triple_from_lambda(lam, w, frame)
    zeta_t = zeta_from_triple(triple, frame)
    if abs(zeta_t - x) > abs(1 / zeta_t - x):
        triple = (-triple[0], triple[1], triple[2])
        zeta_t = 1 / zeta_t
    sn2, cn2, _d2 = double_argument(triple, frame.k)
    e_miw = cn2 - ctx.mpc(0, 1) * sn2   # e^{-i omega}
    zM = zeta_t ** M
    # products over the spectrum use the addition formula on stored triples
    prod_num = ctx.mpc(1)
    for q in cpc.points:
        s_eta_umu = _sn_eta_plus_point(frame, q)     # sn(eta + u_mu)
        s_u_umu = _sn_sum_points(frame, triple, q)   # sn(u + u_mu)
        if inverse:
            prod_num = prod_num * (frame.k * s_eta_umu * s_u_umu)
        else:
            prod_num = prod_num * (s_eta_umu / s_u_umu)
    if inverse:
        ratio = (1 + (1 / zM) * (1 / e_miw)) / (1 + 1 / e_miw)
        return (1 - w.t_star) * ratio * prod_num
    ratio = (1 - zM * e_miw) / (1 - e_miw)
    return (1 - w.t_star) * ratio * prod_num


def _sn_eta_plus_point(frame, q):
    """sn(eta + u_mu) via the addition formula on stored triples."""
    k = frame.k
    sn_e, cn_e, dn_e = _eta_triple(frame)
    den = 1 - (k * sn_e * q.sn_u) ** 2
    return (sn_e * q.cn_u * q.dn_u + q.sn_u * cn_e * dn_e) / den


def _sn_sum_points(frame, triple, q):
    """sn(u + u_mu) for the evaluation point and a spectrum point."""
    k = frame.k
    sn_a, cn_a, dn_a = triple
    den = 1 - (k * sn_a * q.sn_u) ** 2
    return (sn_a * q.cn_u * q.dn_u + q.sn_u * cn_a * dn_a) / den

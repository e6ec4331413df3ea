"""Primal-dual interior-point solver for second-order-cone programs.

Standard form:

    minimize    c'x
    subject to  A x = b
                x  in  K = R^free x R+^nonneg x Q_k1 x ... x Q_kp

where Q_k is the second-order cone {(t, u) : ||u|| <= t}.  The solver runs
a homogeneous self-dual embedding with Nesterov-Todd scaling and Mehrotra
predictor-corrector steps, so primal/dual infeasibility come out as
certificates rather than stalls.  Deterministic given identical input.
Dense or sparse KKT factorizations are chosen by problem size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class NumericalError(RuntimeError):
    """Unrecoverable linear-algebra failure inside the solver."""


@dataclass
class ConeProgram:
    c: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    n_free: int
    n_nonneg: int
    cones: List[int]
    names: Optional[List[str]] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if not sp.issparse(self.A):
            self.A = sp.csr_matrix(np.atleast_2d(self.A))
        else:
            self.A = self.A.tocsr()
        n = self.n_free + self.n_nonneg + sum(self.cones)
        if self.c.shape != (n,):
            raise ValueError(f"c has size {self.c.shape}, expected {n}")
        if self.A.shape != (len(self.b), n):
            raise ValueError(f"A is {self.A.shape}, expected "
                             f"({len(self.b)}, {n})")
        if any(k < 2 for k in self.cones):
            raise ValueError("every cone block needs size >= 2")

    @property
    def n(self) -> int:
        return self.n_free + self.n_nonneg + sum(self.cones)

    @property
    def m(self) -> int:
        return len(self.b)


@dataclass
class SocpResult:
    status: str                 # optimal | primal-infeasible |
    #                             dual-infeasible | iteration-limit
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    pobj: float
    dobj: float
    pres: float
    dres: float
    relgap: float
    iterations: int
    tau: float = 1.0
    kappa: float = 0.0


def audit_result(prog: ConeProgram, res: SocpResult) -> dict:
    """Recompute KKT residuals of a result from the raw program data."""
    x, y, z = res.x, res.y, res.z
    pres = np.linalg.norm(prog.A @ x - prog.b) / (1.0 +
                                                  np.linalg.norm(prog.b))
    dres = np.linalg.norm(prog.A.T @ y + z - prog.c) / (
        1.0 + np.linalg.norm(prog.c))
    pobj = float(prog.c @ x)
    dobj = float(prog.b @ y)
    gap = abs(pobj - dobj) / max(1.0, abs(pobj), abs(dobj))
    return {"pres": float(pres), "dres": float(dres), "relgap": float(gap)}


# -- cone algebra over the non-free part -------------------------------------
#
# Blocks of equal size are batched into (count, size) arrays so every
# operation is a handful of vectorized numpy expressions.

class _Cone:
    """Composite cone R+^nn x SOC blocks; vectors exclude free columns."""

    def __init__(self, nn: int, blocks: List[int]):
        self.nn = nn
        self.blocks = blocks
        self.dim = nn + sum(blocks)
        self.degree = nn + len(blocks)
        self.groups: List[Tuple[int, np.ndarray]] = []  # (size, flat idx)
        order: Dict[int, List[int]] = {}
        off = nn
        for k in blocks:
            order.setdefault(k, []).extend(range(off, off + k))
            off += k
        for size in sorted(order):
            self.groups.append((size,
                                np.array(order[size], dtype=np.intp)))

    def _as_groups(self, v: np.ndarray):
        return [(size, v[idx].reshape(-1, size))
                for size, idx in self.groups]

    def identity(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[:self.nn] = 1.0
        for size, idx in self.groups:
            e[idx.reshape(-1, size)[:, 0]] = 1.0
        return e

    def inside(self, v: np.ndarray, margin: float = 0.0) -> bool:
        if self.nn and np.min(v[:self.nn]) <= margin:
            return False
        for size, idx in self.groups:
            B = v[idx].reshape(-1, size)
            if np.any(B[:, 0] - np.linalg.norm(B[:, 1:], axis=1) <= margin):
                return False
        return True

    def step_to_boundary(self, v: np.ndarray, dv: np.ndarray) -> float:
        """Largest alpha with v + alpha * dv in the (closed) cone."""
        alpha = np.inf
        if self.nn:
            neg = dv[:self.nn] < 0
            if np.any(neg):
                alpha = min(alpha, float(np.min(-v[:self.nn][neg]
                                                / dv[:self.nn][neg])))
        for size, idx in self.groups:
            V = v[idx].reshape(-1, size)
            D = dv[idx].reshape(-1, size)
            aa = D[:, 0] ** 2 - np.einsum("ij,ij->i", D[:, 1:], D[:, 1:])
            bb = 2.0 * (V[:, 0] * D[:, 0]
                        - np.einsum("ij,ij->i", V[:, 1:], D[:, 1:]))
            cc = V[:, 0] ** 2 - np.einsum("ij,ij->i", V[:, 1:], V[:, 1:])
            steps = np.full(len(V), np.inf)
            lin = np.abs(aa) < 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                lin_step = np.where(bb < -1e-14, -cc / bb, np.inf)
                steps = np.where(lin, lin_step, steps)
                disc = bb * bb - 4.0 * aa * cc
                quad = (~lin) & (disc >= 0.0)
                sq = np.sqrt(np.maximum(disc, 0.0))
                r1 = (-bb - sq) / (2.0 * aa)
                r2 = (-bb + sq) / (2.0 * aa)
                r1 = np.where(r1 > 1e-14, r1, np.inf)
                r2 = np.where(r2 > 1e-14, r2, np.inf)
                qstep = np.minimum(r1, r2)
                steps = np.where(quad, np.minimum(steps, qstep), steps)
                t0 = np.where(D[:, 0] < 0, -V[:, 0] / D[:, 0], np.inf)
            steps = np.minimum(steps, t0)
            if len(steps):
                alpha = min(alpha, float(np.min(steps)))
        return alpha

    def product(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Jordan product u o v."""
        out = np.empty(self.dim)
        out[:self.nn] = u[:self.nn] * v[:self.nn]
        for size, idx in self.groups:
            U = u[idx].reshape(-1, size)
            V = v[idx].reshape(-1, size)
            R = np.empty_like(U)
            R[:, 0] = np.einsum("ij,ij->i", U, V)
            R[:, 1:] = U[:, :1] * V[:, 1:] + V[:, :1] * U[:, 1:]
            out[idx] = R.ravel()
        return out

    def arrow_solve(self, lam: np.ndarray, r: np.ndarray) -> np.ndarray:
        """Solve Arw(lam) u = r per block."""
        out = np.empty(self.dim)
        out[:self.nn] = r[:self.nn] / lam[:self.nn]
        for size, idx in self.groups:
            L = lam[idx].reshape(-1, size)
            R = r[idx].reshape(-1, size)
            det = L[:, 0] ** 2 - np.einsum("ij,ij->i", L[:, 1:], L[:, 1:])
            if np.any(det <= 0) or np.any(L[:, 0] <= 0):
                raise NumericalError("scaled point left the cone interior")
            l_dot_r = np.einsum("ij,ij->i", L[:, 1:], R[:, 1:])
            U = np.empty_like(R)
            U[:, 0] = (L[:, 0] * R[:, 0] - l_dot_r) / det
            coef = (-R[:, 0] + l_dot_r / L[:, 0]) / det
            U[:, 1:] = R[:, 1:] / L[:, :1] + coef[:, None] * L[:, 1:]
            out[idx] = U.ravel()
        return out


def _group_det(B: np.ndarray) -> np.ndarray:
    return B[:, 0] ** 2 - np.einsum("ij,ij->i", B[:, 1:], B[:, 1:])


def _group_quad(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """P(u) v per row: 2 u (u'v) - det(u) (J v)."""
    dot = np.einsum("ij,ij->i", U, V)
    det = _group_det(U)
    R = 2.0 * dot[:, None] * U
    R[:, 0] -= det * V[:, 0]
    R[:, 1:] += det[:, None] * V[:, 1:]
    return R


class _Scaling:
    """Nesterov-Todd scaling for the composite cone at a point pair (x, z)."""

    def __init__(self, cone: _Cone, x: np.ndarray, z: np.ndarray):
        self.cone = cone
        nn = cone.nn
        if nn and (np.any(x[:nn] <= 0) or np.any(z[:nn] <= 0)):
            raise NumericalError("iterate left the cone interior")
        self.d_nn = np.sqrt(x[:nn] / z[:nn]) if nn else np.empty(0)
        self.lam = np.empty(cone.dim)
        self.lam[:nn] = np.sqrt(x[:nn] * z[:nn])
        self.w_groups = []     # (idx, W, Wsqrt, Wsqrt_inv)
        for size, idx in cone.groups:
            X = x[idx].reshape(-1, size)
            Z = z[idx].reshape(-1, size)
            dx = _group_det(X)
            dz = _group_det(Z)
            if np.any(dx <= 0) or np.any(dz <= 0) or np.any(X[:, 0] <= 0) \
                    or np.any(Z[:, 0] <= 0):
                raise NumericalError("iterate left the cone interior")
            sx = np.sqrt(dx)
            sz = np.sqrt(dz)
            Xh = X / sx[:, None]
            Zh = Z / sz[:, None]
            gamma = np.sqrt((1.0 + np.einsum("ij,ij->i", Xh, Zh)) / 2.0)
            W = np.empty_like(X)
            W[:, 0] = (Xh[:, 0] + Zh[:, 0]) / (2.0 * gamma)
            W[:, 1:] = (Xh[:, 1:] - Zh[:, 1:]) / (2.0 * gamma[:, None])
            W *= np.sqrt(sx / sz)[:, None]
            dW = np.sqrt(np.maximum(_group_det(W), 1e-300))
            S = np.empty_like(W)
            S[:, 0] = np.sqrt(np.maximum((W[:, 0] + dW) / 2.0, 1e-300))
            S[:, 1:] = W[:, 1:] / (2.0 * S[:, :1])
            dS = _group_det(S)
            Si = np.empty_like(S)
            Si[:, 0] = S[:, 0] / dS
            Si[:, 1:] = -S[:, 1:] / dS[:, None]
            self.w_groups.append((idx, size, W, S, Si))
            self.lam[idx] = _group_quad(S, Z).ravel()

    def apply_inv_sqrt(self, v: np.ndarray) -> np.ndarray:
        """P(w^{-1/2}) v."""
        out = np.empty(self.cone.dim)
        nn = self.cone.nn
        out[:nn] = v[:nn] / self.d_nn
        for idx, size, W, S, Si in self.w_groups:
            out[idx] = _group_quad(Si, v[idx].reshape(-1, size)).ravel()
        return out

    def apply_sqrt(self, v: np.ndarray) -> np.ndarray:
        """P(w^{1/2}) v."""
        out = np.empty(self.cone.dim)
        nn = self.cone.nn
        out[:nn] = v[:nn] * self.d_nn
        for idx, size, W, S, Si in self.w_groups:
            out[idx] = _group_quad(S, v[idx].reshape(-1, size)).ravel()
        return out

    def h_inv_entries(self):
        """COO entries of P(w^{-1}) over the cone part."""
        nn = self.cone.nn
        rows = [np.arange(nn)]
        cols = [np.arange(nn)]
        vals = [1.0 / (self.d_nn ** 2)] if nn else [np.empty(0)]
        for idx, size, W, S, Si in self.w_groups:
            dW = _group_det(W)
            Wi = np.empty_like(W)
            Wi[:, 0] = W[:, 0] / dW
            Wi[:, 1:] = -W[:, 1:] / dW[:, None]
            det_i = _group_det(Wi)
            block = 2.0 * np.einsum("mi,mj->mij", Wi, Wi)
            block[:, 0, 0] -= det_i
            for j in range(1, size):
                block[:, j, j] += det_i
            I = idx.reshape(-1, size)
            rows.append(np.repeat(I, size, axis=1).ravel())
            cols.append(np.tile(I, (1, size)).ravel())
            vals.append(block.ravel())
        return (np.concatenate(rows), np.concatenate(cols),
                np.concatenate(vals))


# -- equilibration ------------------------------------------------------------

def _ruiz_equilibrate(prog: ConeProgram, passes: int = 6):
    """Row/column scaling; columns of one cone block share a single factor."""
    A = prog.A.tocoo()
    m, n = A.shape
    row_s = np.ones(m)
    col_s = np.ones(n)
    groups = np.arange(n)
    off = prog.n_free + prog.n_nonneg
    for gi, k in enumerate(prog.cones):
        groups[off:off + k] = n + gi  # mark block membership
        off += k
    data = A.data.copy()
    rows, cols = A.row, A.col
    for _ in range(passes):
        rmax = np.zeros(m)
        np.maximum.at(rmax, rows, np.abs(data))
        rmax[rmax == 0] = 1.0
        rf = 1.0 / np.sqrt(rmax)
        data *= rf[rows]
        row_s *= rf
        cmax = np.zeros(n)
        np.maximum.at(cmax, cols, np.abs(data))
        # one factor per cone block: use the max over the block
        off = prog.n_free + prog.n_nonneg
        for k in prog.cones:
            blockmax = cmax[off:off + k].max()
            cmax[off:off + k] = blockmax
            off += k
        cmax[cmax == 0] = 1.0
        cf = 1.0 / np.sqrt(cmax)
        data *= cf[cols]
        col_s *= cf
    A2 = sp.csr_matrix((data, (rows, cols)), shape=(m, n))
    return A2, row_s, col_s


# -- main solver ---------------------------------------------------------------

@dataclass
class IpmOptions:
    feastol: float = 1e-7
    gaptol: float = 1e-7
    # dual feasibility floors earlier than primal in double precision;
    # callers that only need a sharp primal (incumbent polishing) may relax
    # the dual tolerance separately
    dres_tol: Optional[float] = None
    max_iter: int = 100
    step_frac: float = 0.99
    reg: float = 1e-11
    dense_threshold: int = 400
    verbose: bool = False


class _KktStructure:
    """Static sparsity of [[-H - reg, A'], [A, reg]]; values swap per
    iteration."""

    def __init__(self, A: sp.csr_matrix, n_free: int, dense: bool):
        coo = A.tocoo()
        m, n = A.shape
        self.n, self.m, self.nf = n, m, n_free
        self.dense = dense
        dim = n + m
        self.dim = dim
        self.static_rows = np.concatenate([coo.col, coo.row + n])
        self.static_cols = np.concatenate([coo.row + n, coo.col])
        self.static_vals = np.concatenate([coo.data, coo.data])
        self.diag_idx = np.arange(dim)

    def factor(self, h_rows, h_cols, h_vals, reg):
        n, m = self.n, self.m
        rows = np.concatenate([self.static_rows, h_rows + self.nf,
                               self.diag_idx])
        cols = np.concatenate([self.static_cols, h_cols + self.nf,
                               self.diag_idx])
        regv = np.concatenate([-reg * np.ones(n), reg * np.ones(m)])
        vals0 = np.concatenate([self.static_vals, -h_vals,
                                np.zeros(self.dim)])
        vals = np.concatenate([self.static_vals, -h_vals, regv])
        if self.dense:
            K0 = np.zeros((self.dim, self.dim))
            np.add.at(K0, (rows, cols), vals0)
            Kr = K0 + np.diag(regv)
            try:
                lu = scipy.linalg.lu_factor(Kr)
            except (ValueError, scipy.linalg.LinAlgError) as exc:
                raise NumericalError(f"KKT factorization failed: {exc}")
            return _KktFactor(self, lu, K0, dense=True)
        K0 = sp.coo_matrix((vals0, (rows, cols)),
                           shape=(self.dim, self.dim)).tocsr()
        Kr = sp.coo_matrix((vals, (rows, cols)),
                           shape=(self.dim, self.dim)).tocsc()
        try:
            lu = spla.splu(Kr)
        except RuntimeError as exc:
            raise NumericalError(f"KKT factorization failed: {exc}")
        return _KktFactor(self, lu, K0, dense=False)


class _KktFactor:
    def __init__(self, struct, lu, K0, dense):
        self.struct = struct
        self.lu = lu
        self.K0 = K0
        self.dense = dense

    def solve(self, r1: np.ndarray, r2: np.ndarray, refine: int = 1):
        rhs = np.concatenate([r1, r2])
        if self.dense:
            sol = scipy.linalg.lu_solve(self.lu, rhs)
        else:
            sol = self.lu.solve(rhs)
        for _ in range(refine):
            resid = rhs - self.K0 @ sol
            if self.dense:
                sol = sol + scipy.linalg.lu_solve(self.lu, resid)
            else:
                sol = sol + self.lu.solve(resid)
        n = self.struct.n
        return sol[:n], sol[n:]


def solve_socp(prog: ConeProgram, options: Optional[IpmOptions] = None
               ) -> SocpResult:
    """Solve a cone program; returns certificates for infeasible problems."""
    opt = options or IpmOptions()
    if prog.n == 0:
        return SocpResult("optimal", np.zeros(0), np.zeros(prog.m),
                          np.zeros(0), 0.0, 0.0, 0.0, 0.0, 0.0, 0)
    if prog.m == 0:
        prog = ConeProgram(c=prog.c,
                           A=sp.csr_matrix((1, prog.n)),
                           b=np.zeros(1), n_free=prog.n_free,
                           n_nonneg=prog.n_nonneg, cones=prog.cones,
                           names=prog.names)
    A0, b0, c0 = prog.A, prog.b, prog.c
    n, m = prog.n, prog.m
    nf = prog.n_free

    A, row_s, col_s = _ruiz_equilibrate(prog)
    b = b0 * row_s
    c = c0 * col_s
    sb = max(1.0, np.linalg.norm(b, np.inf))
    sc = max(1.0, np.linalg.norm(c, np.inf))
    b = b / sb
    c = c / sc

    cone = _Cone(prog.n_nonneg, prog.cones)
    cd = cone.dim

    def unscale(xs, ys, zs, tau):
        t = max(tau, 1e-300)
        x = col_s * xs / t * sb
        y = row_s * ys / t * sc
        z = np.zeros(n)
        z[nf:] = zs / t
        z = z / col_s * sc
        return x, y, z

    def true_metrics(x, y, z):
        pres = np.linalg.norm(A0 @ x - b0) / (1.0 + np.linalg.norm(b0))
        dres = np.linalg.norm(A0.T @ y + z - c0) / (1.0 +
                                                    np.linalg.norm(c0))
        pobj = float(c0 @ x)
        dobj = float(b0 @ y)
        relgap = abs(pobj - dobj) / max(1.0, abs(pobj), abs(dobj))
        return pres, dres, pobj, dobj, relgap

    # HSD state
    x = np.zeros(n)
    x[nf:] = cone.identity()
    y = np.zeros(m)
    zc = cone.identity()          # cone part of z; free part is always 0
    tau, kappa = 1.0, 1.0

    def full_z(zc_):
        z = np.zeros(n)
        z[nf:] = zc_
        return z

    nu = cone.degree + 1.0
    dense = (n + m) <= opt.dense_threshold
    kkt_struct = _KktStructure(A, nf, dense)
    best = None
    it = 0

    for it in range(1, opt.max_iter + 1):
        z = full_z(zc)
        # residuals of the homogeneous system
        r_p = b * tau - A @ x
        r_d = c * tau - A.T @ y - z
        r_g = kappa + c @ x - b @ y
        mu = (x[nf:] @ zc + tau * kappa) / nu

        # true-scale convergence metrics
        xt, yt, zt = unscale(x, y, zc, tau)
        pres, dres, pobj, dobj, relgap = true_metrics(xt, yt, zt)
        best = SocpResult("iteration-limit", xt, yt, zt, pobj, dobj,
                          pres, dres, relgap, it - 1, tau, kappa)
        if opt.verbose:
            print(f"  it {it:3d}  mu {mu:9.2e}  pres {pres:9.2e} "
                  f"dres {dres:9.2e} gap {relgap:9.2e} tau {tau:8.2e} "
                  f"kappa {kappa:8.2e}")
        if pres <= opt.feastol \
                and dres <= (opt.dres_tol if opt.dres_tol is not None
                             else opt.feastol) \
                and relgap <= opt.gaptol:
            best.status = "optimal"
            best.iterations = it - 1
            return best
        # infeasibility certificates (homogeneous ray: kappa/tau -> inf)
        if kappa / max(tau, 1e-300) > 10.0 or tau <= 1e-12 \
                or mu <= 1e-10:
            by = float(b @ y)
            cx = float(c @ x)
            if by > 1e-12:
                yc = y / by
                zcert = full_z(zc) / by
                infres = np.linalg.norm(A.T @ yc + zcert)
                if infres <= 1e-7 * (1 + np.linalg.norm(yc)):
                    ycert = row_s * yc
                    zfull = (full_z(zc) / by) / col_s
                    return SocpResult("primal-infeasible", np.zeros(n),
                                      ycert, zfull, math.inf, math.inf,
                                      pres, dres, relgap, it, tau, kappa)
            if cx < -1e-12:
                xc = x / (-cx)
                infres = np.linalg.norm(A @ xc)
                if infres <= 1e-7 * (1 + np.linalg.norm(xc)):
                    xcert = col_s * xc
                    return SocpResult("dual-infeasible", xcert, np.zeros(m),
                                      np.zeros(n), -math.inf, -math.inf,
                                      pres, dres, relgap, it, tau, kappa)
            if tau <= 1e-12:
                best.status = "iteration-limit"
                return best

        try:
            scaling = _Scaling(cone, x[nf:], zc)
            h_rows, h_cols, h_vals = scaling.h_inv_entries()
            hinv = sp.csr_matrix((h_vals, (h_rows, h_cols)),
                                 shape=(cd, cd))
        except NumericalError:
            best.status = "iteration-limit"
            return best
        kkt = None
        for attempt in range(4):
            try:
                kkt = kkt_struct.factor(h_rows, h_cols, h_vals,
                                        opt.reg * (10.0 ** attempt))
                break
            except NumericalError:
                if attempt == 3:
                    best.status = "iteration-limit"
                    return best
        # solve with rhs (c, b), reused by both steps
        u1x, u1y = kkt.solve(c, b)

        def directions(sigma, corr_lam, corr_tk):
            eta = 1.0 - sigma
            lam = scaling.lam
            rhs_lam = sigma * mu * cone.identity() - cone.product(lam, lam)
            if corr_lam is not None:
                rhs_lam = rhs_lam - corr_lam
            s_vec = cone.arrow_solve(lam, rhs_lam)
            pw = np.zeros(n)
            pw[nf:] = scaling.apply_inv_sqrt(s_vec)
            r1 = eta * r_d - pw
            r2 = eta * r_p
            u2x, u2y = kkt.solve(r1, r2)
            # dtau from the gap row
            rs = sigma * mu - tau * kappa - corr_tk
            denom = float(b @ u1y - c @ u1x) + kappa / tau
            if abs(denom) < 1e-300:
                raise NumericalError("singular gap row in the KKT reduction")
            num = eta * r_g - float(b @ u2y - c @ u2x) + rs / tau
            dtau = num / denom
            dx = u2x + dtau * u1x
            dy = u2y + dtau * u1y
            dzc = scaling.apply_inv_sqrt(s_vec) - hinv @ dx[nf:]
            dkappa = (rs - kappa * dtau) / tau
            return dx, dy, dzc, dtau, dkappa

        # predictor
        try:
            dx, dy, dzc, dtau, dkappa = directions(0.0, None, 0.0)
        except NumericalError:
            best.status = "iteration-limit"
            return best
        alpha = min(cone.step_to_boundary(x[nf:], dx[nf:]),
                    cone.step_to_boundary(zc, dzc))
        if dtau < 0:
            alpha = min(alpha, -tau / dtau)
        if dkappa < 0:
            alpha = min(alpha, -kappa / dkappa)
        alpha = min(alpha, 1.0)
        mu_aff = ((x[nf:] + alpha * dx[nf:]) @ (zc + alpha * dzc)
                  + (tau + alpha * dtau) * (kappa + alpha * dkappa)) / nu
        sigma = min(1.0, max(0.0, (mu_aff / mu))) ** 3

        # corrector
        try:
            corr = cone.product(scaling.apply_inv_sqrt(dx[nf:]),
                                scaling.apply_sqrt(dzc))
            dx, dy, dzc, dtau, dkappa = directions(sigma, corr,
                                                   dtau * dkappa)
        except NumericalError:
            best.status = "iteration-limit"
            return best
        alpha = min(cone.step_to_boundary(x[nf:], dx[nf:]),
                    cone.step_to_boundary(zc, dzc))
        if dtau < 0:
            alpha = min(alpha, -tau / dtau)
        if dkappa < 0:
            alpha = min(alpha, -kappa / dkappa)
        alpha = min(opt.step_frac * alpha, 1.0)
        if not math.isfinite(alpha) or alpha <= 1e-14:
            best.status = "iteration-limit"
            return best
        # keep strictly inside: floating-point roundoff near the boundary
        # can defeat the fraction-to-boundary rule
        for _ in range(60):
            if (cone.inside(x[nf:] + alpha * dx[nf:])
                    and cone.inside(zc + alpha * dzc)
                    and tau + alpha * dtau > 0
                    and kappa + alpha * dkappa > 0):
                break
            alpha *= 0.8
        else:
            best.status = "iteration-limit"
            return best

        x = x + alpha * dx
        y = y + alpha * dy
        zc = zc + alpha * dzc
        tau += alpha * dtau
        kappa += alpha * dkappa

    best.status = "iteration-limit"
    best.iterations = it
    return best


# -- text export ---------------------------------------------------------------

def export_text(prog: ConeProgram) -> str:
    """Readable sectioned dump of a cone program for external cross-checks."""
    lines = ["SECTION sizes",
             f"free {prog.n_free}", f"nonneg {prog.n_nonneg}",
             "cones " + " ".join(str(k) for k in prog.cones),
             "SECTION objective"]
    for j, v in enumerate(prog.c):
        if v != 0.0:
            lines.append(f"{j} {v!r}")
    lines.append("SECTION rows")
    coo = prog.A.tocoo()
    order = np.lexsort((coo.col, coo.row))
    for idx in order:
        lines.append(f"{coo.row[idx]} {coo.col[idx]} {coo.data[idx]!r}")
    lines.append("SECTION rhs")
    for i, v in enumerate(prog.b):
        if v != 0.0:
            lines.append(f"{i} {v!r}")
    if prog.names:
        lines.append("SECTION names")
        lines.extend(f"{j} {nm}" for j, nm in enumerate(prog.names))
    return "\n".join(lines) + "\n"

"""Dense bounded-variable simplex solver.

Linear programs are given as ``min c.x`` over rows ``a_i . x  (<=|=|>=)  b_i``
with per-variable bounds ``l <= x <= u`` (upper bounds may be infinite, lower
bounds must be finite).  Internally the problem is standardized by appending
one slack column per inequality row and one artificial column per row; a
two-phase primal simplex finds an optimum from scratch, and a dual simplex
re-optimizes after bound tightenings (used by the branch-and-bound driver).

The tableau ``B^-1 [A | b]`` is kept dense and updated with rank-1 pivots,
with periodic refactorization from the basis for numerical hygiene.  An
anti-cycling guard switches to Bland's rule after a run of degenerate pivots.
Problem sizes here are a few hundred rows and columns, where a dense numpy
tableau is the fastest simple choice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

_AT_LOWER, _AT_UPPER, _BASIC = 0, 1, 2
_REFRESH_EVERY = 128
_BLAND_AFTER = 40
_PIVOT_TOL = 1e-9
_RATIO_TIE = 1e-12


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


class DualStall(RuntimeError):
    """Dual simplex made no progress; caller should re-solve from scratch."""


@dataclass
class SolverOptions:
    feas_tol: float = 1e-7
    int_tol: float = 1e-6
    gap_tol: float = 1e-6
    iter_limit: int = 50_000
    node_limit: int = 100_000

    def __post_init__(self) -> None:
        if min(self.feas_tol, self.int_tol, self.gap_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.iter_limit <= 0 or self.node_limit <= 0:
            raise ValueError("limits must be positive")


@dataclass
class LpProblem:
    c: np.ndarray                # (n,)
    a: np.ndarray                # (m, n)
    rel: list[str]               # "<=", "=", ">=" per row
    b: np.ndarray                # (m,)
    lower: np.ndarray            # (n,) finite
    upper: np.ndarray            # (n,) may be +inf
    offset: float = 0.0

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=float)
        self.a = np.atleast_2d(np.asarray(self.a, dtype=float))
        self.b = np.asarray(self.b, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        m, n = self.a.shape
        if self.c.shape != (n,) or self.b.shape != (m,) or len(self.rel) != m:
            raise ValueError("inconsistent problem dimensions")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("bound arrays must match variable count")
        if any(r not in ("<=", "=", ">=") for r in self.rel):
            raise ValueError("row relations must be one of <=, =, >=")
        if not np.all(np.isfinite(self.lower)):
            raise ValueError("lower bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def num_vars(self) -> int:
        return self.a.shape[1]


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective: float | None


@dataclass
class Snapshot:
    basis: np.ndarray
    vstat: np.ndarray
    tab: np.ndarray
    xb: np.ndarray
    z: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


class Simplex:
    """Standard-form solver state, reusable across bound tightenings."""

    def __init__(self, problem: LpProblem, opts: SolverOptions | None = None):
        self.prob = problem
        self.opts = opts or SolverOptions()
        m, n = problem.a.shape
        ineq = [i for i, r in enumerate(problem.rel) if r != "="]
        self.n_struct = n
        self.m = m
        ncols = n + len(ineq) + m             # structurals, slacks, artificials
        self.ntot = ncols
        a_full = np.zeros((m, ncols))
        a_full[:, :n] = problem.a
        lower = np.zeros(ncols)
        upper = np.full(ncols, np.inf)
        lower[:n] = problem.lower
        upper[:n] = problem.upper
        self._slack_of_row = {}
        for k, i in enumerate(ineq):
            a_full[i, n + k] = 1.0 if problem.rel[i] == "<=" else -1.0
            self._slack_of_row[i] = n + k
        self.art0 = n + len(ineq)
        self.a_full = a_full                  # artificial signs set by solve()
        self.b = problem.b.copy()
        self.col_lower = lower
        self.col_upper = upper
        self.c_real = np.zeros(ncols)
        self.c_real[:n] = problem.c
        self.cur_c = self.c_real
        # state, populated by solve()
        self.basis = np.zeros(m, dtype=np.int64)
        self.vstat = np.full(ncols, _AT_LOWER, dtype=np.int8)
        self.tab = np.zeros((m, ncols + 1))   # last column is B^-1 b
        self.xb = np.zeros(m)
        self.z = np.zeros(ncols)
        self.iters = 0

    # -- bookkeeping ---------------------------------------------------------

    def _nonbasic_values(self) -> np.ndarray:
        vals = np.where(self.vstat == _AT_UPPER, self.col_upper, self.col_lower)
        vals[self.vstat == _BASIC] = 0.0
        return vals

    def _recompute_xb(self) -> None:
        self.xb = self.tab[:, -1] - self.tab[:, :-1] @ self._nonbasic_values()

    def _recompute_z(self) -> None:
        cb = self.cur_c[self.basis]
        self.z = self.cur_c - cb @ self.tab[:, :-1]
        self.z[self.basis] = 0.0

    def _refactorize(self) -> None:
        bmat = self.a_full[:, self.basis]
        aug = np.concatenate([self.a_full, self.b[:, None]], axis=1)
        self.tab = np.linalg.solve(bmat, aug)
        self._recompute_xb()
        self._recompute_z()

    def full_x(self) -> np.ndarray:
        x = self._nonbasic_values()
        x[self.basis] = self.xb
        return x

    def structural_x(self) -> np.ndarray:
        return self.full_x()[: self.n_struct]

    def objective(self) -> float:
        return float(self.c_real @ self.full_x()) + self.prob.offset

    def max_violation(self) -> float:
        """Worst bound or row violation of the current point (diagnostics)."""
        x = self.full_x()
        lo = float(np.max(self.col_lower - x, initial=0.0))
        up = np.where(np.isfinite(self.col_upper), self.col_upper, np.inf)
        hi = float(np.max(x - up, initial=0.0))
        rows = float(np.max(np.abs(self.a_full @ x - self.b), initial=0.0))
        return max(lo, hi, rows)

    # -- fresh two-phase solve -------------------------------------------------

    def solve(self) -> LpStatus:
        m, n = self.m, self.n_struct
        self.vstat[:] = _AT_LOWER
        self.col_lower[self.art0:] = 0.0
        self.col_upper[self.art0:] = np.inf
        x_low = self.col_lower.copy()
        x_low[self.art0:] = 0.0
        resid = self.b - self.a_full[:, : self.art0] @ x_low[: self.art0]
        art_used = False
        for i in range(m):
            sj = self._slack_of_row.get(i)
            if sj is not None:
                coef = self.a_full[i, sj]          # +1 for <=, -1 for >=
                val = resid[i] / coef
                if val >= 0.0:
                    self.basis[i] = sj
                    self.vstat[sj] = _BASIC
                    self.xb[i] = val
                    self.a_full[i, self.art0 + i] = 1.0
                    continue
            self.a_full[i, self.art0 + i] = 1.0 if resid[i] >= 0.0 else -1.0
            self.basis[i] = self.art0 + i
            self.vstat[self.art0 + i] = _BASIC
            self.xb[i] = abs(resid[i])
            art_used = True
        diag = self.a_full[np.arange(m), self.basis]
        aug = np.concatenate([self.a_full, self.b[:, None]], axis=1)
        self.tab = aug / diag[:, None]
        self.iters = 0

        if art_used:
            self.cur_c = np.zeros(self.ntot)
            self.cur_c[self.art0:] = 1.0
            self._recompute_z()
            status = self._primal()
            if status is not LpStatus.OPTIMAL:
                return status if status is LpStatus.ITERATION_LIMIT else LpStatus.INFEASIBLE
            art_rows = self.basis >= self.art0
            art_sum = float(self.xb[art_rows].sum()) if art_rows.any() else 0.0
            if art_sum > self.opts.feas_tol * (1.0 + float(np.abs(self.b).sum())):
                return LpStatus.INFEASIBLE
        self.col_upper[self.art0:] = 0.0       # artificials pinned at zero
        self.cur_c = self.c_real
        self._recompute_z()
        return self._primal()

    # -- primal iteration --------------------------------------------------------

    def _entering(self, bland: bool) -> int:
        score = np.where(self.vstat == _AT_LOWER, -self.z, self.z)
        blocked = (self.vstat == _BASIC) | (self.col_lower >= self.col_upper)
        score[blocked] = -np.inf
        if bland:
            ok = np.nonzero(score > _PIVOT_TOL)[0]
            return int(ok[0]) if ok.size else -1
        q = int(np.argmax(score))
        return q if score[q] > _PIVOT_TOL else -1

    def _ratio_test(self, delta: np.ndarray, flip: float,
                    bland: bool) -> tuple[float, int, int]:
        """Smallest step before a basic variable hits a bound.

        Returns (step, leaving row or -1 for a bound flip, side the leaver
        stops at).  ``delta`` is the per-unit change of the basic values times
        -1 (i.e. basic values move by ``-delta * step``).
        """
        lb = self.col_lower[self.basis]
        ub = self.col_upper[self.basis]
        t = np.full(self.m, np.inf)
        pos = delta > _PIVOT_TOL
        t[pos] = (self.xb[pos] - lb[pos]) / delta[pos]
        neg = (delta < -_PIVOT_TOL) & np.isfinite(ub)
        t[neg] = (self.xb[neg] - ub[neg]) / delta[neg]
        np.clip(t, 0.0, None, out=t)
        tmin = float(t.min(initial=np.inf))
        if flip <= tmin + _RATIO_TIE and flip < np.inf and flip <= tmin:
            return flip, -1, 0
        if not np.isfinite(tmin):
            return np.inf, -1, 0
        ties = np.nonzero(t <= tmin + _RATIO_TIE)[0]
        if bland:
            r = int(ties[np.argmin(self.basis[ties])])
        else:
            r = int(ties[np.argmax(np.abs(delta[ties]))])
        side = _AT_LOWER if delta[r] > 0 else _AT_UPPER
        return float(t[r]), int(r), side

    def _primal(self) -> LpStatus:
        degen = 0
        bland = False
        guard = 0
        while True:
            self.iters += 1
            if self.iters > self.opts.iter_limit:
                return LpStatus.ITERATION_LIMIT
            if self.iters % _REFRESH_EVERY == 0:
                self._refactorize()
            q = self._entering(bland)
            if q < 0:
                if guard < 2:
                    guard += 1
                    self._refactorize()
                    if self._entering(False) >= 0:
                        continue
                return LpStatus.OPTIMAL
            sigma = 1.0 if self.vstat[q] == _AT_LOWER else -1.0
            delta = sigma * self.tab[:, q]
            flip = self.col_upper[q] - self.col_lower[q]
            step, r, side = self._ratio_test(delta, flip, bland)
            if not np.isfinite(step):
                return LpStatus.UNBOUNDED
            if step <= 1e-10:
                degen += 1
                if degen > _BLAND_AFTER:
                    bland = True
            else:
                degen = 0
                bland = False
            if r < 0:
                self.xb -= delta * step
                self.vstat[q] = _AT_UPPER if self.vstat[q] == _AT_LOWER else _AT_LOWER
                continue
            self._pivot(r, q, sigma, step, side)

    def _pivot(self, r: int, q: int, sigma: float, step: float, leave_side: int) -> None:
        vals = self.col_lower[q] if self.vstat[q] == _AT_LOWER else self.col_upper[q]
        enter_val = vals + sigma * step
        self.xb -= sigma * step * self.tab[:, q]
        old = self.basis[r]
        self.vstat[old] = leave_side
        self.basis[r] = q
        self.vstat[q] = _BASIC
        self.xb[r] = enter_val
        piv = self.tab[r, q]
        self.tab[r] /= piv
        col = self.tab[:, q].copy()
        col[r] = 0.0
        self.tab -= np.outer(col, self.tab[r])
        self.tab[:, q] = 0.0
        self.tab[r, q] = 1.0
        zq = self.z[q]
        if zq != 0.0:
            self.z -= zq * self.tab[r, :-1]
        self.z[q] = 0.0
        self.z[old] = self.cur_c[old] - self.cur_c[self.basis] @ self.tab[:, old]

    # -- dual re-optimization ------------------------------------------------------

    def change_bound(self, var: int, lo: float, hi: float) -> None:
        """Tighten a structural variable's bounds in place.  Keeps the basis
        dual-feasible, so a subsequent :meth:`dual_solve` re-optimizes."""
        j = var
        if self.vstat[j] == _BASIC:
            self.col_lower[j], self.col_upper[j] = lo, hi
            return
        old_val = self.col_lower[j] if self.vstat[j] == _AT_LOWER else self.col_upper[j]
        self.col_lower[j], self.col_upper[j] = lo, hi
        if self.vstat[j] == _AT_UPPER and not np.isfinite(hi):
            self.vstat[j] = _AT_LOWER
        new_val = self.col_lower[j] if self.vstat[j] == _AT_LOWER else self.col_upper[j]
        if new_val != old_val:
            self.xb -= self.tab[:, j] * (new_val - old_val)

    def dual_solve(self, max_iters: int = 4000) -> LpStatus:
        """Re-optimize after bound changes from a dual-feasible basis."""
        ftol = self.opts.feas_tol
        for _ in range(max_iters):
            lb = self.col_lower[self.basis]
            ub = self.col_upper[self.basis]
            below = lb - self.xb
            above = np.where(np.isfinite(ub), self.xb - ub, -np.inf)
            worst = np.maximum(below, above)
            r = int(np.argmax(worst))
            if worst[r] <= ftol * (1.0 + abs(float(self.xb[r]))):
                return LpStatus.OPTIMAL
            is_below = below[r] >= above[r]
            row = self.tab[r, :-1]
            at_lower = self.vstat == _AT_LOWER
            at_upper = self.vstat == _AT_UPPER
            movable = self.col_lower < self.col_upper
            if is_below:   # x_r must increase
                elig = movable & ((at_lower & (row < -_PIVOT_TOL)) |
                                  (at_upper & (row > _PIVOT_TOL)))
            else:          # x_r must decrease
                elig = movable & ((at_lower & (row > _PIVOT_TOL)) |
                                  (at_upper & (row < -_PIVOT_TOL)))
            idx = np.nonzero(elig)[0]
            if idx.size == 0:
                return LpStatus.INFEASIBLE
            ratios = np.abs(self.z[idx]) / np.abs(row[idx])
            rmin = float(ratios.min())
            ties = idx[ratios <= rmin + _RATIO_TIE]
            q = int(ties[np.argmax(np.abs(row[ties]))])
            target_side = _AT_LOWER if is_below else _AT_UPPER
            bound = lb[r] if is_below else ub[r]
            sigma = 1.0 if self.vstat[q] == _AT_LOWER else -1.0
            step = (self.xb[r] - bound) / (sigma * self.tab[r, q])
            if step < 0.0:
                step = 0.0
            self._pivot(r, q, sigma, step, target_side)
            self.iters += 1
            if self.iters % _REFRESH_EVERY == 0:
                self._refactorize()
        raise DualStall(f"dual simplex exceeded {max_iters} iterations")

    # -- warm-start snapshots --------------------------------------------------------

    def snapshot(self) -> Snapshot:
        return Snapshot(self.basis.copy(), self.vstat.copy(), self.tab.copy(),
                        self.xb.copy(), self.z.copy(),
                        self.col_lower.copy(), self.col_upper.copy())

    def restore(self, snap: Snapshot) -> None:
        self.basis = snap.basis.copy()
        self.vstat = snap.vstat.copy()
        self.tab = snap.tab.copy()
        self.xb = snap.xb.copy()
        self.z = snap.z.copy()
        self.col_lower = snap.lower.copy()
        self.col_upper = snap.upper.copy()
        self.cur_c = self.c_real


def solve_lp(problem: LpProblem, opts: SolverOptions | None = None) -> LpSolution:
    """Solve a linear program with the two-phase bounded-variable simplex."""
    sx = Simplex(problem, opts)
    status = sx.solve()
    if status is LpStatus.OPTIMAL:
        return LpSolution(status, sx.structural_x(), sx.objective())
    return LpSolution(status, None, None)

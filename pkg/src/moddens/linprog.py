"""Dense bounded-variable simplex solver (primal two-phase + dual re-solve).

Maximization only.  All variables carry a finite lower bound (0 by default)
and an upper bound that may be +inf.  Rows have senses <=, =, >=.

The basis is maintained as an LU factorization plus a product-form eta
chain, refactorized every REFACTOR_EVERY pivots.  Snapshots record the
factorization serial and chain length, so a depth-first caller (the MILP
engine) can restore an ancestor basis by truncating the chain instead of
refactorizing.  Pricing is Dantzig with a Bland fallback after a run of
degenerate pivots.  Dual values are taken from the final simplex basis,
i.e. they are a vertex of the dual polyhedron, not an interior point;
callers that iterate on dual prices (column generation) will see vertex
duals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

LE = "<="
EQ = "="
GE = ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

FEAS_TOL = 1e-7
DUAL_TOL = 1e-7
PIV_TOL = 1e-9
RATIO_TIE = 1e-9
STALL_LIMIT = 50
REFACTOR_EVERY = 100

_LOWER, _UPPER, _BASIC = 0, 1, 2


class LpError(Exception):
    pass


class UnknownVariable(LpError):
    pass


class UnknownRow(LpError):
    pass


class NumericalBreakdown(LpError):
    """Singular or hopelessly degenerate basis beyond refactorization retries."""


class LinearProgram:
    """Sparse row-oriented model container; sense is always maximize."""

    def __init__(self) -> None:
        self.obj: list[float] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.names: list[str] = []
        self.rows: list[dict[int, float]] = []
        self.senses: list[str] = []
        self.rhs: list[float] = []

    @property
    def num_vars(self) -> int:
        return len(self.obj)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def add_variable(
        self,
        obj: float = 0.0,
        lb: float = 0.0,
        ub: float = np.inf,
        name: Optional[str] = None,
        coeffs: Optional[dict[int, float]] = None,
    ) -> int:
        if not np.isfinite(lb):
            raise LpError("variables need a finite lower bound")
        if ub < lb:
            raise LpError(f"empty bound interval [{lb}, {ub}]")
        j = len(self.obj)
        self.obj.append(float(obj))
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.names.append(name if name is not None else f"x{j}")
        if coeffs:
            for r, a in coeffs.items():
                if not (0 <= r < len(self.rows)):
                    raise UnknownRow(f"row {r} does not exist")
                self.rows[r][j] = float(a)
        return j

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> int:
        if sense not in (LE, EQ, GE):
            raise LpError(f"bad sense {sense!r}")
        for j in coeffs:
            if not (0 <= j < len(self.obj)):
                raise UnknownVariable(f"variable {j} does not exist")
        self.rows.append({j: float(a) for j, a in coeffs.items()})
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        return len(self.rows) - 1

    def set_bounds(self, j: int, lb: float, ub: float) -> None:
        if not (0 <= j < len(self.obj)):
            raise UnknownVariable(f"variable {j} does not exist")
        if not np.isfinite(lb):
            raise LpError("variables need a finite lower bound")
        if ub < lb:
            raise LpError(f"empty bound interval [{lb}, {ub}]")
        self.lb[j] = float(lb)
        self.ub[j] = float(ub)

    def dump_text(self) -> str:
        """Debug dump in an LP-exchange style text form."""
        out = ["Maximize", " obj: " + _lincomb(dict(enumerate(self.obj)), self.names)]
        out.append("Subject To")
        for r, (row, sense, rhs) in enumerate(zip(self.rows, self.senses, self.rhs)):
            out.append(f" r{r}: " + _lincomb(row, self.names) + f" {sense} {rhs:.12g}")
        out.append("Bounds")
        for j, (lo, hi) in enumerate(zip(self.lb, self.ub)):
            hs = "+inf" if np.isinf(hi) else f"{hi:.12g}"
            out.append(f" {lo:.12g} <= {self.names[j]} <= {hs}")
        out.append("End")
        return "\n".join(out) + "\n"


def _lincomb(coeffs: dict[int, float], names: list[str]) -> str:
    parts = []
    for j in sorted(coeffs):
        a = coeffs[j]
        if a == 0.0:
            continue
        sign = "-" if a < 0 else ("+" if parts else "")
        parts.append(f"{sign} {abs(a):.12g} {names[j]}".strip())
    return " ".join(parts) if parts else "0"


def lp_add_column(lp: LinearProgram, obj: float, coeffs: dict[int, float]) -> int:
    return lp.add_variable(obj=obj, coeffs=coeffs)


def lp_add_row(lp: LinearProgram, sense: str, rhs: float, coeffs: dict[int, float]) -> int:
    return lp.add_row(coeffs, sense, rhs)


@dataclass
class Basis:
    """Warm-start token: basic variable per row, nonbasic statuses, artificial
    signs, and a reference to the factorization generation it was taken at."""

    basis: np.ndarray
    vstat: np.ndarray
    art_sign: np.ndarray
    lu: object = None
    etas: object = None
    eta_len: int = 0

    def copy(self) -> "Basis":
        return Basis(
            self.basis.copy(),
            self.vstat.copy(),
            self.art_sign.copy(),
            self.lu,
            self.etas,
            self.eta_len,
        )


def remap_basis(old: Basis, old_ns: int, new_ns: int, m: int) -> Optional[Basis]:
    """Translate a snapshot across a column-append rebuild of the same rows.

    New structural variables start nonbasic at their lower bound.  Snapshots
    whose basis contains engine artificials are not remapped (rare; caller
    falls back to a cold solve).
    """
    if new_ns < old_ns or old.basis.shape[0] != m:
        return None
    if np.any(old.basis >= old_ns + m):
        return None
    shift = new_ns - old_ns
    basis = old.basis.copy()
    basis[basis >= old_ns] += shift
    vstat = np.full(new_ns + 2 * m, _LOWER, dtype=np.int8)
    vstat[:old_ns] = old.vstat[:old_ns]
    vstat[new_ns:] = old.vstat[old_ns:]
    return Basis(basis, vstat, old.art_sign.copy())


@dataclass
class LpSolution:
    status: str
    objective: float
    x: Optional[np.ndarray] = None
    duals: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    basis: Optional[Basis] = None


class SimplexEngine:
    """Compiled LP in equality form with slack and artificial blocks.

    Variable layout: [0, ns) structural, [ns, ns+m) slacks, [ns+m, ns+2m)
    artificials.  >= rows are negated at compile time (``row_neg`` records
    which), so every slack has bounds [0, inf) or [0, 0].
    """

    def __init__(self, lp: LinearProgram) -> None:
        m, ns = lp.num_rows, lp.num_vars
        A = np.zeros((m, ns))
        b = np.asarray(lp.rhs, dtype=float).copy()
        row_neg = np.zeros(m, dtype=bool)
        slack_ub = np.full(m, np.inf)
        for r, (row, sense) in enumerate(zip(lp.rows, lp.senses)):
            for j, a in row.items():
                A[r, j] = a
            if sense == GE:
                A[r] *= -1.0
                b[r] *= -1.0
                row_neg[r] = True
            elif sense == EQ:
                slack_ub[r] = 0.0
        self.A = A
        self.b = b
        self.m = m
        self.ns = ns
        self.row_neg = row_neg
        self.base_lb = np.asarray(lp.lb, dtype=float)
        self.base_ub = np.asarray(lp.ub, dtype=float)
        self.slack_lb = np.zeros(m)
        self.slack_ub = slack_ub
        self.c_real = np.concatenate([np.asarray(lp.obj, dtype=float), np.zeros(2 * m)])
        self.ntot = ns + 2 * m
        # per-solve state
        self.lbw = np.empty(self.ntot)
        self.ubw = np.empty(self.ntot)
        self.cw = np.empty(self.ntot)
        self.art_sign = np.ones(m)
        self.basis = np.empty(m, dtype=np.int64)
        self.vstat = np.empty(self.ntot, dtype=np.int8)
        self.xB = np.empty(m)
        self.pivots = 0
        # factorization state
        self._lu = None
        self._etas: list[tuple[int, float, np.ndarray]] = []

    # ------------------------------------------------------------------ setup

    def set_objective(self, obj_struct) -> None:
        """Swap the structural objective; factorizations stay valid."""
        self.c_real[: self.ns] = obj_struct

    def _load_bounds(self, lb_struct: Optional[np.ndarray], ub_struct: Optional[np.ndarray]) -> None:
        ns, m = self.ns, self.m
        self.lbw[:ns] = self.base_lb if lb_struct is None else lb_struct
        self.ubw[:ns] = self.base_ub if ub_struct is None else ub_struct
        self.lbw[ns : ns + m] = self.slack_lb
        self.ubw[ns : ns + m] = self.slack_ub
        self.lbw[ns + m :] = 0.0
        self.ubw[ns + m :] = 0.0

    def _col(self, j: int) -> np.ndarray:
        ns, m = self.ns, self.m
        out = np.zeros(m)
        if j < ns:
            out[:] = self.A[:, j]
        elif j < ns + m:
            out[j - ns] = 1.0
        else:
            out[j - ns - m] = self.art_sign[j - ns - m]
        return out

    # ---------------------------------------------------------- factorization

    def _refactor(self) -> None:
        ns, m = self.ns, self.m
        B = np.zeros((m, m))
        for k, j in enumerate(self.basis):
            j = int(j)
            if j < ns:
                B[:, k] = self.A[:, j]
            elif j < ns + m:
                B[j - ns, k] = 1.0
            else:
                B[j - ns - m, k] = self.art_sign[j - ns - m]
        lu, piv = sla.lu_factor(B, check_finite=False)
        diag = np.abs(np.diag(lu))
        if diag.min(initial=np.inf) <= 1e-11 * max(1.0, diag.max(initial=0.0)):
            raise NumericalBreakdown("singular basis")
        self._lu = (lu, piv)
        self._etas = []

    def _ftran(self, col: np.ndarray) -> np.ndarray:
        x = sla.lu_solve(self._lu, col, check_finite=False)
        for r, piv, w2 in self._etas:
            t = x[r] / piv
            if t != 0.0:
                x -= w2 * t
            x[r] = t
        return x

    def _btran(self, row: np.ndarray) -> np.ndarray:
        u = row.copy()
        for r, piv, w2 in reversed(self._etas):
            u[r] = (u[r] - w2 @ u) / piv
        return sla.lu_solve(self._lu, u, trans=1, check_finite=False)

    def _append_eta(self, r: int, w: np.ndarray) -> None:
        piv = float(w[r])
        w2 = w.copy()
        w2[r] = 0.0
        self._etas.append((r, piv, w2))

    def _binv_col(self, j: int) -> np.ndarray:
        return self._ftran(self._col(j))

    def _nonbasic_values(self) -> np.ndarray:
        xn = np.where(self.vstat == _UPPER, self.ubw, self.lbw)
        xn[self.vstat == _BASIC] = 0.0
        return xn

    def _recompute_xB(self) -> None:
        ns, m = self.ns, self.m
        xn = self._nonbasic_values()
        rhs = self.b - self.A @ xn[:ns] - xn[ns : ns + m]
        arts = xn[ns + m :]
        if arts.any():
            rhs -= self.art_sign * arts
        self.xB = self._ftran(rhs)

    def snapshot(self) -> Basis:
        return Basis(
            self.basis.copy(),
            self.vstat.copy(),
            self.art_sign.copy(),
            self._lu,
            self._etas,
            len(self._etas),
        )

    def _restore(self, start: Basis) -> bool:
        """Install a snapshot's basis, reusing its factorization generation."""
        if start.basis.shape[0] != self.m or start.vstat.shape[0] != self.ntot:
            return False
        self.basis = start.basis.copy()
        self.vstat = start.vstat.copy()
        self.art_sign = start.art_sign.copy()
        if start.lu is not None and start.etas is not None and len(start.etas) >= start.eta_len:
            self._lu = start.lu
            if self._etas is start.etas and len(self._etas) == start.eta_len:
                pass  # already current
            else:
                self._etas = list(start.etas[: start.eta_len])
            return True
        try:
            self._refactor()
        except NumericalBreakdown:
            return False
        return True

    # ------------------------------------------------------------- main entry

    def solve_primal(
        self,
        lb_struct: Optional[np.ndarray] = None,
        ub_struct: Optional[np.ndarray] = None,
        start: Optional[Basis] = None,
    ) -> str:
        self._load_bounds(lb_struct, ub_struct)
        if start is not None and self._adopt(start):
            return self._phase2()
        return self._two_phase()

    def _adopt(self, start: Basis) -> bool:
        if not self._restore(start):
            return False
        self._recompute_xB()
        lbB = self.lbw[self.basis]
        ubB = self.ubw[self.basis]
        if np.all(self.xB >= lbB - FEAS_TOL) and np.all(self.xB <= ubB + FEAS_TOL):
            self.cw = self.c_real.copy()
            return True
        return False

    def _two_phase(self) -> str:
        ns, m = self.ns, self.m
        self.vstat[:] = _LOWER
        self.basis = np.arange(ns, ns + m, dtype=np.int64)
        self.vstat[self.basis] = _BASIC
        self.art_sign[:] = 1.0
        self._refactor()
        self._recompute_xB()

        low_viol = self.xB < self.slack_lb - FEAS_TOL
        up_viol = self.xB > self.slack_ub + FEAS_TOL
        bad = low_viol | up_viol
        if bad.any():
            # park each violated slack at its nearest bound and cover the
            # residual with a basic artificial of matching sign
            snap = np.where(low_viol, self.slack_lb, self.slack_ub)
            for r in np.flatnonzero(bad):
                self.vstat[ns + r] = _LOWER if low_viol[r] else _UPPER
                resid = self.xB[r] - snap[r]
                self.art_sign[r] = 1.0 if resid >= 0 else -1.0
                j = ns + m + r
                self.ubw[j] = np.inf
                self.basis[r] = j
                self.vstat[j] = _BASIC
            self._refactor()
            self._recompute_xB()
            self.cw = np.zeros(self.ntot)
            self.cw[ns + m :] = -1.0
            status = self._iterate(phase1=True)
            if status != OPTIMAL:
                raise NumericalBreakdown("phase 1 ended " + status)
            infeas = -self._objective_value()
            if infeas > FEAS_TOL * (1.0 + float(np.abs(self.b).max(initial=0.0))):
                return INFEASIBLE
            # freeze artificials for phase 2
            self.ubw[ns + m :] = 0.0
        self.cw = self.c_real.copy()
        return self._phase2()

    def _phase2(self) -> str:
        return self._iterate(phase1=False)

    # ---------------------------------------------------------------- pricing

    def _reduced_costs(self) -> np.ndarray:
        ns, m = self.ns, self.m
        y = self._btran(self.cw[self.basis])
        d = np.empty(self.ntot)
        d[:ns] = self.cw[:ns] - y @ self.A
        d[ns : ns + m] = self.cw[ns : ns + m] - y
        d[ns + m :] = self.cw[ns + m :] - self.art_sign * y
        return d

    def duals(self) -> np.ndarray:
        y = self._btran(self.cw[self.basis])
        y[self.row_neg] *= -1.0
        return y

    def _objective_value(self) -> float:
        xn = self._nonbasic_values()
        xn[self.basis] = self.xB
        return float(self.cw @ xn)

    def values(self) -> np.ndarray:
        xn = self._nonbasic_values()
        xn[self.basis] = self.xB
        return xn

    # ------------------------------------------------------------ primal loop

    def _iterate(self, phase1: bool) -> str:
        ns, m = self.ns, self.m
        stall = 0
        bland = False
        it = 0
        cap = 2000 + 60 * (m + self.ntot)
        while True:
            it += 1
            if it > cap:
                raise NumericalBreakdown("primal iteration cap hit")
            d = self._reduced_costs()
            movable = self.lbw != self.ubw
            at_low = (self.vstat == _LOWER) & movable
            at_up = (self.vstat == _UPPER) & movable
            viol = np.zeros(self.ntot)
            viol[at_low] = d[at_low]
            viol[at_up] = -d[at_up]
            np.maximum(viol, 0.0, out=viol)
            if bland:
                cand = viol > DUAL_TOL
                if not cand.any():
                    return OPTIMAL
                q = int(np.argmax(cand))
            else:
                q = int(np.argmax(viol))
                if viol[q] <= DUAL_TOL:
                    return OPTIMAL
            t = 1.0 if self.vstat[q] == _LOWER else -1.0
            w = self._binv_col(q)
            tw = t * w
            lbB = self.lbw[self.basis]
            ubB = self.ubw[self.basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                r1 = np.where(tw > PIV_TOL, (self.xB - lbB) / np.where(tw > PIV_TOL, tw, 1.0), np.inf)
                r2 = np.where(tw < -PIV_TOL, (ubB - self.xB) / np.where(tw < -PIV_TOL, -tw, 1.0), np.inf)
            ratios = np.minimum(r1, r2)
            np.maximum(ratios, 0.0, out=ratios)
            theta_basic = float(ratios.min(initial=np.inf))
            own = self.ubw[q] - self.lbw[q]
            if theta_basic == np.inf and own == np.inf:
                if phase1:
                    raise NumericalBreakdown("phase 1 unbounded")
                return UNBOUNDED
            if own <= theta_basic + RATIO_TIE:
                # bound flip, basis unchanged
                theta = own
                self.xB -= theta * tw
                self.vstat[q] = _UPPER if self.vstat[q] == _LOWER else _LOWER
                step = theta
            else:
                theta = theta_basic
                cand = np.flatnonzero(ratios <= theta + RATIO_TIE)
                if bland:
                    r = int(cand[np.argmin(self.basis[cand])])
                else:
                    order = np.lexsort((self.basis[cand], -np.abs(w[cand])))
                    r = int(cand[order[0]])
                if abs(w[r]) < PIV_TOL:
                    self._refactor()
                    self._recompute_xB()
                    continue
                p = int(self.basis[r])
                leave_low = tw[r] > 0
                xq_new = self.lbw[q] + theta if t > 0 else self.ubw[q] - theta
                self.xB -= theta * tw
                self.xB[r] = xq_new
                self.vstat[p] = _LOWER if leave_low else _UPPER
                self.vstat[q] = _BASIC
                self.basis[r] = q
                self._append_eta(r, w)
                step = theta
            self.pivots += 1
            if step <= 1e-10:
                stall += 1
                if stall > STALL_LIMIT:
                    bland = True
            else:
                stall = 0
                bland = False
            if len(self._etas) >= REFACTOR_EVERY:
                self._refactor()
                self._recompute_xB()

    # -------------------------------------------------------------- dual loop

    def solve_dual_from(
        self,
        start: Basis,
        lb_struct: Optional[np.ndarray] = None,
        ub_struct: Optional[np.ndarray] = None,
    ) -> str:
        """Re-solve after bound changes from a previously optimal basis.

        Returns OPTIMAL, INFEASIBLE, or "fallback" when the start basis is
        unusable (caller should do a cold primal solve).
        """
        ns, m = self.ns, self.m
        self._load_bounds(lb_struct, ub_struct)
        if not self._restore(start):
            return "fallback"
        self.cw = self.c_real.copy()
        self._recompute_xB()
        d = self._reduced_costs()
        movable = self.lbw != self.ubw
        bad_low = (self.vstat == _LOWER) & movable & (d > DUAL_TOL)
        bad_up = (self.vstat == _UPPER) & movable & (d < -DUAL_TOL)
        if bad_low.any() or bad_up.any():
            return "fallback"

        stall = 0
        bland = False
        it = 0
        cap = 2000 + 60 * (m + self.ntot)
        while True:
            it += 1
            if it > cap:
                return "fallback"
            lbB = self.lbw[self.basis]
            ubB = self.ubw[self.basis]
            viol_low = lbB - self.xB
            viol_up = self.xB - ubB
            viol = np.maximum(viol_low, viol_up)
            r = int(np.argmax(viol)) if not bland else int(np.argmin(np.where(viol > FEAS_TOL, self.basis, np.iinfo(np.int64).max)))
            if viol[r] <= FEAS_TOL:
                break
            below = viol_low[r] > viol_up[r]
            # tableau row r over all columns
            beta = self._btran(_unit(m, r))
            alpha = np.empty(self.ntot)
            alpha[:ns] = beta @ self.A
            alpha[ns : ns + m] = beta
            alpha[ns + m :] = beta * self.art_sign
            movable = self.lbw != self.ubw
            at_low = (self.vstat == _LOWER) & movable
            at_up = (self.vstat == _UPPER) & movable
            if below:
                elig = (at_low & (alpha < -PIV_TOL)) | (at_up & (alpha > PIV_TOL))
            else:
                elig = (at_low & (alpha > PIV_TOL)) | (at_up & (alpha < -PIV_TOL))
            idx = np.flatnonzero(elig)
            if idx.size == 0:
                return INFEASIBLE
            ratios = np.abs(d[idx] / alpha[idx])
            best = ratios.min()
            cand = idx[ratios <= best + RATIO_TIE]
            if bland:
                q = int(cand.min())
            else:
                order = np.lexsort((cand, -np.abs(alpha[cand])))
                q = int(cand[order[0]])
            w = self._binv_col(q)
            delta = (lbB[r] - self.xB[r]) if below else (ubB[r] - self.xB[r])
            # entering step: x_Br changes by -alpha_q * dx_q  => dx_q = -delta/alpha_q
            dxq = -delta / alpha[q]
            xq_new = (self.lbw[q] if self.vstat[q] == _LOWER else self.ubw[q]) + dxq
            p = int(self.basis[r])
            self.xB -= dxq * w
            self.xB[r] = xq_new
            self.vstat[p] = _LOWER if below else _UPPER
            self.vstat[q] = _BASIC
            self.basis[r] = q
            self._append_eta(r, w)
            # rank-one reduced-cost update; exactness restored by the final
            # primal verification pass below
            rho = d[q] / alpha[q]
            if rho != 0.0:
                d -= rho * alpha
            d[p] = -rho
            d[q] = 0.0
            self.pivots += 1
            if abs(dxq) <= 1e-10:
                stall += 1
                if stall > STALL_LIMIT:
                    bland = True
            else:
                stall = 0
                bland = False
            if len(self._etas) >= REFACTOR_EVERY:
                self._refactor()
                self._recompute_xB()
        # primal cleanup: exits immediately when the basis is truly optimal
        return self._iterate(phase1=False)


def _unit(m: int, r: int) -> np.ndarray:
    e = np.zeros(m)
    e[r] = 1.0
    return e


def lp_solve(lp: LinearProgram, start: Optional[Basis] = None) -> LpSolution:
    """Solve to optimality; returns primal values, row duals and reduced costs."""
    eng = SimplexEngine(lp)
    status = eng.solve_primal(start=start)
    return finish_solution(lp, eng, status)


def finish_solution(lp: LinearProgram, eng: SimplexEngine, status: str) -> LpSolution:
    if status == INFEASIBLE:
        return LpSolution(status=INFEASIBLE, objective=-np.inf)
    if status == UNBOUNDED:
        return LpSolution(status=UNBOUNDED, objective=np.inf)
    ns = eng.ns
    xfull = eng.values()
    x = xfull[:ns].copy()
    y = eng.duals()
    d = eng._reduced_costs()[:ns].copy()
    obj = float(np.asarray(lp.obj) @ x)
    return LpSolution(
        status=OPTIMAL,
        objective=obj,
        x=x,
        duals=y,
        reduced_costs=d,
        basis=eng.snapshot(),
    )

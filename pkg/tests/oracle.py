"""Independent reference implementations used to validate the package.

Everything here deliberately avoids the package's jet and einsum code paths:
expression values come from a plain recursive evaluator, derivatives from
central finite differences (h = 1e-5), and all contractions from explicit
Python loops.  The frozen ANCHORS at the bottom are regression values
recorded from the first build that agreed with this oracle.
"""

from __future__ import annotations

import math

import numpy as np

from acscheck import expr as expr_mod
from acscheck.geometry import (
    ConjugationField,
    ExplicitField,
    MetricField,
    PullbackField,
)

FD_H = 1e-5

_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "tanh": math.tanh,
}


def eval_value(node, env: dict) -> float:
    """Plain float evaluation of an expression AST."""
    if isinstance(node, expr_mod.Const):
        return float(node.value)
    if isinstance(node, expr_mod.Var):
        return float(env[node.name])
    if isinstance(node, expr_mod.Unary):
        return -eval_value(node.operand, env)
    if isinstance(node, expr_mod.Binary):
        a = eval_value(node.left, env)
        b = eval_value(node.right, env)
        if node.op == "add":
            return a + b
        if node.op == "sub":
            return a - b
        if node.op == "mul":
            return a * b
        if node.op == "div":
            return a / b
        if node.op == "pow":
            return a**b
        raise ValueError(node.op)
    if isinstance(node, expr_mod.Call):
        return _FUNCS[node.func](eval_value(node.arg, env))
    raise TypeError(node)


def field_values(field, chart, point) -> np.ndarray:
    """Matrix of field values at a point, via plain evaluation and numpy."""
    env = dict(zip(chart.var_names, point))
    n = chart.n
    if isinstance(field, (ExplicitField, MetricField)):
        entries = field.entries
        return np.array(
            [[eval_value(entries[i][j], env) for j in range(n)] for i in range(n)]
        )
    if isinstance(field, ConjugationField):
        a = np.array(
            [[eval_value(field.frame[i][j], env) for j in range(n)] for i in range(n)]
        )
        return a @ field.base @ np.linalg.inv(a)
    if isinstance(field, PullbackField):
        # Jacobian of the map by finite differences (values-only path)
        f = np.zeros((n, n))
        for j in range(n):
            ep = dict(env)
            em = dict(env)
            ep[chart.var_names[j]] = point[j] + FD_H
            em[chart.var_names[j]] = point[j] - FD_H
            for i in range(n):
                f[i, j] = (
                    eval_value(field.components[i], ep)
                    - eval_value(field.components[i], em)
                ) / (2 * FD_H)
        return np.linalg.inv(f) @ field.base @ f
    raise TypeError(field)


def fd_field_partials(field, chart, point, h: float = FD_H) -> np.ndarray:
    """Central-difference first partials of the field values: out[k, i, j]."""
    n = chart.n
    out = np.zeros((n, n, n))
    pt = np.asarray(point, dtype=float)
    for k in range(n):
        xp = pt.copy()
        xm = pt.copy()
        xp[k] += h
        xm[k] -= h
        out[k] = (field_values(field, chart, xp) - field_values(field, chart, xm)) / (
            2 * h
        )
    return out


def nijenhuis_loops(j: np.ndarray, d: np.ndarray) -> np.ndarray:
    n = j.shape[0]
    comps = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for jj in range(n):
                acc = 0.0
                for p in range(n):
                    acc += (
                        j[p, i] * d[p, k, jj]
                        - j[p, jj] * d[p, k, i]
                        - j[k, p] * d[i, p, jj]
                        + j[k, p] * d[jj, p, i]
                    )
                comps[k, i, jj] = acc
    return comps


def nijenhuis_reduced_loops(j: np.ndarray, d: np.ndarray) -> np.ndarray:
    n = j.shape[0]
    comps = np.zeros((n, n, n))
    for r in range(n):
        for i in range(n):
            for k in range(n):
                acc = 0.0
                for p in range(n):
                    acc += j[p, i] * (d[p, r, k] - d[k, r, p])
                    acc -= j[p, k] * (d[p, r, i] - d[i, r, p])
                comps[r, i, k] = acc
    return comps


def contraction_loops(comps: np.ndarray, j: np.ndarray) -> float:
    n = j.shape[0]
    total = 0.0
    for i in range(n):
        for k in range(n):
            for r in range(n):
                for s in range(n):
                    total += comps[r, i, k] * comps[s, r, i] * j[k, s]
    return total


def big_n_loops(comps: np.ndarray, j: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = j.shape[0]

    def term(a, b, c, dd):
        acc = 0.0
        for r in range(n):
            for s in range(n):
                for t in range(n):
                    acc += comps[r, a, b] * comps[s, r, c] * j[t, s] * g[t, dd]
        return acc

    out = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for dd in range(n):
                    out[a, b, c, dd] = 0.25 * (
                        term(a, b, c, dd)
                        + term(c, b, a, dd)
                        + term(a, dd, c, b)
                        + term(c, dd, a, b)
                    )
    return out


def double_trace_loops(bn: np.ndarray, g_inv: np.ndarray) -> float:
    n = g_inv.shape[0]
    total = 0.0
    for i in range(n):
        for k in range(n):
            for a in range(n):
                for b in range(n):
                    total += g_inv[i, a] * g_inv[k, b] * bn[i, k, a, b]
    return total


def obstruction_loops(j: np.ndarray, d: np.ndarray) -> float:
    n = j.shape[0]
    total = 0.0
    for i in range(n):
        for jj in range(n):
            for k in range(n):
                inner = 0.0
                for l in range(n):
                    inner += d[jj, i, l] * j[k, l] + j[i, l] * d[jj, k, l]
                total -= inner * d[i, jj, k]
    return total


def christoffel_loops(gv: np.ndarray, gp: np.ndarray) -> np.ndarray:
    n = gv.shape[0]
    ginv = np.linalg.inv(gv)
    out = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for jj in range(n):
                acc = 0.0
                for l in range(n):
                    acc += ginv[k, l] * (gp[i, jj, l] + gp[jj, i, l] - gp[l, i, jj])
                out[k, i, jj] = 0.5 * acc
    return out


def normal_transform_fd(j_field, g_field, chart, point, h: float = FD_H):
    """Re-derive the normal-coordinate change as an actual reparameterisation.

    Builds x(y) = p + A y + 1/2 quad[:,b,c] y^b y^c from finite-difference
    Christoffel symbols, then differentiates the transformed endomorphism
    F(y)^-1 J(x(y)) F(y) numerically in y.  Returns (values, partials).
    """
    pt = np.asarray(point, dtype=float)
    n = chart.n
    g0 = field_values(g_field, chart, pt)
    gp = fd_field_partials(g_field, chart, pt, h)
    lo = np.linalg.cholesky(g0)
    a = np.linalg.inv(lo).T
    gamma = christoffel_loops(g0, gp)
    quad = np.zeros((n, n, n))
    for k in range(n):
        for b in range(n):
            for c in range(n):
                acc = 0.0
                for i in range(n):
                    for jj in range(n):
                        acc += gamma[k, i, jj] * a[i, b] * a[jj, c]
                quad[k, b, c] = -acc

    def x_of(y):
        return pt + a @ y + 0.5 * np.einsum("kbc,b,c->k", quad, y, y)

    def frame_of(y):
        return a + np.einsum("kbc,c->kb", quad, y)

    def transformed(y):
        f = frame_of(y)
        return np.linalg.inv(f) @ field_values(j_field, chart, x_of(y)) @ f

    values = transformed(np.zeros(n))
    partials = np.zeros((n, n, n))
    for c in range(n):
        yp = np.zeros(n)
        ym = np.zeros(n)
        yp[c] += h
        ym[c] -= h
        partials[c] = (transformed(yp) - transformed(ym)) / (2 * h)
    return values, partials


# ---------------------------------------------------------------------------
# Frozen regression anchors, recorded from the first oracle-verified build.
# Points are dicts keyed by quantity; all scalars at the stated chart point.
# ---------------------------------------------------------------------------

ANCHORS = {
    ("expblock4", (0.0, 0.0, 0.0, 0.0)): {
        "n_max_abs": 1.0,
        "obstruction": 0.0,
        "contraction": 0.0,
        "double_trace": 0.0,
        "ledger_total": 0.0,
    },
    ("expblock4", (1.0, 0.0, 0.0, 0.0)): {
        "n_max_abs": 2.718281828459045,
        "obstruction": 0.0,
        "contraction": 0.0,
        "double_trace": 0.0,
        "ledger_total": 0.0,
    },
    ("shear4", (0.0, 0.0, 0.0, 0.0)): {
        "n_max_abs": 1.0,
        "obstruction": 0.0,
        "contraction": 0.0,
        "double_trace": 0.0,
        "ledger_total": 0.0,
    },
    ("shear4", (1.0, 0.0, 0.0, 0.0)): {
        "n_max_abs": 1.0,
        "obstruction": 0.0,
        "contraction": 0.0,
        "double_trace": 0.0,
        "ledger_total": 0.0,
    },
    ("pullback4", (0.3, -0.2, 0.5, 0.7)): {
        "n_max_abs": 0.0,
        "obstruction": 6.0,
        "contraction": 0.0,
        "double_trace": 0.0,
        "ledger_total": 0.0,
    },
}

# random conjugation field (dim 4, degree 2, seed 42) at the origin
RANDOM_CONJUGATION_ANCHOR = {
    "obstruction": -0.5638880493363554,
    "contraction": 0.0,
}

# max |contraction| of shear4 over the 5^4 grid on [-1, 1]^4
SHEAR4_GRID_MAX_CONTRACTION = 0.0

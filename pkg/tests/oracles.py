"""Independent oracles used by the tests: they never call the code paths
they check."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded


def spearman_rho(a, b) -> float:
    """Spearman rank correlation (no ties expected in our scans)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    ra = np.empty(n)
    rb = np.empty(n)
    ra[np.argsort(a)] = np.arange(n)
    rb[np.argsort(b)] = np.arange(n)
    d2 = float(((ra - rb) ** 2).sum())
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def crank_nicolson_step_potential(psi0: np.ndarray, x: np.ndarray, v0: float,
                                  m: float, tau: float, dt: float) -> np.ndarray:
    """Direct evolution under i psi_t = -psi_xx / 2m - i v0 theta(-x) psi.

    Crank-Nicolson with a second-order three-point Laplacian; the boundary
    node at x = 0 carries half the absorption (symmetric step convention).
    """
    dx = x[1] - x[0]
    nx = len(x)
    pot = np.where(x < 0, -1j * v0, 0.0).astype(complex)
    pot[np.isclose(x, 0.0)] = -1j * v0 / 2.0
    n_steps = int(round(tau / dt))
    dt = tau / n_steps
    r = 1j * dt / (4 * m * dx * dx)
    bands = np.zeros((3, nx), dtype=complex)
    bands[0, 1:] = -r
    bands[1, :] = 1 + 2 * r + 0.5j * dt * pot
    bands[2, :-1] = -r
    psi = psi0.astype(complex).copy()
    for _ in range(n_steps):
        rhs = (1 - 2 * r - 0.5j * dt * pot) * psi
        rhs[1:] += r * psi[:-1]
        rhs[:-1] += r * psi[1:]
        psi = solve_banded((1, 1), bands, rhs)
    return psi


def evolve_step_potential_richardson(psi0_fn, v0: float, m: float, tau: float,
                                     x_coarse: np.ndarray, dt: float) -> np.ndarray:
    """CN solution extrapolated over a (dx, dt) -> (dx/2, dt/2) pair; the
    scheme is second order in both, so the combination removes the leading
    error on the coarse grid."""
    nx = len(x_coarse)
    x_fine = np.linspace(x_coarse[0], x_coarse[-1], 2 * nx - 1)
    coarse = crank_nicolson_step_potential(psi0_fn(x_coarse), x_coarse, v0, m, tau, dt)
    fine = crank_nicolson_step_potential(psi0_fn(x_fine), x_fine, v0, m, tau, dt / 2)
    return (4 * fine[::2] - coarse) / 3


def free_evolution_quadrature(psi0_fn, m: float, t: float, x_out: np.ndarray,
                              x_lo: float, x_hi: float, n_nodes: int = 6000) -> np.ndarray:
    """Free evolution by direct quadrature of the propagator integral
    (oscillatory; adequate at moderate t for smooth compact initial data)."""
    y = np.linspace(x_lo, x_hi, n_nodes)
    w = np.full(n_nodes, y[1] - y[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    psi0 = psi0_fn(y)
    pref = np.sqrt(m / (2 * np.pi * t)) * np.exp(-1j * np.pi / 4)
    out = np.empty(len(x_out), dtype=complex)
    for i, xx in enumerate(x_out):
        out[i] = np.sum(w * psi0 * pref * np.exp(1j * m * (xx - y) ** 2 / (2 * t)))
    return out


def validate_table_schema(doc: dict, schema: dict) -> list[str]:
    """Minimal structural validation of a table document against the shipped
    schema (object/required/properties/array-items subset; enough to pin the
    published format without an external validator)."""
    problems: list[str] = []

    def walk(node, spec, path):
        kinds = spec.get("type")
        kinds = [kinds] if isinstance(kinds, str) else (kinds or [])
        if kinds:
            ok = any(
                (k == "object" and isinstance(node, dict))
                or (k == "array" and isinstance(node, list))
                or (k == "string" and isinstance(node, str))
                or (k == "number" and isinstance(node, (int, float)) and not isinstance(node, bool))
                for k in kinds
            )
            if not ok:
                problems.append(f"{path}: expected {kinds}, got {type(node).__name__}")
                return
        if isinstance(node, dict):
            for req in spec.get("required", []):
                if req not in node:
                    problems.append(f"{path}: missing required key {req!r}")
            props = spec.get("properties", {})
            if spec.get("additionalProperties") is False:
                for key in node:
                    if key not in props:
                        problems.append(f"{path}: unexpected key {key!r}")
            for key, sub in props.items():
                if key in node:
                    walk(node[key], sub, f"{path}.{key}")
        if isinstance(node, list):
            if "minItems" in spec and len(node) < spec["minItems"]:
                problems.append(f"{path}: fewer than {spec['minItems']} items")
            item_spec = spec.get("items")
            if item_spec:
                for i, item in enumerate(node):
                    walk(item, item_spec, f"{path}[{i}]")

    walk(doc, schema, "$")
    return problems

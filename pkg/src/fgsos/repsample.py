"""Randomized and exhaustive falsification under unitary representations.

Sampling draws Haar-random generators at a ladder of dimensions and records
the most negative eigenvalue of the evaluated polynomial.  The scalar grid
oracle sweeps all one-dimensional representations x_k -> exp(i theta_k) on a
uniform grid; it exists to mint independent ground truths at desk scale, so
it is deliberately budget-capped and built on numpy's own eigensolver rather
than the pipeline kernel.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .algebra import MatrixPolynomial
from .exceptions import BudgetExceededError, MalformedInputError
from .linalg import haar_unitary, min_eigenvalue
from .witness import FiniteRep, evaluate_rep

__all__ = ["SampleReport", "GridReport", "sample_and_test", "scalar_grid_oracle"]


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic child seed for (sample index, generator index, ...)."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1)[0])


@dataclass(frozen=True)
class SampleReport:
    min_value: float
    dims: tuple
    count: int
    seed: int
    argmin_rep: FiniteRep | None
    argmin_sample: int | None

    def to_obj(self) -> dict:
        from .algebra import encode_matrix

        obj = {
            "kind": "sample-report",
            "min_value": float(self.min_value),
            "dims": list(self.dims),
            "count": self.count,
            "seed": self.seed,
            "argmin_sample": self.argmin_sample,
        }
        if self.argmin_rep is not None:
            obj["argmin_rep"] = {
                "N": self.argmin_rep.N,
                "unitaries": [encode_matrix(u) for u in self.argmin_rep.unitaries],
            }
        return obj

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_obj(), indent=indent)


@dataclass(frozen=True)
class GridReport:
    min_value: float
    grid_points: int
    argmin_angles: tuple

    def to_obj(self) -> dict:
        return {
            "kind": "grid-report",
            "min_value": float(self.min_value),
            "grid_points": self.grid_points,
            "argmin_angles": list(self.argmin_angles),
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_obj(), indent=indent)


def sample_and_test(b: MatrixPolynomial, dims=(1, 2, 4, 8), count: int = 100,
                    seed: int = 0) -> SampleReport:
    """Min of lambda_min(rho(b)) over Haar samples cycling through ``dims``.

    Deterministic: sample k at dimension dims[k % len(dims)] uses generator
    seeds derived from (seed, k, generator index).  The witnessing
    representation is reported when the minimum is negative.
    """
    dims = tuple(int(N) for N in dims)
    if count < 1:
        raise MalformedInputError(f"sample count must be >= 1, got {count}")
    if not dims or any(N < 1 for N in dims):
        raise MalformedInputError(f"invalid dimension ladder {dims}")
    best = np.inf
    best_rep = None
    best_k = None
    for k in range(count):
        N = dims[k % len(dims)]
        unitaries = tuple(
            haar_unitary(N, derive_seed(seed, k, g)) for g in range(b.n)
        )
        rep = FiniteRep(b.n, N, unitaries)
        lam = min_eigenvalue(evaluate_rep(rep, b))
        if lam < best:
            best = lam
            best_rep = rep
            best_k = k
    return SampleReport(
        min_value=float(best),
        dims=dims,
        count=count,
        seed=seed,
        argmin_rep=best_rep if best < 0 else None,
        argmin_sample=best_k if best < 0 else None,
    )


def scalar_grid_oracle(b: MatrixPolynomial, grid_points: int,
                       max_evals: int = 2_000_000) -> GridReport:
    """Exact minimum over gridded 1-dimensional representations.

    Each generator is sent to exp(i theta_k) with theta on a uniform grid of
    ``grid_points`` angles; a word evaluates through its abelianized exponent
    vector.  Capped at n <= 3 generators, m <= 4, and ``max_evals`` grid
    nodes.
    """
    if grid_points < 2:
        raise MalformedInputError(f"need at least 2 grid points, got {grid_points}")
    n, m = b.n, b.m
    if n > 3 or m > 4:
        raise BudgetExceededError(
            f"grid oracle is capped at n <= 3, m <= 4 (got n={n}, m={m})"
        )
    nodes = grid_points ** n
    if nodes > max_evals:
        raise BudgetExceededError(
            f"{nodes} grid nodes exceed the budget of {max_evals}"
        )
    words = b.support
    exponents = np.zeros((len(words), n))
    coeffs = np.zeros((len(words), m, m), complex)
    for t, w in enumerate(words):
        for letter in w:
            exponents[t, abs(letter) - 1] += 1 if letter > 0 else -1
        coeffs[t] = b.coeff(w)

    thetas = 2.0 * np.pi * np.arange(grid_points) / grid_points
    grid = np.array(list(itertools.product(thetas, repeat=n)))  # nodes x n
    phases = np.exp(1j * grid @ exponents.T)                    # nodes x terms
    values = np.tensordot(phases, coeffs, axes=(1, 0))          # nodes x m x m
    values = (values + values.conj().transpose(0, 2, 1)) / 2
    eigs = np.linalg.eigvalsh(values)
    flat = eigs[:, 0]
    best = int(np.argmin(flat))
    return GridReport(
        min_value=float(flat[best]),
        grid_points=grid_points,
        argmin_angles=tuple(float(t) for t in grid[best]),
    )

"""Hamiltonian-extension transformers.

Each transformer adds a parameter-independent operator to a family, leaving
the parametric derivative untouched:

* flood               H(theta) + beta * dH/dtheta(theta0)    ("signal flooding")
* subtract            H(theta) - H(theta0)
* subtract_perturbed  H(theta) - H(theta0 + epsilon)
* add_operator        H(theta) + epsilon * V
* tensor_identity     H(theta) (x) 1  on an enlarged space

Added operators are captured by value at construction, so transformed
families are immune to later changes of their source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateExtremalEigenvalues, DegenerateSpectrum, DimensionMismatch
from .family import HamiltonianFamily
from .linalg import HermitianOperator, commutator, degenerate_blocks, eig_hermitian


@dataclass(frozen=True)
class Flood:
    beta: float
    theta0: float


@dataclass(frozen=True)
class Subtract:
    theta0: float


@dataclass(frozen=True)
class SubtractPerturbed:
    theta0: float
    epsilon: float


@dataclass(frozen=True, eq=False)
class AddOperator:
    operator: HermitianOperator
    epsilon: float


ExtensionSpec = Union[Flood, Subtract, SubtractPerturbed, AddOperator]


def _require_finite(**values: float):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


def _shifted_family(family: HamiltonianFamily, offset: np.ndarray) -> HamiltonianFamily:
    def value(theta: float) -> HermitianOperator:
        return HermitianOperator(family.value(theta).matrix + offset)

    return HamiltonianFamily(family.dim, value, family.derivative, family.second_derivative)


def flood(family: HamiltonianFamily, theta0: float, beta: float) -> HamiltonianFamily:
    """Add beta * dH/dtheta(theta0); large beta drives the QFI ratio to 1."""
    _require_finite(theta0=theta0, beta=beta)
    return _shifted_family(family, beta * family.derivative(theta0).matrix)


def subtract(family: HamiltonianFamily, theta0: float) -> HamiltonianFamily:
    """Subtract H(theta0); the result vanishes (and saturates) at theta0."""
    _require_finite(theta0=theta0)
    return _shifted_family(family, -family.value(theta0).matrix)


def subtract_perturbed(
    family: HamiltonianFamily, theta0: float, epsilon: float
) -> HamiltonianFamily:
    """Subtract H(theta0 + epsilon): subtraction with a miscalibrated anchor."""
    _require_finite(theta0=theta0, epsilon=epsilon)
    return _shifted_family(family, -family.value(theta0 + epsilon).matrix)


def add_operator(
    family: HamiltonianFamily, v: HermitianOperator, epsilon: float
) -> HamiltonianFamily:
    """Add epsilon * V for an arbitrary fixed Hermitian V (time-scaling engineering)."""
    _require_finite(epsilon=epsilon)
    if v.dim != family.dim:
        raise DimensionMismatch(f"operator dimension {v.dim} does not match family {family.dim}")
    return _shifted_family(family, epsilon * v.matrix)


def tensor_identity(family: HamiltonianFamily, ancilla_dim: int) -> HamiltonianFamily:
    """Extend to H(theta) (x) identity on an ancilla of the given dimension."""
    if ancilla_dim < 1:
        raise DimensionMismatch(f"ancilla dimension must be >= 1, got {ancilla_dim}")
    eye = np.eye(ancilla_dim)

    def lift(fn):
        return lambda theta: HermitianOperator(np.kron(fn(theta).matrix, eye))

    second = None if family.second_derivative is None else lift(family.second_derivative)
    return HamiltonianFamily(
        family.dim * ancilla_dim, lift(family.value), lift(family.derivative), second
    )


def apply_extension(family: HamiltonianFamily, spec: ExtensionSpec) -> HamiltonianFamily:
    if isinstance(spec, Flood):
        return flood(family, spec.theta0, spec.beta)
    if isinstance(spec, Subtract):
        return subtract(family, spec.theta0)
    if isinstance(spec, SubtractPerturbed):
        return subtract_perturbed(family, spec.theta0, spec.epsilon)
    if isinstance(spec, AddOperator):
        return add_operator(family, spec.operator, spec.epsilon)
    raise ValueError(f"unknown extension spec: {spec!r}")


def predicted_subtraction_deficit(
    family: HamiltonianFamily, theta0: float, epsilon: float, t: float
) -> float:
    """First-order prediction of the bound deviation of miscalibrated subtraction.

    Returns -i * epsilon^2 * t^3 * (e_max - e_min) * (<max|C|max> - <min|C|min>)
    with C = [d2H/dtheta2, dH/dtheta]/2 at theta0 and |max>, |min> the extremal
    eigenvectors of dH/dtheta(theta0). The diagonal of the anti-Hermitian C is
    purely imaginary, so the value is real; it approximates the measured
    deviation channel_qfi - upper_bound.

    Note: the expectation value of a commutator [B, A] in an eigenvector of A
    vanishes identically, so this first-order term is zero (up to rounding)
    for every family; the measured deviation scales as epsilon^4. The routine
    evaluates the stated expression regardless.
    """
    _require_finite(theta0=theta0, epsilon=epsilon, t=t)
    if family.second_derivative is None:
        raise ValueError("family has no second derivative")
    hdot = family.derivative(theta0)
    hddot = family.second_derivative(theta0)
    dec = eig_hermitian(hdot)
    blocks = degenerate_blocks(dec.eigenvalues)
    if len(blocks[0]) > 1 or len(blocks[-1]) > 1 or len(blocks) == 1:
        raise DegenerateExtremalEigenvalues(
            "extremal eigenvalues of the derivative are degenerate"
        )
    gamma = commutator(hddot, hdot) / 2.0
    vmax = dec.eigenvectors[:, -1]
    vmin = dec.eigenvectors[:, 0]
    gap = float(dec.eigenvalues[-1] - dec.eigenvalues[0])
    diag_diff = complex(vmax.conj() @ gamma @ vmax) - complex(vmin.conj() @ gamma @ vmin)
    return float((-1j * epsilon * epsilon * t**3 * gap * diag_diff).real)


def perturbed_eigenvalues_first_order(
    h: HermitianOperator, v: HermitianOperator, epsilon: float
) -> np.ndarray:
    """Eigenvalues of H + epsilon*V to first order: lambda_i + epsilon <i|V|i>.

    Requires a non-degenerate spectrum of H; output is ordered by ascending
    unperturbed eigenvalue.
    """
    _require_finite(epsilon=epsilon)
    if h.dim != v.dim:
        raise DimensionMismatch(f"dimensions differ: {h.dim} vs {v.dim}")
    dec = eig_hermitian(h)
    if any(len(b) > 1 for b in degenerate_blocks(dec.eigenvalues)):
        raise DegenerateSpectrum("H has degenerate eigenvalues")
    shifts = np.einsum("ik,ij,jk->k", dec.eigenvectors.conj(), v.matrix, dec.eigenvectors).real
    return dec.eigenvalues + epsilon * shifts

"""Two-qubit X-states: construction, validation, sampling and JSON I/O.

Basis ordering is ``|00>, |01>, |10>, |11>`` so that an X-state has the
layout::

    [[r11,        0,          0,          r14],
     [0,          r22,        r23,        0  ],
     [0,          conj(r23),  r33,        0  ],
     [conj(r14),  0,          0,          r44]]
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NegativeEigenvalue, NotXShaped, TraceViolation
from .numerics import DEFAULT_TOL, Tolerance, as_matrix, check_hermitian

__all__ = [
    "XState",
    "StateSpectrum",
    "FamilyPoint",
    "validate",
    "is_valid",
    "to_matrix",
    "from_matrix",
    "rho1_family",
    "werner",
    "bell_phi_plus",
    "maximally_mixed",
    "random_x_state",
    "sample_x_states",
    "state_to_dict",
    "state_from_dict",
    "load_state",
    "dump_state",
]

_OFF_X = [(i, j) for i in range(4) for j in range(4) if i != j and i + j != 3]

RHO1_DIAGONAL = (0.35, 0.25, 0.25, 0.15)


@dataclass(frozen=True)
class XState:
    """Seven-parameter two-qubit X-state (four populations, two coherences)."""

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex = 0j
    rho23: complex = 0j

    def __post_init__(self):
        for name in ("rho11", "rho22", "rho33", "rho44"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("rho14", "rho23"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        values = (self.rho11, self.rho22, self.rho33, self.rho44, self.rho14, self.rho23)
        if not all(math.isfinite(abs(v)) for v in values):
            raise ValueError("XState parameters must be finite")

    @property
    def diagonal(self) -> tuple[float, float, float, float]:
        return (self.rho11, self.rho22, self.rho33, self.rho44)

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    def with_phases(self, phi14: float, phi23: float) -> XState:
        """Same populations and coherence magnitudes, coherences rotated by the given phases."""
        return XState(
            self.rho11,
            self.rho22,
            self.rho33,
            self.rho44,
            self.rho14 * complex(math.cos(phi14), math.sin(phi14)),
            self.rho23 * complex(math.cos(phi23), math.sin(phi23)),
        )

    def flip_b(self) -> XState:
        """Apply a bit flip on qubit B: swaps 1<->2, 3<->4 and exchanges the two coherences.

        This local unitary maps states whose first partially transposed
        eigenvalue is negative onto states whose third one is.
        """
        return XState(self.rho22, self.rho11, self.rho44, self.rho33, self.rho23, self.rho14)


class StateSpectrum(NamedTuple):
    """Eigenvalues of the state itself, grouped as (outer -, outer +, inner -, inner +)."""

    eigenvalues: tuple[float, float, float, float]

    @property
    def minimum(self) -> float:
        return min(self.eigenvalues)


class FamilyPoint(NamedTuple):
    x: float
    y: float


def _pair(a: float, b: float, c: float) -> tuple[float, float]:
    """Eigenvalues of the 2x2 Hermitian block [[a, z], [z*, b]] with |z| = c."""
    mean = 0.5 * (a + b)
    radius = math.hypot(0.5 * (a - b), c)
    return mean - radius, mean + radius


def state_spectrum(s: XState) -> StateSpectrum:
    outer = _pair(s.rho11, s.rho44, abs(s.rho14))
    inner = _pair(s.rho22, s.rho33, abs(s.rho23))
    return StateSpectrum(outer + inner)


def validate(s: XState, tol: Tolerance = DEFAULT_TOL) -> StateSpectrum:
    """Check unit trace and positivity and return the state's own spectrum.

    Eigenvalues in ``(-tol.eps_psd, 0)`` are accepted; such states sit on the
    boundary of the physical region.
    """
    if abs(s.trace - 1.0) > tol.eps_herm:
        raise TraceViolation(f"trace is {s.trace!r}, expected 1 within {tol.eps_herm:.1e}")
    spectrum = state_spectrum(s)
    lowest = spectrum.minimum
    if lowest < -tol.eps_psd:
        raise NegativeEigenvalue(f"state has negative eigenvalue {lowest:.6e}", lowest)
    return spectrum


def is_valid(s: XState, tol: Tolerance = DEFAULT_TOL) -> bool:
    try:
        validate(s, tol)
    except (TraceViolation, NegativeEigenvalue):
        return False
    return True


def to_matrix(s: XState) -> np.ndarray:
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0], m[1, 1], m[2, 2], m[3, 3] = s.diagonal
    m[0, 3] = s.rho14
    m[3, 0] = s.rho14.conjugate()
    m[1, 2] = s.rho23
    m[2, 1] = s.rho23.conjugate()
    return m


def from_matrix(m, tol: Tolerance = DEFAULT_TOL) -> XState:
    """Extract the seven X-state parameters from a Hermitian unit-trace 4x4 matrix."""
    a = as_matrix(m)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {a.shape}")
    check_hermitian(a, tol)
    trace = float(np.trace(a).real)
    if abs(trace - 1.0) > tol.eps_herm:
        raise TraceViolation(f"trace is {trace!r}, expected 1 within {tol.eps_herm:.1e}")
    bad = [(i + 1, j + 1) for i, j in _OFF_X if abs(a[i, j]) > tol.eps_herm]
    if bad:
        raise NotXShaped(f"non-zero entries outside the X pattern at {bad}", bad)
    return XState(
        a[0, 0].real, a[1, 1].real, a[2, 2].real, a[3, 3].real, complex(a[0, 3]), complex(a[1, 2])
    )


def rho1_family(x: float, y: float) -> XState:
    """The two-parameter family with populations (0.35, 0.25, 0.25, 0.15) and real coherences x, y.

    Construction never fails; use :func:`validate` to check physicality.
    """
    return XState(*RHO1_DIAGONAL, rho14=x, rho23=y)


def werner(p: float) -> XState:
    """Mixture ``p |Phi+><Phi+| + (1 - p) I/4``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Werner weight must lie in [0, 1], got {p!r}")
    return XState((1 + p) / 4, (1 - p) / 4, (1 - p) / 4, (1 + p) / 4, rho14=p / 2)


def bell_phi_plus() -> XState:
    return XState(0.5, 0.0, 0.0, 0.5, rho14=0.5)


def maximally_mixed() -> XState:
    return XState(0.25, 0.25, 0.25, 0.25)


def _assemble(diag, u, phases) -> XState:
    r11, r22, r33, r44 = (float(v) for v in diag)
    mag14 = float(u[0]) * math.sqrt(r11 * r44)
    mag23 = float(u[1]) * math.sqrt(r22 * r33)
    return XState(
        r11,
        r22,
        r33,
        r44,
        rho14=mag14 * complex(math.cos(phases[0]), math.sin(phases[0])),
        rho23=mag23 * complex(math.cos(phases[1]), math.sin(phases[1])),
    )


def random_x_state(seed, *, u1: float | None = None, u2: float | None = None) -> XState:
    """Draw one valid X-state.

    Populations are uniform on the simplex, coherence magnitudes are a
    uniform fraction of their positivity bound ``sqrt(r11 r44)`` and
    ``sqrt(r22 r33)``, and phases are uniform. ``u1`` / ``u2`` pin those
    fractions. ``seed`` is an int or a :class:`numpy.random.Generator`.
    """
    rng = np.random.default_rng(seed)
    diag = rng.dirichlet(np.ones(4))
    u = rng.uniform(0.0, 1.0, size=2)
    phases = rng.uniform(0.0, 2 * np.pi, size=2)
    if u1 is not None:
        u[0] = u1
    if u2 is not None:
        u[1] = u2
    return _assemble(diag, u, phases)


def sample_x_states(n: int, seed: int) -> list[XState]:
    """``n`` valid X-states from one seeded stream; identical for identical ``(n, seed)``."""
    rng = np.random.default_rng(seed)
    diag = rng.dirichlet(np.ones(4), size=n)
    u = rng.uniform(0.0, 1.0, size=(n, 2))
    phases = rng.uniform(0.0, 2 * np.pi, size=(n, 2))
    return [_assemble(diag[k], u[k], phases[k]) for k in range(n)]


def _complex_to_json(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    return complex(float(obj["re"]), float(obj.get("im", 0.0)))


def state_to_dict(state, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Serialise an :class:`XState` or a 4x4 matrix; X-shaped matrices are written in X-form."""
    if not isinstance(state, XState):
        try:
            state = from_matrix(state, tol)
        except NotXShaped:
            a = as_matrix(state)
            return {"matrix": [[_complex_to_json(complex(v)) for v in row] for row in a]}
    return {
        "diag": list(state.diagonal),
        "rho14": _complex_to_json(state.rho14),
        "rho23": _complex_to_json(state.rho23),
    }


def state_from_dict(obj: dict, tol: Tolerance = DEFAULT_TOL) -> XState:
    """Parse either the X-form or the ``"matrix"`` form.

    Raises :class:`KeyError` / :class:`TypeError` / :class:`ValueError` on
    malformed documents, and the usual domain errors (e.g.
    :class:`NotXShaped`) for well-formed matrices that are not X-states.
    """
    if "diag" in obj:
        diag = [float(v) for v in obj["diag"]]
        if len(diag) != 4:
            raise ValueError("'diag' must hold four numbers")
        return XState(
            *diag,
            rho14=_complex_from_json(obj.get("rho14", 0.0)),
            rho23=_complex_from_json(obj.get("rho23", 0.0)),
        )
    if "matrix" in obj:
        rows = obj["matrix"]
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ValueError("'matrix' must be a 4x4 array")
        m = np.array([[_complex_from_json(v) for v in row] for row in rows], dtype=np.complex128)
        return from_matrix(m, tol)
    raise KeyError("state document needs a 'diag' or a 'matrix' field")


def load_state(path, tol: Tolerance = DEFAULT_TOL) -> XState:
    return state_from_dict(json.loads(Path(path).read_text(encoding="utf-8")), tol)


def dump_state(state, path, tol: Tolerance = DEFAULT_TOL) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state, tol), indent=2) + "\n", encoding="utf-8")

"""
A module that builds the two-qubit joint measurements used in the networks: the Bell-State
Measurement (BSM) and the Elegant Joint Measurement (EJM) constructed on the tetrahedron.
"""
import math
from dataclasses import dataclass, field
from typing import List, Tuple
import numpy as np
from jmnet._defaults import ROUND_TRIP_TOL, DEFAULT_CONVENTION
from jmnet._helpers import debug
from jmnet.quantum import (Ket, Operator, BlochVector, tensor, singlet, ket_from_bloch, antipodal_ket,
                           partial_trace, bloch_vector, orthonormality_deviation, check_convention,
                           correlation_tensor, pauli_matrices, FIRST, SECOND)
from jmnet.exceptions import JMNetValidationError, JMNetIntegrityError, JMNetUsageError

BSM = "BSM"
EJM = "EJM"
CUSTOM = "custom"
LABELS = (BSM, EJM, CUSTOM)

BELL_NAMES = ("phi+", "phi-", "psi+", "psi-")

SQRT3 = math.sqrt(3)

#: Schmidt coefficients shared by the four EJM states.
EJM_SCHMIDT = ((SQRT3 + 1) / (2 * math.sqrt(2)), (SQRT3 - 1) / (2 * math.sqrt(2)))

#: Schmidt coefficients of a maximally entangled state.
BELL_SCHMIDT = (1 / math.sqrt(2), 1 / math.sqrt(2))

#: Length of the single-qubit Bloch vectors of the EJM states, ``a^2 - b^2`` for the Schmidt pair above.
PARTIAL_BLOCH_LENGTH = SQRT3 / 2

#: Permutation of the tetrahedron produced by the printed qubit formula (a rotation by pi about x).
PAPER_LITERAL_PERMUTATION = (2, 1, 4, 3)


@dataclass(frozen=True)
class Tetrahedron:
    """The four unit vectors ``m_1 .. m_4`` at the vertices of a regular tetrahedron."""
    vertices: Tuple[BlochVector, ...]

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, index):
        return self.vertices[index]

    def max_dot_deviation(self):
        """Largest deviation of the pairwise dot products from ``-1/3``."""
        deviations = [abs(a.dot(b) + 1 / 3) for i, a in enumerate(self.vertices) for b in self.vertices[i + 1:]]
        return max(deviations)

    def centroid(self):
        return BlochVector.from_array(sum(vertex.as_array() for vertex in self.vertices) / len(self.vertices))

    def index_of(self, direction, tol=ROUND_TRIP_TOL):
        """Returns the 1-based label of the vertex parallel to ``direction``, or ``None``."""
        direction = np.asarray(direction.as_array() if isinstance(direction, BlochVector) else direction)
        norm = np.linalg.norm(direction)
        if norm == 0:
            return None
        for label, vertex in enumerate(self.vertices, start=1):
            if np.allclose(direction / norm, vertex.as_array(), rtol=0, atol=tol):
                return label
        return None


@dataclass(frozen=True)
class JointBasis:
    """
    An ordered set of four two-qubit kets used as a joint measurement.

    Outcomes are labeled ``1..4`` in the order of ``kets``. The constructor only checks the
    shape; orthonormality is checked by `validate_basis` and by the functions that use the
    basis for Born probabilities.

    Attributes
    ----------
    label: str
        One of ``"BSM"``, ``"EJM"`` or ``"custom"``.

    kets: tuple(Ket)

    outcome_labels: tuple(int)

    convention: str or None
        The single-qubit convention an EJM was built with.

    names: tuple(str) or None
        Human readable names of the outcomes.

    """
    label: str
    kets: Tuple[Ket, ...]
    outcome_labels: Tuple[int, ...] = (1, 2, 3, 4)
    convention: str = None
    names: Tuple[str, ...] = None

    def __post_init__(self):
        object.__setattr__(self, "kets", tuple(self.kets))
        if self.label not in LABELS:
            raise JMNetUsageError(f"Unknown basis label '{self.label}'. Use one of {LABELS}.")
        if len(self.kets) != 4 or any(ket.dim != 4 for ket in self.kets):
            raise JMNetValidationError("A joint basis needs four two-qubit kets.")
        if len(self.outcome_labels) != len(self.kets):
            raise JMNetValidationError("There must be one outcome label per ket.")

    def __len__(self):
        return len(self.kets)

    def __iter__(self):
        return iter(self.kets)

    @classmethod
    def custom(cls, kets, names=None):
        """Wraps four arbitrary two-qubit kets (they are not required to be orthonormal)."""
        return cls(CUSTOM, tuple(kets), names=names)

    def projectors(self):
        """Returns the array of projectors, shape ``(4, 4, 4)``."""
        return np.array([np.outer(ket.amplitudes, ket.amplitudes.conj()) for ket in self.kets])

    def describe(self):
        return {"label": self.label, "convention": self.convention,
                "outcomes": list(self.names) if self.names else list(self.outcome_labels)}


def bell_basis():
    """
    Returns the Bell-State Measurement basis ``(phi+, phi-, psi+, psi-)``.

    Examples
    --------

    >>> bell_basis().names
    ('phi+', 'phi-', 'psi+', 'psi-')

    """
    kets = (Ket([1, 0, 0, 1], normalize=True),
            Ket([1, 0, 0, -1], normalize=True),
            Ket([0, 1, 1, 0], normalize=True),
            Ket([0, 1, -1, 0], normalize=True))
    return JointBasis(BSM, kets, names=BELL_NAMES)


def tetrahedron():
    """Returns the vertices ``(1,1,1)``, ``(1,-1,-1)``, ``(-1,1,-1)``, ``(-1,-1,1)`` divided by ``sqrt(3)``."""
    signs = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
    return Tetrahedron(tuple(BlochVector(*(s / SQRT3 for s in sign)) for sign in signs))


def ejm_basis(convention=DEFAULT_CONVENTION):
    """
    Builds the Elegant Joint Measurement.

    Each state is ``sqrt(3/2)|m_j,-m_j> + i (sqrt(3)-1)/2 |psi^->``, where the product ket is
    rephased so that ``<m_j,-m_j|psi^-> = i/sqrt(2)``. Under ``"paper_literal"`` the printed
    qubit formula already has this phase.

    Parameters
    ----------
    convention: str, default = "invariant_first"
        The single-qubit convention, see `jmnet.quantum.ket_from_bloch`.

    Returns
    -------
    JointBasis

    """
    check_convention(convention)
    psi = singlet()
    target_overlap = 1j / math.sqrt(2)
    kets = []
    for m in tetrahedron():
        product = tensor(ket_from_bloch(m, convention), antipodal_ket(m, convention))
        overlap = product.inner(psi)
        product = product.with_phase(np.conj(target_overlap / overlap))
        kets.append(Ket(math.sqrt(1.5) * product.amplitudes + 1j * (SQRT3 - 1) / 2 * psi.amplitudes))
    deviation = orthonormality_deviation(kets)
    if deviation > ROUND_TRIP_TOL:
        raise JMNetIntegrityError(f"The EJM built with convention '{convention}' is not orthonormal "
                                  f"(deviation {deviation:.3e}).")
    debug(f"EJM built with convention '{convention}', orthonormality deviation {deviation:.3e}")
    return JointBasis(EJM, tuple(kets), convention=convention,
                      names=tuple(f"Phi{j}" for j in range(1, 5)))


def schmidt_coefficients(ket):
    """
    Returns the Schmidt coefficients of a two-qubit ket in descending order.

    Parameters
    ----------
    ket: Ket

    Returns
    -------
    tuple(float, float)

    """
    if ket.dim != 4:
        raise JMNetUsageError(f"schmidt_coefficients() needs a two-qubit ket, got dimension {ket.dim}.")
    values = np.linalg.svd(ket.amplitudes.reshape(2, 2), compute_uv=False)
    return float(values[0]), float(values[1])


def partial_blochs(ket):
    """Returns the Bloch vectors of the two single-qubit reduced states of a two-qubit ket."""
    rho = ket.projector()
    return bloch_vector(partial_trace(rho, FIRST)), bloch_vector(partial_trace(rho, SECOND))


def ejm_partial_blochs(basis):
    """
    Returns ``(<Phi_j|sigma (x) 1|Phi_j>, <Phi_j|1 (x) sigma|Phi_j>)`` for the four EJM states.

    Both members of a pair have length ``sqrt(3)/2`` and are antipodal. Under
    ``"invariant_first"`` the first member of pair ``j`` points along ``m_j``.
    """
    if basis.label != EJM:
        raise JMNetUsageError(f"ejm_partial_blochs() needs an EJM basis, got '{basis.label}'.")
    return [partial_blochs(ket) for ket in basis.kets]


def tetrahedron_permutation(basis):
    """
    Returns, for each outcome, the label of the vertex its first partial Bloch vector points to.

    ``(1, 2, 3, 4)`` under ``"invariant_first"``; `PAPER_LITERAL_PERMUTATION` under ``"paper_literal"``.
    """
    vertices = tetrahedron()
    return tuple(vertices.index_of(first) for first, _ in ejm_partial_blochs(basis))


def ejm_projector_expansion(m):
    """
    The projector onto the EJM state attached to direction ``m``, written in the Pauli basis::

        1/4 (1 + sqrt(3)/2 (m.sigma (x) 1 - 1 (x) m.sigma)
             - 3/2 sum_nk m_n m_k sigma_n (x) sigma_k + 1/2 sigma . sigma)

    It equals the outer product of `ejm_basis` kets under ``"invariant_first"``.
    """
    m = m.as_array() if isinstance(m, BlochVector) else np.asarray(m, dtype=float)
    sigmas = [sigma.entries for sigma in pauli_matrices()]
    one = np.eye(2)
    m_sigma = sum(component * sigma for component, sigma in zip(m, sigmas))
    quadratic = sum(m[n] * m[k] * np.kron(sigmas[n], sigmas[k]) for n in range(3) for k in range(3))
    swap_term = sum(np.kron(sigma, sigma) for sigma in sigmas)
    entries = (np.eye(4) + SQRT3 / 2 * (np.kron(m_sigma, one) - np.kron(one, m_sigma))
               - 1.5 * quadratic + 0.5 * swap_term) / 4
    return Operator(entries)


def bell_correlations(basis):
    """Returns the array ``t[k, n] = <k|sigma_n (x) sigma_n|k>`` of shape ``(4, 3)``."""
    return np.array([np.diag(correlation_tensor(ket.projector())) for ket in basis.kets])


def bell_bits(basis):
    """
    Returns the two-bit decomposition of each outcome of a Bell-type basis.

    Column 0 is the ``sigma_z (x) sigma_z`` eigenvalue and column 1 the ``sigma_x (x) sigma_x``
    eigenvalue, both as ``+1``/``-1``.

    Raises
    ------
    JMNetUsageError
        If some basis state is not an eigenstate of both observables.

    """
    correlations = bell_correlations(basis)[:, [2, 0]]
    if np.max(np.abs(np.abs(correlations) - 1)) > ROUND_TRIP_TOL:
        raise JMNetUsageError(f"The '{basis.label}' basis has no two-bit decomposition: its states are not "
                              f"eigenstates of sigma_z(x)sigma_z and sigma_x(x)sigma_x.")
    return np.sign(correlations).astype(int)


def spin_measurement(direction):
    """
    Returns the two projectors ``(1 +- d.sigma)/2`` of a spin measurement along ``direction``.

    Outcome 0 is the ``+1`` result and outcome 1 the ``-1`` result.
    """
    d = direction.as_array() if isinstance(direction, BlochVector) else np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if abs(norm - 1) > ROUND_TRIP_TOL:
        raise JMNetValidationError(f"A measurement direction must be a unit vector, got norm {norm!r}.")
    d_sigma = sum(component * sigma.entries for component, sigma in zip(d, pauli_matrices()))
    return np.array([(np.eye(2) + d_sigma) / 2, (np.eye(2) - d_sigma) / 2])


@dataclass
class BasisReport:
    """The result of `validate_basis`."""
    label: str
    orthonormality_deviation: float
    completeness_deviation: float
    schmidt: List[Tuple[float, float]]
    partial_bloch_norms: List[Tuple[float, float]]
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {"label": self.label,
                "orthonormality_deviation": self.orthonormality_deviation,
                "completeness_deviation": self.completeness_deviation,
                "schmidt": [list(pair) for pair in self.schmidt],
                "partial_bloch_norms": [list(pair) for pair in self.partial_bloch_norms],
                "failures": list(self.failures),
                "passed": self.passed}


def validate_basis(basis, tol=ROUND_TRIP_TOL):
    """
    Checks a joint basis against the properties its label promises.

    Every basis must be orthonormal and complete. A BSM must also have maximally entangled
    states with maximally mixed partial states; an EJM must have the Schmidt coefficients
    `EJM_SCHMIDT`, antipodal partial Bloch vectors of length `PARTIAL_BLOCH_LENGTH`, and
    first partial Bloch vectors pointing to the four vertices of the tetrahedron.

    Parameters
    ----------
    basis: JointBasis

    tol: float, default = 1e-10

    Returns
    -------
    BasisReport
        Failures are reported in the ``failures`` list rather than raised.

    """
    failures = []
    deviation = orthonormality_deviation(basis.kets)
    if deviation > tol:
        failures.append(f"orthonormality deviation {deviation:.3e} exceeds {tol:.0e}")
    completeness = float(np.max(np.abs(basis.projectors().sum(axis=0) - np.eye(4))))
    if completeness > tol:
        failures.append(f"completeness deviation {completeness:.3e} exceeds {tol:.0e}")

    schmidt = [schmidt_coefficients(ket) for ket in basis.kets]
    blochs = [partial_blochs(ket) for ket in basis.kets]
    norms = [(first.norm, second.norm) for first, second in blochs]

    expected = {BSM: (BELL_SCHMIDT, 0.0), EJM: (EJM_SCHMIDT, PARTIAL_BLOCH_LENGTH)}.get(basis.label)
    if expected is not None:
        expected_schmidt, expected_length = expected
        for label, pair, norm_pair in zip(basis.outcome_labels, schmidt, norms):
            if not np.allclose(pair, expected_schmidt, rtol=0, atol=tol):
                failures.append(f"outcome {label}: Schmidt coefficients {pair} differ from {expected_schmidt}")
            if not np.allclose(norm_pair, expected_length, rtol=0, atol=tol):
                failures.append(f"outcome {label}: partial Bloch lengths {norm_pair} differ from {expected_length}")
    if basis.label == EJM:
        for label, (first, second) in zip(basis.outcome_labels, blochs):
            if not (first + second).is_close(BlochVector(0, 0, 0), tol):
                failures.append(f"outcome {label}: partial Bloch vectors are not antipodal")
        directions = tetrahedron_permutation(basis)
        if sorted(d for d in directions if d is not None) != [1, 2, 3, 4]:
            failures.append(f"partial Bloch directions {directions} are not the tetrahedron vertices")
    return BasisReport(basis.label, deviation, completeness, schmidt, norms, failures)

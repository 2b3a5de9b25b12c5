"""
A module that does the linear algebra of a few qubits: kets, operators, tensor products,
partial traces and the Bloch sphere.

Every object in this module is immutable. When several qubits are combined, the left
tensor factor is qubit 0 and is the most significant index of the amplitude vector.
"""
import math
from dataclasses import dataclass
from functools import reduce
import numpy as np
from jmnet._defaults import EXACT_TOL, ROUND_TRIP_TOL, EIGENVALUE_FLOOR, UNIT_TOL, DEFAULT_CONVENTION
from jmnet.exceptions import (JMNetValidationError, JMNetKindMismatchError, JMNetRangeError,
                              JMNetUsageError)

FIRST = 0
SECOND = 1
CONVENTIONS = ("invariant_first", "paper_literal")

_PAULIS = np.array([[[0, 1], [1, 0]],
                    [[0, -1j], [1j, 0]],
                    [[1, 0], [0, -1]]], dtype=complex)
_PAULIS.setflags(write=False)


def _is_power_of_two(n):
    return n >= 2 and (n & (n - 1)) == 0


def _read_only(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def check_convention(convention):
    """Raises `JMNetUsageError` if ``convention`` is not one of `CONVENTIONS`."""
    if convention not in CONVENTIONS:
        raise JMNetUsageError(f"Unknown convention '{convention}'. Use one of {CONVENTIONS}.")
    return convention


@dataclass(frozen=True)
class BlochVector:
    """
    A real 3-vector on (or inside) the Bloch sphere.

    Pure single-qubit states have unit Bloch vectors. The cylindrical coordinates used
    to write qubit states are ``eta`` (the z component) and ``phi`` (the azimuth in
    ``[0, 2*pi)``).

    Examples
    --------

    >>> m = BlochVector.from_cylindrical(0.0, 0.0)
    >>> m
    BlochVector(x=1.0, y=0.0, z=0.0)
    >>> round(m.norm, 12)
    1.0

    """
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=float).ravel()
        if values.shape != (3,):
            raise JMNetValidationError(f"A Bloch vector needs 3 components, got {values.shape[0]}.")
        return cls(*values)

    @classmethod
    def from_cylindrical(cls, eta, phi):
        """
        Creates a unit vector from its z component ``eta`` and azimuth ``phi``.

        Parameters
        ----------
        eta: float
            Must be in ``[-1, 1]``.

        phi: float

        Returns
        -------
        BlochVector

        """
        if not -1.0 <= eta <= 1.0:
            raise JMNetRangeError(f"eta must be in [-1, 1], got {eta}.")
        radius = math.sqrt(1.0 - eta ** 2)
        return cls(radius * math.cos(phi), radius * math.sin(phi), eta)

    @property
    def eta(self):
        return self.z

    @property
    def phi(self):
        return math.atan2(self.y, self.x) % (2 * math.pi)

    @property
    def norm(self):
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    def dot(self, other):
        return self.x * other.x + self.y * other.y + self.z * other.z

    def scaled(self, factor):
        return BlochVector(factor * self.x, factor * self.y, factor * self.z)

    def is_close(self, other, tol=ROUND_TRIP_TOL):
        return bool(np.allclose(self.as_array(), _as_bloch(other).as_array(), rtol=0, atol=tol))

    def __neg__(self):
        return BlochVector(-self.x, -self.y, -self.z)

    def __add__(self, other):
        return BlochVector(self.x + other.x, self.y + other.y, self.z + other.z)


def _as_bloch(m):
    if isinstance(m, BlochVector):
        return m
    return BlochVector.from_array(m)


class Ket:
    """
    A normalized amplitude vector of one or more qubits.

    Examples
    --------

    >>> Ket([1, 0]).n_qubits
    1
    >>> Ket([1, 1], normalize=True).amplitudes.round(6)
    array([0.707107+0.j, 0.707107+0.j])

    """

    def __init__(self, amplitudes, normalize=False):
        """
        Parameters
        ----------
        amplitudes: Sequence[complex]
            The amplitudes in the computational basis. The length must be a power of two.

        normalize: bool, default = False
            If ``True``, the amplitudes are divided by their norm. Otherwise the norm must
            already be 1 within ``1e-12``.

        """
        amplitudes = np.array(amplitudes, dtype=complex).ravel()
        if not _is_power_of_two(len(amplitudes)):
            raise JMNetValidationError(f"A ket needs 2^n amplitudes, got {len(amplitudes)}.")
        norm = np.linalg.norm(amplitudes)
        if normalize:
            if norm == 0:
                raise JMNetValidationError("Cannot normalize the zero vector.")
            amplitudes = amplitudes / norm
        elif abs(norm - 1) > EXACT_TOL:
            raise JMNetValidationError(f"A ket must have norm 1, got {norm!r}.")
        self._amplitudes = _read_only(amplitudes)

    def __repr__(self):
        return f"Ket({np.array2string(self._amplitudes, precision=6, separator=', ')})"

    @property
    def amplitudes(self):
        return self._amplitudes

    @property
    def dim(self):
        return len(self._amplitudes)

    @property
    def n_qubits(self):
        return self.dim.bit_length() - 1

    def inner(self, other):
        """Returns ``<self|other>``."""
        if other.dim != self.dim:
            raise JMNetValidationError(f"Cannot take the overlap of kets of dimensions {self.dim} and {other.dim}.")
        return complex(np.vdot(self._amplitudes, other.amplitudes))

    def projector(self):
        """Returns ``|self><self|`` as a density `Operator`."""
        return Operator(np.outer(self._amplitudes, self._amplitudes.conj()), density=True)

    def with_phase(self, phase):
        """Returns the same ket multiplied by the unit-modulus number ``phase``."""
        return Ket(self._amplitudes * phase)

    def is_close(self, other, tol=ROUND_TRIP_TOL):
        return bool(np.allclose(self._amplitudes, other.amplitudes, rtol=0, atol=tol))


class Operator:
    """
    A square complex matrix acting on one or more qubits.

    If ``density`` is ``True``, the matrix is checked to be a valid density matrix:
    Hermitian and of unit trace within ``1e-12``, and with no eigenvalue below ``-1e-10``.
    """

    def __init__(self, entries, density=False):
        entries = np.array(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise JMNetValidationError(f"An operator must be a square matrix, got shape {entries.shape}.")
        if not _is_power_of_two(entries.shape[0]):
            raise JMNetValidationError(f"An operator must have dimension 2^n, got {entries.shape[0]}.")
        self._entries = _read_only(entries)
        self.density = bool(density)
        if self.density:
            self.check_density()

    def __repr__(self):
        kind = "density " if self.density else ""
        return f"Operator({kind}{self.dim}x{self.dim})"

    @property
    def entries(self):
        return self._entries

    @property
    def dim(self):
        return self._entries.shape[0]

    @property
    def n_qubits(self):
        return self.dim.bit_length() - 1

    def density_problems(self, tol=EXACT_TOL):
        """Returns a list of the reasons why the operator is not a density matrix (empty if it is one)."""
        problems = []
        hermiticity = np.max(np.abs(self._entries - self._entries.conj().T))
        if hermiticity > tol:
            problems.append(f"not Hermitian (deviation {hermiticity:.3e})")
            return problems
        trace = np.trace(self._entries)
        if abs(trace - 1) > tol:
            problems.append(f"trace is {trace.real:.15g}, not 1")
        lowest = np.linalg.eigvalsh(self._entries).min()
        if lowest < EIGENVALUE_FLOOR:
            problems.append(f"negative eigenvalue {lowest:.3e}")
        return problems

    def is_density(self, tol=EXACT_TOL):
        return not self.density_problems(tol)

    def check_density(self, tol=EXACT_TOL):
        problems = self.density_problems(tol)
        if problems:
            raise JMNetValidationError(f"Invalid density matrix: {', '.join(problems)}.")

    def as_density(self):
        """Returns the same matrix flagged (and validated) as a density matrix."""
        return self if self.density else Operator(self._entries, density=True)

    def expectation(self, observable):
        """Returns ``tr(self @ observable)``; real for Hermitian arguments."""
        observable = observable.entries if isinstance(observable, Operator) else np.asarray(observable)
        return complex(np.trace(self._entries @ observable))

    def apply(self, ket):
        """Returns the (unnormalized) amplitude array of ``self |ket>``."""
        return self._entries @ ket.amplitudes

    def eigenvalues(self):
        if self.density:
            return np.linalg.eigvalsh(self._entries)
        return np.linalg.eigvals(self._entries)

    def is_close(self, other, tol=EXACT_TOL):
        other = other.entries if isinstance(other, Operator) else np.asarray(other)
        return bool(np.allclose(self._entries, other, rtol=0, atol=tol))


KET_0 = Ket([1, 0])
KET_1 = Ket([0, 1])


def identity(n_qubits=1):
    return Operator(np.eye(2 ** n_qubits))


def pauli_matrices():
    """Returns ``(sigma_x, sigma_y, sigma_z)`` as `Operator` objects."""
    return tuple(Operator(sigma) for sigma in _PAULIS)


def singlet():
    """Returns the singlet ``|psi^->  = (|01> - |10>)/sqrt(2)``."""
    return Ket([0, 1, -1, 0], normalize=True)


def tensor(a, b, *more):
    """
    Kronecker product of kets or of operators.

    The left argument becomes the most significant subsystem.

    Parameters
    ----------
    a: Ket or Operator

    b: Ket or Operator
        Must be of the same kind as ``a``.

    more
        Further factors, multiplied from the right.

    Returns
    -------
    Ket or Operator

    Examples
    --------

    >>> tensor(KET_0, KET_1).amplitudes.real
    array([0., 1., 0., 0.])

    """
    factors = (a, b) + more
    if all(isinstance(factor, Ket) for factor in factors):
        return Ket(reduce(np.kron, [factor.amplitudes for factor in factors]))
    if all(isinstance(factor, Operator) for factor in factors):
        density = all(factor.density for factor in factors)
        return Operator(reduce(np.kron, [factor.entries for factor in factors]), density=density)
    kinds = ", ".join(type(factor).__name__ for factor in factors)
    raise JMNetKindMismatchError(f"tensor() needs factors of one kind, got {kinds}.")


def _qubit_list(keep, n_qubits):
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    keep = sorted(set(int(q) for q in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n_qubits:
        raise JMNetUsageError(f"Qubits {keep} are not a valid selection of {n_qubits} qubits.")
    return keep


def partial_trace(rho, keep):
    """
    Traces out every qubit of ``rho`` except those listed in ``keep``.

    Parameters
    ----------
    rho: Operator
        A density matrix.

    keep: int or Sequence[int]
        The qubit(s) to keep. For two qubits use `FIRST` or `SECOND`.

    Returns
    -------
    Operator
        The reduced density matrix.

    """
    rho = rho.as_density()
    n = rho.n_qubits
    keep = _qubit_list(keep, n)
    tensor_form = rho.entries.reshape((2,) * (2 * n))
    for qubit in reversed([q for q in range(n) if q not in keep]):
        remaining = tensor_form.ndim // 2
        tensor_form = np.trace(tensor_form, axis1=qubit, axis2=qubit + remaining)
    dim = 2 ** len(keep)
    return Operator(tensor_form.reshape(dim, dim), density=True)


def permute_qubits(op, order):
    """
    Reorders the tensor factors of ``op``: qubit ``i`` of the result is qubit ``order[i]`` of ``op``.
    """
    n = op.n_qubits
    order = [int(q) for q in order]
    if sorted(order) != list(range(n)):
        raise JMNetUsageError(f"{order} is not a permutation of {n} qubits.")
    if isinstance(op, Ket):
        return Ket(op.amplitudes.reshape((2,) * n).transpose(order).ravel())
    tensor_form = op.entries.reshape((2,) * (2 * n))
    tensor_form = tensor_form.transpose(order + [n + q for q in order])
    return Operator(tensor_form.reshape(op.dim, op.dim), density=op.density)


def bloch_vector(rho):
    """
    Returns ``(tr(rho sigma_x), tr(rho sigma_y), tr(rho sigma_z))`` for a single-qubit density matrix.
    """
    rho = rho.as_density()
    if rho.dim != 2:
        raise JMNetUsageError(f"bloch_vector() needs a single-qubit state, got dimension {rho.dim}.")
    return BlochVector.from_array(np.einsum("ij,kji->k", rho.entries, _PAULIS).real)


def correlation_tensor(rho):
    """Returns the 3x3 real matrix ``T[n, k] = tr(rho sigma_n (x) sigma_k)`` of a two-qubit operator."""
    entries = rho.entries if isinstance(rho, Operator) else np.asarray(rho)
    if entries.shape != (4, 4):
        raise JMNetUsageError(f"correlation_tensor() needs a two-qubit operator, got shape {entries.shape}.")
    return np.einsum("abcd,nca,kdb->nk", entries.reshape(2, 2, 2, 2), _PAULIS, _PAULIS).real


def paper_literal_ket(eta, phi):
    """
    The qubit written as ``sqrt((1-eta)/2) e^{i phi/2}|0> + sqrt((1+eta)/2) e^{-i phi/2}|1>``.

    With the usual sigma_z (``|0>`` has eigenvalue +1) this ket has Bloch vector
    ``(x, -y, -z)`` instead of ``(x, y, z)``. It is kept because its phases give
    ``<m,-m|psi^-> = i/sqrt(2)`` for every direction.
    """
    if not -1.0 <= eta <= 1.0:
        raise JMNetRangeError(f"eta must be in [-1, 1], got {eta}.")
    return Ket([math.sqrt((1 - eta) / 2) * np.exp(0.5j * phi),
                math.sqrt((1 + eta) / 2) * np.exp(-0.5j * phi)])


def ket_from_bloch(m, convention=DEFAULT_CONVENTION):
    """
    Creates the qubit state pointing along the unit vector ``m``.

    Parameters
    ----------
    m: BlochVector or Sequence[float]
        A unit vector (within ``1e-9``).

    convention: str, default = "invariant_first"
        ``"invariant_first"`` returns the +1 eigenstate of ``m . sigma`` with a real,
        non-negative ``|0>`` amplitude. ``"paper_literal"`` returns `paper_literal_ket`
        of the cylindrical coordinates of ``m``.

    Returns
    -------
    Ket

    Examples
    --------

    >>> ket_from_bloch([0, 0, 1]).amplitudes.real
    array([1., 0.])

    """
    m = _as_bloch(m)
    check_convention(convention)
    if abs(m.norm - 1) > UNIT_TOL:
        raise JMNetValidationError(f"ket_from_bloch() needs a unit vector, got norm {m.norm!r}.")
    if convention == "paper_literal":
        return paper_literal_ket(max(-1.0, min(1.0, m.eta)), m.phi)
    z = max(-1.0, min(1.0, m.z))
    return Ket([math.sqrt((1 + z) / 2), math.sqrt((1 - z) / 2) * np.exp(1j * m.phi)])


def antipodal_ket(m, convention=DEFAULT_CONVENTION):
    """
    Returns the state ``|-m>`` orthogonal to ``ket_from_bloch(m, convention)``.

    Under ``"paper_literal"`` it is obtained with ``eta -> -eta`` and ``phi -> phi + pi``
    (the phase of the result depends on that exact substitution).
    """
    m = _as_bloch(m)
    check_convention(convention)
    if convention == "paper_literal":
        return paper_literal_ket(max(-1.0, min(1.0, -m.eta)), m.phi + math.pi)
    return ket_from_bloch(-m, convention)


def werner_state(W):
    """
    Returns ``W |psi^-><psi^-| + (1 - W) 1/4``.

    Parameters
    ----------
    W: float
        The visibility, in ``[0, 1]``.

    Returns
    -------
    Operator

    """
    W = float(W)
    if not 0.0 <= W <= 1.0:
        raise JMNetRangeError(f"The visibility must be in [0, 1], got {W}.")
    return Operator(W * singlet().projector().entries + (1 - W) * np.eye(4) / 4, density=True)


def gram_matrix(kets):
    """Returns the matrix of overlaps ``<k_i|k_j>``."""
    amplitudes = np.array([ket.amplitudes for ket in kets])
    return amplitudes.conj() @ amplitudes.T


def orthonormality_deviation(kets):
    """Largest entry of ``|G - 1|`` where ``G`` is the Gram matrix of ``kets``."""
    gram = gram_matrix(kets)
    return float(np.max(np.abs(gram - np.eye(len(gram)))))


def born_probabilities(rho, basis):
    """
    Probabilities ``<k|rho|k>`` of the outcomes of a complete orthonormal measurement.

    Parameters
    ----------
    rho: Operator
        A density matrix.

    basis: Sequence[Ket] or JointBasis
        A complete orthonormal basis of the space of ``rho``.

    Returns
    -------
    numpy.ndarray

    """
    kets = list(getattr(basis, "kets", basis))
    rho = rho.as_density()
    if len(kets) != rho.dim or any(ket.dim != rho.dim for ket in kets):
        raise JMNetValidationError(f"born_probabilities() needs {rho.dim} kets of dimension {rho.dim}.")
    deviation = orthonormality_deviation(kets)
    if deviation > ROUND_TRIP_TOL:
        raise JMNetValidationError(f"The basis is not orthonormal (deviation {deviation:.3e}).")
    amplitudes = np.array([ket.amplitudes for ket in kets])
    return np.einsum("ki,ij,kj->k", amplitudes.conj(), rho.entries, amplitudes).real

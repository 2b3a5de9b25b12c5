"""
A module that wires sources and parties into networks (the triangle and the chain) and
computes their exact outcome distributions with the Born rule.

Triangle wiring
---------------
Source ``alpha`` sits opposite Alice, ``beta`` opposite Bob and ``gamma`` opposite Charlie.
The first qubit of ``alpha`` goes to Bob and its second to Charlie; ``beta`` feeds Charlie
then Alice; ``gamma`` feeds Alice then Bob. Each party measures its qubits in the cyclic
order of the 3-local decomposition: Alice ``(beta, gamma)``, Bob ``(gamma, alpha)``,
Charlie ``(alpha, beta)``.

Chain wiring
------------
Source ``i`` connects party ``i`` and party ``i + 1``. The end parties get one qubit each and
choose a spin measurement with their input; every middle party measures
``(qubit of source i - 1, qubit of source i)`` with a joint basis.
"""
import itertools
import json
import math
import string
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple
import numpy as np
from jmnet._defaults import EXACT_TOL, ROUND_TRIP_TOL, TABLE_TOL, DEFAULT_CONVENTION
from jmnet._helpers import debug, to_builtin
from jmnet.quantum import (BlochVector, Operator, tensor, werner_state, permute_qubits, partial_trace,
                           orthonormality_deviation, check_convention)
from jmnet.measurements import bell_basis, ejm_basis, spin_measurement
from jmnet.exceptions import (JMNetValidationError, JMNetUsageError, JMNetWiringError,
                              JMNetConfigurationError)

TRIANGLE = "triangle"
CHAIN = "chain"
TOPOLOGIES = (TRIANGLE, CHAIN)
MEASUREMENTS = ("ejm", "bsm")

TRIANGLE_PARTIES = ("A", "B", "C")
TRIANGLE_SOURCES = ("alpha", "beta", "gamma")

#: Global qubit indices (source ``s`` owns qubits ``2s`` and ``2s + 1``) measured by A, B and C.
TRIANGLE_WIRING = {"A": (3, 4), "B": (5, 0), "C": (1, 2)}
_TRIANGLE_ORDER = TRIANGLE_WIRING["A"] + TRIANGLE_WIRING["B"] + TRIANGLE_WIRING["C"]

_X = BlochVector(1, 0, 0)
_Z = BlochVector(0, 0, 1)
_DIAGONAL_PLUS = BlochVector(1 / math.sqrt(2), 0, 1 / math.sqrt(2))
_DIAGONAL_MINUS = BlochVector(-1 / math.sqrt(2), 0, 1 / math.sqrt(2))

#: Named end-party settings. For CHSH, Alice measures z and x and Charlie the +-45 degree
#: bases; for bilocality, both end parties measure the +-45 degree bases.
SETTINGS_PRESETS = {
    "chsh": ((_Z, _X), (_DIAGONAL_PLUS, _DIAGONAL_MINUS)),
    "bilocal": ((_DIAGONAL_PLUS, _DIAGONAL_MINUS), (_DIAGONAL_PLUS, _DIAGONAL_MINUS)),
}


class CorrelationTable:
    """
    A probability table ``p(outcomes | inputs)`` over finite alphabets.

    The probabilities are stored in an array of shape ``outcome_alphabets + input_alphabets``;
    a party without inputs has an input alphabet of size 1. Outcomes and inputs are
    0-based array indices.

    Examples
    --------

    >>> table = CorrelationTable(np.full((2, 2), 0.25))
    >>> table.outcome_alphabets, table.input_alphabets
    ((2, 2), (1, 1))

    """

    def __init__(self, probabilities, outcome_alphabets=None, input_alphabets=None, party_names=None,
                 tol=TABLE_TOL):
        """
        Parameters
        ----------
        probabilities: array_like
            Either of shape ``outcome_alphabets + input_alphabets`` or, when no party has
            inputs, of shape ``outcome_alphabets``.

        outcome_alphabets: Sequence[int] (optional)
            Defaults to the shape of ``probabilities``.

        input_alphabets: Sequence[int] (optional)
            Defaults to 1 for every party.

        party_names: Sequence[str] (optional)

        tol: float, default = 1e-9
            Tolerance on the normalization of each conditional slice.

        """
        probabilities = np.array(probabilities, dtype=float)
        if outcome_alphabets is None:
            outcome_alphabets = probabilities.shape if input_alphabets is None \
                else probabilities.shape[:probabilities.ndim // 2]
        outcome_alphabets = tuple(int(size) for size in outcome_alphabets)
        if input_alphabets is None:
            input_alphabets = (1,) * len(outcome_alphabets)
        input_alphabets = tuple(int(size) for size in input_alphabets)
        if len(input_alphabets) != len(outcome_alphabets):
            raise JMNetValidationError("There must be one input alphabet per party.")
        if probabilities.shape == outcome_alphabets and set(input_alphabets) == {1}:
            probabilities = probabilities.reshape(outcome_alphabets + input_alphabets)
        if probabilities.shape != outcome_alphabets + input_alphabets:
            raise JMNetValidationError(f"Probabilities of shape {probabilities.shape} do not match outcome "
                                       f"alphabets {outcome_alphabets} and input alphabets {input_alphabets}.")
        if party_names is None:
            party_names = tuple(string.ascii_uppercase[:len(outcome_alphabets)])
        self.party_names = tuple(party_names)
        self.outcome_alphabets = outcome_alphabets
        self.input_alphabets = input_alphabets
        lowest = probabilities.min()
        if lowest < -EXACT_TOL:
            raise JMNetValidationError(f"Negative probability {lowest:.3e} in correlation table.")
        sums = probabilities.sum(axis=tuple(range(self.n_parties)))
        worst = float(np.max(np.abs(sums - 1)))
        if worst > tol:
            raise JMNetValidationError(f"A conditional slice of the table sums to 1 only within {worst:.3e}.")
        probabilities.setflags(write=False)
        self._probabilities = probabilities

    def __repr__(self):
        return f"CorrelationTable(outcomes={self.outcome_alphabets}, inputs={self.input_alphabets})"

    @property
    def probabilities(self):
        return self._probabilities

    @property
    def n_parties(self):
        return len(self.outcome_alphabets)

    @property
    def has_inputs(self):
        return any(size > 1 for size in self.input_alphabets)

    def joint(self):
        """Returns ``p(outcomes)`` with the input axes removed; only for tables without inputs."""
        if self.has_inputs:
            raise JMNetUsageError("joint() is only defined for tables without inputs, use conditional().")
        return self._probabilities.reshape(self.outcome_alphabets)

    def conditional(self, inputs):
        """Returns the array ``p(outcomes | inputs)`` for one tuple of inputs (one entry per party)."""
        inputs = tuple(int(value) for value in inputs)
        if len(inputs) != self.n_parties:
            raise JMNetUsageError(f"Expected {self.n_parties} inputs, got {len(inputs)}.")
        return self._probabilities[(Ellipsis,) + inputs]

    def input_combinations(self):
        return list(itertools.product(*[range(size) for size in self.input_alphabets]))

    def marginal(self, parties):
        """
        Returns the table of the listed parties (indices), summing out the other outcomes.

        The inputs of the parties that are summed out are fixed to 0, which is exact for
        no-signalling tables.
        """
        parties = sorted(set(int(p) for p in parties))
        dropped = [p for p in range(self.n_parties) if p not in parties]
        summed = self._probabilities.sum(axis=tuple(dropped), keepdims=True)
        index = tuple(slice(None) if axis < self.n_parties or axis - self.n_parties in parties else 0
                      for axis in range(2 * self.n_parties))
        summed = summed[index]
        summed = summed.reshape([self.outcome_alphabets[p] for p in parties]
                                + [self.input_alphabets[p] for p in parties])
        return CorrelationTable(summed, [self.outcome_alphabets[p] for p in parties],
                                [self.input_alphabets[p] for p in parties],
                                [self.party_names[p] for p in parties])

    def condition_on(self, party, outcome):
        """
        Returns ``p(other outcomes | inputs, party gets outcome)`` as a table of the other parties.

        ``party`` must have no inputs.
        """
        party = int(party)
        if self.input_alphabets[party] != 1:
            raise JMNetUsageError("Only parties without inputs can be conditioned on.")
        selected = np.take(self._probabilities, int(outcome), axis=party)
        selected = np.take(selected, 0, axis=self.n_parties - 1 + party)
        keep = [p for p in range(self.n_parties) if p != party]
        norm = selected.sum(axis=tuple(range(len(keep))), keepdims=True)
        if np.any(norm <= 0):
            raise JMNetValidationError(f"Outcome {outcome} of party {party} has probability zero.")
        return CorrelationTable(selected / norm, [self.outcome_alphabets[p] for p in keep],
                                [self.input_alphabets[p] for p in keep],
                                [self.party_names[p] for p in keep])

    def group_outcomes(self, groups):
        """
        Coarse-grains the outcomes of every party.

        Parameters
        ----------
        groups: Sequence[Sequence[int]]
            A partition of the outcome indices; group ``g`` becomes the new outcome ``g``.

        Returns
        -------
        CorrelationTable

        """
        groups = [list(group) for group in groups]
        for size in self.outcome_alphabets:
            if sorted(itertools.chain(*groups)) != list(range(size)):
                raise JMNetUsageError(f"{groups} is not a partition of {size} outcomes.")
        grouped = self._probabilities
        for party in range(self.n_parties):
            grouped = np.stack([np.take(grouped, group, axis=party).sum(axis=party) for group in groups],
                               axis=party)
        return CorrelationTable(grouped, [len(groups)] * self.n_parties, self.input_alphabets, self.party_names)

    def total_variation(self, other):
        """Half the L1 distance to ``other``, maximized over input combinations."""
        other_probabilities = other.probabilities if isinstance(other, CorrelationTable) else np.asarray(other)
        if other_probabilities.size != self._probabilities.size:
            raise JMNetUsageError("Cannot compare tables of different sizes.")
        difference = np.abs(self._probabilities - other_probabilities.reshape(self._probabilities.shape))
        return float(np.max(difference.sum(axis=tuple(range(self.n_parties)))) / 2)

    def allclose(self, other, tol=ROUND_TRIP_TOL):
        other_probabilities = other.probabilities if isinstance(other, CorrelationTable) else np.asarray(other)
        return bool(np.allclose(self._probabilities, other_probabilities.reshape(self._probabilities.shape),
                                rtol=0, atol=tol))

    def to_dict(self):
        return {"parties": list(self.party_names),
                "outcome_alphabets": list(self.outcome_alphabets),
                "input_alphabets": list(self.input_alphabets),
                "probabilities": to_builtin(self._probabilities)}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data["probabilities"], data["outcome_alphabets"], data.get("input_alphabets"),
                       data.get("parties"))
        except KeyError as e:
            raise JMNetConfigurationError(f"Correlation table file is missing the field {e}.")

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as file:
            return cls.from_dict(json.load(file))

    def csv_header(self):
        inputs = [f"x_{name}" for name, size in zip(self.party_names, self.input_alphabets) if size > 1]
        return [name.lower() for name in self.party_names] + inputs + ["p"]

    def csv_rows(self):
        """Yields rows ``(outcome labels..., inputs..., p)`` with 1-based outcome labels."""
        with_inputs = [p for p, size in enumerate(self.input_alphabets) if size > 1]
        for inputs in self.input_combinations():
            for outcomes in itertools.product(*[range(size) for size in self.outcome_alphabets]):
                value = float(self._probabilities[outcomes + inputs])
                yield [o + 1 for o in outcomes] + [inputs[p] for p in with_inputs] + [value]


def _visibilities(W, count):
    W = [float(w) for w in W]
    if len(W) != count:
        raise JMNetConfigurationError(f"Expected {count} visibilities, got {len(W)}.")
    return W


def _basis_projectors(measurement):
    kets = list(getattr(measurement, "kets", measurement))
    if len(kets) != 4 or any(ket.dim != 4 for ket in kets):
        raise JMNetWiringError("Every party of the triangle and every middle party of a chain needs a "
                               "measurement on exactly two qubits.")
    deviation = orthonormality_deviation(kets)
    if deviation > ROUND_TRIP_TOL:
        raise JMNetValidationError(f"The measurement basis is not orthonormal (deviation {deviation:.3e}).")
    return np.array([np.outer(ket.amplitudes, ket.amplitudes.conj()) for ket in kets])


def born_table(rho, povms):
    """
    Returns ``p[o_1, ..., o_k] = tr(rho (E^1_{o_1} (x) ... (x) E^k_{o_k}))``.

    Parameters
    ----------
    rho: numpy.ndarray
        Density matrix whose tensor factors are already grouped party by party.

    povms: Sequence[numpy.ndarray]
        One array of shape ``(outcomes, d, d)`` per party, in the same order as in ``rho``.

    """
    dims = [povm.shape[1] for povm in povms]
    if int(np.prod(dims)) != rho.shape[0]:
        raise JMNetWiringError(f"Parties measuring dimensions {dims} do not match a state of dimension "
                               f"{rho.shape[0]}.")
    letters = iter(string.ascii_letters)
    rows = [next(letters) for _ in povms]
    cols = [next(letters) for _ in povms]
    outs = [next(letters) for _ in povms]
    subscripts = ["".join(rows + cols)] + [o + c + r for o, c, r in zip(outs, cols, rows)]
    expression = ",".join(subscripts) + "->" + "".join(outs)
    return np.einsum(expression, rho.reshape(dims + dims), *povms, optimize=True).real


def triangle_correlation(measurement, W=(1.0, 1.0, 1.0)):
    """
    Computes ``p(a, b, c)`` for three Werner sources in the triangle, every party measuring
    the same joint basis.

    Parameters
    ----------
    measurement: JointBasis

    W: Sequence[float], default = (1, 1, 1)
        Visibilities of the sources ``alpha``, ``beta`` and ``gamma``.

    Returns
    -------
    CorrelationTable
        A 4x4x4 table without inputs.

    Examples
    --------

    >>> from jmnet.measurements import ejm_basis
    >>> table = triangle_correlation(ejm_basis())
    >>> round(table.joint()[0, 0, 0] * 256, 9)
    25.0

    """
    W = _visibilities(W, 3)
    projectors = _basis_projectors(measurement)
    rho = permute_qubits(tensor(*[werner_state(w) for w in W]), _TRIANGLE_ORDER)
    probabilities = born_table(rho.entries, [projectors] * 3)
    debug(f"Triangle table computed for visibilities {W}")
    return CorrelationTable(probabilities, party_names=TRIANGLE_PARTIES)


def bsm_triangle_reference():
    """The triangle with singlets and the Bell-State Measurement at every party."""
    return triangle_correlation(bell_basis(), (1.0, 1.0, 1.0))


def _check_triangle(t):
    if not isinstance(t, CorrelationTable):
        t = CorrelationTable(t)
    if t.n_parties != 3 or t.has_inputs or len(set(t.outcome_alphabets)) != 1:
        raise JMNetUsageError(f"Expected a triangle table without inputs, got {t!r}.")
    return t.joint()


@dataclass
class TriangleStats:
    """
    Statistics of a triangle table. Pair quantities are given for every pair of parties
    (keys ``"AB"``, ``"BC"``, ``"CA"``); per-outcome lists are indexed by outcome.
    """
    marginals: Dict[str, List[float]]
    p_pair_equal: Dict[str, float]
    p_pair_equal_k: Dict[str, List[float]]
    p_conditional_pair: Dict[str, List[float]]
    p_conditional_triple: List[float]
    p_all_equal_k: List[float]
    p_all_equal: float
    p_all_distinct: float

    @property
    def p_ab_equal(self):
        return self.p_pair_equal["AB"]

    def to_dict(self):
        return to_builtin(self.__dict__)


def triangle_stats(t):
    """
    Computes marginals and coincidence statistics of a triangle table by direct summation.

    ``p_conditional_pair["AB"][k]`` is ``p(a=k | b=k)`` and ``p_conditional_triple[k]`` is
    ``p(a=k | b=c=k)``.
    """
    p = _check_triangle(t)
    size = p.shape[0]
    ks = np.arange(size)
    marginals = {"A": p.sum(axis=(1, 2)), "B": p.sum(axis=(0, 2)), "C": p.sum(axis=(0, 1))}
    pairs = {"AB": (p.sum(axis=2), marginals["B"]),
             "BC": (p.sum(axis=0), marginals["C"]),
             "CA": (p.sum(axis=1).T, marginals["A"])}
    pair_equal_k = {name: np.diag(joint) for name, (joint, _) in pairs.items()}
    conditional_pair = {name: np.divide(pair_equal_k[name], second, out=np.zeros(size), where=second > 0)
                        for name, (_, second) in pairs.items()}
    all_equal_k = p[ks, ks, ks]
    bc_equal_k = np.diag(p.sum(axis=0))
    distinct = sum(p[a, b, c] for a, b, c in itertools.permutations(range(size), 3))
    return TriangleStats(
        marginals={name: list(values) for name, values in marginals.items()},
        p_pair_equal={name: float(values.sum()) for name, values in pair_equal_k.items()},
        p_pair_equal_k={name: list(values) for name, values in pair_equal_k.items()},
        p_conditional_pair={name: list(values) for name, values in conditional_pair.items()},
        p_conditional_triple=list(np.divide(all_equal_k, bc_equal_k, out=np.zeros(size), where=bc_equal_k > 0)),
        p_all_equal_k=list(all_equal_k),
        p_all_equal=float(all_equal_k.sum()),
        p_all_distinct=float(distinct))


def cell_classes(t):
    """
    Splits the cells of a triangle table into ``"all_equal"`` (a=b=c), ``"two_equal"`` and
    ``"all_distinct"`` and returns the list of values of each class.
    """
    p = _check_triangle(t)
    classes = {"all_equal": [], "two_equal": [], "all_distinct": []}
    for cell in itertools.product(range(p.shape[0]), repeat=3):
        name = {1: "all_equal", 2: "two_equal", 3: "all_distinct"}[len(set(cell))]
        classes[name].append(float(p[cell]))
    return classes


def group_outcomes(t, groups):
    """See `CorrelationTable.group_outcomes`."""
    return t.group_outcomes(groups)


def condition_on(t, party, outcome):
    """See `CorrelationTable.condition_on`."""
    return t.condition_on(party, outcome)


def chain_party_names(n_sources):
    if n_sources == 2:
        return ("A", "B", "C")
    return ("A",) + tuple(f"B{k}" for k in range(1, n_sources)) + ("C",)


def _as_directions(settings):
    return [direction if isinstance(direction, BlochVector) else BlochVector.from_array(direction)
            for direction in settings]


def chain_correlation(n_sources, W, end_settings, middle_measurement=None):
    """
    Computes ``p(a, b_1, ..., b_{n-1}, c | x, y)`` for a chain of Werner sources.

    Parameters
    ----------
    n_sources: int
        At least 2; 2 is the entanglement-swapping scenario.

    W: Sequence[float]
        One visibility per source.

    end_settings: tuple(Sequence[BlochVector], Sequence[BlochVector])
        Measurement directions of the first party (indexed by ``x``) and of the last party
        (indexed by ``y``). Outcome 0 is the ``+1`` result.

    middle_measurement: JointBasis (optional)
        The measurement of every middle party; the BSM by default.

    Returns
    -------
    CorrelationTable

    """
    n_sources = int(n_sources)
    if n_sources < 2:
        raise JMNetConfigurationError(f"A chain needs at least 2 sources, got {n_sources}.")
    W = _visibilities(W, n_sources)
    try:
        alice_settings, charlie_settings = end_settings
    except (TypeError, ValueError):
        raise JMNetConfigurationError("end_settings must hold two families of directions.")
    alice_settings, charlie_settings = _as_directions(alice_settings), _as_directions(charlie_settings)
    if not alice_settings or not charlie_settings:
        raise JMNetConfigurationError("Each end party needs at least one setting.")
    middle = _basis_projectors(middle_measurement if middle_measurement is not None else bell_basis())
    rho = tensor(*[werner_state(w) for w in W]).entries
    n_middle = n_sources - 1
    outcome_alphabets = (2,) + (4,) * n_middle + (2,)
    input_alphabets = (len(alice_settings),) + (1,) * n_middle + (len(charlie_settings),)
    probabilities = np.zeros(outcome_alphabets + input_alphabets)
    for (x, a), (y, c) in itertools.product(enumerate(alice_settings), enumerate(charlie_settings)):
        povms = [spin_measurement(a)] + [middle] * n_middle + [spin_measurement(c)]
        index = (slice(None),) * len(outcome_alphabets) + (x,) + (0,) * n_middle + (y,)
        probabilities[index] = born_table(rho, povms)
    debug(f"Chain table computed for {n_sources} sources, visibilities {W}")
    return CorrelationTable(probabilities, outcome_alphabets, input_alphabets, chain_party_names(n_sources))


def swapped_state(W1, W2, outcome, basis=None):
    """
    Returns the Alice-Charlie state of the two-source chain after the middle party gets ``outcome``.

    Parameters
    ----------
    W1, W2: float
        Visibilities of the two sources.

    outcome: int
        0-based index into ``basis`` (``3`` is ``psi^-`` in the Bell basis).

    basis: JointBasis (optional)
        The middle measurement; the BSM by default.

    Returns
    -------
    Operator

    """
    basis = basis if basis is not None else bell_basis()
    projector = np.kron(np.kron(np.eye(2), _basis_projectors(basis)[int(outcome)]), np.eye(2))
    rho = tensor(werner_state(W1), werner_state(W2)).entries
    post = projector @ rho @ projector
    probability = np.trace(post).real
    if probability <= 0:
        raise JMNetValidationError(f"Outcome {outcome} has probability zero.")
    return partial_trace(Operator(post / probability, density=True), [0, 3])


def conditional_visibility(rho, ket):
    """Visibility ``V`` such that ``<ket|rho|ket> = (1 + 3V)/4``."""
    fidelity = np.vdot(ket.amplitudes, rho.entries @ ket.amplitudes).real
    return float((4 * fidelity - 1) / 3)


@dataclass
class Party:
    """A party of a network: the global qubits it measures and how many inputs it has."""
    name: str
    qubits: Tuple[int, ...]
    inputs: int = 1


@dataclass
class NetworkScenario:
    """
    A network of Werner sources and measuring parties.

    The JSON form has the fields ``topology``, ``n_sources``, ``visibilities``,
    ``measurement``, ``convention`` and ``end_settings``.

    Examples
    --------

    >>> scenario = NetworkScenario("triangle", [1, 1, 1])
    >>> [party.qubits for party in scenario.parties]
    [(3, 4), (5, 0), (1, 2)]

    """
    topology: str
    visibilities: Sequence[float]
    measurement: str = "ejm"
    convention: str = DEFAULT_CONVENTION
    n_sources: int = None
    end_settings: tuple = None

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise JMNetConfigurationError(f"Unknown topology '{self.topology}'. Use one of {TOPOLOGIES}.")
        if self.measurement not in MEASUREMENTS:
            raise JMNetConfigurationError(f"Unknown measurement '{self.measurement}'. Use one of {MEASUREMENTS}.")
        check_convention(self.convention)
        if self.n_sources is None:
            self.n_sources = 3 if self.topology == TRIANGLE else len(self.visibilities)
        self.n_sources = int(self.n_sources)
        if self.topology == TRIANGLE and self.n_sources != 3:
            raise JMNetConfigurationError("The triangle has exactly 3 sources.")
        if self.topology == CHAIN and self.n_sources < 2:
            raise JMNetConfigurationError("A chain needs at least 2 sources.")
        self.visibilities = tuple(_visibilities(self.visibilities, self.n_sources))
        if self.topology == CHAIN:
            if self.end_settings is None:
                self.end_settings = SETTINGS_PRESETS["chsh"]
            if len(self.end_settings) != 2:
                raise JMNetConfigurationError("end_settings must hold two families of directions.")
            self.end_settings = tuple(tuple(_as_directions(family)) for family in self.end_settings)
        elif self.end_settings:
            raise JMNetConfigurationError("Parties of the triangle have no inputs; remove end_settings.")
        self.validate()

    @property
    def sources(self):
        return [werner_state(w) for w in self.visibilities]

    @property
    def parties(self):
        if self.topology == TRIANGLE:
            return [Party(name, TRIANGLE_WIRING[name]) for name in TRIANGLE_PARTIES]
        names = chain_party_names(self.n_sources)
        last = 2 * self.n_sources - 1
        parties = [Party(names[0], (0,), len(self.end_settings[0]))]
        parties += [Party(names[k], (2 * k - 1, 2 * k)) for k in range(1, self.n_sources)]
        parties.append(Party(names[-1], (last,), len(self.end_settings[1])))
        return parties

    def joint_basis(self):
        if self.measurement == "bsm":
            return bell_basis()
        return ejm_basis(self.convention)

    def validate(self):
        """Checks that every qubit of every source is measured by exactly one party."""
        measured = sorted(q for party in self.parties for q in party.qubits)
        if measured != list(range(2 * self.n_sources)):
            raise JMNetWiringError(f"Qubits {measured} are not each measured exactly once.")
        if self.topology == CHAIN:
            with_inputs = [party.name for party in self.parties if party.inputs > 1]
            if any(name not in (self.parties[0].name, self.parties[-1].name) for name in with_inputs):
                raise JMNetWiringError("Only the first and last parties of a chain get inputs.")

    def evaluate(self):
        if self.topology == TRIANGLE:
            return triangle_correlation(self.joint_basis(), self.visibilities)
        return chain_correlation(self.n_sources, self.visibilities, self.end_settings, self.joint_basis())

    def to_dict(self):
        data = {"topology": self.topology, "n_sources": self.n_sources,
                "visibilities": list(self.visibilities), "measurement": self.measurement,
                "convention": self.convention}
        if self.end_settings is not None:
            data["end_settings"] = [[list(direction.as_array()) for direction in family]
                                    for family in self.end_settings]
        return to_builtin(data)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(topology=data["topology"], visibilities=data["visibilities"],
                       measurement=data.get("measurement", "ejm"),
                       convention=data.get("convention", DEFAULT_CONVENTION),
                       n_sources=data.get("n_sources"), end_settings=data.get("end_settings"))
        except KeyError as e:
            raise JMNetConfigurationError(f"Scenario file is missing the field {e}.")

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as file:
            return cls.from_dict(json.load(file))

"""
A module that represents 3-local classical models of the triangle and builds the explicit
models that reproduce (or approach) the quantum statistics.

In a 3-local model the sources ``alpha``, ``beta`` and ``gamma`` send independent hidden values,
and each party answers with a stochastic function of the values of its two sources::

    p(a, b, c) = sum P(alpha) P(beta) P(gamma) P(a | beta, gamma) P(b | gamma, alpha) P(c | alpha, beta)

Response tables are stored as arrays with the party's two sources in this cyclic order:
``A[beta, gamma, a]``, ``B[gamma, alpha, b]`` and ``C[alpha, beta, c]``.
"""
import itertools
import json
from typing import NamedTuple, Tuple
import numpy as np
from scipy.optimize import minimize_scalar
from jmnet._defaults import EXACT_TOL
from jmnet._helpers import debug, to_builtin
from jmnet.network import CorrelationTable, TRIANGLE_PARTIES, triangle_stats
from jmnet.exceptions import JMNetValidationError, JMNetConfigurationError, JMNetRangeError, JMNetUsageError

SOURCES = ("alpha", "beta", "gamma")

#: For each party, the indices of the two sources it reads, in the order of its table axes.
RESPONSE_SOURCES = {"A": (1, 2), "B": (2, 0), "C": (0, 1)}


def _probability_rows(array, name):
    array = np.array(array, dtype=float)
    if array.min(initial=0.0) < -EXACT_TOL:
        raise JMNetValidationError(f"{name} has a negative probability {array.min():.3e}.")
    worst = float(np.max(np.abs(array.sum(axis=-1) - 1)))
    if worst > EXACT_TOL:
        raise JMNetValidationError(f"The probabilities of {name} sum to 1 only within {worst:.3e}.")
    array.setflags(write=False)
    return array


class LocalModel:
    """
    A 3-local model of the triangle.

    Examples
    --------

    >>> uniform = LocalModel([np.ones(2) / 2] * 3, {name: np.full((2, 2, 4), 0.25) for name in "ABC"})
    >>> uniform.alphabets, uniform.n_outcomes
    ((2, 2, 2), 4)

    """

    def __init__(self, source_dists, responses):
        """
        Parameters
        ----------
        source_dists: Sequence[array_like]
            The distributions of ``alpha``, ``beta`` and ``gamma``.

        responses: dict
            The keys ``"A"``, ``"B"`` and ``"C"`` map to arrays of shape
            ``(|first source|, |second source|, outcomes)`` (see `RESPONSE_SOURCES`).

        """
        if len(source_dists) != 3:
            raise JMNetConfigurationError(f"A triangle model needs 3 sources, got {len(source_dists)}.")
        if sorted(responses) != list(TRIANGLE_PARTIES):
            raise JMNetConfigurationError(f"Responses are needed for exactly the parties {TRIANGLE_PARTIES}.")
        self.source_dists = tuple(_probability_rows(dist, f"source {name}")
                                  for dist, name in zip(source_dists, SOURCES))
        if any(dist.ndim != 1 for dist in self.source_dists):
            raise JMNetConfigurationError("Each source distribution must be a vector.")
        self.responses = {name: _probability_rows(responses[name], f"response {name}") for name in TRIANGLE_PARTIES}
        self.validate()

    def __repr__(self):
        return f"LocalModel(alphabets={self.alphabets}, outcomes={self.n_outcomes})"

    @property
    def alphabets(self):
        return tuple(len(dist) for dist in self.source_dists)

    @property
    def n_outcomes(self):
        return self.responses["A"].shape[-1]

    def validate(self):
        """Checks that every response table is wired to the right sources."""
        for name, (first, second) in RESPONSE_SOURCES.items():
            expected = (self.alphabets[first], self.alphabets[second], self.n_outcomes)
            if self.responses[name].shape != expected:
                raise JMNetConfigurationError(f"Response {name} has shape {self.responses[name].shape}, but its "
                                              f"sources {SOURCES[first]} and {SOURCES[second]} need {expected}.")

    def relabel(self, source, permutation):
        """
        Returns the same model with the hidden values of ``source`` (0, 1 or 2) renamed:
        new value ``i`` is old value ``permutation[i]``.
        """
        permutation = list(permutation)
        if sorted(permutation) != list(range(self.alphabets[source])):
            raise JMNetUsageError(f"{permutation} is not a permutation of the values of {SOURCES[source]}.")
        dists = list(self.source_dists)
        dists[source] = dists[source][permutation]
        responses = {}
        for name, axes in RESPONSE_SOURCES.items():
            table = self.responses[name]
            for axis, reads in enumerate(axes):
                if reads == source:
                    table = np.take(table, permutation, axis=axis)
            responses[name] = table
        return LocalModel(dists, responses)

    def to_dict(self):
        return {"alphabets": list(self.alphabets),
                "sources": to_builtin(self.source_dists),
                "responses": {name: to_builtin(table) for name, table in self.responses.items()}}

    @classmethod
    def from_dict(cls, data):
        try:
            model = cls(data["sources"], data["responses"])
        except KeyError as e:
            raise JMNetConfigurationError(f"Model file is missing the field {e}.")
        if "alphabets" in data and list(data["alphabets"]) != list(model.alphabets):
            raise JMNetConfigurationError(f"Alphabets {data['alphabets']} do not match the sources {model.alphabets}.")
        return model

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as file:
            return cls.from_dict(json.load(file))

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as file:
            json.dump(self.to_dict(), file, indent=2, sort_keys=True)


def evaluate_model(m):
    """
    Computes the triangle table of a 3-local model by exact summation.

    Parameters
    ----------
    m: LocalModel

    Returns
    -------
    CorrelationTable

    """
    m.validate()
    pa, pb, pc = m.source_dists
    probabilities = np.einsum("i,j,k,jka,kib,ijc->abc", pa, pb, pc,
                              m.responses["A"], m.responses["B"], m.responses["C"])
    return CorrelationTable(probabilities, party_names=TRIANGLE_PARTIES, tol=EXACT_TOL)


def _response_table(rule, first_size, second_size, n_outcomes):
    table = np.zeros((first_size, second_size, n_outcomes))
    for first, second in itertools.product(range(first_size), range(second_size)):
        for outcome, weight in rule(first, second):
            table[first, second, outcome] += weight
    return table


def _check_q(q):
    if not 0.0 <= q <= 1.0:
        raise JMNetRangeError(f"q must be in [0, 1], got {q}.")
    return float(q)


def _q_source(q, bit=None):
    """Hidden value ``2 * v1 + v2``: a uniform dit ``v1`` and a bit ``v2`` with ``P(1) = q``."""
    bit_dist = np.array([1 - q, q]) if bit is None else np.eye(2)[bit]
    return np.kron(np.full(4, 0.25), bit_dist)


def _q_response(first, second):
    """Reads ``(L, R)``: ``R1`` if ``L2=0, R2=1``; ``L1`` if ``L2=1, R2=0``; else a fair mix."""
    (l1, l2), (r1, r2) = divmod(first, 2), divmod(second, 2)
    if l2 == 0 and r2 == 1:
        return [(r1, 1.0)]
    if l2 == 1 and r2 == 0:
        return [(l1, 1.0)]
    return [(l1, 0.5), (r1, 0.5)]


def _q_model(dists):
    table = _response_table(_q_response, 8, 8, 4)
    return LocalModel(dists, {name: table for name in TRIANGLE_PARTIES})


def symmetric_q_model(q):
    """
    The symmetric model in which every hidden value is a pair (uniform dit, biased bit).

    Each source sends ``(v1, v2)`` with ``v1`` uniform in ``0..3`` and ``P(v2 = 1) = q``; the
    hidden value index is ``2 * v1 + v2``. Alice reads ``(beta, gamma)``: she outputs ``gamma_1``
    if ``beta_2 = 0`` and ``gamma_2 = 1``, ``beta_1`` if ``beta_2 = 1`` and ``gamma_2 = 0``, and
    either with probability 1/2 otherwise. Bob and Charlie apply the same rule to
    ``(gamma, alpha)`` and ``(alpha, beta)``. Outcome ``k`` is the dit value ``k``.

    Parameters
    ----------
    q: float
        In ``[0, 1]``.

    Returns
    -------
    LocalModel

    """
    q = _check_q(q)
    return _q_model([_q_source(q)] * 3)


def q_model_abc_rate(q):
    """
    Returns ``p(a=b=c) = (13 + 9q - 9q^2)/64`` of `symmetric_q_model`.

    Examples
    --------

    >>> q_model_abc_rate(0.5) * 256
    61.0

    """
    q = _check_q(q)
    return (13 + 9 * q - 9 * q ** 2) / 64


def q_model_optimum():
    """Returns the bias ``q`` that maximizes `q_model_abc_rate` and the maximum itself."""
    result = minimize_scalar(lambda q: -q_model_abc_rate(q), bounds=(0.0, 1.0), method="bounded",
                             options={"xatol": 1e-12})
    return float(result.x), q_model_abc_rate(float(result.x))


class QModelRow(NamedTuple):
    bits: Tuple[int, int, int]
    weight: float
    p_ab_equal: float
    p_all_equal: float


def q_model_table_rows(q=0.5):
    """
    Enumerates the model for every fixed value of the bits ``(alpha_2, beta_2, gamma_2)``.

    Returns
    -------
    list(QModelRow)
        The bits, the weight of the row for the given ``q``, and ``p(a=b)`` and ``p(a=b=c)``
        conditioned on the bits.

    """
    q = _check_q(q)
    rows = []
    for bits in itertools.product((0, 1), repeat=3):
        stats = triangle_stats(evaluate_model(_q_model([_q_source(q, bit) for bit in bits])))
        weight = float(np.prod([q if bit else 1 - q for bit in bits]))
        rows.append(QModelRow(bits, weight, stats.p_pair_equal["AB"], stats.p_all_equal))
    debug(f"q-model rows computed for q={q}")
    return rows


#: Outcome (1-based) of each party for the pair of bits it reads, first bit from its first source.
ASYMMETRIC_OUTPUTS = {
    "A": {(0, 0): 2, (0, 1): 1, (1, 0): 3, (1, 1): 4},
    "B": {(0, 0): 4, (0, 1): 1, (1, 0): 2, (1, 1): 3},
    "C": {(0, 0): 3, (0, 1): 1, (1, 0): 4, (1, 1): 2},
}


def asymmetric_model():
    """
    The model with binary sources that reaches ``p(a=b=c) = 1/2``.

    Each source sends ``(0, 1)`` or ``(1, 0)`` with probability 1/2; the hidden value is the
    first bit. The first bit of ``alpha`` goes to Bob and the second to Charlie, ``beta`` feeds
    Charlie then Alice, ``gamma`` feeds Alice then Bob. Alice reads ``(beta_2, gamma_1)``, Bob
    ``(gamma_2, alpha_1)`` and Charlie ``(alpha_2, beta_1)``, and each answers with
    `ASYMMETRIC_OUTPUTS`.
    """
    responses = {}
    for name, outputs in ASYMMETRIC_OUTPUTS.items():
        # the first source sends its second bit, the complement of its hidden value
        responses[name] = _response_table(lambda first, second: [(outputs[(1 - first, second)] - 1, 1.0)],
                                          2, 2, 4)
    return LocalModel([np.full(2, 0.5)] * 3, responses)


def _bsm_response(first, second):
    (u1, w1), (u2, w2) = divmod(first, 2), divmod(second, 2)
    return [(2 * (1 ^ u1 ^ u2) + (1 ^ w1 ^ w2), 1.0)]


def bsm_triangle_model():
    """
    A deterministic model that reproduces the triangle of singlets measured with the BSM.

    Each source sends two uniform bits ``(u, w)`` (hidden value ``2u + w``). Every party
    outputs the Bell state with ``psi``-bit ``1 + u + u'`` and sign bit ``1 + w + w'`` (mod 2),
    where the primes denote the other source. The outcome index is ``2 * psi_bit + sign_bit``
    in the order ``(phi+, phi-, psi+, psi-)``.
    """
    table = _response_table(_bsm_response, 4, 4, 4)
    return LocalModel([np.full(4, 0.25)] * 3, {name: table for name in TRIANGLE_PARTIES})


def grouped_ejm_model():
    """
    A model with binary outcomes that reproduces the EJM triangle with outcomes grouped
    ``{1, 2} -> 0`` and ``{3, 4} -> 1``: uniform binary sources, every party copying the value
    of one of its two sources chosen with probability 1/2.
    """
    table = _response_table(lambda first, second: [(first, 0.5), (second, 0.5)], 2, 2, 2)
    return LocalModel([np.full(2, 0.5)] * 3, {name: table for name in TRIANGLE_PARTIES})

"""
A module that evaluates the CHSH expression and the bilocality quantity on chain tables,
and compares visibilities with the known violation thresholds.
"""
import math
from dataclasses import dataclass, field
import numpy as np
from jmnet._defaults import TABLE_TOL, ROUND_TRIP_TOL
from jmnet._helpers import debug, to_builtin
from jmnet.quantum import BlochVector
from jmnet.measurements import JointBasis, bell_basis, bell_bits, bell_correlations
from jmnet.network import CorrelationTable, SETTINGS_PRESETS
from jmnet.exceptions import JMNetUsageError, JMNetRangeError

CHSH = "CHSH"
BILOCALITY = "bilocality"

CHSH_BOUND = 2.0
BILOCAL_BOUND = 1.0

#: Product of visibilities above which the swapped state violates CHSH.
CHSH_PRODUCT_THRESHOLD = 1 / math.sqrt(2)

#: Product of visibilities above which the chain violates the bilocality inequality.
BILOCAL_PRODUCT_THRESHOLD = 0.5

#: End-party settings that reach the quantum maximum of each inequality.
OPTIMAL_SETTINGS = {CHSH: SETTINGS_PRESETS["chsh"], BILOCALITY: SETTINGS_PRESETS["bilocal"]}

THRESHOLD_SCENARIOS = ("chsh_swap", "bilocal")


@dataclass
class InequalityResult:
    """
    The value of a Bell-type expression and its local bound.

    ``violated`` is ``True`` iff ``value > bound + 1e-9``.
    """
    name: str
    value: float
    bound: float
    settings_used: dict = field(default_factory=dict)
    violated: bool = field(init=False)

    def __post_init__(self):
        self.value = float(self.value)
        self.bound = float(self.bound)
        self.violated = self.value > self.bound + TABLE_TOL

    def to_dict(self):
        return to_builtin({"name": self.name, "value": self.value, "bound": self.bound,
                           "violated": self.violated, "settings_used": self.settings_used})


def _directions(settings):
    return [d.as_array() if isinstance(d, BlochVector) else np.asarray(d, dtype=float) for d in settings]


def chsh_sign_table(middle_outcomes, alice_settings, charlie_settings=None, basis=None):
    """
    Returns the 2x2 table of signs that undoes the Pauli frame left by the middle parties of a chain.

    After the outcomes ``b_1 .. b_k`` of Bell-type measurements, the Alice-Charlie correlation
    matrix is ``-V diag(D)`` with ``D = prod_k (-t_{b_k})``, ``t_b`` being the diagonal of the
    correlation matrix of basis state ``b``. A setting along a coordinate axis ``n`` absorbs the
    frame by flipping its outcome with the sign ``D_n``.

    Parameters
    ----------
    middle_outcomes: int or Sequence[int]
        0-based outcomes of the middle parties.

    alice_settings: Sequence[BlochVector]

    charlie_settings: Sequence[BlochVector] (optional)
        Used when Alice's settings are not axis-aligned.

    basis: JointBasis (optional)
        The middle measurement, the BSM by default.

    Returns
    -------
    numpy.ndarray
        ``signs[x, y]``, to be multiplied with the correlator ``E(x, y)``.

    Examples
    --------

    >>> from jmnet.network import SETTINGS_PRESETS
    >>> chsh_sign_table(1, SETTINGS_PRESETS["chsh"][0]).tolist()
    [[-1, -1], [1, 1]]

    """
    basis = basis if basis is not None else bell_basis()
    if isinstance(middle_outcomes, (int, np.integer)):
        middle_outcomes = [middle_outcomes]
    correlations = bell_correlations(basis)
    if np.max(np.abs(np.abs(correlations) - 1)) > ROUND_TRIP_TOL:
        raise JMNetUsageError(f"Sign corrections need a Bell-type basis, got '{basis.label}'.")
    frame = np.prod([-correlations[int(b)] for b in middle_outcomes], axis=0)

    def _signs(settings):
        signs = []
        for d in _directions(settings):
            if np.count_nonzero(np.abs(d) > ROUND_TRIP_TOL) != 1:
                return None
            signs.append(int(round(d @ np.diag(frame) @ d)))
        return signs

    alice = _signs(alice_settings)
    if alice is not None:
        return np.array([[s, s] for s in alice])
    if charlie_settings is not None:
        charlie = _signs(charlie_settings)
        if charlie is not None:
            return np.array([charlie for _ in alice_settings])
    raise JMNetUsageError("A sign correction needs the settings of Alice or of Charlie along coordinate axes.")


def _binary_correlators(p):
    """``E[x, y] = sum (-1)^(a+c) p(a, c | x, y)`` for an array of shape ``(2, 2, X, Y)``."""
    parity = np.array([[1, -1], [-1, 1]])
    return np.einsum("ac,acxy->xy", parity, p)


def chsh_value(t, signs=None, settings_used=None):
    """
    Computes ``|E(0,0) + E(0,1) + E(1,0) - E(1,1)|`` of a two-party binary table.

    Parameters
    ----------
    t: CorrelationTable
        Two parties with binary outcomes and two inputs each, e.g. a chain table conditioned
        on the middle outcomes.

    signs: array_like (optional)
        A 2x2 table of ``+1``/``-1`` multiplied with the correlators, see `chsh_sign_table`.

    settings_used: dict (optional)
        Echoed in the result.

    Returns
    -------
    InequalityResult

    """
    if t.n_parties != 2 or t.outcome_alphabets != (2, 2) or t.input_alphabets != (2, 2):
        raise JMNetUsageError(f"CHSH needs two binary parties with two inputs each, got {t!r}.")
    correlators = _binary_correlators(t.probabilities)
    signs = np.ones((2, 2)) if signs is None else np.asarray(signs, dtype=float)
    if signs.shape != (2, 2):
        raise JMNetUsageError(f"The sign table must be 2x2, got shape {signs.shape}.")
    corrected = signs * correlators
    value = abs(corrected[0, 0] + corrected[0, 1] + corrected[1, 0] - corrected[1, 1])
    debug(f"CHSH correlators {corrected.tolist()}")
    used = dict(settings_used or {})
    used["signs"] = signs.astype(int).tolist()
    return InequalityResult(CHSH, value, CHSH_BOUND, used)


def _bob_bits(t, bob_bits):
    if isinstance(bob_bits, JointBasis):
        return bell_bits(bob_bits)
    if bob_bits is None:
        if t.outcome_alphabets[1] != 4:
            raise JMNetUsageError("The middle party has no two-bit decomposition; pass bob_bits.")
        return bell_bits(bell_basis())
    bob_bits = np.asarray(bob_bits)
    if bob_bits.shape != (t.outcome_alphabets[1], 2) or not np.all(np.abs(bob_bits) == 1):
        raise JMNetUsageError(f"bob_bits must be a ({t.outcome_alphabets[1]}, 2) array of +1/-1.")
    return bob_bits


def bilocality_value(t, bob_bits=None, settings_used=None):
    """
    Computes ``sqrt|I| + sqrt|J|`` of a two-source chain table.

    With ``<A_x B C_y> = sum (-1)^a B_b (-1)^c p(a, b, c | x, y)``::

        I = 1/4 sum_xy <A_x B^0 C_y>,    J = 1/4 sum_xy (-1)^(x+y) <A_x B^1 C_y>

    Parameters
    ----------
    t: CorrelationTable
        Three parties: binary ``A`` and ``C`` with two inputs each, and ``B`` without inputs.

    bob_bits: array_like or JointBasis (optional)
        The ``+1``/``-1`` bits ``(B^0, B^1)`` of each outcome of ``B``, shape ``(outcomes, 2)``.
        A basis is decomposed with `jmnet.measurements.bell_bits`. Defaults to the bits of
        the BSM when ``B`` has four outcomes.

    settings_used: dict (optional)

    Returns
    -------
    InequalityResult

    """
    if t.n_parties != 3 or t.outcome_alphabets[0] != 2 or t.outcome_alphabets[2] != 2 \
            or t.input_alphabets != (2, 1, 2):
        raise JMNetUsageError(f"The bilocality quantity needs a two-source chain table with two "
                              f"settings per end party, got {t!r}.")
    bits = _bob_bits(t, bob_bits)
    p = t.probabilities[:, :, :, :, 0, :]
    parity = np.array([1, -1])
    three_body = np.einsum("a,bk,c,abcxy->kxy", parity, bits, parity, p)
    signs = np.array([[1, -1], [-1, 1]])
    I = three_body[0].sum() / 4
    J = (signs * three_body[1]).sum() / 4
    used = dict(settings_used or {})
    used.update({"I": float(I), "J": float(J), "bob_bits": bits.tolist()})
    return InequalityResult(BILOCALITY, math.sqrt(abs(I)) + math.sqrt(abs(J)), BILOCAL_BOUND, used)


@dataclass
class ThresholdReport:
    """Whether the visibilities of a two-source chain are above the known thresholds."""
    scenario: str
    W1: float
    W2: float
    product: float
    chsh_threshold: float = CHSH_PRODUCT_THRESHOLD
    bilocal_threshold: float = BILOCAL_PRODUCT_THRESHOLD
    symmetric_chsh_threshold: float = 2 ** -0.25
    symmetric_bilocal_threshold: float = 2 ** -0.5

    @property
    def chsh_violated(self):
        return self.product > self.chsh_threshold

    @property
    def bilocal_violated(self):
        return self.product > self.bilocal_threshold

    @property
    def violated(self):
        return self.chsh_violated if self.scenario == "chsh_swap" else self.bilocal_violated

    def to_dict(self):
        return to_builtin({**self.__dict__, "chsh_violated": self.chsh_violated,
                           "bilocal_violated": self.bilocal_violated, "violated": self.violated})


def threshold_report(scenario, W1, W2):
    """
    Compares ``W1 * W2`` with ``1/sqrt(2)`` (CHSH after swapping) and ``1/2`` (bilocality).

    For equal visibilities the thresholds per source are ``2^(-1/4)`` and ``2^(-1/2)``.

    Examples
    --------

    >>> report = threshold_report("chsh_swap", 0.75, 0.75)
    >>> report.chsh_violated, report.bilocal_violated
    (False, True)

    """
    if scenario not in THRESHOLD_SCENARIOS:
        raise JMNetUsageError(f"Unknown scenario '{scenario}'. Use one of {THRESHOLD_SCENARIOS}.")
    for W in (W1, W2):
        if not 0.0 <= W <= 1.0:
            raise JMNetRangeError(f"The visibility must be in [0, 1], got {W}.")
    return ThresholdReport(scenario, float(W1), float(W2), float(W1) * float(W2))


def conditioned_chsh(t, middle_outcomes, end_settings, basis=None):
    """
    Conditions a chain table on the outcomes of its middle parties and evaluates CHSH with the
    matching sign correction.

    Parameters
    ----------
    t: CorrelationTable
        A chain table (see `jmnet.network.chain_correlation`).

    middle_outcomes: Sequence[int]
        One 0-based outcome per middle party.

    end_settings: tuple(Sequence[BlochVector], Sequence[BlochVector])
        The settings the table was computed with.

    basis: JointBasis (optional)

    Returns
    -------
    InequalityResult

    """
    middle_outcomes = [int(b) for b in middle_outcomes]
    if len(middle_outcomes) != t.n_parties - 2:
        raise JMNetUsageError(f"Expected {t.n_parties - 2} middle outcomes, got {len(middle_outcomes)}.")
    conditioned = t
    for outcome in middle_outcomes:
        conditioned = conditioned.condition_on(1, outcome)
    signs = chsh_sign_table(middle_outcomes, end_settings[0], end_settings[1], basis)
    settings_used = {"middle_outcomes": middle_outcomes,
                     "alice": [list(d) for d in _directions(end_settings[0])],
                     "charlie": [list(d) for d in _directions(end_settings[1])]}
    return chsh_value(conditioned, signs, settings_used)

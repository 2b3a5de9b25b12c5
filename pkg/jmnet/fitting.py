"""
A module that searches for 3-local models close to a target triangle table.

The search is an expectation-maximization scheme over the source distributions and the
three response tables, restarted from random points with several hidden-alphabet sizes.
It gives evidence only: a small distance shows a model exists, a large one proves nothing.
"""
import json
from dataclasses import dataclass, asdict
from functools import wraps
from typing import Any, List, NamedTuple
import numpy as np
from scipy.special import softmax, rel_entr
from jmnet._defaults import DEFAULT_FIT
from jmnet._helpers import warn, info, debug
from jmnet.network import CorrelationTable
from jmnet.local_models import LocalModel, evaluate_model
from jmnet.exceptions import JMNetConfigurationError, JMNetUsageError

_imported_optional_reqs = {'joblib': False}

try:
    from joblib import Parallel, delayed
    _imported_optional_reqs['joblib'] = True
except ModuleNotFoundError: pass

DISTANCES = ("total_variation", "KL")

_TINY = 1e-300


class _ReqsChecker:

    def __init__(self, reqs) -> None:
        self.reqs = reqs

    def __call__(self, func) -> Any:
        @wraps(func)
        def new_func(*args, **kwargs):
            for req in self.reqs:
                if not _imported_optional_reqs[req]:
                    raise ModuleNotFoundError(f"You have not installed the optional package `{req}` yet, "
                                              f"to install it run:\n\tpip install {req}")
            return func(*args, **kwargs)
        return new_func


@dataclass
class FitConfig:
    """
    Settings of `fit_3local`.

    Attributes
    ----------
    max_cardinality: int, default = 8
        Largest number of hidden values per source.

    min_cardinality: int, default = 2
        Restart ``r`` uses ``min_cardinality + r % (max_cardinality - min_cardinality + 1)`` values.

    restarts: int, default = 64

    max_iterations: int, default = 2000
        Per restart.

    seed: int, default = 0
        Restart ``r`` draws from ``numpy.random.default_rng(seed ^ r)``.

    distance: str, default = "total_variation"
        ``"total_variation"`` or ``"KL"`` (``KL(target || model)``).

    tolerance: float, default = 1e-10
        A restart stops when its distance to the target falls to this value, or when one sweep
        improves the objective by less than this.

    n_jobs: int, default = 1
        Number of restarts run at the same time (needs joblib); ``-1`` uses every core.

    """
    max_cardinality: int = DEFAULT_FIT["max_cardinality"]
    min_cardinality: int = DEFAULT_FIT["min_cardinality"]
    restarts: int = DEFAULT_FIT["restarts"]
    max_iterations: int = DEFAULT_FIT["max_iterations"]
    seed: int = DEFAULT_FIT["seed"]
    distance: str = DEFAULT_FIT["distance"]
    tolerance: float = DEFAULT_FIT["tolerance"]
    n_jobs: int = DEFAULT_FIT["n_jobs"]

    def validate(self):
        for name in ("max_cardinality", "min_cardinality", "restarts", "max_iterations"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise JMNetConfigurationError(f"{name} must be a positive integer, got {value!r}.")
        if self.min_cardinality > self.max_cardinality:
            raise JMNetConfigurationError(f"min_cardinality ({self.min_cardinality}) exceeds max_cardinality "
                                          f"({self.max_cardinality}).")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2 ** 64:
            raise JMNetConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}.")
        if self.distance not in DISTANCES:
            raise JMNetConfigurationError(f"Unknown distance '{self.distance}'. Use one of {DISTANCES}.")
        if not self.tolerance > 0:
            raise JMNetConfigurationError(f"tolerance must be positive, got {self.tolerance!r}.")
        if not isinstance(self.n_jobs, (int, np.integer)) or self.n_jobs == 0:
            raise JMNetConfigurationError(f"n_jobs must be a non-zero integer, got {self.n_jobs!r}.")
        return self

    def cardinality(self, restart):
        return self.min_cardinality + restart % (self.max_cardinality - self.min_cardinality + 1)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(DEFAULT_FIT)
        if unknown:
            raise JMNetConfigurationError(f"Unknown fit settings {sorted(unknown)}.")
        return cls(**data).validate()

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as file:
            return cls.from_dict(json.load(file))


class RestartRecord(NamedTuple):
    restart: int
    cardinality: int
    distance: float
    iterations: int
    converged: bool


class FitResult(NamedTuple):
    model: LocalModel
    distance: float
    trace: List[RestartRecord]
    converged: bool


def total_variation(p, q):
    """Half the L1 distance between two probability arrays of the same size."""
    p, q = np.ravel(p), np.ravel(q)
    return float(np.abs(p - q).sum() / 2)


def kl_divergence(p, q):
    """``sum p log(p / q)``; infinite if ``q`` vanishes where ``p`` does not."""
    return float(rel_entr(np.ravel(p), np.ravel(q)).sum())


def _distance(name, target, model):
    if name == "KL":
        return kl_divergence(target, model)
    return total_variation(target, model)


def _joint(pa, pb, pc, A, B, C):
    """``P(alpha, beta, gamma, a, b, c)`` of the model."""
    return np.einsum("i,j,k,jka,kib,ijc->ijkabc", pa, pb, pc, A, B, C)


def _normalized(counts, previous):
    """Normalizes along the last axis; rows without mass keep their previous values."""
    mass = counts.sum(axis=-1, keepdims=True)
    return np.where(mass > _TINY, counts / np.where(mass > _TINY, mass, 1.0), previous)


def _posterior(target, joint):
    """``P(alpha, beta, gamma, a, b, c)`` reweighted so that its outcome marginal is ``target``."""
    model = joint.sum(axis=(0, 1, 2))
    ratio = np.divide(target, model, out=np.zeros_like(target), where=model > _TINY)
    return joint * ratio


def _update_sources(target, params):
    pa, pb, pc, A, B, C = params
    weights = _posterior(target, _joint(*params))
    pa = _normalized(weights.sum(axis=(1, 2, 3, 4, 5)), pa)
    pb = _normalized(weights.sum(axis=(0, 2, 3, 4, 5)), pb)
    pc = _normalized(weights.sum(axis=(0, 1, 3, 4, 5)), pc)
    return pa, pb, pc, A, B, C


def _update_response(target, params, party):
    params = list(params)
    weights = _posterior(target, _joint(*params))
    if party == 0:
        params[3] = _normalized(weights.sum(axis=(0, 4, 5)), params[3])
    elif party == 1:
        params[4] = _normalized(weights.sum(axis=(1, 3, 5)).transpose(1, 0, 2), params[4])
    else:
        params[5] = _normalized(weights.sum(axis=(2, 3, 4)), params[5])
    return tuple(params)


def _em(target, params, max_iterations, tolerance, distance="total_variation", update_responses=True):
    """
    Runs alternating EM updates that decrease ``KL(target || model)``: the sources, then the
    response of Alice, Bob and Charlie, each block from a fresh E-step.

    Stops once the ``distance`` to the target is at most ``tolerance`` or one sweep improves
    the objective by less than ``tolerance``. Returns the final parameters, the number of
    sweeps and whether either criterion was met within ``max_iterations``.
    """
    previous = np.inf
    for iteration in range(1, max_iterations + 1):
        model = _model_distribution(params)
        if _distance(distance, target, model) <= tolerance:
            return params, iteration, True
        objective = kl_divergence(target, model)
        if previous - objective < tolerance:
            return params, iteration, True
        previous = objective
        params = _update_sources(target, params)
        if update_responses:
            for party in range(3):
                params = _update_response(target, params, party)
    converged = _distance(distance, target, _model_distribution(params)) <= tolerance
    return params, max_iterations, converged


def _snapped(table):
    """Replaces every row of a response table by a point mass on its most likely outcome."""
    return np.eye(table.shape[-1])[table.argmax(axis=-1)]


def _random_params(rng, k, n_outcomes):
    sources = [softmax(rng.normal(size=k)) for _ in range(3)]
    responses = [softmax(rng.normal(size=(k, k, n_outcomes)), axis=-1) for _ in range(3)]
    return tuple(sources + responses)


def _model_distribution(params):
    return _joint(*params).sum(axis=(0, 1, 2))


def _run_restart(target, restart, cfg):
    """One restart: EM from a random point, then EM over the sources with snapped responses."""
    k = cfg.cardinality(restart)
    rng = np.random.default_rng(cfg.seed ^ restart)
    params = _random_params(rng, k, target.shape[0])
    params, iterations, converged = _em(target, params, cfg.max_iterations, cfg.tolerance, cfg.distance)
    distance = _distance(cfg.distance, target, _model_distribution(params))

    if distance > cfg.tolerance:
        pa, pb, pc, A, B, C = params
        snapped = (pa, pb, pc, _snapped(A), _snapped(B), _snapped(C))
        polished, polish_iterations, polish_converged = _em(target, snapped, cfg.max_iterations, cfg.tolerance,
                                                            cfg.distance, update_responses=False)
        polished_distance = _distance(cfg.distance, target, _model_distribution(polished))
        if polished_distance < distance:
            params, distance = polished, polished_distance
            iterations += polish_iterations
            converged = polish_converged
    debug(f"Restart {restart} (cardinality {k}): distance {distance:.3e} after {iterations} iterations")
    return params, RestartRecord(restart, k, float(distance), int(iterations), bool(converged))


def _serial_restarts(target, cfg):
    return [_run_restart(target, restart, cfg) for restart in range(cfg.restarts)]


@_ReqsChecker(['joblib'])
def _parallel_restarts(target, cfg):
    return Parallel(n_jobs=cfg.n_jobs)(delayed(_run_restart)(target, restart, cfg)
                                       for restart in range(cfg.restarts))


def _to_model(params):
    pa, pb, pc, A, B, C = params
    # renormalize against rounding before the model's own 1e-12 checks
    sources = [dist / dist.sum() for dist in (pa, pb, pc)]
    responses = {name: table / table.sum(axis=-1, keepdims=True) for name, table in zip("ABC", (A, B, C))}
    return LocalModel(sources, responses)


def fit_3local(target, cfg=None):
    """
    Searches for the 3-local model closest to a triangle table.

    Parameters
    ----------
    target: CorrelationTable
        A triangle table without inputs; every party must have the same number of outcomes.

    cfg: FitConfig (optional)

    Returns
    -------
    FitResult
        The best model over every restart, its distance to the target, one `RestartRecord`
        per restart, and whether the best restart converged. Ties go to the lowest restart
        index, so the result only depends on the target and ``cfg``.

    Examples
    --------

    >>> from jmnet.local_models import asymmetric_model
    >>> result = fit_3local(evaluate_model(asymmetric_model()), FitConfig(max_cardinality=2, restarts=4))
    >>> len(result.trace)
    4

    """
    cfg = (cfg if cfg is not None else FitConfig()).validate()
    if not isinstance(target, CorrelationTable):
        target = CorrelationTable(target)
    if target.n_parties != 3 or target.has_inputs or len(set(target.outcome_alphabets)) != 1:
        raise JMNetUsageError(f"fit_3local() needs a triangle table without inputs, got {target!r}.")
    target_array = np.array(target.joint(), dtype=float)
    info(f"Fitting a 3-local model: {cfg.restarts} restarts, cardinalities {cfg.min_cardinality}.."
         f"{cfg.max_cardinality}, distance {cfg.distance}")

    if cfg.n_jobs == 1:
        runs = _serial_restarts(target_array, cfg)
    else:
        try:
            runs = _parallel_restarts(target_array, cfg)
        except ModuleNotFoundError as e:
            warn(f"{e}\nRunning the restarts one after the other.")
            runs = _serial_restarts(target_array, cfg)

    trace = [record for _, record in runs]
    best = min(range(len(runs)), key=lambda index: (trace[index].distance, index))
    params, record = runs[best]
    model = _to_model(params)
    distance = _distance(cfg.distance, target_array, evaluate_model(model).joint())
    if not record.converged:
        warn(f"The best restart ({record.restart}) stopped at {cfg.max_iterations} iterations "
             f"without converging.")
    info(f"Best distance {distance:.3e} from restart {record.restart} (cardinality {record.cardinality})")
    return FitResult(model, distance, trace, record.converged)

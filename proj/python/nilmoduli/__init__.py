"""Left-invariant metrics and Hermitian structures on six-dimensional nilpotent Lie algebras.

Algebras are named by built-in label ("h2", "h4", "h5", "h6", "h9", "h9hat") or given in
Salamon notation such as "(0,0,0,0,12,13)". Matrices are 6x6 numpy arrays. Forms are dicts
``{"algebra": "h6", "params": {"a": 2, "b": 3}}``.
"""

import json

import numpy as np

from . import _core
from ._core import CanonicalizationFailed, Error, NotSPD, ParseError

SCHEMA = _core.SCHEMA
SEARCH_NONE_THRESHOLD = _core.SEARCH_NONE_THRESHOLD

jacobi_residual = _core.jacobi_residual
nilpotency_step = _core.nilpotency_step
derivation_dim = _core.derivation_dim


def _mat(m):
    return np.asarray(m, dtype=float).reshape(6, 6)


def _form(form):
    return json.dumps(form)


def describe(algebra):
    return json.loads(_core.describe(algebra))


def nijenhuis_residual(algebra, J):
    return _core.nijenhuis_residual(algebra, _mat(J))


def is_automorphism(algebra, M, tol=1e-9):
    return _core.is_automorphism(algebra, _mat(M), tol)


def random_automorphism(algebra, seed, component=None):
    return _core.random_automorphism(algebra, seed, component)


def pullback_metric(g, phi):
    return _core.pullback_metric(_mat(g), _mat(phi))


def realize(form):
    return _core.realize(_form(form))


def canonicalize(algebra, g):
    return json.loads(_core.canonicalize(algebra, _mat(g)))


def isometry_group(form):
    return json.loads(_core.isometry_group(_form(form)))


def verify_isometry_group(form, seed=0, starts=12):
    return json.loads(_core.verify_isometry_group(_form(form), seed, starts))


def hermitian(form):
    return json.loads(_core.hermitian(_form(form)))


def hermitian_search(algebra, g, tol=1e-8, budget=64, seed=0):
    return json.loads(_core.hermitian_search(algebra, _mat(g), tol, budget, seed))

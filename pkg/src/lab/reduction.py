"""Order-independent reductions."""

import math
from typing import Union

import numpy as np


def stable_sum(values: np.ndarray) -> Union[float, complex]:
    """Compensated sum of a real or complex array, independent of memory layout."""
    arr = np.asarray(values).ravel()
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))
    return math.fsum(arr.tolist())


def weighted_sum(weights: np.ndarray, values: np.ndarray) -> Union[float, complex]:
    """Quadrature reduction sum(w * f) with compensated accumulation."""
    return stable_sum(np.asarray(weights) * np.asarray(values))

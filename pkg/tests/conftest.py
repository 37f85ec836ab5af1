import numpy as np
import pytest

from cknlab.params import (
    CknParams,
    ParameterError,
    RegionClass,
    classify,
    curve_constants,
    felli_schneider,
    make_params,
)

# exponent cap keeps the solver/quadrature grids well-conditioned; the
# admissible set is unbounded in p as b approaches the symmetry-breaking
# curve, where every scale degenerates together
P_CAP = 8.0


def sample_valid_params(
    rng: np.random.Generator,
    n_choices=(2, 3, 4, 5, 6, 7),
    region: str | None = None,
    p_cap: float = P_CAP,
    margin: float = 0.02,
    avoid_p_near_2: bool = False,
) -> CknParams:
    """Draw a random admissible parameter point, optionally within one region."""
    for _ in range(10_000):
        n_dim = int(rng.choice(n_choices))
        curves = curve_constants(n_dim)
        a_c = curves.a_c
        if region == "CaseI":
            if n_dim < 3:
                continue
            a = float(rng.uniform(curves.a_c_star + 1e-3, a_c - 1e-3))
            lo, hi = a, a + 1.0
        elif region == "CaseII":
            a = float(rng.uniform(-2.0, curves.a_c_star - 1e-3))
            lo = max(curves.b_fs_star(a), a if a >= 0.0 else -np.inf)
            hi = a + 1.0
        elif region == "Remaining":
            a = float(rng.uniform(-2.0, curves.a_c_star - 1e-3))
            lo = max(felli_schneider(n_dim, a), a if a >= 0.0 else -np.inf)
            if a == 0.0:
                lo = max(lo, 1e-6)
            hi = curves.b_fs_star(a)
        else:
            if n_dim >= 3 and rng.random() < 0.5:
                a = float(rng.uniform(1e-3, a_c - 1e-3))
                lo, hi = a, a + 1.0
            else:
                a = float(rng.uniform(-2.0, -0.05))
                lo, hi = felli_schneider(n_dim, a), a + 1.0
        if not hi > lo:
            continue
        width = hi - lo
        b = float(rng.uniform(lo + margin * width, hi - margin * width))
        try:
            params = make_params(n_dim, a, b)
        except ParameterError:
            continue
        if params.p > p_cap:
            continue
        if avoid_p_near_2 and abs(params.p - 2.0) < 0.05:
            continue
        if region is not None and classify(params).region.value != region:
            continue
        return params
    raise RuntimeError("sampler failed to find a point")


@pytest.fixture(scope="session")
def params_case1() -> CknParams:
    return make_params(4, 0.5, 0.6)


@pytest.fixture(scope="session")
def params_case2() -> CknParams:
    return make_params(4, 0.0, 0.5)


@pytest.fixture(scope="session")
def params_remaining() -> CknParams:
    return make_params(4, 0.0, 0.3)


@pytest.fixture(scope="session")
def params_p3() -> CknParams:
    # critical exponent exactly 3: two-bubble deficits are measurable at the
    # standard separations
    return make_params(4, 0.5, 0.5)


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)

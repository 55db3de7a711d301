import numpy as np
import pytest

from bosegas import HardCore, SquareWell, solve_zero_energy


def square_well_length(V0: float, R0: float, mu: float) -> float:
    """Closed-form square-well scattering length, derived by matching u and
    u' at the edge: a = R0 * (1 - tanh(kappa*R0)/(kappa*R0)), kappa = sqrt(V0/2mu).

    Independent oracle for the ODE solver; kept out of the library on purpose.
    """
    if V0 == 0.0:
        return 0.0
    kappa = np.sqrt(V0 / (2.0 * mu))
    return R0 * (1.0 - np.tanh(kappa * R0) / (kappa * R0))


@pytest.fixture(scope="session")
def hard_core_solution():
    return solve_zero_energy(HardCore(1.0), mu=1.0)


@pytest.fixture(scope="session")
def well_solution():
    # V0=4, R0=1 at 2*mu=1: a = 1 - tanh(2)/2
    return solve_zero_energy(SquareWell(4.0, 1.0), mu=0.5)

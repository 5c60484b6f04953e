"""Reference parameter sets: the negativity demo state, four correlation-sweep states, and the two-atom preparation."""

from math import pi, sqrt

from .qed import PrepParams
from .wigner import InitialStateParams

NEGATIVITY_DEMO = InitialStateParams.from_moduli(1 / 3, sqrt(2) / 2, phi=0.0, varphi=pi)
NEGATIVITY_DEMO_TIMES = (0.0, 0.2, 0.35, 3.0)

CORRELATION_SETS = {
    "blue": InitialStateParams.from_moduli(sqrt(6) / 6, sqrt(6) / 3, phi=0.0, varphi=pi),
    "red": InitialStateParams.from_moduli(2 / 9, 2 / 3, phi=0.0, varphi=pi),
    "gray": InitialStateParams.from_moduli(1 / 3, 1 / 3, phi=0.0, varphi=pi),
    "green": InitialStateParams.from_moduli(1 / 5, 1 / 3, phi=0.0, varphi=pi),
}

TWO_ATOM_PARAMS = PrepParams(gt1=pi / 4, gt2=pi / 4, theta1=7 * pi / 2, theta2=pi / 2, phi1=pi, phi2=0.0)
TWO_ATOM_STATE = InitialStateParams.from_moduli(sqrt(6) / 3, sqrt(6) / 6)

VACUUM = InitialStateParams(1.0, 0.0, 0.0)

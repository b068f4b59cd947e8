from enum import Enum, IntEnum


class Arm(Enum):
    """Tensor factor order is idler ⊗ signal."""
    IDLER = 'idler'
    SIGNAL = 'signal'

class Plane(Enum):
    MERIDIAN = 'meridian'
    EQUATORIAL = 'equatorial'

class WaveplateKind(Enum):
    HWP = 'HWP'
    QWP = 'QWP'

class SourceMode(Enum):
    IDEAL = 'ideal'
    DEPHASED = 'dephased'
    WERNER = 'werner'

class Herald(Enum):
    # transmitted idler photon fires the TTM pulse -> switches to cross -> U_B
    TRANSMIT = 'transmit'
    REFLECT = 'reflect'

class NoiseModel(Enum):
    MULTINOMIAL = 'multinomial'
    POISSON = 'poisson'

class ExitCode(IntEnum):
    SUCCESS = 0
    RUNTIME_ERROR = 1
    CONFIG_ERROR = 2
    INFEASIBLE = 3

class TemplateName(Enum):
    TIMING_REPORT = 'TIMING_REPORT'
    TOMOGRAPHY_REPORT = 'TOMOGRAPHY_REPORT'
    COMPENSATION_REPORT = 'COMPENSATION_REPORT'
    SWEEP_SUMMARY = 'SWEEP_SUMMARY'

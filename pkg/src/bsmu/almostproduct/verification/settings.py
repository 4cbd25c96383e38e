from __future__ import annotations

from dataclasses import dataclass

from bsmu.almostproduct.core.config import Config
from bsmu.almostproduct.core.errors import ConfigError


@dataclass
class VerificationSettings(Config):
    exact_tol: float = 1e-12
    inversion_tol: float = 1e-10
    relative_tol: float = 1e-9
    classification_tol: float = 1e-9
    bounded_away_tol: float = 1e-6
    tiny_torsion: float = 1e-8
    p_tensor_pairing_tol: float = 1e-8

    def validate(self):
        for name, value in vars(self).items():
            if value <= 0:
                raise ConfigError(f'{type(self).__name__}.{name} must be positive, got {value}')

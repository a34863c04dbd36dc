"""Hidden-policy attribute-based key distribution for in-vehicle networks.

Subpackages and modules:

- ``group``: Schnorr-group arithmetic (gmpy2 when available, builtin ``pow`` otherwise)
- ``primitives``: PRF, truncated MAC, AES block cipher, keyed shuffle
- ``eabehp``: the encryption scheme with its proxy transform and decrypt steps
- ``protocol``: the key-exchange state machines and wire format
- ``sim``: discrete-event CAN-FD simulation with a compute-cost model
- ``cli``: the ``ecsvc`` command
"""

from .errors import ConfigError, EcsvcError
from .group import BACKEND, GroupParams, named_group

__version__ = "0.1.0"

__all__ = ["BACKEND", "ConfigError", "EcsvcError", "GroupParams", "named_group", "__version__"]

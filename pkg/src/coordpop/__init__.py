"""coordpop: asynchronous decision-making populations, coordination checks and incentive control."""

from .core import ActivationSequence, ChoiceAlphabet, Population, RunTrace, canonical_sequence, equilibrate, run
from .netgames import Network, NetworkGame, TieBreaker
from .pgg import PublicGoodsGame

__version__ = "0.1.0"

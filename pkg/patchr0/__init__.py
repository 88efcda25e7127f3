"""Principal eigenvalues and basic reproduction ratios of periodic
cooperative patch models, and their small and large dispersal limits."""
import logging

__version__ = '0.1.0'

logging.getLogger(__name__).addHandler(logging.NullHandler())

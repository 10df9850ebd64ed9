"""Reeb fields as energy minimizers on Sasakian 3-manifolds."""

from .seifert_rr import SeifertData, Verdict, dim_h1, mu1_D, verdict, weighted_seifert
from .geometry import Weights

__all__ = ["SeifertData", "Verdict", "Weights", "dim_h1", "mu1_D", "verdict", "weighted_seifert"]
__version__ = "0.1.0"

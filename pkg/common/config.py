import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

# Largest prime below 2**15: products of residues and sums of a few
# thousand of them stay inside int64.
DEFAULT_MODULUS = 32749

ISO_COEFFICIENTS: Tuple[int, ...] = (1, -1, 2, -2, 3, -3)


@dataclass(frozen=True)
class Settings:
    cache_dir: Optional[Path] = None
    max_iso_search: int = 3
    oracle_max_dim: int = 4
    # largest height whose realness verify_main_theorem will decide
    max_real_height: int = 4
    modulus: int = DEFAULT_MODULUS

    @classmethod
    def from_env(cls) -> "Settings":
        cache_dir = os.environ.get("KLR_CACHE_DIR")
        return cls(cache_dir=Path(cache_dir) if cache_dir else None)

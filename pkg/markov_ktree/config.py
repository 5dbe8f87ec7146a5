import os
from dotenv import load_dotenv

from markov_ktree.constants import DEFAULT_TABLE_CAP, ORACLE_CAPS, ORACLE_CAP_FALLBACK

load_dotenv()

KTREE_LOG = os.getenv("KTREE_LOG", "WARNING").upper()
TABLE_CAP = int(os.getenv("KTREE_TABLE_CAP", str(DEFAULT_TABLE_CAP)))
_ORACLE_CAP_OVERRIDE = os.getenv("KTREE_ORACLE_CAP", "")

if KTREE_LOG not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
    raise ValueError(f"Unknown KTREE_LOG level: {KTREE_LOG}")

if TABLE_CAP < 1:
    raise ValueError("KTREE_TABLE_CAP must be a positive integer")


def oracle_cap(k: int) -> int:
    """Largest vertex count the brute-force oracle accepts for width k."""
    if _ORACLE_CAP_OVERRIDE:
        return int(_ORACLE_CAP_OVERRIDE)
    return ORACLE_CAPS.get(k, ORACLE_CAP_FALLBACK)

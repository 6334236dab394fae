import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

ENVIRONMENT = os.getenv("ENVIRONMENT", "local")
LOG_LEVEL = os.getenv("DRAYAGE_LOG_LEVEL", "INFO").upper()

_PACKAGE_DATA = Path(__file__).resolve().parent / "data"
DATA_DIR = Path(os.getenv("DRAYAGE_DATA_DIR", "") or _PACKAGE_DATA)
VEHICLES_DIR = DATA_DIR / "vehicles"

SIM_DT = float(os.getenv("DRAYAGE_SIM_DT", "1.0"))
SEED = int(os.getenv("DRAYAGE_SEED", "2024"))

BATCH_MAX_CONCURRENCY = int(os.getenv("DRAYAGE_BATCH_MAX_CONCURRENCY", str(os.cpu_count() or 1)))
BATCH_PER_SCENARIO_TIMEOUT = float(os.getenv("DRAYAGE_BATCH_PER_SCENARIO_TIMEOUT", "600"))

MONTHLY_VMT_KM = float(os.getenv("DRAYAGE_MONTHLY_VMT_KM", "8046"))
FLEET_SIZE = int(os.getenv("DRAYAGE_FLEET_SIZE", "40"))

def _parse_names(raw: str) -> list[str]:
    names = []
    for part in (raw or "").replace(" ", "").split(","):
        if part and part not in names:
            names.append(part)
    return names

# Empty = every factor
SENSITIVITY_FACTORS: list[str] = _parse_names(os.getenv("DRAYAGE_SENSITIVITY_FACTORS", ""))
SENSITIVITY_STEP = float(os.getenv("DRAYAGE_SENSITIVITY_STEP", "0.10"))
